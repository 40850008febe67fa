"""Exact photon-statistics tables.

The light model interpolates between superbunched squeezed-vacuum-like
light (quadrature ratio r=0, g(n) = (2n-1)!!) and thermal light (r=1,
g(n) = n!). All moments are computed in exact rational arithmetic, and
the correlation function of the n-th harmonic follows from the pump
moments alone: g2(harmonic n) = g(2n) / g(n)^2.
"""

from fractions import Fraction

from bsvsim import analytic_gn, bsv, coherent, predict_harmonic_g2, thermal

SOURCES = [("coherent", coherent(1.0)), ("thermal", thermal(1.0)),
           ("bsv", bsv(1.0))]

print("normalized intensity moments g(n)")
print(f"{'n':>3} " + "".join(f"{tag:>12}" for tag, _ in SOURCES))
for n in range(1, 6):
    row = [analytic_gn(model, n) for _, model in SOURCES]
    print(f"{n:>3} " + "".join(f"{str(g):>12}" for g in row))

print("\npredicted g2 of the n-th harmonic, g(2n)/g(n)^2")
print(f"{'n':>3} " + "".join(f"{tag:>12}" for tag, _ in SOURCES))
for n in (2, 3, 4):
    row = []
    for _, model in SOURCES:
        gs = {k: analytic_gn(model, k) for k in (n, 2 * n)}
        row.append(predict_harmonic_g2(gs, n))
    print(f"{n:>3} " + "".join(f"{float(g):>12.4f}" for g in row))

# The fourth-harmonic value for squeezed-vacuum-like light:
g = {k: analytic_gn(bsv(1.0), k) for k in (4, 8)}
fourth = predict_harmonic_g2(g, 4)
assert fourth == Fraction(2027025, 11025)
print(f"\nfourth harmonic of superbunched light: g2 = {fourth} "
      f"= {float(fourth):.3f}")
