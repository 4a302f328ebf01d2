# # How much cheaper is the randomized method?
#
# FLOP counts are composed from per-kernel formulas (Gram product,
# matrix product, QR, SVD) and kept as exact fractions.

from chanrecon.flops import flops_direct_svd, flops_method1, ratio_sweep

M, S = 8, 2
d = flops_direct_svd(128, M, S, 1)
r = flops_method1(128, M, 8, S, 1)
print(f"Nt=128: direct {float(d):,.0f}  randomized(L=8) {float(r):,.0f}  ratio {float(r.value / d.value):.2%}")

# The breakdown shows where the time goes: the Nt x Nt eigensolve
# dominates the direct path.

for label, atom, value in d.breakdown:
    print(f"  direct  {label:<22} {float(value):>14,.0f}")
for label, atom, value in r.breakdown:
    print(f"  method1 {label:<22} {float(value):>14,.0f}")

# The ratio shrinks as the array grows, and grows with the sketch width.

for L in (2, 4, 6, 8):
    rows = ratio_sweep([32, 64, 128, 200, 256], M, L, S, 1)
    print(f"L={L}: " + "  ".join(f"Nt={nt}:{float(q):.3%}" for nt, _, _, q in rows))
