# # Checking the expected residual bound
#
# For an Nt x m matrix with singular values sigma, a Gaussian sketch of
# width d + p (p >= 2) leaves an expected squared residual of at most
#
#     (1 + d / (p - 1)) * sum_{i > d} sigma_i^2 .
#
# We estimate the left side by Monte Carlo for a few spectra.

from chanrecon.bound import SpectrumSpec, empirical_residual_mean, standard_spectra

for name, sv in standard_spectra(8).items():
    spec = SpectrumSpec(sv, 64, name)
    rep = empirical_residual_mean(spec, d=2, p=2, trials=500, rng=1)
    print(f"{name:>15}: bound {rep.bound:8.4f}   mean {rep.empirical_mean:.3e} +- {rep.stderr:.1e}")

# Note the rank_deficient row: with rank 3 and a width-4 sketch the
# residual is pure roundoff, around 1e-30.  Its bound at d = 2 is still
# positive, but at d >= 3 the bound is exactly zero and a floating-point
# mean can never sit below it.

spec = SpectrumSpec(standard_spectra(8)["rank_deficient"], 64, "rank_deficient")
rep = empirical_residual_mean(spec, d=3, p=2, trials=200, rng=1)
print("rank_deficient d=3: bound", rep.bound, " mean", f"{rep.empirical_mean:.2e}")
