# %% [markdown]
# # Does the minimax scale depend only on T and the kurtosis?
#
# Generate regressors whose sample skewness and kurtosis are fixed exactly,
# then locate the crossing numerically for each one.

# %%
import numpy as np

from hetbias import ExperimentConfig, a_star_analytic, run_invariance_study

cfg = ExperimentConfig(t_count=100, kurtosis_targets=(3, 4), skewness_targets=(0, 1),
                       samples_per_cell=6, seed=1)
rows = run_invariance_study(cfg)
print(f"{'K':>3} {'S':>3} {'#':>2} {'a* numeric':>12} {'a* formula':>12} {'max bias':>9}")
for r in rows:
    print(f"{r.target_kurtosis:3g} {r.target_skewness:3g} {r.sample_index:2d} "
          f"{r.a_star_numeric:12.6f} {r.a_star_analytic:12.6f} {r.max_bias_t2s2_over_u:9.3f}")

# %% [markdown]
# The crossing is identical within each kurtosis level even though the
# maximum bias itself moves from sample to sample. The reason: the sum
# of the two worst-case curves is `(U/(T^2 s^2)) (a - (1 + a/T)(K+1))`,
# which is linear in `a` whatever the rest of the regressor looks like.

# %%
for t in (25, 50, 100):
    rows = run_invariance_study(ExperimentConfig(t_count=t, samples_per_cell=3))
    spread = max(np.ptp([r.a_star_numeric for r in rows if r.target_kurtosis == k]) for k in (3, 4))
    print(f"T={t}: spread of a* within K {spread:.1e};  formula K=3 -> {a_star_analytic(3, t):.4f}")
