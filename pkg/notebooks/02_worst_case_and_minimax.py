# %% [markdown]
# # Least favorable heteroskedasticity and the minimax scale
#
# With each variance in `[0, U]`, the bias is largest when `U` goes wherever
# the weight is positive, and most negative in the reverse case. The
# minimax `a` balances the two.

# %%
import math

import numpy as np

from hetbias import (
    a_star_analytic,
    bias_profile,
    minimax_a_numeric,
    normal_asymptotic_biases,
    three_point_sequence,
    worst_case_negative,
    worst_case_positive,
)
from hetbias.minimax import Normalization, three_point_biases

reg = three_point_sequence(96, math.sqrt(3))
bp, cfg = worst_case_positive(0.0, reg, 1.0)
print("variance pattern for the largest positive bias (first/middle/last):",
      cfg.sigma_sq[0], cfg.sigma_sq[48], cfg.sigma_sq[-1])

# %% [markdown]
# Closed forms for the three-point regressor against the generic routine.

# %%
for a in (0.0, 2.0, 4.0):
    print(a, worst_case_positive(a, reg)[0], worst_case_negative(a, reg)[0], three_point_biases(a, 96, 3.0))

# %%
prof = bias_profile(reg, np.linspace(0, 8, 9), normalization=Normalization.T2S2_OVER_U)
for a, p, m in zip(prof.a_grid, prof.b_plus, prof.b_minus):
    print(f"a={a:4.1f}  B+={p:7.4f}  B-={m:8.4f}")
print("numeric a*:", minimax_a_numeric(reg), " closed form:", a_star_analytic(reg.kurtosis, 96))

# %% [markdown]
# Normal regressor, large T: the curves cross at a = 4.

# %%
for a in (0.0, 2.0, 4.0, 6.0):
    p, m = normal_asymptotic_biases(a)
    print(f"a={a}: B+={p:.4f}  -B-={m:.4f}  max risk={max(p, m):.4f}")
