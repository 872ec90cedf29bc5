# %% [markdown]
# # Worst-case-robust slope inference on data
#
# The minimax-scaled variance gives an interval that guards against the
# least favorable heteroskedasticity. With extra regressors, a three-step
# screen says whether x is clearly significant, clearly not, or ambiguous.

# %%
from pathlib import Path

import numpy as np

from hetbias import RegressionDataset, hccme_report, screening
from hetbias.formats import read_dataset_csv

path = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "audit_fixture.csv"
cols = read_dataset_csv(path, ["y", "x", "w"])
data = RegressionDataset(cols["y"], cols["x"], cols["w"][:, None])

rep = hccme_report(data, u_bound=1.0)
print(f"slope {rep.beta2:.4f}, kurtosis {rep.kurtosis_used:.3f}, a* {rep.a_star_used:.3f}")
for e in rep.entries:
    print(f"  {e.label:<18} a={e.a:6.3f}  se={e.std_error:.4f}  worst-case bias={e.worst_case_bias_bound:.5f}")
print("interval (a = K+1):", np.round(rep.significance_interval, 4))

# %%
verdict = screening(data)
print("screening:", verdict.verdict.value)
print("  x alone significant:", verdict.alone.significant)
print("  x on purged y significant:", verdict.purged.significant)
