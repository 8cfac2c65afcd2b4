# %% [markdown]
# Local time at the half-cent edges
#
# When the noise is small, or absent, the estimator stops seeing sigma and
# starts counting how long the price spends near each half-cent edge. That
# is local time. Three estimates of it are compared on one fine path.

# %%
import numpy as np

from tsrvlab import ProcessModel, SamplingGrid, generate_master_path, local_time_profile, thm2_limit, thm3_limit

grid = SamplingGrid(23400, 1 / 252)
path = generate_master_path(ProcessModel(0.0, 0.2, 0.0), grid, refine=40, seed=12345)
profiles = {m: local_time_profile(path, 0.01, m) for m in ("tanaka", "crossing", "bridge")}

print(" level($)   tanaka   crossing   bridge")
tan = profiles["tanaka"]
for i, k in enumerate(tan.ks):
    row = [profiles[m].L[i] for m in ("tanaka", "crossing", "bridge")]
    if max(row) > 0:
        print("  %.4f  %8.4f  %8.4f  %8.4f" % ((k + 0.5) * 0.01, *row))

# %% the two limits are the same weighted sum with different constants
print("small-noise limit of gamma <f,f>:  %.4e" % thm2_limit(tan))
print("pure-rounding limit of TSRV/sqrt(n_bar): %.4e" % thm3_limit(tan, 0.2, 1 / 252))
