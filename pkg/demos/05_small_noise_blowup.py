# %% [markdown]
# Less noise, worse estimate
#
# On one fixed latent day, contaminate with noise of size gamma and then
# round to the cent. Large gamma hides the rounding and TSRV lands near
# sigma^2 T. Small gamma lets the cent grid show through and TSRV grows.

# %%
import numpy as np

from tsrvlab import default_config, run_experiment

rep = run_experiment(default_config("fig3"))
ref = rep.summary["reference"]
print("reference sigma^2 T = %.4e" % ref)
for g, v in rep.rows:
    bar = "#" * int(min(60, 10 * v / ref))
    print("gamma %.4f  TSRV/ref %5.2f  %s" % (g, v / ref, bar))
for c in rep.criteria:
    print(c["name"], "passed" if c["passed"] else "failed", c["value"])

# %% the limit as gamma shrinks, on a finer path
rep2 = run_experiment(default_config("thm2"))
for g, scaled, limit, err in rep2.rows:
    print("gamma %.0e   gamma<f,f> %.4e   local-time limit %.4e   rel err %.3f" % (g, scaled, limit, err))
