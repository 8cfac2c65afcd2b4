# %% [markdown]
# From a tick file to a number
#
# Write a simulated day as a timestamp,price CSV, read it back the way a
# real file would be read, and estimate the day's variance. Then write a
# report pair (CSV rows, JSON summary) for one of the experiments.

# %%
import json
import tempfile
from pathlib import Path

from tsrvlab import default_config, ingest_ticks, run_experiment, select_K, tsrv, write_report
from tsrvlab.cli import main

work = Path(tempfile.mkdtemp(prefix="tsrvlab-demo-"))
ticks = work / "day.csv"
main(["simulate", "--out", str(ticks), "--kernel", "noise_round", "--gamma", "0.002"])
print(ticks.read_text().splitlines()[:4])

# %% library route
series, y = ingest_ticks(ticks)
res = tsrv(y, select_K(series.n))
print("n =", series.n, " TSRV = %.4e" % res.tsrv, " annualized vol %.3f" % ((res.tsrv * 252) ** 0.5))

# %% command-line route gives the same number
main(["tsrv", "--input", str(ticks), "--out", str(work / "tsrv.json")])
print(json.loads((work / "tsrv.json").read_text())["tsrv"] == res.tsrv)

# %% reports
rep = run_experiment(default_config("eq29"))
csv_path, json_path = write_report(rep, work / "reports", timestamp=False)
print(csv_path.read_text())
print(json.loads(json_path.read_text())["summary"])
