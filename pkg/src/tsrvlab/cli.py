"""``tsrvlab`` command line: simulate | tsrv | experiment | ingest.

Every config key is also a flag (``--sigma 0.3``, ``--n-list 100,200``,
``--threshold ks=0.1``); flags win over ``--config`` file values.

Exit codes: 0 success, 2 config error, 3 data error, 4 a criterion failed
under ``--check``.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .contaminate import contaminate_series
from .errors import CapacityError, ConfigError, DataError, GridError
from .estimators import select_K, tsrv
from .experiments import EXPERIMENTS, run_experiment
from .io import CONFIG_KEYS, format_config, ingest_ticks, parse_config, write_report, write_ticks
from .io import _to_float
from .simulate import generate_master_path, observation_values

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_CHECK = 0, 2, 3, 4

# config keys that are fixed by the subcommand rather than taken as flags
_SKIP = {"experiment", "output"}


def _flag(key):
    return "--" + key.replace("_", "-")


def _add_config_flags(parser):
    parser.add_argument("--config", metavar="FILE", help="flat key = value config file")
    group = parser.add_argument_group("config keys (override the file)")
    for key in CONFIG_KEYS:
        if key not in _SKIP:
            group.add_argument(_flag(key), dest=f"cfg_{key}", metavar="VALUE")
    group.add_argument("--threshold", action="append", default=[], metavar="NAME=VALUE")


def _overrides(args):
    out = {k[4:]: v for k, v in vars(args).items() if k.startswith("cfg_") and v is not None}
    for item in args.threshold:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--threshold expects NAME=VALUE, got {item!r}", "thresholds")
        out[f"threshold.{name.strip()}"] = value
    return out


def _config(args, experiment):
    return parse_config(args.config, _overrides(args), experiment=experiment)


def _cmd_simulate(args):
    cfg = _config(args, "fig3")
    kernel = cfg.make_kernel()
    # refine only changes how the draws are spent; observed prices have the same law
    path = generate_master_path(cfg.model, cfg.grid, refine=cfg.refine or 1, seed=cfg.seed)
    obs = contaminate_series(kernel, observation_values(path), seed=cfg.seed)
    # microsecond resolution keeps the timestamps free of float dust
    times = np.round(args.start + cfg.grid.times() * args.seconds_per_year, 6)
    prices = obs.prices if obs.ticks is not None else np.exp(obs.y)
    write_ticks(args.out, times, prices)
    print(f"wrote {cfg.n + 1} ticks to {args.out}")
    return EXIT_OK


def _cmd_tsrv(args):
    ticks, y = ingest_ticks(args.input)
    n = ticks.n
    if args.K is not None:
        K = int(args.K)
    else:
        if n < 2:
            raise DataError("need at least 3 rows to choose K")
        K = select_K(n, args.c)
    try:
        res = tsrv(y, K, adjust=args.adjust)
    except GridError as exc:
        raise ConfigError(str(exc), "K") from exc
    doc = {
        "input": str(args.input),
        "label": ticks.label,
        "n": n,
        "T": args.T,
        "K": res.K,
        "n_bar": res.n_bar,
        "rv_all": res.rv_all,
        "rv_avg": res.rv_avg,
        "tsrv": res.tsrv,
        "annualized_vol": math.sqrt(res.tsrv / args.T) if res.tsrv > 0 else None,
    }
    if args.adjust:
        doc["tsrv_adjusted"] = res.adjusted
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def _cmd_ingest(args):
    ticks, y = ingest_ticks(args.input)
    doc = {
        "input": str(args.input),
        "label": ticks.label,
        "n": ticks.n,
        "T": args.T,
        "first_timestamp": float(ticks.timestamps[0]),
        "last_timestamp": float(ticks.timestamps[-1]),
        "spacing": "transaction time (row order, treated as equally spaced)",
        "log_price_first": float(y[0]),
        "log_price_last": float(y[-1]),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("index,log_price\n")
            for i, v in enumerate(y):
                fh.write(f"{i},{format(float(v), '.17g')}\n")
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def _cmd_experiment(args):
    cfg = _config(args, args.name)
    if cfg.experiment != args.name:
        raise ConfigError(f"config selects {cfg.experiment!r} but command runs {args.name!r}", "experiment")
    if args.print_config:
        sys.stdout.write(format_config(cfg))
        return EXIT_OK
    report = run_experiment(cfg)
    out = args.out or cfg.output
    if out:
        csv_path, json_path = write_report(report, out, timestamp=not args.no_timestamp)
        print(f"wrote {csv_path} and {json_path}")
    for crit in report.criteria:
        status = "PASS" if crit["passed"] else "FAIL"
        print(f"{status} {report.tag}.{crit['name']}: value={crit['value']!r} threshold={crit['threshold']!r}")
    if args.check and not report.passed:
        return EXIT_CHECK
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="tsrvlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate observed prices and write a timestamp,price CSV")
    _add_config_flags(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--start", type=float, default=0.0, help="timestamp of the first tick (seconds)")
    p.add_argument("--seconds-per-year", type=float, default=252 * 23400.0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("tsrv", help="two scales estimate from a timestamp,price CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--T", type=_to_float, default=1.0 / 252.0, help="horizon in years (e.g. 1/252)")
    p.add_argument("--adjust", action="store_true", help="also report the small-sample adjusted value")
    p.add_argument("--out", help="write the JSON result here as well")
    p.set_defaults(func=_cmd_tsrv)

    p = sub.add_parser("ingest", help="validate a tick file and derive log prices")
    p.add_argument("--input", required=True)
    p.add_argument("--T", type=_to_float, default=1.0 / 252.0)
    p.add_argument("--out", help="write index,log_price CSV here")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("experiment", help="run a named experiment")
    p.add_argument("name", choices=EXPERIMENTS)
    _add_config_flags(p)
    p.add_argument("--out", help="directory for <name>.csv and <name>.json")
    p.add_argument("--check", action="store_true", help="exit 4 if any criterion fails")
    p.add_argument("--no-timestamp", action="store_true", help="omit the creation time from the JSON")
    p.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        where = f" [{exc.field}]" if exc.field else ""
        print(f"tsrvlab: config error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, CapacityError) as exc:
        print(f"tsrvlab: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"tsrvlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
