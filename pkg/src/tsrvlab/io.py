"""Configuration files, tick-data ingestion and report serialization.

Config files are flat ``key = value`` text, one key per line, ``#`` starts a
comment. Lists are comma separated, ``none`` clears an optional key, and
real numbers may be written as fractions (``T = 1/252``). Pass/fail
thresholds use ``threshold.<name> = value``.

Reports are written as ``<tag>.csv`` (header row, one line per record,
numbers with 17 significant digits) plus ``<tag>.json`` (schema id, summary,
criteria and the full config echo).
"""

import csv
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone
from fractions import Fraction
import json
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .experiments import EXPERIMENTS, ExperimentConfig, default_config
from .localtime import LocalTimeProfile, rounding_levels

__all__ = [
    "TickSeries",
    "parse_config",
    "format_config",
    "ingest_ticks",
    "write_ticks",
    "write_report",
    "read_report_csv",
    "read_report_json",
    "write_profile_csv",
    "read_profile_csv",
]

# trading seconds per year: 252 days of 6.5 hours
SECONDS_PER_YEAR = 252 * 23400


def _to_float(text):
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(Fraction(num.strip()) / Fraction(den.strip()))
    return float(text)


def _to_int(text):
    value = _to_float(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def _optional(conv):
    def parse(text):
        return None if text.strip().lower() in ("none", "") else conv(text)
    return parse


def _tuple_of(conv):
    def parse(text):
        if text.strip().lower() in ("none", ""):
            return None
        return tuple(conv(part) for part in text.split(",") if part.strip())
    return parse


_PARSERS = {
    "experiment": str.strip,
    "mu": _to_float,
    "sigma": _to_float,
    "x0": _to_float,
    "n": _to_int,
    "T": _to_float,
    "kernel": str.strip,
    "gamma": _to_float,
    "alpha": _to_float,
    "c": _to_float,
    "K": _optional(_to_int),
    "M": _to_int,
    "seed": _to_int,
    "refine": _optional(_to_int),
    "gammas": _tuple_of(_to_float),
    "n_list": _tuple_of(_to_int),
    "replicate": _to_int,
    "output": _optional(str.strip),
}

CONFIG_KEYS = tuple(f.name for f in fields(ExperimentConfig) if f.name != "thresholds")


def _read_pairs(text, origin):
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in pairs:
            raise ConfigError(f"{origin}:{lineno}: duplicate key {key!r}", key)
        pairs[key] = value
    return pairs


def parse_config(source=None, overrides=None, experiment=None):
    """Build a validated :class:`ExperimentConfig` from a file and/or flags.

    ``source`` is a path or a file-like object (or None); ``overrides`` maps
    config keys to string or typed values and wins over the file.
    ``experiment`` is used when neither names one.
    """
    pairs = {}
    if source is not None:
        if hasattr(source, "read"):
            text, origin = source.read(), getattr(source, "name", "<config>")
        else:
            path = Path(source)
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
            origin = str(path)
        pairs.update(_read_pairs(text, origin))
    for key, value in (overrides or {}).items():
        if value is not None:
            pairs[key] = value

    values, thresholds = {}, {}
    for key, raw in pairs.items():
        if key.startswith("threshold."):
            name = key.split(".", 1)[1]
            try:
                thresholds[name] = _to_float(raw) if isinstance(raw, str) else float(raw)
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}", key) from exc
            continue
        if key not in _PARSERS:
            raise ConfigError(f"unknown config key {key!r}", key)
        try:
            values[key] = _PARSERS[key](raw) if isinstance(raw, str) else raw
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{key}: cannot parse {raw!r} ({exc})", key) from exc

    name = values.pop("experiment", experiment)
    if name is None:
        raise ConfigError("no experiment selected", "experiment")
    if name not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {name!r}", "experiment")
    try:
        return default_config(name, thresholds=thresholds, **values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _format_value(value):
    if value is None:
        return "none"
    if isinstance(value, (tuple, list)):
        return ", ".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(cfg):
    """Flat text form of ``cfg`` with every key present; parses back to ``cfg``."""
    lines = [f"{key} = {_format_value(getattr(cfg, key))}" for key in CONFIG_KEYS]
    lines += [f"threshold.{k} = {v!r}" for k, v in sorted(cfg.thresholds.items())]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class TickSeries:
    """Transaction times (seconds) and prices (dollars) of one instrument."""

    timestamps: np.ndarray = field(repr=False)
    prices: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        if len(self.timestamps) != len(self.prices) or len(self.prices) < 2:
            raise DataError("timestamps and prices must have equal length >= 2")
        if np.any(np.asarray(self.prices) <= 0):
            raise DataError("prices must be positive")

    @property
    def n(self):
        return len(self.prices) - 1

    def log_prices(self):
        return np.log(self.prices)


def ingest_ticks(path, label=None):
    """Read a ``timestamp,price`` CSV into a :class:`TickSeries` and log prices.

    Observations are used in row order as if equally spaced; the actual
    timestamps only have to be non-decreasing. Row numbers in errors count
    data rows from 1 (the header is not counted).
    """
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    times, prices = [], []
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["timestamp", "price"]:
            raise DataError(f"{path}: header must be 'timestamp,price'")
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                t, p = float(row[0]), float(row[1])
            except (IndexError, ValueError):
                raise DataError(f"{path}: row {row_no}: cannot parse {row!r}", row=row_no) from None
            if not (math.isfinite(p) and p > 0):
                raise DataError(f"{path}: row {row_no}: price must be positive, got {row[1]!r}", row=row_no)
            if not math.isfinite(t):
                raise DataError(f"{path}: row {row_no}: timestamp must be finite", row=row_no)
            if times and t < times[-1]:
                raise DataError(f"{path}: row {row_no}: timestamp decreases", row=row_no)
            times.append(t)
            prices.append(p)
    if len(prices) < 2:
        raise DataError(f"{path}: need at least 2 data rows, got {len(prices)}")
    ticks = TickSeries(np.array(times), np.array(prices), label if label is not None else path.stem)
    return ticks, ticks.log_prices()


def write_ticks(path, timestamps, prices):
    """Write a ``timestamp,price`` CSV with round-trip exact numbers."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write("timestamp,price\n")
        for t, p in zip(timestamps, prices):
            fh.write(f"{_num(t)},{_num(p)}\n")
    return path


def _num(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    return value


def write_report(report, target, timestamp=False):
    """Write ``<tag>.csv`` and ``<tag>.json`` into directory ``target``."""
    target = Path(target)
    try:
        target.mkdir(parents=True, exist_ok=True)
        csv_path = target / f"{report.tag}.csv"
        with csv_path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(",".join(report.columns) + "\n")
            for row in report.rows:
                fh.write(",".join(_num(v) for v in row) + "\n")
        doc = {
            "schema": report.schema,
            "experiment": report.tag,
            "columns": list(report.columns),
            "passed": report.passed,
            "summary": report.summary,
            "criteria": report.criteria,
            "config": report.config,
        }
        if timestamp:
            doc["created"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        json_path = target / f"{report.tag}.json"
        json_path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report to {target}: {exc.strerror}") from exc
    return csv_path, json_path


def read_report_csv(path):
    """Header and float rows of a report CSV."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        rows = [tuple(float(v) for v in row) for row in reader if row]
    return header, rows


def read_report_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_profile_csv(profile, path):
    """Local-time profile as ``level,k,L,method`` rows."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write("level,k,L,method\n")
        for a, k, L in zip(profile.levels, profile.ks, profile.L):
            fh.write(f"{_num(a)},{int(k)},{_num(L)},{profile.method}\n")
    return path


def read_profile_csv(path, alpha):
    """Inverse of :func:`write_profile_csv`; ``alpha`` is checked against the levels."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise DataError(f"{path}: empty profile")
    ks = np.array([int(r["k"]) for r in rows])
    levels = np.array([float(r["level"]) for r in rows])
    if not np.allclose(levels, rounding_levels(ks, alpha), rtol=0, atol=1e-12):
        raise DataError(f"{path}: levels do not match alpha={alpha}")
    L = np.array([float(r["L"]) for r in rows])
    return LocalTimeProfile.from_levels(alpha, ks, L, method=rows[0]["method"])
