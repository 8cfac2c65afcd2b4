"""Acceptance criteria 1-8, each at its stated tolerance.

Every test prints one ``ACCEPT <id> PASS|FAIL`` line to the terminal (also
when run as ``python tests/test_acceptance.py``). Thresholds are not tuned
to the outcome; failing criteria fail.
"""

import math
import sys

import numpy as np
import pytest
from scipy.stats import norm

from tsrvlab import (
    NoiseThenRound,
    LocalTimeProfile,
    band_probabilities,
    crossing_statistic,
    default_config,
    f_bar,
    f_prime,
    grid_qv,
    regular_allocation,
    run_experiment,
    select_K,
    tanaka_local_time,
    thm2_limit,
    thm3_limit,
    tsrv,
)

REFERENCE = 0.2**2 / 252
LOG = []


def emit(cid, title, passed, detail, out=None):
    line = f"ACCEPT {cid} {'PASS' if passed else 'FAIL'} {title}: {detail}"
    LOG.append(line)
    if out is not None:
        with out.disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)
    return passed


def fmt_criteria(report):
    parts = []
    for c in report.criteria:
        v = c["value"]
        v = f"{v:.4g}" if isinstance(v, float) else v
        parts.append(f"{c['name']}={v} ({'ok' if c['passed'] else 'FAIL'}, {c['threshold']})")
    return "; ".join(parts)


def _thm1(cid, title, out, **kw):
    rep = run_experiment(default_config("thm1", **kw))
    s = rep.summary
    assert (s["M"], rep.config["n"], rep.config["c"]) == (500, 23400, 1.0)
    ok = emit(cid, title, rep.passed, fmt_criteria(rep), out)
    assert ok, fmt_criteria(rep)


def test_1_thm1_additive(capsys):
    _thm1(1, "CLT, additive gamma=5e-4", capsys, kernel="additive", gamma=5e-4)


def test_2_thm1_noise_then_round(capsys):
    _thm1(2, "CLT, noise-then-round gamma=5e-3", capsys, kernel="noise_round", gamma=5e-3)


def test_3_fig3(capsys):
    rep = run_experiment(default_config("fig3"))
    gammas = rep.column("gamma")
    assert min(gammas) == pytest.approx(2e-4) and max(gammas) == pytest.approx(6e-3)
    assert rep.summary["reference"] == pytest.approx(1.5873e-4, rel=1e-4)
    names = {c["name"] for c in rep.criteria}
    assert names == {"near_reference", "blow_up", "non_increasing"}
    ok = emit(3, "noise-size sweep", rep.passed, fmt_criteria(rep), capsys)
    assert ok, fmt_criteria(rep)


def test_4_thm2(capsys):
    rep = run_experiment(default_config("thm2"))
    assert list(rep.column("gamma")) == [2e-3, 5e-4, 2e-4, 5e-5]
    errs = ", ".join(f"{e:.3f}" for e in rep.column("rel_err"))
    ok = emit(4, "small-noise local-time limit", rep.passed, f"rel_err=[{errs}]; " + fmt_criteria(rep), capsys)
    assert ok, fmt_criteria(rep)


def test_5_thm3(capsys):
    rep = run_experiment(default_config("thm3"))
    assert max(rep.column("n")) >= 150_000
    ratios = ", ".join(f"{r:.3f}" for r in rep.column("ratio"))
    ok = emit(5, "pure-rounding sqrt(n_bar) scaling", rep.passed, f"ratios=[{ratios}]; " + fmt_criteria(rep), capsys)
    assert ok, fmt_criteria(rep)


def test_6_eq29(capsys):
    rep = run_experiment(default_config("eq29"))
    factor, nbar = rep.summary["factor"], rep.summary["n_bar"]
    factor_ok = abs(nbar - 27.61) < 0.01 and abs(factor - 0.59) <= 0.005
    ok = rep.passed and factor_ok
    detail = f"{fmt_criteria(rep)}; factor={factor:.4f} at n_bar={nbar:.4f} ({'ok' if factor_ok else 'FAIL'}, ~0.59)"
    emit(6, "rounding duality", ok, detail, capsys)
    assert ok, detail


def _oracle_checks():
    rng = np.random.default_rng(12345)
    checks = {}

    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 51))
        z1, z2 = rng.normal(size=n + 1), rng.normal(size=n + 1)
        idx = np.sort(rng.choice(n + 1, size=int(rng.integers(1, n + 2)), replace=False))
        brute = sum((z1[b] - z1[a]) * (z2[b] - z2[a]) for a, b in zip(idx[:-1], idx[1:]))
        worst = max(worst, abs(grid_qv(z1, z2, idx) - brute) / max(abs(brute), 1e-300))
    checks["grid_qv_brute_force"] = (worst <= 1e-12, f"max rel {worst:.1e}")

    part = True
    for n in range(1, 13):
        for K in range(1, n + 1):
            alloc = regular_allocation(n, K)
            merged = np.sort(np.concatenate(alloc.subgrids()))
            part &= np.array_equal(merged, np.arange(n + 1)) and alloc.n_bar_exact * K == n - K + 1
    checks["partition_n_le_12"] = (bool(part), "exhaustive")

    hand = tsrv([0, 1, 0, 1, 0], 2).tsrv
    checks["tsrv_hand"] = (hand == -1.5, f"{hand}")
    k818 = select_K(23400, 1.0)
    checks["select_K_23400"] = (k818 == 818, f"{k818}")

    worst = 0.0
    for _ in range(100):
        gamma = float(rng.uniform(5e-4, 0.05))
        alpha = float(rng.choice([0.01, 0.05, 0.1]))
        k = int(rng.integers(1, 2001))
        x = math.log((k + 0.5) * alpha) + float(rng.uniform(-3, 3)) * gamma
        kern, h = NoiseThenRound(gamma, alpha), gamma * 1e-4
        fd = (f_bar(kern, x + h) - f_bar(kern, x - h)) / (2 * h)
        worst = max(worst, abs(f_prime(kern, x) - fd) / abs(fd))
    checks["fprime_finite_difference"] = (worst <= 1e-5, f"max rel {worst:.1e}")

    lim = math.log(101 / 100) / math.sqrt(2 * math.pi)
    val = 1e-5 * f_prime(NoiseThenRound(1e-5, 0.01), math.log(100.5 * 0.01))
    checks["small_gamma_edge_limit"] = (abs(val / lim - 1) <= 1e-3, f"rel {abs(val / lim - 1):.1e}")

    worst = 0.0
    for _ in range(2000):
        band = band_probabilities(float(rng.uniform(-6, 3)), float(10 ** rng.uniform(-5, -0.3)),
                                  float(rng.choice([0.001, 0.01, 0.05])), tol=1e-12)
        worst = max(worst, abs(1 - band.total))
    checks["band_normalization"] = (worst <= 1e-12, f"max gap {worst:.1e}")

    # Tanaka MC: 1e4 standard BM paths with 1e5 steps, five levels
    levels = (-0.25, -0.125, 0.0, 0.125, 0.25)
    M, N, B = 10_000, 100_000, 50
    sums = np.zeros(len(levels))
    gen = np.random.default_rng(2024)
    z = np.empty((B, N))
    x = np.zeros((B, N + 1))
    for _ in range(M // B):
        gen.standard_normal(out=z)
        z *= math.sqrt(1.0 / N)
        np.cumsum(z, axis=1, out=x[:, 1:])
        for j, a in enumerate(levels):
            sums[j] += sum(tanaka_local_time(row, a) for row in x)
    worst = 0.0
    for j, a in enumerate(levels):
        exact = math.sqrt(2 / math.pi) * math.exp(-a * a / 2) - a * (2 * norm.cdf(-a) - 1) - abs(a)
        worst = max(worst, abs(sums[j] / M / exact - 1))
    checks["tanaka_mc_folded_normal"] = (worst <= 0.02, f"max rel {worst:.2%} at 5 levels")

    n = 1_000_000
    path = np.concatenate(([0.0], np.cumsum(np.random.default_rng(12345).standard_normal(n) / math.sqrt(n))))
    tan = tanaka_local_time(path, 0.0)
    cro = math.sqrt(math.pi / 2) * crossing_statistic(path, 0.0)[1]
    checks["crossing_tanaka_duality"] = (abs(cro / tan - 1) <= 0.10, f"rel {abs(cro / tan - 1):.2%}")

    worst = 0.0
    for _ in range(200):
        k_lo = int(rng.integers(1, 300))
        ks = np.arange(k_lo, k_lo + 20)
        prof = LocalTimeProfile.from_levels(0.01, ks, rng.uniform(0, 2, ks.size))
        sigma, T = float(rng.uniform(0.05, 1)), float(rng.uniform(1e-3, 2))
        coef = 2 * math.sqrt(2) / (sigma * math.sqrt(T))
        worst = max(worst, abs(thm3_limit(prof, sigma, T) / (coef * thm2_limit(prof)) - 1))
    checks["limit_coefficient_identity"] = (worst <= 1e-13, f"max rel {worst:.1e}")
    return checks


def test_7_oracle_suites(capsys):
    checks = _oracle_checks()
    ok = all(p for p, _ in checks.values())
    detail = "; ".join(f"{k}={'ok' if p else 'FAIL'} ({d})" for k, (p, d) in checks.items())
    emit(7, "oracle suites", ok, detail, capsys)
    assert ok, detail


def test_8_fig2(capsys):
    rep = run_experiment(default_config("fig2"))
    assert rep.columns == ("t", "x", "y_rounded", "f_0.001", "f_0.005")
    ok = emit(8, "conditional-mean table", rep.passed, fmt_criteria(rep), capsys)
    assert ok, fmt_criteria(rep)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_")):
        try:
            fn(None)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
