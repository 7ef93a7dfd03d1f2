"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (also repeated in the pytest
terminal summary).  Run on its own with

    pytest -v tests/test_acceptance.py
"""

import json
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from zndots import dist_geometry as dist
from zndots import dot_geometry as dotg
from zndots import harness as H
from zndots import simplices as sx
from zndots.ring_core import factorize, is_unit, kernel_size

import oracles
from acceptance_log import report

FIXTURES = Path(__file__).parent / "fixtures"


def test_identity_suite():
    started = time.perf_counter()
    worst = 0.0
    failures = []
    for n, d in [(3, 1), (9, 2), (15, 1), (9, 3)]:
        (rec,) = H.run_identity_suite([n], [d], seed=0, instances=100)
        m = rec.measurements
        gaps = [m["orthogonality_gap"], m["inversion_gap"], m["plancherel_gap"], m["star_identity_gap"]]
        worst = max(worst, *gaps)
        if not all(g < 1e-9 for g in gaps):
            failures.append((n, d))
    elapsed = time.perf_counter() - started
    report(
        "1 identity suite",
        not failures and elapsed < 60,
        f"max gap {worst:.2e} over 4 (n,d) x 100 instances, {elapsed:.1f}s, failing {failures}",
    )


def test_oracle_equivalence():
    started = time.perf_counter()
    mismatches = []
    cases = 0
    for n in (3, 5, 7, 9):
        for d in (1, 2, 3):
            for seed in range(2):
                rng = np.random.default_rng([n, d, seed])
                size = int(rng.integers(1, min(40, n**d) + 1))
                E = oracles.seeded_set(n, d, size, seed=int(rng.integers(2**31)))
                cases += 1
                tag = (n, d, size)
                if dotg.mu_histogram(E).counts.tolist() != oracles.mu(E):
                    mismatches.append(("mu", tag))
                for k in range(1, min(d, 2) + 1):
                    bases = E.points[rng.integers(0, len(E), size=k)]
                    for metric, hist_fn, set_fn in (
                        ("distance", dist.star_histogram, dist.star_set),
                        ("dot", dotg.dot_star_histogram, dotg.dot_star_set),
                    ):
                        expected = oracles.star_hist(E, bases, metric)
                        if hist_fn(E, bases).counts != expected or set_fn(E, bases) != set(expected):
                            mismatches.append(("star", metric, k, tag))
                for k in (1, 2):
                    if dist.m_k_statistic(E, k) != oracles.second_moment(E, k, "distance"):
                        mismatches.append(("m_k", k, tag))
                    for metric in sx.METRICS:
                        if sx.census(E, k, metric).label_sets() != oracles.census(E, k, metric):
                            mismatches.append(("census", metric, k, tag))
    elapsed = time.perf_counter() - started
    report(
        "2 oracle equivalence",
        not mismatches and elapsed < 60,
        f"{cases} seeded sets (n<=9, d<=3, |E|<=40), {elapsed:.1f}s, mismatches {mismatches[:5]}",
    )


def test_ring_coverage_above_bound():
    ring = {r.name: r for r in dotg.coverage_thresholds(9, 5)}["ring_cover"]
    cfg = H.ExperimentConfig(n=9, d=5, set_size=35000, trials=20, seed=0)
    started = time.perf_counter()
    records = H.run_coverage_sweep(cfg, [35000])
    elapsed = time.perf_counter() - started
    covered = sum(r.measurements["covers_ring"] for r in records)
    slowest = max(r.runtime_s for r in records)
    ok = (
        abs(ring.bound - 34091.956) < 1e-3
        and 35000 > ring.bound
        and covered == 20
        and not any(r.measurements["guarantee_violated"] for r in records)
        and slowest < 120
    )
    report(
        "3 ring coverage n=9 d=5",
        ok,
        f"bound {ring.bound:.3f}, covered {covered}/20 at |E|=35000, slowest trial {slowest:.1f}s, total {elapsed:.0f}s",
    )


def test_divisible_construction_has_no_units():
    started = time.perf_counter()
    bad = []
    for n in (9, 15, 21):
        m = factorize(n)
        for d in (2, 3):
            E = dotg.divisible_construction(m, d)
            pset = dotg.product_set(E)
            if len(E) != (n // m.gamma) ** d or any(is_unit(s, m) for s in pset):
                bad.append((n, d))
            if pset != oracles.pair_values(E, "dot"):
                bad.append(("oracle", n, d))
    elapsed = time.perf_counter() - started
    report("4 divisible construction", not bad and elapsed < 10, f"6 (n,d) cases, {elapsed:.1f}s, failing {bad}")


def test_explicit_constant_inequalities():
    started = time.perf_counter()
    failures = []
    ran, skipped = [], []
    worst = {"mu": 0.0, "m1": 0.0, "k1": 0.0}
    for n in (9, 15):
        for d in (2, 3):
            for size in (50, 200, 500):
                if size > n**d:
                    skipped.append((n, d, size))
                    continue
                ran.append((n, d, size))
                cfg = H.ExperimentConfig(n=n, d=d, set_size=size, seed=1)
                for trial in range(50):
                    E = H.generate_set(cfg, trial)
                    dev = dotg.mu_deviation(E)
                    m1 = dist.m_k_bound_check(E, 1)
                    k1 = dotg.dot_k1_bound_check(E)
                    worst["mu"] = max(worst["mu"], dev.max_dev / dev.bound)
                    worst["m1"] = max(worst["m1"], m1.ratio)
                    worst["k1"] = max(worst["k1"], k1.value / k1.bound)
                    if not (dev.holds and m1.holds and k1.holds):
                        failures.append((n, d, size, trial))
    elapsed = time.perf_counter() - started
    ratios = ", ".join(f"{k} {v:.3f}" for k, v in worst.items())
    report(
        "5 explicit-constant inequalities",
        not failures and elapsed < 300,
        f"{len(ran)} combos x 50 trials (skipped |E|>n^d: {skipped}), worst ratios {ratios}, {elapsed:.1f}s",
    )


def test_kernel_size_closed_form():
    bad = []
    for n in range(3, 26, 2):
        for d in (1, 2, 3):
            for mult in range(n):
                if kernel_size(n, mult, d) != oracles.kernel_count(n, mult, d):
                    bad.append((n, mult, d))
    report("6 kernel size", not bad, f"odd n in [3, 25], all mult < n, d <= 3, failing {bad[:5]}")


def test_census_monotonicity():
    violations = []
    for i in range(20):
        rng = np.random.default_rng([7, i])
        n, d = [(5, 2), (7, 2), (9, 2), (5, 3)][i % 4]
        F = oracles.seeded_set(n, d, int(rng.integers(5, 26)), seed=int(rng.integers(2**31)))
        E = F.subset(np.sort(rng.choice(len(F), size=int(rng.integers(1, len(F) + 1)), replace=False)))
        for metric in sx.METRICS:
            for k in (1, 2):
                if sx.census(E, k, metric).distinct_count > sx.census(F, k, metric).distinct_count:
                    violations.append((i, metric, k))
    report("7a census monotone under inclusion", not violations, f"20 nested pairs, violations {violations}")


def test_star_average_sampled_vs_exact():
    E = oracles.seeded_set(9, 3, 600, seed=11)
    lines = []
    ok = True
    for name, fn in (("distance", dist.star_average), ("dot", dotg.dot_star_average)):
        exact = fn(E, 1, sample_bases=600)
        sampled = fn(E, 1, sample_bases=150, seed=5)
        gap = abs(sampled.estimate - exact.estimate)
        ok &= exact.exact and not sampled.exact and gap <= 3 * sampled.stderr
        lines.append(f"{name} exact {exact.estimate:.4f} sampled {sampled.estimate:.4f} +- {sampled.stderr:.4f}")
    report("7b star average within 3 stderr", ok, "; ".join(lines))


def test_density_floors():
    fixture = json.loads((FIXTURES / "density_floors.json").read_text())
    cfg = H.ExperimentConfig(n=fixture["n"], d=fixture["d"], set_size=fixture["set_size"], seed=fixture["seed"])
    E = H.generate_set(cfg, 0)
    tol = fixture["tolerance"]
    results = []
    ok = True
    for row in fixture["floors"]:
        c = sx.census(E, row["k"], row["metric"], mode="sampled", budget=fixture["budget"], seed=fixture["seed"] + row["k"])
        got = sx.density(c)
        ok &= abs(got - row["density"]) <= tol * row["density"]
        results.append(f"k={row['k']} {row['metric']} {got:.4f} (floor {row['density']:.4f})")
    report("7c density floors", ok, "; ".join(results))


def _run(argv, threads):
    env = {**os.environ, "NUMBA_NUM_THREADS": str(threads)}
    cmd = [sys.executable, "-m", "zndots", *argv, "--threads", str(threads)]
    return subprocess.run(cmd, env=env, capture_output=True, check=False)


def test_determinism_across_thread_counts():
    commands = [
        ["sweep", "--n", "9", "--d", "3", "--sizes", "50,200,600", "--trials", "3", "--seed", "42"],
        ["sweep", "--n", "15", "--d", "2", "--sizes", "100", "--trials", "2", "--seed", "42", "--format", "json"],
        ["verify", "--n-list", "3,9", "--d-list", "1,2", "--instances", "10", "--seed", "42"],
    ]
    same = []
    for argv in commands:
        one, eight = _run(argv, 1), _run(argv, 8)
        same.append(one.returncode == eight.returncode == 0 and one.stdout == eight.stdout and len(one.stdout) > 0)
    report("8 determinism 1 vs 8 threads", all(same), f"sweep csv, sweep json, verify identical: {same}")


if __name__ == "__main__":
    sys.exit(__import__("pytest").main([__file__, "-v"]))
