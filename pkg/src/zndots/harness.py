"""Seeded experiment orchestration and flat-file output.

Random streams come from ``numpy.random.SeedSequence`` keyed by the
configured seed plus the trial (and, inside the identity suite, the
instance) index, so every row is reproducible on its own and independent of
how many threads the counting kernels use.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from . import dist_geometry as dist
from . import dot_geometry as dotg
from . import fourier
from . import simplices
from .points import DENSE_LIMIT, PointSet, from_codes, full_space, read_point_file
from .ring_core import Modulus, factorize, is_unit, kernel_size

GAP_TOL = 1e-9
GENERATOR_ALIASES = {
    "uniform": "uniform",
    "uniform_random": "uniform",
    "divisible": "divisible",
    "full": "full",
    "full_space": "full",
    "listed": "file",
    "file": "file",
}


@dataclass
class ExperimentConfig:
    n: int
    d: int
    k: int = 1
    generator: str = "uniform"
    set_size: int = 1
    trials: int = 1
    seed: int = 0
    mode: str = "exact"
    budget: int = 10**6
    metric: str = "distance"
    points_file: str | None = None
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self) -> None:
        gen = self.generator
        if gen.startswith("file:"):
            self.points_file = gen.split(":", 1)[1]
            gen = "file"
        if gen not in GENERATOR_ALIASES:
            raise ValueError(f"unknown generator {self.generator!r}")
        self.generator = GENERATOR_ALIASES[gen]

    def validate(self) -> Modulus:
        m = factorize(self.n)
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not 1 <= self.k <= self.d:
            raise ValueError(f"k must satisfy 1 <= k <= d, got k={self.k}, d={self.d}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.generator == "uniform":
            if self.set_size < 1:
                raise ValueError("set_size must be >= 1")
            if self.set_size > m.n**self.d:
                raise ValueError(f"set_size {self.set_size} exceeds n^d = {m.n ** self.d}")
        if self.generator == "file" and not self.points_file:
            raise ValueError("file generator needs a path")
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")
        return m

    def echo(self) -> dict:
        return {"n": self.n, "d": self.d, "k": self.k, "generator": self.generator, "seed": self.seed}


@dataclass
class ExperimentRecord:
    """One output row: configuration echo plus per-trial measurements.

    ``runtime_s`` is kept out of the row so that outputs stay byte-identical
    across runs; it is written to the metadata sidecar instead.
    """

    config: dict
    measurements: dict
    runtime_s: float = field(default=0.0, compare=False)

    def row(self) -> dict:
        return {**self.config, **self.measurements}


def _sample_codes(rng: np.random.Generator, total: int, size: int) -> np.ndarray:
    if total <= DENSE_LIMIT:
        return rng.choice(total, size=size, replace=False)
    # Sequential rejection keeps memory at O(size) for huge n^d.
    seen: dict[int, None] = {}
    while len(seen) < size:
        for c in rng.integers(0, total, size=max(16, 2 * (size - len(seen))), dtype=np.int64):
            seen.setdefault(int(c), None)
            if len(seen) == size:
                break
    return np.fromiter(seen, dtype=np.int64, count=size)


def generate_set(cfg: ExperimentConfig, trial_index: int = 0) -> PointSet:
    m = cfg.validate()
    if cfg.generator == "full":
        return full_space(m, cfg.d)
    if cfg.generator == "divisible":
        return dotg.divisible_construction(m, cfg.d)
    if cfg.generator == "file":
        E = read_point_file(cfg.points_file)
        if (E.n, E.d) != (m.n, cfg.d):
            raise ValueError(f"point file is over Z_{E.n}^{E.d}, config asks for Z_{m.n}^{cfg.d}")
        return E
    total = m.n**cfg.d
    if total >= 2**63:
        raise ValueError("n^d too large")
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, trial_index]))
    return from_codes(m, _sample_codes(rng, total, cfg.set_size), cfg.d)


def units_covered(E: PointSet, support: Iterable[int]) -> bool:
    present = set(support)
    return all(s in present for s in range(E.n) if is_unit(s, E.modulus))


SWEEP_COLUMNS = (
    "n", "d", "k", "generator", "seed", "set_size", "trial",
    "product_set_size", "coverage_fraction", "covers_ring", "units_covered",
    "mu_max_dev", "mu_dev_bound", "mu_dev_holds",
    "ring_cover_bound", "ring_cover_applies", "ring_cover_vacuous",
    "units_cover_bound", "units_cover_applies",
    "ring_cover_weak_bound", "ring_cover_weak_applies",
    "guarantee_violated",
)


def coverage_record(cfg: ExperimentConfig, E: PointSet, trial: int) -> ExperimentRecord:
    started = time.perf_counter()
    hist = dotg.mu_histogram(E)
    support = hist.support()
    dev = dotg.mu_deviation(E, hist)
    reports = {r.name: r for r in dotg.coverage_thresholds(E.modulus, E.d, set_size=len(E))}
    covers = len(support) == E.n
    units_ok = units_covered(E, support)
    ring, units, weak = reports["ring_cover"], reports["units_cover"], reports["ring_cover_weak"]
    violated = (
        (ring.applies and E.d > 2 and not covers)
        or (weak.applies and not covers)
        or (units.applies and not units_ok)
        or not dev.holds
    )
    measurements = {
        "set_size": len(E),
        "trial": trial,
        "product_set_size": len(support),
        "coverage_fraction": len(support) / E.n,
        "covers_ring": covers,
        "units_covered": units_ok,
        "mu_max_dev": dev.max_dev,
        "mu_dev_bound": dev.bound,
        "mu_dev_holds": dev.holds,
        "ring_cover_bound": ring.bound,
        "ring_cover_applies": ring.applies,
        "ring_cover_vacuous": ring.vacuous,
        "units_cover_bound": units.bound,
        "units_cover_applies": units.applies,
        "ring_cover_weak_bound": weak.bound,
        "ring_cover_weak_applies": weak.applies,
        "guarantee_violated": violated,
    }
    return ExperimentRecord(cfg.echo(), measurements, time.perf_counter() - started)


def run_coverage_sweep(cfg: ExperimentConfig, sizes: Sequence[int]) -> list[ExperimentRecord]:
    """Product-set coverage for every (size, trial); rows ordered by size then trial."""
    records = []
    for size in sizes:
        sub = ExperimentConfig(**{**asdict(cfg), "set_size": int(size)})
        for trial in range(cfg.trials):
            records.append(coverage_record(sub, generate_set(sub, trial), trial))
    return records


SIMPLEX_COLUMNS = (
    "n", "d", "k", "generator", "seed", "set_size", "trial", "metric", "mode", "budget",
    "tuples_examined", "distinct", "density", "plateaued", "last_gain", "checkpoints",
    "simplex_bound", "simplex_bound_applies", "simplex_bound_vacuous",
)


def _metrics(metric: str) -> list[str]:
    if metric == "both":
        return list(simplices.METRICS)
    return [simplices.METRICS[metric in ("dot", "dotproduct")]]


def run_simplex_experiment(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    """Type census, density and saturation per trial and metric."""
    m = cfg.validate()
    records = []
    for trial in range(cfg.trials):
        E = generate_set(cfg, trial)
        bound = simplices.simplex_size_bound(m, cfg.d, cfg.k, set_size=len(E))
        for metric in _metrics(cfg.metric):
            started = time.perf_counter()
            seed = int(np.random.SeedSequence([cfg.seed, trial, 1]).generate_state(1, np.uint64)[0])
            c = simplices.census(E, cfg.k, metric, mode=cfg.mode, budget=cfg.budget, seed=seed)
            sat = simplices.saturation_estimate(c)
            measurements = {
                "set_size": len(E),
                "trial": trial,
                "metric": metric,
                "mode": cfg.mode,
                "budget": cfg.budget,
                "tuples_examined": c.tuples_examined,
                "distinct": c.distinct_count,
                "density": simplices.density(c),
                "plateaued": sat.plateaued,
                "last_gain": sat.last_gain,
                "checkpoints": len(c.saturation_curve),
                "simplex_bound": bound.bound,
                "simplex_bound_applies": bound.applies,
                "simplex_bound_vacuous": bound.vacuous,
            }
            records.append(ExperimentRecord(cfg.echo(), measurements, time.perf_counter() - started))
    return records


IDENTITY_COLUMNS = (
    "n", "d", "seed", "instances",
    "orthogonality_gap", "naive_transform_gap", "inversion_gap", "plancherel_gap",
    "star_identity_gap", "mu_fourier_gap", "kernel_size_ok",
    "mu_dev_holds", "m1_bound_holds", "k1_bound_holds", "k1_tau_free_holds",
    "worst_mu_dev_ratio", "worst_m1_ratio", "worst_k1_ratio",
    "ok",
)

NAIVE_LIMIT = 729
ORTHOGONALITY_LIMIT = 4096


def naive_transform(f: fourier.GridFunction) -> np.ndarray:
    """Direct double sum over x and m, for cross-checking the axis-wise transform."""
    n, d = f.n, f.d
    pts = np.indices((n,) * d, dtype=np.int64).reshape(d, -1).T
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    flat = f.values.reshape(-1)
    out = np.empty(len(pts), dtype=np.complex128)
    for i, mvec in enumerate(pts):
        out[i] = np.sum(flat * roots[(-(pts @ mvec)) % n])
    return (out / float(n) ** d).reshape(f.values.shape)


def kernel_size_matches(m: Modulus, d_max: int) -> bool:
    """Closed form for |{y : mult * y = 0}| against exhaustive enumeration."""
    n = m.n
    for d in range(1, d_max + 1):
        if n**d > DENSE_LIMIT:
            break
        pts = np.indices((n,) * d, dtype=np.int64).reshape(d, -1).T
        for mult in range(n):
            count = int(np.count_nonzero(np.all((mult * pts) % n == 0, axis=1)))
            if count != kernel_size(m, mult, d):
                return False
    return True


def _random_subset(rng: np.random.Generator, m: Modulus, d: int) -> PointSet:
    total = m.n**d
    size = int(rng.integers(1, total + 1))
    return from_codes(m, rng.choice(total, size=size, replace=False), d)


def identity_record(n: int, d: int, seed: int, instances: int = 100) -> ExperimentRecord:
    started = time.perf_counter()
    m = factorize(n)
    total = n**d
    if total > fourier.MAX_TABLE:
        raise ValueError(f"n^d = {total} exceeds the transform table cap")
    gaps = dict.fromkeys(
        ("orthogonality_gap", "naive_transform_gap", "inversion_gap", "plancherel_gap",
         "star_identity_gap", "mu_fourier_gap"),
        0.0,
    )
    gaps["orthogonality_gap"] = fourier.orthogonality_gap(m, d) if total <= ORTHOGONALITY_LIMIT else math.nan
    if total > NAIVE_LIMIT:
        gaps["naive_transform_gap"] = math.nan
        gaps["mu_fourier_gap"] = math.nan
    flags = {"mu_dev_holds": True, "m1_bound_holds": True, "k1_bound_holds": True, "k1_tau_free_holds": True}
    worst = {"worst_mu_dev_ratio": 0.0, "worst_m1_ratio": 0.0, "worst_k1_ratio": 0.0}
    shape = (n,) * d
    for i in range(instances):
        rng = np.random.default_rng(np.random.SeedSequence([seed, n, d, i]))
        f = fourier.GridFunction(m, rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape))
        g = fourier.GridFunction(m, rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape))
        F = fourier.forward_transform(f)
        back = fourier.inverse_transform(F)
        gaps["inversion_gap"] = max(gaps["inversion_gap"], float(np.max(np.abs(back.values - f.values))))
        gaps["plancherel_gap"] = max(gaps["plancherel_gap"], fourier.plancherel_check(f, g).abs_gap)
        if total <= NAIVE_LIMIT:
            gaps["naive_transform_gap"] = max(
                gaps["naive_transform_gap"], float(np.max(np.abs(naive_transform(f) - F.values)))
            )

        E = _random_subset(rng, m, d)
        E_hat = fourier.indicator_transform(E)
        k = int(rng.integers(1, min(d, 3) + 1))
        bases = E.points[rng.integers(0, len(E), size=k)]
        s_vec = rng.integers(0, n, size=k)
        gaps["star_identity_gap"] = max(
            gaps["star_identity_gap"], fourier.star_transform_identity_gap(E, bases, s_vec, E_hat)
        )
        hist = dotg.mu_histogram(E)
        if total <= NAIVE_LIMIT:
            rebuilt = fourier.mu_from_fourier(E, E_hat)
            gaps["mu_fourier_gap"] = max(gaps["mu_fourier_gap"], float(np.max(np.abs(rebuilt - hist.counts))))

        dev = dotg.mu_deviation(E, hist)
        m1 = dist.m_k_bound_check(E, 1)
        k1 = dotg.dot_k1_bound_check(E)
        flags["mu_dev_holds"] &= dev.holds
        flags["m1_bound_holds"] &= m1.holds
        flags["k1_bound_holds"] &= k1.holds
        flags["k1_tau_free_holds"] &= k1.holds_tau_free
        worst["worst_mu_dev_ratio"] = max(worst["worst_mu_dev_ratio"], dev.max_dev / dev.bound)
        worst["worst_m1_ratio"] = max(worst["worst_m1_ratio"], m1.ratio)
        worst["worst_k1_ratio"] = max(worst["worst_k1_ratio"], k1.value / k1.bound)

    kernel_ok = kernel_size_matches(m, min(d, 3))
    gap_ok = all(not (v >= GAP_TOL) for v in gaps.values())  # NaN = not run
    # k1_tau_free_holds is observational and does not enter ``ok``.
    ok = gap_ok and kernel_ok and flags["mu_dev_holds"] and flags["m1_bound_holds"] and flags["k1_bound_holds"]
    measurements = {"instances": instances, **gaps, "kernel_size_ok": kernel_ok, **flags, **worst, "ok": ok}
    return ExperimentRecord({"n": n, "d": d, "seed": seed}, measurements, time.perf_counter() - started)


def run_identity_suite(
    n_list: Sequence[int] = (3, 9, 15),
    d_list: Sequence[int] = (1, 2, 3),
    seed: int = 0,
    instances: int = 100,
) -> list[ExperimentRecord]:
    """Every Fourier identity and explicit-constant bound, per (n, d)."""
    for n in n_list:
        factorize(n)  # rejects even or tiny n before any work starts
    return [identity_record(n, d, seed, instances) for n in n_list for d in d_list]


def suite_ok(records: Sequence[ExperimentRecord]) -> bool:
    return all(r.measurements["ok"] for r in records)


# ---------------------------------------------------------------- output


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (list, tuple, frozenset, set)):
        return " ".join(_fmt(v) for v in value)
    return str(value)


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, (list, tuple, frozenset, set)):
        return [_jsonable(v) for v in value]
    return value


def render(rows: Sequence[dict], fmt: str = "csv", columns: Sequence[str] | None = None) -> str:
    """CSV (header + one line per row) or a JSON list; no rows gives empty CSV output."""
    if fmt == "csv" and not rows:
        return ""
    if columns is None:
        columns = list(dict.fromkeys(key for row in rows for key in row))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c, "")) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        payload = [{c: _jsonable(row.get(c)) for c in columns} for row in rows]
        return json.dumps(payload, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse_csv(text: str) -> list[dict]:
    """Read back a CSV written by :func:`render`, restoring numbers and booleans."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed = {}
        for key, raw in row.items():
            if raw in ("true", "false"):
                parsed[key] = raw == "true"
            else:
                try:
                    parsed[key] = int(raw)
                except ValueError:
                    try:
                        v = float(raw)
                        parsed[key] = None if math.isnan(v) else v
                    except ValueError:
                        parsed[key] = raw
        out.append(parsed)
    return out


def write_records(
    records: Sequence[ExperimentRecord],
    out: str | Path | None,
    fmt: str = "csv",
    columns: Sequence[str] | None = None,
    command: str = "",
) -> str:
    """Render records; with a path, also write a ``.meta.json`` sidecar holding
    the non-reproducible fields (version, timestamp, runtimes)."""
    text = render([r.row() for r in records], fmt, columns)
    if out is not None:
        out = Path(out)
        out.write_text(text)
        meta = {
            "toolkit_version": __version__,
            "command": command,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "runtimes_s": [r.runtime_s for r in records],
            "saturation_policy": {
                "tail_fraction": simplices.TAIL_FRACTION,
                "gain_threshold": simplices.GAIN_THRESHOLD,
                "checkpoints": simplices.CHECKPOINTS,
            },
        }
        out.with_name(out.name + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return text
