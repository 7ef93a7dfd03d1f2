"""Congruence types of (k+1)-point configurations, by distance or dot product.

A type is the tuple of labels ``t_ij`` for ``0 <= i < j <= k`` in
lexicographic (i, j) order, where ``t_ij`` is ``||x_i - x_j||`` or
``x_i . x_j``.  Tuples of points are ordered and may repeat points; no
canonicalisation modulo vertex permutations is done.

Types are handled internally as integer codes: the labels read as the
digits of a base-n number, most significant first, so sorting codes sorts
label tuples lexicographically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import _kernels as K
from .dot_geometry import ThresholdReport
from .points import PointSet
from .ring_core import Modulus, as_modulus

MAX_EXACT_TUPLES = 10**9
BITMAP_LIMIT = 2**27
CHECKPOINTS = 50
# Saturation policy: plateaued when the last 20% of draws added < 1% of types.
TAIL_FRACTION = 0.2
GAIN_THRESHOLD = 0.01

METRICS = ("distance", "dotproduct")


def _metric_name(metric: str) -> str:
    return METRICS[K.metric_code(metric) == K.DOT]


def n_labels(k: int) -> int:
    return k * (k + 1) // 2


@dataclass(frozen=True)
class SimplexType:
    k: int
    metric: str
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if len(self.labels) != n_labels(self.k):
            raise ValueError(f"a {self.k}-simplex type has {n_labels(self.k)} labels")
        object.__setattr__(self, "metric", _metric_name(self.metric))

    def label(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        if not 0 <= i < j <= self.k:
            raise IndexError((i, j))
        pos = i * self.k - i * (i - 1) // 2 + (j - i - 1)
        return self.labels[pos]


def encode(labels: Sequence[int], n: int) -> int:
    code = 0
    for t in labels:
        code = code * n + int(t)
    return code


def decode(code: int, n: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(n_labels(k)):
        code, t = divmod(int(code), n)
        out.append(t)
    return tuple(reversed(out))


def type_of(points, metric: str, m: Modulus | int) -> SimplexType:
    """Label tuple of an ordered configuration ``(x_0, ..., x_k)``."""
    m = as_modulus(m)
    pts = np.asarray(points, dtype=np.int64)
    if pts.ndim != 2 or len(pts) < 2:
        raise ValueError("need at least two points of equal dimension")
    code = K.metric_code(metric)
    labels = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if code == K.DOT:
                v = int(pts[i] @ pts[j])
            else:
                diff = pts[i] - pts[j]
                v = int(diff @ diff)
            labels.append(v % m.n)
    return SimplexType(k=len(pts) - 1, metric=metric, labels=tuple(labels))


@dataclass(frozen=True)
class Saturation:
    plateaued: bool
    last_gain: float


@dataclass(frozen=True)
class TypeCensus:
    """Distinct types seen over (all or sampled) ordered (k+1)-tuples of E."""

    modulus: Modulus
    k: int
    metric: str
    codes: np.ndarray = field(repr=False)
    tuples_examined: int
    exact: bool
    saturation_curve: tuple[tuple[int, int], ...]
    budget: int
    seed: int | None = None

    @property
    def distinct_count(self) -> int:
        return int(len(self.codes))

    def types(self) -> Iterator[SimplexType]:
        for c in self.codes:
            yield SimplexType(self.k, self.metric, decode(int(c), self.modulus.n, self.k))

    @property
    def distinct(self) -> frozenset[SimplexType]:
        return frozenset(self.types())

    def label_sets(self) -> set[tuple[int, ...]]:
        return {decode(int(c), self.modulus.n, self.k) for c in self.codes}


def _use_bitmap(n: int, k: int) -> bool:
    return n ** n_labels(k) <= BITMAP_LIMIT


def census(
    E: PointSet,
    k: int,
    metric: str,
    mode: str = "exact",
    budget: int = MAX_EXACT_TUPLES,
    seed: int | None = None,
    checkpoints: int = CHECKPOINTS,
) -> TypeCensus:
    """Collect the types realised by ordered (k+1)-tuples of E.

    ``exact`` enumerates all |E|^{k+1} tuples and needs that count to be at
    most ``budget`` (itself capped at 1e9).  ``sampled`` draws ``budget``
    tuples uniformly with replacement, in ``checkpoints`` equal shards with
    independent streams spawned from ``seed``; the saturation curve records
    the distinct count after each shard.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(E) < 1:
        raise ValueError("empty point set")
    code = K.metric_code(metric)
    metric = _metric_name(metric)
    n, size, P = E.n, len(E), E.points
    if n ** n_labels(k) >= 2**62:
        raise ValueError("type codes would overflow 64 bits")
    if mode == "exact":
        total = size ** (k + 1)
        if total > min(budget, MAX_EXACT_TUPLES):
            raise ValueError(f"exact census needs {total} tuples, budget is {min(budget, MAX_EXACT_TUPLES)}")
        if _use_bitmap(n, k):
            bitmap = np.zeros(n ** n_labels(k), dtype=np.uint8)
            K.census_exact_bitmap(P, n, code, k, bitmap)
            codes = np.flatnonzero(bitmap).astype(np.int64)
        else:
            codes = np.zeros(0, dtype=np.int64)
            for i0 in range(size):
                codes = np.union1d(codes, K.census_prefix_codes(P, n, code, k, i0))
        return TypeCensus(
            modulus=E.modulus,
            k=k,
            metric=metric,
            codes=codes,
            tuples_examined=total,
            exact=True,
            saturation_curve=((total, len(codes)),),
            budget=budget,
            seed=seed,
        )
    if mode != "sampled":
        raise ValueError(f"unknown census mode {mode!r}")
    if budget < 1:
        raise ValueError("sampled census needs a positive budget")
    shards = max(1, min(checkpoints, budget))
    sizes = [budget // shards + (1 if i < budget % shards else 0) for i in range(shards)]
    streams = np.random.SeedSequence(seed).spawn(shards)
    bitmap = np.zeros(n ** n_labels(k), dtype=np.uint8) if _use_bitmap(n, k) else None
    codes = np.zeros(0, dtype=np.int64)
    curve = []
    drawn = 0
    for shard_size, stream in zip(sizes, streams):
        rng = np.random.default_rng(stream)
        tuples = rng.integers(0, size, size=(shard_size, k + 1), dtype=np.int64)
        if bitmap is not None:
            K.census_sampled_bitmap(P, n, code, tuples, bitmap)
            distinct = int(np.count_nonzero(bitmap))
        else:
            codes = np.union1d(codes, K.census_tuple_codes(P, n, code, tuples))
            distinct = len(codes)
        drawn += shard_size
        curve.append((drawn, distinct))
    if bitmap is not None:
        codes = np.flatnonzero(bitmap).astype(np.int64)
    return TypeCensus(
        modulus=E.modulus,
        k=k,
        metric=metric,
        codes=codes,
        tuples_examined=drawn,
        exact=False,
        saturation_curve=tuple(curve),
        budget=budget,
        seed=seed,
    )


def density(c: TypeCensus, m: Modulus | int | None = None) -> float:
    """Distinct types over the n^{k(k+1)/2} possible label tuples."""
    n = as_modulus(m).n if m is not None else c.modulus.n
    return c.distinct_count / float(n) ** n_labels(c.k)


def saturation_estimate(c: TypeCensus) -> Saturation:
    if c.exact:
        return Saturation(plateaued=True, last_gain=0.0)
    curve = c.saturation_curve
    if len(curve) < 2:
        raise ValueError("saturation needs at least two checkpoints")
    total, final = curve[-1]
    cutoff = (1.0 - TAIL_FRACTION) * total
    before = 0
    for drawn, distinct in curve:
        if drawn <= cutoff:
            before = distinct
    gain = (final - before) / final if final else 0.0
    return Saturation(plateaued=gain < GAIN_THRESHOLD, last_gain=gain)


def simplex_size_bound(m: Modulus | int, d: int, k: int, set_size: int = 0) -> ThresholdReport:
    """sqrt(tau) n^{d + (k-1)/2} / gamma^{(d-1)/2}, the size above which E
    should realise a positive proportion of k-simplex types (implicit constant)."""
    m = as_modulus(m)
    bound = math.sqrt(m.tau) * float(m.n) ** (d + (k - 1) / 2) / float(m.gamma) ** ((d - 1) / 2)
    return ThresholdReport(
        name="simplex_density",
        bound=bound,
        set_size=set_size,
        applies=set_size > bound,
        vacuous=bound >= m.n**d,
        explicit=False,
    )
