"""Machinery shared by the dot-product and distance sides.

Everything here is parameterised by a metric code (see ``_kernels``): the
label of a point x against a base y is either ``||x - y||`` or ``x . y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .points import PointSet, StarHistogram, as_bases

# |E|^3 scalar-operation budget for exact second-moment statistics.
MOMENT_BUDGET = 10**10
# Entries of the |E| x |E| label matrix used by the k = 1 route.
MATRIX_BUDGET = 10**8
# Largest number of base tuples enumerated by an exact star average.
EXACT_BASE_TUPLES = 2**24


@dataclass(frozen=True)
class StarAverage:
    estimate: float
    stderr: float
    exact: bool
    samples: int


@dataclass(frozen=True)
class BoundCheck:
    """A computed statistic against a closed-form upper bound.

    ``guaranteed`` marks bounds with an explicit constant, for which a
    violation is a defect rather than an observation.
    """

    value: int
    bound: float
    holds: bool
    guaranteed: bool

    @property
    def ratio(self) -> float:
        return self.value / self.bound


@dataclass(frozen=True)
class MomentEstimate:
    """Sampled value of a second-moment statistic."""

    estimate: float
    stderr: float
    samples: int


def labels_against(P: np.ndarray, bases: np.ndarray, n: int, metric: int) -> np.ndarray:
    """``(len(P), k)`` array of labels of each row of P against each base."""
    if metric == K.DOT:
        raw = P @ bases.T
    else:
        raw = (P * P).sum(1)[:, None] + (bases * bases).sum(1)[None, :] - 2 * (P @ bases.T)
    return raw % n


def label_matrix(E: PointSet, metric: int) -> np.ndarray:
    """``L[x, y]`` = label of x against y, for x, y in E."""
    return labels_against(E.points, E.points, E.n, metric)


def star_histogram(E: PointSet, bases, metric: int) -> StarHistogram:
    B = as_bases(bases, E.d, E.n)
    labels = labels_against(E.points, B, E.n, metric)
    keys, counts = np.unique(labels, axis=0, return_counts=True)
    hist = {tuple(int(v) for v in key): int(c) for key, c in zip(keys, counts)}
    return StarHistogram(counts=hist, k=len(B), bases=tuple(tuple(int(v) for v in b) for b in B))


def star_set(E: PointSet, bases, metric: int) -> frozenset[tuple[int, ...]]:
    return star_histogram(E, bases, metric).support()


def star_average(E: PointSet, k: int, sample_bases: int, seed, metric: int) -> StarAverage:
    """Average over base tuples in E^k of the number of distinct k-stars.

    Switches to full enumeration of E^k when ``sample_bases >= |E|^k``;
    otherwise draws ``sample_bases`` base tuples uniformly with replacement.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if sample_bases < 1:
        raise ValueError("sample_bases must be >= 1")
    if E.n**k > 2**26:
        raise ValueError(f"n^k = {E.n ** k} too large for star counting")
    size = len(E)
    total = size**k
    exact = sample_bases >= total
    if exact:
        if total > EXACT_BASE_TUPLES:
            raise ValueError(f"|E|^k = {total} base tuples exceeds the exact budget")
        grids = np.meshgrid(*([np.arange(size, dtype=np.int64)] * k), indexing="ij")
        base_idx = np.stack([g.ravel() for g in grids], axis=1)
    else:
        rng = np.random.default_rng(seed)
        base_idx = rng.integers(0, size, size=(sample_bases, k), dtype=np.int64)
    nchunks = max(1, min(len(base_idx), 4 * K.thread_count()))
    counts = K.star_distinct_counts(E.points, E.points, np.ascontiguousarray(base_idx), E.n, metric, nchunks)
    mean = float(counts.mean())
    if exact or len(counts) < 2:
        stderr = 0.0
    else:
        stderr = float(counts.std(ddof=1) / math.sqrt(len(counts)))
    return StarAverage(estimate=mean, stderr=stderr, exact=exact, samples=len(counts))


def agreement_matrix(E: PointSet, metric: int) -> np.ndarray:
    """``C[x, x'] = #{y in E : l(x, y) == l(x', y)}``.

    Computed as ``sum_t B_t B_t^T`` with ``B_t`` the 0/1 indicator of label t.
    The products are integer-valued floats below 2**53, hence exact.
    """
    L = label_matrix(E, metric)
    size = len(E)
    C = np.zeros((size, size), dtype=np.float64)
    for t in np.unique(L):
        B = (L == t).astype(np.float64)
        C += B @ B.T
    return np.rint(C).astype(np.int64)


def second_moment(E: PointSet, k: int, metric: int) -> int:
    """``sum over base tuples of sum_t count(t)^2`` for k-stars, exactly.

    Uses ``sum_{x, x'} c(x, x')^k``.  For k = 1 this collapses to
    ``sum_y sum_t count_y(t)^2``, which needs only the label matrix.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    size = len(E)
    if k == 1:
        if size**2 > MATRIX_BUDGET:
            raise ValueError(f"|E|^2 = {size ** 2} exceeds the label-matrix budget {MATRIX_BUDGET}")
        L = label_matrix(E, metric)
        offsets = L + (np.arange(size, dtype=np.int64) * E.n)[None, :]
        per_base = np.bincount(offsets.ravel(), minlength=size * E.n)
        return int((per_base * per_base).sum())
    if size**3 > MOMENT_BUDGET:
        raise ValueError(f"|E|^3 = {size ** 3} exceeds the exact budget {MOMENT_BUDGET}")
    C = agreement_matrix(E, metric)
    if math.log2(max(size, 2)) * (k + 2) < 62:
        return int((C**k).sum())
    return sum(int(c) ** k for c in C.ravel())


def second_moment_sampled(E: PointSet, k: int, samples: int, seed, metric: int) -> MomentEstimate:
    """Estimate ``sum_{x, x'} c(x, x')^k`` from uniformly drawn ordered pairs."""
    if samples < 2:
        raise ValueError("need at least 2 sampled pairs")
    rng = np.random.default_rng(seed)
    size = len(E)
    pairs = rng.integers(0, size, size=(samples, 2), dtype=np.int64)
    values = np.empty(samples, dtype=np.float64)
    for lo in range(0, samples, 256):
        chunk = pairs[lo : lo + 256]
        Lx = labels_against(E.points[chunk[:, 0]], E.points, E.n, metric)
        Lxp = labels_against(E.points[chunk[:, 1]], E.points, E.n, metric)
        c = (Lx == Lxp).sum(1).astype(np.float64)
        values[lo : lo + 256] = c**k
    scale = float(size) ** 2
    return MomentEstimate(
        estimate=scale * float(values.mean()),
        stderr=scale * float(values.std(ddof=1)) / math.sqrt(samples),
        samples=samples,
    )
