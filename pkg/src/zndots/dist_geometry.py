"""Distance side: ||x - y|| = sum (x_i - y_i)^2 over Z_n, distance sets and k-stars."""

from __future__ import annotations

from typing import Sequence

from . import _kernels as K
from . import _stars
from ._stars import BoundCheck, MomentEstimate, StarAverage
from .points import PointSet, StarHistogram, ValueHistogram
from .ring_core import Modulus, as_modulus


def dist(x: Sequence[int], y: Sequence[int], m: Modulus | int) -> int:
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    n = as_modulus(m).n
    return sum((int(a) - int(b)) ** 2 for a, b in zip(x, y)) % n


def distance_histogram(E: PointSet) -> ValueHistogram:
    """Ordered-pair counts of each distance value (the diagonal contributes to 0)."""
    if len(E) < 1:
        raise ValueError("empty point set")
    return ValueHistogram(K.pair_label_hist(E.points, E.n, K.DISTANCE))


def distance_set(E: PointSet) -> frozenset[int]:
    return distance_histogram(E).support()


def star_histogram(E: PointSet, bases) -> StarHistogram:
    """Counts of x in E by (||x - y1||, ..., ||x - yk||)."""
    return _stars.star_histogram(E, bases, K.DISTANCE)


def star_set(E: PointSet, bases) -> frozenset[tuple[int, ...]]:
    return _stars.star_set(E, bases, K.DISTANCE)


def star_average(E: PointSet, k: int, sample_bases: int, seed=None) -> StarAverage:
    """Mean number of distinct distance k-stars over base tuples from E^k."""
    if k > E.d:
        raise ValueError(f"k = {k} exceeds dimension {E.d}")
    return _stars.star_average(E, k, sample_bases, seed, K.DISTANCE)


def m_k_statistic(E: PointSet, k: int) -> int:
    """Exact ``sum_{y in E^k} sum_t nu_y(t)^2`` for distance k-stars.

    Evaluated as ``sum_{x, x'} c(x, x')^k`` with c(x, x') the number of y in
    E equidistant from x and x'.
    """
    return _stars.second_moment(E, k, K.DISTANCE)


def m_k_statistic_sampled(E: PointSet, k: int, samples: int, seed=None) -> MomentEstimate:
    return _stars.second_moment_sampled(E, k, samples, seed, K.DISTANCE)


def m_k_bound(m: Modulus, d: int, size: int, k: int) -> float:
    """|E|^{k+2}/n^k + tau n^{2d-1} |E|^k / gamma^{d-1}, with constant 1."""
    return size ** (k + 2) / float(m.n) ** k + m.tau * float(m.n) ** (2 * d - 1) * float(size) ** k / float(
        m.gamma
    ) ** (d - 1)


def m_k_bound_check(E: PointSet, k: int, value: int | None = None) -> BoundCheck:
    """Compare the statistic with the bound above.

    Only k = 1 carries an explicit constant; for k >= 2 the comparison is
    reported with ``guaranteed=False`` and is informational.
    """
    if value is None:
        value = m_k_statistic(E, k)
    bound = m_k_bound(E.modulus, E.d, len(E), k)
    return BoundCheck(value=value, bound=bound, holds=value <= bound, guaranteed=k == 1)
