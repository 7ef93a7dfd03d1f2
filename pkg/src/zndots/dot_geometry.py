"""Dot-product incidences over Z_n^d: product sets, coverage thresholds, k-stars."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from . import _stars
from ._stars import StarAverage
from .points import DENSE_LIMIT, PointSet, StarHistogram, ValueHistogram
from .ring_core import Modulus, as_modulus


@dataclass(frozen=True)
class DeviationReport:
    max_dev: float
    bound: float
    holds: bool


@dataclass(frozen=True)
class ThresholdReport:
    """A closed-form size threshold evaluated for a given modulus and dimension.

    ``explicit`` is False when the source result only holds up to an
    unspecified constant (the bound is then evaluated with constant 1).
    """

    name: str
    bound: float
    set_size: int
    applies: bool
    vacuous: bool
    explicit: bool = True


@dataclass(frozen=True)
class DotMomentCheck:
    value: int
    bound: float
    holds: bool
    bound_tau_free: float
    holds_tau_free: bool


def dot(x: Sequence[int], y: Sequence[int], m: Modulus | int) -> int:
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    n = as_modulus(m).n
    return sum(int(a) * int(b) for a, b in zip(x, y)) % n


def mu_histogram(E: PointSet) -> ValueHistogram:
    """Number of ordered pairs (x, y) in E x E with x . y = t, for each t."""
    if len(E) < 1:
        raise ValueError("empty point set")
    return ValueHistogram(K.pair_label_hist(E.points, E.n, K.DOT))


def product_set(E: PointSet) -> frozenset[int]:
    return mu_histogram(E).support()


def covers_ring(E: PointSet) -> bool:
    return len(product_set(E)) == E.n


def mu_deviation(E: PointSet, hist: ValueHistogram | None = None) -> DeviationReport:
    """Largest |mu(t) - |E|^2/n| against tau n^{d-1} |E| / gamma^{(d-2)/2}."""
    m, d, size = E.modulus, E.d, len(E)
    if hist is None:
        hist = mu_histogram(E)
    mean = size * size / m.n
    max_dev = float(np.max(np.abs(hist.counts - mean)))
    bound = m.tau * float(m.n) ** (d - 1) * size / m.gamma ** ((d - 2) / 2)
    return DeviationReport(max_dev=max_dev, bound=bound, holds=max_dev <= bound)


def _report(name, bound, size, total, explicit=True) -> ThresholdReport:
    return ThresholdReport(
        name=name,
        bound=bound,
        set_size=size,
        applies=size > bound,
        vacuous=bound >= total,
        explicit=explicit,
    )


def coverage_thresholds(
    m: Modulus | int, d: int, ell: int | None = None, set_size: int = 0
) -> list[ThresholdReport]:
    """Evaluate the known sufficient sizes for covering units / the whole ring.

    Always reported:

    * ``units_cover``: sqrt(2) tau n^d / gamma^{(d-1)/2}, units inside the product set;
    * ``ring_cover_weak``: 2 sqrt(tau) n^{d+1} / gamma^{d/2}, whole ring;
    * ``ring_cover``: tau n^d / gamma^{(d-2)/2}, whole ring (needs d > 2).

    With ``ell`` (n must equal p**ell) also the prime-power forms
    ``units_cover_prime_power`` (ell >= 2, implicit constant) and
    ``ring_cover_prime_power``.
    """
    m = as_modulus(m)
    if d < 1:
        raise ValueError("dimension must be >= 1")
    n, tau, gamma = float(m.n), m.tau, m.gamma
    total = m.n**d
    reports = [
        _report("units_cover", math.sqrt(2) * tau * n**d / gamma ** ((d - 1) / 2), set_size, total),
        _report("ring_cover_weak", 2 * math.sqrt(tau) * n ** (d + 1) / gamma ** (d / 2), set_size, total),
        _report("ring_cover", tau * n**d / gamma ** ((d - 2) / 2), set_size, total),
    ]
    if ell is not None:
        if ell < 1 or not m.is_prime_power() or m.factors[0][1] != ell:
            raise ValueError(f"n = {m.n} is not of the form p**{ell}")
        q = n
        if ell >= 2:
            expo = (2 * ell - 1) * d / (2 * ell) + 1 / (2 * ell)
            reports.append(
                _report("units_cover_prime_power", ell * q**expo, set_size, total, explicit=False)
            )
        expo = (2 * ell - 1) * d / (2 * ell) + 1 / ell
        reports.append(_report("ring_cover_prime_power", (ell + 1) * q**expo, set_size, total))
    return reports


def divisible_construction(m: Modulus | int, d: int) -> PointSet:
    """All points whose coordinates are multiples of the smallest prime of n.

    Every dot product between two such points is a multiple of gamma^2, so
    no unit of Z_n is ever produced.
    """
    m = as_modulus(m)
    side = m.n // m.gamma
    if side**d > DENSE_LIMIT:
        raise ValueError(f"construction has {side ** d} points, too many to build")
    grid = np.indices((side,) * d, dtype=np.int64).reshape(d, -1).T
    return PointSet(m, grid * m.gamma, d)


def dot_star_histogram(E: PointSet, bases) -> StarHistogram:
    """Counts of x in E by the tuple (x . y1, ..., x . yk)."""
    return _stars.star_histogram(E, bases, K.DOT)


def dot_star_set(E: PointSet, bases) -> frozenset[tuple[int, ...]]:
    return _stars.star_set(E, bases, K.DOT)


def dot_star_average(E: PointSet, k: int, sample_bases: int, seed=None) -> StarAverage:
    """Mean number of distinct dot-product k-stars over base tuples from E^k."""
    if k > E.d:
        raise ValueError(f"k = {k} exceeds dimension {E.d}")
    return _stars.star_average(E, k, sample_bases, seed, K.DOT)


def dot_k2_statistic(E: PointSet, k: int) -> int:
    """Exact sum over y in E^k and t in Z_n^k of (# x in E with x . y_i = t_i)^2."""
    return _stars.second_moment(E, k, K.DOT)


def dot_k1_bound_check(E: PointSet, value: int | None = None) -> DotMomentCheck:
    """k = 1 second moment against |E|^3/n + tau n^{2d-1} |E| / gamma^{d-1}.

    The tau-free variant (without the divisor-count factor) is reported too.
    """
    m, d, size = E.modulus, E.d, len(E)
    if value is None:
        value = dot_k2_statistic(E, 1)
    main = size**3 / m.n
    tail = float(m.n) ** (2 * d - 1) * size / float(m.gamma) ** (d - 1)
    bound = main + m.tau * tail
    free = main + tail
    return DotMomentCheck(
        value=value, bound=bound, holds=value <= bound, bound_tau_free=free, holds_tau_free=value <= free
    )
