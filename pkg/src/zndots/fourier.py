"""Discrete Fourier analysis on Z_n^d.

Normalisation: ``f_hat(m) = n^-d sum_x f(x) chi(-x.m)`` and the inversion
``f(x) = sum_m chi(x.m) f_hat(m)``, with ``chi(a) = exp(2 pi i a / n)``.

Transforms run axis by axis (d passes of a dense 1-D transform, no FFT).
Every accumulation is an explicit loop over one axis index with elementwise
numpy updates, so the summation order is fixed and results are bitwise
reproducible whatever the BLAS or thread configuration.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dot_geometry import dot_star_histogram
from .points import PointSet, as_bases
from .ring_core import Modulus, as_modulus

MAX_TABLE = 2**22


@dataclass(frozen=True)
class GridFunction:
    """A complex function on Z_n^d stored densely with shape ``(n,) * d``."""

    modulus: Modulus
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.complex128)
        n = self.modulus.n
        if vals.ndim < 1 or any(s != n for s in vals.shape):
            raise ValueError(f"values must have shape (n,)*d with n = {n}")
        if vals.size > MAX_TABLE:
            raise ValueError(f"table of size {vals.size} exceeds {MAX_TABLE}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def d(self) -> int:
        return self.values.ndim

    @property
    def n(self) -> int:
        return self.modulus.n


class FourierTable(GridFunction):
    """Same layout as GridFunction, indexed by frequency."""


@dataclass(frozen=True)
class PlancherelResult:
    lhs: complex
    rhs: complex
    abs_gap: float


def grid_function(m: Modulus | int, values) -> GridFunction:
    return GridFunction(as_modulus(m), values)


def chi(m: Modulus | int, x: int) -> complex:
    n = as_modulus(m).n
    return cmath.exp(2j * math.pi * (x % n) / n)


def _roots(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def _transform(values: np.ndarray, n: int, sign: int) -> np.ndarray:
    roots = _roots(n)
    idx = np.arange(n)
    kernel = roots[(sign * np.outer(idx, idx)) % n]  # kernel[m, x]
    out = values
    for axis in range(values.ndim):
        src = np.moveaxis(out, axis, 0)
        acc = np.zeros_like(src)
        bshape = (n,) + (1,) * (src.ndim - 1)
        for x in range(n):
            acc += kernel[:, x].reshape(bshape) * src[x][None, ...]
        out = np.moveaxis(acc, 0, axis)
    return out


def forward_transform(f: GridFunction) -> FourierTable:
    vals = _transform(f.values, f.n, -1) / float(f.n) ** f.d
    return FourierTable(f.modulus, vals)


def inverse_transform(t: GridFunction) -> GridFunction:
    return GridFunction(t.modulus, _transform(t.values, t.n, +1))


def plancherel_check(f: GridFunction, g: GridFunction) -> PlancherelResult:
    """Evaluate both sides of ``n^-d sum f conj(g) = sum f_hat conj(g_hat)``."""
    if f.n != g.n or f.values.shape != g.values.shape:
        raise ValueError("shape mismatch")
    lhs = complex(np.sum(f.values * np.conj(g.values))) / float(f.n) ** f.d
    F, G = forward_transform(f), forward_transform(g)
    rhs = complex(np.sum(F.values * np.conj(G.values)))
    return PlancherelResult(lhs=lhs, rhs=rhs, abs_gap=abs(lhs - rhs))


def _all_points(n: int, d: int) -> np.ndarray:
    return np.indices((n,) * d, dtype=np.int64).reshape(d, -1).T


def orthogonality_gap(m: Modulus | int, d: int, block: int = 256) -> float:
    """max over m of |n^-d sum_x chi(x.m) - [m == 0]|, by direct summation."""
    m = as_modulus(m)
    n = m.n
    if n**d > 4096 * 4:
        raise ValueError("orthogonality check limited to small n^d")
    pts = _all_points(n, d)
    roots = _roots(n)
    worst = 0.0
    for lo in range(0, len(pts), block):
        freqs = pts[lo : lo + block]
        sums = roots[(freqs @ pts.T) % n].sum(axis=1) / float(n) ** d
        target = np.zeros(len(freqs))
        target[np.all(freqs == 0, axis=1)] = 1.0
        worst = max(worst, float(np.max(np.abs(sums - target))))
    return worst


def indicator_transform(E: PointSet) -> FourierTable:
    return forward_transform(GridFunction(E.modulus, E.indicator()))


def star_transform_identity_gap(E: PointSet, bases, s_vec, E_hat: FourierTable | None = None) -> float:
    """|mu_hat_y(s) - n^{d-k} E_hat(s1 y1 + ... + sk yk)| for a dot-product k-star.

    The left side is built from the counting function over E (k-dim
    transform with n^-k normalisation); the right side reads the transform
    of the indicator of E.
    """
    n, d = E.n, E.d
    B = as_bases(bases, d, n)
    k = len(B)
    s = np.asarray(s_vec, dtype=np.int64).reshape(-1) % n
    if len(s) != k:
        raise ValueError("need one frequency per base point")
    if k > 3:
        raise ValueError("k-star transforms limited to k <= 3")
    hist = dot_star_histogram(E, B)
    keys = np.array(list(hist.counts.keys()), dtype=np.int64).reshape(-1, k)
    counts = np.array(list(hist.counts.values()), dtype=np.float64)
    roots = _roots(n)
    mu_hat = complex(np.sum(counts * roots[(-(keys @ s)) % n])) / float(n) ** k
    if E_hat is None:
        E_hat = indicator_transform(E)
    freq = tuple(int(v) for v in (s @ B) % n)
    rhs = float(n) ** (d - k) * complex(E_hat.values[freq])
    return abs(mu_hat - rhs)


def mu_from_fourier(E: PointSet, E_hat: FourierTable | None = None) -> np.ndarray:
    """Dot-product incidence counts rebuilt from the transform of E's indicator.

    ``sum_{x,y in E} chi(s x.y) = n^d sum_{y in E} E_hat(-s y)``, followed by
    the 1-D inversion in s.  Returns real values (one per t in Z_n).
    """
    n, d = E.n, E.d
    if E_hat is None:
        E_hat = indicator_transform(E)
    s = np.arange(n, dtype=np.int64)
    freqs = (-s[:, None, None] * E.points[None, :, :]) % n  # (n, |E|, d)
    lookup = E_hat.values[tuple(freqs[..., j] for j in range(d))]
    pair_sums = float(n) ** d * lookup.sum(axis=1)  # one value per s
    roots = _roots(n)
    t = np.arange(n, dtype=np.int64)
    rebuilt = (pair_sums[None, :] * roots[(-np.outer(t, s)) % n]).sum(axis=1) / n
    return rebuilt.real
