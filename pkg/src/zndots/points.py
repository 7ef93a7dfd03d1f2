"""Point sets in Z_n^d and the histogram containers built from them."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .ring_core import Modulus, as_modulus

# Largest n^d for which a dense indicator / full enumeration is allowed.
DENSE_LIMIT = 2**24


class PointSet:
    """An immutable, duplicate-free set E of points of Z_n^d.

    Points are stored as a read-only ``(len(E), d)`` int64 array whose rows
    keep the order in which they were first supplied.
    """

    __slots__ = ("modulus", "d", "points")

    def __init__(self, m: Modulus | int, points, d: int | None = None, *, dedupe: bool = True):
        m = as_modulus(m)
        arr = np.asarray(points, dtype=np.int64)
        if arr.ndim == 1:
            if d is None:
                raise ValueError("cannot infer dimension from a flat array")
            arr = arr.reshape(-1, d)
        if arr.ndim != 2:
            raise ValueError("points must be a 2-D array of shape (count, d)")
        if d is None:
            d = arr.shape[1]
        if arr.shape[1] != d or d < 1:
            raise ValueError(f"points must have dimension {d}")
        if arr.size and (arr.min() < 0 or arr.max() >= m.n):
            raise ValueError(f"coordinates must lie in [0, {m.n})")
        if len(arr):
            _, first = np.unique(arr, axis=0, return_index=True)
            if len(first) != len(arr):
                if not dedupe:
                    raise ValueError("duplicate points")
                arr = arr[np.sort(first)]
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "points", arr)

    def __setattr__(self, name, value):
        raise AttributeError("PointSet is immutable")

    @property
    def n(self) -> int:
        return self.modulus.n

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return (tuple(int(c) for c in row) for row in self.points)

    def __contains__(self, x) -> bool:
        x = np.asarray(x, dtype=np.int64) % self.n
        return bool(np.any(np.all(self.points == x, axis=1)))

    def __repr__(self) -> str:
        return f"PointSet(n={self.n}, d={self.d}, size={len(self)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return (self.n, self.d) == (other.n, other.d) and self.as_set() == other.as_set()

    def __hash__(self):
        return hash((self.n, self.d, frozenset(self.as_set())))

    def as_set(self) -> set[tuple[int, ...]]:
        return set(iter(self))

    def codes(self) -> np.ndarray:
        """Flat indices of the points in the row-major n^d grid."""
        weights = self.n ** np.arange(self.d - 1, -1, -1, dtype=np.int64)
        return self.points @ weights

    def indicator(self) -> np.ndarray:
        """Dense 0/1 array of shape ``(n,) * d``."""
        size = self.n**self.d
        if size > DENSE_LIMIT:
            raise ValueError(f"n^d = {size} too large for a dense indicator")
        out = np.zeros(size, dtype=np.float64)
        out[self.codes()] = 1.0
        return out.reshape((self.n,) * self.d)

    def translate(self, v: Sequence[int]) -> "PointSet":
        v = np.asarray(v, dtype=np.int64).reshape(1, self.d)
        return PointSet(self.modulus, (self.points + v) % self.n)

    def subset(self, rows) -> "PointSet":
        return PointSet(self.modulus, self.points[np.asarray(rows)])


def from_codes(m: Modulus | int, codes, d: int) -> PointSet:
    m = as_modulus(m)
    codes = np.asarray(codes, dtype=np.int64)
    digits = np.empty((len(codes), d), dtype=np.int64)
    rest = codes.copy()
    for j in range(d - 1, -1, -1):
        digits[:, j] = rest % m.n
        rest //= m.n
    return PointSet(m, digits, d)


def full_space(m: Modulus | int, d: int) -> PointSet:
    m = as_modulus(m)
    if m.n**d > DENSE_LIMIT:
        raise ValueError(f"n^d = {m.n ** d} too large to enumerate")
    return from_codes(m, np.arange(m.n**d), d)


def read_point_file(path: str | Path) -> PointSet:
    """Parse a point-list file.

    The first non-blank line is ``n=<int> d=<int>``; every following line is
    one point written as d space-separated integers in [0, n).  Duplicate
    points are an error.
    """
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty point file")
    header = dict(tok.split("=", 1) for tok in lines[0].split() if "=" in tok)
    try:
        n, d = int(header["n"]), int(header["d"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: header must read 'n=<int> d=<int>'") from exc
    m = as_modulus(n)
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            row = [int(tok) for tok in ln.split()]
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: non-integer coordinate") from exc
        if len(row) != d:
            raise ValueError(f"{path}:{lineno}: expected {d} coordinates, got {len(row)}")
        if any(c < 0 or c >= n for c in row):
            raise ValueError(f"{path}:{lineno}: coordinate outside [0, {n})")
        rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no points")
    return PointSet(m, np.array(rows, dtype=np.int64).reshape(-1, d), d, dedupe=False)


def write_point_file(E: PointSet, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(f"n={E.n} d={E.d}\n")
        for row in E.points:
            fh.write(" ".join(str(int(c)) for c in row) + "\n")


@dataclass(frozen=True)
class ValueHistogram:
    """Counts indexed by residue t in [0, n)."""

    counts: np.ndarray
    total: int = field(init=False)

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "total", int(counts.sum()))

    def __getitem__(self, t: int) -> int:
        return int(self.counts[t % len(self.counts)])

    def support(self) -> frozenset[int]:
        return frozenset(int(t) for t in np.flatnonzero(self.counts))

    def as_dict(self) -> dict[int, int]:
        return {int(t): int(c) for t, c in enumerate(self.counts) if c}


@dataclass(frozen=True)
class StarHistogram:
    """Counts keyed by k-tuples of residues, for a fixed tuple of base points."""

    counts: dict[tuple[int, ...], int]
    k: int
    bases: tuple[tuple[int, ...], ...]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def support(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.counts)

    def dense(self, n: int) -> np.ndarray:
        out = np.zeros((n,) * self.k, dtype=np.int64)
        for key, c in self.counts.items():
            out[key] = c
        return out


def as_bases(bases, d: int, n: int) -> np.ndarray:
    arr = np.asarray(bases, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != d:
        raise ValueError(f"base points must have dimension {d}")
    if len(arr) < 1:
        raise ValueError("need at least one base point")
    return np.ascontiguousarray(arr % n)

