"""Compiled counting loops.

All kernels return exact integers, so results do not depend on how numba
splits the work across threads.  Metric codes: 0 = distance ``||x - y||``,
1 = dot product ``x . y``.
"""

from __future__ import annotations

import warnings

import numba as nb
import numpy as np

nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
warnings.filterwarnings("ignore", message=".*TBB.*", category=nb.NumbaWarning)

DISTANCE = 0
DOT = 1

# Fixed partition of the outer loop; independent of the thread count.
PAIR_CHUNKS = 64


def metric_code(metric: str) -> int:
    if metric in ("distance", "dist"):
        return DISTANCE
    if metric in ("dotproduct", "dot"):
        return DOT
    raise ValueError(f"unknown metric {metric!r}")


def set_threads(count: int | None) -> None:
    if count:
        nb.set_num_threads(min(int(count), nb.config.NUMBA_NUM_THREADS))


def thread_count() -> int:
    return nb.get_num_threads()


@nb.njit(cache=True, inline="always")
def _raw_label(P, i, j, metric):
    s = 0
    if metric == 0:
        for c in range(P.shape[1]):
            diff = P[i, c] - P[j, c]
            s += diff * diff
    else:
        for c in range(P.shape[1]):
            s += P[i, c] * P[j, c]
    return s


@nb.njit(cache=True, inline="always")
def _label(P, i, j, n, metric):
    return _raw_label(P, i, j, metric) % n


@nb.njit(cache=True, parallel=True)
def pair_label_hist(P, n, metric):
    """Histogram of labels over all ordered pairs of rows of P (diagonal included).

    Both labels are symmetric, so only i <= j is visited.  Raw (unreduced)
    sums are tallied in a small table and folded mod n at the end when that
    table is small enough.
    """
    m, d = P.shape
    smax = d * (n - 1) * (n - 1) + 1
    fold = smax <= 1 << 16
    width = smax if fold else n
    hist = np.zeros((PAIR_CHUNKS, width), np.int64)
    for c in nb.prange(PAIR_CHUNKS):
        h = hist[c]
        for i in range(c, m, PAIR_CHUNKS):
            if fold:
                h[_raw_label(P, i, i, metric)] += 1
                for j in range(i + 1, m):
                    h[_raw_label(P, i, j, metric)] += 2
            else:
                h[_label(P, i, i, n, metric)] += 1
                for j in range(i + 1, m):
                    h[_label(P, i, j, n, metric)] += 2
    total = np.zeros(width, np.int64)
    for c in range(PAIR_CHUNKS):
        total += hist[c]
    out = np.zeros(n, np.int64)
    for s in range(width):
        out[s % n] += total[s]
    return out


@nb.njit(cache=True, parallel=True)
def star_distinct_counts(P, Q, base_idx, n, metric, nchunks):
    """For each row of ``base_idx`` (indices into Q), count distinct label tuples over P.

    ``nchunks`` only sets how many scratch tables are used; results do not
    depend on it.

    The label tuple of x for bases (y1..yk) is (l(x, y1), ..., l(x, yk)).
    """
    T, k = base_idx.shape
    m, d = P.shape
    out = np.zeros(T, np.int64)
    size = 1
    for _ in range(k):
        size *= n
    for c in nb.prange(nchunks):
        seen = np.zeros(size, np.int64)
        for t in range(c, T, nchunks):
            stamp = t + 1
            cnt = 0
            for x in range(m):
                code = 0
                for b in range(k):
                    y = base_idx[t, b]
                    s = 0
                    if metric == 0:
                        for a in range(d):
                            diff = P[x, a] - Q[y, a]
                            s += diff * diff
                    else:
                        for a in range(d):
                            s += P[x, a] * Q[y, a]
                    code = code * n + s % n
                if seen[code] != stamp:
                    seen[code] = stamp
                    cnt += 1
            out[t] = cnt
    return out


@nb.njit(cache=True, inline="always")
def _tuple_code(P, idx, n, metric):
    k1 = idx.shape[0]
    code = 0
    for i in range(k1):
        for j in range(i + 1, k1):
            code = code * n + _label(P, idx[i], idx[j], n, metric)
    return code


@nb.njit(cache=True, parallel=True)
def census_exact_bitmap(P, n, metric, k, bitmap):
    """Mark the type code of every ordered (k+1)-tuple of rows of P."""
    m = P.shape[0]
    inner = 1
    for _ in range(k):
        inner *= m
    for i0 in nb.prange(m):
        idx = np.zeros(k + 1, np.int64)
        idx[0] = i0
        for _ in range(inner):
            bitmap[_tuple_code(P, idx, n, metric)] = 1
            pos = k
            while pos >= 1:
                idx[pos] += 1
                if idx[pos] < m:
                    break
                idx[pos] = 0
                pos -= 1


@nb.njit(cache=True, parallel=True)
def census_tuple_codes(P, n, metric, tuples):
    """Type code for each row of ``tuples`` (indices into P)."""
    T = tuples.shape[0]
    out = np.empty(T, np.int64)
    for t in nb.prange(T):
        out[t] = _tuple_code(P, tuples[t], n, metric)
    return out


@nb.njit(cache=True, parallel=True)
def census_prefix_codes(P, n, metric, k, i0):
    """Type codes of every tuple whose first index is ``i0`` (m**k of them)."""
    m = P.shape[0]
    inner = 1
    for _ in range(k):
        inner *= m
    out = np.empty(inner, np.int64)
    rows = m ** (k - 1) if k > 1 else 1
    for r in nb.prange(m):
        idx = np.zeros(k + 1, np.int64)
        idx[0] = i0
        idx[1] = r
        for q in range(rows):
            # decode q into positions 2..k
            rest = q
            for pos in range(k, 1, -1):
                idx[pos] = rest % m
                rest //= m
            out[r * rows + q] = _tuple_code(P, idx, n, metric)
    return out


@nb.njit(cache=True, parallel=True)
def census_sampled_bitmap(P, n, metric, tuples, bitmap):
    for t in nb.prange(tuples.shape[0]):
        bitmap[_tuple_code(P, tuples[t], n, metric)] = 1
