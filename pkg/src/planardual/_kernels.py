"""Subset-exhaustive cycle-matroid kernels.

Every matroid check in the package reduces to a table holding the rank of
each of the ``2**m`` edge subsets, indexed by bitmask.  Building and
scanning those tables is the only hot numeric loop, so it has two
implementations: numba ``@njit`` kernels and a vectorised numpy fallback.
Setting ``PLANARDUAL_NO_NUMBA=1`` (or running without numba installed)
selects the numpy path; both are always importable for cross-checking.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba as nb
except ImportError:  # pragma: no cover - numba is an install dependency
    nb = None

USE_NUMBA = nb is not None and os.environ.get("PLANARDUAL_NO_NUMBA", "") not in ("1", "true", "yes")

MAX_TABLE_EDGES = 20


def _check_size(m: int) -> None:
    if m > MAX_TABLE_EDGES:
        raise ValueError(f"rank table over {m} edges would need 2**{m} entries")


# ---------------------------------------------------------------------------
# numpy path


def rank_table_numpy(ends: np.ndarray, n_vertices: int) -> np.ndarray:
    ends = np.asarray(ends, dtype=np.int64).reshape(-1, 2)
    m = ends.shape[0]
    _check_size(m)
    size = 1 << m
    masks = np.arange(size, dtype=np.int64)
    if n_vertices == 0:
        return np.zeros(size, dtype=np.int8)
    lab = np.tile(np.arange(n_vertices, dtype=np.int16), (size, 1))
    present = [((masks >> j) & 1).astype(bool) for j in range(m)]
    changed = True
    while changed:
        changed = False
        for j in range(m):
            a, b = ends[j]
            if a == b:
                continue
            sel = present[j]
            la = lab[sel, a]
            lb = lab[sel, b]
            mn = np.minimum(la, lb)
            if np.any(la != lb):
                changed = True
                lab[sel, a] = mn
                lab[sel, b] = mn
    roots = (lab == np.arange(n_vertices, dtype=np.int16)).sum(axis=1)
    return (n_vertices - roots).astype(np.int8)


def permute_masks_numpy(m: int, perm: np.ndarray) -> np.ndarray:
    masks = np.arange(1 << m, dtype=np.int64)
    out = np.zeros_like(masks)
    for i in range(m):
        out |= ((masks >> i) & 1) << int(perm[i])
    return out


def rank_identity_numpy(src: np.ndarray, tgt: np.ndarray, perm: np.ndarray, dual: bool) -> bool:
    m = len(perm)
    full = (1 << m) - 1
    masks = np.arange(1 << m, dtype=np.int64)
    image = permute_masks_numpy(m, perm)
    lhs = tgt[image].astype(np.int64)
    if dual:
        pc = np.bitwise_count(masks).astype(np.int64)
        rhs = pc - int(src[full]) + src[full ^ masks].astype(np.int64)
    else:
        rhs = src.astype(np.int64)
    return bool(np.array_equal(lhs, rhs))


def circuit_profile_numpy(table: np.ndarray, m: int) -> np.ndarray:
    """``out[e, k]`` = number of circuits of size ``k`` that contain edge ``e``."""
    masks = np.arange(1 << m, dtype=np.int64)
    pc = np.bitwise_count(masks).astype(np.int64)
    indep = table.astype(np.int64) == pc
    minimal = ~indep
    for e in range(m):
        has = ((masks >> e) & 1).astype(bool)
        minimal &= ~has | indep[masks ^ (1 << e)]
    out = np.zeros((m, m + 1), dtype=np.int64)
    circ = masks[minimal]
    sizes = pc[minimal]
    for e in range(m):
        sel = ((circ >> e) & 1).astype(bool)
        np.add.at(out[e], sizes[sel], 1)
    return out


def dual_table_numpy(table: np.ndarray, m: int) -> np.ndarray:
    masks = np.arange(1 << m, dtype=np.int64)
    full = (1 << m) - 1
    pc = np.bitwise_count(masks).astype(np.int64)
    return (pc - int(table[full]) + table[full ^ masks].astype(np.int64)).astype(np.int8)


# ---------------------------------------------------------------------------
# numba path

if nb is not None:

    @nb.njit(cache=True, nogil=True)
    def _rank_table_nb(ends, n_vertices):
        m = ends.shape[0]
        size = 1 << m
        out = np.zeros(size, dtype=np.int8)
        parent = np.empty(max(n_vertices, 1), dtype=np.int64)
        for mask in range(size):
            for v in range(n_vertices):
                parent[v] = v
            r = 0
            for j in range(m):
                if (mask >> j) & 1:
                    x = ends[j, 0]
                    while parent[x] != x:
                        parent[x] = parent[parent[x]]
                        x = parent[x]
                    y = ends[j, 1]
                    while parent[y] != y:
                        parent[y] = parent[parent[y]]
                        y = parent[y]
                    if x != y:
                        parent[y] = x
                        r += 1
            out[mask] = r
        return out

    @nb.njit(cache=True, nogil=True)
    def _popcount(x):
        c = 0
        while x:
            x &= x - 1
            c += 1
        return c

    @nb.njit(cache=True, nogil=True)
    def _rank_identity_nb(src, tgt, perm, dual):
        m = perm.shape[0]
        full = (1 << m) - 1
        rfull = src[full]
        for mask in range(1 << m):
            image = 0
            for i in range(m):
                if (mask >> i) & 1:
                    image |= 1 << perm[i]
            if dual:
                want = _popcount(mask) - rfull + src[full ^ mask]
            else:
                want = src[mask]
            if tgt[image] != want:
                return False
        return True

    @nb.njit(cache=True, nogil=True)
    def _circuit_profile_nb(table, m):
        out = np.zeros((m, m + 1), dtype=np.int64)
        for mask in range(1 << m):
            k = _popcount(mask)
            if table[mask] == k:
                continue
            ok = True
            for e in range(m):
                if (mask >> e) & 1:
                    sub = mask ^ (1 << e)
                    if table[sub] != k - 1:
                        ok = False
                        break
            if not ok:
                continue
            for e in range(m):
                if (mask >> e) & 1:
                    out[e, k] += 1
        return out

    @nb.njit(cache=True, nogil=True)
    def _dual_table_nb(table, m):
        full = (1 << m) - 1
        out = np.empty(1 << m, dtype=np.int8)
        rfull = table[full]
        for mask in range(1 << m):
            out[mask] = _popcount(mask) - rfull + table[full ^ mask]
        return out


def rank_table_numba(ends: np.ndarray, n_vertices: int) -> np.ndarray:
    ends = np.ascontiguousarray(np.asarray(ends, dtype=np.int64).reshape(-1, 2))
    _check_size(ends.shape[0])
    return _rank_table_nb(ends, n_vertices)


# ---------------------------------------------------------------------------
# dispatch


def rank_table(ends: np.ndarray, n_vertices: int) -> np.ndarray:
    if USE_NUMBA:
        return rank_table_numba(ends, n_vertices)
    return rank_table_numpy(ends, n_vertices)


def rank_identity(src: np.ndarray, tgt: np.ndarray, perm, dual: bool) -> bool:
    perm = np.asarray(perm, dtype=np.int64)
    if USE_NUMBA:
        return bool(_rank_identity_nb(src, tgt, perm, dual))
    return rank_identity_numpy(src, tgt, perm, dual)


def circuit_profile(table: np.ndarray, m: int) -> np.ndarray:
    if USE_NUMBA:
        return _circuit_profile_nb(table, m)
    return circuit_profile_numpy(table, m)


def dual_table(table: np.ndarray, m: int) -> np.ndarray:
    if USE_NUMBA:
        return _dual_table_nb(table, m)
    return dual_table_numpy(table, m)
