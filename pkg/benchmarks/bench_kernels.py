"""Compare the numba and numpy cycle-matroid kernels.

Run ``python benchmarks/bench_kernels.py [--max-edges 16] [--repeat 3]``.
Both paths are called directly, so the ``PLANARDUAL_NO_NUMBA`` flag does
not matter here. Prints one row per kernel and size with the best time of
``--repeat`` runs and the speed-up; results are cross-checked for equality.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from planardual import _kernels as K


def random_ends(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    # a spanning path keeps the graph connected, the rest are random (loops allowed)
    path = [(i, i + 1) for i in range(n - 1)]
    extra = rng.integers(0, n, size=(m - len(path), 2)).tolist()
    return np.array(path + extra, dtype=np.int64)


def best(fn, repeat: int) -> tuple[float, object]:
    out, t_best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        t_best = min(t_best, time.perf_counter() - t0)
    return t_best, out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-edges", type=int, default=8)
    ap.add_argument("--max-edges", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if K.nb is None:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    # compile once so timings exclude JIT
    warm = random_ends(4, 3, rng)
    t = K.rank_table_numba(warm, 3)
    K._circuit_profile_nb(t, 4)
    K._dual_table_nb(t, 4)
    K._rank_identity_nb(t, t, np.arange(4, dtype=np.int64), False)

    print(f"{'kernel':<16}{'edges':>6}{'numba s':>12}{'numpy s':>12}{'speed-up':>10}")
    for m in range(args.min_edges, args.max_edges + 1, 2):
        n = max(2, m // 2 + 1)
        ends = random_ends(m, n, rng)
        tn, a = best(lambda: K.rank_table_numba(ends, n), args.repeat)
        tp, b = best(lambda: K.rank_table_numpy(ends, n), args.repeat)
        assert np.array_equal(a, b)
        rows = [("rank_table", tn, tp)]
        perm = rng.permutation(m).astype(np.int64)
        tn, a = best(lambda: K._rank_identity_nb(b, b, perm, True), args.repeat)
        tp, b2 = best(lambda: K.rank_identity_numpy(b, b, perm, True), args.repeat)
        assert bool(a) == b2
        rows.append(("rank_identity", tn, tp))
        tn, a = best(lambda: K._circuit_profile_nb(b, m), args.repeat)
        tp, b2 = best(lambda: K.circuit_profile_numpy(b, m), args.repeat)
        assert np.array_equal(a, b2)
        rows.append(("circuit_profile", tn, tp))
        for name, tn, tp in rows:
            print(f"{name:<16}{m:>6}{tn:>12.5f}{tp:>12.5f}{tp / max(tn, 1e-9):>10.1f}")


if __name__ == "__main__":
    main()
