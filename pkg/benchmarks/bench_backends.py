"""Time the numba kernels against the pure-numpy fallback.

Run: python3 benchmarks/bench_backends.py [--quick]

Covers the three hot-loop families behind the library: interval-set batch
algebra, pairwise co-presence totals, and temporal walk simulation.  Every
workload is run once on both backends and checked for identical output
before it is timed.
"""
from __future__ import annotations

import argparse
import functools
import time

import numpy as np

from mlstream._kernels import numpy_impl as ref

try:
    from mlstream._kernels import numba_impl as jit
except ImportError:  # pragma: no cover
    jit = None


def _random_set(rng, n, span):
    s = rng.integers(0, span, size=n).astype(np.int64)
    e = s + rng.integers(0, 20, size=n)
    return ref.normalize_intervals(s, e)


def _normalize_batch(impl, flat_s, flat_e, offsets):
    total = 0
    for i in range(offsets.shape[0] - 1):
        s, _ = impl.normalize_intervals(flat_s[offsets[i]:offsets[i + 1]],
                                        flat_e[offsets[i]:offsets[i + 1]])
        total += s.shape[0]
    return total


def _interval_workloads(rng, k):
    n = 600_000 // k
    s = rng.integers(0, 4_000_000, size=n).astype(np.int64)
    e = s + rng.integers(0, 40, size=n)
    yield f"normalize_intervals  n={n:,}", "normalize_intervals", (s, e)

    # The ingestion-time pattern: thousands of small per-entity sets.
    n_small = 20_000 // k
    flat_s = rng.integers(0, 5_000, size=n_small * 30).astype(np.int64)
    flat_e = flat_s + rng.integers(0, 25, size=n_small * 30)
    offsets = np.arange(n_small + 1, dtype=np.int64) * 30
    yield (f"normalize_intervals  {n_small:,} sets of 30",
           _normalize_batch, (flat_s, flat_e, offsets))

    m = 150_000 // k
    a = _random_set(rng, m, 6_000_000)
    b = _random_set(rng, m, 6_000_000)
    label = f"{len(a[0]):,} x {len(b[0]):,} intervals"
    yield f"intersect_sets  {label}", "intersect_sets", (*a, *b)
    yield f"overlap_ticks  {label}", "overlap_ticks", (*a, *b)


def _copresence_workload(rng, k):
    n_sets = 400 // max(1, k // 2)
    sets = [_random_set(rng, 30, 10_000) for _ in range(n_sets)]
    offsets = np.zeros(n_sets + 1, dtype=np.int64)
    for i, (s, _) in enumerate(sets):
        offsets[i + 1] = offsets[i] + len(s)
    flat_s = np.concatenate([s for s, _ in sets])
    flat_e = np.concatenate([e for _, e in sets])
    left, right = np.triu_indices(n_sets, k=1)
    left = left.astype(np.int64)
    right = right.astype(np.int64)
    label = f"{n_sets} sets, {len(left):,} pairs"
    return (f"pair_overlap_total  {label}", "pair_overlap_total",
            (flat_s, flat_e, offsets, left, right))


def _walk_workloads(k):
    from mlstream.synth import planted_flight_network
    from mlstream.walks import _presence_arrays, build_session

    g = planted_flight_network(seed=3)
    t0 = g.study_interval.start
    ses = build_session(g, g.study_interval.end)
    n_nodes = len(ses.nodes)
    n_layers = len(ses.layers)
    incidence = (ses.inc_ptr, ses.inc_rec, ses.inc_other, ses.inc_end,
                 ses.node_ptr, ses.node_rec, ses.node_other, ses.node_end)

    walks = 300 // k + 1
    row_node = np.arange(n_nodes, dtype=np.int64)
    fixed = np.zeros(n_nodes, dtype=np.int64)
    ptr, ps, pe, pcum, totals = _presence_arrays(g, ses.nodes, t0, ses.t_max)
    exp_args = (ses.rec_s, ses.rec_e, ses.rec_la, ses.rec_lb, *incidence,
                row_node, 0, fixed, ptr, ps, pe, pcum, totals,
                30, ses.t_max, walks, 9, 400, n_layers)
    yield (f"simulate_exposure  {n_nodes} rows x {walks} walks",
           "simulate_exposure", exp_args)

    cov_walks = 3_000 // k + 1
    cov_args = (ses.rec_s, ses.rec_e, ses.rec_la, ses.rec_lb,
                ses.rec_na, ses.rec_nb, *incidence,
                n_nodes, t0, ses.t_max,
                30, ses.t_max, cov_walks, 9, 400, n_layers)
    yield (f"simulate_coverage  {cov_walks:,} walks",
           "simulate_coverage", cov_args)


def build_workloads(quick):
    rng = np.random.default_rng(2024)
    k = 8 if quick else 1
    out = list(_interval_workloads(rng, k))
    out.append(_copresence_workload(rng, k))
    out.extend(_walk_workloads(k))
    return out


def _same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def _mean_time(fn, args, runs):
    times = []
    for _ in range(runs):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return sum(times) / len(times)


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="compare the numba and numpy kernel backends")
    parser.add_argument("--quick", action="store_true",
                        help="run reduced problem sizes")
    parser.add_argument("--runs", type=int, default=3,
                        help="timed repetitions per workload (default 3)")
    args = parser.parse_args(argv)

    if jit is None:
        print("numba is not installed; nothing to compare against.")
        return 1

    workloads = build_workloads(args.quick)
    width = max(len(label) for label, _, _ in workloads)
    print(f"{'workload':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for label, fname, fargs in workloads:
        if callable(fname):
            f_jit = functools.partial(fname, jit)
            f_ref = functools.partial(fname, ref)
        else:
            f_jit = getattr(jit, fname)
            f_ref = getattr(ref, fname)
        # First call warms up (and JIT-compiles) before anything is timed.
        out_j = f_jit(*fargs)
        out_r = f_ref(*fargs)
        if not _same(out_j, out_r):
            raise SystemExit(f"backend outputs differ on: {label}")
        t_jit = _mean_time(f_jit, fargs, args.runs)
        t_ref = _mean_time(f_ref, fargs, args.runs)
        speedup = t_ref / t_jit if t_jit > 0 else float("inf")
        print(f"{label:<{width}}  {t_jit * 1e3:>7.2f} ms  {t_ref * 1e3:>7.2f} ms"
              f"  {speedup:>7.1f}x", flush=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
