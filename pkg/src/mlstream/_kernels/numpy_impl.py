"""Pure-numpy kernel implementations.

Reference backend: every function here must return output identical to its
numba twin in ``numba_impl`` (same values, same dtypes, same ordering).
Interval arrays are int64 pairs of closed endpoints; measures count unit
cells, so ``[s, e]`` contributes ``e - s``.
"""
from __future__ import annotations

import numpy as np

_EMPTY = np.empty(0, dtype=np.int64)

# SplitMix64; walk streams are keyed by (seed, walk index) so identical
# policies replay identical walks on either backend.
_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB


def _mix(z):
    z = ((z ^ (z >> 30)) * _C1) & _MASK
    z = ((z ^ (z >> 27)) * _C2) & _MASK
    return z ^ (z >> 31)


def _rng_state(seed, stream):
    return (seed + (stream + 1) * _GOLDEN) & _MASK


def _rng_next(state):
    state = (state + _GOLDEN) & _MASK
    return state, _mix(state)


# --- interval algebra --------------------------------------------------------

def normalize_intervals(starts, ends):
    """Sort and merge overlapping or abutting closed intervals."""
    n = starts.shape[0]
    if n == 0:
        return _EMPTY.copy(), _EMPTY.copy()
    order = np.argsort(starts, kind="stable")
    ss = starts[order]
    ee = ends[order]
    emax = np.maximum.accumulate(ee)
    fresh = np.empty(n, dtype=bool)
    fresh[0] = True
    fresh[1:] = ss[1:] > emax[:-1]
    idx = np.flatnonzero(fresh)
    out_s = ss[idx]
    out_e = emax[np.append(idx[1:], n) - 1]
    return np.ascontiguousarray(out_s), np.ascontiguousarray(out_e)


def _overlap_pairs(a_s, a_e, b_s, b_e):
    """Index pairs (i, j) of intervals from a and b that touch (closed)."""
    lo = np.searchsorted(b_e, a_s, side="left")
    hi = np.searchsorted(b_s, a_e, side="right")
    counts = hi - lo
    np.clip(counts, 0, None, out=counts)
    total = int(counts.sum())
    if total == 0:
        return _EMPTY.copy(), _EMPTY.copy()
    i = np.repeat(np.arange(a_s.shape[0], dtype=np.int64), counts)
    shift = np.repeat(np.cumsum(counts) - counts, counts)
    j = np.repeat(lo, counts) + (np.arange(total, dtype=np.int64) - shift)
    return i, j


def intersect_sets(a_s, a_e, b_s, b_e):
    """Intersection of two normalized interval sets (keeps point overlaps)."""
    if a_s.shape[0] == 0 or b_s.shape[0] == 0:
        return _EMPTY.copy(), _EMPTY.copy()
    i, j = _overlap_pairs(a_s, a_e, b_s, b_e)
    if i.shape[0] == 0:
        return _EMPTY.copy(), _EMPTY.copy()
    out_s = np.maximum(a_s[i], b_s[j])
    out_e = np.minimum(a_e[i], b_e[j])
    return out_s, out_e


def overlap_ticks(a_s, a_e, b_s, b_e):
    """Measure (in cells) of the intersection, without materializing it."""
    if a_s.shape[0] == 0 or b_s.shape[0] == 0:
        return 0
    i, j = _overlap_pairs(a_s, a_e, b_s, b_e)
    if i.shape[0] == 0:
        return 0
    spans = np.minimum(a_e[i], b_e[j]) - np.maximum(a_s[i], b_s[j])
    return int(spans.sum())


def pair_overlap_total(flat_s, flat_e, offsets, left, right):
    """Sum of pairwise intersection measures over an explicit pair list.

    ``flat_s``/``flat_e`` hold all interval sets concatenated; set ``k``
    occupies ``[offsets[k], offsets[k + 1])``.
    """
    total = 0
    for p in range(left.shape[0]):
        a0, a1 = offsets[left[p]], offsets[left[p] + 1]
        b0, b1 = offsets[right[p]], offsets[right[p] + 1]
        if a1 == a0 or b1 == b0:
            continue
        total += overlap_ticks(flat_s[a0:a1], flat_e[a0:a1],
                               flat_s[b0:b1], flat_e[b0:b1])
    return int(total)


# --- temporal walks ----------------------------------------------------------

def _lower_bound(arr, lo, hi, val):
    return lo + int(np.searchsorted(arr[lo:hi], val, side="left"))


def _upper_bound(arr, lo, hi, val):
    return lo + int(np.searchsorted(arr[lo:hi], val, side="right"))


def _pick_next(state, use_node, idx, ready, rec_s,
               inc_ptr, inc_rec, inc_other, inc_end,
               node_ptr, node_rec, node_other, node_end):
    # Incidence lists are sorted by record end, so the usable records at
    # time `ready` form a suffix.
    if use_node:
        p0, p1 = int(node_ptr[idx]), int(node_ptr[idx + 1])
        ends, recs, others = node_end, node_rec, node_other
    else:
        p0, p1 = int(inc_ptr[idx]), int(inc_ptr[idx + 1])
        ends, recs, others = inc_end, inc_rec, inc_other
    lo = _lower_bound(ends, p0, p1, ready)
    cnt = p1 - lo
    if cnt <= 0:
        return state, -1, 0, -1
    state, r = _rng_next(state)
    k = lo + (r % cnt)
    rec = int(recs[k])
    s = int(rec_s[rec])
    hop_t = s if s > ready else ready
    return state, rec, hop_t, int(others[k])


def simulate_exposure(rec_s, rec_e, rec_la, rec_lb,
                      inc_ptr, inc_rec, inc_other, inc_end,
                      node_ptr, node_rec, node_other, node_end,
                      row_node, use_fixed, fixed_times,
                      pres_ptr, pres_s, pres_e, pres_cum, row_total,
                      gamma, t_max, num_walks, seed, max_hops, n_layers):
    """Batch walker, accumulating per-row layer exposure statistics.

    Returns (touched, linear): int64 matrices of shape (rows, layers) with
    the number of walks that crossed each layer at least once, and the
    summed ``t_max - hop_time`` weights per layer.
    """
    n_rows = row_node.shape[0]
    touched = np.zeros((n_rows, n_layers), dtype=np.int64)
    linear = np.zeros((n_rows, n_layers), dtype=np.int64)
    layer_stamp = np.full(n_layers, -1, dtype=np.int64)
    for r in range(n_rows):
        node = int(row_node[r])
        if use_fixed == 0 and row_total[r] == 0:
            continue
        for w in range(num_walks):
            wid = r * num_walks + w
            state = _rng_state(seed, wid)
            if use_fixed != 0:
                t = int(fixed_times[r])
            else:
                state, rv = _rng_next(state)
                idx = rv % int(row_total[r])
                p0, p1 = int(pres_ptr[r]), int(pres_ptr[r + 1])
                j = _upper_bound(pres_cum, p0, p1, idx) - 1
                t = int(pres_s[j]) + (idx - int(pres_cum[j]))
            ready = t
            cur = -1
            hops = 0
            while ready <= t_max and hops < max_hops:
                use_node = cur < 0
                pos = node if use_node else cur
                state, rec, hop_t, nxt = _pick_next(
                    state, use_node, pos, ready, rec_s,
                    inc_ptr, inc_rec, inc_other, inc_end,
                    node_ptr, node_rec, node_other, node_end)
                if rec < 0:
                    break
                la = int(rec_la[rec])
                lb = int(rec_lb[rec])
                d = t_max - hop_t
                if layer_stamp[la] != wid:
                    layer_stamp[la] = wid
                    touched[r, la] += 1
                linear[r, la] += d
                if lb != la:
                    if layer_stamp[lb] != wid:
                        layer_stamp[lb] = wid
                        touched[r, lb] += 1
                    linear[r, lb] += d
                cur = nxt
                ready = hop_t + gamma
                hops += 1
    return touched, linear


def simulate_coverage(rec_s, rec_e, rec_la, rec_lb, rec_na, rec_nb,
                      inc_ptr, inc_rec, inc_other, inc_end,
                      node_ptr, node_rec, node_other, node_end,
                      n_nodes, t_lo, t_hi,
                      gamma, t_max, num_walks, seed, max_hops, n_layers):
    """Count distinct nodes touched through each layer's links.

    Walks start uniformly over (node, tick) pairs; the returned int64 vector
    sums per-walk distinct-node counts per layer.
    """
    counts = np.zeros(n_layers, dtype=np.int64)
    stamp = np.full(n_layers * n_nodes, -1, dtype=np.int64)
    span = t_hi - t_lo + 1
    for w in range(num_walks):
        state = _rng_state(seed, w)
        state, r1 = _rng_next(state)
        node = r1 % n_nodes
        state, r2 = _rng_next(state)
        t = t_lo + (r2 % span)
        ready = t
        cur = -1
        hops = 0
        while ready <= t_max and hops < max_hops:
            use_node = cur < 0
            pos = node if use_node else cur
            state, rec, hop_t, nxt = _pick_next(
                state, use_node, pos, ready, rec_s,
                inc_ptr, inc_rec, inc_other, inc_end,
                node_ptr, node_rec, node_other, node_end)
            if rec < 0:
                break
            la = int(rec_la[rec])
            lb = int(rec_lb[rec])
            na = int(rec_na[rec])
            nb = int(rec_nb[rec])
            for li in range(2):
                l = la if li == 0 else lb
                if li == 1 and lb == la:
                    break
                if stamp[l * n_nodes + na] != w:
                    stamp[l * n_nodes + na] = w
                    counts[l] += 1
                if nb != na and stamp[l * n_nodes + nb] != w:
                    stamp[l * n_nodes + nb] = w
                    counts[l] += 1
            cur = nxt
            ready = hop_t + gamma
            hops += 1
    return counts


def trace_walk(rec_s, rec_e, rec_nl_a, rec_nl_b,
               inc_ptr, inc_rec, inc_other, inc_end,
               node_ptr, node_rec, node_other, node_end,
               start_node, start_time, gamma, t_max, max_hops, seed, stream):
    """Single walk trace: (count, hop times, record ids, from-nl, to-nl)."""
    hop_t = np.zeros(max_hops, dtype=np.int64)
    hop_rec = np.zeros(max_hops, dtype=np.int64)
    hop_from = np.zeros(max_hops, dtype=np.int64)
    hop_to = np.zeros(max_hops, dtype=np.int64)
    state = _rng_state(seed, stream)
    ready = start_time
    cur = -1
    n = 0
    while ready <= t_max and n < max_hops:
        use_node = cur < 0
        pos = start_node if use_node else cur
        state, rec, t, nxt = _pick_next(
            state, use_node, pos, ready, rec_s,
            inc_ptr, inc_rec, inc_other, inc_end,
            node_ptr, node_rec, node_other, node_end)
        if rec < 0:
            break
        hop_t[n] = t
        hop_rec[n] = rec
        hop_to[n] = nxt
        hop_from[n] = rec_nl_a[rec] if nxt == rec_nl_b[rec] else rec_nl_b[rec]
        cur = nxt
        ready = t + gamma
        n += 1
    return n, hop_t, hop_rec, hop_from, hop_to
