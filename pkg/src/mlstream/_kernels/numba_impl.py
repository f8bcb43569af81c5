"""Numba-compiled kernel implementations.

Each function mirrors its twin in ``numpy_impl`` exactly: same arguments,
same return values bit for bit. Keep the two files in sync; the RNG and the
walk stepping logic in particular must not drift.
"""
from __future__ import annotations

import numpy as np
from numba import njit

# uint64 module constants: mixing numba uint64 values with plain int literals
# promotes to float64, so every operand below is pre-wrapped.
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_ONE = np.uint64(1)


@njit(cache=True)
def _mix(z):
    z = (z ^ (z >> _S30)) * _C1
    z = (z ^ (z >> _S27)) * _C2
    return z ^ (z >> _S31)


@njit(cache=True)
def _rng_state(seed, stream):
    return np.uint64(seed) + (np.uint64(stream) + _ONE) * _GOLDEN


@njit(cache=True)
def _rng_next(state):
    state = state + _GOLDEN
    return state, _mix(state)


# --- interval algebra --------------------------------------------------------

@njit(cache=True)
def normalize_intervals(starts, ends):
    n = starts.shape[0]
    if n == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    order = np.argsort(starts)
    ss = starts[order]
    ee = ends[order]
    out_s = np.empty(n, np.int64)
    out_e = np.empty(n, np.int64)
    m = 0
    cs = ss[0]
    ce = ee[0]
    for i in range(1, n):
        if ss[i] > ce:
            out_s[m] = cs
            out_e[m] = ce
            m += 1
            cs = ss[i]
            ce = ee[i]
        elif ee[i] > ce:
            ce = ee[i]
    out_s[m] = cs
    out_e[m] = ce
    m += 1
    return out_s[:m].copy(), out_e[:m].copy()


@njit(cache=True)
def intersect_sets(a_s, a_e, b_s, b_e):
    na = a_s.shape[0]
    nb = b_s.shape[0]
    out_s = np.empty(na + nb, np.int64)
    out_e = np.empty(na + nb, np.int64)
    m = 0
    i = 0
    j = 0
    while i < na and j < nb:
        lo = max(a_s[i], b_s[j])
        hi = min(a_e[i], b_e[j])
        if lo <= hi:
            out_s[m] = lo
            out_e[m] = hi
            m += 1
        if a_e[i] < b_e[j]:
            i += 1
        elif a_e[i] > b_e[j]:
            j += 1
        else:
            i += 1
            j += 1
    return out_s[:m].copy(), out_e[:m].copy()


@njit(cache=True)
def overlap_ticks(a_s, a_e, b_s, b_e):
    na = a_s.shape[0]
    nb = b_s.shape[0]
    total = np.int64(0)
    i = 0
    j = 0
    while i < na and j < nb:
        lo = max(a_s[i], b_s[j])
        hi = min(a_e[i], b_e[j])
        if hi > lo:
            total += hi - lo
        if a_e[i] < b_e[j]:
            i += 1
        elif a_e[i] > b_e[j]:
            j += 1
        else:
            i += 1
            j += 1
    return total


@njit(cache=True)
def pair_overlap_total(flat_s, flat_e, offsets, left, right):
    total = np.int64(0)
    for p in range(left.shape[0]):
        i = offsets[left[p]]
        i1 = offsets[left[p] + 1]
        j = offsets[right[p]]
        j1 = offsets[right[p] + 1]
        while i < i1 and j < j1:
            lo = max(flat_s[i], flat_s[j])
            hi = min(flat_e[i], flat_e[j])
            if hi > lo:
                total += hi - lo
            if flat_e[i] < flat_e[j]:
                i += 1
            elif flat_e[i] > flat_e[j]:
                j += 1
            else:
                i += 1
                j += 1
    return total


# --- temporal walks ----------------------------------------------------------

@njit(cache=True)
def _lower_bound(arr, lo, hi, val):
    while lo < hi:
        mid = (lo + hi) // 2
        if arr[mid] < val:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def _upper_bound(arr, lo, hi, val):
    while lo < hi:
        mid = (lo + hi) // 2
        if arr[mid] <= val:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def _pick_next(state, use_node, idx, ready, rec_s,
               inc_ptr, inc_rec, inc_other, inc_end,
               node_ptr, node_rec, node_other, node_end):
    if use_node:
        p0 = node_ptr[idx]
        p1 = node_ptr[idx + 1]
        lo = _lower_bound(node_end, p0, p1, ready)
        cnt = p1 - lo
        if cnt <= 0:
            return state, np.int64(-1), np.int64(0), np.int64(-1)
        state, r = _rng_next(state)
        k = lo + np.int64(r % np.uint64(cnt))
        rec = node_rec[k]
        other = node_other[k]
    else:
        p0 = inc_ptr[idx]
        p1 = inc_ptr[idx + 1]
        lo = _lower_bound(inc_end, p0, p1, ready)
        cnt = p1 - lo
        if cnt <= 0:
            return state, np.int64(-1), np.int64(0), np.int64(-1)
        state, r = _rng_next(state)
        k = lo + np.int64(r % np.uint64(cnt))
        rec = inc_rec[k]
        other = inc_other[k]
    s = rec_s[rec]
    hop_t = s if s > ready else ready
    return state, rec, hop_t, other


@njit(cache=True)
def simulate_exposure(rec_s, rec_e, rec_la, rec_lb,
                      inc_ptr, inc_rec, inc_other, inc_end,
                      node_ptr, node_rec, node_other, node_end,
                      row_node, use_fixed, fixed_times,
                      pres_ptr, pres_s, pres_e, pres_cum, row_total,
                      gamma, t_max, num_walks, seed, max_hops, n_layers):
    n_rows = row_node.shape[0]
    touched = np.zeros((n_rows, n_layers), np.int64)
    linear = np.zeros((n_rows, n_layers), np.int64)
    layer_stamp = np.full(n_layers, -1, np.int64)
    for r in range(n_rows):
        node = row_node[r]
        if use_fixed == 0 and row_total[r] == 0:
            continue
        for w in range(num_walks):
            wid = r * num_walks + w
            state = _rng_state(seed, wid)
            if use_fixed != 0:
                t = fixed_times[r]
            else:
                state, rv = _rng_next(state)
                idx = np.int64(rv % np.uint64(row_total[r]))
                p0 = pres_ptr[r]
                p1 = pres_ptr[r + 1]
                j = _upper_bound(pres_cum, p0, p1, idx) - 1
                t = pres_s[j] + (idx - pres_cum[j])
            ready = t
            cur = np.int64(-1)
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
                la = rec_la[rec]
                lb = rec_lb[rec]
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


@njit(cache=True)
def simulate_coverage(rec_s, rec_e, rec_la, rec_lb, rec_na, rec_nb,
                      inc_ptr, inc_rec, inc_other, inc_end,
                      node_ptr, node_rec, node_other, node_end,
                      n_nodes, t_lo, t_hi,
                      gamma, t_max, num_walks, seed, max_hops, n_layers):
    counts = np.zeros(n_layers, np.int64)
    stamp = np.full(n_layers * n_nodes, -1, np.int64)
    span = t_hi - t_lo + 1
    for w in range(num_walks):
        state = _rng_state(seed, w)
        state, r1 = _rng_next(state)
        node = np.int64(r1 % np.uint64(n_nodes))
        state, r2 = _rng_next(state)
        t = t_lo + np.int64(r2 % np.uint64(span))
        ready = t
        cur = np.int64(-1)
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
            la = rec_la[rec]
            lb = rec_lb[rec]
            na = rec_na[rec]
            nb = rec_nb[rec]
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


@njit(cache=True)
def trace_walk(rec_s, rec_e, rec_nl_a, rec_nl_b,
               inc_ptr, inc_rec, inc_other, inc_end,
               node_ptr, node_rec, node_other, node_end,
               start_node, start_time, gamma, t_max, max_hops, seed, stream):
    hop_t = np.zeros(max_hops, np.int64)
    hop_rec = np.zeros(max_hops, np.int64)
    hop_from = np.zeros(max_hops, np.int64)
    hop_to = np.zeros(max_hops, np.int64)
    state = _rng_state(seed, stream)
    ready = start_time
    cur = np.int64(-1)
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
        if nxt == rec_nl_b[rec]:
            hop_from[n] = rec_nl_a[rec]
        else:
            hop_from[n] = rec_nl_b[rec]
        cur = nxt
        ready = t + gamma
        n += 1
    return n, hop_t, hop_rec, hop_from, hop_to
