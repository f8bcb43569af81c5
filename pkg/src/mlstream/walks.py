"""Seeded temporal random walkers and per-layer exposure estimators.

Walker dynamics (these choices matter to every centrality downstream):
the walker occupies a node-layer, waits freely, and at each step picks
uniformly among feasible next link records — those incident to its
position whose interval has not yet ended. It hops at the earliest usable
instant ``max(record start, current time)``; traversal is instantaneous
and costs γ, so the next hop happens no earlier than ``hop time + γ``.
The walk ends at the horizon ``t_max``, at a dead end, or after
``max_hops`` hops (γ = 0 walks never exhaust time on interval links).
The first hop leaves from the start *node*: any record incident to any of
the node's layers is a candidate; afterwards the walker is bound to the
node-layer it arrived on.

Walks are replayable: walk ``i`` draws from a counter-based stream keyed
by (seed, i), so results are bit-identical across runs and backends.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .errors import OutOfStudyInterval, UnknownNode
from .model import (Layer, MultilayerStreamGraph, Node, NodeLayer,
                    nl_sort_key, node_sort_key)
from .paths import PathHop, TemporalPath
from .timesets import TimeSet


class Transition(enum.Enum):
    UNIFORM_NEXT_EDGE = "uniform-next-edge"


class Weighting(enum.Enum):
    INDICATOR = "indicator"
    LINEAR_HORIZON = "linear-horizon"


@dataclass(frozen=True)
class WalkPolicy:
    """Everything a walk simulation depends on, in one hashable value."""

    gamma: int = 0
    num_walks: int = 1000
    seed: int = 0
    t_max: Optional[int] = None  # default: end of the study interval
    transition: Transition = Transition.UNIFORM_NEXT_EDGE
    exposure_weighting: Weighting = Weighting.INDICATOR
    max_hops: int = 10_000

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.num_walks < 1:
            raise ValueError(f"num_walks must be >= 1, got {self.num_walks}")
        if self.max_hops < 1:
            raise ValueError(f"max_hops must be >= 1, got {self.max_hops}")
        if not 0 <= self.seed < 2 ** 63:
            raise ValueError("seed must be a non-negative 63-bit integer")

    def resolve_t_max(self, g: MultilayerStreamGraph) -> int:
        if self.t_max is None:
            return g.study_interval.end
        if not (g.study_interval.start <= self.t_max
                <= g.study_interval.end):
            raise OutOfStudyInterval(
                f"t_max {self.t_max} outside study interval "
                f"[{g.study_interval.start}, {g.study_interval.end}]")
        return self.t_max


@dataclass(frozen=True)
class ExposureMatrix:
    """Exposure values: one row per start node, one column per layer."""

    rows: Tuple[Node, ...]
    layers: Tuple[Layer, ...]
    values: np.ndarray
    policy: Optional[WalkPolicy]
    start_scheme: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def row(self, node: Node) -> np.ndarray:
        return self.values[self.rows.index(node)]

    def write_csv(self, fp) -> None:
        writer = csv.writer(fp)
        writer.writerow(["node"] + ["|".join(l) for l in self.layers])
        for node, row in zip(self.rows, self.values):
            writer.writerow([node] + [format(v, ".12g") for v in row])


@dataclass(frozen=True)
class _Session:
    """Graph compiled to flat arrays for the walk kernels."""

    nodes: Tuple[Node, ...]
    layers: Tuple[Layer, ...]
    nls: Tuple[NodeLayer, ...]
    node_index: Mapping[Node, int]
    layer_index: Mapping[Layer, int]
    nl_index: Mapping[NodeLayer, int]
    rec_ids: Tuple[int, ...]  # positions into graph.links
    rec_s: np.ndarray
    rec_e: np.ndarray
    rec_la: np.ndarray
    rec_lb: np.ndarray
    rec_na: np.ndarray
    rec_nb: np.ndarray
    rec_nl_a: np.ndarray
    rec_nl_b: np.ndarray
    inc_ptr: np.ndarray
    inc_rec: np.ndarray
    inc_other: np.ndarray
    inc_end: np.ndarray
    node_ptr: np.ndarray
    node_rec: np.ndarray
    node_other: np.ndarray
    node_end: np.ndarray
    t_max: int


def _csr(entries: List[List[Tuple[int, int, int]]]):
    """Pack per-position (end, rec, other) lists, sorted by record end."""
    ptr = np.zeros(len(entries) + 1, dtype=np.int64)
    flat: List[Tuple[int, int, int]] = []
    for i, lst in enumerate(entries):
        lst.sort()
        flat.extend(lst)
        ptr[i + 1] = len(flat)
    if flat:
        arr = np.asarray(flat, dtype=np.int64)
        return ptr, arr[:, 1].copy(), arr[:, 2].copy(), arr[:, 0].copy()
    empty = np.empty(0, dtype=np.int64)
    return ptr, empty, empty.copy(), empty.copy()


def build_session(g: MultilayerStreamGraph, t_max: int) -> _Session:
    nodes = tuple(sorted(g.nodes, key=node_sort_key))
    layers = g.layers
    nls = g.node_layers
    node_index = {n: i for i, n in enumerate(nodes)}
    layer_index = {l: i for i, l in enumerate(layers)}
    nl_index = {nl: i for i, nl in enumerate(nls)}
    usable = [(i, l) for i, l in enumerate(g.links) if l.time.start <= t_max]
    m = len(usable)
    rec_ids = tuple(i for i, _ in usable)
    rec_s = np.empty(m, dtype=np.int64)
    rec_e = np.empty(m, dtype=np.int64)
    rec_la = np.empty(m, dtype=np.int64)
    rec_lb = np.empty(m, dtype=np.int64)
    rec_na = np.empty(m, dtype=np.int64)
    rec_nb = np.empty(m, dtype=np.int64)
    rec_nl_a = np.empty(m, dtype=np.int64)
    rec_nl_b = np.empty(m, dtype=np.int64)
    nl_entries: List[List[Tuple[int, int, int]]] = [[] for _ in nls]
    node_entries: List[List[Tuple[int, int, int]]] = [[] for _ in nodes]
    for r, (_, link) in enumerate(usable):
        ia, ib = nl_index[link.a], nl_index[link.b]
        rec_s[r] = link.time.start
        rec_e[r] = link.time.end
        rec_nl_a[r] = ia
        rec_nl_b[r] = ib
        rec_la[r] = layer_index[link.a[1]]
        rec_lb[r] = layer_index[link.b[1]]
        rec_na[r] = node_index[link.a[0]]
        rec_nb[r] = node_index[link.b[0]]
        end = link.time.end
        nl_entries[ia].append((end, r, ib))
        nl_entries[ib].append((end, r, ia))
        node_entries[node_index[link.a[0]]].append((end, r, ib))
        node_entries[node_index[link.b[0]]].append((end, r, ia))
    inc_ptr, inc_rec, inc_other, inc_end = _csr(nl_entries)
    node_ptr, node_rec, node_other, node_end = _csr(node_entries)
    return _Session(nodes, layers, nls, node_index, layer_index, nl_index,
                    rec_ids, rec_s, rec_e, rec_la, rec_lb, rec_na, rec_nb,
                    rec_nl_a, rec_nl_b, inc_ptr, inc_rec, inc_other, inc_end,
                    node_ptr, node_rec, node_other, node_end, t_max)


def sample_walk(g: MultilayerStreamGraph, start: Tuple[int, Node],
                policy: WalkPolicy, walk_index: int = 0) -> TemporalPath:
    """One replayable walk from (time, node); may be empty."""
    t0, node = start
    if node not in g.nodes:
        raise UnknownNode(f"unknown node {node!r}")
    t_max = policy.resolve_t_max(g)
    ses = build_session(g, t_max)
    n, hop_t, hop_rec, hop_from, hop_to = _kernels.trace_walk(
        ses.rec_s, ses.rec_e, ses.rec_nl_a, ses.rec_nl_b,
        ses.inc_ptr, ses.inc_rec, ses.inc_other, ses.inc_end,
        ses.node_ptr, ses.node_rec, ses.node_other, ses.node_end,
        ses.node_index[node], int(t0), policy.gamma, t_max,
        policy.max_hops, policy.seed, walk_index)
    hops = [PathHop(int(hop_t[i]), ses.nls[hop_from[i]], ses.nls[hop_to[i]])
            for i in range(n)]
    return TemporalPath(tuple(hops))


def _presence_arrays(g: MultilayerStreamGraph, nodes: Sequence[Node],
                     t_lo: int, t_max: int):
    window = TimeSet([(t_lo, t_max)], resolution=g.resolution)
    ptr = np.zeros(len(nodes) + 1, dtype=np.int64)
    all_s: List[np.ndarray] = []
    all_e: List[np.ndarray] = []
    cums: List[np.ndarray] = []
    totals = np.zeros(len(nodes), dtype=np.int64)
    count = 0
    for i, node in enumerate(nodes):
        pres = g.node_presence(node) & window
        s, e = pres.bounds_arrays
        lengths = e - s + 1  # start instants are sampled inclusively
        cum = np.zeros(len(s), dtype=np.int64)
        if len(s):
            np.cumsum(lengths[:-1], out=cum[1:])
            totals[i] = int(lengths.sum())
        all_s.append(s)
        all_e.append(e)
        cums.append(cum)
        count += len(s)
        ptr[i + 1] = count
    cat = lambda parts: (np.concatenate(parts) if count
                         else np.empty(0, dtype=np.int64))
    return ptr, cat(all_s), cat(all_e), cat(cums), totals


def layer_exposure(g: MultilayerStreamGraph, policy: WalkPolicy, *,
                   start_time: Optional[int] = None,
                   rows: Optional[Sequence[Node]] = None) -> ExposureMatrix:
    """Monte-Carlo per-layer exposure, one row per start node.

    Start times are sampled uniformly over each node's presence instants
    (clipped to the horizon), or fixed at ``start_time``. Indicator
    weighting estimates the probability that a walk from the node crosses
    each layer; linear-horizon weighting accumulates ``t_max - hop time``
    per crossed layer and renormalizes rows to sum to one.
    """
    t_max = policy.resolve_t_max(g)
    ses = build_session(g, t_max)
    if rows is None:
        row_nodes = ses.nodes
    else:
        for u in rows:
            if u not in g.nodes:
                raise UnknownNode(f"unknown node {u!r}")
        row_nodes = tuple(rows)
    row_node = np.asarray([ses.node_index[u] for u in row_nodes],
                          dtype=np.int64)
    if start_time is not None:
        if start_time not in g.study_set:
            raise OutOfStudyInterval(
                f"start time {start_time} outside the study interval")
        use_fixed = 1
        fixed = np.full(len(row_nodes), int(start_time), dtype=np.int64)
        ptr = np.zeros(len(row_nodes) + 1, dtype=np.int64)
        empty = np.empty(0, dtype=np.int64)
        pres = (ptr, empty, empty, empty,
                np.zeros(len(row_nodes), dtype=np.int64))
        scheme = f"fixed t0={start_time}"
    else:
        use_fixed = 0
        fixed = np.zeros(len(row_nodes), dtype=np.int64)
        pres = _presence_arrays(g, row_nodes, g.study_interval.start, t_max)
        scheme = "uniform over presence"
    ptr, ps, pe, pcum, totals = pres
    touched, linear = _kernels.simulate_exposure(
        ses.rec_s, ses.rec_e, ses.rec_la, ses.rec_lb,
        ses.inc_ptr, ses.inc_rec, ses.inc_other, ses.inc_end,
        ses.node_ptr, ses.node_rec, ses.node_other, ses.node_end,
        row_node, use_fixed, fixed, ptr, ps, pe, pcum, totals,
        policy.gamma, t_max, policy.num_walks, policy.seed,
        policy.max_hops, len(ses.layers))
    if policy.exposure_weighting is Weighting.INDICATOR:
        values = touched / policy.num_walks
    else:
        mean = linear / policy.num_walks
        sums = mean.sum(axis=1, keepdims=True)
        values = np.divide(mean, sums, out=np.zeros_like(mean),
                           where=sums > 0)
    return ExposureMatrix(rows=row_nodes, layers=ses.layers, values=values,
                          policy=policy, start_scheme=scheme)


def layer_coverage(g: MultilayerStreamGraph,
                   policy: WalkPolicy) -> Dict[Layer, float]:
    """Relative per-layer coverage by walkers started uniformly at random.

    Each walk starts at a uniform (node, instant) pair with instants drawn
    from [start of T, t_max]; a layer is credited with the distinct nodes
    the walker touches through that layer's links. Results are normalized
    to sum to one across layers.
    """
    t_max = policy.resolve_t_max(g)
    ses = build_session(g, t_max)
    if not ses.nodes:
        return {}
    counts = _kernels.simulate_coverage(
        ses.rec_s, ses.rec_e, ses.rec_la, ses.rec_lb, ses.rec_na, ses.rec_nb,
        ses.inc_ptr, ses.inc_rec, ses.inc_other, ses.inc_end,
        ses.node_ptr, ses.node_rec, ses.node_other, ses.node_end,
        len(ses.nodes), g.study_interval.start, t_max,
        policy.gamma, t_max, policy.num_walks, policy.seed,
        policy.max_hops, len(ses.layers))
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total > 0:
        counts = counts / total
    return {layer: float(counts[i]) for i, layer in enumerate(ses.layers)}


def direct_exposure(g: MultilayerStreamGraph, *,
                    t0: Optional[int] = None,
                    t_max: Optional[int] = None) -> ExposureMatrix:
    """Deterministic exposure variant: no walks, just incident records.

    For each node and layer, sums ``t_max - record time`` over the node's
    incident records involving the layer, where a record's time is its
    start clipped below by ``t0``. Rows are normalized to sum to one.
    """
    t0 = g.study_interval.start if t0 is None else int(t0)
    t_max = g.study_interval.end if t_max is None else int(t_max)
    nodes = tuple(sorted(g.nodes, key=node_sort_key))
    layers = g.layers
    layer_index = {l: i for i, l in enumerate(layers)}
    node_index = {n: i for i, n in enumerate(nodes)}
    values = np.zeros((len(nodes), len(layers)))
    for link in g.links:
        t = max(link.time.start, t0)
        if t > t_max:
            continue
        w = t_max - t
        for node in set(link.nodes):
            r = node_index[node]
            for layer in set(link.layers):
                values[r, layer_index[layer]] += w
    sums = values.sum(axis=1, keepdims=True)
    values = np.divide(values, sums, out=np.zeros_like(values),
                       where=sums > 0)
    return ExposureMatrix(rows=nodes, layers=layers, values=values,
                          policy=None, start_scheme=f"direct t0={t0}")
