"""Time-respecting paths and γ-reachability.

A path is a chained sequence of hops (time, source node-layer, target
node-layer). With traversal cost γ, consecutive hop times must satisfy
``t_next >= t_prev + γ``; γ = 0 recovers the plain definition.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Tuple

from .errors import UnknownNodeLayer
from .model import (MultilayerStreamGraph, NodeLayer, nl_sort_key,
                    _as_node_layer)


class PathHop(NamedTuple):
    time: int
    source: NodeLayer
    target: NodeLayer


@dataclass(frozen=True)
class TemporalPath:
    """An ordered hop sequence; chaining and time order are enforced."""

    hops: Tuple[PathHop, ...]

    def __post_init__(self):
        hops = tuple(
            PathHop(int(t), _as_node_layer(s), _as_node_layer(d))
            for t, s, d in self.hops)
        for prev, nxt in zip(hops, hops[1:]):
            if prev.target != nxt.source:
                raise ValueError(
                    f"hops do not chain: {prev.target} -> {nxt.source}")
            if nxt.time < prev.time:
                raise ValueError(
                    f"hop times decrease: {prev.time} -> {nxt.time}")
        object.__setattr__(self, "hops", hops)

    def __len__(self) -> int:
        return len(self.hops)

    def __iter__(self):
        return iter(self.hops)

    def __bool__(self) -> bool:
        return bool(self.hops)

    @property
    def start(self) -> NodeLayer:
        return self.hops[0].source

    @property
    def end(self) -> NodeLayer:
        return self.hops[-1].target

    @property
    def times(self) -> Tuple[int, ...]:
        return tuple(h.time for h in self.hops)


def _covering_records(g: MultilayerStreamGraph, source, target):
    a, b = _as_node_layer(source), _as_node_layer(target)
    if nl_sort_key(b) < nl_sort_key(a):
        a, b = b, a
    return g._pair_links.get((a, b), ())


def is_valid_path(g: MultilayerStreamGraph, path: TemporalPath,
                  gamma: int = 0) -> bool:
    """True iff every hop rides a link record at its time and γ holds."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if not path:
        raise ValueError("is_valid_path needs a non-empty path")
    for prev, nxt in zip(path.hops, path.hops[1:]):
        if nxt.time < prev.time + gamma:
            return False
    for hop in path.hops:
        records = _covering_records(g, hop.source, hop.target)
        if not any(l.time.start <= hop.time <= l.time.end for l in records):
            return False
    return True


def reachable(g: MultilayerStreamGraph, source: Tuple, target: Tuple,
              gamma: int = 0) -> bool:
    """Whether a γ-path runs from (t, node-layer) to (t', node-layer).

    Hop times are confined to [t, t']; the empty path makes any point
    reachable from itself. Earliest-arrival search: hopping a record at
    the earliest usable instant never hurts.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    t0, src = source
    t1, dst = target
    src = _as_node_layer(src)
    dst = _as_node_layer(dst)
    for nl in (src, dst):
        if nl not in g.node_layer_presence:
            raise UnknownNodeLayer(f"unknown node-layer {nl!r}")
    if t0 > t1:
        raise ValueError(f"source time {t0} exceeds target time {t1}")
    if src == dst:
        return True

    incidence: Dict[NodeLayer, List[Tuple[int, int, NodeLayer]]] = {}
    for link in g.links:
        if link.time.start > t1:
            continue
        incidence.setdefault(link.a, []).append(
            (link.time.start, link.time.end, link.b))
        incidence.setdefault(link.b, []).append(
            (link.time.start, link.time.end, link.a))

    best = {src: t0}
    heap = [(t0, nl_sort_key(src), src)]
    while heap:
        ready, _, nl = heapq.heappop(heap)
        if ready > best.get(nl, ready):
            continue
        for s, e, other in incidence.get(nl, ()):
            if e < ready:
                continue
            hop_t = max(s, ready)
            if hop_t > t1:
                continue
            if other == dst:
                return True
            nxt = hop_t + gamma
            if nxt < best.get(other, t1 + 1):
                best[other] = nxt
                heapq.heappush(heap, (nxt, nl_sort_key(other), other))
    return False
