"""Reductions of a multilayer stream graph to simpler objects.

Static views (the multilayer graph induced by a time window, and its
node-level collapse), per-layer-pair stream graphs, the layer-blind
aggregated stream, plus window restriction and aspect collapsing used by
the analysis pipelines.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, FrozenSet, List, Mapping, Tuple

from .errors import OutOfStudyInterval, UnknownLayer
from .model import (GraphBuilder, Layer, MultilayerStreamGraph, Node,
                    NodeLayer, TemporalLink, nl_sort_key, node_sort_key)
from .timesets import TimeInterval, TimeSet, _as_interval, union_all


def _as_window(value, resolution: int) -> TimeSet:
    if isinstance(value, TimeSet):
        if value.resolution != resolution:
            raise ValueError("window resolution differs from graph resolution")
        return value
    return TimeSet([_as_interval(value)], resolution=resolution)


def _canonical_pair(a, b, key):
    return (a, b) if key(a) <= key(b) else (b, a)


@dataclass(frozen=True)
class StaticGraph:
    """A plain undirected graph: vertices plus unordered edges."""

    vertices: Tuple
    edges: FrozenSet

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class MultilayerGraph:
    """The static multilayer graph induced by a time window."""

    nodes: FrozenSet
    layers: Tuple[Layer, ...]
    node_layers: Tuple[NodeLayer, ...]
    edges: FrozenSet  # canonical (node-layer, node-layer) pairs
    empty_window: bool = False

    @property
    def vertex_count(self) -> int:
        return len(self.node_layers)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def collapse_nodes(self) -> StaticGraph:
        """Forget layers: vertices become nodes, parallel edges merge.

        Edges joining the same node on two layers would become self-loops
        and are dropped.
        """
        edges = set()
        for a, b in self.edges:
            if a[0] != b[0]:
                edges.add(_canonical_pair(a[0], b[0], node_sort_key))
        return StaticGraph(
            vertices=tuple(sorted(self.nodes, key=node_sort_key)),
            edges=frozenset(edges))


@dataclass(frozen=True, eq=False)
class StreamGraph:
    """A stream graph: nodes with presence sets and links over time.

    ``times`` is the stream's own T (a TimeSet: interlayer streams live on
    the co-presence of their two layers). ``links`` maps canonical vertex
    pairs to link TimeSets.
    """

    times: TimeSet
    nodes: Tuple
    presence: Mapping
    links: Mapping

    def __post_init__(self):
        object.__setattr__(self, "presence",
                           MappingProxyType(dict(self.presence)))
        object.__setattr__(self, "links", MappingProxyType(dict(self.links)))

    def __eq__(self, other):
        if not isinstance(other, StreamGraph):
            return NotImplemented
        return (self.times == other.times
                and set(self.nodes) == set(other.nodes)
                and dict(self.presence) == dict(other.presence)
                and dict(self.links) == dict(other.links))

    __hash__ = None  # type: ignore[assignment]

    def distinct_pairs(self):
        """Unordered distinct vertex pairs (the density denominator set)."""
        vs = list(self.nodes)
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                yield (vs[i], vs[j])


@dataclass(frozen=True, eq=False)
class BipartiteStreamGraph(StreamGraph):
    """Interlayer stream between two distinct layers.

    Vertices are node-layers split into the two sides; the density
    denominator ranges over cross-side pairs only.
    """

    side_a: Tuple = ()
    side_b: Tuple = ()
    layer_pair: Tuple[Layer, Layer] = ((), ())

    def distinct_pairs(self):
        for a in self.side_a:
            for b in self.side_b:
                yield (a, b)


# --- static projections ------------------------------------------------------


def induced_multilayer(g: MultilayerStreamGraph, window) -> MultilayerGraph:
    """The static multilayer graph of everything existing during ``window``.

    Membership is instant-based (closed semantics): presence touching the
    window at a single point counts. An empty window yields an empty graph
    with ``empty_window`` set.
    """
    tau = _as_window(window, g.resolution)
    if not tau:
        return MultilayerGraph(frozenset(), (), (), frozenset(),
                               empty_window=True)
    layers = tuple(sorted(
        layer for layer, times in g.layer_presence.items()
        if times & tau))
    node_layers = tuple(sorted(
        (nl for nl, times in g.node_layer_presence.items() if times & tau),
        key=nl_sort_key))
    edges = set()
    for link in g.links:
        if TimeSet([link.time], resolution=g.resolution) & tau:
            edges.add(link.pair)
    nodes = frozenset(nl[0] for nl in node_layers)
    return MultilayerGraph(nodes, layers, node_layers, frozenset(edges))


def snapshot(g: MultilayerStreamGraph, t: int) -> MultilayerGraph:
    """The multilayer graph at one instant."""
    if t not in g.study_set:
        raise OutOfStudyInterval(
            f"instant {t} outside study interval "
            f"[{g.study_interval.start}, {g.study_interval.end}]")
    return induced_multilayer(g, TimeSet.point(t, g.resolution))


# --- stream projections ------------------------------------------------------


def _check_layer(g: MultilayerStreamGraph, layer) -> Layer:
    layer = tuple(layer)
    if layer not in g.layer_presence:
        raise UnknownLayer(f"layer {layer!r} not present in graph")
    return layer


def interlayer_stream(g: MultilayerStreamGraph, alpha, beta) -> StreamGraph:
    """S^(α,β): interactions between two layers over their co-presence.

    For α ≠ β the result is bipartite with node-layer vertices; for α = β
    it is the ordinary intralayer stream.
    """
    alpha = _check_layer(g, alpha)
    beta = _check_layer(g, beta)
    times = g.layer_presence[alpha] & g.layer_presence[beta]
    wanted = {alpha, beta}

    def side(layer):
        out = []
        for nl in sorted(g.node_layer_presence, key=nl_sort_key):
            if nl[1] == layer:
                out.append(nl)
        return tuple(out)

    vertices_a = side(alpha)
    vertices_b = side(beta) if beta != alpha else vertices_a
    vertices = tuple(sorted(set(vertices_a) | set(vertices_b),
                            key=nl_sort_key))
    presence = {nl: g.node_layer_presence[nl] & times for nl in vertices}
    link_map: Dict[Tuple[NodeLayer, NodeLayer], List[TimeInterval]] = {}
    for link in g.links:
        if set(link.layers) != wanted:
            continue
        link_map.setdefault(link.pair, []).append(link.time)
    links = {}
    for pair, ivs in link_map.items():
        clipped = TimeSet(ivs, resolution=g.resolution) & times
        if clipped:
            links[pair] = clipped
    if alpha == beta:
        return StreamGraph(times, vertices, presence, links)
    return BipartiteStreamGraph(times, vertices, presence, links,
                                side_a=vertices_a, side_b=vertices_b,
                                layer_pair=(alpha, beta))


def intralayer_stream(g: MultilayerStreamGraph, alpha) -> StreamGraph:
    """S^α = S^(α,α)."""
    return interlayer_stream(g, alpha, alpha)


def aggregated_stream(g: MultilayerStreamGraph) -> StreamGraph:
    """The layer-blind stream: presence and links unioned across layers.

    Records joining one node to itself on two layers have no node-level
    counterpart and are excluded.
    """
    times = g.study_set
    nodes = tuple(sorted(g.nodes, key=node_sort_key))
    presence = {u: g.node_presence(u) for u in nodes}
    link_map: Dict[Tuple[Node, Node], List[TimeInterval]] = {}
    for link in g.links:
        u, v = link.nodes
        if u == v:
            continue
        pair = _canonical_pair(u, v, node_sort_key)
        link_map.setdefault(pair, []).append(link.time)
    links = {pair: TimeSet(ivs, resolution=g.resolution)
             for pair, ivs in link_map.items()}
    return StreamGraph(times, nodes, presence, links)


# --- graph-to-graph transforms ----------------------------------------------


def restrict_window(g: MultilayerStreamGraph,
                    window) -> MultilayerStreamGraph:
    """The multilayer stream graph induced by a sub-interval of T.

    Presence sets are intersected with the window and link records clipped
    to it; the result's study interval is the window (clipped to T).
    """
    w = _as_interval(window)
    lo = max(w.start, g.study_interval.start)
    hi = min(w.end, g.study_interval.end)
    if lo > hi:
        raise OutOfStudyInterval(
            f"window [{w.start}, {w.end}] does not meet the study interval")
    win = TimeSet([(lo, hi)], resolution=g.resolution)
    layer_presence = {layer: times & win
                      for layer, times in g.layer_presence.items()}
    node_layer_presence = {nl: times & win
                           for nl, times in g.node_layer_presence.items()}
    links = []
    for link in g.links:
        s = max(link.time.start, lo)
        e = min(link.time.end, hi)
        if s <= e:
            links.append(TemporalLink(TimeInterval(s, e), link.a, link.b))
    links.sort(key=TemporalLink.sort_key)
    return MultilayerStreamGraph(
        study_interval=TimeInterval(lo, hi),
        nodes=g.nodes,
        aspects=g.aspects,
        layer_presence=layer_presence,
        node_layer_presence=node_layer_presence,
        links=tuple(links),
        resolution=g.resolution,
        intralayer_only=g.intralayer_only)


def collapse_aspects(g: MultilayerStreamGraph,
                     keep) -> MultilayerStreamGraph:
    """Project layers onto a subset of aspects, merging what collides.

    ``keep`` lists aspect names to retain (original order is preserved).
    Presence sets of layers/node-layers that become identical are unioned.
    Links whose endpoints collide after projection (same node on two layers
    that merge) are dropped.
    """
    names = [a.name for a in g.aspects]
    keep = list(keep)
    for name in keep:
        if name not in names:
            raise UnknownLayer(f"no aspect named {name!r}")
    if not keep:
        raise ValueError(
            "keep must name at least one aspect; use aggregated_stream() "
            "to drop all layer structure")
    idxs = [i for i, name in enumerate(names) if name in keep]
    aspects = tuple(g.aspects[i] for i in idxs)

    def project(layer: Layer) -> Layer:
        return tuple(layer[i] for i in idxs)

    b = GraphBuilder(g.study_interval, aspects,
                     resolution=g.resolution)
    layer_acc: Dict[Layer, List[TimeSet]] = {}
    for layer, times in g.layer_presence.items():
        layer_acc.setdefault(project(layer), []).append(times)
    for layer, parts in sorted(layer_acc.items()):
        merged = union_all(parts, resolution=g.resolution)
        if merged:
            b.declare_layer_presence(layer, merged)
    nl_acc: Dict[NodeLayer, List[TimeSet]] = {}
    for (node, layer), times in g.node_layer_presence.items():
        nl_acc.setdefault((node, project(layer)), []).append(times)
    for nl, parts in sorted(nl_acc.items(), key=lambda kv: nl_sort_key(kv[0])):
        b.declare_node_layer(nl, union_all(parts, resolution=g.resolution))
    for link in g.links:
        a = (link.a[0], project(link.a[1]))
        bb = (link.b[0], project(link.b[1]))
        if a == bb:
            continue
        b.add_link(link.time, a, bb)
    return b.finish()
