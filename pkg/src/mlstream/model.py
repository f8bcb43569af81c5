"""The multilayer stream graph: nodes and layered presence over time.

A graph is the tuple (T, V, aspects, layer presence, node-layer presence,
links) with two closure invariants: a link may only exist while both of its
node-layers are present, and a node-layer may only be present while its
layer exists. Graphs are immutable; :class:`GraphBuilder` accumulates state
and enforces (Strict) or materializes (AutoMaterialize) the closure chain.

Nodes are ints or strings. A layer is a tuple with one elementary-layer
name per aspect, e.g. ``("face2face", "F", "PC")``; a node-layer is a
``(node, layer)`` pair.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Tuple, Union

from .errors import (ClosureViolation, IntralayerOnlyViolation,
                     OutOfStudyInterval, UnknownAspectCoordinate,
                     UnknownLayer, UnknownNode, UnknownNodeLayer)
from .timesets import IntervalLike, TimeInterval, TimeSet, _as_interval, union_all

Node = Union[int, str]
Layer = Tuple[str, ...]
NodeLayer = Tuple[Node, Layer]


def node_sort_key(node: Node):
    """Total order over mixed int/str node identifiers."""
    if isinstance(node, str):
        return (1, 0, node)
    return (0, int(node), "")


def nl_sort_key(nl: NodeLayer):
    return (node_sort_key(nl[0]), nl[1])


def _as_node_layer(value) -> NodeLayer:
    node, layer = value
    if not isinstance(node, (int, str)):
        raise TypeError(f"node must be int or str, got {type(node).__name__}")
    return (node, tuple(layer))


@dataclass(frozen=True)
class Aspect:
    """One dimension of layer structure: a named set of elementary layers."""

    name: str
    elementary_layers: Tuple[str, ...]

    def __post_init__(self):
        layers = tuple(self.elementary_layers)
        object.__setattr__(self, "elementary_layers", layers)
        if not layers:
            raise ValueError(f"aspect {self.name!r} has no elementary layers")
        if len(set(layers)) != len(layers):
            raise ValueError(
                f"aspect {self.name!r} has duplicate elementary layers")

    def __contains__(self, coordinate: object) -> bool:
        return coordinate in self.elementary_layers


@dataclass(frozen=True)
class TemporalLink:
    """An undirected interaction between two node-layers over an interval.

    Endpoints are stored in canonical order, so links constructed with
    swapped endpoints compare equal.
    """

    time: TimeInterval
    a: NodeLayer
    b: NodeLayer

    def __post_init__(self):
        time = _as_interval(self.time)
        a = _as_node_layer(self.a)
        b = _as_node_layer(self.b)
        if a == b:
            raise ValueError(f"link endpoints must differ, got {a} twice")
        if nl_sort_key(b) < nl_sort_key(a):
            a, b = b, a
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def pair(self) -> Tuple[NodeLayer, NodeLayer]:
        return (self.a, self.b)

    @property
    def nodes(self) -> Tuple[Node, ...]:
        return (self.a[0], self.b[0])

    @property
    def layers(self) -> Tuple[Layer, ...]:
        return (self.a[1], self.b[1])

    def is_intralayer(self) -> bool:
        return self.a[1] == self.b[1]

    def sort_key(self):
        return (self.time.start, self.time.end,
                nl_sort_key(self.a), nl_sort_key(self.b))


@dataclass(frozen=True)
class Violation:
    """One closure defect found by validate(); data, not an exception."""

    kind: str
    subject: object
    uncovered: TimeSet
    message: str

    def __str__(self) -> str:
        return self.message


class BuildMode(enum.Enum):
    STRICT = "strict"
    AUTO_MATERIALIZE = "auto_materialize"


@dataclass(frozen=True, eq=False)
class MultilayerStreamGraph:
    """Immutable multilayer stream graph; all queries are read-only."""

    study_interval: TimeInterval
    nodes: frozenset
    aspects: Tuple[Aspect, ...]
    layer_presence: Mapping[Layer, TimeSet]
    node_layer_presence: Mapping[NodeLayer, TimeSet]
    links: Tuple[TemporalLink, ...]
    resolution: int = 1
    intralayer_only: bool = False

    def __post_init__(self):
        object.__setattr__(self, "layer_presence",
                           MappingProxyType(dict(self.layer_presence)))
        object.__setattr__(self, "node_layer_presence",
                           MappingProxyType(dict(self.node_layer_presence)))

    # -- derived views --------------------------------------------------------

    @cached_property
    def study_set(self) -> TimeSet:
        return TimeSet([self.study_interval], resolution=self.resolution)

    @property
    def layers(self) -> Tuple[Layer, ...]:
        return tuple(sorted(self.layer_presence))

    @property
    def node_layers(self) -> Tuple[NodeLayer, ...]:
        return tuple(sorted(self.node_layer_presence, key=nl_sort_key))

    @cached_property
    def _node_to_layers(self) -> Mapping[Node, Tuple[Layer, ...]]:
        out: Dict[Node, List[Layer]] = {}
        for node, layer in self.node_layer_presence:
            out.setdefault(node, []).append(layer)
        return {n: tuple(sorted(ls)) for n, ls in out.items()}

    @cached_property
    def _pair_links(self) -> Mapping[Tuple[NodeLayer, NodeLayer],
                                    Tuple[TemporalLink, ...]]:
        out: Dict[Tuple[NodeLayer, NodeLayer], List[TemporalLink]] = {}
        for link in self.links:
            out.setdefault(link.pair, []).append(link)
        return {p: tuple(ls) for p, ls in out.items()}

    # -- presence queries -----------------------------------------------------

    def node_presence(self, node: Node) -> TimeSet:
        """T_u: union of the node's presence over all its layers."""
        if node not in self.nodes:
            raise UnknownNode(f"unknown node {node!r}")
        layers = self._node_to_layers.get(node, ())
        return union_all(
            [self.node_layer_presence[(node, layer)] for layer in layers],
            resolution=self.resolution)

    def link_presence(self, a, b) -> TimeSet:
        """Union of link intervals between two node-layers, either order."""
        a = _as_node_layer(a)
        b = _as_node_layer(b)
        for nl in (a, b):
            if nl not in self.node_layer_presence:
                raise UnknownNodeLayer(f"unknown node-layer {nl!r}")
        if nl_sort_key(b) < nl_sort_key(a):
            a, b = b, a
        records = self._pair_links.get((a, b), ())
        return TimeSet([l.time for l in records], resolution=self.resolution)

    def links_of_node(self, node: Node) -> Tuple[TemporalLink, ...]:
        if node not in self.nodes:
            raise UnknownNode(f"unknown node {node!r}")
        return tuple(l for l in self.links if node in l.nodes)

    def links_of_node_layer(self, nl) -> Tuple[TemporalLink, ...]:
        nl = _as_node_layer(nl)
        if nl not in self.node_layer_presence:
            raise UnknownNodeLayer(f"unknown node-layer {nl!r}")
        return tuple(l for l in self.links if nl in l.pair)

    def aspect_index(self, name: str) -> int:
        for i, aspect in enumerate(self.aspects):
            if aspect.name == name:
                return i
        raise UnknownLayer(f"no aspect named {name!r}")

    # -- validation -----------------------------------------------------------

    def validate(self) -> List[Violation]:
        """All closure/containment defects, in deterministic order."""
        out: List[Violation] = []
        study = self.study_set
        for layer, times in sorted(self.layer_presence.items()):
            extra = times.difference(study)
            if extra:
                out.append(Violation(
                    "layer_outside_study", layer, extra,
                    f"layer {layer!r} present outside the study interval "
                    f"at {extra!r}"))
        for nl in self.node_layers:
            times = self.node_layer_presence[nl]
            layer_times = self.layer_presence.get(nl[1])
            if layer_times is None:
                out.append(Violation(
                    "node_layer_without_layer", nl, times,
                    f"node-layer {nl!r} references an absent layer"))
                continue
            extra = times.difference(layer_times)
            if extra:
                out.append(Violation(
                    "node_layer_exceeds_layer", nl, extra,
                    f"node-layer {nl!r} present at {extra!r} while its "
                    f"layer is not"))
        for link in self.links:
            link_times = TimeSet([link.time], resolution=self.resolution)
            if not link_times.issubset(study):
                out.append(Violation(
                    "link_outside_study", link,
                    link_times.difference(study),
                    f"link {link!r} lies outside the study interval"))
            for nl in link.pair:
                presence = self.node_layer_presence.get(nl)
                if presence is None:
                    out.append(Violation(
                        "link_endpoint_missing", link, link_times,
                        f"link {link!r} uses undeclared node-layer {nl!r}"))
                    continue
                extra = link_times.difference(presence)
                if extra:
                    out.append(Violation(
                        "link_exceeds_node_layer", link, extra,
                        f"link {link!r} active at {extra!r} while "
                        f"{nl!r} is absent"))
        return out

    # -- equality -------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultilayerStreamGraph):
            return NotImplemented
        return (self.study_interval == other.study_interval
                and self.resolution == other.resolution
                and self.nodes == other.nodes
                and self.aspects == other.aspects
                and dict(self.layer_presence) == dict(other.layer_presence)
                and dict(self.node_layer_presence)
                == dict(other.node_layer_presence)
                and sorted(self.links, key=TemporalLink.sort_key)
                == sorted(other.links, key=TemporalLink.sort_key))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (f"MultilayerStreamGraph(T={list(self.study_interval)}, "
                f"|V|={len(self.nodes)}, |V_M|={len(self.node_layer_presence)}, "
                f"|E_M|={len(self.links)}, layers={len(self.layer_presence)})")


def validate(graph: MultilayerStreamGraph) -> List[Violation]:
    return graph.validate()


class GraphBuilder:
    """Single-owner accumulator for a MultilayerStreamGraph.

    Strict mode rejects a link unless declared presence already covers it;
    AutoMaterialize extends node-layer and layer presence so the closure
    invariants hold by construction. ``finish()`` normalizes every TimeSet,
    re-validates, and returns the immutable graph.
    """

    def __init__(self, study_interval: IntervalLike, aspects: Iterable[Aspect],
                 mode: BuildMode = BuildMode.AUTO_MATERIALIZE, *,
                 intralayer_only: bool = False, resolution: int = 1):
        self.study_interval = _as_interval(study_interval)
        self.aspects = tuple(aspects)
        if not self.aspects:
            raise ValueError("at least one aspect is required")
        self.mode = mode
        self.intralayer_only = intralayer_only
        self.resolution = int(resolution)
        self._study_set = TimeSet([self.study_interval],
                                  resolution=self.resolution)
        self._nodes: set = set()
        self._layer_declared: Dict[Layer, List[TimeInterval]] = {}
        self._layer_restricted: set = set()
        self._nl_pending: Dict[NodeLayer, List[TimeInterval]] = {}
        self._links: List[TemporalLink] = []
        self._finished = False

    # -- declarations ---------------------------------------------------------

    def check_layer(self, layer) -> Layer:
        layer = tuple(layer)
        if len(layer) != len(self.aspects):
            raise UnknownAspectCoordinate(
                f"layer {layer!r} has {len(layer)} coordinates; "
                f"expected {len(self.aspects)}")
        for coord, aspect in zip(layer, self.aspects):
            if coord not in aspect:
                raise UnknownAspectCoordinate(
                    f"{coord!r} is not an elementary layer of aspect "
                    f"{aspect.name!r}")
        return layer

    def _check_in_study(self, times: List[TimeInterval], what: str):
        for iv in times:
            if iv.start < self.study_interval.start \
                    or iv.end > self.study_interval.end:
                raise OutOfStudyInterval(
                    f"{what} interval [{iv.start}, {iv.end}] outside study "
                    f"interval [{self.study_interval.start}, "
                    f"{self.study_interval.end}]")

    @staticmethod
    def _as_interval_list(times) -> List[TimeInterval]:
        if isinstance(times, TimeSet):
            return list(times.intervals)
        if isinstance(times, (TimeInterval, tuple)) and len(times) == 2 \
                and not isinstance(times[0], (tuple, TimeInterval)):
            return [_as_interval(times)]
        return [_as_interval(p) for p in times]

    def add_node(self, node: Node) -> "GraphBuilder":
        """Register a node with no presence anywhere (isolated)."""
        if not isinstance(node, (int, str)):
            raise TypeError(f"node must be int or str, got {type(node).__name__}")
        self._nodes.add(node)
        return self

    def declare_layer_presence(self, layer, times) -> "GraphBuilder":
        """Restrict a layer's lifetime (default is the whole study interval)."""
        layer = self.check_layer(layer)
        ivs = self._as_interval_list(times)
        self._check_in_study(ivs, f"layer {layer!r}")
        self._layer_declared.setdefault(layer, []).extend(ivs)
        self._layer_restricted.add(layer)
        return self

    def declare_node_layer(self, node_layer, times) -> "GraphBuilder":
        node, layer = node_layer
        layer = self.check_layer(layer)
        nl = _as_node_layer((node, layer))
        ivs = self._as_interval_list(times)
        self._check_in_study(ivs, f"node-layer {nl!r}")
        if self.mode is BuildMode.STRICT and layer in self._layer_restricted:
            declared = TimeSet(self._layer_declared[layer],
                               resolution=self.resolution)
            asked = TimeSet(ivs, resolution=self.resolution)
            if not asked.issubset(declared):
                raise ClosureViolation(
                    f"node-layer {nl!r} presence "
                    f"{asked.difference(declared)!r} exceeds its layer's "
                    f"declared lifetime")
        self._nodes.add(nl[0])
        self._nl_pending.setdefault(nl, []).extend(ivs)
        return self

    def add_link(self, time, a=None, b=None) -> "GraphBuilder":
        """Add one link record: add_link(link) or add_link((s, e), a, b)."""
        if isinstance(time, TemporalLink):
            link = time
            link = TemporalLink(link.time, link.a, link.b)
        else:
            link = TemporalLink(_as_interval(time), _as_node_layer(a),
                                _as_node_layer(b))
        for nl in link.pair:
            self.check_layer(nl[1])
        if self.intralayer_only and not link.is_intralayer():
            raise IntralayerOnlyViolation(
                f"interlayer link {link!r} rejected: this graph is "
                f"declared intralayer-only")
        self._check_in_study([link.time], "link")
        if self.mode is BuildMode.STRICT:
            link_ts = TimeSet([link.time], resolution=self.resolution)
            for nl in link.pair:
                declared = TimeSet(self._nl_pending.get(nl, ()),
                                   resolution=self.resolution)
                if not link_ts.issubset(declared):
                    raise ClosureViolation(
                        f"link {link!r} not covered by declared presence "
                        f"of {nl!r} (missing "
                        f"{link_ts.difference(declared)!r})")
        else:
            for nl in link.pair:
                self._nodes.add(nl[0])
                self._nl_pending.setdefault(nl, []).append(link.time)
        self._links.append(link)
        return self

    def add_links(self, links) -> "GraphBuilder":
        for link in links:
            self.add_link(link)
        return self

    # -- assembly -------------------------------------------------------------

    def finish(self) -> MultilayerStreamGraph:
        if self._finished:
            raise RuntimeError("finish() called twice on one builder")
        self._finished = True
        res = self.resolution
        node_layer_presence = {
            nl: TimeSet(ivs, resolution=res)
            for nl, ivs in self._nl_pending.items()}
        layer_presence: Dict[Layer, TimeSet] = {
            layer: TimeSet(ivs, resolution=res)
            for layer, ivs in self._layer_declared.items()}
        full = self._study_set
        for nl, times in node_layer_presence.items():
            layer = nl[1]
            if layer not in layer_presence:
                layer_presence[layer] = full
            elif self.mode is BuildMode.AUTO_MATERIALIZE \
                    and layer in self._layer_restricted:
                layer_presence[layer] = layer_presence[layer] | times
        graph = MultilayerStreamGraph(
            study_interval=self.study_interval,
            nodes=frozenset(self._nodes),
            aspects=self.aspects,
            layer_presence=layer_presence,
            node_layer_presence=node_layer_presence,
            links=tuple(sorted(self._links, key=TemporalLink.sort_key)),
            resolution=res,
            intralayer_only=self.intralayer_only)
        problems = graph.validate()
        if problems:
            raise ClosureViolation(
                f"finish() found {len(problems)} violation(s); first: "
                f"{problems[0]}")
        return graph


def build(study_interval, aspects, mode=BuildMode.AUTO_MATERIALIZE,
          **kwargs) -> GraphBuilder:
    """Shorthand for :class:`GraphBuilder`."""
    return GraphBuilder(study_interval, aspects, mode, **kwargs)
