"""Scalar measures: link counts, degrees, and the density family.

Densities are computed as exact integer cell counts (numerator, denominator)
followed by a single float division, so equal inputs at different tick
scales produce bit-identical values. Empty denominators yield 0.0 with the
``empty_denominator`` flag set instead of raising: windowed pipelines
routinely hit idle stretches.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _kernels
from .errors import UnknownLayer, ZeroStudyInterval
from .model import Layer, MultilayerStreamGraph, Node, TemporalLink
from .projections import (MultilayerGraph, StaticGraph, StreamGraph,
                          interlayer_stream)
from .timesets import TimeInterval, TimeSet, _as_interval


class DenominatorMode(enum.Enum):
    """Which node-layer pairs the multilayer density averages over."""

    ALL_PAIRS = "all-pairs"
    INTRALAYER_PAIRS = "intralayer-pairs"
    LINKED_LAYER_PAIRS = "linked-layer-pairs"


@dataclass(frozen=True)
class DensityResult:
    """A density with its exact integer numerator and denominator."""

    value: float
    numerator: int
    denominator: int
    empty_denominator: bool = False

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class DegreeReport:
    """Both degree readings for one node or node-layer."""

    subject: object
    count_degree: int
    duration_degree: float


def layer_label(layer: Layer) -> str:
    return "|".join(layer)


@dataclass(frozen=True)
class DensityMatrix:
    """Symmetric matrix of pairwise interlayer densities."""

    layers: Tuple[Layer, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def entry(self, alpha, beta) -> float:
        try:
            i = self.layers.index(tuple(alpha))
            j = self.layers.index(tuple(beta))
        except ValueError:
            raise UnknownLayer(f"layer not in matrix: {alpha!r} / {beta!r}")
        return float(self.values[i, j])

    def write_csv(self, fp, transform=None) -> None:
        """Write the matrix with a layer-name header row and column.

        ``transform`` maps each value to its printed form; the default
        prints 12 significant digits.
        """
        if transform is None:
            transform = lambda x: format(x, ".12g")
        writer = csv.writer(fp)
        names = [layer_label(l) for l in self.layers]
        writer.writerow(["layer"] + names)
        for name, row in zip(names, self.values):
            writer.writerow([name] + [transform(v) for v in row])

    def write_log_csv(self, fp) -> None:
        """|log10| variant; zero densities print as the sentinel "inf"."""

        def log_mag(x):
            if x == 0:
                return "inf"
            return format(abs(math.log10(x)), ".12g")

        self.write_csv(fp, transform=log_mag)


# --- link counts and degrees -------------------------------------------------


def _span_cells(T) -> int:
    if isinstance(T, TimeSet):
        return T.measure()
    iv = _as_interval(T)
    return iv.length


def _link_intervals(links) -> List[TimeInterval]:
    out = []
    for item in links:
        out.append(item.time if isinstance(item, TemporalLink)
                   else _as_interval(item))
    return out


def number_of_links(links, T) -> float:
    """Total link duration divided by the study-interval length.

    Sums per-record durations (instantaneous records contribute 0); pass a
    TimeInterval or a TimeSet as ``T``.
    """
    span = _span_cells(T)
    if span <= 0:
        raise ZeroStudyInterval(
            "number_of_links needs a study interval of positive measure")
    total = sum(iv.length for iv in _link_intervals(links))
    return total / span


def degree(g: MultilayerStreamGraph, node: Node) -> DegreeReport:
    """d(u): link records touching the node on any layer."""
    incident = g.links_of_node(node)
    return DegreeReport(
        subject=node,
        count_degree=len(incident),
        duration_degree=number_of_links(incident, g.study_interval))


def degree_node_layer(g: MultilayerStreamGraph, nl) -> DegreeReport:
    """d(u, α): link records touching one node-layer."""
    incident = g.links_of_node_layer(nl)
    nl = (nl[0], tuple(nl[1]))
    return DegreeReport(
        subject=nl,
        count_degree=len(incident),
        duration_degree=number_of_links(incident, g.study_interval))


# --- densities ---------------------------------------------------------------


def _ratio(numerator: int, denominator: int) -> DensityResult:
    if denominator == 0:
        return DensityResult(0.0, numerator, 0, empty_denominator=True)
    return DensityResult(numerator / denominator, numerator, denominator)


def density_graph(G: Union[MultilayerGraph, StaticGraph]) -> DensityResult:
    """δ(G) = 2|E| / (|V|(|V|-1)) over the graph's vertex set."""
    n = G.vertex_count
    m = G.edge_count
    return _ratio(m, n * (n - 1) // 2)


def _pair_overlap_sum(presence: Dict, pairs: Iterable[Tuple]) -> int:
    """Σ measure(presence[a] ∩ presence[b]) via the pairwise kernel."""
    keys = list(presence)
    index = {k: i for i, k in enumerate(keys)}
    sizes = [len(presence[k]) for k in keys]
    offsets = np.zeros(len(keys) + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    flat_s = np.empty(int(offsets[-1]), dtype=np.int64)
    flat_e = np.empty(int(offsets[-1]), dtype=np.int64)
    for i, k in enumerate(keys):
        s, e = presence[k].bounds_arrays
        flat_s[offsets[i]:offsets[i + 1]] = s
        flat_e[offsets[i]:offsets[i + 1]] = e
    left = []
    right = []
    for a, b in pairs:
        left.append(index[a])
        right.append(index[b])
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    return int(_kernels.pair_overlap_total(flat_s, flat_e, offsets,
                                           left, right))


def density_stream(S: StreamGraph) -> DensityResult:
    """Probability that a random (pair, instant) carries a link.

    The numerator counts link cells; the denominator counts co-presence
    cells over the stream's distinct vertex pairs (cross-side pairs for a
    bipartite interlayer stream).
    """
    num = sum(t.measure() for t in S.links.values())
    den = _pair_overlap_sum(dict(S.presence), S.distinct_pairs())
    return _ratio(num, den)


def _nl_pairs(g: MultilayerStreamGraph,
              mode: DenominatorMode):
    nls = list(g.node_layers)
    if mode is DenominatorMode.LINKED_LAYER_PAIRS:
        linked = {frozenset(l.layers) for l in g.links}
    for i in range(len(nls)):
        for j in range(i + 1, len(nls)):
            a, b = nls[i], nls[j]
            if mode is DenominatorMode.INTRALAYER_PAIRS \
                    and a[1] != b[1]:
                continue
            if mode is DenominatorMode.LINKED_LAYER_PAIRS \
                    and frozenset((a[1], b[1])) not in linked:
                continue
            yield a, b


def density_mls(g: MultilayerStreamGraph,
                mode: DenominatorMode = DenominatorMode.ALL_PAIRS
                ) -> DensityResult:
    """Multilayer stream density over node-layer pairs.

    ``mode`` selects the pair family in the denominator; the numerator is
    restricted to the same family so the result stays a probability.
    """
    num = 0
    for pair, records in g._pair_links.items():
        a, b = pair
        if mode is DenominatorMode.INTRALAYER_PAIRS and a[1] != b[1]:
            continue
        times = TimeSet([l.time for l in records], resolution=g.resolution)
        num += times.measure()
    den = _pair_overlap_sum(dict(g.node_layer_presence), _nl_pairs(g, mode))
    return _ratio(num, den)


def interlayer_density(g: MultilayerStreamGraph, alpha, beta) -> DensityResult:
    """δ(S_M(α, β)): density of the (bipartite) interlayer stream."""
    return density_stream(interlayer_stream(g, alpha, beta))


def density_matrix(g: MultilayerStreamGraph,
                   layers: Optional[Sequence[Layer]] = None) -> DensityMatrix:
    """Δ: all pairwise interlayer densities, diagonal intralayer."""
    if layers is None:
        layers = g.layers
    layers = tuple(tuple(l) for l in layers)
    k = len(layers)
    values = np.zeros((k, k))
    for i in range(k):
        for j in range(i, k):
            d = interlayer_density(g, layers[i], layers[j]).value
            values[i, j] = d
            values[j, i] = d
    return DensityMatrix(layers, values)
