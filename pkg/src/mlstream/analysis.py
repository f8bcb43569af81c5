"""Analysis pipelines composed from the core operations.

Three ready-made studies: per-window density series over a two-valued
aspect (e.g. gender, day by day), the pairwise density matrix over one
aspect's layers (e.g. school classes), and the rank agreement between
random-walker coverage and the covariance layer centrality.
"""
from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .centrality import (DEFAULT_MAX_ITER, DEFAULT_TOL, CentralityReport,
                         centrality_from_exposures)
from .errors import FewerThanTwoLayers, MissingAspect, UnknownLayer
from .measures import (DensityMatrix, DensityResult, density_graph,
                       density_matrix, interlayer_density, layer_label)
from .model import (Aspect, GraphBuilder, Layer, MultilayerStreamGraph,
                    nl_sort_key)
from .timesets import TimeInterval
from .projections import (collapse_aspects, induced_multilayer,
                          restrict_window)
from .walks import (ExposureMatrix, WalkPolicy, direct_exposure,
                    layer_coverage, layer_exposure)


def _aspect(g: MultilayerStreamGraph, name: str) -> Aspect:
    for aspect in g.aspects:
        if aspect.name == name:
            return aspect
    raise MissingAspect(
        f"graph has no aspect named {name!r} "
        f"(has: {', '.join(a.name for a in g.aspects)})")


def select_coordinate(g: MultilayerStreamGraph, aspect_name: str,
                      values) -> MultilayerStreamGraph:
    """The sub-stream keeping only layers whose coordinate is in ``values``.

    Links survive only if both endpoints remain; the node roster, aspects,
    and study interval are unchanged.
    """
    aspect = _aspect(g, aspect_name)
    pos = [a.name for a in g.aspects].index(aspect_name)
    wanted = set(values)
    unknown = wanted - set(aspect.elementary_layers)
    if unknown:
        raise UnknownLayer(
            f"aspect {aspect_name!r} has no value(s) {sorted(unknown)!r}")

    def keep(layer: Layer) -> bool:
        return layer[pos] in wanted

    b = GraphBuilder(g.study_interval, g.aspects, resolution=g.resolution)
    for node in sorted(g.nodes, key=repr):
        b.add_node(node)
    for layer, times in sorted(g.layer_presence.items()):
        if keep(layer) and times:
            b.declare_layer_presence(layer, times)
    for nl, times in sorted(g.node_layer_presence.items(),
                            key=lambda kv: nl_sort_key(kv[0])):
        if keep(nl[1]) and times:
            b.declare_node_layer(nl, times)
    for link in g.links:
        if keep(link.a[1]) and keep(link.b[1]):
            b.add_link(link.time, link.a, link.b)
    return b.finish()


def time_windows(g: MultilayerStreamGraph, duration: int,
                 origin: Optional[int] = None) -> Tuple[TimeInterval, ...]:
    """Consecutive ``duration``-tick windows covering the study interval.

    Windows sit on the grid ``origin + k * duration`` (default origin: the
    study start) and are clipped to the study interval; empty cells are
    skipped.
    """
    if duration < 1:
        raise ValueError("window duration must be >= 1 tick")
    T = g.study_interval
    if origin is None:
        origin = T.start
    first = (T.start - origin) // duration
    out = []
    k = first
    while origin + k * duration <= T.end:
        lo = max(origin + k * duration, T.start)
        hi = min(origin + (k + 1) * duration - 1, T.end)
        if lo <= hi:
            out.append(TimeInterval(lo, hi))
        k += 1
    return tuple(out)


# --- densities window by window ----------------------------------------------


@dataclass(frozen=True)
class DensitySeriesRow:
    """Intra/inter/global densities of one time window."""

    window_index: int
    start: int
    end: int
    intra_a: DensityResult
    intra_b: DensityResult
    inter: DensityResult
    overall: DensityResult  # graph density, layers and time discarded

    @property
    def empty_columns(self) -> Tuple[str, ...]:
        flags = []
        for name, value in (("intra_a", self.intra_a),
                            ("intra_b", self.intra_b),
                            ("inter", self.inter),
                            ("global", self.overall)):
            if value.empty_denominator:
                flags.append(name)
        return tuple(flags)


@dataclass(frozen=True)
class DensitySeries:
    """Density dynamics of a two-valued aspect, one row per window."""

    aspect: str
    values: Tuple[str, str]
    rows: Tuple[DensitySeriesRow, ...]

    def write_csv(self, fp) -> None:
        writer = csv.writer(fp)
        a, b = self.values
        writer.writerow(["window", "start", "end", f"intra_{a}",
                         f"intra_{b}", f"inter_{a}{b}", "global",
                         "empty_denominators"])
        for row in self.rows:
            writer.writerow([
                row.window_index, row.start, row.end,
                format(row.intra_a.value, ".12g"),
                format(row.intra_b.value, ".12g"),
                format(row.inter.value, ".12g"),
                format(row.overall.value, ".12g"),
                ";".join(row.empty_columns)])


def _empty_density() -> DensityResult:
    return DensityResult(0.0, 0, 0, empty_denominator=True)


def density_dynamics(g: MultilayerStreamGraph, aspect_name: str,
                     window: int,
                     origin: Optional[int] = None) -> DensitySeries:
    """Per-window intra-, inter-, and global densities of a 2-valued aspect.

    Each window of the stream is collapsed onto ``aspect_name`` (other
    aspects merge); the row reports the two intralayer densities, the
    interlayer density, and the plain graph density with both layer and
    time structure discarded. Windows without the needed presence carry
    empty-denominator flags instead of values.
    """
    aspect = _aspect(g, aspect_name)
    if len(aspect.elementary_layers) != 2:
        raise ValueError(
            f"density dynamics needs a two-valued aspect; "
            f"{aspect_name!r} has {len(aspect.elementary_layers)} values")
    va, vb = aspect.elementary_layers
    rows = []
    for i, win in enumerate(time_windows(g, window, origin)):
        w = restrict_window(g, (win.start, win.end))
        coll = collapse_aspects(w, [aspect_name])

        def dens(x: Layer, y: Layer) -> DensityResult:
            try:
                return interlayer_density(coll, x, y)
            except UnknownLayer:
                return _empty_density()

        overall = density_graph(
            induced_multilayer(w, (win.start, win.end)).collapse_nodes())
        rows.append(DensitySeriesRow(
            window_index=i, start=win.start, end=win.end,
            intra_a=dens((va,), (va,)), intra_b=dens((vb,), (vb,)),
            inter=dens((va,), (vb,)), overall=overall))
    return DensitySeries(aspect=aspect_name, values=(va, vb),
                         rows=tuple(rows))


def aspect_density_matrix(g: MultilayerStreamGraph,
                          aspect_name: str) -> DensityMatrix:
    """Pairwise density matrix over one aspect's layers (others merged)."""
    aspect = _aspect(g, aspect_name)
    coll = collapse_aspects(g, [aspect_name])
    layers = tuple((v,) for v in sorted(aspect.elementary_layers)
                   if (v,) in coll.layer_presence)
    return density_matrix(coll, layers)


# --- rank agreement: walker coverage vs covariance centrality ----------------


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks, rank 1 for the largest value; ties get the mean rank."""
    vals = np.asarray(values, dtype=float)
    order = sorted(range(len(vals)), key=lambda i: (-vals[i], i))
    ranks = np.zeros(len(vals))
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and vals[order[j + 1]] == vals[order[i]]:
            j += 1
        for t in range(i, j + 1):
            ranks[order[t]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman_rho(a: Sequence[float], b: Sequence[float]) -> float:
    """Spearman correlation with average-rank ties (nan if either side is
    all ties)."""
    ra = average_ranks(a)
    rb = average_ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = float(np.linalg.norm(ra) * np.linalg.norm(rb))
    if denom == 0.0:
        return float("nan")
    return float(ra @ rb / denom)


@dataclass(frozen=True)
class RankComparison:
    """Per-layer coverage and centrality with their ranks and agreement."""

    layers: Tuple[Layer, ...]
    coverage: Tuple[float, ...]
    centrality: Tuple[float, ...]
    coverage_rank: Tuple[float, ...]
    centrality_rank: Tuple[float, ...]
    spearman: float
    report: CentralityReport

    def write_csv(self, fp) -> None:
        writer = csv.writer(fp)
        writer.writerow(["layer", "coverage", "centrality",
                         "coverage_rank", "centrality_rank"])
        order = sorted(range(len(self.layers)),
                       key=lambda i: (self.coverage_rank[i],
                                      layer_label(self.layers[i])))
        for i in order:
            writer.writerow([
                layer_label(self.layers[i]),
                format(self.coverage[i], ".12g"),
                format(self.centrality[i], ".12g"),
                format(self.coverage_rank[i], ".12g"),
                format(self.centrality_rank[i], ".12g")])

    def summary(self) -> dict:
        return {"layers": len(self.layers),
                "spearman": self.spearman,
                "dominant_eigenvalue": self.report.dominant_eigenvalue,
                "degenerate": self.report.degenerate}


def rank_comparison(g: MultilayerStreamGraph, policy: WalkPolicy, *,
                    seeds: Optional[Sequence[int]] = None,
                    exposure_source: str = "walks",
                    tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> RankComparison:
    """Walker coverage rank against covariance centrality rank, per layer.

    The centrality side ranks layers by the dominant eigenvector of the
    exposure covariance; with ``seeds`` given, walk exposures are averaged
    entrywise over one run per seed. ``exposure_source="direct"`` swaps the
    simulated exposures for the closed-form per-record weighting
    sum(t_max - t). The coverage side always simulates walkers under
    ``policy``.
    """
    layers = g.layers
    if len(layers) < 2:
        raise FewerThanTwoLayers(
            f"rank comparison needs >= 2 layers, got {len(layers)}")

    cov_by_layer = layer_coverage(g, policy)
    coverage = np.array([cov_by_layer[l] for l in layers])

    if exposure_source == "direct":
        x = direct_exposure(g, t_max=policy.t_max)
    elif exposure_source == "walks":
        run_seeds = tuple(seeds) if seeds else (policy.seed,)
        mats = []
        last = None
        for s in run_seeds:
            last = layer_exposure(g, dataclasses.replace(policy, seed=s))
            mats.append(last.values)
        scheme = last.start_scheme
        if len(run_seeds) > 1:
            scheme += f", mean of {len(run_seeds)} seeds"
        x = ExposureMatrix(rows=last.rows, layers=last.layers,
                           values=np.mean(mats, axis=0), policy=policy,
                           start_scheme=scheme)
    else:
        raise ValueError(
            f"exposure_source must be 'walks' or 'direct', "
            f"got {exposure_source!r}")

    report = centrality_from_exposures(x, tol=tol, max_iter=max_iter)
    centrality = np.array([report.score(l) for l in layers])
    return RankComparison(
        layers=tuple(layers),
        coverage=tuple(float(v) for v in coverage),
        centrality=tuple(float(v) for v in centrality),
        coverage_rank=tuple(float(v) for v in average_ranks(coverage)),
        centrality_rank=tuple(float(v) for v in average_ranks(centrality)),
        spearman=spearman_rho(coverage, centrality),
        report=report)
