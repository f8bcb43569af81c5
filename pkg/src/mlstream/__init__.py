"""mlstream: interval-exact temporal multilayer network analysis.

The package models interaction streams whose links live on layers (carrier,
gender, class, interaction type, ...), keeps every presence as an exact set
of integer intervals, and derives densities, temporal paths, walk-based
layer exposure and layer centralities from that single representation.

Typical entry points:

* :class:`GraphBuilder` / :func:`read_interchange` — build or load a graph
* :mod:`mlstream.datasets` — ingest contact-diary and flight-table CSVs
* :func:`density_mls`, :func:`density_matrix` — interval-exact densities
* :func:`layer_exposure`, :func:`superimposed_centrality` — walk statistics
* :mod:`mlstream.cli` — the ``mlstream`` command line front end
"""

__version__ = "0.1.0"

from .errors import MlsError
from .timesets import TimeInstant, TimeInterval, TimeSet, union_all
from .model import (
    Aspect,
    BuildMode,
    GraphBuilder,
    MultilayerStreamGraph,
    TemporalLink,
    Violation,
    build,
    validate,
)
from .projections import (
    BipartiteStreamGraph,
    MultilayerGraph,
    StaticGraph,
    StreamGraph,
    aggregated_stream,
    collapse_aspects,
    induced_multilayer,
    interlayer_stream,
    intralayer_stream,
    restrict_window,
    snapshot,
)
from .measures import (
    DegreeReport,
    DenominatorMode,
    DensityMatrix,
    DensityResult,
    degree,
    degree_node_layer,
    density_graph,
    density_matrix,
    density_mls,
    density_stream,
    interlayer_density,
    layer_label,
    number_of_links,
)
from .paths import PathHop, TemporalPath, is_valid_path, reachable
from .walks import (
    ExposureMatrix,
    Transition,
    WalkPolicy,
    Weighting,
    direct_exposure,
    layer_coverage,
    layer_exposure,
    sample_walk,
)
from .centrality import (
    CentralityReport,
    CovarianceMatrix,
    centrality_from_exposures,
    covariance_of_exposures,
    dominant_eigenpair,
    juxtaposed_centrality,
    superimposed_centrality,
)
from .interchange import read_interchange, write_interchange
from .datasets import DatasetManifest, IngestReport, parse_contacts, parse_flights
from .analysis import (
    DensitySeries,
    RankComparison,
    aspect_density_matrix,
    density_dynamics,
    rank_comparison,
    select_coordinate,
    spearman_rho,
    time_windows,
)

__all__ = [
    "__version__",
    # errors / time sets
    "MlsError",
    "TimeInstant",
    "TimeInterval",
    "TimeSet",
    "union_all",
    # core model
    "Aspect",
    "BuildMode",
    "GraphBuilder",
    "MultilayerStreamGraph",
    "TemporalLink",
    "Violation",
    "build",
    "validate",
    # projections
    "BipartiteStreamGraph",
    "MultilayerGraph",
    "StaticGraph",
    "StreamGraph",
    "aggregated_stream",
    "collapse_aspects",
    "induced_multilayer",
    "interlayer_stream",
    "intralayer_stream",
    "restrict_window",
    "snapshot",
    # measures
    "DegreeReport",
    "DenominatorMode",
    "DensityMatrix",
    "DensityResult",
    "degree",
    "degree_node_layer",
    "density_graph",
    "density_matrix",
    "density_mls",
    "density_stream",
    "interlayer_density",
    "layer_label",
    "number_of_links",
    # paths and walks
    "PathHop",
    "TemporalPath",
    "is_valid_path",
    "reachable",
    "ExposureMatrix",
    "Transition",
    "WalkPolicy",
    "Weighting",
    "direct_exposure",
    "layer_coverage",
    "layer_exposure",
    "sample_walk",
    # centrality
    "CentralityReport",
    "CovarianceMatrix",
    "centrality_from_exposures",
    "covariance_of_exposures",
    "dominant_eigenpair",
    "juxtaposed_centrality",
    "superimposed_centrality",
    # io and datasets
    "read_interchange",
    "write_interchange",
    "DatasetManifest",
    "IngestReport",
    "parse_contacts",
    "parse_flights",
    # cross-layer analysis
    "DensitySeries",
    "RankComparison",
    "aspect_density_matrix",
    "density_dynamics",
    "rank_comparison",
    "select_coordinate",
    "spearman_rho",
    "time_windows",
]
