import io
import itertools
from fractions import Fraction

import numpy as np
import pytest

from mlstream.errors import ZeroStudyInterval
from mlstream.measures import (DenominatorMode, DensityMatrix, degree,
                               degree_node_layer, density_graph, density_mls,
                               density_matrix, density_stream,
                               interlayer_density, number_of_links)
from mlstream.model import (Aspect, GraphBuilder, MultilayerStreamGraph,
                            TemporalLink)
from mlstream.projections import (StaticGraph, aggregated_stream,
                                  intralayer_stream)
from mlstream.synth import graph_corpus
from mlstream.timesets import TimeInterval, TimeSet

from oracles import cell_members

PLACE = Aspect("place", ("a", "b", "c"))

CORPUS = graph_corpus(seed=1402, count=150)


def scale_graph(g, k):
    """Multiply every instant by k; closure is preserved."""
    return MultilayerStreamGraph(
        study_interval=TimeInterval(g.study_interval.start * k,
                                    g.study_interval.end * k),
        nodes=g.nodes,
        aspects=g.aspects,
        layer_presence={l: t.scale(k) for l, t in g.layer_presence.items()},
        node_layer_presence={nl: t.scale(k)
                             for nl, t in g.node_layer_presence.items()},
        links=tuple(TemporalLink(
            TimeInterval(l.time.start * k, l.time.end * k), l.a, l.b)
            for l in g.links),
        resolution=g.resolution)


def presence_cells(g):
    return {nl: cell_members((iv.start, iv.end) for iv in ts)
            for nl, ts in g.node_layer_presence.items()}


def pair_union_cells(g):
    out = {}
    for link in g.links:
        out.setdefault(link.pair, set()).update(
            cell_members([(link.time.start, link.time.end)]))
    return out


def mls_density_oracle(g, mode):
    """Fraction-exact recomputation of the multilayer density."""
    cells = presence_cells(g)
    linked_layer_pairs = {frozenset(l.layers) for l in g.links}

    def in_family(a, b):
        if mode is DenominatorMode.INTRALAYER_PAIRS:
            return a[1] == b[1]
        if mode is DenominatorMode.LINKED_LAYER_PAIRS:
            return frozenset((a[1], b[1])) in linked_layer_pairs
        return True

    num = sum(len(c) for pair, c in pair_union_cells(g).items()
              if in_family(*pair))
    den = 0
    for a, b in itertools.combinations(sorted(cells, key=repr), 2):
        if in_family(a, b):
            den += len(cells[a] & cells[b])
    return Fraction(num, den) if den else None


# --- number_of_links ---------------------------------------------------------


def test_number_of_links_examples():
    links = [TemporalLink((0, 5), (1, ("a",)), (2, ("a",)))]
    assert number_of_links(links, (0, 10)) == 0.5
    assert number_of_links([], (0, 10)) == 0.0
    assert number_of_links([(4, 4)], (0, 10)) == 0.0  # instantaneous


def test_number_of_links_zero_interval():
    with pytest.raises(ZeroStudyInterval):
        number_of_links([], (5, 5))


def test_number_of_links_accepts_timeset_span():
    assert number_of_links([(0, 3)], TimeSet([(0, 2), (10, 14)])) == 0.5


# --- degrees -----------------------------------------------------------------


def test_degree_isolated_node():
    b = GraphBuilder((0, 10), [PLACE])
    b.add_node(5)
    g = b.finish()
    rep = degree(g, 5)
    assert (rep.count_degree, rep.duration_degree) == (0, 0.0)


def test_degree_counts_link_records():
    b = GraphBuilder((0, 100), [PLACE])
    peers = [2, 3, 4, 5, 6, 7, 8]
    for i, v in enumerate(peers):
        b.add_link((i, i + 2), (1, ("a",)), (v, ("a",)))
    g = b.finish()
    assert degree(g, 1).count_degree == 7
    assert degree(g, 2).count_degree == 1


def test_degree_duration_is_number_of_links_of_incident_set():
    b = GraphBuilder((0, 10), [PLACE])
    b.add_link((0, 4), (1, ("a",)), (2, ("a",)))
    b.add_link((2, 8), (1, ("b",)), (3, ("b",)))
    g = b.finish()
    assert degree(g, 1).duration_degree == (4 + 6) / 10
    assert degree_node_layer(g, (1, ("a",))).duration_degree == 4 / 10


def test_degrees_match_brute_force():
    for g in CORPUS[:60]:
        span = g.study_interval.length
        for u in g.nodes:
            incident = [l for l in g.links if u in l.nodes]
            rep = degree(g, u)
            assert rep.count_degree == len(incident)
            expect = Fraction(
                sum(len(cell_members([(l.time.start, l.time.end)]))
                    for l in incident), span)
            assert rep.duration_degree == float(expect)
        for nl in g.node_layers:
            incident = [l for l in g.links if nl in l.pair]
            rep = degree_node_layer(g, nl)
            assert rep.count_degree == len(incident)


# --- static graph density ----------------------------------------------------


def test_density_graph_cycle_value():
    G = StaticGraph(vertices=(1, 2, 3, 4),
                    edges=frozenset({(1, 2), (2, 3), (3, 4), (1, 4)}))
    d = density_graph(G)
    assert d.value == 2 / 3
    assert (d.numerator, d.denominator) == (4, 6)


def test_density_graph_complete_and_edgeless():
    K5 = StaticGraph(tuple(range(5)),
                     frozenset(itertools.combinations(range(5), 2)))
    assert density_graph(K5).value == 1.0
    empty = StaticGraph(tuple(range(5)), frozenset())
    assert density_graph(empty).value == 0.0


def test_density_graph_degenerate_vertex_set():
    d = density_graph(StaticGraph((1,), frozenset()))
    assert d.value == 0.0 and d.empty_denominator


# --- stream density ----------------------------------------------------------


def test_density_stream_direct_formula():
    b = GraphBuilder((0, 10), [Aspect("only", ("a",))])
    b.declare_node_layer((1, ("a",)), (0, 10))
    b.declare_node_layer((2, ("a",)), (0, 10))
    b.add_link((0, 5), (1, ("a",)), (2, ("a",)))
    s = aggregated_stream(b.finish())
    d = density_stream(s)
    assert d.value == 0.5
    assert (d.numerator, d.denominator) == (5, 10)


def test_density_stream_no_copresence_flagged():
    b = GraphBuilder((0, 10), [Aspect("only", ("a",))])
    b.declare_node_layer((1, ("a",)), (0, 3))
    b.declare_node_layer((2, ("a",)), (5, 9))
    s = aggregated_stream(b.finish())
    d = density_stream(s)
    assert d.value == 0.0 and d.empty_denominator


def test_density_stream_matches_oracle():
    for g in CORPUS:
        s = aggregated_stream(g)
        num = sum(len(cell_members((iv.start, iv.end) for iv in t))
                  for t in s.links.values())
        den = 0
        cells = {u: cell_members((iv.start, iv.end) for iv in p)
                 for u, p in s.presence.items()}
        for u, v in itertools.combinations(s.nodes, 2):
            den += len(cells[u] & cells[v])
        d = density_stream(s)
        assert d.numerator == num and d.denominator == den
        if den:
            assert d.value == float(Fraction(num, den))
        else:
            assert d.empty_denominator


# --- multilayer density ------------------------------------------------------


def test_density_mls_single_layer_reduces_to_stream():
    b = GraphBuilder((0, 20), [Aspect("only", ("a",))])
    b.add_link((0, 5), (1, ("a",)), (2, ("a",)))
    b.add_link((3, 9), (2, ("a",)), (3, ("a",)))
    g = b.finish()
    assert density_mls(g).value == density_stream(
        intralayer_stream(g, ("a",))).value


def test_density_mls_fully_linked_is_one():
    b = GraphBuilder((0, 10), [PLACE])
    nls = [(1, ("a",)), (1, ("b",)), (2, ("a",)), (2, ("b",))]
    for x, y in itertools.combinations(nls, 2):
        b.add_link((0, 10), x, y)
    g = b.finish()
    assert density_mls(g).value == 1.0


@pytest.mark.parametrize("mode", list(DenominatorMode))
def test_density_mls_matches_oracle(mode):
    for g in CORPUS:
        d = density_mls(g, mode)
        expect = mls_density_oracle(g, mode)
        if expect is None:
            assert d.empty_denominator and d.value == 0.0
        else:
            assert d.value == float(expect)
            assert Fraction(d.numerator, d.denominator or 1) == expect


def test_density_mls_in_unit_interval():
    for g in CORPUS:
        for mode in DenominatorMode:
            assert 0.0 <= density_mls(g, mode).value <= 1.0


# --- interlayer density and the matrix ---------------------------------------


def test_interlayer_density_no_cross_links():
    b = GraphBuilder((0, 10), [PLACE])
    b.add_link((0, 5), (1, ("a",)), (2, ("a",)))
    b.add_link((0, 5), (1, ("b",)), (2, ("b",)))
    g = b.finish()
    assert interlayer_density(g, ("a",), ("b",)).value == 0.0


def test_interlayer_density_matches_oracle():
    for g in CORPUS[:80]:
        layers = g.layers
        if len(layers) < 2:
            continue
        alpha, beta = layers[0], layers[1]
        co = g.layer_presence[alpha] & g.layer_presence[beta]
        co_cells = cell_members((iv.start, iv.end) for iv in co)
        cells = {nl: cell_members((iv.start, iv.end) for iv in ts) & co_cells
                 for nl, ts in g.node_layer_presence.items()
                 if nl[1] in (alpha, beta)}
        num_cells = {}
        for link in g.links:
            if set(link.layers) == {alpha, beta}:
                num_cells.setdefault(link.pair, set()).update(
                    cell_members([(link.time.start, link.time.end)])
                    & co_cells)
        num = sum(len(c) for c in num_cells.values())
        den = 0
        for a in [nl for nl in cells if nl[1] == alpha]:
            for b in [nl for nl in cells if nl[1] == beta]:
                den += len(cells[a] & cells[b])
        d = interlayer_density(g, alpha, beta)
        if den == 0:
            assert d.empty_denominator and d.value == 0.0
        else:
            assert d.value == float(Fraction(num, den))


def test_density_matrix_symmetric_unit_range():
    for g in CORPUS[:40]:
        if len(g.layers) < 2:
            continue
        m = density_matrix(g)
        assert np.array_equal(m.values, m.values.T)
        assert (m.values >= 0).all() and (m.values <= 1).all()


def test_density_matrix_diagonal_is_intralayer():
    for g in CORPUS[:40]:
        m = density_matrix(g)
        for i, layer in enumerate(m.layers):
            assert m.values[i, i] == density_stream(
                intralayer_stream(g, layer)).value


def test_density_matrix_entry_lookup():
    g = CORPUS[0]
    m = density_matrix(g)
    a = m.layers[0]
    assert m.entry(a, a) == m.values[0, 0]


# --- tick-scale invariance ---------------------------------------------------


def test_densities_invariant_under_tick_rescaling():
    for g in CORPUS[:40]:
        h = scale_graph(g, 7)
        assert density_mls(g).value == density_mls(h).value
        assert density_stream(aggregated_stream(g)).value == \
            density_stream(aggregated_stream(h)).value
        for u in g.nodes:
            if g.study_interval.length > 0:
                assert degree(g, u).duration_degree == \
                    degree(h, u).duration_degree


# --- CSV export --------------------------------------------------------------


def test_density_matrix_csv():
    m = DensityMatrix(layers=(("a",), ("b",)),
                      values=np.array([[0.5, 0.125], [0.125, 0.0]]))
    buf = io.StringIO()
    m.write_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "layer,a,b"
    assert lines[1] == "a,0.5,0.125"
    assert lines[2] == "b,0.125,0"


def test_density_matrix_log_csv():
    m = DensityMatrix(layers=(("a",), ("b",)),
                      values=np.array([[0.01, 0.0], [0.0, 1.0]]))
    buf = io.StringIO()
    m.write_log_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[1] == "a,2,inf"
    assert lines[2] == "b,inf,0"
