"""End-to-end acceptance checks, one test per numbered criterion.

Each test prints a single PASS/FAIL line (through the capture) so a full
run reads as a checklist. Dataset-backed criteria (7, and the second half
of 8) skip with a notice when the files are absent; place them under
``data/`` or point ``MLSTREAM_DATA`` at them (see README for layout and
download URLs).
"""
import itertools
import os
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from mlstream import cli
from mlstream.analysis import (aspect_density_matrix, density_dynamics,
                               rank_comparison, select_coordinate)
from mlstream.centrality import (dominant_eigenpair, juxtaposed_centrality,
                                 superimposed_centrality)
from mlstream.datasets import DatasetManifest, parse_flights
from mlstream.interchange import write_interchange
from mlstream.measures import (DenominatorMode, density_graph, density_mls,
                               density_matrix, density_stream, degree,
                               degree_node_layer, interlayer_density,
                               number_of_links)
from mlstream.model import Aspect, BuildMode, GraphBuilder
from mlstream.paths import TemporalPath, is_valid_path, reachable
from mlstream.projections import (StaticGraph, aggregated_stream,
                                  collapse_aspects, intralayer_stream)
from mlstream.synth import graph_corpus, planted_flight_network
from mlstream.walks import WalkPolicy, layer_exposure

from oracles import cell_members, enumerate_paths

DATA = Path(os.environ.get("MLSTREAM_DATA", "data"))


def _line(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
    assert ok, f"criterion {n}: {detail}"


def _skip(capsys, n, detail):
    with capsys.disabled():
        print(f"SKIP criterion {n}: {detail}")
    pytest.skip(detail)


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    """Compile the jitted kernels before anything is timed."""
    g = planted_flight_network(seed=0, carriers=2, airports=5,
                               horizon=1440)
    layer_exposure(g, WalkPolicy(gamma=10, num_walks=8, seed=1))
    density_mls(g)


def test_criterion_1_graph_density_fixture(capsys):
    G = StaticGraph(vertices=(1, 2, 3, 4),
                    edges=frozenset({frozenset(p) for p in
                                     [(1, 2), (1, 3), (2, 3), (3, 4)]}))
    density_graph(G)  # warm call
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        d = density_graph(G)
        best = min(best, time.perf_counter() - t0)
    exact = (d.numerator, d.denominator) == (4, 6) and d.value == 2 / 3
    _line(capsys, 1, exact and best < 1e-3,
          f"density_graph = {d.numerator}/{d.denominator} "
          f"(want 4/6 = 2/3), {best * 1e6:.0f} us")


def test_criterion_2_juxtaposed_reference_matrix(capsys):
    from mlstream.measures import DensityMatrix
    delta = DensityMatrix((("M",), ("F",)),
                          [[1 / 5, 1 / 7], [1 / 7, 1 / 6]])
    report = juxtaposed_centrality(delta)
    lam, vecs = np.linalg.eigh(np.asarray(delta.values))
    j = int(np.argmax(lam))
    want_vec = np.abs(vecs[:, j])
    ok = (abs(report.dominant_eigenvalue - float(lam[j])) < 1e-6
          and np.max(np.abs(np.array(report.scores) - want_vec)) < 1e-6
          and report.ranking[0] == ("M",))
    _line(capsys, 2, ok,
          f"eigenvalue {report.dominant_eigenvalue:.6f} vs oracle "
          f"{lam[j]:.6f}, ranking {[l[0] for l in report.ranking]}")


def _presence_cells(g):
    return {nl: cell_members((iv.start, iv.end) for iv in ts)
            for nl, ts in g.node_layer_presence.items()}


def _mls_oracle(g, mode):
    cells = _presence_cells(g)
    linked = {frozenset(l.layers) for l in g.links}

    def in_family(a, b):
        if mode is DenominatorMode.INTRALAYER_PAIRS:
            return a[1] == b[1]
        if mode is DenominatorMode.LINKED_LAYER_PAIRS:
            return frozenset((a[1], b[1])) in linked
        return True

    union = {}
    for link in g.links:
        union.setdefault(link.pair, set()).update(
            cell_members([(link.time.start, link.time.end)]))
    num = sum(len(c) for pair, c in union.items() if in_family(*pair))
    den = sum(len(cells[a] & cells[b])
              for a, b in itertools.combinations(sorted(cells, key=repr), 2)
              if in_family(a, b))
    return num, den


def test_criterion_3_exact_measure_equivalence(capsys):
    started = time.perf_counter()
    graphs = graph_corpus(seed=903, count=1000)
    checks = 0
    for g in graphs:
        span = g.study_interval.length
        # number_of_links
        want = Fraction(sum(len(cell_members([(l.time.start, l.time.end)]))
                            for l in g.links), span)
        assert number_of_links(g.links, g.study_interval) == float(want)
        # stream density of the aggregate
        s = aggregated_stream(g)
        cells = {u: cell_members((iv.start, iv.end) for iv in p)
                 for u, p in s.presence.items()}
        num = sum(len(cell_members((iv.start, iv.end) for iv in t))
                  for t in s.links.values())
        den = sum(len(cells[u] & cells[v])
                  for u, v in itertools.combinations(s.nodes, 2))
        d = density_stream(s)
        assert (d.numerator, d.denominator) == (num, den)
        # multilayer density, all denominator families
        for mode in DenominatorMode:
            num, den = _mls_oracle(g, mode)
            d = density_mls(g, mode)
            assert (d.numerator, d.denominator) == (num, den)
            checks += 1
        # interlayer density of the first layer pair
        layers = g.layers
        if len(layers) >= 2:
            alpha, beta = layers[0], layers[1]
            co = cell_members(
                (iv.start, iv.end)
                for iv in g.layer_presence[alpha] & g.layer_presence[beta])
            pcells = {nl: c & co for nl, c in _presence_cells(g).items()
                      if nl[1] in (alpha, beta)}
            ncells = {}
            for link in g.links:
                if set(link.layers) == {alpha, beta}:
                    ncells.setdefault(link.pair, set()).update(
                        cell_members([(link.time.start, link.time.end)])
                        & co)
            num = sum(len(c) for c in ncells.values())
            den = sum(len(pcells[a] & pcells[b])
                      for a in pcells if a[1] == alpha
                      for b in pcells if b[1] == beta and b != a)
            d = interlayer_density(g, alpha, beta)
            assert (d.numerator, d.denominator) == (num, den)
            checks += 1
        # both degrees
        for u in g.nodes:
            incident = [l for l in g.links if u in l.nodes]
            rep = degree(g, u)
            assert rep.count_degree == len(incident)
            want = Fraction(
                sum(len(cell_members([(l.time.start, l.time.end)]))
                    for l in incident), span)
            assert rep.duration_degree == float(want)
        for nl in g.node_layers:
            incident = [l for l in g.links if nl in l.pair]
            rep = degree_node_layer(g, nl)
            assert rep.count_degree == len(incident)
            want = Fraction(
                sum(len(cell_members([(l.time.start, l.time.end)]))
                    for l in incident), span)
            assert rep.duration_degree == float(want)
            checks += 1
    elapsed = time.perf_counter() - started
    _line(capsys, 3, elapsed < 60.0,
          f"{len(graphs)} graphs, {checks} oracle checks, zero "
          f"mismatches, {elapsed:.1f}s")


def test_criterion_4_projection_consistency(capsys):
    graphs = graph_corpus(seed=904, count=400)
    checks = 0
    for g in graphs:
        s = aggregated_stream(g)
        # link presence equals the per-pair union oracle
        union = {}
        for link in g.links:
            u, v = link.nodes
            if u == v:
                continue
            pair = (u, v) if u <= v else (v, u)
            union.setdefault(pair, set()).update(
                cell_members([(link.time.start, link.time.end)]))
        assert set(s.links) == set(union)
        for pair, want in union.items():
            got = cell_members((iv.start, iv.end) for iv in s.links[pair])
            assert got == want
            checks += 1
        # aggregated degree never exceeds the per-layer sum
        for u in g.nodes:
            agg_cells = sum(
                len(cell_members((iv.start, iv.end) for iv in t))
                for pair, t in s.links.items() if u in pair)
            per_layer = sum(
                len(cell_members([(l.time.start, l.time.end)]))
                for l in g.links for nl in l.pair if nl[0] == u)
            assert agg_cells <= per_layer
            checks += 1
        # intralayer density equals the matrix diagonal
        if 2 <= len(g.layers) <= 3:
            dm = density_matrix(g)
            for alpha in g.layers:
                want = density_stream(intralayer_stream(g, alpha)).value
                assert dm.entry(alpha, alpha) == want
                checks += 1
    _line(capsys, 4, True,
          f"{len(graphs)} graphs, {checks} union/degree/diagonal checks")


def _path_fixture():
    b = GraphBuilder((0, 12), [Aspect("m", ("s", "t"))],
                     BuildMode.AUTO_MATERIALIZE)
    S, T = ("s",), ("t",)
    records = [
        ((0, 2), (1, S), (2, S)),
        ((1, 3), (2, S), (3, T)),
        ((2, 2), (3, T), (4, T)),
        ((4, 6), (4, T), (5, S)),
        ((5, 5), (2, S), (5, S)),
        ((6, 8), (5, S), (6, T)),
        ((3, 4), (1, S), (1, T)),
    ]
    for iv, a, bb in records:
        b.add_link(iv, a, bb)
    return b.finish(), [(iv[0], iv[1], a, bb) for iv, a, bb in records]


def _candidates(records, start_nl, t_lo, t_hi, max_hops):
    """Time-ordered hop chains, times probing one tick past each record."""
    out = []

    def extend(path, at, min_t):
        if len(path) >= max_hops:
            return
        for s, e, a, b in records:
            if at not in (a, b):
                continue
            to = b if at == a else a
            for t in range(max(s - 1, min_t, t_lo), min(e + 1, t_hi) + 1):
                hop = (t, at, to)
                out.append(path + (hop,))
                extend(path + (hop,), to, t)

    extend((), start_nl, t_lo)
    return out


def test_criterion_5_path_properties(capsys):
    g, records = _path_fixture()
    lo, hi = g.study_interval.start, g.study_interval.end
    compared = 0
    for start in {r[2] for r in records} | {r[3] for r in records}:
        enum = {tuple((t, frm, to) for t, _, frm, to in p)
                for p in enumerate_paths(records, start, 4, lo, hi, 0)}
        for cand in _candidates(records, start, lo, hi, 4):
            plain_ok = all(
                any(s <= t <= e and {a, b} == {frm, to}
                    for s, e, a, b in records)
                for t, frm, to in cand)
            got = is_valid_path(g, TemporalPath(cand), gamma=0)
            assert got == plain_ok
            assert got == (cand in enum)
            compared += 1
    # reachability monotone non-increasing in gamma
    probes = 0
    for gr in graph_corpus(seed=905, count=60):
        nls = gr.node_layers
        if len(nls) < 2 or not gr.links:
            continue
        lo, hi = gr.study_interval.start, gr.study_interval.end
        for src in nls[:3]:
            for dst in nls[-3:]:
                hits = [reachable(gr, (lo, src), (hi, dst), gamma)
                        for gamma in (0, 1, 2, 5)]
                for smaller, bigger in zip(hits, hits[1:]):
                    assert smaller or not bigger
                probes += 1
    _line(capsys, 5, True,
          f"{compared} candidate paths matched plain validity and the "
          f"enumeration; {probes} monotone reachability probes")


def test_criterion_6_solver_oracle_sweep(capsys):
    rng = np.random.default_rng(906)
    worst_res = 0.0
    worst_gap = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 11))
        m = rng.random((k, k))
        m = (m + m.T) / 2
        lam, vec = dominant_eigenpair(m, tol=2e-11)
        res = float(np.linalg.norm(m @ vec - lam * vec))
        gap = abs(lam - float(np.max(np.linalg.eigvalsh(m))))
        worst_res = max(worst_res, res)
        worst_gap = max(worst_gap, gap)
    ok = worst_res < 1e-9 and worst_gap < 1e-9
    _line(capsys, 6, ok,
          f"100 matrices, worst residual {worst_res:.2e}, worst "
          f"eigenvalue gap {worst_gap:.2e}")


def test_criterion_7_highschool_reproduction(capsys):
    manifest = DATA / "highschool" / "manifest.json"
    if not manifest.exists():
        _skip(capsys, 7,
              f"HighSchool dataset not found at {manifest} "
              f"(download from sociopatterns.org, see README)")
    started = time.perf_counter()
    g, _report = DatasetManifest.from_json(manifest).load()
    f2f = select_coordinate(g, "interaction_type", {"face2face"})
    students = len(g.nodes)
    f2f_links = len(f2f.links)
    sizes_ok = students == 329 and f2f_links == 36_732

    series = density_dynamics(f2f, "gender", 86_400)
    gender_ok = len(series.rows) == 5 and all(
        row.intra_a.value > row.inter.value
        and row.intra_b.value > row.inter.value
        for row in series.rows)

    dm = aspect_density_matrix(f2f, "class")
    k = len(dm.layers)
    vals = np.asarray(dm.values)
    offdiag = vals - np.diag(np.diag(vals))
    class_ok = k == 9 and all(
        vals[i, i] > max(v for j, v in enumerate(vals[i]) if j != i)
        for i in range(k))
    elapsed = time.perf_counter() - started

    # qualitative, logged not asserted: do 2BIO3 / MP*2 top their blocks?
    coll = collapse_aspects(f2f, ["class"])
    report = superimposed_centrality(
        coll, WalkPolicy(gamma=60, num_walks=2000, seed=7),
        sigma_batches=0)
    byname = {l[0]: report.score(l) for l in report.layers}
    bio = {n: byname[n] for n in byname if n.startswith("2BIO")}
    mp = {n: byname[n] for n in byname if n.startswith("MP")}
    with capsys.disabled():
        print(f"  note criterion 7: BIO block top = "
              f"{max(bio, key=bio.get) if bio else '?'} (expected 2BIO3), "
              f"MP block top = {max(mp, key=mp.get) if mp else '?'} "
              f"(expected MP*2)")

    _line(capsys, 7, sizes_ok and gender_ok and class_ok and elapsed < 120,
          f"{students} students, {f2f_links} links, 5-day intra>inter "
          f"{gender_ok}, 9x9 diagonal dominance {class_ok}, "
          f"{elapsed:.0f}s")


def test_criterion_8_planted_rank_agreement(capsys):
    g = planted_flight_network(seed=7)
    policy = WalkPolicy(gamma=30, num_walks=2000, seed=41)
    rc = rank_comparison(g, policy, seeds=tuple(41 + i for i in range(5)))
    _line(capsys, 8, rc.spearman > 0.7,
          f"planted 5-carrier network: Spearman {rc.spearman:.3f} over "
          f"10^4 seed-averaged walks (threshold 0.7)")


def test_criterion_8_real_flights(capsys, tmp_path):
    files = sorted((DATA / "flights").glob("*.csv")) \
        if (DATA / "flights").exists() else []
    if not files:
        _skip(capsys, "8 (BTS)",
              f"no BTS extracts at {DATA / 'flights'}/*.csv "
              f"(download from transtats.bts.gov, see README)")
    results = []
    for path in files:
        started = time.perf_counter()
        g, _report = parse_flights(path, skip_errors=True)
        policy = WalkPolicy(gamma=30, num_walks=2000, seed=41)
        rc = rank_comparison(g, policy,
                             seeds=tuple(41 + i for i in range(5)))
        with open(tmp_path / f"{path.stem}_ranks.csv", "w",
                  newline="") as fp:
            rc.write_csv(fp)
        elapsed = time.perf_counter() - started
        results.append((path.name, rc.spearman, elapsed))
        assert elapsed < 600, f"{path.name}: {elapsed:.0f}s"
        assert rc.spearman > 0, f"{path.name}: rho {rc.spearman:.3f}"
    _line(capsys, "8 (BTS)", True,
          "; ".join(f"{n}: rho {r:.3f} in {e:.0f}s"
                    for n, r, e in results))


def test_criterion_9_byte_identical_reruns(capsys, tmp_path):
    src = tmp_path / "net.mls.json"
    write_interchange(planted_flight_network(seed=3), src)
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert cli.main(["centrality", "superimposed", "--input", str(src),
                         "--out-dir", str(out), "--seed", "17",
                         "--gamma", "20", "--walks", "600"]) == 0
        assert cli.main(["rank-compare", "--input", str(src),
                         "--out-dir", str(out), "--seed", "17",
                         "--gamma", "20", "--walks", "400",
                         "--seed-runs", "2"]) == 0
        assert cli.main(["exposure", "--input", str(src),
                         "--out-dir", str(out), "--seed", "17",
                         "--gamma", "20", "--walks", "400"]) == 0
        outs.append(out)
    names = ["centrality.csv", "centrality.json", "rank_comparison.csv",
             "rank_summary.json", "exposure.csv"]
    same = all((outs[0] / n).read_bytes() == (outs[1] / n).read_bytes()
               for n in names)
    _line(capsys, 9, same,
          f"{len(names)} stochastic outputs byte-identical across reruns")
