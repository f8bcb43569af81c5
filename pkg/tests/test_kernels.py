"""Backend equivalence: the numba kernels must match pure numpy bit-for-bit."""
import os
import subprocess
import sys

import numpy as np
import pytest

from mlstream._kernels import HAS_NUMBA
from mlstream._kernels import numpy_impl as ref

if HAS_NUMBA:
    from mlstream._kernels import numba_impl as jit
else:  # pragma: no cover
    jit = None

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")


def random_set(rng, n, span=200):
    s = rng.integers(0, span, size=n)
    e = s + rng.integers(0, 12, size=n)
    return ref.normalize_intervals(s.astype(np.int64), e.astype(np.int64))


@needs_numba
def test_normalize_matches():
    rng = np.random.default_rng(1)
    for n in (0, 1, 2, 7, 40):
        s = rng.integers(0, 100, size=n).astype(np.int64)
        e = s + rng.integers(0, 15, size=n)
        rs, re = ref.normalize_intervals(s, e)
        js, je = jit.normalize_intervals(s, e)
        assert np.array_equal(rs, js) and np.array_equal(re, je)
        assert js.dtype == np.int64 and je.dtype == np.int64


@needs_numba
def test_intersect_and_overlap_match():
    rng = np.random.default_rng(2)
    for _ in range(200):
        a = random_set(rng, int(rng.integers(0, 8)))
        b = random_set(rng, int(rng.integers(0, 8)))
        rs, re = ref.intersect_sets(*a, *b)
        js, je = jit.intersect_sets(*a, *b)
        assert np.array_equal(rs, js) and np.array_equal(re, je)
        assert ref.overlap_ticks(*a, *b) == jit.overlap_ticks(*a, *b)


@needs_numba
def test_pair_overlap_total_matches():
    rng = np.random.default_rng(3)
    for _ in range(40):
        k = int(rng.integers(2, 6))
        sets = [random_set(rng, int(rng.integers(0, 6))) for _ in range(k)]
        offsets = np.zeros(k + 1, dtype=np.int64)
        for i, (s, _) in enumerate(sets):
            offsets[i + 1] = offsets[i] + len(s)
        flat_s = np.concatenate([s for s, _ in sets] or
                                [np.empty(0, dtype=np.int64)])
        flat_e = np.concatenate([e for _, e in sets] or
                                [np.empty(0, dtype=np.int64)])
        left = rng.integers(0, k, size=10).astype(np.int64)
        right = rng.integers(0, k, size=10).astype(np.int64)
        assert (ref.pair_overlap_total(flat_s, flat_e, offsets, left, right)
                == jit.pair_overlap_total(flat_s, flat_e, offsets, left,
                                          right))


def _session_arrays(seed):
    from mlstream.synth import graph_corpus
    from mlstream.walks import build_session
    g = graph_corpus(seed=seed, count=1, max_nodes=5, span=40,
                     max_links=10)[0]
    ses = build_session(g, g.study_interval.end)
    return g, ses


@needs_numba
def test_trace_walk_matches():
    for seed in (10, 11, 12, 13):
        g, ses = _session_arrays(seed)
        if not len(ses.nodes):
            continue
        for stream in range(6):
            args = (ses.rec_s, ses.rec_e, ses.rec_nl_a, ses.rec_nl_b,
                    ses.inc_ptr, ses.inc_rec, ses.inc_other, ses.inc_end,
                    ses.node_ptr, ses.node_rec, ses.node_other, ses.node_end,
                    0, g.study_interval.start, 1, ses.t_max, 50, 99, stream)
            rn, rt, rr, rf, rto = ref.trace_walk(*args)
            jn, jt, jr, jf, jto = jit.trace_walk(*args)
            assert rn == jn
            assert np.array_equal(rt[:rn], jt[:jn])
            assert np.array_equal(rr[:rn], jr[:jn])
            assert np.array_equal(rf[:rn], jf[:jn])
            assert np.array_equal(rto[:rn], jto[:jn])


@needs_numba
def test_simulate_exposure_matches():
    from mlstream.walks import _presence_arrays
    for seed in (21, 22, 23):
        g, ses = _session_arrays(seed)
        if not len(ses.nodes):
            continue
        row_node = np.arange(len(ses.nodes), dtype=np.int64)
        ptr, ps, pe, pcum, totals = _presence_arrays(
            g, ses.nodes, g.study_interval.start, ses.t_max)
        for use_fixed in (0, 1):
            fixed = np.full(len(ses.nodes), g.study_interval.start,
                            dtype=np.int64)
            args = (ses.rec_s, ses.rec_e, ses.rec_la, ses.rec_lb,
                    ses.inc_ptr, ses.inc_rec, ses.inc_other, ses.inc_end,
                    ses.node_ptr, ses.node_rec, ses.node_other, ses.node_end,
                    row_node, use_fixed, fixed, ptr, ps, pe, pcum, totals,
                    1, ses.t_max, 64, 7, 50, len(ses.layers))
            rt, rl = ref.simulate_exposure(*args)
            jt, jl = jit.simulate_exposure(*args)
            assert np.array_equal(rt, jt)
            assert np.array_equal(rl, jl)


@needs_numba
def test_simulate_coverage_matches():
    for seed in (31, 32):
        g, ses = _session_arrays(seed)
        if not len(ses.nodes):
            continue
        args = (ses.rec_s, ses.rec_e, ses.rec_la, ses.rec_lb,
                ses.rec_na, ses.rec_nb,
                ses.inc_ptr, ses.inc_rec, ses.inc_other, ses.inc_end,
                ses.node_ptr, ses.node_rec, ses.node_other, ses.node_end,
                len(ses.nodes), g.study_interval.start, ses.t_max,
                0, ses.t_max, 128, 5, 30, len(ses.layers))
        assert np.array_equal(ref.simulate_coverage(*args),
                              jit.simulate_coverage(*args))


# --- backend selection -------------------------------------------------------

_PROBE = ("import mlstream._kernels as k;"
          "print(k.BACKEND)")


def _run(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("MLSTREAM_BACKEND", None)
    else:
        env["MLSTREAM_BACKEND"] = env_value
    return subprocess.run([sys.executable, "-c", _PROBE], env=env,
                          capture_output=True, text=True)


def test_backend_env_forces_numpy():
    out = _run("numpy")
    assert out.returncode == 0
    assert out.stdout.strip() == "numpy"


def test_backend_env_rejects_unknown():
    out = _run("cuda")
    assert out.returncode != 0


@needs_numba
def test_exposure_bit_identical_across_backends():
    prog = (
        "import numpy as np\n"
        "from mlstream.model import Aspect, GraphBuilder\n"
        "from mlstream.walks import WalkPolicy, layer_exposure\n"
        "b = GraphBuilder((0, 12), [Aspect('l', ('a', 'b'))])\n"
        "b.add_link((0, 4), (1, ('a',)), (2, ('a',)))\n"
        "b.add_link((3, 8), (2, ('b',)), (3, ('b',)))\n"
        "b.add_link((6, 10), (1, ('a',)), (3, ('b',)))\n"
        "g = b.finish()\n"
        "m = layer_exposure(g, WalkPolicy(gamma=1, num_walks=300, seed=42))\n"
        "print(m.values.tobytes().hex())\n")
    outs = []
    for backend in ("numpy", "numba"):
        env = dict(os.environ, MLSTREAM_BACKEND=backend)
        r = subprocess.run([sys.executable, "-c", prog], env=env,
                           capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        outs.append(r.stdout.strip())
    assert outs[0] == outs[1]
