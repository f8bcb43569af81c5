import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlstream import TimeInterval, TimeSet, union_all
from mlstream.errors import ResolutionMismatch

from oracles import cell_members, halftick_members, normalize_oracle

intervals_st = st.lists(
    st.tuples(st.integers(0, 120), st.integers(0, 120)).map(
        lambda p: (min(p), max(p))),
    max_size=8)


def ts(*pairs):
    return TimeSet(pairs)


# --- TimeInterval ------------------------------------------------------------


def test_interval_basic():
    iv = TimeInterval(3, 7)
    assert (iv.start, iv.end, iv.length) == (3, 7, 4)
    assert iv == (3, 7)
    assert 3 in iv and 7 in iv and 8 not in iv


def test_interval_rejects_bad_order():
    with pytest.raises(ValueError):
        TimeInterval(5, 3)


def test_interval_rejects_non_integers():
    with pytest.raises(TypeError):
        TimeInterval(0.5, 3)


def test_interval_instantaneous():
    iv = TimeInterval(4, 4)
    assert iv.length == 0
    assert 4 in iv


def test_interval_accepts_numpy_ints():
    iv = TimeInterval(np.int64(2), np.int64(9))
    assert isinstance(iv.start, int) and isinstance(iv.end, int)


# --- construction and normalization -----------------------------------------


def test_overlapping_merge():
    assert ts((0, 2), (1, 3)).intervals == (TimeInterval(0, 3),)


def test_abutting_merge():
    assert ts((0, 2), (2, 5)).intervals == (TimeInterval(0, 5),)


def test_gap_preserved():
    assert ts((0, 2), (3, 5)).intervals == (TimeInterval(0, 2),
                                            TimeInterval(3, 5))


def test_empty():
    e = TimeSet.empty()
    assert len(e) == 0 and not e and e.measure() == 0 and e.span() is None


@given(intervals_st)
def test_normalization_matches_oracle(pairs):
    got = [(iv.start, iv.end) for iv in TimeSet(pairs)]
    assert got == normalize_oracle(pairs)


@given(intervals_st)
def test_normalization_idempotent(pairs):
    a = TimeSet(pairs)
    assert TimeSet(a.intervals) == a


@given(intervals_st)
def test_normalized_invariants(pairs):
    prev_end = None
    for iv in TimeSet(pairs):
        assert iv.start <= iv.end
        if prev_end is not None:
            assert iv.start > prev_end  # sorted, disjoint, non-abutting
        prev_end = iv.end


# --- union / intersection ----------------------------------------------------


def test_union_overlapping():
    assert ts((0, 2)) | ts((1, 3)) == ts((0, 3))


def test_union_identity():
    assert TimeSet.empty() | ts((5, 7)) == ts((5, 7))


def test_intersect_basic():
    assert ts((0, 10)) & ts((5, 15)) == ts((5, 10))


def test_intersect_disjoint():
    assert ts((0, 1)) & ts((2, 3)) == TimeSet.empty()


def test_intersect_point_overlap():
    assert ts((0, 5)) & ts((5, 9)) == ts((5, 5))


@given(intervals_st, intervals_st)
def test_union_matches_membership(a, b):
    got = halftick_members(TimeSet(a) | TimeSet(b))
    assert got == halftick_members(a) | halftick_members(b)


@given(intervals_st, intervals_st)
def test_intersect_matches_membership(a, b):
    got = halftick_members(TimeSet(a) & TimeSet(b))
    assert got == halftick_members(a) & halftick_members(b)


@given(intervals_st, intervals_st)
def test_commutativity(a, b):
    x, y = TimeSet(a), TimeSet(b)
    assert x | y == y | x
    assert x & y == y & x


@given(intervals_st, intervals_st, intervals_st)
@settings(max_examples=60)
def test_associativity(a, b, c):
    x, y, z = TimeSet(a), TimeSet(b), TimeSet(c)
    assert (x | y) | z == x | (y | z)
    assert (x & y) & z == x & (y & z)


@given(intervals_st, intervals_st)
def test_inclusion_exclusion(a, b):
    x, y = TimeSet(a), TimeSet(b)
    assert (x | y).measure() == x.measure() + y.measure() - (x & y).measure()


@given(intervals_st, intervals_st)
def test_intersection_measure_bound(a, b):
    x, y = TimeSet(a), TimeSet(b)
    assert (x & y).measure() <= min(x.measure(), y.measure())


# --- measure -----------------------------------------------------------------


def test_measure_examples():
    assert TimeSet.empty().measure() == 0
    assert ts((0, 3), (5, 7)).measure() == 5
    assert ts((4, 4)).measure() == 0


@given(intervals_st)
def test_measure_matches_cell_oracle(pairs):
    assert TimeSet(pairs).measure() == len(cell_members(pairs))


# --- membership --------------------------------------------------------------


def test_contains_closed_endpoints():
    a = ts((0, 3))
    assert 0 in a and 3 in a
    assert 4 not in a and -1 not in a


def test_contains_instantaneous():
    assert 4 in ts((4, 4))


def test_contains_non_integer():
    assert 1.5 not in ts((0, 3))
    assert "x" not in ts((0, 3))


@given(intervals_st, st.integers(-5, 130))
def test_contains_matches_membership(pairs, t):
    assert (t in TimeSet(pairs)) == (2 * t in halftick_members(pairs))


# --- misc API ----------------------------------------------------------------


def test_span():
    assert ts((3, 5), (9, 20)).span() == TimeInterval(3, 20)


def test_issubset():
    assert ts((1, 2)).issubset(ts((0, 5)))
    assert not ts((1, 6)).issubset(ts((0, 5)))
    assert TimeSet.empty().issubset(ts((0, 5)))


def test_point():
    assert TimeSet.point(7) == ts((7, 7))


def test_union_all():
    parts = [ts((0, 2)), ts((2, 4)), ts((9, 9))]
    assert union_all(parts) == ts((0, 4), (9, 9))
    assert union_all([]) == TimeSet.empty()


def test_overlap_measure():
    a, b = ts((0, 4), (10, 14)), ts((2, 12))
    assert a.overlap_measure(b) == (a & b).measure() == 4


def test_scale():
    assert ts((1, 3), (5, 6)).scale(10) == ts((10, 30), (50, 60))
    with pytest.raises(ValueError):
        ts((0, 1)).scale(0)


def test_difference_basic():
    assert ts((0, 10)).difference(ts((3, 6))) == ts((0, 3), (6, 10))
    assert ts((0, 5)).difference(ts((0, 5))) == TimeSet.empty()
    assert ts((2, 2)).difference(ts((0, 1))) == ts((2, 2))


@given(intervals_st, intervals_st)
def test_difference_measure(a, b):
    x, y = TimeSet(a), TimeSet(b)
    assert x.difference(y).measure() == x.measure() - x.overlap_measure(y)


@given(intervals_st, intervals_st)
def test_difference_cells(a, b):
    got = cell_members((iv.start, iv.end) for iv in TimeSet(a).difference(
        TimeSet(b)))
    assert got == cell_members(a) - cell_members(b)


@given(intervals_st, intervals_st)
def test_difference_empty_iff_subset(a, b):
    x, y = TimeSet(a), TimeSet(b)
    assert (not x.difference(y)) == x.issubset(y)


def test_resolution_mismatch():
    a = TimeSet([(0, 5)], resolution=1)
    b = TimeSet([(0, 5)], resolution=20)
    with pytest.raises(ResolutionMismatch):
        a | b
    with pytest.raises(ResolutionMismatch):
        a & b


def test_immutable():
    a = ts((0, 5))
    with pytest.raises(AttributeError):
        a.resolution = 2
    starts, _ = a.bounds_arrays
    with pytest.raises(ValueError):
        starts[0] = 99


def test_hash_consistency():
    assert hash(ts((0, 2), (1, 3))) == hash(ts((0, 3)))
    assert ts((0, 3)) in {ts((0, 2), (1, 3))}


def test_equality_respects_resolution():
    assert TimeSet([(0, 5)], resolution=1) != TimeSet([(0, 5)], resolution=20)
