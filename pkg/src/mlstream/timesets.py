"""Exact interval-set algebra over integer time ticks.

Time is measured in integer ticks of a configurable resolution (1 tick =
1 second by default). Intervals are closed on both ends; ``[0, 2]`` and
``[2, 5]`` share the instant 2 and merge to ``[0, 5]``. An instantaneous
interval ``[t, t]`` is legal and has measure zero: the measure of a set is
the summed ``end - start`` of its intervals, i.e. the number of whole unit
cells it covers.

All values are immutable once built, so they can be shared freely.
"""
from __future__ import annotations

import operator
from typing import Iterable, Iterator, NamedTuple, Optional, Union

import numpy as np

from . import _kernels
from .errors import ResolutionMismatch

TimeInstant = int
"""Integer tick count; every instant in one graph shares one resolution."""


class _IntervalBase(NamedTuple):
    start: TimeInstant
    end: TimeInstant


class TimeInterval(_IntervalBase):
    """Closed interval ``[start, end]`` with ``start <= end``, in ticks."""

    __slots__ = ()

    def __new__(cls, start: TimeInstant, end: TimeInstant) -> "TimeInterval":
        start = operator.index(start)
        end = operator.index(end)
        if start > end:
            raise ValueError(f"interval start {start} exceeds end {end}")
        return super().__new__(cls, start, end)

    @property
    def length(self) -> int:
        """Measure in ticks; zero for an instantaneous interval."""
        return self.end - self.start

    def __contains__(self, t: object) -> bool:
        return isinstance(t, (int, np.integer)) and self.start <= t <= self.end


IntervalLike = Union[TimeInterval, tuple]


def _as_interval(value: IntervalLike) -> TimeInterval:
    if isinstance(value, TimeInterval):
        return value
    return TimeInterval(*value)


class TimeSet:
    """A normalized union of disjoint, non-abutting closed intervals.

    ``TimeSet([(0, 2), (1, 3)])`` normalizes to ``{[0, 3]}``. Supports
    ``|`` (union), ``&`` (intersection), ``in`` (point membership),
    iteration over :class:`TimeInterval` values, and exact measure.
    """

    __slots__ = ("_starts", "_ends", "resolution")

    def __init__(self, intervals: Iterable[IntervalLike] = (), *,
                 resolution: int = 1):
        pairs = [_as_interval(p) for p in intervals]
        starts = np.fromiter((p.start for p in pairs), np.int64, len(pairs))
        ends = np.fromiter((p.end for p in pairs), np.int64, len(pairs))
        starts, ends = _kernels.normalize_intervals(starts, ends)
        self._init(starts, ends, resolution)

    def _init(self, starts: np.ndarray, ends: np.ndarray, resolution: int):
        if resolution < 1:
            raise ValueError(f"resolution must be >= 1, got {resolution}")
        starts.flags.writeable = False
        ends.flags.writeable = False
        object.__setattr__(self, "_starts", starts)
        object.__setattr__(self, "_ends", ends)
        object.__setattr__(self, "resolution", int(resolution))

    def __setattr__(self, name, value):
        raise AttributeError("TimeSet is immutable")

    @classmethod
    def _wrap(cls, starts: np.ndarray, ends: np.ndarray,
              resolution: int) -> "TimeSet":
        """Adopt already-normalized int64 arrays without copying."""
        self = object.__new__(cls)
        self._init(starts, ends, resolution)
        return self

    @classmethod
    def empty(cls, resolution: int = 1) -> "TimeSet":
        return cls((), resolution=resolution)

    @classmethod
    def point(cls, t: TimeInstant, resolution: int = 1) -> "TimeSet":
        return cls([(t, t)], resolution=resolution)

    # -- queries --------------------------------------------------------------

    @property
    def intervals(self) -> tuple:
        return tuple(TimeInterval(int(s), int(e))
                     for s, e in zip(self._starts, self._ends))

    @property
    def bounds_arrays(self) -> tuple:
        """Read-only (starts, ends) int64 arrays, for kernel callers."""
        return self._starts, self._ends

    def measure(self) -> int:
        """Total covered duration in ticks (unit cells)."""
        return int((self._ends - self._starts).sum())

    def span(self) -> Optional[TimeInterval]:
        """Smallest single interval containing the set, or None if empty."""
        if self._starts.shape[0] == 0:
            return None
        return TimeInterval(int(self._starts[0]), int(self._ends[-1]))

    def __contains__(self, t: object) -> bool:
        if not isinstance(t, (int, np.integer)):
            return False
        i = int(np.searchsorted(self._starts, t, side="right")) - 1
        return i >= 0 and t <= self._ends[i]

    def __len__(self) -> int:
        return self._starts.shape[0]

    def __bool__(self) -> bool:
        return self._starts.shape[0] > 0

    def __iter__(self) -> Iterator[TimeInterval]:
        return iter(self.intervals)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeSet):
            return NotImplemented
        return (self.resolution == other.resolution
                and np.array_equal(self._starts, other._starts)
                and np.array_equal(self._ends, other._ends))

    def __hash__(self) -> int:
        return hash((self.resolution, self._starts.tobytes(),
                     self._ends.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"[{s}, {e}]"
                         for s, e in zip(self._starts, self._ends))
        return f"TimeSet({{{body}}})"

    # -- algebra --------------------------------------------------------------

    def _check_resolution(self, other: "TimeSet") -> None:
        if self.resolution != other.resolution:
            raise ResolutionMismatch(
                f"tick resolutions differ: {self.resolution} vs "
                f"{other.resolution}")

    def union(self, other: "TimeSet") -> "TimeSet":
        self._check_resolution(other)
        starts = np.concatenate([self._starts, other._starts])
        ends = np.concatenate([self._ends, other._ends])
        starts, ends = _kernels.normalize_intervals(starts, ends)
        return TimeSet._wrap(starts, ends, self.resolution)

    __or__ = union

    def intersect(self, other: "TimeSet") -> "TimeSet":
        self._check_resolution(other)
        starts, ends = _kernels.intersect_sets(
            self._starts, self._ends, other._starts, other._ends)
        return TimeSet._wrap(starts, ends, self.resolution)

    __and__ = intersect

    def overlap_measure(self, other: "TimeSet") -> int:
        """measure(self & other) without materializing the intersection."""
        self._check_resolution(other)
        return int(_kernels.overlap_ticks(
            self._starts, self._ends, other._starts, other._ends))

    def issubset(self, other: "TimeSet") -> bool:
        """True iff every instant of self lies in other (closed semantics)."""
        self._check_resolution(other)
        return self.intersect(other) == self

    def difference(self, other: "TimeSet") -> "TimeSet":
        """Closed closure of ``self minus other``.

        Closed intervals are not closed under difference ([0,5] minus [2,3]
        is [0,2) ∪ (3,5]), so boundary instants shared with ``other`` may be
        included. Measures are unaffected: measure(a.difference(b)) equals
        measure(a) - a.overlap_measure(b).
        """
        self._check_resolution(other)
        out = []
        other_ivs = list(zip(other._starts, other._ends))
        for s, e in zip(self._starts, self._ends):
            cur = int(s)
            for bs, be in other_ivs:
                if bs > e:
                    break
                if be < cur:
                    continue
                if bs > cur:
                    out.append((cur, int(bs)))
                cur = max(cur, int(be))
                if cur >= e:
                    break
            if cur < e:
                out.append((cur, int(e)))
            elif cur == e and e not in other:
                out.append((int(e), int(e)))
        return TimeSet(out, resolution=self.resolution)

    def scale(self, factor: int) -> "TimeSet":
        """Multiply every endpoint by a positive integer tick factor."""
        factor = operator.index(factor)
        if factor < 1:
            raise ValueError(f"scale factor must be >= 1, got {factor}")
        return TimeSet._wrap(self._starts * factor, self._ends * factor,
                             self.resolution)


def union_all(sets: Iterable[TimeSet], resolution: int = 1) -> TimeSet:
    """Union of many TimeSets in one normalization pass."""
    sets = list(sets)
    if not sets:
        return TimeSet.empty(resolution)
    for s in sets[1:]:
        sets[0]._check_resolution(s)
    starts = np.concatenate([s._starts for s in sets])
    ends = np.concatenate([s._ends for s in sets])
    starts, ends = _kernels.normalize_intervals(starts, ends)
    return TimeSet._wrap(starts, ends, sets[0].resolution)
