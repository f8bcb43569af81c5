"""Hot numeric kernels with a selectable backend.

``MLSTREAM_BACKEND`` picks the implementation at import time:

* ``auto`` (default) — numba-compiled kernels if numba imports, else numpy
* ``numba`` — require the compiled kernels, raise if numba is missing
* ``numpy`` — force the pure-numpy fallback

Both backends produce identical results; ``tests/test_kernels.py`` asserts
bit equality and ``benchmarks/bench_backends.py`` times them side by side.
"""
import os

from . import numpy_impl

_choice = os.environ.get("MLSTREAM_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"MLSTREAM_BACKEND must be one of auto, numba, numpy; got {_choice!r}")

HAS_NUMBA = False
_impl = numpy_impl
if _choice in ("auto", "numba"):
    try:
        from . import numba_impl as _impl  # noqa: F811
        HAS_NUMBA = True
    except ImportError:
        if _choice == "numba":
            raise
        _impl = numpy_impl

BACKEND = "numba" if HAS_NUMBA else "numpy"

normalize_intervals = _impl.normalize_intervals
intersect_sets = _impl.intersect_sets
overlap_ticks = _impl.overlap_ticks
pair_overlap_total = _impl.pair_overlap_total
simulate_exposure = _impl.simulate_exposure
simulate_coverage = _impl.simulate_coverage
trace_walk = _impl.trace_walk
