"""Hot per-pixel kernels with backend selection at import.

Uses the compiled extension when present; falls back to the numpy
implementations otherwise. Set CHARSYNTH_NO_NATIVE=1 to force the fallback.
Both backends implement the same arithmetic; see benchmarks/bench_kernels.py
for the speed comparison.
"""

import os

from charsynth.kernels import purepy

if os.environ.get("CHARSYNTH_NO_NATIVE"):
    _impl = purepy
    BACKEND = "purepy"
else:
    try:
        from charsynth.kernels import _native as _impl

        BACKEND = "native"
    except ImportError:
        _impl = purepy
        BACKEND = "purepy"

SUPERSAMPLE = purepy.SUPERSAMPLE

fill_coverage = _impl.fill_coverage
convolve_sep = _impl.convolve_sep
block_reduce = _impl.block_reduce
resample_axis = _impl.resample_axis
bilinear_warp = _impl.bilinear_warp
minmax_filter = _impl.minmax_filter
poisson_iterate = _impl.poisson_iterate

__all__ = [
    "BACKEND",
    "SUPERSAMPLE",
    "bilinear_warp",
    "block_reduce",
    "convolve_sep",
    "fill_coverage",
    "minmax_filter",
    "poisson_iterate",
    "purepy",
    "resample_axis",
]
