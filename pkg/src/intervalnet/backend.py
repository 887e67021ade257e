"""Kernel backend selection.

The hot numeric kernels exist twice: a numba-compiled set and a pure-numpy
reference set with identical signatures. Selection happens once, when this
module is first imported:

  * ``INTERVALNET_BACKEND=numpy``  forces the pure-numpy path;
  * ``INTERVALNET_BACKEND=numba``  requires numba (ImportError surfaces);
  * unset -- numba if importable, numpy otherwise.

``benchmarks/bench_backends.py`` imports both kernel modules directly and
times them against each other.
"""

import logging
import os

_log = logging.getLogger("intervalnet")

_requested = os.environ.get("INTERVALNET_BACKEND", "").strip().lower()
if _requested not in ("", "numpy", "numba"):
    raise ImportError(
        f"INTERVALNET_BACKEND must be 'numpy' or 'numba', got {_requested!r}"
    )

if _requested == "numpy":
    from . import _kernels_numpy as kernels
else:
    try:
        from . import _kernels_numba as kernels
    except ImportError:
        if _requested == "numba":
            raise
        _log.warning("numba unavailable; falling back to pure-numpy kernels")
        from . import _kernels_numpy as kernels


def backend_name() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return "numba" if kernels.__name__.endswith("numba") else "numpy"
