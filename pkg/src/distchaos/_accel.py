"""Backend switch for the hot kernels.

The numba path is used whenever numba imports cleanly.  Setting the
environment variable ``DISTCHAOS_BACKEND=numpy`` before the package is
imported forces the vectorised numpy implementations instead; this is the
reference path used by the parity tests and the benchmark.
"""

import os

_requested = os.environ.get("DISTCHAOS_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"DISTCHAOS_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"
