"""Backend selection for the hot numeric kernels.

The package ships two implementations of every inner loop: a numba-compiled
one and a pure-numpy one.  Selection happens once at import time from the
``VORTEXLAB_BACKEND`` environment variable:

* unset or ``"numba"``  -> numba kernels when numba imports, numpy otherwise
* ``"numpy"``           -> force the pure-numpy path

Both backends produce bitwise-reproducible results for identical inputs;
they are not required to agree bitwise with each other.
"""

import os

_requested = os.environ.get("VORTEXLAB_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"VORTEXLAB_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

if _requested == "numpy":
    USE_NUMBA = False
else:
    USE_NUMBA = HAS_NUMBA


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def num_threads() -> int:
    if USE_NUMBA:
        import numba

        return numba.get_num_threads()
    return 1


def set_threads(n: int) -> None:
    """Cap solver-level parallelism; a no-op on the numpy backend."""
    if USE_NUMBA and n is not None and n >= 1:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
