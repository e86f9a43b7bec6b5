"""Kernel backend selection.

Hot kernels run through numba's @njit by default and fall back to the pure
numpy implementations when numba is unavailable or when the environment
variable SLIPBALL_NUMBA is set to 0/false/off.  SLIPBALL_THREADS, when set,
caps the numba threading layer (the shipped kernels are serial, so this is
a safety valve rather than a tuning knob).
"""
import os

_OFF = {"0", "false", "off", "no"}


def _requested() -> bool:
    return os.environ.get("SLIPBALL_NUMBA", "").strip().lower() not in _OFF


try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    NUMBA_AVAILABLE = False

NUMBA_ENABLED = NUMBA_AVAILABLE and _requested()
BACKEND = "numba" if NUMBA_ENABLED else "numpy"

if NUMBA_ENABLED:
    _threads = os.environ.get("SLIPBALL_THREADS", "").strip()
    if _threads:
        try:
            numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
        except (ValueError, RuntimeError):
            pass


def jit_compiler():
    """Return the decorator used to build the accelerated kernel set."""
    if not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not importable")
    return numba.njit(cache=True)
