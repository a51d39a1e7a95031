"""Backend selection for the hot kernels.

Set ``CGCURVES_NUMBA=0`` in the environment to force the pure-numpy path.
When numba is missing the numpy path is used automatically.
"""
import importlib.util
import os

_flag = os.environ.get("CGCURVES_NUMBA", "1").strip().lower()
_requested = _flag not in ("0", "false", "no", "off")

HAVE_NUMBA = importlib.util.find_spec("numba") is not None

USE_NUMBA = _requested and HAVE_NUMBA


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
