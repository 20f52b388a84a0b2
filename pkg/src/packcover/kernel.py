"""Selects the dual-averaging kernel at import time.

The compiled extension ``packcover._kernel`` is used when it was built;
otherwise the pure-Python ``packcover._kernel_py`` takes over. Both expose
the same ``run`` function and yield the same iterates.
"""

from __future__ import annotations

from . import _kernel_py

try:
    from . import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernel_py.run}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled.run

DEFAULT_BACKEND = "compiled" if _compiled is not None else "python"

STATUS_OK = _kernel_py.OK
STATUS_NONFINITE = _kernel_py.NONFINITE
STATUS_DOMAIN = _kernel_py.DOMAIN
STATUS_ZFLOOR = _kernel_py.ZFLOOR
STATUS_STEPRATIO = _kernel_py.STEPRATIO
STATUS_POSITIVITY = _kernel_py.POSITIVITY


def get_kernel(backend: str | None = None):
    name = DEFAULT_BACKEND if backend in (None, "auto") else backend
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown or unavailable backend {backend!r}; available: {sorted(BACKENDS)}"
        ) from None
