"""Kernel selection.

The compiled ``_core`` extension is used when it imports; otherwise, or
when ``BERRYOPTICS_BACKEND=python`` is set, the pure-Python kernels run.
Tabulated envelopes always take the Python path because their profile is a
Python callable.
"""

from __future__ import annotations

import os

from . import _pure

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

_requested = os.environ.get("BERRYOPTICS_BACKEND", "auto").lower()
if _requested not in ("auto", "python", "compiled"):
    raise ImportError(f"BERRYOPTICS_BACKEND must be auto, python or compiled, not {_requested!r}")
if _requested == "compiled" and _core is None:
    raise ImportError("BERRYOPTICS_BACKEND=compiled but berryoptics._core is not built")

_active = _pure if _requested == "python" or _core is None else _core

NAME = "compiled" if _active is _core else "python"
HAS_COMPILED = _core is not None


def kernels(name: str | None = None):
    """Return the kernel module called ``name`` (``"python"``/``"compiled"``), default the active one."""
    if name is None:
        return _active
    if name == "python":
        return _pure
    if name == "compiled":
        if _core is None:
            raise RuntimeError("compiled kernels are not available")
        return _core
    raise ValueError(f"unknown backend {name!r}")


def integrate_two_level(kind, half_window, func, *args, backend: str | None = None, **kwargs):
    mod = kernels(backend)
    if kind == _pure.TABULATED:
        mod = _pure
    return mod.integrate_two_level(kind, half_window, func, *args, **kwargs)


def log_flux_excess(theta: float, a: float) -> float:
    return _active.log_flux_excess(theta, a)


def winding_terms(N: int, a: float, omega_alpha_tau: float, backend: str | None = None):
    return kernels(backend).winding_terms(N, a, omega_alpha_tau)


def compensated_sum(values, backend: str | None = None) -> float:
    return kernels(backend).compensated_sum(values)
