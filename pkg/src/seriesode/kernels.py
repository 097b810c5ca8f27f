"""Kernel selection: compiled extension when available, pure Python otherwise.

The two kernels implement the identical operation sequence with
correctly-rounded primitives, so they return bit-identical results; the
compiled one only removes interpreter dispatch from the inner loop.  The
active kernel is chosen at import time and can be overridden with the
``SERIESODE_KERNEL`` environment variable (``c`` | ``python`` | ``auto``)
or per call.
"""

from __future__ import annotations

import os
from typing import Optional

from gmpy2 import mpfr

from . import _kernel_py
from ._kernel_py import KernelOutput

try:
    from . import _speedup
except ImportError:  # extension not built; pure-Python fallback
    _speedup = None

__all__ = [
    "KernelOutput",
    "available_kernels",
    "default_kernel",
    "resolve_kernel",
    "sum_series",
]


def available_kernels() -> tuple:
    return ("c", "python") if _speedup is not None else ("python",)


def default_kernel() -> str:
    env = os.environ.get("SERIESODE_KERNEL", "auto").strip().lower()
    if env in ("", "auto"):
        return "c" if _speedup is not None else "python"
    if env not in ("c", "python"):
        raise ValueError(f"SERIESODE_KERNEL must be c|python|auto, got {env!r}")
    if env == "c" and _speedup is None:
        raise RuntimeError("SERIESODE_KERNEL=c but the compiled kernel is not built")
    return env


def resolve_kernel(name: Optional[str]) -> str:
    if name is None or name == "auto":
        return default_kernel()
    if name not in ("c", "python"):
        raise ValueError(f"unknown kernel {name!r}")
    if name == "c" and _speedup is None:
        raise RuntimeError("compiled kernel requested but not built")
    return name


def sum_series(
    a0,
    v_terms,
    s2inv,
    dplus,
    dminus,
    nu,
    invz,
    stop_offset_bits: int,
    k_consecutive: int,
    max_terms: int,
    want_derivative: bool,
    degenerate_first: bool,
    kernel: Optional[str] = None,
) -> KernelOutput:
    """Run the series summation with the selected kernel."""
    which = resolve_kernel(kernel)
    if which == "python":
        return _kernel_py.sum_series(
            a0, v_terms, s2inv, dplus, dminus, nu, invz,
            stop_offset_bits, k_consecutive, max_terms,
            want_derivative, degenerate_first,
        )
    fn = (
        _speedup.sum_series_real
        if isinstance(a0, mpfr)
        else _speedup.sum_series_complex
    )
    out = fn(
        a0, list(v_terms), s2inv, dplus, dminus, nu, invz,
        stop_offset_bits, k_consecutive, max_terms,
        want_derivative, degenerate_first,
    )
    return KernelOutput(*out)
