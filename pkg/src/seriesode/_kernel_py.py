"""Pure-Python series summation kernel.

Reference implementation of the hot loop; the compiled kernel in
``_speedup`` mirrors it operation for operation.  Every arithmetic step is
a single correctly-rounded MPFR/MPC primitive, so both kernels produce
bit-identical results at the same precision.

The loop keeps only the last N+1 terms (ring buffer), tracks the largest
term exponents for the roundoff diagnostics, and stops once K consecutive
terms fall a fixed number of bits below the running maximum.
"""

from __future__ import annotations

from typing import NamedTuple, Optional, Sequence

import gmpy2

from .mpcore import ZERO_EXPONENT, exponent_of

__all__ = ["KernelOutput", "sum_series"]


class KernelOutput(NamedTuple):
    psi: object                 # mpfr or mpc
    dpsi: Optional[object]      # same type, or None
    max_a_exp: float            # binary exponent of largest |A_m|
    max_a_at: int
    max_da_exp: Optional[float]
    max_da_at: Optional[int]
    terms_summed: int
    converged: bool


def sum_series(
    a0,
    v_terms: Sequence,
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
) -> KernelOutput:
    """Sum A_m terms of the series solution; see module docstring.

    Works for both the all-real path (mpfr inputs) and the complex path
    (mpc inputs); must be called inside a gmpy2 context at the working
    precision.  ``v_terms[n]`` holds v_n * z^(n+1); ``dplus``/``dminus``
    hold nu - nu_plus / nu - nu_minus; ``invz`` may be None when no
    derivative is requested.
    """
    fma = gmpy2.fma
    n_coeffs = len(v_terms)

    # ring buffer of the last n_coeffs terms; buf[m % n_coeffs] = A_m
    zero = a0 - a0
    buf = [zero] * n_coeffs
    buf[0] = a0

    psi = a0
    max_a_exp = exponent_of(a0)
    max_a_at = 0

    dpsi = None
    max_da_exp: Optional[float] = None
    max_da_at: Optional[int] = None
    if want_derivative:
        t = a0 * nu
        dpsi = t * invz
        max_da_exp = exponent_of(dpsi)
        max_da_at = 0

    below_count = 0
    m = 0
    converged = False
    while m < max_terms:
        m += 1
        # numerator: sum_n V_n(z) * A_{m-1-n}
        acc = v_terms[0] * buf[(m - 1) % n_coeffs]
        for n in range(1, n_coeffs):
            idx = m - 1 - n
            if idx >= 0:
                acc = fma(v_terms[n], buf[idx % n_coeffs], acc)
        if degenerate_first and m == 1:
            # 0/0 step at an ordinary point: pin A_1 = 0, which selects the
            # pure lower-exponent solution as the first basis element
            a_next = zero
        else:
            t1 = dplus + m
            t2 = dminus + m
            den = t1 * t2
            num = acc * s2inv
            a_next = num / den
        if not _is_finite(a_next):
            break
        buf[m % n_coeffs] = a_next
        psi = psi + a_next
        e = exponent_of(a_next)
        if e > max_a_exp:
            max_a_exp = e
            max_a_at = m
        if want_derivative:
            f = nu + m
            t = a_next * f
            da = t * invz
            dpsi = dpsi + da
            de = exponent_of(da)
            if de > max_da_exp:
                max_da_exp = de
                max_da_at = m
        if e < max_a_exp - stop_offset_bits:
            below_count += 1
            if below_count >= k_consecutive:
                converged = True
                break
        else:
            below_count = 0

    return KernelOutput(
        psi=psi,
        dpsi=dpsi,
        max_a_exp=max_a_exp,
        max_a_at=max_a_at,
        max_da_exp=max_da_exp,
        max_da_at=max_da_at,
        terms_summed=m,
        converged=converged,
    )


def _is_finite(x) -> bool:
    try:
        return gmpy2.is_finite(x)
    except TypeError:
        return gmpy2.is_finite(x.real) and gmpy2.is_finite(x.imag)
