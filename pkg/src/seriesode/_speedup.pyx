# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled series summation kernel.

Mirrors ``_kernel_py.sum_series`` operation for operation: every step is
the same correctly-rounded MPFR/MPC primitive, so results are bit-identical
with the pure-Python kernel at equal precision.  The loop itself runs
without touching Python objects.
"""

cimport gmpy2 as g
from gmpy2 cimport mpc as MpcObj, mpfr as MpfrObj
from gmpy2 cimport (mpc_t, mpfr_t, mpc_ptr, mpfr_ptr, mpc_srcptr, mpfr_srcptr,
                    mpfr_prec_t, mpc_rnd_t, mpfr_rnd_t)

from libc.stdlib cimport malloc, free
from libc.limits cimport LONG_MIN

cdef extern from "mpfr.h":
    void mpfr_init2(mpfr_ptr, mpfr_prec_t) nogil
    void mpfr_clear(mpfr_ptr) nogil
    int mpfr_set(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t) nogil
    int mpfr_set_ui(mpfr_ptr, unsigned long, mpfr_rnd_t) nogil
    int mpfr_mul(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t) nogil
    int mpfr_fma(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t) nogil
    int mpfr_add(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t) nogil
    int mpfr_div(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t) nogil
    int mpfr_add_ui(mpfr_ptr, mpfr_srcptr, unsigned long, mpfr_rnd_t) nogil
    long mpfr_get_exp(mpfr_srcptr) nogil
    int mpfr_zero_p(mpfr_srcptr) nogil
    int mpfr_number_p(mpfr_srcptr) nogil
    mpfr_prec_t mpfr_get_prec(mpfr_srcptr) nogil
    cdef int MPFR_RNDN_ "MPFR_RNDN"

cdef extern from "mpc.h":
    void mpc_init2(mpc_ptr, mpfr_prec_t) nogil
    void mpc_clear(mpc_ptr) nogil
    int mpc_set(mpc_ptr, mpc_srcptr, mpc_rnd_t) nogil
    int mpc_set_ui(mpc_ptr, unsigned long, mpc_rnd_t) nogil
    int mpc_mul(mpc_ptr, mpc_srcptr, mpc_srcptr, mpc_rnd_t) nogil
    int mpc_fma(mpc_ptr, mpc_srcptr, mpc_srcptr, mpc_srcptr, mpc_rnd_t) nogil
    int mpc_add(mpc_ptr, mpc_srcptr, mpc_srcptr, mpc_rnd_t) nogil
    int mpc_div(mpc_ptr, mpc_srcptr, mpc_srcptr, mpc_rnd_t) nogil
    int mpc_add_ui(mpc_ptr, mpc_srcptr, unsigned long, mpc_rnd_t) nogil
    mpfr_ptr mpc_realref(mpc_ptr) nogil
    mpfr_ptr mpc_imagref(mpc_ptr) nogil
    cdef int MPC_RNDNN_ "MPC_RNDNN"

g.import_gmpy2()

KERNEL_NAME = "c"

cdef mpfr_rnd_t RNDN = <mpfr_rnd_t>MPFR_RNDN_
cdef mpc_rnd_t RNDNN = <mpc_rnd_t>MPC_RNDNN_

cdef long EXP_ZERO = LONG_MIN


cdef inline long _exp_fr(mpfr_srcptr x) nogil:
    if mpfr_zero_p(x):
        return EXP_ZERO
    return mpfr_get_exp(x)


cdef inline long _exp_c(mpc_ptr x) nogil:
    cdef long er = _exp_fr(mpc_realref(x))
    cdef long ei = _exp_fr(mpc_imagref(x))
    return er if er >= ei else ei


cdef inline object _pyexp(long e):
    return float("-inf") if e == EXP_ZERO else e


def sum_series_complex(MpcObj a0, list v_terms, MpcObj s2inv, MpcObj dplus,
                       MpcObj dminus, MpcObj nu, invz,
                       long stop_offset_bits, long k_consecutive,
                       long max_terms, bint want_derivative,
                       bint degenerate_first):
    """Complex-path kernel; same contract as ``_kernel_py.sum_series``."""
    cdef mpfr_prec_t prec = mpfr_get_prec(mpc_realref(a0.c))
    cdef Py_ssize_t n_coeffs = len(v_terms)
    cdef Py_ssize_t i, n
    cdef long m = 0, idx
    cdef long max_a_exp, max_a_at = 0
    cdef long max_da_exp = EXP_ZERO, max_da_at = 0
    cdef long below_count = 0
    cdef long e, de
    cdef bint converged = False, finite = True

    cdef mpc_t *vv = <mpc_t *>malloc(n_coeffs * sizeof(mpc_t))
    cdef mpc_t *buf = <mpc_t *>malloc(n_coeffs * sizeof(mpc_t))
    if vv == NULL or buf == NULL:
        free(vv); free(buf)
        raise MemoryError()
    cdef mpc_t psi, dpsi, acc, t1, t2, den, num, a_next, fct, tmp
    cdef MpcObj obj, inv_obj

    for i in range(n_coeffs):
        obj = <MpcObj>v_terms[i]
        mpc_init2(vv[i], prec)
        mpc_set(vv[i], obj.c, RNDNN)
        mpc_init2(buf[i], prec)
        mpc_set_ui(buf[i], 0, RNDNN)
    mpc_set(buf[0], a0.c, RNDNN)

    mpc_init2(psi, prec); mpc_init2(dpsi, prec)
    mpc_init2(acc, prec); mpc_init2(t1, prec); mpc_init2(t2, prec)
    mpc_init2(den, prec); mpc_init2(num, prec); mpc_init2(a_next, prec)
    mpc_init2(fct, prec); mpc_init2(tmp, prec)

    mpc_set(psi, a0.c, RNDNN)
    max_a_exp = _exp_c(psi)

    if want_derivative:
        inv_obj = <MpcObj>invz
        mpc_mul(tmp, a0.c, nu.c, RNDNN)
        mpc_mul(dpsi, tmp, inv_obj.c, RNDNN)
        max_da_exp = _exp_c(dpsi)

    with nogil:
        while m < max_terms:
            m += 1
            mpc_mul(acc, vv[0], buf[(m - 1) % n_coeffs], RNDNN)
            for n in range(1, n_coeffs):
                idx = m - 1 - n
                if idx >= 0:
                    mpc_fma(acc, vv[n], buf[idx % n_coeffs], acc, RNDNN)
            if degenerate_first and m == 1:
                mpc_set_ui(a_next, 0, RNDNN)
            else:
                mpc_add_ui(t1, dplus.c, <unsigned long>m, RNDNN)
                mpc_add_ui(t2, dminus.c, <unsigned long>m, RNDNN)
                mpc_mul(den, t1, t2, RNDNN)
                mpc_mul(num, acc, s2inv.c, RNDNN)
                mpc_div(a_next, num, den, RNDNN)
            if not (mpfr_number_p(mpc_realref(a_next))
                    and mpfr_number_p(mpc_imagref(a_next))):
                finite = False
                break
            mpc_set(buf[m % n_coeffs], a_next, RNDNN)
            mpc_add(psi, psi, a_next, RNDNN)
            e = _exp_c(a_next)
            if e != EXP_ZERO and e > max_a_exp:
                max_a_exp = e
                max_a_at = m
            if want_derivative:
                mpc_add_ui(fct, nu.c, <unsigned long>m, RNDNN)
                mpc_mul(tmp, a_next, fct, RNDNN)
                mpc_mul(tmp, tmp, inv_obj.c, RNDNN)
                mpc_add(dpsi, dpsi, tmp, RNDNN)
                de = _exp_c(tmp)
                if de != EXP_ZERO and de > max_da_exp:
                    max_da_exp = de
                    max_da_at = m
            if e < max_a_exp - stop_offset_bits:
                below_count += 1
                if below_count >= k_consecutive:
                    converged = True
                    break
            else:
                below_count = 0

    cdef MpcObj psi_out = g.GMPy_MPC_New(prec, prec, NULL)
    mpc_set(psi_out.c, psi, RNDNN)
    dpsi_out = None
    cdef MpcObj dtmp
    if want_derivative:
        dtmp = g.GMPy_MPC_New(prec, prec, NULL)
        mpc_set(dtmp.c, dpsi, RNDNN)
        dpsi_out = dtmp

    for i in range(n_coeffs):
        mpc_clear(vv[i]); mpc_clear(buf[i])
    free(vv); free(buf)
    mpc_clear(psi); mpc_clear(dpsi); mpc_clear(acc); mpc_clear(t1)
    mpc_clear(t2); mpc_clear(den); mpc_clear(num); mpc_clear(a_next)
    mpc_clear(fct); mpc_clear(tmp)

    return (psi_out, dpsi_out, _pyexp(max_a_exp), max_a_at,
            _pyexp(max_da_exp) if want_derivative else None,
            max_da_at if want_derivative else None,
            m, converged and finite)


def sum_series_real(MpfrObj a0, list v_terms, MpfrObj s2inv, MpfrObj dplus,
                    MpfrObj dminus, MpfrObj nu, invz,
                    long stop_offset_bits, long k_consecutive,
                    long max_terms, bint want_derivative,
                    bint degenerate_first):
    """All-real kernel; same contract as ``_kernel_py.sum_series``."""
    cdef mpfr_prec_t prec = mpfr_get_prec(a0.f)
    cdef Py_ssize_t n_coeffs = len(v_terms)
    cdef Py_ssize_t i, n
    cdef long m = 0, idx
    cdef long max_a_exp, max_a_at = 0
    cdef long max_da_exp = EXP_ZERO, max_da_at = 0
    cdef long below_count = 0
    cdef long e, de
    cdef bint converged = False, finite = True

    cdef mpfr_t *vv = <mpfr_t *>malloc(n_coeffs * sizeof(mpfr_t))
    cdef mpfr_t *buf = <mpfr_t *>malloc(n_coeffs * sizeof(mpfr_t))
    if vv == NULL or buf == NULL:
        free(vv); free(buf)
        raise MemoryError()
    cdef mpfr_t psi, dpsi, acc, t1, t2, den, num, a_next, fct, tmp
    cdef MpfrObj obj, inv_obj

    for i in range(n_coeffs):
        obj = <MpfrObj>v_terms[i]
        mpfr_init2(vv[i], prec)
        mpfr_set(vv[i], obj.f, RNDN)
        mpfr_init2(buf[i], prec)
        mpfr_set_ui(buf[i], 0, RNDN)
    mpfr_set(buf[0], a0.f, RNDN)

    mpfr_init2(psi, prec); mpfr_init2(dpsi, prec)
    mpfr_init2(acc, prec); mpfr_init2(t1, prec); mpfr_init2(t2, prec)
    mpfr_init2(den, prec); mpfr_init2(num, prec); mpfr_init2(a_next, prec)
    mpfr_init2(fct, prec); mpfr_init2(tmp, prec)

    mpfr_set(psi, a0.f, RNDN)
    max_a_exp = _exp_fr(psi)

    if want_derivative:
        inv_obj = <MpfrObj>invz
        mpfr_mul(tmp, a0.f, nu.f, RNDN)
        mpfr_mul(dpsi, tmp, inv_obj.f, RNDN)
        max_da_exp = _exp_fr(dpsi)

    with nogil:
        while m < max_terms:
            m += 1
            mpfr_mul(acc, vv[0], buf[(m - 1) % n_coeffs], RNDN)
            for n in range(1, n_coeffs):
                idx = m - 1 - n
                if idx >= 0:
                    mpfr_fma(acc, vv[n], buf[idx % n_coeffs], acc, RNDN)
            if degenerate_first and m == 1:
                mpfr_set_ui(a_next, 0, RNDN)
            else:
                mpfr_add_ui(t1, dplus.f, <unsigned long>m, RNDN)
                mpfr_add_ui(t2, dminus.f, <unsigned long>m, RNDN)
                mpfr_mul(den, t1, t2, RNDN)
                mpfr_mul(num, acc, s2inv.f, RNDN)
                mpfr_div(a_next, num, den, RNDN)
            if not mpfr_number_p(a_next):
                finite = False
                break
            mpfr_set(buf[m % n_coeffs], a_next, RNDN)
            mpfr_add(psi, psi, a_next, RNDN)
            e = _exp_fr(a_next)
            if e != EXP_ZERO and e > max_a_exp:
                max_a_exp = e
                max_a_at = m
            if want_derivative:
                mpfr_add_ui(fct, nu.f, <unsigned long>m, RNDN)
                mpfr_mul(tmp, a_next, fct, RNDN)
                mpfr_mul(tmp, tmp, inv_obj.f, RNDN)
                mpfr_add(dpsi, dpsi, tmp, RNDN)
                de = _exp_fr(tmp)
                if de != EXP_ZERO and de > max_da_exp:
                    max_da_exp = de
                    max_da_at = m
            if e < max_a_exp - stop_offset_bits:
                below_count += 1
                if below_count >= k_consecutive:
                    converged = True
                    break
            else:
                below_count = 0

    cdef MpfrObj psi_out = g.GMPy_MPFR_New(prec, NULL)
    mpfr_set(psi_out.f, psi, RNDN)
    dpsi_out = None
    cdef MpfrObj dtmp
    if want_derivative:
        dtmp = g.GMPy_MPFR_New(prec, NULL)
        mpfr_set(dtmp.f, dpsi, RNDN)
        dpsi_out = dtmp

    for i in range(n_coeffs):
        mpfr_clear(vv[i]); mpfr_clear(buf[i])
    free(vv); free(buf)
    mpfr_clear(psi); mpfr_clear(dpsi); mpfr_clear(acc); mpfr_clear(t1)
    mpfr_clear(t2); mpfr_clear(den); mpfr_clear(num); mpfr_clear(a_next)
    mpfr_clear(fct); mpfr_clear(tmp)

    return (psi_out, dpsi_out, _pyexp(max_a_exp), max_a_at,
            _pyexp(max_da_exp) if want_derivative else None,
            max_da_at if want_derivative else None,
            m, converged and finite)
