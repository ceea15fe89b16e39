# cython: language_level=3, boundscheck=False, wraparound=False
"""libmpc kernel for truncated theta products (see ``_product_py``).

Arguments and results are gmpy2 ``mpc`` objects; the Python wrapper in
``witten_rigidity.theta`` converts from and to mpmath.
"""
from libc.stdlib cimport malloc, free

from gmpy2 cimport *

cdef extern from "mpc.h":
    void mpc_init2(mpc_ptr, mpfr_prec_t)
    void mpc_clear(mpc_ptr)
    int mpc_add(mpc_ptr, mpc_srcptr, mpc_srcptr, mpc_rnd_t)
    int mpc_sub(mpc_ptr, mpc_srcptr, mpc_srcptr, mpc_rnd_t)
    int mpc_mul(mpc_ptr, mpc_srcptr, mpc_srcptr, mpc_rnd_t)
    int mpc_div(mpc_ptr, mpc_srcptr, mpc_srcptr, mpc_rnd_t)
    int mpc_neg(mpc_ptr, mpc_srcptr, mpc_rnd_t)
    int mpc_set_ui(mpc_ptr, unsigned long, mpc_rnd_t)
    int mpc_ui_sub(mpc_ptr, unsigned long, mpc_srcptr, mpc_rnd_t)
    int mpc_add_ui(mpc_ptr, mpc_srcptr, unsigned long, mpc_rnd_t)
    int mpc_fma(mpc_ptr, mpc_srcptr, mpc_srcptr, mpc_srcptr, mpc_rnd_t)

import_gmpy2()

cdef inline void _mul_factor(mpc_t *series, mpc_srcptr c, mpc_t *e, int order,
                             mpc_ptr a0, mpc_ptr acc, mpc_ptr tmp):
    cdef int k, i
    mpc_add_ui(a0, c, 1, MPC_RNDNN)
    for k in range(order, -1, -1):
        mpc_set_ui(acc, 0, MPC_RNDNN)
        for i in range(k):
            mpc_mul(tmp, series[i], e[k - i], MPC_RNDNN)
            mpc_add(acc, acc, tmp, MPC_RNDNN)
        mpc_mul(acc, acc, c, MPC_RNDNN)
        mpc_mul(tmp, series[k], a0, MPC_RNDNN)
        mpc_add(series[k], tmp, acc, MPC_RNDNN)


def product_taylor(mpc z, mpc p1, mpc q, int sign, int nterms, int order,
                   e_plus, e_minus):
    """Same contract as ``_product_py.product_taylor`` on gmpy2 values."""
    cdef mpfr_prec_t prec = mpc_get_prec(z.c)
    cdef int n = order + 1
    cdef int j, k
    cdef mpc_t *series = <mpc_t *> malloc(n * sizeof(mpc_t))
    cdef mpc_t *ep = <mpc_t *> malloc(n * sizeof(mpc_t))
    cdef mpc_t *em = <mpc_t *> malloc(n * sizeof(mpc_t))
    cdef mpc_t zinv, pj, qj, c, scale, a0, acc, tmp
    cdef mpc item
    if series == NULL or ep == NULL or em == NULL:
        free(series); free(ep); free(em)
        raise MemoryError()
    for k in range(n):
        mpc_init2(series[k], prec)
        mpc_init2(ep[k], prec)
        mpc_init2(em[k], prec)
        mpc_set_ui(series[k], 1 if k == 0 else 0, MPC_RNDNN)
        item = e_plus[k]
        mpc_set(ep[k], item.c, MPC_RNDNN)
        item = e_minus[k]
        mpc_set(em[k], item.c, MPC_RNDNN)
    mpc_init2(zinv, prec); mpc_init2(pj, prec); mpc_init2(qj, prec)
    mpc_init2(c, prec); mpc_init2(scale, prec); mpc_init2(a0, prec)
    mpc_init2(acc, prec); mpc_init2(tmp, prec)
    try:
        mpc_set_ui(tmp, 1, MPC_RNDNN)
        mpc_div(zinv, tmp, z.c, MPC_RNDNN)
        mpc_set(pj, p1.c, MPC_RNDNN)
        mpc_set(qj, q.c, MPC_RNDNN)
        for j in range(nterms):
            mpc_mul(c, z.c, pj, MPC_RNDNN)
            if sign < 0:
                mpc_neg(c, c, MPC_RNDNN)
            _mul_factor(series, c, ep, order, a0, acc, tmp)
            mpc_mul(c, zinv, pj, MPC_RNDNN)
            if sign < 0:
                mpc_neg(c, c, MPC_RNDNN)
            _mul_factor(series, c, em, order, a0, acc, tmp)
            mpc_ui_sub(scale, 1, qj, MPC_RNDNN)
            for k in range(n):
                mpc_mul(series[k], series[k], scale, MPC_RNDNN)
            mpc_mul(pj, pj, q.c, MPC_RNDNN)
            mpc_mul(qj, qj, q.c, MPC_RNDNN)
        out = []
        for k in range(n):
            out.append(GMPy_MPC_From_mpc(series[k]))
        return out
    finally:
        for k in range(n):
            mpc_clear(series[k]); mpc_clear(ep[k]); mpc_clear(em[k])
        free(series); free(ep); free(em)
        mpc_clear(zinv); mpc_clear(pj); mpc_clear(qj); mpc_clear(c)
        mpc_clear(scale); mpc_clear(a0); mpc_clear(acc); mpc_clear(tmp)
