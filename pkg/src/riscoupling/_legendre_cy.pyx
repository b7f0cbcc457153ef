# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Legendre/Christoffel kernels.

Same arithmetic, in the same order, as the numpy fallback in
``_legendre_py`` so both backends return bit-identical values
(the extension is built with -ffp-contract=off).
"""

import numpy as np


cdef inline void _pair(int n, double xv, double *p_out, double *pm1_out) noexcept nogil:
    # forward recurrence up to degree n; pm1 receives P_{n-1}
    cdef double pm1 = 1.0
    cdef double p = xv
    cdef double tmp
    cdef int k
    if n == 0:
        p_out[0] = 1.0
        pm1_out[0] = 0.0
        return
    for k in range(1, n):
        tmp = ((2.0 * k + 1.0) * xv * p - k * pm1) / (k + 1.0)
        pm1 = p
        p = tmp
    p_out[0] = p
    pm1_out[0] = pm1


cdef inline double _deriv(int n, double xv, double p, double pm1) noexcept nogil:
    cdef double one_m_x2 = 1.0 - xv * xv
    cdef double sgn
    if one_m_x2 > 0.0:
        return n * (pm1 - xv * p) / one_m_x2
    sgn = 1.0 if xv > 0.0 else (1.0 if (n - 1) % 2 == 0 else -1.0)
    return sgn * (0.5 * n * (n + 1.0))


def legendre_eval(int n, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] xv = x
    cdef Py_ssize_t m = xv.shape[0]
    p_arr = np.empty(m, dtype=np.float64)
    dp_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] p_out = p_arr
    cdef double[::1] dp_out = dp_arr
    cdef Py_ssize_t i
    cdef double p, pm1
    with nogil:
        for i in range(m):
            _pair(n, xv[i], &p, &pm1)
            p_out[i] = p
            dp_out[i] = _deriv(n, xv[i], p, pm1)
    return p_arr, dp_arr


def christoffel_sum(int n_terms, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] xv = x
    cdef Py_ssize_t m = xv.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int k
    cdef double total, pm1, p, tmp, xx
    with nogil:
        for i in range(m):
            xx = xv[i]
            total = 1.0
            if n_terms > 1:
                pm1 = 1.0
                p = xx
                total = total + 3.0 * p * p
                for k in range(2, n_terms):
                    tmp = ((2.0 * k - 1.0) * xx * p - (k - 1.0) * pm1) / k
                    pm1 = p
                    p = tmp
                    total = total + (2.0 * k + 1.0) * p * p
            out[i] = total
    return out_arr


def christoffel_cd(int n_terms, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] xv = x
    cdef Py_ssize_t m = xv.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int n = n_terms
    cdef double p, pm1, dp, q, qm1, dq
    with nogil:
        for i in range(m):
            _pair(n, xv[i], &p, &pm1)
            dp = _deriv(n, xv[i], p, pm1)
            _pair(n - 1, xv[i], &q, &qm1)
            dq = _deriv(n - 1, xv[i], q, qm1)
            out[i] = n * (dp * q - dq * p)
    return out_arr


def christoffel_deriv_form(int n_terms, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] xv = x
    cdef Py_ssize_t m = xv.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int n = n_terms
    cdef double p, pm1, dp
    with nogil:
        for i in range(m):
            _pair(n, xv[i], &p, &pm1)
            dp = _deriv(n, xv[i], p, pm1)
            out[i] = (1.0 - xv[i] * xv[i]) * dp * dp + (1.0 * n * n) * p * p
    return out_arr


def christoffel_bound(int n_terms, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] xv = x
    cdef Py_ssize_t m = xv.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int n = n_terms
    cdef double p, pm1, dp
    with nogil:
        for i in range(m):
            _pair(n, xv[i], &p, &pm1)
            dp = _deriv(n, xv[i], p, pm1)
            out[i] = (n / (n + 1.0)) * (1.0 - xv[i] * xv[i]) * dp * dp + (1.0 * n * n) * p * p
    return out_arr


def b_factor(int n_terms, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] xv = x
    cdef Py_ssize_t m = xv.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int n = n_terms
    cdef double p, pm1, one_m_x2
    cdef double nan = <double> np.nan
    with nogil:
        for i in range(m):
            one_m_x2 = 1.0 - xv[i] * xv[i]
            if n == 0:
                out[i] = 0.0
            elif one_m_x2 > 0.0:
                _pair(n, xv[i], &p, &pm1)
                out[i] = n * (xv[i] * pm1 - p) / one_m_x2
            else:
                out[i] = nan
    return out_arr
