"""Pure-numpy Legendre/Christoffel kernels (fallback backend).

Mirrors the compiled backend operation-for-operation so both produce
bit-identical values.  Inputs are contiguous float64 arrays already
validated by the public wrappers in :mod:`riscoupling.legendre`.
"""

import numpy as np


def legendre_eval(n, x):
    """Return (P_n(x), P'_n(x)) via the forward three-term recurrence."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if n == 0:
        return np.ones_like(x), np.zeros_like(x)
    pm1 = np.ones_like(x)
    p = x.copy()
    for k in range(1, n):
        pm1, p = p, ((2.0 * k + 1.0) * x * p - k * pm1) / (k + 1.0)
    dp = np.empty_like(x)
    one_m_x2 = 1.0 - x * x
    inner = one_m_x2 > 0.0
    # (1 - x^2) P'_n = n (P_{n-1} - x P_n)
    dp[inner] = n * (pm1[inner] - x[inner] * p[inner]) / one_m_x2[inner]
    edge = ~inner
    if edge.any():
        sgn = np.where(x[edge] > 0.0, 1.0, (-1.0) ** (n - 1))
        dp[edge] = sgn * (0.5 * n * (n + 1.0))
    return p, dp


def christoffel_sum(n_terms, x):
    """Sum form: sum_{k<n_terms} (2k+1) P_k(x)^2."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    total = np.ones_like(x)
    if n_terms == 1:
        return total
    pm1 = np.ones_like(x)
    p = x.copy()
    total = total + 3.0 * p * p
    for k in range(2, n_terms):
        pm1, p = p, ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k
        total = total + (2.0 * k + 1.0) * p * p
    return total


def christoffel_cd(n_terms, x):
    """Christoffel-Darboux form: n (P'_n P_{n-1} - P'_{n-1} P_n)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = n_terms
    p, dp = legendre_eval(n, x)
    pm1, dpm1 = legendre_eval(n - 1, x)
    return n * (dp * pm1 - dpm1 * p)


def christoffel_deriv_form(n_terms, x):
    """Derivative form: (1 - x^2) P'_n^2 + n^2 P_n^2."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = n_terms
    p, dp = legendre_eval(n, x)
    return (1.0 - x * x) * dp * dp + (1.0 * n * n) * p * p


def christoffel_bound(n_terms, x):
    """Lower bound: n/(n+1) (1 - x^2) P'_n^2 + n^2 P_n^2."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = n_terms
    p, dp = legendre_eval(n, x)
    return (n / (n + 1.0)) * (1.0 - x * x) * dp * dp + (1.0 * n * n) * p * p


def b_factor(n_terms, x):
    """Stationarity factor n (x P_{n-1} - P_n) / (1 - x^2); NaN at |x| = 1."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = n_terms
    if n == 0:
        return np.zeros_like(x)
    p, _ = legendre_eval(n, x)
    pm1, _ = legendre_eval(n - 1, x)
    one_m_x2 = 1.0 - x * x
    out = np.full_like(x, np.nan)
    inner = one_m_x2 > 0.0
    out[inner] = n * (x[inner] * pm1[inner] - p[inner]) / one_m_x2[inner]
    return out
