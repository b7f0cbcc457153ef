"""Legendre-polynomial and reciprocal-Christoffel-function kernels.

A compiled Cython backend is preferred when available; a numpy fallback
with identical arithmetic is selected otherwise.  Set
``RISCOUPLING_BACKEND=python`` or ``=cython`` to force a choice
(``cython`` raises if the extension was not built).

The reciprocal Christoffel function

    sum_{k=0}^{n-1} (2k+1) P_k(x)^2

is the zero-spacing limit of the coupled transmit array gain and is the
workhorse of the asymptotic analysis.  Three algebraically equal forms are
computed and cross-checked: the defining sum, the Christoffel-Darboux
product form, and the (1-x^2) P'_n^2 + n^2 P_n^2 form.
"""

from __future__ import annotations

import os

import numpy as np

_choice = os.environ.get("RISCOUPLING_BACKEND", "auto").lower()
if _choice not in ("auto", "python", "cython"):
    raise ValueError(f"RISCOUPLING_BACKEND must be auto|python|cython, got {_choice!r}")

if _choice == "python":
    from . import _legendre_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _legendre_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _choice == "cython":
            raise
        from . import _legendre_py as _impl

        BACKEND = "python"

#: Agreement tolerance between the three Christoffel forms (relative).
FORM_AGREEMENT_RTOL = 1e-10


def _validated(x, name: str = "x") -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    flat = np.ascontiguousarray(np.atleast_1d(arr))
    if not np.isfinite(flat).all() or np.abs(flat).max(initial=0.0) > 1.0:
        raise ValueError(f"{name} must lie in [-1, 1]")
    return flat, scalar


def _check_degree(n: int, minimum: int = 0) -> int:
    if int(n) != n or n < minimum:
        raise ValueError(f"degree must be an integer >= {minimum}, got {n}")
    return int(n)


def legendre_value_and_derivative(n: int, x):
    """P_n(x) and P'_n(x) on [-1, 1]; scalar in, scalar out."""
    n = _check_degree(n, 0)
    flat, scalar = _validated(x)
    p, dp = _impl.legendre_eval(n, flat)
    if scalar:
        return float(p[0]), float(dp[0])
    return p, dp


def christoffel_function(n: int, x):
    """Reciprocal Christoffel function; cross-checks all three forms.

    Raises ``FloatingPointError`` if the forms disagree beyond
    ``FORM_AGREEMENT_RTOL`` relative -- that would indicate a numerical
    defect, not a modeling condition, so it is loud.
    """
    n = _check_degree(n, 1)
    flat, scalar = _validated(x)
    f = _impl.christoffel_sum(n, flat)
    cd = _impl.christoffel_cd(n, flat)
    df = _impl.christoffel_deriv_form(n, flat)
    scale = np.abs(f)
    err = np.maximum(np.abs(f - cd), np.abs(f - df))
    if (err > FORM_AGREEMENT_RTOL * scale).any():
        worst = float((err / scale).max())
        raise FloatingPointError(
            f"Christoffel form disagreement {worst:.3e} (n={n})"
        )
    return float(f[0]) if scalar else f


def christoffel_forms(n: int, x):
    """The three Christoffel forms (sum, Christoffel-Darboux, derivative)."""
    n = _check_degree(n, 1)
    flat, _ = _validated(x)
    return (
        _impl.christoffel_sum(n, flat),
        _impl.christoffel_cd(n, flat),
        _impl.christoffel_deriv_form(n, flat),
    )


def christoffel_lower_bound(n: int, x):
    """The n/(n+1) (1-x^2) P'_n^2 + n^2 P_n^2 minorant of the sum form."""
    n = _check_degree(n, 1)
    flat, scalar = _validated(x)
    g = _impl.christoffel_bound(n, flat)
    return float(g[0]) if scalar else g


def stationarity_factor(n: int, x):
    """b(x) = n (x P_{n-1} - P_n)/(1-x^2); NaN at the endpoints."""
    n = _check_degree(n, 1)
    flat, scalar = _validated(x)
    b = _impl.b_factor(n, flat)
    return float(b[0]) if scalar else b
