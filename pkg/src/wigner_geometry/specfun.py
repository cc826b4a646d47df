"""Hermite and Laguerre evaluations used by the oscillator Wigner functions.

All routines run three-term recurrences. They accept scalars or numpy arrays
for the argument; the internal helpers also accept complex arrays, which the
numeric Weyl transform needs after its contour shift.
"""

import math

import numpy as np

__all__ = [
    "DEGREE_CAP",
    "hermite_poly",
    "hermite_function",
    "hermite_function_table",
    "normalized_hermite_table",
    "laguerre",
    "laguerre_derivative",
    "laguerre_metric_combination",
]

#: Largest polynomial degree accepted by default.
DEGREE_CAP = 64

_PI_QUARTER = math.pi ** -0.25


def _check_degree(n, name="n", cap=None):
    if int(n) != n or n < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {n!r}")
    cap = DEGREE_CAP if cap is None else cap
    if n > cap:
        raise ValueError(f"{name}={n} exceeds the degree cap {cap}")
    return int(n)


def _as_output(values, xi):
    return values if np.ndim(xi) else values[()]


def hermite_poly(n, xi, cap=None):
    """Physicists' Hermite polynomial H_n(xi).

    Uses H_{k+1} = 2 xi H_k - 2 k H_{k-1}.
    """
    n = _check_degree(n, cap=cap)
    xi = np.asarray(xi, dtype=float)
    h_prev = np.zeros_like(xi)
    h = np.ones_like(xi)
    for k in range(n):
        h_prev, h = h, 2.0 * xi * h - 2.0 * k * h_prev
    return _as_output(h, xi)


def normalized_hermite_table(n_max, xi):
    """Polynomial parts of the Hermite functions for degrees 0..n_max.

    Returns an array of shape ``(n_max + 1,) + xi.shape`` whose row k holds
    (2^k k! sqrt(pi))^(-1/2) H_k(xi), built without factorials. ``xi`` may be
    complex.
    """
    xi = np.asarray(xi)
    dtype = np.result_type(xi.dtype, float)
    table = np.empty((n_max + 1,) + xi.shape, dtype=dtype)
    table[0] = _PI_QUARTER
    if n_max >= 1:
        table[1] = math.sqrt(2.0) * xi * table[0]
    for k in range(1, n_max):
        table[k + 1] = (
            math.sqrt(2.0 / (k + 1)) * xi * table[k]
            - math.sqrt(k / (k + 1)) * table[k - 1]
        )
    return table


def hermite_function_table(n_max, xi):
    """Hermite functions chi_0..chi_{n_max} at ``xi`` (rows indexed by degree)."""
    xi = np.asarray(xi)
    return normalized_hermite_table(n_max, xi) * np.exp(-0.5 * xi * xi)


def hermite_function(n, xi, cap=None):
    """Normalized Hermite function chi_n(xi) = (2^n n! sqrt(pi))^(-1/2) e^(-xi^2/2) H_n(xi).

    The recurrence runs on chi directly, so large degrees do not overflow.

    Parameters
    ----------
    n : int
        Degree, ``0 <= n <= cap``.
    xi : float or array_like
        Real argument.

    Returns
    -------
    float or ndarray
    """
    n = _check_degree(n, cap=cap)
    xi = np.asarray(xi, dtype=float)
    return _as_output(hermite_function_table(n, xi)[n], xi)


def laguerre(n, alpha, lam, cap=None):
    """Associated Laguerre polynomial L_n^(alpha)(lam).

    Recurrence: (k+1) L_{k+1} = (2k + 1 + alpha - lam) L_k - (k + alpha) L_{k-1}.
    """
    n = _check_degree(n, cap=cap)
    alpha = _check_degree(alpha, name="alpha", cap=cap)
    lam = np.asarray(lam, dtype=float)
    l_prev = np.zeros_like(lam)
    l_cur = np.ones_like(lam)
    for k in range(n):
        l_prev, l_cur = l_cur, ((2 * k + 1 + alpha - lam) * l_cur - (k + alpha) * l_prev) / (k + 1)
    return _as_output(l_cur, lam)


def laguerre_derivative(n, lam, cap=None):
    """d L_n / d lam = -L_{n-1}^(1)(lam) (zero for n = 0)."""
    n = _check_degree(n, cap=cap)
    if n == 0:
        return _as_output(np.zeros_like(np.asarray(lam, dtype=float)), np.asarray(lam))
    return -laguerre(n - 1, 1, lam, cap=cap)


def laguerre_metric_combination(n, lam, cap=None):
    """L_n(lam) - 2 L_n'(lam), the radial factor of the Wigner parameter derivative."""
    return laguerre(n, 0, lam, cap=cap) - 2.0 * laguerre_derivative(n, lam, cap=cap)
