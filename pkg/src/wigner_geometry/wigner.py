"""Diagonal and non-diagonal Wigner functions of oscillator eigenstates.

Two routes are provided and cross-checked in the tests:

* closed forms in terms of Laguerre polynomials of
  lambda_a = 2 (P_a^2 + w_a^2 Q_a^2) / (hbar w_a), evaluated in the
  normal-mode coordinates (Q, P) of the model;
* a direct numeric Weyl transform of the wavefunctions.

Conventions: ``W[I, J]`` (and a cross Wigner function with ``ket=I``,
``bra=J``) is (2 pi hbar)^-N times the integral of
exp(-i p.y/hbar) psi_I(q + y/2) conj(psi_J(q - y/2)) over y.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import sqrtm

from .errors import AccuracyWarning
from .models import (
    OscillatorState,
    canonical_coordinates,
    check_domain,
    oscillator_state,
)
from .quadrature import QuadratureSpec, tensor_gauss_hermite
from .specfun import laguerre

__all__ = [
    "PhasePoint",
    "as_phase_arrays",
    "laguerre_argument",
    "wigner_fock",
    "f_lowered_raised_1",
    "f_lowered_raised_2",
    "wigner_diagonal",
    "wigner_offdiagonal_pm1",
    "wigner_offdiagonal_pm2",
    "wigner_level_matrix",
    "ring3_level_wigner",
    "weyl_nodes",
    "cross_wigner_matrix",
    "cross_wigner",
    "weyl_transform_numeric",
]


@dataclass(frozen=True)
class PhasePoint:
    """A phase-space point (q, p) with N coordinates each."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape:
            raise ValueError(f"q and p shapes differ: {q.shape} vs {p.shape}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)


def as_phase_arrays(q, p, n_modes):
    """Coerce ``q``, ``p`` to arrays whose last axis has length ``n_modes``."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if n_modes == 1 and (q.ndim == 0 or q.shape[-1] != 1):
        q, p = q[..., None], p[..., None]
    if q.shape != p.shape or q.shape[-1] != n_modes:
        raise ValueError(f"expected q, p with last axis {n_modes}, got {q.shape} and {p.shape}")
    return q, p


def laguerre_argument(Q, P, omega, hbar):
    """lambda = 4 H / (hbar w) with H = (P^2 + w^2 Q^2) / 2."""
    return 2.0 * (P * P + omega * omega * Q * Q) / (hbar * omega)


def wigner_fock(m, n, Q, P, omega, hbar=1.0):
    """Single-mode Wigner function of |m><n| for an oscillator of frequency ``omega``.

    For m >= n this is (-1)^n / (pi hbar) sqrt(n!/m!) (sqrt(2/(hbar w)) (w Q - i P))^(m-n)
    exp(-lambda/2) L_n^(m-n)(lambda); the m < n case is its complex conjugate.
    """
    if m < 0 or n < 0:
        raise ValueError("quantum numbers must be non-negative")
    if m < n:
        return np.conj(wigner_fock(n, m, Q, P, omega, hbar))
    Q = np.asarray(Q, dtype=float)
    P = np.asarray(P, dtype=float)
    lam = laguerre_argument(Q, P, omega, hbar)
    d = m - n
    log_ratio = 0.5 * (math.lgamma(n + 1) - math.lgamma(m + 1))
    radial = (-1) ** n / (math.pi * hbar) * math.exp(log_ratio) * np.exp(-lam / 2) * laguerre(n, d, lam, cap=max(64, m))
    if d == 0:
        return radial
    z = math.sqrt(2.0 / (hbar * omega)) * (omega * Q - 1j * P)
    return radial * z**d


def f_lowered_raised_1(n, sign, Q, P, omega, hbar=1.0):
    """f_{n+1,n} (sign=+1) or f_{n-1,n} (sign=-1) of one mode, written out explicitly."""
    lam = laguerre_argument(Q, P, omega, hbar)
    pref = (-1) ** (n + 1) * math.sqrt(2.0) / (math.pi * hbar**1.5 * math.sqrt(omega))
    if sign > 0:
        return pref * (1j * P - omega * Q) / math.sqrt(n + 1) * np.exp(-lam / 2) * laguerre(n, 1, lam)
    if n < 1:
        raise ValueError("f_{n-1,n} needs n >= 1")
    return pref * (1j * P + omega * Q) / math.sqrt(n) * np.exp(-lam / 2) * laguerre(n - 1, 1, lam)


def f_lowered_raised_2(n, sign, Q, P, omega, hbar=1.0):
    """f_{n+2,n} (sign=+1) or f_{n-2,n} (sign=-1) of one mode, written out explicitly."""
    lam = laguerre_argument(Q, P, omega, hbar)
    pref = (-1) ** (n + 1) * 2.0 / (math.pi * hbar**2 * omega)
    if sign > 0:
        return (pref * (P + 1j * omega * Q) ** 2 / math.sqrt((n + 1) * (n + 2))
                * np.exp(-lam / 2) * laguerre(n, 2, lam))
    if n < 2:
        raise ValueError("f_{n-2,n} needs n >= 2")
    return pref * (P - 1j * omega * Q) ** 2 / math.sqrt(n * (n - 1)) * np.exp(-lam / 2) * laguerre(n - 2, 2, lam)


def _labels(state, n_modes):
    labels = tuple(int(v) for v in np.atleast_1d(state))
    if len(labels) != n_modes:
        raise ValueError(f"expected {n_modes} quantum numbers, got {labels}")
    return labels


def wigner_diagonal(state, q, p, model, x):
    """Wigner function of the eigenstate ``state`` at phase points (q, p).

    Parameters
    ----------
    state : int or tuple of int
        Quantum numbers (n_1, ..., n_N).
    q, p : array_like
        Phase-space coordinates; the last axis indexes degrees of freedom
        (may be omitted for one degree of freedom).
    model : ModelSpec
    x : array_like
        Parameter point.

    Returns
    -------
    ndarray
        Real values, shape ``q.shape[:-1]``.
    """
    N = model.n_modes
    labels = _labels(state, N)
    q, p = as_phase_arrays(q, p, N)
    Q, P, w = canonical_coordinates(model, x, q, p)
    out = np.ones(q.shape[:-1])
    for a, n in enumerate(labels):
        out = out * wigner_fock(n, n, Q[..., a], P[..., a], w[a], model.hbar)
    return out


def _single_mode_f(order, n, mode, q, p, model, x, sign):
    N = model.n_modes
    if not 0 <= mode < N:
        raise ValueError(f"mode {mode} out of range for {N} modes")
    q, p = as_phase_arrays(q, p, N)
    Q, P, w = canonical_coordinates(model, x, q, p)
    fn = f_lowered_raised_1 if order == 1 else f_lowered_raised_2
    return fn(n, sign, Q[..., mode], P[..., mode], w[mode], model.hbar)


def wigner_offdiagonal_pm1(n, mode, q, p, model, x, sign=+1):
    """Single-mode f_{n+1,n} (``sign=+1``) or f_{n-1,n} (``sign=-1``) of normal mode ``mode``."""
    return _single_mode_f(1, n, mode, q, p, model, x, sign)


def wigner_offdiagonal_pm2(n, mode, q, p, model, x, sign=+1):
    """Single-mode f_{n+2,n} (``sign=+1``) or f_{n-2,n} (``sign=-1``) of normal mode ``mode``."""
    return _single_mode_f(2, n, mode, q, p, model, x, sign)


RING3_LEVEL = ((0, 0, 1), (0, 1, 0))


def ring3_level_wigner(Q, P, omega, hbar=1.0):
    """The four Wigner functions of the Ring3 level {psi_001, psi_010}, written out.

    ``Q``, ``P`` are normal-mode coordinates (last axis = mode) and
    ``omega`` = (w1, w2, w2). Returns shape ``Q.shape[:-1] + (2, 2)``.
    """
    w2 = omega[1]
    lam = [laguerre_argument(Q[..., a], P[..., a], omega[a], hbar) for a in range(3)]
    env = np.exp(-(lam[0] + lam[1] + lam[2]) / 2)
    out = np.empty(Q.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = (lam[2] - 1) * env / (math.pi * hbar) ** 3
    out[..., 1, 1] = (lam[1] - 1) * env / (math.pi * hbar) ** 3
    c = 2.0 / (math.pi**3 * hbar**4 * w2)
    out[..., 0, 1] = c * (P[..., 1] - 1j * w2 * Q[..., 1]) * (P[..., 2] + 1j * w2 * Q[..., 2]) * env
    out[..., 1, 0] = c * (P[..., 1] + 1j * w2 * Q[..., 1]) * (P[..., 2] - 1j * w2 * Q[..., 2]) * env
    return out


def wigner_level_matrix(level, q, p, model, x):
    """Matrix W_IJ of (non-)diagonal Wigner functions over a degenerate level.

    Returns complex values of shape ``q.shape[:-1] + (g, g)``; Hermitian in
    the last two axes at every point.
    """
    labels = tuple(tuple(lab) for lab in getattr(level, "labels", level))
    N = model.n_modes
    q, p = as_phase_arrays(q, p, N)
    Q, P, w = canonical_coordinates(model, x, q, p)
    if model.family == "Ring3" and labels == RING3_LEVEL:
        return ring3_level_wigner(Q, P, w, model.hbar)
    g = len(labels)
    out = np.empty(q.shape[:-1] + (g, g), dtype=complex)
    for I in range(g):
        for J in range(g):
            val = np.ones(q.shape[:-1], dtype=complex)
            for a in range(N):
                val = val * wigner_fock(labels[I][a], labels[J][a], Q[..., a], P[..., a], w[a], model.hbar)
            out[..., I, J] = val
    return out


# ---------------------------------------------------------------- numeric Weyl transform


def weyl_nodes(degree, n_modes, n_max=None):
    """Default inner Gauss-Hermite node count for a Weyl integrand of polynomial ``degree``.

    One degree of freedom uses 2 n_max + 16 nodes; with more, the minimum
    exact count plus one keeps the tensor grid small.
    """
    exact = degree // 2 + 1
    if n_modes == 1:
        n_max = degree if n_max is None else n_max
        return max(2 * n_max + 16, exact)
    return exact + 1


def _principal_inverse_sqrt(M):
    if M.shape == (1, 1):
        return np.array([[1.0 / np.sqrt(M[0, 0])]])
    R = sqrtm(np.linalg.inv(M))
    return np.asarray(R, dtype=complex)


def _shared_gaussian(states):
    a = states[0]
    return all(
        np.array_equal(s.scale, a.scale) and np.array_equal(s.U, a.U) and np.array_equal(s.phase, a.phase)
        for s in states[1:]
    )


def _basis(states):
    """Union of the labels in ``states`` and the (n_labels, n_states) coefficient matrix."""
    labels = sorted({lab for st in states for _, lab in st.terms})
    index = {lab: k for k, lab in enumerate(labels)}
    C = np.zeros((len(labels), len(states)), dtype=complex)
    for j, st in enumerate(states):
        for coef, lab in st.terms:
            C[index[lab], j] += coef
    return labels, C


def cross_wigner(ket, bra, q, p, nodes=None, chunk=4096):
    """Numeric cross Wigner function of two :class:`OscillatorState` objects.

    Computes (2 pi hbar)^-N * integral of exp(-i p.y/hbar) ket(q + y/2) conj(bra(q - y/2)) dy.
    The Gaussian part of the integrand is combined with the Fourier phase,
    the square is completed and the contour shifted, leaving a polynomial
    against exp(-|s|^2) that tensor Gauss-Hermite integrates exactly once
    ``2 * nodes - 1`` reaches the polynomial degree.

    Parameters
    ----------
    ket, bra : OscillatorState
    q, p : ndarray
        Shape (..., N).
    nodes : int, optional
        Inner nodes per dimension; see :func:`weyl_nodes`. A count below the
        exactness threshold triggers an :class:`AccuracyWarning`.

    Returns
    -------
    ndarray of complex, shape ``q.shape[:-1]``.
    """
    return cross_wigner_matrix([ket], [bra], q, p, nodes=nodes, chunk=chunk)[..., 0, 0]


def cross_wigner_matrix(kets, bras, q, p, nodes=None, chunk=4096):
    """All cross Wigner functions W[..., I, J] of ``kets[J]`` against ``bras[I]``.

    States within ``kets`` (and within ``bras``) that share one Gaussian are
    evaluated together, so the inner nodes and Hermite tables are built
    once per chunk of phase points.
    """
    if not (_shared_gaussian(kets) and _shared_gaussian(bras)):
        out = np.empty(np.shape(q)[:-1] + (len(bras), len(kets)), dtype=complex)
        for I, bra in enumerate(bras):
            for J, ket in enumerate(kets):
                out[..., I, J] = cross_wigner_matrix([ket], [bra], q, p, nodes, chunk)[..., 0, 0]
        return out
    ket, bra = kets[0], bras[0]
    N = ket.n_modes
    if bra.n_modes != N:
        raise ValueError("ket and bra act on different numbers of modes")
    hbar = ket.hbar
    q, p = as_phase_arrays(q, p, N)
    shape = q.shape[:-1]
    q = q.reshape(-1, N)
    p = p.reshape(-1, N)
    ket_labels, Ck = _basis(kets)
    bra_labels, Cb = _basis(bras)
    degree = max(sum(lab) for lab in ket_labels) + max(sum(lab) for lab in bra_labels)
    n_max = max(max(lab) for lab in ket_labels + bra_labels)
    nodes = weyl_nodes(degree, N, n_max) if nodes is None else int(nodes)
    if 2 * nodes - 1 < degree:
        warnings.warn(
            f"{nodes} Weyl nodes per dimension cannot integrate degree {degree} exactly",
            AccuracyWarning,
            stacklevel=2,
        )
    Ak = ket.precision()
    Ab = np.conj(bra.precision())
    M = (Ak + Ab) / 8.0
    Minv = np.linalg.inv(M)
    R = _principal_inverse_sqrt(M)
    det_r = np.linalg.det(R)
    lin = 0.5 * (Ab - Ak)
    quad = Ak + Ab
    s, w = tensor_gauss_hermite(nodes, N)
    rs = s @ R.T
    out = np.empty((len(q), len(bras), len(kets)), dtype=complex)
    for start in range(0, len(q), chunk):
        qc = q[start:start + chunk]
        pc = p[start:start + chunk]
        b = qc @ lin.T - 1j * pc / hbar
        y0 = 0.5 * b @ Minv.T
        const = 0.25 * np.einsum("ma,ab,mb->m", b, Minv, b) - 0.5 * np.einsum("ma,ab,mb->m", qc, quad, qc)
        y = y0[:, None, :] + rs[None, :, :]
        pk = ket.basis_values(qc[:, None, :] + 0.5 * y, ket_labels) @ Ck
        pb = bra.basis_values(qc[:, None, :] - 0.5 * y, bra_labels) @ Cb.conj()
        out[start:start + chunk] = (det_r * np.exp(const))[:, None, None] * np.einsum("s,msi,msj->mij", w, pb, pk)
    return (out / (2.0 * math.pi * hbar) ** N).reshape(shape + out.shape[1:])


def weyl_transform_numeric(bra_state, ket_state, q, p, model, x, grid=None):
    """Numeric Weyl transform (Wigner function) of |ket><bra| at ``x``.

    ``bra_state``/``ket_state`` are quantum-number tuples or
    :class:`OscillatorState` objects; ``grid`` is an optional
    :class:`QuadratureSpec` whose ``nodes_per_dim`` sets the inner node count.
    """
    check_domain(model, x)

    def build(st):
        return st if isinstance(st, OscillatorState) else oscillator_state(model, x, st)

    nodes = grid.nodes_per_dim if isinstance(grid, QuadratureSpec) else grid
    return cross_wigner(build(ket_state), build(bra_state), q, p, nodes=nodes)
