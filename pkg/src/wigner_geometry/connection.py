"""Phase-space connection fields.

The field of a (possibly degenerate) eigenbasis {psi_I} at parameter x is

    A_iIJ(q, p) = i * integral dy exp(-i p.y/hbar) d_i psi_J(q + y/2) conj(psi_I(q - y/2)),

the Weyl symbol of i |d_i psi_J><psi_I|. Its phase-space integral divided by
(2 pi hbar)^N is the Berry (Wilczek-Zee) connection i <psi_I | d_i psi_J>, and
Im A_iKK = (2 pi hbar)^N / 2 * d_i W_KK.

The numeric route differentiates the wavefunction by central differences
in x and runs the numeric Weyl transform; the closed forms for the
generalized oscillator and for N coupled oscillators serve as oracles.
"""

import math

import numpy as np

from .errors import ModelDomainError
from .models import (
    DegenerateLevel,
    NormalModeData,
    check_domain,
    level_state_builder,
)
from .quadrature import FDSpec, fd_derivative
from .wigner import as_phase_arrays, cross_wigner_matrix, wigner_fock

__all__ = [
    "a_field_tensor",
    "a_field_numeric",
    "a_field_gho",
    "a_field_nosc",
    "xi_gho",
    "xi_nosc",
    "theta_nosc",
]


def a_field_tensor(build, q, p, x, n_params, fd=FDSpec(), nodes=None, indices=None):
    """All components A_iIJ of the numeric connection field.

    Parameters
    ----------
    build : callable
        ``build(x) -> list[OscillatorState]``, the basis at ``x`` (see
        :func:`models.level_state_builder`).
    q, p : ndarray
        Phase points, shape (M, N).
    x : array_like
        Parameter point.
    n_params : int
        Number of parameters m.
    indices : sequence of int, optional
        Parameter indices to compute (default: all).

    Returns
    -------
    ndarray, shape (len(indices), M, g, g), complex.
    """
    x = np.asarray(x, dtype=float)
    bras = build(x)
    N = bras[0].n_modes
    pref = 1j * (2.0 * math.pi * bras[0].hbar) ** N
    indices = range(n_params) if indices is None else indices

    def kets_against_bras(xs):
        return cross_wigner_matrix(build(xs), bras, q, p, nodes=nodes)

    return np.stack([pref * fd_derivative(kets_against_bras, x, i, fd) for i in indices])


def _split_state(model, state):
    """Return (labels, I, J) from a label tuple or a (level, I, J) triple."""
    if isinstance(state, tuple) and len(state) == 3 and not isinstance(state[0], (int, np.integer)):
        level, I, J = state
        labels = level.labels if isinstance(level, DegenerateLevel) else level
        return [tuple(lab) for lab in labels], int(I), int(J)
    labels = tuple(int(n) for n in np.atleast_1d(state))
    if len(labels) != model.n_modes:
        raise ValueError(f"{model.family} has {model.n_modes} modes, got labels {labels}")
    return [labels], 0, 0


def a_field_numeric(i, state, q, p, model, x, fd=FDSpec(), nodes=None, gauge=None, mixing=None):
    """Numeric connection field component ``i`` at phase points (q, p).

    Parameters
    ----------
    i : int
        Parameter index.
    state : tuple
        Quantum numbers of a nondegenerate state, or ``(level, I, J)`` with
        ``level`` a :class:`DegenerateLevel` (or list of labels) for the
        non-Abelian field A_iIJ.
    gauge : callable, optional
        Phase alpha(x) multiplying every basis state by exp(i alpha).
    mixing : callable or ndarray, optional
        Unitary V(x) mixing the level basis.

    Returns
    -------
    ndarray of complex, shape ``q.shape[:-1]``.
    """
    x = np.asarray(x, dtype=float)
    check_domain(model, x)
    labels, I, J = _split_state(model, state)
    q, p = as_phase_arrays(q, p, model.n_modes)
    build = level_state_builder(model, labels, mixing=mixing, gauge=gauge)
    return a_field_tensor(build, q, p, x, model.n_params, fd, nodes, indices=[i])[0][..., I, J]


# ---------------------------------------------------------------- closed forms


def _fock_or_zero(m, n, Q, P, w, hbar):
    if m < 0:
        return np.zeros(np.shape(Q), dtype=complex)
    return wigner_fock(m, n, Q, P, w, hbar)


def xi_gho(n, sign, Q, P, omega, hbar=1.0):
    """sqrt(n(n-1)) f_{n-2,n} + sign * sqrt((n+1)(n+2)) f_{n+2,n}; lowering terms vanish for n < 2."""
    lower = math.sqrt(n * (n - 1)) * _fock_or_zero(n - 2, n, Q, P, omega, hbar) if n >= 2 else 0.0
    return lower + sign * math.sqrt((n + 1) * (n + 2)) * wigner_fock(n + 2, n, Q, P, omega, hbar)


def xi_nosc(n, Q, P, omega, hbar=1.0):
    """Single-mode Xi_n = sqrt(n(n-1)) f_{n-2,n} - sqrt((n+1)(n+2)) f_{n+2,n}."""
    return xi_gho(n, -1, Q, P, omega, hbar)


def theta_nosc(n, sign, Q, P, omega, hbar=1.0):
    """Single-mode sqrt(n/2) f_{n-1,n} + sign * sqrt((n+1)/2) f_{n+1,n}."""
    lower = math.sqrt(n / 2) * _fock_or_zero(n - 1, n, Q, P, omega, hbar) if n >= 1 else 0.0
    return lower + sign * math.sqrt((n + 1) / 2) * wigner_fock(n + 1, n, Q, P, omega, hbar)


def a_field_gho(i, n, q, p, x, hbar=1.0):
    """Closed-form connection field of the generalized oscillator.

    A_i = (pi hbar Z / 2 w) { i d_i(w/Z) Xi-_n + d_i(Y/Z) [Xi+_n + (2n+1) W_n] }
    with Q = q/sqrt(Z), P = sqrt(Z)(p + Y q/Z).
    """
    X, Y, Z = (float(v) for v in x)
    if not (X * Z - Y * Y > 0 and Z > 0):
        raise ModelDomainError(f"need XZ - Y^2 > 0 and Z > 0, got X={X}, Y={Y}, Z={Z}")
    w = math.sqrt(X * Z - Y * Y)
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    Q = q / math.sqrt(Z)
    P = math.sqrt(Z) * (p + Y * q / Z)
    dw = np.array([Z, -2.0 * Y, X]) / (2.0 * w)
    d_w_over_z = dw / Z - np.array([0.0, 0.0, w / Z**2])
    d_y_over_z = np.array([0.0, 1.0 / Z, -Y / Z**2])
    W = wigner_fock(n, n, Q, P, w, hbar)
    term = 1j * d_w_over_z[i] * xi_gho(n, -1, Q, P, w, hbar)
    term = term + d_y_over_z[i] * (xi_gho(n, +1, Q, P, w, hbar) + (2 * n + 1) * W)
    return math.pi * hbar * Z / (2.0 * w) * term


def a_field_nosc(i, labels, q, p, modes, hbar=1.0):
    """Closed-form connection field of N coupled oscillators.

    A_i = i (2 pi hbar)^N [ 1/4 sum_a (d_i w_a / w_a) Xi_{n_a} prod_{b != a} W_{n_b}
          + sum_{a != c} sqrt(w_a/w_c) M_ac Theta-_{n_a} Theta+_{n_c} prod_{d != a,c} W_{n_d} ]
    with M = (d_i U) U^T. The second sum drops out when U is constant.

    Parameters
    ----------
    labels : tuple of int
    q, p : ndarray, shape (..., N)
    modes : NormalModeData
        Frequencies, U and their parameter derivatives at the point.
    """
    if not isinstance(modes, NormalModeData):
        raise TypeError("modes must be NormalModeData")
    N = modes.n_modes
    labels = tuple(int(v) for v in labels)
    if len(labels) != N:
        raise ValueError(f"expected {N} quantum numbers, got {labels}")
    q, p = as_phase_arrays(q, p, N)
    w = modes.frequencies
    Q = q @ modes.U.T
    P = p @ modes.U.T
    Wa = [wigner_fock(n, n, Q[..., a], P[..., a], w[a], hbar) for a, n in enumerate(labels)]

    def others(skip):
        out = np.ones(q.shape[:-1])
        for d in range(N):
            if d not in skip:
                out = out * Wa[d]
        return out

    total = np.zeros(q.shape[:-1], dtype=complex)
    for a, n in enumerate(labels):
        if modes.dfreq[i, a] != 0.0:
            total += 0.25 * modes.dfreq[i, a] / w[a] * xi_nosc(n, Q[..., a], P[..., a], w[a], hbar) * others({a})
    M = modes.dU[i] @ modes.U.T
    if np.any(M != 0.0):
        minus = [theta_nosc(n, -1, Q[..., a], P[..., a], w[a], hbar) for a, n in enumerate(labels)]
        plus = [theta_nosc(n, +1, Q[..., a], P[..., a], w[a], hbar) for a, n in enumerate(labels)]
        for a in range(N):
            for c in range(N):
                if a != c and M[a, c] != 0.0:
                    total += math.sqrt(w[a] / w[c]) * M[a, c] * minus[a] * plus[c] * others({a, c})
    return 1j * (2.0 * math.pi * hbar) ** N * total
