"""Classical analog of the quantum metric for N coupled oscillators.

In angle-action variables Q_a = sqrt(2 I_a / w_a) sin(phi_a),
P_a = sqrt(2 w_a I_a) cos(phi_a), the generator of the parameter-induced
canonical transformation is

    G_i = -sum_a (d_i w_a / w_a) I_a sin(phi_a) cos(phi_a) - sum_ac M_ac P_a Q_c,   M = (d_i U) U^T,

and the classical metric is its covariance over the angles.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyWarning
from .quadrature import trapezoid_periodic_nodes

__all__ = [
    "ActionVector",
    "bohr_sommerfeld",
    "classical_metric",
    "classical_metric_montecarlo",
    "generator",
    "semiclassical_quantum_metric",
]


@dataclass(frozen=True)
class ActionVector:
    """Positive actions I_a, one per normal mode."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in np.atleast_1d(self.values))
        if not vals or any(not v > 0 for v in vals):
            raise ValueError(f"actions must be positive, got {vals}")
        object.__setattr__(self, "values", vals)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def bohr_sommerfeld(labels, hbar=1.0):
    """I_a = (n_a + 1/2) hbar and the paired squares (n_a^2 + n_a + 1) hbar^2."""
    n = np.asarray(labels, dtype=float)
    return (n + 0.5) * hbar, (n * n + n + 1) * hbar**2


def _actions(modes, I, I_squared):
    I = np.asarray(I, dtype=float).reshape(-1)
    if I.shape != (modes.n_modes,):
        raise ValueError(f"expected {modes.n_modes} actions, got {I.shape[0]}")
    if np.any(I <= 0):
        raise ValueError("actions must be positive")
    I2 = I * I if I_squared is None else np.asarray(I_squared, dtype=float).reshape(-1)
    return I, I2


def classical_metric(modes, I, I_squared=None):
    """Closed-form classical metric.

    g_ij = 1/8 sum_a I_a^2 d_i w_a d_j w_a / w_a^2
         + 1/2 sum_abcd I_a I_b (w_a/w_b + w_b/w_a) U_ac U_ad d_i U_bc d_j U_bd

    Parameters
    ----------
    modes : NormalModeData
    I : array_like
        Actions I_a.
    I_squared : array_like, optional
        Values used for I_a^2 in the first sum (default ``I**2``).
    """
    I, I2 = _actions(modes, I, I_squared)
    w, dw, U, dU = modes.frequencies, modes.dfreq, modes.U, modes.dU
    first = 0.125 * np.einsum("a,ia,ja->ij", I2 / w**2, dw, dw)
    C = np.outer(I, I) * (w[:, None] / w[None, :] + w[None, :] / w[:, None])
    second = 0.5 * np.einsum("ab,ac,ad,ibc,jbd->ij", C, U, U, dU, dU)
    return first + second


def generator(modes, I, phi):
    """G_i at angles ``phi`` (shape (S, N)); returns shape (m, S)."""
    I = np.asarray(I, dtype=float)
    w = modes.frequencies
    s, c = np.sin(phi), np.cos(phi)
    Q = np.sqrt(2 * I / w) * s
    P = np.sqrt(2 * w * I) * c
    M = modes.dU @ modes.U.T
    freq = -np.einsum("ia,a,Sa->iS", modes.dfreq / w, I, s * c)
    rot = -np.einsum("iac,Sa,Sc->iS", M, P, Q)
    return freq + rot


def _covariance(a, b):
    """Angle-average covariance of rows of ``a`` (m, S) with rows of ``b`` (m, S)."""
    a0 = a - a.mean(axis=1, keepdims=True)
    b0 = b - b.mean(axis=1, keepdims=True)
    return a0 @ b0.T / a.shape[1]


def classical_metric_montecarlo(modes, I, samples=64, I_squared=None, method="trapezoid", seed=None):
    """Classical metric as the angle covariance <G_i G_j> - <G_i><G_j>.

    Parameters
    ----------
    samples : int
        Trapezoid points per angle (tensor grid of ``samples**N``), or the
        total number of uniform random angle vectors for ``method="montecarlo"``.
    I_squared : array_like, optional
        Replaces I_a^2 in the same-mode frequency terms, as in
        :func:`classical_metric`.
    method : {"trapezoid", "montecarlo"}
    seed : int, optional
        Seed of the random generator for ``method="montecarlo"``.
    """
    I, I2 = _actions(modes, I, I_squared)
    N = modes.n_modes
    if method == "trapezoid":
        if samples < 5:
            warnings.warn(
                f"{samples} trapezoid points per angle cannot resolve the fourth harmonics of G_i G_j",
                AccuracyWarning,
                stacklevel=2,
            )
        nodes, _ = trapezoid_periodic_nodes(samples)
        grids = np.meshgrid(*([nodes] * N), indexing="ij")
        phi = np.stack([g.ravel() for g in grids], axis=-1)
    elif method == "montecarlo":
        if samples < 1000:
            warnings.warn(f"{samples} random samples give a noisy covariance", AccuracyWarning, stacklevel=2)
        phi = np.random.default_rng(seed).uniform(0.0, 2 * math.pi, size=(samples, N))
    else:
        raise ValueError(f"unknown method {method!r}")

    # Per-mode frequency pieces at unit action, so I_a^2 can be swapped for I_squared.
    w = modes.frequencies
    unit = [-(modes.dfreq[:, a] / w[a])[:, None] * (np.sin(phi[:, a]) * np.cos(phi[:, a]))[None, :] for a in range(N)]
    M = modes.dU @ modes.U.T
    Q = np.sqrt(2 * I / w) * np.sin(phi)
    P = np.sqrt(2 * w * I) * np.cos(phi)
    rot = -np.einsum("iac,Sa,Sc->iS", M, P, Q)

    g = _covariance(rot, rot)
    for a in range(N):
        g += I[a] * (_covariance(unit[a], rot) + _covariance(rot, unit[a]))
        for b in range(N):
            weight = I2[a] if a == b else I[a] * I[b]
            g += weight * _covariance(unit[a], unit[b])
    return g


def semiclassical_quantum_metric(modes, labels, hbar=1.0, classical=None):
    """Quantum metric predicted from the classical one.

    g = (g_classical - (hbar^2 / 4) sum_ab d_i U_ab d_j U_ab) / hbar^2 with
    I_a = (n_a + 1/2) hbar and I_a^2 -> (n_a^2 + n_a + 1) hbar^2.
    ``classical`` overrides the classical metric (e.g. a sampled one).
    """
    I, I2 = bohr_sommerfeld(labels, hbar)
    g_cl = classical_metric(modes, I, I2) if classical is None else np.asarray(classical)
    return (g_cl - 0.25 * hbar**2 * np.einsum("iab,jab->ij", modes.dU, modes.dU)) / hbar**2
