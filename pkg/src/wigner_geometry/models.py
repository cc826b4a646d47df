"""Parametrized quadratic Hamiltonians, their normal modes and eigenstates.

Families
--------
GeneralizedOscillator
    H = (X q^2 + Y (qp + pq) + Z p^2) / 2, parameters (X, Y, Z).
CoupledChainSymmetric2
    Two equal oscillators with a spring between them, parameters (k, k').
LinearlyCoupled2
    H = (p1^2 + p2^2 + A q1^2 + B q2^2 + C q1 q2) / 2, parameters (A, B, C).
Ring3
    Three equal oscillators coupled pairwise on a ring, parameters (k, k').
CustomK
    H = p^2/2 + q^T K(x) q / 2 for a user-supplied symmetric K(x).

The named families expose closed-form frequencies, orthogonal matrices U
(with K = U^T Omega^2 U and Q = U q) and their parameter derivatives; the
mode order and U are the ones of the published normal-mode solutions.
CustomK diagonalizes K numerically, sorts frequencies ascending, fixes the
eigenvector signs and differentiates by central differences.
"""

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .errors import DegeneracyError, ModelDomainError
from .quadrature import FDSpec, PhaseFrame, fd_step
from .specfun import hermite_function, normalized_hermite_table

__all__ = [
    "FAMILIES",
    "ParameterPoint",
    "ModelSpec",
    "NormalModeData",
    "OscillatorState",
    "DegenerateLevel",
    "check_domain",
    "k_matrix",
    "normal_modes",
    "generalized_oscillator_wavefunction",
    "product_wavefunction",
    "level_energy",
    "enumerate_level",
    "oscillator_state",
    "level_state_builder",
    "phase_frame",
    "canonical_coordinates",
    "load_model",
    "model_from_config",
]

FAMILIES = ("GeneralizedOscillator", "CoupledChainSymmetric2", "LinearlyCoupled2", "Ring3", "CustomK")

DEFAULT_NAMES = {
    "GeneralizedOscillator": ("X", "Y", "Z"),
    "CoupledChainSymmetric2": ("k", "k'"),
    "LinearlyCoupled2": ("A", "B", "C"),
    "Ring3": ("k", "k'"),
}

N_MODES = {
    "GeneralizedOscillator": 1,
    "CoupledChainSymmetric2": 2,
    "LinearlyCoupled2": 2,
    "Ring3": 3,
}

RING3_U = np.array(
    [
        [1 / math.sqrt(3), 1 / math.sqrt(3), 1 / math.sqrt(3)],
        [-1 / math.sqrt(2), 0.0, 1 / math.sqrt(2)],
        [1 / math.sqrt(6), -math.sqrt(2.0 / 3.0), 1 / math.sqrt(6)],
    ]
)
CHAIN2_U = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)


@dataclass(frozen=True)
class ParameterPoint:
    """Values of the adiabatic parameters, with their names."""

    values: tuple
    names: tuple = None

    def __post_init__(self):
        vals = tuple(float(v) for v in np.atleast_1d(self.values))
        object.__setattr__(self, "values", vals)
        names = tuple(f"x{i + 1}" for i in range(len(vals))) if self.names is None else tuple(self.names)
        if len(names) != len(vals):
            raise ValueError(f"{len(vals)} values but {len(names)} names")
        if not vals:
            raise ValueError("a parameter point needs at least one parameter")
        object.__setattr__(self, "names", names)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return len(self.values)

    def as_dict(self):
        return dict(zip(self.names, self.values))


@dataclass(frozen=True)
class ModelSpec:
    """A parametrized Hamiltonian family.

    Parameters
    ----------
    family : str
        One of :data:`FAMILIES`.
    hbar : float
        Reduced Planck constant.
    param_names : tuple of str, optional
        Defaults to the family's conventional names; required for CustomK.
    k_matrix : callable, optional
        CustomK only: ``k_matrix(x) -> (N, N)`` symmetric positive-definite array.
    n_modes : int, optional
        CustomK only; inferred from ``k_matrix`` when omitted.
    tol_deg : float
        Relative energy tolerance for calling two levels degenerate.
    """

    family: str
    hbar: float = 1.0
    param_names: tuple = None
    k_matrix: Optional[Callable] = field(default=None, compare=False, repr=False)
    n_modes: int = None
    tol_deg: float = 1e-9

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}; expected one of {FAMILIES}")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        if self.family == "CustomK":
            if self.k_matrix is None or self.param_names is None:
                raise ValueError("CustomK needs k_matrix and param_names")
            if self.n_modes is None:
                raise ValueError("CustomK needs n_modes")
        else:
            if self.param_names is None:
                object.__setattr__(self, "param_names", DEFAULT_NAMES[self.family])
            object.__setattr__(self, "n_modes", N_MODES[self.family])
        object.__setattr__(self, "param_names", tuple(self.param_names))

    @property
    def n_params(self):
        return len(self.param_names)

    def point(self, *values):
        return ParameterPoint(values, self.param_names)


@dataclass(frozen=True)
class NormalModeData:
    """Frequencies, orthogonal matrix and their parameter derivatives at one point.

    ``dU[i]`` and ``dfreq[i]`` are derivatives with respect to parameter i.
    """

    frequencies: np.ndarray
    U: np.ndarray
    dU: np.ndarray
    dfreq: np.ndarray
    method: str = "analytic"

    @property
    def n_modes(self):
        return len(self.frequencies)

    @property
    def n_params(self):
        return self.dfreq.shape[0]

    def k_matrix(self):
        return self.U.T @ np.diag(self.frequencies**2) @ self.U


def _x(x):
    return np.asarray(x, dtype=float).reshape(-1)


# ---------------------------------------------------------------- domains


def check_domain(spec, x):
    """Raise :class:`ModelDomainError` if ``x`` is outside the family's domain."""
    x = _x(x)
    if len(x) != spec.n_params:
        raise ValueError(f"{spec.family} takes {spec.n_params} parameters, got {len(x)}")
    if not np.all(np.isfinite(x)):
        raise ModelDomainError(f"non-finite parameters {x.tolist()}")
    fam = spec.family
    if fam == "GeneralizedOscillator":
        X, Y, Z = x
        if not X * Z - Y * Y > 0 or not Z > 0:
            raise ModelDomainError(f"need XZ - Y^2 > 0 and Z > 0, got X={X}, Y={Y}, Z={Z}")
    elif fam == "CoupledChainSymmetric2":
        k, kp = x
        if not (k > 0 and k + 2 * kp > 0):
            raise ModelDomainError(f"need k > 0 and k + 2k' > 0, got k={k}, k'={kp}")
    elif fam == "Ring3":
        k, kp = x
        if not (k > 0 and k + 3 * kp > 0):
            raise ModelDomainError(f"need k > 0 and k + 3k' > 0, got k={k}, k'={kp}")
    elif fam == "LinearlyCoupled2":
        A, B, C = x
        if C == 0 or A == B:
            raise ModelDomainError(f"need A != B and C != 0, got A={A}, B={B}, C={C}")
        if not (A > 0 and B > 0 and 4 * A * B - C * C > 0):
            raise ModelDomainError(f"K is not positive definite at A={A}, B={B}, C={C}")
    else:
        K = _custom_k(spec, x)
        if np.min(np.linalg.eigvalsh(K)) <= 0:
            raise ModelDomainError(f"K(x) is not positive definite at {x.tolist()}")


def _custom_k(spec, x):
    K = np.asarray(spec.k_matrix(_x(x)), dtype=float)
    n = spec.n_modes
    if K.shape != (n, n):
        raise ValueError(f"k_matrix returned shape {K.shape}, expected {(n, n)}")
    if not np.allclose(K, K.T, rtol=0, atol=1e-12 * max(1.0, np.abs(K).max())):
        raise ModelDomainError("K(x) is not symmetric")
    return 0.5 * (K + K.T)


def k_matrix(spec, x):
    """Coupling matrix K(x) of an N-oscillator family."""
    x = _x(x)
    fam = spec.family
    if fam == "CoupledChainSymmetric2":
        k, kp = x
        return np.array([[k + kp, -kp], [-kp, k + kp]])
    if fam == "Ring3":
        k, kp = x
        return (k + 3 * kp) * np.eye(3) - kp * np.ones((3, 3))
    if fam == "LinearlyCoupled2":
        A, B, C = x
        return np.array([[A, C / 2], [C / 2, B]])
    if fam == "CustomK":
        return _custom_k(spec, x)
    raise ValueError(f"{fam} is not of the form p^2/2 + q^T K q / 2")


# ---------------------------------------------------------------- normal modes


def _lco_angle(A, B, C):
    eps = (B - A) / C
    root = math.sqrt(eps * eps + 1.0)
    t = math.copysign(1.0, eps) * root - eps
    dt_deps = abs(eps) / root - 1.0
    deps = np.array([-1.0 / C, 1.0 / C, -eps / C])
    return t, dt_deps * deps


def _analytic_modes(spec, x):
    fam = spec.family
    if fam == "GeneralizedOscillator":
        X, Y, Z = x
        w = math.sqrt(X * Z - Y * Y)
        return (
            np.array([w]),
            np.eye(1),
            np.zeros((3, 1, 1)),
            np.array([[Z], [-2 * Y], [X]]) / (2 * w),
        )
    if fam == "CoupledChainSymmetric2":
        k, kp = x
        w1, w2 = math.sqrt(k), math.sqrt(k + 2 * kp)
        dw = np.array([[1 / (2 * w1), 1 / (2 * w2)], [0.0, 1 / w2]])
        return np.array([w1, w2]), CHAIN2_U.copy(), np.zeros((2, 2, 2)), dw
    if fam == "Ring3":
        k, kp = x
        w1, w2 = math.sqrt(k), math.sqrt(k + 3 * kp)
        dw = np.array([[1 / (2 * w1), 1 / (2 * w2), 1 / (2 * w2)], [0.0, 3 / (2 * w2), 3 / (2 * w2)]])
        return np.array([w1, w2, w2]), RING3_U.copy(), np.zeros((2, 3, 3)), dw
    if fam == "LinearlyCoupled2":
        A, B, C = x
        t, dt = _lco_angle(A, B, C)
        alpha = math.atan(t)
        dalpha = dt / (1 + t * t)
        w1sq, w2sq = A - C * t / 2, B + C * t / 2
        w1, w2 = math.sqrt(w1sq), math.sqrt(w2sq)
        d_w1sq = np.array([1.0, 0.0, -t / 2]) - C / 2 * dt
        d_w2sq = np.array([0.0, 1.0, t / 2]) + C / 2 * dt
        dw = np.stack([d_w1sq / (2 * w1), d_w2sq / (2 * w2)], axis=-1)
        c, s = math.cos(alpha), math.sin(alpha)
        U = np.array([[c, -s], [s, c]])
        dU_dalpha = np.array([[-s, -c], [c, -s]])
        dU = dalpha[:, None, None] * dU_dalpha
        return np.array([w1, w2]), U, dU, dw
    raise ValueError(fam)


def lco_angle(x):
    """Rotation angle alpha and its gradient for the LinearlyCoupled2 family."""
    A, B, C = _x(x)
    t, dt = _lco_angle(A, B, C)
    return math.atan(t), dt / (1 + t * t)


def _fix_signs(U, reference=None):
    U = U.copy()
    for a in range(U.shape[0]):
        if reference is not None:
            if np.dot(U[a], reference[a]) < 0:
                U[a] = -U[a]
        else:
            j = np.argmax(np.abs(U[a]))
            if U[a, j] < 0:
                U[a] = -U[a]
    return U


def _custom_modes_at(spec, x, reference=None):
    K = _custom_k(spec, x)
    evals, vecs = np.linalg.eigh(K)
    if evals[0] <= 0:
        raise ModelDomainError(f"K(x) is not positive definite at {_x(x).tolist()}")
    U = _fix_signs(vecs.T, reference)
    return np.sqrt(evals), U


def _near_degenerate(freqs, tol):
    f = np.sort(freqs)
    return np.any(np.diff(f) <= tol * np.maximum(f[1:], 1e-300))


def normal_modes(spec, x, reference=None, fd=FDSpec(), derivatives=True):
    """Normal-mode data of ``spec`` at ``x``.

    Parameters
    ----------
    spec : ModelSpec
    x : array_like or ParameterPoint
    reference : ndarray, optional
        CustomK only: a nearby U whose row signs the result should follow
        (used when sweeping and when differencing).
    fd : FDSpec
        Step policy for CustomK derivatives.
    derivatives : bool
        CustomK only: skip the finite-difference derivatives when False
        (``dU`` and ``dfreq`` are then NaN).

    Raises
    ------
    ModelDomainError
        Outside the family domain.
    DegeneracyError
        CustomK with (near-)degenerate frequencies when derivatives are requested.
    """
    x = _x(x)
    check_domain(spec, x)
    if spec.family != "CustomK":
        w, U, dU, dw = _analytic_modes(spec, x)
        return NormalModeData(w, U, dU, dw, "analytic")
    w, U = _custom_modes_at(spec, x, reference)
    m, n = spec.n_params, spec.n_modes
    if not derivatives:
        return NormalModeData(w, U, np.full((m, n, n), np.nan), np.full((m, n), np.nan), "none")
    if _near_degenerate(w, spec.tol_deg):
        raise DegeneracyError(
            f"frequencies {w.tolist()} are degenerate within {spec.tol_deg}; eigenvector derivatives are ill-defined"
        )
    dU = np.empty((m, n, n))
    dw = np.empty((m, n))
    for i in range(m):
        s = fd_step(x, i, fd)
        xp, xm = x.copy(), x.copy()
        xp[i] += s
        xm[i] -= s
        wp, Up = _custom_modes_at(spec, xp, U)
        wm, Um = _custom_modes_at(spec, xm, U)
        dw[i] = (wp - wm) / (2 * s)
        dU[i] = (Up - Um) / (2 * s)
    return NormalModeData(w, U, dU, dw, "finite_difference")


def _modes_no_derivatives(spec, x, reference=None):
    if spec.family == "CustomK":
        return _custom_modes_at(spec, x, reference)
    w, U, _, _ = _analytic_modes(spec, _x(x))
    return w, U


# ---------------------------------------------------------------- wavefunctions


def generalized_oscillator_wavefunction(n, q, x, hbar=1.0):
    """Eigenfunction psi_n(q; X, Y, Z) of the generalized oscillator.

    psi_n = (w/Z hbar)^(1/4) chi_n(q sqrt(w/Z hbar)) exp(-i Y q^2 / 2 Z hbar),
    with w = sqrt(XZ - Y^2).
    """
    X, Y, Z = _x(x)
    if not (X * Z - Y * Y > 0 and Z > 0):
        raise ModelDomainError(f"need XZ - Y^2 > 0 and Z > 0, got X={X}, Y={Y}, Z={Z}")
    q = np.asarray(q, dtype=float)
    c = math.sqrt(X * Z - Y * Y) / (Z * hbar)
    out = c**0.25 * hermite_function(n, q * math.sqrt(c)) * np.exp(-1j * Y * q * q / (2 * Z * hbar))
    return out


def product_wavefunction(labels, Q, modes, hbar=1.0):
    """Product of single-mode eigenfunctions in normal coordinates Q (last axis = mode)."""
    Q = np.asarray(Q, dtype=float)
    labels = tuple(labels)
    if Q.shape[-1] != len(labels) or len(labels) != modes.n_modes:
        raise ValueError(f"dimension mismatch: {len(labels)} labels, Q has {Q.shape[-1]} modes, model has {modes.n_modes}")
    out = np.ones(Q.shape[:-1])
    for a, n in enumerate(labels):
        c = modes.frequencies[a] / hbar
        out = out * c**0.25 * hermite_function(n, Q[..., a] * math.sqrt(c))
    return out


@dataclass(frozen=True)
class OscillatorState:
    """A finite combination of oscillator eigenfunctions sharing one Gaussian.

    psi(q) = exp(-q^T A q / 2) * sum_k coef_k prod_a c_a^(1/4) h_{n_ka}(xi_a),
    with xi = sqrt(c) * (U q), A = U^T diag(c) U + i phase, and h_n the
    polynomial part of the Hermite function chi_n. The polynomial part has
    real coefficients up to the complex ``coef_k``, so it continues
    analytically to complex q; the numeric Weyl transform relies on that.
    """

    hbar: float
    scale: np.ndarray
    U: np.ndarray
    phase: np.ndarray
    terms: tuple

    @property
    def n_modes(self):
        return len(self.scale)

    @property
    def max_degree(self):
        return max(sum(lab) for _, lab in self.terms)

    def precision(self):
        return self.U.T @ np.diag(self.scale) @ self.U + 1j * self.phase

    def basis_values(self, q, labels):
        """Normalized product polynomials for each label in ``labels``, shape (..., len(labels))."""
        q = np.asarray(q)
        xi = (q @ self.U.T) * np.sqrt(self.scale)
        n_max = [max(lab[a] for lab in labels) for a in range(self.n_modes)]
        tables = [normalized_hermite_table(n_max[a], xi[..., a]) for a in range(self.n_modes)]
        norm = float(np.prod(self.scale**0.25))
        out = np.empty(q.shape[:-1] + (len(labels),), dtype=np.result_type(xi.dtype, float))
        for k, lab in enumerate(labels):
            term = norm * tables[0][lab[0]]
            for a in range(1, self.n_modes):
                term = term * tables[a][lab[a]]
            out[..., k] = term
        return out

    def polynomial(self, q, conjugate=False):
        """Polynomial factor of the state; ``conjugate`` conjugates only the coefficients."""
        labels = [lab for _, lab in self.terms]
        coef = np.array([c for c, _ in self.terms], dtype=complex)
        return self.basis_values(q, labels) @ (np.conj(coef) if conjugate else coef)

    def __call__(self, q):
        """Wavefunction values at real positions ``q`` (last axis = coordinate)."""
        q = np.asarray(q, dtype=float)
        quad = np.einsum("...a,ab,...b->...", q, self.precision(), q)
        return np.exp(-0.5 * quad) * self.polynomial(q)


def oscillator_state(spec, x, labels, coefficient=1.0, reference=None):
    """Eigenstate with quantum numbers ``labels`` as an :class:`OscillatorState`."""
    x = _x(x)
    check_domain(spec, x)
    labels = tuple(int(n) for n in np.atleast_1d(labels))
    if len(labels) != spec.n_modes:
        raise ValueError(f"{spec.family} has {spec.n_modes} modes, got labels {labels}")
    if any(n < 0 for n in labels):
        raise ValueError(f"quantum numbers must be non-negative, got {labels}")
    hbar = spec.hbar
    if spec.family == "GeneralizedOscillator":
        X, Y, Z = x
        w = math.sqrt(X * Z - Y * Y)
        return OscillatorState(hbar, np.array([w / (Z * hbar)]), np.eye(1), np.array([[Y / (Z * hbar)]]),
                               ((complex(coefficient), labels),))
    w, U = _modes_no_derivatives(spec, x, reference)
    n = spec.n_modes
    return OscillatorState(hbar, w / hbar, U, np.zeros((n, n)), ((complex(coefficient), labels),))


def level_state_builder(spec, labels, mixing=None, gauge=None, reference=None):
    """Return ``build(x) -> list[OscillatorState]`` for the given basis labels.

    Parameters
    ----------
    labels : sequence of label tuples
        Basis states psi_J (one for an Abelian computation).
    mixing : callable or ndarray, optional
        Unitary g x g matrix V(x); the returned states are
        psi'_I = sum_J psi_J V_JI.
    gauge : callable, optional
        Real phase alpha(x); every state is multiplied by exp(i alpha(x)).
    reference : ndarray, optional
        CustomK row-sign reference for U.
    """
    labels = [tuple(lab) for lab in labels]

    def build(x):
        x = _x(x)
        g = len(labels)
        if mixing is None:
            V = np.eye(g, dtype=complex)
        else:
            V = np.asarray(mixing(x) if callable(mixing) else mixing, dtype=complex)
        phase = np.exp(1j * gauge(x)) if gauge is not None else 1.0
        base = oscillator_state(spec, x, labels[0], reference=reference)
        states = []
        for col in range(g):
            terms = tuple(
                (phase * V[row, col], labels[row]) for row in range(g) if V[row, col] != 0
            )
            states.append(OscillatorState(base.hbar, base.scale, base.U, base.phase, terms))
        return states

    return build


# ---------------------------------------------------------------- levels


@dataclass(frozen=True)
class DegenerateLevel:
    """Labels sharing one energy, in lexicographic order."""

    energy: float
    labels: tuple
    tol_deg: float = 1e-9

    @property
    def degeneracy(self):
        return len(self.labels)


def level_energy(labels, frequencies, hbar=1.0):
    """sum_a (n_a + 1/2) hbar w_a."""
    return float(hbar * np.dot(np.asarray(labels) + 0.5, frequencies))


def enumerate_level(spec, x, energy_index=None, label=None, energy=None):
    """All states degenerate with a target energy.

    Exactly one of ``energy_index`` (0 = ground level, counting distinct
    energies), ``label`` or ``energy`` selects the target.
    """
    if sum(v is not None for v in (energy_index, label, energy)) != 1:
        raise ValueError("give exactly one of energy_index, label, energy")
    check_domain(spec, x)
    w, _ = _modes_no_derivatives(spec, _x(x))
    hbar, tol = spec.hbar, spec.tol_deg
    if label is not None:
        energy = level_energy(label, w, hbar)
    if energy is not None:
        bound = [int(math.floor(energy / (hbar * wa) + 1e-9)) for wa in w]
        members = []
        for lab in itertools.product(*(range(b + 1) for b in bound)):
            e = level_energy(lab, w, hbar)
            if abs(e - energy) <= tol * abs(energy):
                members.append(tuple(lab))
        if not members:
            raise ValueError(f"no eigenstate with energy {energy}")
        return DegenerateLevel(float(energy), tuple(sorted(members)), tol)
    k = int(energy_index)
    if k < 0:
        raise ValueError("energy_index must be non-negative")
    e_max = level_energy([0] * len(w), w, hbar) + k * hbar * float(np.min(w))
    bound = [int(math.floor(k * np.min(w) / wa + 1e-9)) for wa in w]
    energies = sorted(
        level_energy(lab, w, hbar)
        for lab in itertools.product(*(range(b + 1) for b in bound))
        if level_energy(lab, w, hbar) <= e_max * (1 + tol)
    )
    distinct = []
    for e in energies:
        if not distinct or abs(e - distinct[-1]) > tol * abs(e):
            distinct.append(e)
    return enumerate_level(spec, x, energy=distinct[k])


# ---------------------------------------------------------------- phase-space coordinates


def phase_frame(spec, x):
    """Frame (Q, P) -> (q, p) in which the Wigner functions at ``x`` are isotropic Gaussians."""
    x = _x(x)
    check_domain(spec, x)
    hbar = spec.hbar
    if spec.family == "GeneralizedOscillator":
        X, Y, Z = x
        w = math.sqrt(X * Z - Y * Y)
        rz = math.sqrt(Z)
        T = np.array([[rz, 0.0], [-Y / rz, 1.0 / rz]])
        return PhaseFrame(T, np.array([math.sqrt(hbar / w), math.sqrt(hbar * w)]))
    w, U = _modes_no_derivatives(spec, x)
    n = len(w)
    T = np.zeros((2 * n, 2 * n))
    T[:n, :n] = U.T
    T[n:, n:] = U.T
    return PhaseFrame(T, np.concatenate([np.sqrt(hbar / w), np.sqrt(hbar * w)]))


def canonical_coordinates(spec, x, q, p, reference=None):
    """Normal-mode phase-space coordinates (Q, P) and frequencies at ``x``.

    For the generalized oscillator Q = q / sqrt(Z), P = sqrt(Z) (p + Y q / Z)
    and the single frequency is sqrt(XZ - Y^2); otherwise Q = U q, P = U p.
    """
    x = _x(x)
    check_domain(spec, x)
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if spec.family == "GeneralizedOscillator":
        X, Y, Z = x
        w = math.sqrt(X * Z - Y * Y)
        rz = math.sqrt(Z)
        return q / rz, rz * (p + Y * q / Z), np.array([w])
    w, U = _modes_no_derivatives(spec, x, reference)
    return q @ U.T, p @ U.T, w


# ---------------------------------------------------------------- configuration


def _polynomial_k(names, terms, n_modes):
    compiled = []
    for term in terms:
        coef = np.asarray(term["coefficient"], dtype=float)
        if coef.shape != (n_modes, n_modes):
            raise ValueError(f"k_matrix coefficient has shape {coef.shape}, expected {(n_modes, n_modes)}")
        powers = term.get("powers", {})
        unknown = set(powers) - set(names)
        if unknown:
            raise ValueError(f"k_matrix uses unknown parameters {sorted(unknown)}")
        compiled.append((coef, [(names.index(k), int(v)) for k, v in powers.items()]))

    def k_of_x(x):
        K = np.zeros((n_modes, n_modes))
        for coef, powers in compiled:
            factor = 1.0
            for idx, power in powers:
                factor *= x[idx] ** power
            K = K + factor * coef
        return K

    return k_of_x


def model_from_config(config):
    """Build a :class:`ModelSpec` from a parsed JSON model description.

    Keys: ``family``, optional ``hbar``, ``parameters`` (names) and, for
    CustomK, ``k_matrix``: a list of ``{"coefficient": [[...]], "powers":
    {"name": int}}`` terms whose sum is K(x).
    """
    family = config["family"]
    hbar = float(config.get("hbar", 1.0))
    names = config.get("parameters")
    tol = float(config.get("tol_deg", 1e-9))
    if family == "CustomK":
        terms = config["k_matrix"]
        n = len(terms[0]["coefficient"])
        return ModelSpec(family, hbar, tuple(names), _polynomial_k(list(names), terms, n), n, tol)
    if names is not None and tuple(names) != DEFAULT_NAMES.get(family):
        if len(names) != len(DEFAULT_NAMES.get(family, ())):
            raise ValueError(f"{family} takes parameters {DEFAULT_NAMES.get(family)}")
    return ModelSpec(family, hbar, tuple(names) if names else None, tol_deg=tol)


def load_model(path):
    """Read a JSON model description from ``path``."""
    return model_from_config(json.loads(Path(path).read_text()))
