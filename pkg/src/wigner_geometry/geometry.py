"""Berry connection, quantum geometric tensor, metric and curvature.

Two routes produce every object.

``method="analytic"``
    Closed forms where the family has them: the generalized oscillator,
    the N-oscillator metric, the Ring3 level, and for any other N-oscillator
    level an exact ladder-operator evaluation of <d_i I|(1 - P)|d_j J>.
``method="quadrature"``
    Phase-space integrals of the numeric connection field A_iIJ(q, p):
    A_iIJ = (2 pi hbar)^-N * integral A_iIJ and
    Q_ijIJ = -2i (2 pi hbar)^-N * integral sum_K Im A_iKK * A_jIJ.

From Q, g_ijIJ = (Q_ijIJ + conj(Q_ijJI)) / 2 and F_ijIJ = i (Q_ijIJ - conj(Q_ijJI));
for a single state these reduce to Re Q and -2 Im Q.
"""

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .connection import a_field_tensor
from .errors import AccuracyWarning, DegeneracyError
from .models import (
    DegenerateLevel,
    ModelSpec,
    check_domain,
    enumerate_level,
    lco_angle,
    level_state_builder,
    normal_modes,
    phase_frame,
)
from .quadrature import (
    SECOND_DERIVATIVE_FD,
    FDSpec,
    QuadratureSpec,
    default_nodes,
    fd_derivative,
    fd_second_derivative,
    phase_space_grid,
    weighted_sum,
)
from .wigner import RING3_LEVEL, wigner_diagonal

__all__ = [
    "SCHEMA",
    "GeometryResult",
    "integration_nodes",
    "resolve_state",
    "resolve_level",
    "berry_connection",
    "qgt_abelian",
    "qgt_nonabelian",
    "curvature_from_connection",
    "metric_appendix_check",
    "metric_nosc_closed",
    "lco_metric_closed",
    "lco_metric_determinant",
    "gho_connection_closed",
    "gho_metric_closed",
    "gho_curvature_closed",
    "ring3_metric_closed",
    "ring3_block_determinant",
    "ladder_tensors",
]

SCHEMA = "wigner-geometry/1"
METHODS = ("analytic", "quadrature")
CURVATURE_FD = FDSpec(step=1e-3, richardson=True)
_LCO = ModelSpec("LinearlyCoupled2")


# ---------------------------------------------------------------- result container


def _encode(a):
    a = np.asarray(a)
    out = {"shape": list(a.shape), "re": [float(v) for v in a.real.ravel()]}
    if np.iscomplexobj(a):
        out["im"] = [float(v) for v in a.imag.ravel()]
    return out


def _decode(d):
    re = np.array(d["re"], dtype=float).reshape(d["shape"])
    if "im" in d:
        return re + 1j * np.array(d["im"], dtype=float).reshape(d["shape"])
    return re


@dataclass
class GeometryResult:
    """Quantum geometric tensor with its metric, curvature and connection.

    Abelian results have ``Q``, ``g``, ``F`` of shape (m, m) and ``A`` of
    shape (m,); non-Abelian ones (m, m, g, g) and (m, g, g). Axes follow
    ``metadata["param_names"]``.
    """

    Q: np.ndarray
    g: np.ndarray
    F: np.ndarray
    A: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def is_abelian(self):
        return np.ndim(self.Q) == 2

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "Q": _encode(self.Q),
            "g": _encode(self.g),
            "F": _encode(self.F),
            "A": _encode(self.A),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {d.get('schema')!r}")
        return cls(_decode(d["Q"]), _decode(d["g"]), _decode(d["F"]), _decode(d["A"]), dict(d.get("metadata", {})))

    def to_json(self, **kwargs):
        """JSON text; floats use Python's shortest round-trip representation."""
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _metric_curvature(Q):
    """Metric and curvature from Q, for (m, m) or (m, m, g, g) arrays."""
    if Q.ndim == 2:
        return Q.real.copy(), -2.0 * Q.imag
    Qh = np.conj(np.swapaxes(Q, 2, 3))
    return 0.5 * (Q + Qh), 1j * (Q - Qh)


# ---------------------------------------------------------------- state and level selection


def resolve_state(model, x, state):
    """Validate ``state`` as a nondegenerate label tuple at ``x``."""
    labels = tuple(int(n) for n in np.atleast_1d(state))
    if len(labels) != model.n_modes or any(n < 0 for n in labels):
        raise ValueError(f"{model.family} needs {model.n_modes} non-negative quantum numbers, got {labels}")
    if model.n_modes > 1:
        level = enumerate_level(model, x, label=labels)
        if level.degeneracy > 1:
            raise DegeneracyError(
                f"state {labels} is degenerate with {[lab for lab in level.labels if lab != labels]}; "
                "use qgt_nonabelian on its level"
            )
    return labels


def resolve_level(model, x, level):
    """Label list of a level given as DegenerateLevel, energy index, one member label or a label list."""
    if isinstance(level, DegenerateLevel):
        return [tuple(lab) for lab in level.labels]
    if isinstance(level, (int, np.integer)):
        return list(enumerate_level(model, x, energy_index=int(level)).labels)
    seq = list(level)
    if seq and isinstance(seq[0], (int, np.integer)):
        return list(enumerate_level(model, x, label=tuple(seq)).labels)
    return [tuple(int(n) for n in lab) for lab in seq]


def integration_nodes(model, labels, nodes=None):
    """Phase-space node counts ``(single, pair)`` for integrands with one or two Wigner Gaussians.

    One degree of freedom uses 2 n_max + 16. With more, the counts are the
    smallest that integrate the polynomial factors exactly: the connection
    field has total degree 2 n + 2 and a product of two fields 4 n + 4.
    """
    if nodes is not None:
        return int(nodes), int(nodes)
    n_tot = max(sum(lab) for lab in labels)
    if model.n_modes == 1:
        k = default_nodes(max(max(lab) for lab in labels))
        return k, k
    return n_tot + 2, 2 * n_tot + 3


# ---------------------------------------------------------------- closed forms


def gho_connection_closed(x, n):
    """Berry connection (0, (n+1/2)/(2w), -(n+1/2) Y/(2 Z w)) of the generalized oscillator."""
    X, Y, Z = (float(v) for v in x)
    w = math.sqrt(X * Z - Y * Y)
    return np.array([0.0, (n + 0.5) / (2 * w), -(n + 0.5) * Y / (2 * Z * w)])


def gho_metric_closed(x, n):
    """Quantum metric of the generalized oscillator."""
    X, Y, Z = (float(v) for v in x)
    w2 = X * Z - Y * Y
    mat = np.array(
        [
            [Z * Z, -2 * Y * Z, 2 * Y * Y - X * Z],
            [-2 * Y * Z, 4 * X * Z, -2 * X * Y],
            [2 * Y * Y - X * Z, -2 * X * Y, X * X],
        ]
    )
    return (n * n + n + 1) / (32.0 * w2 * w2) * mat


def gho_curvature_closed(x, n):
    """Berry curvature of the generalized oscillator (antisymmetric 3x3)."""
    X, Y, Z = (float(v) for v in x)
    w3 = (X * Z - Y * Y) ** 1.5
    c = (n + 0.5) / (4 * w3)
    F = np.zeros((3, 3))
    F[0, 1], F[0, 2], F[1, 2] = -c * Z, c * Y, -c * X
    return F - F.T


def metric_nosc_closed(modes, labels):
    """Quantum metric of N coupled oscillators from normal-mode data.

    g_ij = 1/8 sum_a (n_a^2+n_a+1) d_i w_a d_j w_a / w_a^2 - 1/4 sum_ab d_i U_ab d_j U_ab
         + 1/2 sum_abcd (n_a+1/2)(n_b+1/2)(w_a/w_b + w_b/w_a) U_ac U_ad d_i U_bc d_j U_bd
    """
    n = np.asarray(labels, dtype=float)
    w = modes.frequencies
    dw, dU, U = modes.dfreq, modes.dU, modes.U
    first = 0.125 * np.einsum("a,ia,ja->ij", (n * n + n + 1) / w**2, dw, dw)
    second = -0.25 * np.einsum("iab,jab->ij", dU, dU)
    h = n + 0.5
    C = np.outer(h, h) * (w[:, None] / w[None, :] + w[None, :] / w[:, None])
    third = 0.5 * np.einsum("ab,ac,ad,ibc,jbd->ij", C, U, U, dU, dU)
    return first + second + third


def lco_metric_closed(x, labels):
    """LinearlyCoupled2 metric written with the rotation angle alpha."""
    n1, n2 = labels
    modes = normal_modes(_LCO, x)
    w1, w2 = modes.frequencies
    dw = modes.dfreq
    _, da = lco_angle(x)
    g = (n1 * n1 + n1 + 1) * np.outer(dw[:, 0], dw[:, 0]) / (8 * w1 * w1)
    g += (n2 * n2 + n2 + 1) * np.outer(dw[:, 1], dw[:, 1]) / (8 * w2 * w2)
    g += ((n1 + 0.5) * (n2 + 0.5) * (w1 / w2 + w2 / w1) - 0.5) * np.outer(da, da)
    return g


def lco_metric_determinant(x, labels):
    """Closed-form determinant of the LinearlyCoupled2 metric."""
    n1, n2 = labels
    w1, w2 = normal_modes(_LCO, x).frequencies
    pre = (n1 * n1 + n1 + 1) * (n2 * n2 + n2 + 1) / (4096 * w1**4 * w2**4 * (w1 * w1 - w2 * w2) ** 2)
    return pre * ((n1 + 0.5) * (n2 + 0.5) * (w1 / w2 + w2 / w1) - 0.5)


def ring3_metric_closed(x):
    """Non-Abelian metric g_ijIJ of the Ring3 level {psi_001, psi_010}; shape (2, 2, 2, 2)."""
    k, kp = (float(v) for v in x)
    w1, w2 = math.sqrt(k), math.sqrt(k + 3 * kp)
    block = np.array([[1 / w1**4 + 4 / w2**4, 12 / w2**4], [12 / w2**4, 36 / w2**4]]) / 32.0
    g = np.zeros((2, 2, 2, 2))
    g[:, :, 0, 0] = block
    g[:, :, 1, 1] = block
    return g


def ring3_block_determinant(x):
    """9 / (256 w1^4 w2^4)."""
    k, kp = (float(v) for v in x)
    return 9.0 / (256.0 * k * k * (k + 3 * kp) ** 2)


# ---------------------------------------------------------------- ladder-operator evaluation


def _shift(labels, a, d):
    lab = list(labels)
    lab[a] += d
    return tuple(lab)


def _ladder_derivative(i, labels, modes):
    """d_i |labels> as a sparse Fock vector {label: amplitude}."""
    vec = {}

    def add(lab, c):
        vec[lab] = vec.get(lab, 0.0) + c

    w = modes.frequencies
    for a, n in enumerate(labels):
        c = modes.dfreq[i, a] / (4.0 * w[a])
        if c != 0.0:
            if n >= 2:
                add(_shift(labels, a, -2), c * math.sqrt(n * (n - 1)))
            add(_shift(labels, a, +2), -c * math.sqrt((n + 1) * (n + 2)))
    M = modes.dU[i] @ modes.U.T
    N = len(labels)
    for a in range(N):
        for c in range(N):
            if a == c or M[a, c] == 0.0:
                continue
            k = 0.5 * M[a, c] * math.sqrt(w[a] / w[c])
            nc = labels[c]
            for dc, amp_c in ((-1, math.sqrt(nc)), (+1, math.sqrt(nc + 1))):
                if amp_c == 0.0:
                    continue
                mid = _shift(labels, c, dc)
                na = mid[a]
                for da, amp_a in ((-1, math.sqrt(na)), (+1, -math.sqrt(na + 1))):
                    if amp_a != 0.0:
                        add(_shift(mid, a, da), k * amp_c * amp_a)
    return vec


def ladder_tensors(modes, labels):
    """Exact Q_ijIJ and A_iIJ of an N-oscillator level in its product basis.

    Uses d_i|n> = sum_a (d_i w_a / 4 w_a)(b_a^2 - b_a^+2)|n>
    + sum_{a != c} (M_ac / 2) sqrt(w_a / w_c)(b_a - b_a^+)(b_c + b_c^+)|n>, M = (d_i U) U^T.
    """
    labels = [tuple(lab) for lab in labels]
    g = len(labels)
    m = modes.n_params
    members = set(labels)
    d = [[_ladder_derivative(i, lab, modes) for lab in labels] for i in range(m)]
    Q = np.zeros((m, m, g, g), dtype=complex)
    A = np.zeros((m, g, g), dtype=complex)
    for i in range(m):
        for J in range(g):
            for I in range(g):
                A[i, I, J] = 1j * d[i][J].get(labels[I], 0.0)
    for i in range(m):
        for j in range(m):
            for I in range(g):
                for J in range(g):
                    vi, vj = d[i][I], d[j][J]
                    Q[i, j, I, J] = sum(vi[k] * vj[k] for k in vi if k in vj and k not in members)
    return Q, A


# ---------------------------------------------------------------- quadrature path


def _quadrature(model, x, labels, nodes=None, fd=None, gauge=None, mixing=None):
    fd = FDSpec() if fd is None else fd
    N, hbar, m = model.n_modes, model.hbar, model.n_params
    c = (2.0 * math.pi * hbar) ** N
    build = level_state_builder(model, labels, mixing=mixing, gauge=gauge)
    frame = phase_frame(model, x)
    k1, k2 = integration_nodes(model, labels, nodes)

    q, p, w = phase_space_grid(QuadratureSpec(k1, 1.0), frame)
    field_ = a_field_tensor(build, q, p, x, m, fd)
    A = weighted_sum(w, np.moveaxis(field_, 1, 0)) / c

    q, p, w = phase_space_grid(QuadratureSpec(k2, 1.0 / math.sqrt(2.0)), frame)
    field_ = a_field_tensor(build, q, p, x, m, fd)
    im_diag = np.trace(field_.imag, axis1=2, axis2=3)
    integrand = np.einsum("iM,jMIJ->MijIJ", im_diag, field_)
    Q = -2j / c * weighted_sum(w, integrand)
    meta = {"nodes": [k1, k2], "fd_step": fd.step, "fd_policy": fd.policy}
    return np.asarray(Q), np.asarray(A), meta


def _metadata(model, x, method, **extra):
    meta = {
        "method": method,
        "model": model.family,
        "hbar": model.hbar,
        "param_names": list(model.param_names),
        "x": [float(v) for v in np.asarray(x, dtype=float)],
    }
    meta.update(extra)
    return meta


def _check_method(method):
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def _gauge_gradient(gauge, x, m):
    return np.array([fd_derivative(gauge, x, i, CURVATURE_FD) for i in range(m)])


def _real_connection(A):
    resid = float(np.max(np.abs(np.imag(A)))) if np.iscomplexobj(A) else 0.0
    if resid > 1e-9:
        warnings.warn(f"connection has imaginary residue {resid:.3g}", AccuracyWarning, stacklevel=3)
    return np.real(A).astype(float)


def berry_connection(model, x, state, method="analytic", nodes=None, fd=None, gauge=None):
    """Berry connection A_i = i <n|d_i n> of a nondegenerate eigenstate.

    Parameters
    ----------
    model : ModelSpec
    x : array_like
    state : tuple of int
    method : {"analytic", "quadrature"}
    gauge : callable, optional
        Phase alpha(x) applied as psi -> exp(i alpha) psi.

    Returns
    -------
    ndarray, shape (m,)
    """
    _check_method(method)
    x = np.asarray(x, dtype=float)
    check_domain(model, x)
    labels = resolve_state(model, x, state)
    if method == "quadrature":
        _, A, _ = _quadrature(model, x, [labels], nodes, fd, gauge)
        return _real_connection(A[:, 0, 0])
    if model.family == "GeneralizedOscillator":
        A = gho_connection_closed(x, labels[0])
    else:
        _, Aq = ladder_tensors(normal_modes(model, x), [labels])
        A = _real_connection(Aq[:, 0, 0])
    if gauge is not None:
        A = A - _gauge_gradient(gauge, x, model.n_params)
    return A


def qgt_abelian(model, x, state, method="analytic", nodes=None, fd=None, gauge=None):
    """Quantum geometric tensor of a nondegenerate eigenstate.

    Returns
    -------
    GeometryResult
        ``g = Re Q``, ``F = -2 Im Q`` and the Berry connection ``A``.

    Raises
    ------
    DegeneracyError
        If the state shares its energy with another one.
    """
    _check_method(method)
    x = np.asarray(x, dtype=float)
    check_domain(model, x)
    labels = resolve_state(model, x, state)
    if method == "quadrature":
        Q, A, extra = _quadrature(model, x, [labels], nodes, fd, gauge)
        Q = Q[:, :, 0, 0]
        A = _real_connection(A[:, 0, 0])
    else:
        extra = {}
        if model.family == "GeneralizedOscillator":
            n = labels[0]
            Q = gho_metric_closed(x, n) - 0.5j * gho_curvature_closed(x, n)
            A = gho_connection_closed(x, n)
        else:
            modes = normal_modes(model, x)
            Q = metric_nosc_closed(modes, labels).astype(complex)
            A = np.zeros(model.n_params)
        if gauge is not None:
            A = A - _gauge_gradient(gauge, x, model.n_params)
    g, F = _metric_curvature(Q)
    meta = _metadata(model, x, method, state=list(labels), **extra)
    return GeometryResult(Q, g, F, A, meta)


def _apply_mixing(Q, A, mixing, x):
    V = mixing(x) if callable(mixing) else np.asarray(mixing)
    V = np.asarray(V, dtype=complex)
    Vh = V.conj().T
    Q = np.einsum("KI,ijKL,LJ->ijIJ", V.conj(), Q, V)
    A = np.einsum("KI,iKL,LJ->iIJ", V.conj(), A, V)
    if callable(mixing):
        for i in range(A.shape[0]):
            dV = fd_derivative(lambda xs: np.asarray(mixing(xs), dtype=complex), x, i, CURVATURE_FD)
            A[i] += 1j * Vh @ dV
    return Q, A


def qgt_nonabelian(model, x, level, method="analytic", nodes=None, fd=None, mixing=None, gauge=None):
    """Non-Abelian quantum geometric tensor of a degenerate level.

    Parameters
    ----------
    level : DegenerateLevel, int, label tuple or list of label tuples
        The level (an int selects it by energy index, a label tuple by member).
    mixing : callable or ndarray, optional
        Unitary V(x); the basis becomes psi'_I = sum_J psi_J V_JI.
    gauge : callable, optional
        Common phase alpha(x).

    Returns
    -------
    GeometryResult
        ``Q``, ``g``, ``F`` of shape (m, m, g, g) and the Wilczek-Zee
        connection ``A`` of shape (m, g, g).
    """
    _check_method(method)
    x = np.asarray(x, dtype=float)
    check_domain(model, x)
    labels = resolve_level(model, x, level)
    extra = {}
    if method == "quadrature":
        Q, A, extra = _quadrature(model, x, labels, nodes, fd, gauge, mixing)
    else:
        if model.family == "GeneralizedOscillator":
            if len(labels) != 1:
                raise ValueError("generalized oscillator levels are nondegenerate")
            r = qgt_abelian(model, x, labels[0], "analytic", gauge=gauge)
            Q, A = r.Q[:, :, None, None], r.A[:, None, None].astype(complex)
        elif model.family == "Ring3" and tuple(labels) == RING3_LEVEL:
            Q = ring3_metric_closed(x).astype(complex)
            A = np.zeros((model.n_params, 2, 2), dtype=complex)
            extra = {"closed_form": "ring3"}
        else:
            Q, A = ladder_tensors(normal_modes(model, x), labels)
            extra = {"closed_form": "ladder"}
        if mixing is not None:
            Q, A = _apply_mixing(Q, A, mixing, x)
        if gauge is not None and model.family != "GeneralizedOscillator":
            A = A - _gauge_gradient(gauge, x, model.n_params)[:, None, None] * np.eye(len(labels))
    g, F = _metric_curvature(Q)
    meta = _metadata(model, x, method, level=[list(lab) for lab in labels], **extra)
    return GeometryResult(Q, g, F, A, meta)


def curvature_from_connection(model, x, state, method="analytic", fd=CURVATURE_FD, nodes=None):
    """F_ij = d_i A_j - d_j A_i by central differences of :func:`berry_connection`.

    Antisymmetric by construction.
    """
    x = np.asarray(x, dtype=float)
    m = model.n_params

    def conn(xs):
        return berry_connection(model, xs, state, method=method, nodes=nodes)

    D = np.array([fd_derivative(conn, x, i, fd) for i in range(m)])
    return D - D.T


def metric_appendix_check(model, x, state, nodes=None, fd=SECOND_DERIVATIVE_FD):
    """Metric from g_ij = -((2 pi hbar)^N / 2) * integral W d_i d_j W.

    Second parameter derivatives of the closed-form Wigner function are
    taken by central differences with Richardson extrapolation.
    """
    x = np.asarray(x, dtype=float)
    check_domain(model, x)
    labels = resolve_state(model, x, state)
    N, m = model.n_modes, model.n_params
    _, k2 = integration_nodes(model, [labels], nodes)
    q, p, w = phase_space_grid(QuadratureSpec(k2, 1.0 / math.sqrt(2.0)), phase_frame(model, x))

    def wig(xs):
        return wigner_diagonal(labels, q, p, model, xs)

    W = wig(x)
    g = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            d2 = fd_second_derivative(wig, x, i, j, fd)
            g[i, j] = g[j, i] = -0.5 * (2.0 * math.pi * model.hbar) ** N * weighted_sum(w, W * d2)
    return g
