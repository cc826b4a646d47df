"""Invariant checks at one parameter point, as used by ``wigner-geometry validate``."""

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .classical import bohr_sommerfeld, classical_metric_montecarlo, semiclassical_quantum_metric
from .connection import a_field_tensor
from .errors import AccuracyWarning
from .geometry import (
    integration_nodes,
    metric_appendix_check,
    qgt_abelian,
    qgt_nonabelian,
    resolve_level,
    resolve_state,
)
from .models import level_state_builder, normal_modes, phase_frame
from .quadrature import FDSpec, QuadratureSpec, fd_derivative, phase_space_grid, weighted_sum
from .wigner import cross_wigner_matrix, wigner_diagonal, wigner_level_matrix

__all__ = ["Check", "default_gauge", "validate_state", "validate_level"]

N_OSC = ("CoupledChainSymmetric2", "LinearlyCoupled2", "Ring3", "CustomK")


@dataclass
class Check:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.error) and self.error <= self.tolerance)

    def as_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def default_gauge(m):
    """alpha(x) = 0.3 x1 x2 (or 0.3 x1^2 with one parameter)."""
    if m >= 2:
        return lambda x: 0.3 * x[0] * x[1]
    return lambda x: 0.3 * x[0] * x[0]


def _maxabs(a):
    return float(np.max(np.abs(np.asarray(a)))) if np.size(a) else 0.0


def _grids(model, x, labels, nodes):
    k1, k2 = integration_nodes(model, labels, nodes)
    frame = phase_frame(model, x)
    single = phase_space_grid(QuadratureSpec(k1, 1.0), frame)
    pair = phase_space_grid(QuadratureSpec(k2, 1.0 / math.sqrt(2.0)), frame)
    return single, pair


def _lattice(model, x):
    """Tensor lattice {-2..2} * natural width per phase-space axis."""
    frame = phase_frame(model, x)
    dim = 2 * model.n_modes
    ticks = np.arange(-2.0, 3.0)
    grids = np.meshgrid(*([ticks] * dim), indexing="ij")
    s = np.stack([g.ravel() for g in grids], axis=-1)
    qp = (s * frame.scales) @ frame.transform.T
    return qp[:, : model.n_modes], qp[:, model.n_modes:]


def _common(model, x, labels, nodes, checks):
    N = model.n_modes
    c = (2.0 * math.pi * model.hbar) ** N
    (q1, p1, w1), (q2, p2, w2) = _grids(model, x, labels, nodes)
    g = len(labels)
    eye = np.eye(g)
    W1 = wigner_level_matrix(labels, q1, p1, model, x)
    W2 = wigner_level_matrix(labels, q2, p2, model, x)
    checks.append(Check("normalization", _maxabs(weighted_sum(w1, W1) - eye), 1e-9))
    purity = c * weighted_sum(w2, np.einsum("MIJ,MKL->MIJKL", W2, W2.conj()))
    checks.append(Check("purity", _maxabs(purity - np.einsum("IK,JL->IJKL", eye, eye)), 1e-9))

    ql, pl = _lattice(model, x)
    Wl = wigner_level_matrix(labels, ql, pl, model, x)
    build = level_state_builder(model, labels)
    states = build(x)
    numeric = np.swapaxes(cross_wigner_matrix(states, states, ql, pl, nodes=nodes), 1, 2)
    checks.append(Check("weyl_transform_vs_closed_form", _maxabs(numeric - Wl), 1e-8))
    checks.append(Check("hermiticity", _maxabs(Wl - np.conj(np.swapaxes(Wl, 1, 2))), 1e-12))
    diag_imag = max(_maxabs(numeric[:, K, K].imag) for K in range(g))
    checks.append(Check("diagonal_realness", diag_imag, 1e-12))
    return (q1, p1, w1), (q2, p2, w2)


def validate_state(model, x, state, nodes=None, fd=None):
    """Run the invariant suite for a nondegenerate state; returns a list of :class:`Check`."""
    x = np.asarray(x, dtype=float)
    fd = FDSpec() if fd is None else fd
    labels = resolve_state(model, x, state)
    m, N = model.n_params, model.n_modes
    c = (2.0 * math.pi * model.hbar) ** N
    checks = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        (q1, p1, w1), (q2, p2, w2) = _common(model, x, [labels], nodes, checks)

        def wig(grid):
            return lambda xs: wigner_diagonal(labels, grid[0], grid[1], model, xs)

        dW1 = np.array([fd_derivative(wig((q1, p1)), x, i, fd) for i in range(m)])
        dW2 = np.array([fd_derivative(wig((q2, p2)), x, i, fd) for i in range(m)])
        W2 = wig((q2, p2))(x)
        checks.append(Check("integral_of_dW", _maxabs(weighted_sum(w1, dW1.T)), 1e-8))
        checks.append(Check("integral_of_W_dW", _maxabs(weighted_sum(w2, (W2 * dW2).T)), 1e-8))

        build = level_state_builder(model, [labels])
        field_ = a_field_tensor(build, q2, p2, x, m, fd, nodes)[..., 0, 0]
        checks.append(Check("im_field_vs_dW", _maxabs(field_.imag - 0.5 * c * dW2), 1e-7))

        ana = qgt_abelian(model, x, labels, "analytic")
        quad = qgt_abelian(model, x, labels, "quadrature", nodes=nodes, fd=fd)
        checks.append(Check("metric_method_equivalence", _maxabs(ana.g - quad.g), 1e-6))
        checks.append(Check("curvature_method_equivalence", _maxabs(ana.F - quad.F), 1e-6))
        checks.append(Check("connection_method_equivalence", _maxabs(ana.A - quad.A), 1e-6))
        checks.append(Check("metric_symmetry", _maxabs(quad.g - quad.g.T), 1e-9))
        checks.append(Check("metric_psd", max(0.0, -float(np.min(np.linalg.eigvalsh(0.5 * (quad.g + quad.g.T))))), 1e-9))
        checks.append(Check("second_derivative_metric", _maxabs(metric_appendix_check(model, x, labels, nodes=nodes) - ana.g), 1e-5))

        alpha = default_gauge(m)
        gauged = qgt_abelian(model, x, labels, "quadrature", nodes=nodes, fd=fd, gauge=alpha)
        grad = np.array([fd_derivative(alpha, x, i, FDSpec(step=1e-3, richardson=True)) for i in range(m)])
        checks.append(Check("gauge_invariance_Q", _maxabs(gauged.Q - quad.Q), 1e-7))
        checks.append(Check("gauge_shift_A", _maxabs(gauged.A - (quad.A - grad)), 1e-6))

        if model.family in N_OSC:
            modes = normal_modes(model, x)
            closed = semiclassical_quantum_metric(modes, labels, model.hbar)
            checks.append(Check("semiclassical_closed_form", _maxabs(closed - ana.g), 1e-10))
            I, I2 = bohr_sommerfeld(labels, model.hbar)
            sampled = classical_metric_montecarlo(modes, I, I_squared=I2)
            semi = semiclassical_quantum_metric(modes, labels, model.hbar, classical=sampled)
            checks.append(Check("semiclassical_sampled", _maxabs(semi - quad.g), 1e-6))
    return checks


def validate_level(model, x, level, nodes=None, fd=None):
    """Run the invariant suite for a degenerate level; returns a list of :class:`Check`."""
    x = np.asarray(x, dtype=float)
    fd = FDSpec() if fd is None else fd
    labels = resolve_level(model, x, level)
    checks = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        _common(model, x, labels, nodes, checks)
        ana = qgt_nonabelian(model, x, labels, "analytic")
        quad = qgt_nonabelian(model, x, labels, "quadrature", nodes=nodes, fd=fd)
        checks.append(Check("metric_method_equivalence", _maxabs(ana.g - quad.g), 1e-6))
        checks.append(Check("curvature_method_equivalence", _maxabs(ana.F - quad.F), 1e-6))
        checks.append(Check("connection_method_equivalence", _maxabs(ana.A - quad.A), 1e-6))
        checks.append(Check("connection_hermiticity", _maxabs(quad.A - np.conj(np.swapaxes(quad.A, 1, 2))), 1e-9))
        g = len(labels)
        if g >= 2:
            rng = np.random.default_rng(0)
            V, _ = np.linalg.qr(rng.normal(size=(g, g)) + 1j * rng.normal(size=(g, g)))
            mixed = qgt_nonabelian(model, x, labels, "quadrature", nodes=nodes, fd=fd, mixing=V)
            expected = np.einsum("KI,ijKL,LJ->ijIJ", V.conj(), quad.Q, V)
            checks.append(Check("unitary_covariance", _maxabs(mixed.Q - expected), 1e-6))
    return checks
