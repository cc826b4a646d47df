import math

import numpy as np
import pytest

from wigner_geometry.connection import (
    a_field_gho,
    a_field_nosc,
    a_field_numeric,
    theta_nosc,
    xi_gho,
    xi_nosc,
)
from wigner_geometry.errors import ModelDomainError
from wigner_geometry.models import ModelSpec, normal_modes, phase_frame
from wigner_geometry.quadrature import FDSpec, fd_derivative
from wigner_geometry.wigner import RING3_LEVEL, wigner_diagonal, wigner_fock, wigner_level_matrix

GHO = ModelSpec("GeneralizedOscillator")
CHAIN = ModelSpec("CoupledChainSymmetric2")
LCO = ModelSpec("LinearlyCoupled2")
RING = ModelSpec("Ring3")


def _points(model, x, count=40, seed=0):
    """Random phase points spread over the natural width of the states."""
    frame = phase_frame(model, x)
    s = np.random.default_rng(seed).normal(size=(count, 2 * model.n_modes)) * 1.2
    qp = (s * frame.scales) @ frame.transform.T
    return qp[:, : model.n_modes], qp[:, model.n_modes:]


@pytest.mark.parametrize("n", range(0, 4))
@pytest.mark.parametrize("x", [(1.3, -0.4, 0.8), (0.7, 0.2, 1.9)])
def test_gho_numeric_field_matches_closed_form(n, x):
    q, p = _points(GHO, x)
    for i in range(3):
        num = a_field_numeric(i, (n,), q, p, GHO, x)
        closed = a_field_gho(i, n, q[:, 0], p[:, 0], x)
        assert np.allclose(num, closed, atol=1e-8 * (n + 1), rtol=0)


@pytest.mark.parametrize(
    "model, x, labels",
    [
        (CHAIN, (1.0, 0.5), (1, 2)),
        (LCO, (1.0, 1.5, 0.4), (0, 0)),
        (LCO, (1.0, 1.5, 0.4), (2, 1)),
        (LCO, (2.0, 0.7, -0.9), (1, 3)),
        (ModelSpec("LinearlyCoupled2", hbar=0.6), (1.0, 1.5, 0.4), (1, 1)),
    ],
)
def test_nosc_numeric_field_matches_closed_form(model, x, labels):
    q, p = _points(model, x, count=30)
    modes = normal_modes(model, x)
    for i in range(model.n_params):
        num = a_field_numeric(i, labels, q, p, model, x)
        closed = a_field_nosc(i, labels, q, p, modes, model.hbar)
        assert np.allclose(num, closed, atol=1e-8, rtol=0)


def test_rotation_term_uses_lowered_then_raised_ordering():
    # Swapping the raised/lowered factors between the two modes changes the
    # field whenever both modes are excited; only the ordering implemented
    # agrees with the numeric transform.
    x, labels = (1.0, 1.5, 0.4), (1, 1)
    q, p = _points(LCO, x, count=30)
    modes = normal_modes(LCO, x)
    num = a_field_numeric(0, labels, q, p, LCO, x)
    w = modes.frequencies
    Q, P = q @ modes.U.T, p @ modes.U.T
    M = modes.dU[0] @ modes.U.T
    swapped = np.zeros(len(q), dtype=complex)
    for a, c in ((0, 1), (1, 0)):
        swapped += math.sqrt(w[a] / w[c]) * M[a, c] * theta_nosc(1, +1, Q[:, a], P[:, a], w[a]) * theta_nosc(
            1, -1, Q[:, c], P[:, c], w[c]
        )
    for a in range(2):
        other = wigner_fock(1, 1, Q[:, 1 - a], P[:, 1 - a], w[1 - a])
        swapped += 0.25 * modes.dfreq[0, a] / w[a] * xi_nosc(1, Q[:, a], P[:, a], w[a]) * other
    swapped *= 1j * (2 * math.pi) ** 2
    assert np.allclose(num, a_field_nosc(0, labels, q, p, modes), atol=1e-8)
    assert not np.allclose(num, swapped, atol=1e-3)


@pytest.mark.parametrize(
    "model, x, labels",
    [(GHO, (1.3, -0.4, 0.8), (2,)), (LCO, (1.0, 1.5, 0.4), (1, 2)), (RING, (1.2, 0.3), (1, 0, 0))],
)
def test_imaginary_part_is_wigner_derivative(model, x, labels):
    q, p = _points(model, x, count=20)
    c = (2 * math.pi * model.hbar) ** model.n_modes
    for i in range(model.n_params):
        dW = fd_derivative(lambda xs: wigner_diagonal(labels, q, p, model, xs), x, i, FDSpec(step=1e-4, richardson=True))
        field = a_field_numeric(i, labels, q, p, model, x)
        assert np.allclose(field.imag, 0.5 * c * dW, atol=1e-8)


@pytest.mark.parametrize("model, x, labels", [(GHO, (1.3, -0.4, 0.8), (1,)), (CHAIN, (1.0, 0.5), (0, 2))])
def test_gauge_phase_shifts_field_by_wigner_times_gradient(model, x, labels):
    q, p = _points(model, x, count=20)
    c = (2 * math.pi * model.hbar) ** model.n_modes
    alpha = lambda xs: 0.3 * xs[0] * xs[1]  # noqa: E731
    grad = np.array([0.3 * x[1], 0.3 * x[0]] + [0.0] * (model.n_params - 2))
    W = wigner_diagonal(labels, q, p, model, x)
    for i in range(model.n_params):
        plain = a_field_numeric(i, labels, q, p, model, x)
        gauged = a_field_numeric(i, labels, q, p, model, x, gauge=alpha)
        assert np.allclose(gauged, plain - c * W * grad[i], atol=1e-8)


def test_nonabelian_field_conjugation_relation():
    # A_iIJ - conj(A_iJI) = i (2 pi hbar)^N d_i W_JI
    x = (1.2, 0.3)
    q, p = _points(RING, x, count=15)
    c = (2 * math.pi) ** 3
    fd = FDSpec(step=1e-4, richardson=True)
    for i in range(2):
        dW = fd_derivative(lambda xs: wigner_level_matrix(RING3_LEVEL, q, p, RING, xs), x, i, fd)
        for I in range(2):
            for J in range(2):
                a_ij = a_field_numeric(i, (RING3_LEVEL, I, J), q, p, RING, x)
                a_ji = a_field_numeric(i, (RING3_LEVEL, J, I), q, p, RING, x)
                assert np.allclose(a_ij - np.conj(a_ji), 1j * c * dW[:, J, I], atol=1e-8)


def test_closed_form_helpers_drop_impossible_lowerings():
    Q, P = np.array([0.3, -0.2]), np.array([0.1, 0.5])
    assert np.allclose(xi_gho(1, -1, Q, P, 1.2), -math.sqrt(6) * wigner_fock(3, 1, Q, P, 1.2))
    assert np.allclose(theta_nosc(0, +1, Q, P, 1.2), math.sqrt(0.5) * wigner_fock(1, 0, Q, P, 1.2))


def test_closed_form_input_validation():
    with pytest.raises(ModelDomainError):
        a_field_gho(0, 0, np.zeros(2), np.zeros(2), (1.0, 2.0, 1.0))
    with pytest.raises(TypeError):
        a_field_nosc(0, (0, 0), np.zeros((1, 2)), np.zeros((1, 2)), modes="not modes")
    with pytest.raises(ValueError):
        a_field_nosc(0, (0,), np.zeros((1, 2)), np.zeros((1, 2)), normal_modes(CHAIN, (1.0, 0.5)))
    with pytest.raises(ValueError):
        a_field_numeric(0, (0, 0, 0), np.zeros((1, 2)), np.zeros((1, 2)), CHAIN, (1.0, 0.5))
