import math
import warnings

import numpy as np
import pytest

from wigner_geometry.errors import AccuracyWarning, IntegrationError, ModelDomainError
from wigner_geometry.quadrature import (
    FDSpec,
    PhaseFrame,
    QuadratureSpec,
    default_nodes,
    fd_derivative,
    fd_gradient,
    fd_second_derivative,
    gauss_hermite_nodes,
    gauss_laguerre_nodes,
    integrate_phase_space,
    phase_space_grid,
    tensor_gauss_hermite,
    trapezoid_periodic_nodes,
    weighted_sum,
)


@pytest.mark.parametrize("n", [1, 2, 5, 20, 64])
def test_gauss_hermite_matches_numpy(n):
    x, w = gauss_hermite_nodes(n)
    xr, wr = np.polynomial.hermite.hermgauss(n)
    assert np.allclose(x, xr, atol=1e-12)
    assert np.allclose(w, wr, rtol=1e-10, atol=1e-300)


@pytest.mark.parametrize("n", [1, 3, 10, 30])
def test_gauss_laguerre_matches_numpy(n):
    x, w = gauss_laguerre_nodes(n)
    xr, wr = np.polynomial.laguerre.laggauss(n)
    assert np.allclose(x, xr, rtol=1e-12)
    assert np.allclose(w, wr, rtol=1e-9, atol=1e-300)


def test_gauss_hermite_exact_for_moments():
    n = 6
    x, w = gauss_hermite_nodes(n)
    for k in range(0, 2 * n):
        exact = 0.0 if k % 2 else math.gamma((k + 1) / 2)
        assert np.sum(w * x**k) == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_rules_reject_bad_counts():
    with pytest.raises(ValueError):
        gauss_hermite_nodes(0)
    with pytest.raises(ValueError):
        gauss_laguerre_nodes(1000)
    with pytest.raises(ValueError):
        QuadratureSpec(nodes_per_dim=0)
    with pytest.raises(ValueError):
        QuadratureSpec(rule="simpson")


def test_trapezoid_periodic_integrates_trig_polynomials():
    t, w = trapezoid_periodic_nodes(8)
    assert np.sum(w) == pytest.approx(2 * math.pi)
    assert np.sum(w * np.cos(3 * t) ** 2) == pytest.approx(math.pi)
    assert abs(np.sum(w * np.sin(t) * np.cos(t))) < 1e-14


def test_tensor_grid_shape_and_weight_sum():
    s, w = tensor_gauss_hermite(4, 3)
    assert s.shape == (64, 3)
    assert np.sum(w) == pytest.approx(math.pi**1.5)


def test_phase_space_grid_integrates_rotated_gaussian_exactly():
    rng = np.random.default_rng(1)
    T = rng.normal(size=(4, 4)) + 3 * np.eye(4)
    frame = PhaseFrame(T, np.array([0.7, 1.3, 0.9, 1.1]))
    q, p, w = phase_space_grid(QuadratureSpec(8), frame)
    u = np.linalg.solve(T, np.concatenate([q, p], axis=1).T).T / frame.scales
    f = np.exp(-np.sum(u * u, axis=1)) * (1 + u[:, 0] ** 2 * u[:, 3] ** 2)
    exact = math.pi**2 * abs(np.linalg.det(T)) * np.prod(frame.scales) * (1 + 0.25)
    assert weighted_sum(w, f) == pytest.approx(exact, rel=1e-12)


def test_integrate_phase_space_vector_valued_and_real_output():
    spec = QuadratureSpec(10)

    def f(q, p):
        g = np.exp(-q[:, 0] ** 2 - p[:, 0] ** 2)
        return np.stack([g, g * q[:, 0] ** 2, 1j * g * p[:, 0]], axis=1)

    out = integrate_phase_space(f, spec, 1)
    assert np.allclose(out, [math.pi, math.pi / 2, 0.0], atol=1e-13)


def test_integrate_phase_space_reports_bad_node():
    with pytest.raises(IntegrationError, match="node"):
        integrate_phase_space(lambda q, p: 1.0 / q[:, 0] * 0.0 + np.where(q[:, 0] > 1, np.nan, 1.0), QuadratureSpec(6), 1)


def test_weighted_sum_is_order_independent():
    rng = np.random.default_rng(3)
    w = rng.uniform(size=1000)
    v = rng.normal(size=(1000, 3)) * 10.0 ** rng.integers(-8, 8, size=(1000, 1))
    perm = rng.permutation(1000)
    a = weighted_sum(w, v)
    b = weighted_sum(w[perm], v[perm])
    assert np.array_equal(a, b)


def test_default_nodes():
    assert default_nodes(0) == 16
    assert default_nodes(3) == 22


def test_fd_derivative_on_polynomial_and_vector_output():
    h = lambda x: np.array([x[0] ** 3 * x[1], np.sin(x[1])])  # noqa: E731
    x = np.array([1.3, 0.4])
    d0 = fd_derivative(h, x, 0)
    d1 = fd_derivative(h, x, 1, FDSpec(step=1e-3, richardson=True))
    assert np.allclose(d0, [3 * 1.3**2 * 0.4, 0.0], atol=1e-8)
    assert np.allclose(d1, [1.3**3, math.cos(0.4)], atol=1e-11)
    assert fd_gradient(lambda x: x[0] * x[1], x).shape == (2,)


def test_fd_one_sided_near_boundary():
    def h(x):
        if x[0] <= 0:
            raise ModelDomainError("x must be positive")
        return x[0] ** 2

    with pytest.warns(AccuracyWarning, match="one-sided"):
        d = fd_derivative(h, np.array([1e-6]), 0, FDSpec(step=1e-5, policy="absolute"))
    assert d == pytest.approx(2e-6, abs=1e-9)


def test_fd_second_derivative():
    h = lambda x: x[0] ** 2 * x[1] ** 3  # noqa: E731
    x = np.array([0.8, 1.1])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert fd_second_derivative(h, x, 0, 0) == pytest.approx(2 * 1.1**3, rel=1e-9)
        assert fd_second_derivative(h, x, 0, 1) == pytest.approx(6 * 0.8 * 1.1**2, rel=1e-9)


def test_fd_spec_validation():
    with pytest.raises(ValueError):
        FDSpec(step=0)
    with pytest.raises(ValueError):
        FDSpec(policy="adaptive")
    with pytest.raises(ValueError):
        FDSpec(order=4)
