import json
import math

import numpy as np
import pytest

import oracles
from wigner_geometry.errors import DegeneracyError, ModelDomainError
from wigner_geometry.models import (
    DegenerateLevel,
    ModelSpec,
    ParameterPoint,
    canonical_coordinates,
    check_domain,
    enumerate_level,
    generalized_oscillator_wavefunction,
    k_matrix,
    load_model,
    model_from_config,
    normal_modes,
    oscillator_state,
    product_wavefunction,
)
from wigner_geometry.quadrature import fd_derivative

GHO = ModelSpec("GeneralizedOscillator")
CHAIN = ModelSpec("CoupledChainSymmetric2")
LCO = ModelSpec("LinearlyCoupled2")
RING = ModelSpec("Ring3")


def test_default_parameter_names_and_sizes():
    assert GHO.param_names == ("X", "Y", "Z") and GHO.n_modes == 1
    assert CHAIN.param_names == ("k", "k'") and CHAIN.n_modes == 2
    assert LCO.n_params == 3 and RING.n_modes == 3
    assert GHO.point(1, 0, 1).as_dict() == {"X": 1.0, "Y": 0.0, "Z": 1.0}


def test_model_spec_rejects_bad_input():
    with pytest.raises(ValueError):
        ModelSpec("Morse")
    with pytest.raises(ValueError):
        ModelSpec("Ring3", hbar=0.0)
    with pytest.raises(ValueError):
        ModelSpec("CustomK")
    with pytest.raises(ValueError):
        ParameterPoint((1.0, 2.0), ("a",))


@pytest.mark.parametrize(
    "model, x",
    [
        (GHO, (1.0, 1.0, 1.0)),
        (GHO, (-1.0, 0.0, -1.0)),
        (CHAIN, (0.0, 1.0)),
        (CHAIN, (1.0, -0.6)),
        (RING, (1.0, -0.4)),
        (LCO, (1.0, 1.0, 0.5)),
        (LCO, (1.0, 2.0, 0.0)),
        (LCO, (1.0, 0.4, 1.3)),
        (GHO, (1.0, float("nan"), 1.0)),
    ],
)
def test_domain_violations(model, x):
    with pytest.raises(ModelDomainError):
        check_domain(model, x)


def test_wrong_parameter_count():
    with pytest.raises(ValueError):
        check_domain(GHO, (1.0, 0.0))


@pytest.mark.parametrize(
    "model, x, kfun",
    [
        (CHAIN, (1.0, 0.5), oracles.chain2_k),
        (RING, (1.2, 0.3), oracles.ring3_k),
        (LCO, (1.0, 1.5, 0.4), oracles.lco_k),
        (LCO, (2.0, 0.7, -0.9), oracles.lco_k),
    ],
)
def test_normal_modes_diagonalize_k(model, x, kfun):
    modes = normal_modes(model, x)
    K = kfun(x)
    assert np.allclose(k_matrix(model, x), K)
    assert np.allclose(modes.U @ modes.U.T, np.eye(model.n_modes), atol=1e-14)
    assert np.allclose(modes.U @ K @ modes.U.T, np.diag(modes.frequencies**2), atol=1e-13)
    assert np.allclose(modes.k_matrix(), K, atol=1e-13)


@pytest.mark.parametrize(
    "model, x",
    [(CHAIN, (1.0, 0.5)), (RING, (1.2, 0.3)), (LCO, (1.0, 1.5, 0.4)), (LCO, (2.0, 0.7, -0.9)), (GHO, (1.1, 0.2, 0.8))],
)
def test_mode_derivatives_match_finite_differences(model, x):
    modes = normal_modes(model, x)
    for i in range(model.n_params):
        dw = fd_derivative(lambda xs: normal_modes(model, xs).frequencies, x, i)
        dU = fd_derivative(lambda xs: normal_modes(model, xs).U, x, i)
        assert np.allclose(modes.dfreq[i], dw, atol=1e-8)
        assert np.allclose(modes.dU[i], dU, atol=1e-8)


def test_lco_mode_order_follows_rotation_convention():
    # first normal mode is the one that becomes q1 as C -> 0 with A < B
    modes = normal_modes(LCO, (1.0, 2.0, 1e-4))
    assert modes.frequencies[0] == pytest.approx(1.0, abs=1e-4)
    assert abs(modes.U[0, 0]) == pytest.approx(1.0, abs=1e-6)


def test_custom_k_config_reproduces_lco(tmp_path):
    config = {
        "family": "CustomK",
        "parameters": ["A", "B", "C"],
        "hbar": 1.0,
        "k_matrix": [
            {"coefficient": [[1, 0], [0, 0]], "powers": {"A": 1}},
            {"coefficient": [[0, 0], [0, 1]], "powers": {"B": 1}},
            {"coefficient": [[0, 0.5], [0.5, 0]], "powers": {"C": 1}},
        ],
    }
    path = tmp_path / "lco.json"
    path.write_text(json.dumps(config))
    custom = load_model(path)
    assert custom.n_modes == 2 and custom.param_names == ("A", "B", "C")
    x = (1.0, 1.7, 0.6)
    a, b = normal_modes(custom, x), normal_modes(LCO, x)
    assert a.method == "finite_difference"
    assert np.allclose(a.frequencies, b.frequencies, atol=1e-12)
    # row signs may differ between conventions; the geometry-relevant products agree
    s = np.sign(np.sum(a.U * b.U, axis=1))[:, None]
    assert np.allclose(a.U * s, b.U, atol=1e-12)
    assert np.allclose(a.dU * s, b.dU, atol=1e-7)
    assert np.allclose(a.dfreq, b.dfreq, atol=1e-8)


def test_custom_k_rejects_unknown_parameters_and_degeneracy():
    with pytest.raises(ValueError):
        model_from_config(
            {"family": "CustomK", "parameters": ["a"], "k_matrix": [{"coefficient": [[1]], "powers": {"b": 1}}]}
        )
    flat = model_from_config(
        {"family": "CustomK", "parameters": ["a"], "k_matrix": [{"coefficient": [[1, 0], [0, 1]], "powers": {"a": 1}}]}
    )
    with pytest.raises(DegeneracyError):
        normal_modes(flat, (2.0,))


def test_wavefunctions_match_oracle_and_are_normalized():
    x = (1.3, -0.4, 0.8)
    q = np.linspace(-3, 3, 41)
    assert np.allclose(generalized_oscillator_wavefunction(2, q, x), oracles.gho_wavefunction(2, q[:, None], x))
    pts, wts = oracles.position_grid(2, 1.0, nodes=30)
    modes = normal_modes(LCO, (1.0, 1.5, 0.4))
    psi = product_wavefunction((1, 2), pts @ modes.U.T, modes)
    assert np.sum(wts * psi**2) == pytest.approx(1.0, abs=1e-12)


def test_oscillator_state_evaluates_wavefunction():
    x = (1.3, -0.4, 0.8)
    st = oscillator_state(GHO, x, (3,))
    q = np.linspace(-2, 2, 9)[:, None]
    assert np.allclose(st(q), generalized_oscillator_wavefunction(3, q[:, 0], x), atol=1e-14)


def test_canonical_coordinates():
    x = (1.0, 0.3, 2.0)
    Q, P, w = canonical_coordinates(GHO, x, np.array([0.5]), np.array([0.2]))
    assert Q[0] == pytest.approx(0.5 / math.sqrt(2.0))
    assert P[0] == pytest.approx(math.sqrt(2.0) * (0.2 + 0.3 * 0.5 / 2.0))
    assert w[0] == pytest.approx(math.sqrt(2.0 - 0.09))


def test_enumerate_level_ring3_generic_and_accidental():
    lvl = enumerate_level(RING, (1.0, 0.5), energy_index=1)
    assert isinstance(lvl, DegenerateLevel)
    # omega = (1, sqrt(2.5), sqrt(2.5)): first excited level is the ground mode excited once
    assert lvl.labels == ((1, 0, 0),)
    lvl = enumerate_level(RING, (1.0, 0.5), label=(0, 0, 1))
    assert lvl.labels == ((0, 0, 1), (0, 1, 0))
    # at k = k' = 1 the upper frequency is exactly twice the lower one
    lvl = enumerate_level(RING, (1.0, 1.0), label=(0, 1, 0))
    assert lvl.labels == ((0, 0, 1), (0, 1, 0), (2, 0, 0))
    assert enumerate_level(RING, (1.0, 1.0), energy_index=2).labels == lvl.labels


def test_enumerate_level_needs_one_selector():
    with pytest.raises(ValueError):
        enumerate_level(CHAIN, (1.0, 0.5))
    with pytest.raises(ValueError):
        enumerate_level(CHAIN, (1.0, 0.5), energy_index=1, label=(0, 1))


def test_chain_levels_nondegenerate_for_generic_couplings():
    for k in range(6):
        assert enumerate_level(CHAIN, (1.0, 0.37), energy_index=k).degeneracy == 1
