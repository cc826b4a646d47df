"""Quadrature rules, tensor-product phase-space integration and finite differences."""

import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import AccuracyWarning, IntegrationError, ModelDomainError
from .specfun import normalized_hermite_table

__all__ = [
    "QuadratureSpec",
    "FDSpec",
    "PhaseFrame",
    "default_nodes",
    "gauss_hermite_nodes",
    "gauss_laguerre_nodes",
    "trapezoid_periodic_nodes",
    "tensor_gauss_hermite",
    "phase_space_grid",
    "integrate_phase_space",
    "weighted_sum",
    "fd_step",
    "fd_derivative",
    "fd_gradient",
    "fd_second_derivative",
]

MAX_NODES = 256
RULES = ("gauss_hermite", "gauss_laguerre", "trapezoid_periodic")


def default_nodes(n_max):
    """Default node count per dimension for integrands built from levels up to ``n_max``."""
    return 2 * int(n_max) + 16


@dataclass(frozen=True)
class QuadratureSpec:
    """Node count, Gaussian width factor and rule for one tensor-product quadrature.

    ``scale`` multiplies the natural width of every dimension (the frame
    scales for phase-space integrals). Use ``1/sqrt(2)`` when the integrand
    carries two Wigner-function Gaussians instead of one.
    """

    nodes_per_dim: int = 16
    scale: float = 1.0
    rule: str = "gauss_hermite"

    def __post_init__(self):
        if self.nodes_per_dim < 1:
            raise ValueError("nodes_per_dim must be positive")
        if np.any(np.asarray(self.scale) <= 0):
            raise ValueError("scale must be positive")
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}; expected one of {RULES}")


@dataclass(frozen=True)
class FDSpec:
    """Central-difference step policy.

    With ``policy="relative"`` the step for parameter i is
    ``max(step, step * |x_i|)``; with ``"absolute"`` it is ``step``.
    """

    policy: str = "relative"
    step: float = 1e-5
    order: int = 2
    richardson: bool = False

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.policy not in ("relative", "absolute"):
            raise ValueError(f"unknown step policy {self.policy!r}")
        if self.order != 2:
            raise ValueError("only second-order central differences are implemented")


#: Second-derivative default: larger step, Richardson on.
SECOND_DERIVATIVE_FD = FDSpec(step=1e-3, richardson=True)


@dataclass(frozen=True)
class PhaseFrame:
    """Linear frame in which a phase-space integrand is close to a unit Gaussian.

    ``(q, p) = transform @ u`` with ``u = (Q_1..Q_N, P_1..P_N)``, and
    ``scales`` holds the natural Gaussian width of every ``u`` component.
    """

    transform: np.ndarray
    scales: np.ndarray = field(default=None)

    def __post_init__(self):
        t = np.asarray(self.transform, dtype=float)
        object.__setattr__(self, "transform", t)
        s = np.ones(t.shape[0]) if self.scales is None else np.asarray(self.scales, dtype=float)
        object.__setattr__(self, "scales", s)

    @property
    def n_modes(self):
        return self.transform.shape[0] // 2

    @classmethod
    def identity(cls, n_modes, scale=1.0):
        return cls(np.eye(2 * n_modes), np.full(2 * n_modes, float(scale)))


@functools.lru_cache(maxsize=None)
def _gauss_hermite_cached(n):
    if n == 1:
        return np.array([0.0]), np.array([math.sqrt(math.pi)])
    off = np.sqrt(np.arange(1, n) / 2.0)
    nodes = eigh_tridiagonal(np.zeros(n), off, eigvals_only=True)
    nodes = 0.5 * (nodes - nodes[::-1])  # exact symmetry of the rule
    # Christoffel weights keep full relative precision in the tails,
    # where squared eigenvector entries underflow.
    weights = 1.0 / np.sum(normalized_hermite_table(n - 1, nodes) ** 2, axis=0)
    weights = 0.5 * (weights + weights[::-1])
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def gauss_hermite_nodes(n):
    """Gauss-Hermite rule for the weight exp(-x^2), by the Golub-Welsch method.

    Parameters
    ----------
    n : int
        Number of nodes, 1 <= n <= 256.

    Returns
    -------
    nodes, weights : ndarray
        Read-only arrays; the weights sum to sqrt(pi).
    """
    n = int(n)
    if not 1 <= n <= MAX_NODES:
        raise ValueError(f"Gauss-Hermite node count must be in [1, {MAX_NODES}], got {n}")
    return _gauss_hermite_cached(n)


@functools.lru_cache(maxsize=None)
def _gauss_laguerre_cached(n):
    k = np.arange(n)
    nodes = eigh_tridiagonal(2.0 * k + 1.0, np.arange(1, n, dtype=float), eigvals_only=True)
    table = np.empty((n, n))
    table[0] = 1.0
    if n > 1:
        table[1] = 1.0 - nodes
    for j in range(1, n - 1):
        table[j + 1] = ((2 * j + 1 - nodes) * table[j] - j * table[j - 1]) / (j + 1)
    weights = 1.0 / np.sum(table**2, axis=0)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def gauss_laguerre_nodes(n):
    """Gauss-Laguerre rule for the weight exp(-x) on [0, inf)."""
    n = int(n)
    if not 1 <= n <= MAX_NODES:
        raise ValueError(f"Gauss-Laguerre node count must be in [1, {MAX_NODES}], got {n}")
    return _gauss_laguerre_cached(n)


def trapezoid_periodic_nodes(n):
    """Equispaced nodes on [0, 2 pi) with weights 2 pi / n."""
    n = int(n)
    if n < 1:
        raise ValueError("need at least one node")
    return 2.0 * math.pi * np.arange(n) / n, np.full(n, 2.0 * math.pi / n)


def tensor_gauss_hermite(n, dim):
    """Tensor Gauss-Hermite grid for exp(-|s|^2) in ``dim`` dimensions.

    Returns nodes of shape (n**dim, dim) and weights of shape (n**dim,).
    """
    x, w = gauss_hermite_nodes(n)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return nodes, weights


def phase_space_grid(spec, frame):
    """Nodes ``(q, p)`` and weights for integrating over R^(2N) in ``frame``.

    The weights already contain the Gaussian factor exp(+|s|^2) and the
    Jacobian, so that sum(weights * f(q, p)) approximates the plain integral
    of f.
    """
    if spec.rule != "gauss_hermite":
        raise ValueError("phase-space integration uses the gauss_hermite rule")
    dim = frame.transform.shape[0]
    x, w = gauss_hermite_nodes(spec.nodes_per_dim)
    w_plain = w * np.exp(x * x)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    wgrids = np.meshgrid(*([w_plain] * dim), indexing="ij")
    s = np.stack([g.ravel() for g in grids], axis=-1)
    widths = frame.scales * np.broadcast_to(np.asarray(spec.scale, dtype=float), (dim,))
    qp = (s * widths) @ frame.transform.T
    jac = abs(np.linalg.det(frame.transform)) * np.prod(widths)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1) * jac
    n = dim // 2
    return qp[:, :n], qp[:, n:], weights


def weighted_sum(weights, values):
    """Deterministic, correctly rounded sum of ``weights * values`` over axis 0.

    Real and imaginary parts are accumulated separately with ``math.fsum``;
    trailing axes of ``values`` are reduced independently.
    """
    values = np.asarray(values)
    terms = weights.reshape((-1,) + (1,) * (values.ndim - 1)) * values
    flat = terms.reshape(terms.shape[0], -1)
    out = np.empty(flat.shape[1], dtype=complex if np.iscomplexobj(flat) else float)
    for k in range(flat.shape[1]):
        col = flat[:, k]
        if np.iscomplexobj(col):
            out[k] = complex(math.fsum(col.real), math.fsum(col.imag))
        else:
            out[k] = math.fsum(col)
    return out.reshape(values.shape[1:]) if values.ndim > 1 else out[0]


def integrate_phase_space(f, spec, N, frame=None, chunk=32768):
    """Integrate ``f(q, p)`` over the 2N-dimensional phase space.

    Parameters
    ----------
    f : callable
        ``f(q, p)`` with ``q``, ``p`` of shape (M, N); returns shape (M,) or
        (M, ...) for several integrands at once.
    spec : QuadratureSpec
    N : int
        Number of degrees of freedom.
    frame : PhaseFrame, optional
        Coordinates and widths adapted to the integrand (default: identity).

    Returns
    -------
    complex or ndarray
        Real-valued integrands come back as floats.

    Raises
    ------
    IntegrationError
        If ``f`` returns a non-finite value; the message names the node.
    """
    frame = PhaseFrame.identity(N) if frame is None else frame
    if frame.n_modes != N:
        raise ValueError(f"frame has {frame.n_modes} modes, expected {N}")
    q, p, w = phase_space_grid(spec, frame)
    parts = []
    for start in range(0, len(w), chunk):
        sl = slice(start, start + chunk)
        vals = np.asarray(f(q[sl], p[sl]))
        bad = ~np.isfinite(vals)
        if np.any(bad):
            idx = np.argwhere(bad)[0]
            node = start + int(idx[0])
            raise IntegrationError(
                f"non-finite integrand at node {node}: q={q[node].tolist()}, p={p[node].tolist()}"
            )
        parts.append(vals)
    values = np.concatenate(parts, axis=0)
    result = weighted_sum(w, values)
    if np.iscomplexobj(result) and np.all(np.imag(result) == 0):
        result = np.real(result)
    return result


def fd_step(x, i, spec):
    """Step size used for parameter ``i`` at point ``x``."""
    if spec.policy == "absolute":
        return spec.step
    return max(spec.step, spec.step * abs(float(x[i])))


def _shift(x, i, delta):
    y = np.array(x, dtype=float)
    y[i] += delta
    return y


def _central(h, x, i, s):
    return (np.asarray(h(_shift(x, i, s))) - np.asarray(h(_shift(x, i, -s)))) / (2.0 * s)


def fd_derivative(h, x, i, spec=FDSpec()):
    """Central-difference derivative of ``h`` with respect to ``x[i]``.

    If ``h`` raises :class:`ModelDomainError` at a shifted point, a one-sided
    second-order stencil is used instead and an :class:`AccuracyWarning` is
    issued.
    """
    x = np.asarray(x, dtype=float)
    s = fd_step(x, i, spec)
    try:
        d = _central(h, x, i, s)
        if spec.richardson:
            d = (4.0 * _central(h, x, i, s / 2.0) - d) / 3.0
        return d
    except ModelDomainError:
        pass
    for sign in (1.0, -1.0):
        try:
            f0 = np.asarray(h(x))
            f1 = np.asarray(h(_shift(x, i, sign * s)))
            f2 = np.asarray(h(_shift(x, i, 2 * sign * s)))
        except ModelDomainError:
            continue
        warnings.warn(
            f"one-sided difference used for parameter {i} near the domain boundary",
            AccuracyWarning,
            stacklevel=2,
        )
        return sign * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * s)
    raise ModelDomainError(f"no admissible finite-difference stencil for parameter {i} at {x.tolist()}")


def fd_gradient(h, x, spec=FDSpec(), indices=None):
    """Stack of :func:`fd_derivative` over ``indices`` (all parameters by default)."""
    x = np.asarray(x, dtype=float)
    indices = range(len(x)) if indices is None else indices
    return np.stack([fd_derivative(h, x, i, spec) for i in indices])


def _second(h, x, i, j, si, sj, f0):
    if i == j:
        return (np.asarray(h(_shift(x, i, si))) - 2.0 * f0 + np.asarray(h(_shift(x, i, -si)))) / (si * si)
    pp = h(_shift(_shift(x, i, si), j, sj))
    pm = h(_shift(_shift(x, i, si), j, -sj))
    mp = h(_shift(_shift(x, i, -si), j, sj))
    mm = h(_shift(_shift(x, i, -si), j, -sj))
    return (np.asarray(pp) - np.asarray(pm) - np.asarray(mp) + np.asarray(mm)) / (4.0 * si * sj)


def fd_second_derivative(h, x, i, j, spec=SECOND_DERIVATIVE_FD):
    """Central second derivative d^2 h / dx_i dx_j, with optional Richardson step halving."""
    x = np.asarray(x, dtype=float)
    si, sj = fd_step(x, i, spec), fd_step(x, j, spec)
    f0 = np.asarray(h(x))
    d = _second(h, x, i, j, si, sj, f0)
    if spec.richardson:
        d = (4.0 * _second(h, x, i, j, si / 2.0, sj / 2.0, f0) - d) / 3.0
    return d
