"""Independent Hilbert-space oracles.

Nothing here uses the package: wavefunctions come from scipy Hermite
polynomials, normal modes from ``numpy.linalg.eigh``, overlaps from a
position-space Gauss-Hermite grid and parameter derivatives from central
differences of the wavefunctions themselves.
"""

import itertools
import math

import numpy as np
from scipy.special import eval_hermite, roots_hermite


def hermite_function(n, xi):
    """chi_n(xi) = (2^n n! sqrt(pi))^-1/2 H_n(xi) exp(-xi^2/2)."""
    norm = 1.0 / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
    return norm * eval_hermite(n, xi) * np.exp(-0.5 * xi * xi)


def position_grid(n_dims, width, nodes=48):
    """Tensor Gauss-Hermite grid for plain integrals over R^n_dims, scaled by ``width``."""
    s, w = roots_hermite(nodes)
    w = w * np.exp(s * s) * width
    pts = np.array(list(itertools.product(s * width, repeat=n_dims)))
    wts = np.prod(np.array(list(itertools.product(w, repeat=n_dims))), axis=1)
    return pts, wts


# ---------------------------------------------------------------- wavefunctions


def gho_wavefunction(n, q, x, hbar=1.0):
    """Eigenfunction of (X q^2 + Y (qp + pq) + Z p^2) / 2.

    H = Z/2 (p + Y q / Z)^2 + w^2 q^2 / (2Z) is an oscillator of mass 1/Z in
    the gauge p -> p + Y q / Z, hence the quadratic phase.
    """
    X, Y, Z = x
    w = math.sqrt(X * Z - Y * Y)
    c = w / (Z * hbar)
    q = np.asarray(q)[..., 0]
    return c**0.25 * hermite_function(n, math.sqrt(c) * q) * np.exp(-1j * Y * q * q / (2 * Z * hbar))


def eigh_modes(k_of_x, reference_x, axis_aligned=False):
    """``modes(x) -> (w, U)`` with rows of U the eigenvectors of K(x), sign-aligned to ``reference_x``.

    Modes come in ascending frequency. With ``axis_aligned`` mode a is instead
    the one with the largest weight on coordinate a at the reference point
    (the rotation-angle convention of the two-mode linear coupling family).
    """
    _, V0 = np.linalg.eigh(k_of_x(reference_x))
    order = np.argmax(np.abs(V0), axis=1) if axis_aligned else np.arange(len(V0))
    V0 = V0[:, order]

    def modes(x):
        w2, V = np.linalg.eigh(k_of_x(x))
        w2, V = w2[order], V[:, order]
        V = V * np.sign(np.sum(V * V0, axis=0))
        return np.sqrt(w2), V.T

    return modes


RING3_U = np.array(
    [
        [1, 1, 1],
        [-math.sqrt(1.5), 0, math.sqrt(1.5)],
        [1 / math.sqrt(2), -math.sqrt(2), 1 / math.sqrt(2)],
    ]
) / math.sqrt(3)


def ring3_modes(x):
    """Ring of three unit masses: constant modes, frequencies (sqrt k, sqrt(k + 3k'), sqrt(k + 3k'))."""
    k, kp = x
    return np.array([math.sqrt(k), math.sqrt(k + 3 * kp), math.sqrt(k + 3 * kp)]), RING3_U


def ring3_k(x):
    k, kp = x
    return (k + 3 * kp) * np.eye(3) - kp * np.ones((3, 3))


def chain2_k(x):
    k, kp = x
    return np.array([[k + kp, -kp], [-kp, k + kp]])


def lco_k(x):
    A, B, C = x
    return np.array([[A, C / 2], [C / 2, B]])


def normal_mode_wavefunction(labels, q, w, U, hbar=1.0):
    Q = q @ U.T
    out = np.ones(q.shape[:-1])
    for a, n in enumerate(labels):
        c = w[a] / hbar
        out = out * c**0.25 * hermite_function(n, math.sqrt(c) * Q[..., a])
    return out


# ---------------------------------------------------------------- geometry


def hilbert_geometry(states_at, x, q, weights, h=1e-5):
    """Q_ijIJ and A_iIJ of the basis ``states_at(x) -> (g, M)`` sampled at ``q``.

    Q_ijIJ = <d_i I|d_j J> - sum_K <d_i I|K><K|d_j J>,  A_iIJ = i <I|d_i J>.
    """
    x = np.asarray(x, dtype=float)
    psi = states_at(x)
    m = len(x)
    d = []
    for i in range(m):
        e = np.zeros(m)
        e[i] = h
        d.append((states_at(x + e) - states_at(x - e)) / (2 * h))
    d = np.array(d)

    def inner(a, b):
        return np.einsum("...IM,...JM,M->...IJ", np.conj(a), b, weights)

    dd = inner(d[:, None], d[None, :])
    dp = inner(d, psi[None])
    Q = dd - np.einsum("iIK,jJK->ijIJ", dp, np.conj(dp))
    A = 1j * inner(psi[None], d)
    return Q, A


def gho_geometry(x, n, hbar=1.0):
    """Oracle (Q, A) for a generalized-oscillator eigenstate."""
    X, Y, Z = x
    w = math.sqrt(X * Z - Y * Y)
    q, wts = position_grid(1, math.sqrt(Z * hbar / w), nodes=60)
    Q, A = hilbert_geometry(lambda xs: gho_wavefunction(n, q, xs, hbar)[None], x, q, wts)
    return Q[:, :, 0, 0], A[:, 0, 0].real


def nosc_geometry(modes, x, labels_list, hbar=1.0, nodes=40):
    """Oracle (Q, A) for a basis of normal-mode product states.

    ``modes(x) -> (w, U)``; ``labels_list`` is a list of label tuples.
    """
    w0, _ = modes(x)
    N = len(w0)
    q, wts = position_grid(N, math.sqrt(hbar / w0.min()), nodes=nodes)

    def states(xs):
        w, U = modes(xs)
        return np.array([normal_mode_wavefunction(lab, q, w, U, hbar) for lab in labels_list])

    return hilbert_geometry(states, x, q, wts)


def wigner_by_trapezoid(ket, bra, q, p, hbar=1.0, half_width=14.0, points=1401):
    """One-mode cross Wigner function by brute-force trapezoid over y.

    ``ket``/``bra`` map positions (shape (..., 1)) to amplitudes; the
    integrand decays like a Gaussian, so the trapezoid rule converges
    spectrally.
    """
    y = np.linspace(-half_width, half_width, points)
    dy = y[1] - y[0]
    out = np.empty(len(q), dtype=complex)
    for k, (qk, pk) in enumerate(zip(q, p)):
        vals = np.exp(-1j * pk * y / hbar) * ket((qk + y / 2)[:, None]) * np.conj(bra((qk - y / 2)[:, None]))
        out[k] = np.sum(vals) * dy
    return out / (2 * math.pi * hbar)


# ---------------------------------------------------------------- classical


def classical_metric_by_flow(modes, x, I, samples=32, h=1e-6):
    """Angle covariance of the generator of the x-flow at fixed angle-action.

    z = (q, p) = L(x) zeta with zeta = sqrt(2 I) (sin phi, cos phi) and
    L = diag(U^T w^-1/2, U^T w^1/2). Since L is symplectic, d_i z = (d_i L L^-1) z
    is Hamiltonian with quadratic generator G_i = z^T S_i z / 2,
    S_i = -J d_i L L^-1.
    """
    x = np.asarray(x, dtype=float)
    I = np.asarray(I, dtype=float)
    N = len(I)

    def L(xs):
        w, U = modes(xs)
        return np.block([[U.T * w**-0.5, np.zeros((N, N))], [np.zeros((N, N)), U.T * w**0.5]])

    J = np.block([[np.zeros((N, N)), np.eye(N)], [-np.eye(N), np.zeros((N, N))]])
    L0 = L(x)
    phi1 = 2 * math.pi * np.arange(samples) / samples
    phi = np.array(list(itertools.product(phi1, repeat=N)))
    zeta = np.concatenate([np.sqrt(2 * I) * np.sin(phi), np.sqrt(2 * I) * np.cos(phi)], axis=1)
    z = zeta @ L0.T
    G = []
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = h
        dL = (L(x + e) - L(x - e)) / (2 * h)
        S = -J @ dL @ np.linalg.inv(L0)
        S = 0.5 * (S + S.T)
        G.append(0.5 * np.einsum("sa,ab,sb->s", z, S, z))
    G = np.array(G)
    G = G - G.mean(axis=1, keepdims=True)
    return G @ G.T / G.shape[1]
