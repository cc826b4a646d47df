"""
Generalized harmonic oscillator: Wigner functions and parameter-space geometry
==============================================================================

H = (X q^2 + Y (qp + pq) + Z p^2) / 2 has frequency w = sqrt(XZ - Y^2).
Its eigenstates depend on three parameters, so each level carries a 3x3
quantum metric, a Berry curvature and a Berry connection. We compute them
from phase-space integrals of Wigner functions and compare with the closed
forms.
"""

import numpy as np

from wigner_geometry import ModelSpec, qgt_abelian
from wigner_geometry.geometry import gho_connection_closed, gho_curvature_closed, gho_metric_closed
from wigner_geometry.models import phase_frame
from wigner_geometry.quadrature import QuadratureSpec, phase_space_grid, weighted_sum
from wigner_geometry.wigner import wigner_diagonal

np.set_printoptions(precision=6, suppress=True)
model = ModelSpec("GeneralizedOscillator")
x = (1.3, -0.4, 0.8)

# %% The Wigner function of level n is a Laguerre polynomial times a Gaussian.
# It is normalized and can be negative.
q, p, w = phase_space_grid(QuadratureSpec(24), phase_frame(model, x))
for n in range(4):
    W = wigner_diagonal((n,), q, p, model, x)
    print(f"n={n}: integral {weighted_sum(w, W):.12f}, min W {W.min():+.4f}, max W {W.max():+.4f}")

# %% Geometry from phase-space quadrature vs closed forms.
for n in range(3):
    quad = qgt_abelian(model, x, (n,), method="quadrature")
    print(f"\nn={n}")
    print("metric g (quadrature):\n", quad.g)
    print("max |g - closed|:", np.max(np.abs(quad.g - gho_metric_closed(x, n))))
    print("max |F - closed|:", np.max(np.abs(quad.F - gho_curvature_closed(x, n))))
    print("A:", quad.A, " closed:", gho_connection_closed(x, n))

# %% The metric diverges at the edge of the domain, where XZ - Y^2 -> 0.
for Y in (0.0, 0.5, 0.9, 0.99):
    g = gho_metric_closed((1.0, Y, 1.0), 0)
    print(f"Y={Y:4.2f}: g_YY={g[1, 1]:10.4f}")
