"""
Two linearly coupled oscillators
================================

H = (p1^2 + p2^2)/2 + (A q1^2 + B q2^2 + C q1 q2)/2. The normal-mode rotation
depends on (A, B, C), so the metric picks up mixing terms, while the Berry
connection vanishes for every product state. The classical analog metric,
an angle average over tori, reproduces the quantum one after Bohr-Sommerfeld
substitution.
"""

import numpy as np

from wigner_geometry import ModelSpec, qgt_abelian
from wigner_geometry.classical import (
    bohr_sommerfeld,
    classical_metric,
    classical_metric_montecarlo,
    semiclassical_quantum_metric,
)
from wigner_geometry.geometry import lco_metric_closed, lco_metric_determinant
from wigner_geometry.models import normal_modes

np.set_printoptions(precision=6, suppress=True)
model = ModelSpec("LinearlyCoupled2")
x = (1.0, 1.5, 0.4)
modes = normal_modes(model, x)
print("frequencies:", modes.frequencies)
print("rotation U:\n", modes.U)

# %% Quantum metric for a few states, quadrature vs closed form.
for labels in [(0, 0), (1, 0), (2, 1)]:
    res = qgt_abelian(model, x, labels, method="quadrature")
    print(f"\nstate {labels}")
    print("g:\n", res.g)
    print("max |g - closed|:", np.max(np.abs(res.g - lco_metric_closed(x, labels))))
    print("det g:", np.linalg.det(res.g), " closed:", lco_metric_determinant(x, labels))
    print("|A| max:", np.max(np.abs(res.A)))

# %% Classical analog: tensor trapezoid over the angles is exact for the
# trigonometric-polynomial integrands, Monte Carlo converges like 1/sqrt(S).
I = (1.0, 1.0)
exact = classical_metric(modes, I)
print("\nclassical metric:\n", exact)
for S in (4, 6, 64):
    err = np.max(np.abs(classical_metric_montecarlo(modes, I, samples=S) - exact))
    print(f"trapezoid {S:3d}^2 points: error {err:.2e}")
for S in (1000, 16000):
    err = np.max(np.abs(classical_metric_montecarlo(modes, I, samples=S, method="montecarlo", seed=1) - exact))
    print(f"Monte Carlo {S:6d} samples: error {err:.2e}")

# %% Semiclassical relation.
labels = (1, 2)
I, I2 = bohr_sommerfeld(labels)
print("\nBohr-Sommerfeld actions:", I, " squared-action substitutes:", I2)
sampled = classical_metric_montecarlo(modes, I, samples=8, I_squared=I2)
print("prediction from sampled classical metric - closed prediction:",
      np.max(np.abs(semiclassical_quantum_metric(modes, labels, classical=sampled) - semiclassical_quantum_metric(modes, labels))))
predicted = semiclassical_quantum_metric(modes, labels)
quantum = qgt_abelian(model, x, labels).g
print("semiclassical prediction - quantum metric:", np.max(np.abs(predicted - quantum)))
