"""
Adjoint gradient versus finite differences
==========================================

One forward sweep and one reverse sweep give the full K x 3 gradient. It
is compared entry by entry with central differences.
"""

import numpy as np

from torus_transfer import ABS_COS, GROUND, ControlSchedule, EnsembleLattice, gradient
from torus_transfer.adjoint import finite_difference_gradient

rng = np.random.default_rng(0)
u = ControlSchedule(rng.uniform(-1, 1, (64, 3)))
lattice = EnsembleLattice(628)

grad, report = gradient(u, 1e-7, GROUND, ABS_COS, lattice)
fd = finite_difference_gradient(u, 1e-7, GROUND, ABS_COS, lattice, delta=1e-4)

print("J =", report.total)
print("largest gradient entry", np.max(np.abs(grad)))
rel = np.abs(grad - fd) / np.maximum(np.abs(grad), 1e-12)
print("max relative error", rel.max())

# first few intervals side by side
for k in range(4):
    print(k, np.round(grad[k], 8), np.round(fd[k], 8))
