"""
Transferring the ground state to |cos x|
========================================

Gradient-based optimal control of the control field coefficients. The
default budget is 15000 iterations; a shorter run is used here.
"""

import numpy as np

from torus_transfer import OptimizerConfig, descend
from torus_transfer.objective import pushforward_values
from torus_transfer.flow import EnsembleLattice
from torus_transfer.states import ABS_COS, GROUND

config = OptimizerConfig(target="abs-cos", iterations=3000, log_every=500)
result = descend(config)

for row in result.history.rows:
    print(f"iter {row.iteration:5d}  J = {row.total:.5f}")
print("final L2 mismatch", round(result.report.mismatch, 4))

# achieved state against the target on a coarse subset of the lattice
lattice = EnsembleLattice(config.lattice_size)
achieved, _ = pushforward_values(result.control, GROUND, lattice)
for j in range(0, lattice.size, 60):
    x = lattice.points[j]
    print(f"x={x:5.2f}  target {ABS_COS(x):.3f}  achieved {achieved[j].real:.3f}")

# the control is piecewise constant, one row per interval
print(np.round(result.control.values[::8], 3))
