"""
Regularization and lattice sweeps
=================================

Smaller alpha lets the optimizer trade control energy for a better
transfer; finer ensembles give controls that generalize to a denser
reference lattice. Short runs keep this quick.
"""

from torus_transfer import OptimizerConfig
from torus_transfer.optimizer import sweep_alpha, sweep_lattice

base = OptimizerConfig(iterations=1500)

for row in sweep_alpha(base, [1e-1, 1e-3, 1e-7]):
    print(f"alpha={row['alpha']:.0e}  transfer term {row['transfer_term']:.5f}")

for row in sweep_lattice(base, [40, 80, 160]):
    print(f"N={row['lattice_size']:4d}  own lattice {row['transfer_term']:.5f}  "
          f"on {row['reference_size']} points {row['reference_transfer_term']:.5f}")
