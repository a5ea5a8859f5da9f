"""
Product formula for a transport generator
=========================================

Phase multipliers wrapped around short free propagations approximate the
combined generator i tau Laplacian + transport along phi'. The error against
a fine splitting reference decays like 1/n.
"""

import numpy as np

from torus_transfer import verifier as qv
from torus_transfer.suites import band_limited_state, loglog_slope

psi = band_limited_state(256)
phi = qv.SmoothField(np.cos, lambda x: -np.sin(x), "cos")
grad_phi = qv.sin_field(-1.0)
tau = 0.1

reference = qv.combined_generator_reference(psi, grad_phi, tau)
ns = [64, 128, 256, 512]
errors = [qv.trotter_product(psi, phi, tau, n).distance(reference) for n in ns]
for n, e in zip(ns, errors):
    print(f"n={n:4d}  error {e:.3e}")
print("log-log slope", round(loglog_slope(ns, errors), 3))

# every factor is unitary
print("norm after 250 blocks", qv.trotter_product(psi, phi, tau, 250).norm())
