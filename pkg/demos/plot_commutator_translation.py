"""
Generating a translation from two non-commuting transports
==========================================================

Long products of cos x d/dx and sin x d/dx transports approach the unit
rotation, whose generator is their commutator.
"""

from torus_transfer import verifier as qv
from torus_transfer.suites import band_limited_state

psi = band_limited_state(256)
target = qv.characteristics_pushforward(psi, qv.translation_field(1.0), 1.0)

# t = 0.05 continues the trend at four times the cost
for t in (0.2, 0.1):
    n = round(64 / t**2)
    out = qv.commutator_product(psi, qv.cos_field(), qv.sin_field(), t, n)
    print(f"t={t}  n={n}  distance to translation {out.distance(target):.4f}")
