"""Verification suites. Each returns a list of check records (plain dicts):
``name, refinement, errors, slope, tolerance, passed``."""

import math

import numpy as np

from . import verifier as qv
from .adjoint import finite_difference_check
from .flow import ControlSchedule, EnsembleLattice
from .objective import objective
from .states import ABS_COS, COS3, GROUND, from_samples


def record(name, refinement, errors, passed, tolerance=None, slope=None, **extra):
    rec = {
        "name": name,
        "refinement": [float(r) for r in refinement],
        "errors": [float(e) for e in errors],
        "slope": None if slope is None else float(slope),
        "tolerance": tolerance,
        "passed": bool(passed),
    }
    rec.update(extra)
    return rec


def loglog_slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def non_increasing(values):
    return all(b <= a for a, b in zip(values, values[1:]))


def band_limited_state(P=256):
    """A band-limited complex state (modes |m| <= 3)."""
    def fn(x):
        return 1 + 0.6 * np.cos(x) + 0.3 * np.sin(2 * x) + 0.2 * np.cos(3 * x) + 0.25j * np.sin(x)
    return qv.WaveFunction.from_function(fn, P)


def gradient_suite(n_controls=10, seed=0, delta=1e-4, tol=1e-5, lattice_size=628, alpha=1e-7):
    """Adjoint gradient against central differences, random controls with entries in [-1, 1]."""
    rng = np.random.default_rng(seed)
    controls = [ControlSchedule(rng.uniform(-1.0, 1.0, (64, 3))) for _ in range(n_controls)]
    lattice = EnsembleLattice(lattice_size)
    records = []
    for target in (ABS_COS, COS3):
        errors = [finite_difference_check(u, alpha, GROUND, target, lattice, delta) for u in controls]
        records.append(record(f"gradient/{target.name}", range(n_controls), errors,
                              max(errors) < tol, tol, delta=delta))
    return records


def trotter_suite(P=256, tau=0.1, ns=(64, 128, 256, 512, 1024)):
    psi = band_limited_state(P)
    phi = qv.SmoothField(np.cos, lambda x: -np.sin(x), "cos")
    grad_phi = qv.sin_field(-1.0)
    records = []

    # (a) norm drift over 1000 factor applications (250 four-factor blocks)
    drift_trotter = abs(qv.trotter_product(psi, phi, tau, 250).norm() - 1.0)
    out = psi
    for _ in range(1000):
        out = qv.free_propagator(out, 0.013)
    drift_free = abs(out.norm() - 1.0)
    errs = [drift_trotter, drift_free]
    records.append(record("unitarity", [1000, 1000], errs, max(errs) < 1e-7, 1e-7))

    # (b) exp(-i 2 pi m^2) = 1 for integer modes
    err = qv.free_propagator(psi, 2 * math.pi).distance(psi)
    records.append(record("free_period_2pi", [2 * math.pi], [err], err < 1e-10, 1e-10))

    # (c) product formula against the fine-splitting reference
    ref = qv.combined_generator_reference(psi, grad_phi, tau)
    errors = [qv.trotter_product(psi, phi, tau, n).distance(ref) for n in ns]
    slope = loglog_slope(ns, errors)
    ok = non_increasing(errors) and -1.3 <= slope <= -0.7
    records.append(record("trotter_product_vs_reference", ns, errors, ok, [-1.3, -0.7], slope, tau=tau))

    # small-tau limit towards the pure transport e^{T_{grad phi}}
    limit = qv.characteristics_pushforward(psi, grad_phi, 1.0)
    taus = (0.1, 0.05, 0.025)
    errors = [qv.trotter_product(psi, phi, t, 4096).distance(limit) for t in taus]
    records.append(record("small_tau_limit", taus, errors, non_increasing(errors),
                          slope=loglog_slope(taus, errors), n=4096))
    return records


def commutator_suite(P=256, ts=(0.2, 0.1, 0.05)):
    """The product of cos/sin transports approaches the unit translation e^{T_{d/dx}}."""
    psi = band_limited_state(P)
    f, g = qv.cos_field(), qv.sin_field()
    target = qv.characteristics_pushforward(psi, qv.translation_field(1.0), 1.0)
    ns = [round(64 / t**2) for t in ts]
    errors = [qv.commutator_product(psi, f, g, t, n).distance(target) for t, n in zip(ts, ns)]
    records = [record("commutator_to_translation", ts, errors, non_increasing(errors),
                      slope=loglog_slope(ts, errors), n=ns)]
    err = qv.commutator_product(psi, f, f, 0.1, 100).distance(psi)
    records.append(record("commuting_flows_identity", [0.1], [err], err < 1e-8, 1e-8))
    return records


def transfer_suite(run=None, P=1024, tol=0.02):
    """Exact-flow spectral-grid mismatch; with ``run=(config, control, summary)`` cross-validate it."""
    records = []
    if run is None:
        zero = ControlSchedule.zeros(64)
        err = qv.verify_transfer(zero, GROUND, GROUND, P)
        records.append(record("identity_transfer", [P], [err], err < 1e-12, 1e-12))
        s = 0.9
        psi0 = from_samples(band_limited_state(64).samples, "band-limited")
        shifted = from_samples(psi0(qv.grid(64) + s), "band-limited-shifted")
        err = qv.verify_transfer(ControlSchedule.constant((s, 0.0, 0.0)), psi0, shifted, P)
        records.append(record("rotation_transfer", [P], [err], err < 1e-8, 1e-8))
        return records
    from .states import get_target

    config, control, summary = run
    psi0 = get_target(config.initial)
    psi1 = get_target(config.target, config.target_path)
    lattice_value = math.sqrt(objective(control, config.alpha, psi0, psi1,
                                        EnsembleLattice(config.lattice_size)).transfer_term)
    grid_value = qv.verify_transfer(control, psi0, psi1, P)
    diff = abs(grid_value - lattice_value)
    records.append(record("cross_validation", [P], [diff], diff < tol, tol,
                          lattice_mismatch=lattice_value, grid_mismatch=grid_value,
                          reported_mismatch=summary.get("mismatch")))
    return records


SUITES = {
    "gradient": gradient_suite,
    "trotter": trotter_suite,
    "commutator": commutator_suite,
    "transfer": transfer_suite,
}
