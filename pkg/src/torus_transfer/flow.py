"""Explicit Euler integration of the control-affine ODE on the circle.

The state recursion ``x_k = x_{k-1} + h G(x_{k-1}, u_k)`` is carried together
with the log-Jacobian ``l_k = l_{k-1} + log(1 + h dG/dx(x_{k-1}, u_k))``,
which is the exact derivative of the discrete map.
"""

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .torus import TWO_PI, combined_field, wrap

STEP_GUARD = 1e-9


class StepGuardViolation(RuntimeError):
    """An Euler step folds the circle (``1 + h dG/dx <= 1e-9``)."""

    def __init__(self, step, particle=None, factor=None):
        self.step = step
        self.particle = particle
        self.factor = factor
        where = f"step {step}" if particle is None else f"particle {particle}, step {step}"
        super().__init__(f"Euler step is not injective at {where} (1 + h*dG/dx = {factor!r})")


@dataclass(frozen=True)
class ControlSchedule:
    """Piecewise-constant control: ``values[k]`` acts on ``[k h, (k + 1) h]``.

    The step defaults to ``1 / K`` so that the horizon is [0, 1]. An explicit
    step is only needed when chaining schedules (see :meth:`concatenate`).
    """

    values: np.ndarray
    step: float = None

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 1:
            raise ValueError(f"control values must have shape (K, 3), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("control values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        step = 1.0 / v.shape[0] if self.step is None else float(self.step)
        if not step > 0:
            raise ValueError("interval width must be positive")
        object.__setattr__(self, "step", step)

    @classmethod
    def zeros(cls, K=64):
        return cls(np.zeros((K, 3)))

    @classmethod
    def constant(cls, w, K=64):
        return cls(np.tile(np.asarray(w, dtype=np.float64), (K, 1)))

    @property
    def K(self):
        return self.values.shape[0]

    @property
    def h(self):
        return self.step

    @property
    def horizon(self):
        return self.K * self.step

    @property
    def nodes(self):
        return np.arange(self.K + 1) * self.step

    def l2_norm_sq(self):
        return self.h * float(np.sum(self.values**2))

    def concatenate(self, other):
        if abs(self.h - other.h) > 1e-15:
            raise ValueError("can only concatenate schedules with equal interval width")
        return ControlSchedule(np.concatenate([self.values, other.values]), self.h)


@dataclass(frozen=True)
class ParticleTrajectory:
    states: np.ndarray
    log_jacobians: np.ndarray

    @property
    def endpoint(self):
        return float(self.states[-1]), float(self.log_jacobians[-1])


@dataclass(frozen=True)
class EnsembleTrajectory:
    """Trajectories of many particles; arrays have shape ``(K + 1, N)``."""

    states: np.ndarray
    log_jacobians: np.ndarray

    def __len__(self):
        return self.states.shape[1]

    def __getitem__(self, j):
        return ParticleTrajectory(self.states[:, j], self.log_jacobians[:, j])

    def __iter__(self):
        for j in range(len(self)):
            yield self[j]

    @property
    def endpoints(self):
        return self.states[-1], self.log_jacobians[-1]


@dataclass(frozen=True)
class EnsembleLattice:
    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f"lattice size must be a positive integer, got {self.size!r}")

    @property
    def points(self):
        return TWO_PI * np.arange(self.size) / self.size

    @property
    def weight(self):
        """Quadrature weight of each point (total mass 2*pi)."""
        return TWO_PI / self.size


def _sweep_arrays(values, x0, h, offset=0, start_ell=None):
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    status, states, ells, factors = _kernels.sweep(values, h, x0, STEP_GUARD, start_ell)
    if status >= 0:
        k, j = divmod(int(status), x0.size)
        raise StepGuardViolation(k + 1, j + offset, float(factors[k, j]))
    return states, ells, factors


def euler_sweep(u, x0):
    """Integrate a single particle; returns its :class:`ParticleTrajectory`."""
    x0 = wrap(float(x0))
    try:
        states, ells, _ = _sweep_arrays(u.values, [x0], u.h)
    except StepGuardViolation as exc:
        raise StepGuardViolation(exc.step, None, exc.factor) from None
    return ParticleTrajectory(states[:, 0], ells[:, 0])


def _default_workers():
    env = os.environ.get("TORUS_TRANSFER_THREADS")
    return max(1, int(env)) if env else 1


def ensemble_sweep(u, lattice, workers=None):
    """Integrate every lattice point under the shared control ``u``.

    ``lattice`` may be an :class:`EnsembleLattice` or an array of initial
    points. With ``workers > 1`` the particles are split into contiguous
    chunks; the result does not depend on the split.
    """
    x0 = lattice.points if isinstance(lattice, EnsembleLattice) else wrap(np.asarray(lattice))
    x0 = np.atleast_1d(x0)
    workers = _default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or x0.size < 2 * workers:
        states, ells, _ = _sweep_arrays(u.values, x0, u.h)
        return EnsembleTrajectory(states, ells)
    bounds = np.linspace(0, x0.size, workers + 1).astype(int)
    chunks = [(bounds[c], bounds[c + 1]) for c in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda b: _sweep_arrays(u.values, x0[b[0]:b[1]], u.h, offset=b[0]), chunks))
    return EnsembleTrajectory(
        np.concatenate([p[0] for p in parts], axis=1),
        np.concatenate([p[1] for p in parts], axis=1),
    )


def compose_sweeps(u, v, x0):
    """Run ``u`` then ``v`` from ``x0``, chaining both state and log-Jacobian."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    s1, l1, _ = _sweep_arrays(u.values, x0, u.h)
    s2, l2, _ = _sweep_arrays(v.values, s1[-1], v.h, start_ell=l1[-1])
    return EnsembleTrajectory(np.concatenate([s1, s2[1:]]), np.concatenate([l1, l2[1:]]))


def reference_flow(u, x0, substeps=64):
    """High-accuracy flow of the piecewise-constant field by classical RK4.

    The log-Jacobian follows the variational equation ``dl/dt = dG/dx(x(t))``.
    Accepts scalar or array ``x0``; returns ``(x, ell)`` of matching shape.
    """
    if int(substeps) != substeps or substeps < 1:
        raise ValueError("substeps must be a positive integer")
    x = np.asarray(x0, dtype=np.float64).copy()
    ell = np.zeros_like(x)
    dt = u.h / substeps

    for w in u.values:
        def rhs(y):
            return combined_field(y, w)

        for _ in range(int(substeps)):
            v1, d1 = rhs(x)
            v2, d2 = rhs(x + 0.5 * dt * v1)
            v3, d3 = rhs(x + 0.5 * dt * v2)
            v4, d4 = rhs(x + dt * v3)
            x = x + dt / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4)
            ell = ell + dt / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
    x = wrap(x)
    if np.ndim(x) == 0:
        return float(x), float(ell)
    return x, ell


def write_trajectory_csv(path, u, trajectory):
    """Dump an ensemble as rows ``particle_index, k, t_k, x_k, ell_k``."""
    t = u.nodes
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["particle_index", "k", "t_k", "x_k", "ell_k"])
        for j in range(len(trajectory)):
            for k in range(u.K + 1):
                writer.writerow([j, k, repr(float(t[k])),
                                 repr(float(trajectory.states[k, j])),
                                 repr(float(trajectory.log_jacobians[k, j]))])
