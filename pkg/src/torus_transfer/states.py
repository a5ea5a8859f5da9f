"""Wavefunctions on the circle used as initial and target states."""

import csv
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .torus import TWO_PI

NORM_GRID = 8192


class TrigInterpolant:
    """Band-limited interpolant of samples taken at ``2*pi*q/Q``.

    For even ``Q`` the Nyquist coefficient is split evenly between the
    frequencies ``+Q/2`` and ``-Q/2`` so that real samples give a real
    interpolant.
    """

    def __init__(self, samples):
        samples = np.asarray(samples, dtype=np.complex128)
        Q = samples.size
        coeffs = np.fft.fft(samples) / Q
        modes = np.fft.fftfreq(Q, d=1.0 / Q)
        if Q % 2 == 0:
            nyq = Q // 2
            coeffs = np.append(coeffs, 0.5 * coeffs[nyq])
            coeffs[nyq] *= 0.5
            modes = np.append(modes, float(nyq))
            modes[nyq] = -float(nyq)
        self.size = Q
        self.coeffs = coeffs
        self.modes = modes

    def _eval(self, x, weights, chunk=2048):
        x = np.asarray(x, dtype=np.float64)
        flat = x.ravel()
        out = np.empty(flat.shape, dtype=np.complex128)
        for start in range(0, flat.size, chunk):
            xs = flat[start:start + chunk]
            out[start:start + chunk] = np.exp(1j * np.outer(xs, self.modes)) @ weights
        return out.reshape(x.shape)

    def __call__(self, x):
        return self._eval(x, self.coeffs)

    def derivative(self, x):
        return self._eval(x, 1j * self.modes * self.coeffs)


@dataclass(frozen=True)
class StateFunction:
    """A unit-norm state ``psi`` with optional x-derivative.

    ``is_nonnegative_real`` lets the transfer error skip the global-phase
    minimization (the optimal phase is then 0).
    """

    evaluator: Callable
    name: str
    is_nonnegative_real: bool = False
    derivative: Optional[Callable] = None

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=np.float64))

    def dx(self, x):
        if self.derivative is None:
            raise ValueError(f"state {self.name!r} does not provide a derivative")
        return self.derivative(np.asarray(x, dtype=np.float64))


def l2_norm(state, Q=NORM_GRID):
    y = TWO_PI * np.arange(Q) / Q
    return float(np.sqrt(TWO_PI / Q * np.sum(np.abs(state(y)) ** 2)))


def check_normalized(state, tol=1e-6, Q=NORM_GRID):
    norm = l2_norm(state, Q)
    if abs(norm**2 - 1.0) > tol:
        raise ValueError(f"state {state.name!r} has squared norm {norm**2:.8g}, expected 1")
    return state


_GROUND = 1.0 / np.sqrt(TWO_PI)


def _ground(x):
    return np.full(np.shape(x), _GROUND)


def _ground_dx(x):
    return np.zeros(np.shape(x))


def _abs_cos(x):
    return np.abs(np.cos(x)) / np.sqrt(np.pi)


def _abs_cos_dx(x):
    # one-sided value at the kinks is irrelevant for gradients almost everywhere
    return -np.sign(np.cos(x)) * np.sin(x) / np.sqrt(np.pi)


def _cos3(x):
    return np.sqrt(1.0 + 0.8 * np.cos(3.0 * x)) / np.sqrt(TWO_PI)


def _cos3_dx(x):
    return -1.2 * np.sin(3.0 * x) / np.sqrt(1.0 + 0.8 * np.cos(3.0 * x)) / np.sqrt(TWO_PI)


GROUND = StateFunction(_ground, "ground", True, _ground_dx)
ABS_COS = StateFunction(_abs_cos, "abs-cos", True, _abs_cos_dx)
COS3 = StateFunction(_cos3, "cos3", True, _cos3_dx)

# sentinel target: the objective drops its transfer term entirely
REG_ONLY = StateFunction(_ground, "reg-only", True, _ground_dx)

TARGETS = {s.name: s for s in (GROUND, ABS_COS, COS3)}


def from_samples(samples, name="custom"):
    """Build a state from uniform samples via trigonometric interpolation."""
    samples = np.asarray(samples, dtype=np.complex128)
    interp = TrigInterpolant(samples)
    real = bool(np.all(samples.imag == 0.0) and np.all(samples.real >= 0.0))
    if real:
        def evaluator(x):
            return interp(x).real

        def derivative(x):
            return interp.derivative(x).real
    else:
        evaluator, derivative = interp, interp.derivative
    return StateFunction(evaluator, name, real, derivative)


def load_custom(path, tol=1e-3):
    """Load a target from a CSV of ``x, re_psi, im_psi`` rows on a uniform grid.

    The samples must have unit discrete L2 norm within ``tol``; they are then
    renormalized exactly.
    """
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in row[:3]])
            except ValueError:
                if rows:
                    raise
                continue  # header
    data = np.asarray(rows, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != 3 or data.shape[0] < 4:
        raise ValueError(f"{path}: expected at least 4 rows of x, re_psi, im_psi")
    Q = data.shape[0]
    grid = TWO_PI * np.arange(Q) / Q
    if np.max(np.abs(data[:, 0] - grid)) > 1e-6:
        raise ValueError(f"{path}: x column is not the uniform grid 2*pi*q/{Q}")
    samples = data[:, 1] + 1j * data[:, 2]
    norm_sq = TWO_PI / Q * float(np.sum(np.abs(samples) ** 2))
    if abs(norm_sq - 1.0) > tol:
        raise ValueError(f"{path}: squared L2 norm {norm_sq:.6g} is not within {tol} of 1")
    samples = samples / np.sqrt(norm_sq)
    return from_samples(samples, "custom")


def get_target(name, path=None):
    if name == "custom":
        if path is None:
            raise ValueError("target 'custom' needs a sample file")
        return load_custom(path)
    if name == "reg-only":
        return REG_ONLY
    try:
        return TARGETS[name]
    except KeyError:
        raise ValueError(f"unknown target {name!r}; choose from {sorted(TARGETS) + ['custom']}") from None
