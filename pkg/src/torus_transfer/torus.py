"""Torus arithmetic and the three controlled vector fields on the circle.

The fields are ``g0 = d/dx``, ``g1 = sin(x) d/dx`` and ``g2 = sin(2x) d/dx``.
Every function here accepts scalars or numpy arrays.
"""

import numpy as np

TWO_PI = 2.0 * np.pi
N_FIELDS = 3


def wrap(a):
    """Reduce angles modulo 2*pi into [0, 2*pi)."""
    a = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise ValueError("cannot wrap a non-finite angle")
    r = np.mod(a, TWO_PI)
    # np.mod can round up to exactly 2*pi for tiny negative inputs
    r = np.where(r >= TWO_PI, 0.0, r)
    return r if r.ndim else float(r)


def _check_index(i):
    if i not in (0, 1, 2):
        raise ValueError(f"field index must be 0, 1 or 2, got {i!r}")


def field_value(i, x):
    _check_index(i)
    x = np.asarray(x, dtype=np.float64)
    if i == 0:
        out = np.ones_like(x)
    elif i == 1:
        out = np.sin(x)
    else:
        out = np.sin(2.0 * x)
    return out if out.ndim else float(out)


def field_derivative(i, x):
    _check_index(i)
    x = np.asarray(x, dtype=np.float64)
    if i == 0:
        out = np.zeros_like(x)
    elif i == 1:
        out = np.cos(x)
    else:
        out = 2.0 * np.cos(2.0 * x)
    return out if out.ndim else float(out)


def field_second_derivative(i, x):
    _check_index(i)
    x = np.asarray(x, dtype=np.float64)
    if i == 0:
        out = np.zeros_like(x)
    elif i == 1:
        out = -np.sin(x)
    else:
        out = -4.0 * np.sin(2.0 * x)
    return out if out.ndim else float(out)


def field_basis(x):
    """Return ``(g, dg, d2g)``, each of shape ``(3,) + x.shape``."""
    x = np.asarray(x, dtype=np.float64)
    s1, c1 = np.sin(x), np.cos(x)
    s2, c2 = np.sin(2.0 * x), np.cos(2.0 * x)
    one, zero = np.ones_like(x), np.zeros_like(x)
    g = np.stack([one, s1, s2])
    dg = np.stack([zero, c1, 2.0 * c2])
    d2g = np.stack([zero, -s1, -4.0 * s2])
    return g, dg, d2g


def combined_field(x, w):
    """Evaluate ``G(x, w) = sum_i w_i g_i(x)`` and its x-derivative.

    Parameters
    ----------
    x : float or ndarray
        Points on the circle.
    w : array_like of shape (3,)
        Channel weights.

    Returns
    -------
    value, derivative : float or ndarray
        Same shape as ``x``.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (N_FIELDS,):
        raise ValueError(f"w must have shape (3,), got {w.shape}")
    x = np.asarray(x, dtype=np.float64)
    value = w[0] + w[1] * np.sin(x) + w[2] * np.sin(2.0 * x)
    derivative = w[1] * np.cos(x) + 2.0 * w[2] * np.cos(2.0 * x)
    if value.ndim == 0:
        return float(value), float(derivative)
    return value, derivative


def combined_second_derivative(x, w):
    w = np.asarray(w, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    out = -w[1] * np.sin(x) - 4.0 * w[2] * np.sin(2.0 * x)
    return out if out.ndim else float(out)
