"""Compiled inner loops for the Euler sweep and its reverse (adjoint) pass.

Both loops run particle by particle; reductions over particles are left to
numpy so that summation order is fixed.
"""

import math

import numba
import numpy as np

TWO_PI = 2.0 * math.pi


@numba.njit(cache=True, nogil=True)
def _wrap(a):
    r = a % TWO_PI
    if r >= TWO_PI:
        r = 0.0
    return r


@numba.njit(cache=True, nogil=True)
def euler_forward(values, h, x0, ell0, guard, states, ells, factors):
    """Fill ``states``/``ells`` (K+1, N) and ``factors`` (K, N).

    Returns ``-1`` on success, otherwise ``k * N + j`` for the first
    (step k, particle j) that violates the step guard.
    """
    K = values.shape[0]
    N = x0.shape[0]
    for j in range(N):
        x = x0[j]
        ell = ell0[j]
        states[0, j] = x
        ells[0, j] = ell
        for k in range(K):
            w0 = values[k, 0]
            w1 = values[k, 1]
            w2 = values[k, 2]
            s1 = math.sin(x)
            c1 = math.cos(x)
            s2 = 2.0 * s1 * c1
            c2 = c1 * c1 - s1 * s1
            inc = h * (w1 * c1 + 2.0 * w2 * c2)
            d = 1.0 + inc
            if d <= guard:
                factors[k, j] = d
                return k * N + j
            factors[k, j] = d
            x = _wrap(x + h * (w0 + w1 * s1 + w2 * s2))
            ell += math.log1p(inc)
            states[k + 1, j] = x
            ells[k + 1, j] = ell
    return -1


@numba.njit(cache=True, nogil=True)
def adjoint_reverse(values, h, states, factors, lam_end, mu, per_particle):
    """Accumulate ``per_particle[k, i, j]``, the contribution of particle j to dJ/du_{k,i}."""
    K = values.shape[0]
    N = states.shape[1]
    for j in range(N):
        lam = lam_end[j]
        m = mu[j]
        for k in range(K, 0, -1):
            x = states[k - 1, j]
            d = factors[k - 1, j]
            s1 = math.sin(x)
            c1 = math.cos(x)
            s2 = 2.0 * s1 * c1
            c2 = c1 * c1 - s1 * s1
            md = m / d
            per_particle[k - 1, 0, j] = h * lam
            per_particle[k - 1, 1, j] = h * (lam * s1 + md * c1)
            per_particle[k - 1, 2, j] = h * (lam * s2 + md * 2.0 * c2)
            d2G = -values[k - 1, 1] * s1 - 4.0 * values[k - 1, 2] * s2
            lam = lam * d + h * md * d2G
    return per_particle


def sweep(values, h, x0, guard, ell0=None):
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    ell0 = np.zeros_like(x0) if ell0 is None else np.ascontiguousarray(ell0, dtype=np.float64)
    K = values.shape[0]
    N = x0.shape[0]
    states = np.empty((K + 1, N))
    ells = np.empty((K + 1, N))
    factors = np.empty((K, N))
    status = euler_forward(np.ascontiguousarray(values), float(h), x0, ell0, float(guard), states, ells, factors)
    return status, states, ells, factors


def reverse(values, h, states, factors, lam_end, mu):
    K = values.shape[0]
    N = states.shape[1]
    per_particle = np.empty((K, 3, N))
    adjoint_reverse(np.ascontiguousarray(values), float(h), states, factors,
                    np.ascontiguousarray(lam_end, dtype=np.float64),
                    np.ascontiguousarray(mu, dtype=np.float64), per_particle)
    # pairwise summation along the contiguous particle axis
    return per_particle.sum(axis=2)


@numba.njit(cache=True, nogil=True)
def rk4_control_flow(w, y, t, substeps, x_out, ell_out):
    """RK4 for ``x' = G(x, w)``, ``l' = dG/dx(x, w)`` from each ``y[p]`` over ``[0, t]``."""
    dt = t / substeps
    w0, w1, w2 = w[0], w[1], w[2]
    for p in range(y.shape[0]):
        x = y[p]
        ell = 0.0
        for _ in range(substeps):
            kx = 0.0
            kl = 0.0
            xs = x
            for stage in range(4):
                s1 = math.sin(xs)
                c1 = math.cos(xs)
                v = w0 + w1 * s1 + 2.0 * w2 * s1 * c1
                d = w1 * c1 + 2.0 * w2 * (c1 * c1 - s1 * s1)
                weight = 1.0 if stage == 0 or stage == 3 else 2.0
                kx += weight * v
                kl += weight * d
                if stage < 2:
                    xs = x + 0.5 * dt * v
                elif stage == 2:
                    xs = x + dt * v
            x += dt / 6.0 * kx
            ell += dt / 6.0 * kl
        x_out[p] = x
        ell_out[p] = ell
