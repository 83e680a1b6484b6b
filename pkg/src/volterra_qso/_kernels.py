"""Compiled inner loops for Volterra trajectories.

States are carried as log-coordinates ``l_k = log x_k`` (``-inf`` off the
support).  The multiplier ``1 + (Ax)_k`` is evaluated as ``sum_i b_ki x_i``
with ``b = 1 + A >= 0``, which has no cancellation, and falls back to a
log-sum-exp when every contributing term has underflowed.  Orbits of
non-regular operators sink far below the smallest double (coordinates of
``exp(-1e5)`` are routine), so plain coordinates cannot follow them.
"""

import math

import numpy as np
from numba import njit

# below this the linear-space multiplier is recomputed in log space
_LINEAR_FLOOR = 1e-250


@njit(cache=True)
def log_step(b, logb, l, out):
    m = l.shape[0]
    for k in range(m):
        if l[k] == -np.inf:
            out[k] = -np.inf
            continue
        f = 0.0
        for i in range(m):
            if l[i] != -np.inf:
                f += b[k, i] * math.exp(l[i])
        if f > _LINEAR_FLOOR:
            out[k] = l[k] + math.log(f)
        else:
            top = -np.inf
            for i in range(m):
                v = logb[k, i] + l[i]
                if v > top:
                    top = v
            s = 0.0
            for i in range(m):
                v = logb[k, i] + l[i]
                if v != -np.inf:
                    s += math.exp(v - top)
            out[k] = l[k] + top + math.log(s)
    top = -np.inf
    for k in range(m):
        if out[k] > top:
            top = out[k]
    s = 0.0
    for k in range(m):
        if out[k] != -np.inf:
            s += math.exp(out[k] - top)
    shift = top + math.log(s)
    for k in range(m):
        out[k] -= shift


@njit(cache=True)
def _exp_into(l, x):
    for k in range(l.shape[0]):
        x[k] = math.exp(l[k])


@njit(cache=True)
def _dist(x, y):
    s = 0.0
    for k in range(x.shape[0]):
        d = x[k] - y[k]
        s += d * d
    return math.sqrt(s)


@njit(cache=True)
def orbit(b, logb, l0, n_steps):
    """All log-states ``l^(0) .. l^(n_steps)``."""
    m = l0.shape[0]
    out = np.empty((n_steps + 1, m))
    out[0] = l0
    for n in range(n_steps):
        log_step(b, logb, out[n], out[n + 1])
    return out


@njit(cache=True)
def step_norms(b, logb, l0, n_steps):
    """Successive differences ``|x^(n+1) - x^(n)|`` for n < n_steps."""
    m = l0.shape[0]
    l = l0.copy()
    nxt = np.empty(m)
    x = np.empty(m)
    y = np.empty(m)
    _exp_into(l, x)
    norms = np.empty(n_steps)
    for n in range(n_steps):
        log_step(b, logb, l, nxt)
        _exp_into(nxt, y)
        norms[n] = _dist(x, y)
        l[:] = nxt
        x[:] = y
    return norms, l


@njit(cache=True)
def pair_distances(b, logb, l0, k0, n_steps):
    """``|V^n x - V^n y|`` for n = 0 .. n_steps, both orbits in lockstep."""
    m = l0.shape[0]
    lx = l0.copy()
    ly = k0.copy()
    nx = np.empty(m)
    ny = np.empty(m)
    x = np.empty(m)
    y = np.empty(m)
    out = np.empty(n_steps + 1)
    _exp_into(lx, x)
    _exp_into(ly, y)
    out[0] = _dist(x, y)
    for n in range(n_steps):
        log_step(b, logb, lx, nx)
        log_step(b, logb, ly, ny)
        lx[:] = nx
        ly[:] = ny
        _exp_into(lx, x)
        _exp_into(ly, y)
        out[n + 1] = _dist(x, y)
    return out


@njit(cache=True)
def iterate(b, logb, l0, max_steps, eps, window, escape_tol, stride):
    """Run until convergence or budget.

    Returns ``(n_last, run_start, converged, residual, lowest, norms,
    sample_n, sample_l)``; ``lowest`` is the smallest finite log-coordinate
    visited.  ``n_last`` is the index of the final state,
    ``norms[:n_last]`` the successive differences before it, and the
    samples hold every ``stride``-th log-state plus the final one.

    A candidate ``x^(n)`` is accepted once the ``window`` steps before it
    were all below ``eps``, ``|V x^(n) - x^(n)| < 10 eps`` and no support
    coordinate grows by more than ``escape_tol`` in log terms under the next
    application.  The last test rejects saddles: an orbit parked next to a
    vertex whose stray coordinates are still growing is in transit.
    """
    m = l0.shape[0]
    l = l0.copy()
    nxt = np.empty(m)
    x = np.empty(m)
    y = np.empty(m)
    _exp_into(l, x)
    norms = np.empty(max_steps + 1)
    n_samples = max_steps // stride + 2
    sample_n = np.empty(n_samples, dtype=np.int64)
    sample_l = np.empty((n_samples, m))
    sample_n[0] = 0
    sample_l[0] = l
    count = 1
    run = 0
    converged = False
    residual = np.inf
    lowest = 0.0
    for k in range(m):
        if l[k] != -np.inf and l[k] < lowest:
            lowest = l[k]
    n = 0
    while True:
        log_step(b, logb, l, nxt)
        for k in range(m):
            if nxt[k] != -np.inf and nxt[k] < lowest:
                lowest = nxt[k]
        _exp_into(nxt, y)
        step = _dist(x, y)
        # state n is exactly stationary: the machine orbit is constant
        stationary = True
        for k in range(m):
            if nxt[k] != l[k]:
                stationary = False
                break
        if stationary:
            converged = True
            residual = step
            break
        if run >= window and step < 10.0 * eps:
            grows = False
            for k in range(m):
                if l[k] != -np.inf and nxt[k] - l[k] > escape_tol:
                    grows = True
                    break
            if not grows:
                converged = True
                residual = step
                break
        if n == max_steps:
            residual = step
            break
        norms[n] = step
        if step < eps:
            run += 1
        else:
            run = 0
        l[:] = nxt
        x[:] = y
        n += 1
        if n % stride == 0 and n < max_steps:
            sample_n[count] = n
            sample_l[count] = l
            count += 1
    if sample_n[count - 1] != n:
        sample_n[count] = n
        sample_l[count] = l
        count += 1
    return n, n - run, converged, residual, lowest, norms[:n], sample_n[:count], sample_l[:count]


@njit(cache=True)
def running_means(states, order):
    """Streaming Cesaro means of orders 1..order after each absorbed state.

    ``out[t, j]`` is the order-(j+1) mean after absorbing ``states[:t+1]``.
    """
    n, m = states.shape
    out = np.empty((n, order, m))
    means = np.zeros((order, m))
    for t in range(n):
        w = 1.0 / (t + 1)
        for k in range(m):
            prev = states[t, k]
            for j in range(order):
                means[j, k] += (prev - means[j, k]) * w
                prev = means[j, k]
        out[t] = means
    return out
