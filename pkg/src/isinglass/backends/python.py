"""Pure-numpy kernels; the fallback when the compiled extension is unavailable.

The MCMC sweep is written so that every floating-point operation that decides
a spin update happens in the same order and with the same rounding as in the
compiled backend: local fields are maintained incrementally with elementwise
updates (no reductions in the hot path), and per-site nonlinearities go
through libm (``math.tanh`` / ``math.exp``).  Given the same generator state
the two backends therefore produce bit-identical datasets.
"""

from __future__ import annotations

import math

import numpy as np

NAME = "python"


def run_chain(k_sym, spins, theta, burn_in, n_samples, thinning, metropolis, rng, out):
    """Advance a single-site chain in place and record ``n_samples`` rows into ``out``.

    One sweep updates sites ``0..N-1`` in order, drawing exactly one uniform
    per site.  ``spins`` (int8) and ``theta`` (float64) are the chain state and
    must satisfy ``theta = k_sym @ spins + h`` on entry; both are mutated.
    """
    n = spins.shape[0]
    for _ in range(burn_in):
        _sweep(k_sym, spins, theta, metropolis, rng.random(n))
    for s_idx in range(n_samples):
        for _ in range(thinning):
            _sweep(k_sym, spins, theta, metropolis, rng.random(n))
        out[s_idx, :] = spins


def _sweep(k_sym, spins, theta, metropolis, u):
    n = spins.shape[0]
    for i in range(n):
        old = int(spins[i])
        if metropolis:
            d_e = (2.0 * old) * float(theta[i])
            flip_it = d_e <= 0.0 or u[i] < math.exp(-d_e)
        else:
            p_up = 0.5 * (1.0 + math.tanh(float(theta[i])))
            new = 1 if u[i] < p_up else -1
            flip_it = new != old
        if flip_it:
            spins[i] = -old
            theta -= (2.0 * old) * k_sym[i]


def pl_value(k_sym, h, x):
    """Mean negative log pseudo-likelihood of ``x`` (rows) under ``(k_sym, h)``."""
    theta = x @ k_sym + h
    return float((np.logaddexp(theta, -theta) - x * theta).sum()) / x.shape[0]


def pl_value_grad(k_sym, h, x):
    """Pseudo-likelihood value plus gradients over (flat couplings, biases)."""
    d, n = x.shape
    theta = x @ k_sym + h
    t = np.tanh(theta)
    value = float((np.logaddexp(theta, -theta) - x * theta).sum()) / d
    grad_h = (t - x).sum(axis=0) / d
    m = t.T @ x
    g_dense = m + m.T - 2.0 * (x.T @ x)
    iu, ju = np.triu_indices(n, k=1)
    return value, g_dense[iu, ju] / d, grad_h


def _mpf_weights(k_sym, h, x, skip, clip):
    theta = x @ k_sym + h
    arg = -x * theta
    over = np.abs(arg) > clip
    if skip is not None:
        over = over & (skip == 0)
    n_clamped = int(np.count_nonzero(over))
    w = np.exp(np.clip(arg, -clip, clip))
    if skip is not None:
        w = np.where(skip != 0, 0.0, w)
    return w, n_clamped


def mpf_value(k_sym, h, x, skip, clip):
    """Mean one-flip probability-flow cost; returns ``(value, n_clamped)``."""
    w, n_clamped = _mpf_weights(k_sym, h, x, skip, clip)
    return float(w.sum()) / x.shape[0], n_clamped


def mpf_value_grad(k_sym, h, x, skip, clip):
    """Flow cost plus gradients; returns ``(value, grad_k, grad_h, n_clamped)``."""
    d, n = x.shape
    w, n_clamped = _mpf_weights(k_sym, h, x, skip, clip)
    value = float(w.sum()) / d
    grad_h = -(x * w).sum(axis=0) / d
    a = x.T @ (x * w)
    iu, ju = np.triu_indices(n, k=1)
    grad_k = -(a + a.T)[iu, ju] / d
    return value, grad_k, grad_h, n_clamped
