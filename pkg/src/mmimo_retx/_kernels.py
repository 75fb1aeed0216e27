"""Compiled inner loops for encoding and the probability-domain BCJR passes.

Conventions shared by every kernel:

* ``next_state[m, b]`` and ``sym_index[m, b]`` describe the transition taken
  from state ``m`` on input bit ``b`` (bit 0 is the +1 symbol).
* ``prev_state[n, j]`` / ``prev_bit[n, j]`` (``j`` in {0, 1}) list the two
  transitions converging on state ``n``.
* ``gam[i, q]`` is the branch metric at time ``i`` for QPSK candidate ``q``.
* ``priors[i, b]`` is the prior of data bit ``b`` at time ``i``.

Kernels return a status integer instead of raising: ``-1`` on success,
otherwise the time index at which normalization hit a zero sum.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def rsc_parity(bits, next_state, parity):
    out = np.empty(bits.shape[0], dtype=np.uint8)
    s = 0
    for i in range(bits.shape[0]):
        b = bits[i]
        out[i] = parity[s, b]
        s = next_state[s, b]
    return out


@njit(cache=True)
def forward(gam, sym_index, prev_state, prev_bit, priors, alpha):
    n_time = gam.shape[0]
    n_states = alpha.shape[1]
    for n in range(n_states):
        alpha[0, n] = 1.0 / n_states
    for i in range(n_time):
        total = 0.0
        for n in range(n_states):
            acc = 0.0
            for j in range(2):
                m = prev_state[n, j]
                b = prev_bit[n, j]
                acc += alpha[i, m] * gam[i, sym_index[m, b]] * priors[i, b]
            alpha[i + 1, n] = acc
            total += acc
        if not total > 0.0:
            return i + 1
        for n in range(n_states):
            alpha[i + 1, n] /= total
    return -1


@njit(cache=True)
def backward(gam, sym_index, next_state, priors, beta):
    n_time = gam.shape[0]
    n_states = beta.shape[1]
    for n in range(n_states):
        beta[n_time, n] = 1.0 / n_states
    for i in range(n_time - 1, -1, -1):
        total = 0.0
        for n in range(n_states):
            acc = 0.0
            for b in range(2):
                m = next_state[n, b]
                acc += beta[i + 1, m] * gam[i, sym_index[n, b]] * priors[i, b]
            beta[i, n] = acc
            total += acc
        if not total > 0.0:
            return i
        for n in range(n_states):
            beta[i, n] /= total
    return -1


@njit(cache=True)
def extrinsic(gam, sym_index, next_state, alpha, beta, g_raw, g_norm):
    n_time = gam.shape[0]
    n_states = alpha.shape[1]
    for i in range(n_time):
        gp = 0.0
        gm = 0.0
        for n in range(n_states):
            a = alpha[i, n]
            mp = next_state[n, 0]
            mm = next_state[n, 1]
            gp += a * gam[i, sym_index[n, 0]] * beta[i + 1, mp]
            gm += a * gam[i, sym_index[n, 1]] * beta[i + 1, mm]
        g_raw[i, 0] = gp
        g_raw[i, 1] = gm
        total = gp + gm
        if not total > 0.0:
            return i
        g_norm[i, 0] = gp / total
        g_norm[i, 1] = gm / total
    return -1
