"""Iterative turbo decoding with probability-domain BCJR recursions.

Branch metrics are Gaussian likelihoods of the combined observation
``y = f * S + u`` given the coded QPSK symbol ``S`` of a transition.  Before
exponentiation the exponents at each trellis step are shifted so the largest
of the four QPSK candidates is 0 and then clamped below at -30, which keeps
every metric inside ``[e**-30, 1]``.

Priors, extrinsic values and posteriors are stored as ``(L, 2)`` arrays with
column 0 holding the probability of the +1 symbol (data bit 0) and column 1
that of the -1 symbol (data bit 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .combiner import CombinedObservation
from .errors import DegeneracyError, ParameterError
from .turbo import QPSK_POINTS, Interleaver, Trellis

EXPONENT_FLOOR = -30.0
DEFAULT_ITERATIONS = 8


def branch_exponents(y, f, sigma_u_sq: float) -> np.ndarray:
    """Raw exponents ``-|y - f*S|^2 / (2 sigma_u_sq)`` for the 4 QPSK points."""
    if not sigma_u_sq > 0:
        raise ParameterError(f"sigma_u_sq must be positive, got {sigma_u_sq}")
    y = np.asarray(y, dtype=np.complex128)
    f = np.asarray(f, dtype=np.float64)
    d = y[..., None] - f[..., None] * QPSK_POINTS
    return -(d.real**2 + d.imag**2) / (2.0 * sigma_u_sq)


def branch_metrics(y, f, sigma_u_sq: float) -> np.ndarray:
    """Robust branch metrics, shape ``(..., 4)``, each in ``[e**-30, 1]``."""
    e = branch_exponents(y, f, sigma_u_sq)
    e = e - e.max(axis=-1, keepdims=True)
    np.maximum(e, EXPONENT_FLOOR, out=e)
    return np.exp(e)


def gamma(y: complex, f: float, sigma_u_sq: float, symbol: complex) -> float:
    """Robust branch metric of a single QPSK ``symbol`` at one trellis step."""
    match = np.flatnonzero(QPSK_POINTS == symbol)
    if match.size != 1:
        raise ParameterError(f"{symbol!r} is not a QPSK point")
    return float(branch_metrics(y, f, sigma_u_sq)[match[0]])


def uniform_priors(length: int) -> np.ndarray:
    return np.full((length, 2), 0.5)


def _check_inputs(trellis: Trellis, gammas, priors):
    gammas = np.ascontiguousarray(gammas, dtype=np.float64)
    if gammas.ndim != 2 or gammas.shape[1] != 4:
        raise ParameterError(f"gammas must have shape (L, 4), got {gammas.shape}")
    if priors is None:
        priors = uniform_priors(gammas.shape[0])
    priors = np.ascontiguousarray(priors, dtype=np.float64)
    if priors.shape != (gammas.shape[0], 2):
        raise ParameterError(f"priors must have shape {(gammas.shape[0], 2)}, got {priors.shape}")
    return gammas, priors


def forward(trellis: Trellis, gammas, priors=None) -> np.ndarray:
    """Normalized forward state probabilities, shape ``(L + 1, S)``.

    Row 0 is uniform; every row sums to 1.
    """
    gammas, priors = _check_inputs(trellis, gammas, priors)
    alpha = np.empty((gammas.shape[0] + 1, trellis.n_states))
    bad = _kernels.forward(gammas, trellis.sym_index, trellis.prev_state, trellis.prev_bit, priors, alpha)
    if bad >= 0:
        raise DegeneracyError(f"forward recursion: all-zero column at time {bad}")
    return alpha


def backward(trellis: Trellis, gammas, priors=None) -> np.ndarray:
    """Normalized backward state probabilities, shape ``(L + 1, S)``.

    Row ``L`` is uniform; every row sums to 1.
    """
    gammas, priors = _check_inputs(trellis, gammas, priors)
    beta = np.empty((gammas.shape[0] + 1, trellis.n_states))
    bad = _kernels.backward(gammas, trellis.sym_index, trellis.next_state, priors, beta)
    if bad >= 0:
        raise DegeneracyError(f"backward recursion: all-zero column at time {bad}")
    return beta


def extrinsic(trellis: Trellis, alphas, betas, gammas, return_raw=False):
    """Per-bit output pair of one constituent decoder.

    For each time ``i`` sums ``alpha[i, n] * gamma(n -> rho(n)) * beta[i+1, rho(n)]``
    over states separately for the +1 and -1 successor ``rho``, then
    normalizes the pair.  The prior at time ``i`` is not included.
    """
    gammas = np.ascontiguousarray(gammas, dtype=np.float64)
    length = gammas.shape[0]
    alphas = np.ascontiguousarray(alphas, dtype=np.float64)
    betas = np.ascontiguousarray(betas, dtype=np.float64)
    if alphas.shape != (length + 1, trellis.n_states) or betas.shape != alphas.shape:
        raise ParameterError("alphas/betas must have shape (L + 1, S) matching gammas")
    raw = np.empty((length, 2))
    norm = np.empty((length, 2))
    bad = _kernels.extrinsic(gammas, trellis.sym_index, trellis.next_state, alphas, betas, raw, norm)
    if bad >= 0:
        raise DegeneracyError(f"extrinsic: both branch sums are zero at time {bad}")
    return (norm, raw) if return_raw else norm


def siso(trellis: Trellis, gammas, priors=None):
    """One constituent MAP pass: returns ``(extrinsic_pair, raw_sums, alphas, betas)``."""
    gammas, priors = _check_inputs(trellis, gammas, priors)
    alphas = forward(trellis, gammas, priors)
    betas = backward(trellis, gammas, priors)
    norm, raw = extrinsic(trellis, alphas, betas, gammas, return_raw=True)
    return norm, raw, alphas, betas


def hard_decision(app) -> np.ndarray:
    """Data bits from posterior pairs; ties go to the +1 symbol (bit 0)."""
    app = np.asarray(app)
    return (app[:, 1] > app[:, 0]).astype(np.uint8)


@dataclass
class SoftFrame:
    """Soft state of one decoded frame after the last iteration.

    ``prior_from_2`` is the de-interleaved output of decoder 2 that decoder 1
    used as its prior in the last iteration, ``prior_from_1`` the output of
    decoder 1 (natural order).  ``alphas``/``betas`` belong to the last
    decoder-1 pass.  ``app`` is normalized per bit.
    """

    observation: CombinedObservation
    prior_from_2: np.ndarray
    prior_from_1: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    app: np.ndarray
    iterations: int

    @property
    def bits(self) -> np.ndarray:
        return hard_decision(self.app)


def decode(
    observation: CombinedObservation,
    trellis: Trellis,
    interleaver: Interleaver,
    iterations: int = DEFAULT_ITERATIONS,
) -> SoftFrame:
    """Turbo-decode one frame.

    One iteration runs decoder 1 (observations of the first ``L_d1``
    symbols, priors from decoder 2) and then decoder 2 (the last ``L_d1``
    symbols in interleaved order, priors from decoder 1).  The posterior is
    decoder 1's raw branch sum times the decoder-2 prior it used, taken from
    the last iteration.
    """
    if iterations < 1:
        raise ParameterError(f"iterations must be >= 1, got {iterations}")
    length = len(interleaver)
    if len(observation) != 2 * length:
        raise ParameterError(f"observation has {len(observation)} symbols, expected {2 * length}")

    gam = branch_metrics(observation.y, observation.f, observation.sigma_u_sq)
    gam1 = np.ascontiguousarray(gam[:length])
    gam2 = np.ascontiguousarray(gam[length:])

    from_2 = uniform_priors(length)
    for _ in range(iterations):
        from_1, raw1, alphas, betas = siso(trellis, gam1, from_2)
        prior_used = from_2
        out2, _, _, _ = siso(trellis, gam2, interleaver.interleave(from_1))
        from_2 = interleaver.deinterleave(out2)

    app = raw1 * prior_used
    total = app.sum(axis=1, keepdims=True)
    if np.any(~(total > 0)):
        raise DegeneracyError("posterior pair collapsed to zero")
    app = app / total
    return SoftFrame(
        observation=observation,
        prior_from_2=prior_used,
        prior_from_1=from_1,
        alphas=alphas,
        betas=betas,
        app=app,
        iterations=iterations,
    )
