"""Matched filtering, re-transmission averaging and the interference variance.

Per re-transmission the receiver forms ``y_k = H_k^H r_k``, which per symbol
reads ``y_{k,i} = F_{k,i,i} S_i + I_{k,i} + V_{k,i}``.  Averaging over the
``n_rt`` transmissions shrinks the interference variance by ``1/n_rt`` while
leaving the noise contribution, at fixed SNR per bit, unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelParams, ChannelRealization
from .errors import ParameterError
from .numerics import hermitian_times


@dataclass(frozen=True)
class CombinedObservation:
    """Effective scalar channel ``y = f * S + u`` per symbol.

    ``y`` and ``f`` are flat arrays over the symbols of a frame;
    ``sigma_u_sq`` is the frame-wide variance of ``u`` (``E|u|^2``).
    """

    y: np.ndarray
    f: np.ndarray
    sigma_u_sq: float

    def __post_init__(self):
        if self.y.shape != self.f.shape:
            raise ParameterError(f"y shape {self.y.shape} != f shape {self.f.shape}")
        if not self.sigma_u_sq > 0:
            raise ParameterError(f"sigma_u_sq must be positive, got {self.sigma_u_sq}")
        if np.iscomplexobj(self.f) or np.any(self.f < 0):
            raise ParameterError("f must be real and non-negative")

    def __len__(self):
        return self.y.shape[-1]

    def scaled(self, c_sq: float) -> CombinedObservation:
        """Observation with ``y, f`` scaled by ``c_sq`` and ``sigma_u_sq`` by ``c_sq**2``."""
        return CombinedObservation(self.y * c_sq, self.f * c_sq, self.sigma_u_sq * c_sq**2)


def matched_filter(realization: ChannelRealization, r) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(H^H r, diag(H^H H))`` for one re-transmission.

    Works on a single ``(N, N)`` channel or a batch ``(..., N, N)``.
    """
    h = realization.h
    r = np.asarray(r, dtype=np.complex128)
    if r.shape != h.shape[:-1]:
        raise ParameterError(f"received shape {r.shape} does not match channel {h.shape}")
    y = hermitian_times(h, r[..., None])[..., 0]
    f = np.sum(h.real**2 + h.imag**2, axis=-2)
    return y, f


def combine(per_k: Sequence[tuple[np.ndarray, np.ndarray]], n_rt: int) -> tuple[np.ndarray, np.ndarray]:
    """Average matched-filter outputs and gains over the re-transmissions."""
    if len(per_k) == 0:
        raise ParameterError("combine needs at least one re-transmission")
    if len(per_k) != n_rt:
        raise ParameterError(f"expected {n_rt} re-transmissions, got {len(per_k)}")
    ys = np.stack([np.asarray(y) for y, _ in per_k])
    fs = np.stack([np.asarray(f) for _, f in per_k])
    return ys.mean(axis=0), fs.mean(axis=0)


def sigma_u_sq(params: ChannelParams) -> float:
    """Closed-form variance of the averaged interference-plus-noise term.

    ``16 N^2 sh^4 / 10^(SNR/10) + 8 sh^4 N (N-1) / n_rt`` with ``sh^2`` the
    per-dimension fading variance.
    """
    n, sh4 = params.n, params.sigma_h_sq**2
    noise = 16.0 * n * n * sh4 / 10.0 ** (0.1 * params.snr_av_b_db)
    interference = 8.0 * sh4 * n * (n - 1) / params.n_rt
    return noise + interference


def noise_power(params: ChannelParams, sigma_w_sq: float) -> float:
    """``E|V_{k,i}|^2`` for one matched-filtered transmission."""
    return 4.0 * params.n * params.sigma_h_sq * sigma_w_sq


def interference_power(params: ChannelParams) -> float:
    """``E|I_{k,i}|^2`` for one matched-filtered transmission."""
    return 8.0 * params.n * (params.n - 1) * params.sigma_h_sq**2


def cross_gain_power(params: ChannelParams) -> float:
    """``E|F_{k,i,m}|^2`` for ``m != i``."""
    return 4.0 * params.n * params.sigma_h_sq**2
