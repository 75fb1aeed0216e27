"""Block-fading N x N MIMO channel with re-transmissions.

Each N-symbol vector is sent ``n_rt`` times.  Every transmission sees its own
channel matrix and noise vector, all entries independent circular complex
Gaussian.  The noise variance is calibrated from the target average SNR per
bit so that ``10*log10(4*N*n_rt*sigma_h_sq / sigma_w_sq) == snr_av_b_db``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .numerics import RngStream, gaussian_complex

#: Average power of the {+-1 +-1j} QPSK alphabet.
QPSK_AVG_POWER = 2.0


@dataclass(frozen=True)
class ChannelParams:
    n: int
    n_rt: int
    sigma_h_sq: float = 0.5
    snr_av_b_db: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"antenna count n must be a positive integer, got {self.n}")
        if int(self.n_rt) != self.n_rt or self.n_rt < 1:
            raise ParameterError(f"n_rt must be a positive integer, got {self.n_rt}")
        if not self.sigma_h_sq > 0:
            raise ParameterError(f"sigma_h_sq must be positive, got {self.sigma_h_sq}")
        if not np.isfinite(self.snr_av_b_db):
            raise ParameterError(f"snr_av_b_db must be finite, got {self.snr_av_b_db}")


@dataclass(frozen=True)
class ChannelRealization:
    """One re-transmission's channel.

    ``h`` has shape ``(..., N, N)`` and ``w`` shape ``(..., N)``; the leading
    axes index the vector slots of a frame when realizations are batched.
    """

    h: np.ndarray
    w: np.ndarray
    k: int = 0


def noise_variance_from_snr(params: ChannelParams) -> float:
    """Per-dimension noise variance for the requested SNR per bit."""
    return params.n_rt * 4.0 * params.n * params.sigma_h_sq / 10.0 ** (0.1 * params.snr_av_b_db)


def snr_per_bit_db(params: ChannelParams, sigma_w_sq: float) -> float:
    """Inverse of :func:`noise_variance_from_snr`."""
    return 10.0 * np.log10(4.0 * params.n * params.n_rt * params.sigma_h_sq / sigma_w_sq)


def draw_realization(
    params: ChannelParams,
    sigma_w_sq: float,
    stream: RngStream,
    k: int,
    slots: int | None = None,
) -> ChannelRealization:
    """Draw the channel matrix and noise for re-transmission ``k``.

    The draw comes from substream ``stream.child(k)``, so distinct ``k``
    are independent.  With ``slots`` given, ``slots`` independent matrices
    are returned stacked along a leading axis.  ``sigma_w_sq == 0`` gives a
    noiseless realization.
    """
    if not 0 <= k < params.n_rt:
        raise ParameterError(f"re-transmission index {k} outside [0, {params.n_rt})")
    if sigma_w_sq < 0:
        raise ParameterError(f"sigma_w_sq must be non-negative, got {sigma_w_sq}")
    lead = () if slots is None else (int(slots),)
    n = params.n
    rng = stream.child(k).generator()
    h = gaussian_complex(rng, lead + (n, n), params.sigma_h_sq)
    if sigma_w_sq > 0:
        w = gaussian_complex(rng, lead + (n,), sigma_w_sq)
    else:
        w = np.zeros(lead + (n,), dtype=np.complex128)
    return ChannelRealization(h=h, w=w, k=k)


def transmit(realization: ChannelRealization, s) -> np.ndarray:
    """Received vector(s) ``h @ s + w``."""
    s = np.asarray(s, dtype=np.complex128)
    h, w = realization.h, realization.w
    if s.shape != w.shape:
        raise ParameterError(f"symbol shape {s.shape} does not match noise shape {w.shape}")
    if not (np.all(np.abs(s.real) == 1.0) and np.all(np.abs(s.imag) == 1.0)):
        raise ParameterError("symbols must come from the QPSK alphabet {+-1 +-1j}")
    return (h @ s[..., None])[..., 0] + w
