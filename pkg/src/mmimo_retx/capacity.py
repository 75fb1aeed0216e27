"""Minimum SNR per bit for a given capacity, and spectral-efficiency helpers.

With ``C`` bits per transmission over one complex dimension, error-free
transmission needs ``SNR_b >= (2**C - 1) / C``.  The bound decreases to
``ln 2`` (about -1.59 dB) as ``C -> 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

#: Limit of the minimum SNR per bit as capacity goes to zero (linear).
SNR_PER_BIT_LIMIT = math.log(2.0)
SNR_PER_BIT_LIMIT_DB = 10.0 * math.log10(SNR_PER_BIT_LIMIT)


@dataclass(frozen=True)
class CapacityPoint:
    c: float
    snr_av_b: float
    snr_av_b_db: float


def to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def min_snr_per_bit(c: float) -> CapacityPoint:
    """Smallest average SNR per bit that supports ``c`` bits per transmission."""
    if not c > 0:
        raise ParameterError(f"capacity must be positive, got {c}")
    # expm1 keeps full precision for small c
    snr = math.expm1(c * SNR_PER_BIT_LIMIT) / c
    return CapacityPoint(c=c, snr_av_b=snr, snr_av_b_db=to_db(snr))


def bits_per_symbol(n_rt: int) -> float:
    """Information carried by one QPSK symbol: each data bit becomes 2 symbols, each sent ``n_rt`` times."""
    if n_rt < 1:
        raise ParameterError(f"n_rt must be >= 1, got {n_rt}")
    return 1.0 / (2 * n_rt)


def spectral_efficiency(n: int, n_rt: int) -> float:
    """Bits per transmission (bits/s/Hz) from ``n`` antennas."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return n * bits_per_symbol(n_rt)
