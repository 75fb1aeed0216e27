"""Seeded random substreams and the small complex-matrix kernels.

Every random quantity in a simulation is drawn from an :class:`RngStream`
addressed by ``(master_seed, substream_id)``.  The stream is a counter-based
Philox generator keyed through :class:`numpy.random.SeedSequence`, so frame
``k`` can be regenerated without replaying frames ``0..k-1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


class Role(enum.IntEnum):
    """Role tags that separate substreams belonging to the same frame."""

    DATA = 0
    CHANNEL = 1
    NOISE = 2
    INTERLEAVER = 3
    TEST = 99


@dataclass(frozen=True)
class RngStream:
    """Addressable random substream.

    Two streams built from the same ``master_seed`` and ``substream_id``
    produce identical sequences.  ``substream_id`` is a tuple of
    non-negative integers, conventionally ``(frame_index, role, ...)``.
    """

    master_seed: int
    substream_id: tuple[int, ...] = ()

    def __post_init__(self):
        if self.master_seed < 0:
            raise ParameterError(f"master_seed must be non-negative, got {self.master_seed}")
        ids = tuple(int(i) for i in self.substream_id)
        if any(i < 0 for i in ids):
            raise ParameterError(f"substream ids must be non-negative, got {ids}")
        object.__setattr__(self, "substream_id", ids)

    def child(self, *ids: int) -> RngStream:
        """Return the stream addressed by appending ``ids`` to this one."""
        return RngStream(self.master_seed, self.substream_id + tuple(ids))

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this substream."""
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.substream_id)
        return np.random.Generator(np.random.Philox(seq))


def _as_generator(stream: RngStream | np.random.Generator) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    return stream.generator()


def gaussian_complex(stream, n, variance_per_dim: float) -> np.ndarray:
    """Draw i.i.d. circular complex Gaussian samples.

    Parameters
    ----------
    stream : RngStream or numpy.random.Generator
        Source of randomness.  A ``RngStream`` is consumed from its start.
    n : int or tuple of int
        Number of samples, or an output shape.
    variance_per_dim : float
        Variance of the real part (and, independently, of the imaginary
        part).  ``E|z|^2 = 2 * variance_per_dim``.

    Returns
    -------
    numpy.ndarray of complex128
    """
    if not variance_per_dim > 0:
        raise ParameterError(f"variance_per_dim must be positive, got {variance_per_dim}")
    shape = (n,) if np.isscalar(n) else tuple(n)
    if any(int(d) < 1 for d in shape):
        raise ParameterError(f"sample shape must be positive, got {shape}")
    rng = _as_generator(stream)
    pairs = rng.standard_normal(shape + (2,))
    z = pairs.view(np.complex128)[..., 0]
    return z * np.sqrt(variance_per_dim)


def hermitian_times(a, b) -> np.ndarray:
    """Return ``a^H @ b``.

    Both operands may carry leading batch dimensions; the last two axes are
    the matrix axes.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ParameterError("hermitian_times expects matrices (ndim >= 2)")
    if a.shape[-2] != b.shape[-2]:
        raise ParameterError(
            f"row mismatch: a has {a.shape[-2]} rows, b has {b.shape[-2]} rows"
        )
    return np.conj(np.swapaxes(a, -1, -2)) @ b
