"""Recursive systematic convolutional codes and the parallel turbo encoder.

A frame of ``L_d1`` data bits is encoded twice: encoder 1 sees the data in
natural order, encoder 2 sees it through the interleaver.  Each encoder emits
one QPSK symbol per data bit, systematic bit on the real axis and parity bit
on the imaginary axis (bit 0 -> +1, bit 1 -> -1).  The two symbol tracks are
concatenated, encoder 1 first, into ``L_d = 2 * L_d1`` symbols.  Both encoders
start in the all-zero state and the trellis is not terminated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ParameterError
from .numerics import RngStream

#: QPSK candidates indexed by ``2 * systematic_bit + parity_bit``.
QPSK_POINTS = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], dtype=np.complex128)


@dataclass(frozen=True)
class RscCode:
    """Rate-1/2 RSC code ``[1, ff(D) / fb(D)]``.

    Tap masks store polynomial coefficients little-endian: bit ``j`` is the
    coefficient of ``D**j``.  ``1 + D + D**2`` is ``0b111``.
    """

    feedback_taps: int
    feedforward_taps: int
    memory: int

    def __post_init__(self):
        nu = self.memory
        if nu < 1:
            raise ParameterError(f"memory must be >= 1, got {nu}")
        limit = 1 << (nu + 1)
        for name in ("feedback_taps", "feedforward_taps"):
            taps = getattr(self, name)
            if not 0 < taps < limit:
                raise ParameterError(f"{name}={taps:#b} does not fit memory {nu}")
        if not self.feedback_taps & 1:
            raise ParameterError("feedback polynomial needs a constant term")
        top = 1 << nu
        if not (self.feedback_taps & top or self.feedforward_taps & top):
            raise ParameterError(f"neither polynomial reaches degree {nu}")

    @property
    def n_states(self) -> int:
        return 1 << self.memory


CODES = {
    # [1, (1 + D^2) / (1 + D + D^2)]
    "4-state": RscCode(feedback_taps=0b111, feedforward_taps=0b101, memory=2),
    # [1, (1 + D^2 + D^3 + D^4) / (1 + D + D^4)]
    "16-state": RscCode(feedback_taps=0b10011, feedforward_taps=0b11101, memory=4),
}


def get_code(code_id: str) -> RscCode:
    try:
        return CODES[code_id]
    except KeyError:
        raise ParameterError(f"unknown code {code_id!r}; choose from {sorted(CODES)}") from None


def _parity_of(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass(frozen=True, eq=False)
class Trellis:
    """Transition tables of an RSC code.

    State ``s`` holds the shift register, bit ``j - 1`` being the register
    value ``j`` steps in the past.  Input bit 0 corresponds to the +1 symbol.
    """

    code: RscCode
    next_state: np.ndarray
    parity: np.ndarray
    sym_index: np.ndarray
    prev_state: np.ndarray
    prev_bit: np.ndarray

    @property
    def n_states(self) -> int:
        return self.next_state.shape[0]

    @property
    def symbols(self) -> np.ndarray:
        """Coded QPSK symbol per transition, shape ``(S, 2)``."""
        return QPSK_POINTS[self.sym_index]

    def diverge(self, n: int) -> set[int]:
        """States reachable from ``n`` in one step."""
        return {int(m) for m in self.next_state[n]}

    def converge(self, n: int) -> set[int]:
        """States with a transition into ``n``."""
        return {int(m) for m in self.prev_state[n]}

    @property
    def rho_plus(self) -> np.ndarray:
        return self.next_state[:, 0]

    @property
    def rho_minus(self) -> np.ndarray:
        return self.next_state[:, 1]


def build_trellis(code: RscCode) -> Trellis:
    """Enumerate every (state, input) transition of ``code``."""
    n_states = code.n_states
    mask = n_states - 1
    fb_mem = code.feedback_taps >> 1
    ff_now = code.feedforward_taps & 1
    ff_mem = code.feedforward_taps >> 1

    next_state = np.empty((n_states, 2), dtype=np.int64)
    parity = np.empty((n_states, 2), dtype=np.uint8)
    for s in range(n_states):
        for b in (0, 1):
            a = b ^ _parity_of(fb_mem & s)
            parity[s, b] = (ff_now & a) ^ _parity_of(ff_mem & s)
            next_state[s, b] = ((s << 1) | a) & mask
    sym_index = 2 * np.arange(2, dtype=np.int64)[None, :] + parity.astype(np.int64)

    prev_state = np.full((n_states, 2), -1, dtype=np.int64)
    prev_bit = np.full((n_states, 2), -1, dtype=np.int64)
    fill = np.zeros(n_states, dtype=np.int64)
    for s in range(n_states):
        for b in (0, 1):
            n = next_state[s, b]
            if fill[n] >= 2:
                raise ParameterError(f"state {n} has more than two incoming transitions")
            prev_state[n, fill[n]] = s
            prev_bit[n, fill[n]] = b
            fill[n] += 1
    if np.any(fill != 2):
        raise ParameterError("trellis is not a complete butterfly structure")
    for arr in (next_state, parity, sym_index, prev_state, prev_bit):
        arr.setflags(write=False)
    return Trellis(code, next_state, parity, sym_index, prev_state, prev_bit)


@dataclass(frozen=True, eq=False)
class Interleaver:
    """Permutation used by encoder 2: ``interleave(x)[l] == x[perm[l]]``."""

    perm: np.ndarray
    inverse: np.ndarray = field(init=False)

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        if perm.ndim != 1 or not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ParameterError("interleaver must be a permutation of 0..L-1")
        inverse = np.empty_like(perm)
        inverse[perm] = np.arange(perm.size)
        perm.setflags(write=False)
        inverse.setflags(write=False)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "inverse", inverse)

    def __len__(self):
        return self.perm.size

    def interleave(self, x):
        return np.asarray(x)[self.perm]

    def deinterleave(self, x):
        return np.asarray(x)[self.inverse]


def make_interleaver(length: int, stream: RngStream) -> Interleaver:
    """Uniform random permutation fixed by ``stream``."""
    if length < 2:
        raise ParameterError(f"interleaver length must be >= 2, got {length}")
    return Interleaver(stream.generator().permutation(length))


@dataclass(frozen=True)
class FrameSymbols:
    """``L_d`` QPSK symbols: encoder-1 track then encoder-2 track."""

    symbols: np.ndarray

    @property
    def frame_bits(self) -> int:
        return self.symbols.size // 2

    @property
    def first(self) -> np.ndarray:
        return self.symbols[: self.frame_bits]

    @property
    def second(self) -> np.ndarray:
        return self.symbols[self.frame_bits :]

    def slots(self, n: int) -> np.ndarray:
        """Reshape into ``(L_d // n, n)`` antenna vectors."""
        if self.symbols.size % n:
            raise ParameterError(f"frame of {self.symbols.size} symbols is not a multiple of N={n}")
        return self.symbols.reshape(-1, n)


def map_qpsk(systematic, parity) -> np.ndarray:
    """Map bit pairs to ``(1 - 2*sys) + 1j*(1 - 2*par)``."""
    return QPSK_POINTS[2 * np.asarray(systematic, dtype=np.int64) + np.asarray(parity, dtype=np.int64)]


def rsc_encode(bits, trellis: Trellis) -> np.ndarray:
    """Parity track of one constituent encoder started in state 0."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    return _kernels.rsc_parity(bits, trellis.next_state, trellis.parity)


def encode(data_bits, trellis: Trellis, interleaver: Interleaver) -> FrameSymbols:
    """Turbo-encode one frame of data bits into ``2 * len(data_bits)`` symbols."""
    data = np.asarray(data_bits)
    if data.ndim != 1 or data.size != len(interleaver):
        raise ParameterError(f"expected {len(interleaver)} data bits, got shape {data.shape}")
    if np.any((data != 0) & (data != 1)):
        raise ParameterError("data bits must be 0 or 1")
    data = data.astype(np.uint8)
    permuted = interleaver.interleave(data)
    first = map_qpsk(data, rsc_encode(data, trellis))
    second = map_qpsk(permuted, rsc_encode(permuted, trellis))
    return FrameSymbols(np.concatenate([first, second]))
