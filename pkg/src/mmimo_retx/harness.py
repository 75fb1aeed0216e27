"""Monte Carlo BER engine.

A frame is fully determined by ``(seed, frame_index)``: its data bits,
channel matrices and noise come from dedicated substreams, and the
interleaver from a run-level substream.  The same frame index therefore sees
the same data and fading at every SNR point and every ``n_rt``, which gives
matched-seed comparisons for free.

Sweeps evaluate frames in batches (optionally across worker processes) and
then keep the shortest prefix of frames, in index order, that meets the
stopping rule.  The result does not depend on the number of workers or the
batch size.
"""

from __future__ import annotations

import csv
import dataclasses
import functools
import io
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import bcjr
from .channel import ChannelParams, draw_realization, noise_variance_from_snr, transmit
from .combiner import CombinedObservation, combine, matched_filter, sigma_u_sq
from .errors import ConfigError, DegeneracyError, ParameterError
from .numerics import Role, RngStream
from .turbo import CODES, Interleaver, Trellis, build_trellis, encode, get_code, make_interleaver

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "snr_db", "n", "n_rt", "code", "frame_bits", "iterations",
    "frames", "bits", "bit_errors", "ber", "seconds",
)

# substream prefixes: per-frame streams vs. run-level streams
_FRAME = 0
_RUN = 1


@dataclass(frozen=True)
class SimConfig:
    n: int = 16
    n_rt: int = 2
    code: str = "4-state"
    frame_bits: int = 1024
    snr_db: tuple[float, ...] = (4.0,)
    max_frames: int = 1000
    min_bit_errors: int = 100
    iterations: int = bcjr.DEFAULT_ITERATIONS
    seed: int = 1
    output: str | None = None
    workers: int = 1
    sigma_h_sq: float = 0.5
    timing: bool = True

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        object.__setattr__(self, "code", _normalize_code(self.code))
        for name in ("n", "n_rt", "frame_bits", "max_frames", "min_bit_errors", "iterations", "workers"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.frame_bits < 2:
            raise ConfigError(f"frame_bits must be >= 2, got {self.frame_bits}")
        if (2 * self.frame_bits) % self.n:
            raise ConfigError(
                f"frame of {2 * self.frame_bits} symbols is not a multiple of n={self.n}"
            )
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if not self.sigma_h_sq > 0:
            raise ConfigError(f"sigma_h_sq must be positive, got {self.sigma_h_sq}")
        if not all(math.isfinite(s) for s in self.snr_db):
            raise ConfigError(f"snr_db values must be finite, got {self.snr_db}")

    def channel(self, snr_db: float) -> ChannelParams:
        return ChannelParams(self.n, self.n_rt, self.sigma_h_sq, snr_db)

    def replace(self, **changes) -> SimConfig:
        return dataclasses.replace(self, **changes)


def _normalize_code(code) -> str:
    code = str(code).strip()
    if code in CODES:
        return code
    alias = f"{code}-state"
    if alias in CODES:
        return alias
    raise ConfigError(f"unknown code {code!r}; choose from {sorted(CODES)}")


@dataclass(frozen=True)
class BerRecord:
    snr_db: float
    frames_run: int
    bits_simulated: int
    bit_errors: int
    wall_seconds: float = 0.0
    n: int = 0
    n_rt: int = 0
    code: str = ""
    frame_bits: int = 0
    iterations: int = 0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_simulated if self.bits_simulated else 0.0


class FrameError(RuntimeError):
    """A frame could not be decoded; the message carries what is needed to replay it."""


@functools.lru_cache(maxsize=8)
def _link(code: str, frame_bits: int, seed: int) -> tuple[Trellis, Interleaver]:
    trellis = build_trellis(get_code(code))
    interleaver = make_interleaver(frame_bits, RngStream(seed, (_RUN, Role.INTERLEAVER)))
    return trellis, interleaver


def frame_stream(seed: int, frame_index: int, role: Role) -> RngStream:
    return RngStream(seed, (_FRAME, frame_index, role))


def receive_frame(cfg: SimConfig, snr_db: float, frame_index: int, symbols, sigma_w_sq=None):
    """Send a frame's symbols over ``n_rt`` fresh channels and combine at the receiver."""
    params = cfg.channel(snr_db)
    if sigma_w_sq is None:
        sigma_w_sq = noise_variance_from_snr(params)
    slots = np.asarray(symbols).reshape(-1, cfg.n)
    stream = frame_stream(cfg.seed, frame_index, Role.CHANNEL)
    per_k = []
    for k in range(cfg.n_rt):
        real = draw_realization(params, sigma_w_sq, stream, k, slots=slots.shape[0])
        per_k.append(matched_filter(real, transmit(real, slots)))
    y, f = combine(per_k, cfg.n_rt)
    return CombinedObservation(y.reshape(-1), f.reshape(-1), sigma_u_sq(params))


def frame_data(cfg: SimConfig, frame_index: int) -> np.ndarray:
    rng = frame_stream(cfg.seed, frame_index, Role.DATA).generator()
    return rng.integers(0, 2, size=cfg.frame_bits, dtype=np.uint8)


def simulate_frame(cfg: SimConfig, snr_db: float, frame_index: int, sigma_w_sq: float | None = None):
    """Encode, transmit, combine and decode one frame.

    Returns ``(data_bits, soft_frame)``.  ``sigma_w_sq`` overrides the
    channel noise variance; the decoder keeps the variance implied by
    ``snr_db``.
    """
    trellis, interleaver = _link(cfg.code, cfg.frame_bits, cfg.seed)
    data = frame_data(cfg, frame_index)
    frame = encode(data, trellis, interleaver)
    obs = receive_frame(cfg, snr_db, frame_index, frame.symbols, sigma_w_sq)
    try:
        decoded = bcjr.decode(obs, trellis, interleaver, cfg.iterations)
    except DegeneracyError as exc:
        raise FrameError(
            f"decoding failed at seed={cfg.seed} frame_index={frame_index} snr_db={snr_db}: {exc}"
        ) from exc
    return data, decoded


def run_frame(cfg: SimConfig, snr_db: float, frame_index: int, sigma_w_sq: float | None = None) -> int:
    """Number of data-bit errors in one simulated frame."""
    data, decoded = simulate_frame(cfg, snr_db, frame_index, sigma_w_sq)
    return int(np.count_nonzero(decoded.bits != data))


def _run_frames(cfg: SimConfig, snr_db: float, indices: Sequence[int]) -> list[int]:
    return [run_frame(cfg, snr_db, i) for i in indices]


def _split(indices: range, parts: int) -> list[range]:
    step = max(1, math.ceil(len(indices) / parts))
    return [indices[i : i + step] for i in range(0, len(indices), step)]


def _sweep_point(cfg: SimConfig, snr_db: float, pool: ProcessPoolExecutor | None) -> BerRecord:
    start = time.perf_counter()
    batch = max(32, 8 * cfg.workers)
    errors_total = 0
    frames = 0
    done = False
    while frames < cfg.max_frames and not done:
        indices = range(frames, min(frames + batch, cfg.max_frames))
        if pool is None:
            counts = _run_frames(cfg, snr_db, indices)
        else:
            chunks = _split(indices, cfg.workers)
            futures = [pool.submit(_run_frames, cfg, snr_db, list(c)) for c in chunks]
            counts = [e for fut in futures for e in fut.result()]
        for e in counts:
            errors_total += e
            frames += 1
            if errors_total >= cfg.min_bit_errors:
                done = True
                break
        batch = min(2 * batch, 4096)
    seconds = time.perf_counter() - start if cfg.timing else 0.0
    record = BerRecord(
        snr_db=snr_db,
        frames_run=frames,
        bits_simulated=frames * cfg.frame_bits,
        bit_errors=errors_total,
        wall_seconds=seconds,
        n=cfg.n,
        n_rt=cfg.n_rt,
        code=cfg.code,
        frame_bits=cfg.frame_bits,
        iterations=cfg.iterations,
    )
    log.info("snr=%.2f dB frames=%d errors=%d ber=%.3e", snr_db, frames, errors_total, record.ber)
    return record


def run_sweep(cfg: SimConfig) -> list[BerRecord]:
    """BER at every SNR point of ``cfg``; writes ``cfg.output`` when set."""
    records = []
    if cfg.snr_db:
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                records = [_sweep_point(cfg, s, pool) for s in cfg.snr_db]
        else:
            records = [_sweep_point(cfg, s, None) for s in cfg.snr_db]
    if cfg.output:
        write_csv(records, cfg.output)
    return records


def ber_crossing(records: Iterable[BerRecord], target: float) -> float | None:
    """SNR (dB) where the BER curve first falls through ``target``.

    Interpolates linearly in ``log10(BER)`` between adjacent points sorted by
    SNR.  Returns None when the curve never brackets the target or a
    bracketing point has zero errors.
    """
    pts = sorted((r.snr_db, r.ber) for r in records)
    for (x0, b0), (x1, b1) in zip(pts, pts[1:]):
        if b0 >= target > b1 or b0 > target >= b1:
            if b1 <= 0:
                return None
            l0, l1, lt = math.log10(b0), math.log10(b1), math.log10(target)
            return x0 + (x1 - x0) * (l0 - lt) / (l0 - l1)
    return None


def format_csv(records: Iterable[BerRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([
            repr(float(r.snr_db)), r.n, r.n_rt, r.code, r.frame_bits, r.iterations,
            r.frames_run, r.bits_simulated, r.bit_errors, repr(r.ber), f"{r.wall_seconds:.3f}",
        ])
    return buf.getvalue()


def write_csv(records: Iterable[BerRecord], path) -> None:
    try:
        Path(path).write_text(format_csv(records), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def parse_csv(text: str) -> list[BerRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ParameterError(f"unexpected CSV header {reader.fieldnames}")
    return [
        BerRecord(
            snr_db=float(row["snr_db"]),
            frames_run=int(row["frames"]),
            bits_simulated=int(row["bits"]),
            bit_errors=int(row["bit_errors"]),
            wall_seconds=float(row["seconds"]),
            n=int(row["n"]),
            n_rt=int(row["n_rt"]),
            code=row["code"],
            frame_bits=int(row["frame_bits"]),
            iterations=int(row["iterations"]),
        )
        for row in reader
    ]


def read_csv(path) -> list[BerRecord]:
    return parse_csv(Path(path).read_text(encoding="utf-8"))


_CONFIG_FIELDS = {f.name: f for f in dataclasses.fields(SimConfig)}


def _coerce(key: str, raw: str):
    if key == "snr_db":
        return parse_snr_list(raw)
    if key in ("code", "output"):
        return raw
    if key == "timing":
        lowered = raw.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"timing: expected a boolean, got {raw!r}")
    if key == "sigma_h_sq":
        return float(raw)
    return int(raw)


def parse_snr_list(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in str(text).split(",")]
    try:
        return tuple(float(p) for p in parts if p)
    except ValueError:
        raise ConfigError(f"snr_db: cannot parse {text!r} as a comma-separated list") from None


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines into SimConfig keyword arguments.

    Blank lines and ``#`` comments are skipped.  Keys are SimConfig field
    names; dashes are accepted in place of underscores.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_FIELDS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key}: {raw!r}") from None
    return values


def read_config(path, **overrides) -> SimConfig:
    """Load a config file; keyword ``overrides`` that are not None win."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = parse_config(text)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return SimConfig(**values)


def default_workers() -> int:
    return max(1, len(os.sched_getaffinity(0)))
