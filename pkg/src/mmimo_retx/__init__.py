"""Link-level simulator for turbo-coded single-user massive MIMO with re-transmissions."""

from .bcjr import SoftFrame, decode
from .capacity import bits_per_symbol, min_snr_per_bit, spectral_efficiency
from .channel import ChannelParams, draw_realization, noise_variance_from_snr, transmit
from .combiner import CombinedObservation, combine, matched_filter, sigma_u_sq
from .errors import ConfigError, DegeneracyError, ParameterError
from .harness import BerRecord, SimConfig, run_frame, run_sweep
from .numerics import RngStream
from .turbo import CODES, build_trellis, encode, make_interleaver

__version__ = "0.1.0"
