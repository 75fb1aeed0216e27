import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmimo_retx.capacity import (
    SNR_PER_BIT_LIMIT,
    SNR_PER_BIT_LIMIT_DB,
    bits_per_symbol,
    min_snr_per_bit,
    spectral_efficiency,
)
from mmimo_retx.errors import ParameterError


def test_unit_capacity():
    p = min_snr_per_bit(1.0)
    assert p.snr_av_b == 1.0
    assert p.snr_av_b_db == 0.0


def test_limit_constant():
    assert SNR_PER_BIT_LIMIT == pytest.approx(0.6931, abs=1e-4)
    assert SNR_PER_BIT_LIMIT_DB == pytest.approx(-1.5917, abs=1e-4)


def test_quarter_bit():
    p = min_snr_per_bit(0.25)
    assert p.snr_av_b == pytest.approx((2**0.25 - 1) / 0.25, rel=1e-14)
    assert p.snr_av_b == pytest.approx(0.75683, abs=1e-5)
    assert p.snr_av_b_db == pytest.approx(-1.2100, abs=1e-4)


@given(c=st.floats(1e-9, 60.0))
def test_capacity_consistency(c):
    p = min_snr_per_bit(c)
    assert math.log2(1 + c * p.snr_av_b) == pytest.approx(c, rel=1e-12, abs=1e-12)
    assert p.snr_av_b > SNR_PER_BIT_LIMIT


@given(a=st.floats(1e-6, 50.0), b=st.floats(1e-6, 50.0))
def test_strictly_increasing(a, b):
    if a < b * (1 - 1e-9):
        assert min_snr_per_bit(a).snr_av_b < min_snr_per_bit(b).snr_av_b


def test_limit_convergence():
    values = [min_snr_per_bit(10.0**-k).snr_av_b for k in range(3, 10)]
    gaps = [v - SNR_PER_BIT_LIMIT for v in values]
    assert all(g > 0 for g in gaps)
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[3] / SNR_PER_BIT_LIMIT < 1e-6  # c = 1e-6


@pytest.mark.parametrize("c", [0.0, -1.0])
def test_non_positive_capacity(c):
    with pytest.raises(ParameterError):
        min_snr_per_bit(c)


def test_bits_per_symbol():
    assert bits_per_symbol(1) == 0.5
    assert bits_per_symbol(2) == 0.25
    assert bits_per_symbol(4) == 0.125
    with pytest.raises(ParameterError):
        bits_per_symbol(0)


def test_spectral_efficiency():
    assert spectral_efficiency(16, 2) == 4
    assert spectral_efficiency(512, 2) == 128
    assert spectral_efficiency(1, 1) == 0.5
    with pytest.raises(ParameterError):
        spectral_efficiency(0, 1)
    # per receive antenna the load is the per-symbol capacity
    assert spectral_efficiency(64, 4) / 64 == bits_per_symbol(4)
    assert np.isclose(min_snr_per_bit(bits_per_symbol(2)).snr_av_b, 0.75683, atol=1e-5)
