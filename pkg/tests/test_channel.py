import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmimo_retx.channel import (
    QPSK_AVG_POWER,
    ChannelParams,
    ChannelRealization,
    draw_realization,
    noise_variance_from_snr,
    snr_per_bit_db,
    transmit,
)
from mmimo_retx.errors import ParameterError
from mmimo_retx.numerics import RngStream
from mmimo_retx.turbo import QPSK_POINTS


def test_noise_variance_n16():
    p = ChannelParams(n=16, n_rt=2, sigma_h_sq=0.5, snr_av_b_db=4.0)
    # 2 * 4 * 16 * 0.5 / 10**0.4
    assert noise_variance_from_snr(p) == pytest.approx(64 / 10**0.4, rel=1e-12)
    assert noise_variance_from_snr(p) == pytest.approx(25.479, abs=1e-3)


def test_noise_variance_unit_case():
    assert noise_variance_from_snr(ChannelParams(1, 1, 0.5, 0.0)) == pytest.approx(2.0, rel=1e-15)


@given(
    n=st.integers(1, 1024),
    n_rt=st.integers(1, 8),
    sigma_h_sq=st.floats(1e-3, 10.0),
    snr=st.floats(-10.0, 30.0),
)
@settings(max_examples=100, deadline=None)
def test_snr_round_trip(n, n_rt, sigma_h_sq, snr):
    p = ChannelParams(n, n_rt, sigma_h_sq, snr)
    assert snr_per_bit_db(p, noise_variance_from_snr(p)) == pytest.approx(snr, abs=1e-12)


@pytest.mark.parametrize(
    "kwargs",
    [dict(n=0, n_rt=1), dict(n=2, n_rt=0), dict(n=2, n_rt=1, sigma_h_sq=0.0), dict(n=2, n_rt=1, snr_av_b_db=float("nan"))],
)
def test_invalid_params(kwargs):
    with pytest.raises(ParameterError):
        ChannelParams(**kwargs)


def test_fading_variance_per_dimension():
    p = ChannelParams(16, 2, 0.5, 4.0)
    real = draw_realization(p, 1.0, RngStream(1, (0, 1)), 0, slots=400)
    assert real.h.size >= 10**5
    assert 0.5 * np.mean(np.abs(real.h) ** 2) == pytest.approx(0.5, rel=0.02)
    assert 0.5 * np.mean(np.abs(real.w) ** 2) == pytest.approx(1.0, rel=0.05)


def test_gram_matrix_tends_to_scaled_identity():
    p = ChannelParams(4, 1, 0.5, 0.0)
    h = draw_realization(p, 1.0, RngStream(2, (0, 1)), 0, slots=20000).h
    gram = 0.5 * np.mean(np.conj(np.swapaxes(h, -1, -2)) @ h, axis=0) / p.n
    np.testing.assert_allclose(np.real(np.diag(gram)), 0.5, rtol=0.02)
    off = gram[~np.eye(4, dtype=bool)]
    assert np.max(np.abs(off)) < 0.01
    # fewer samples -> larger off-diagonal error
    gram_small = 0.5 * np.mean(np.conj(np.swapaxes(h[:200], -1, -2)) @ h[:200], axis=0) / p.n
    assert np.max(np.abs(gram_small[~np.eye(4, dtype=bool)])) > np.max(np.abs(off))


def test_retransmissions_independent():
    p = ChannelParams(4, 2, 0.5, 0.0)
    stream = RngStream(3, (0, 1))
    h0 = draw_realization(p, 1.0, stream, 0, slots=20000).h
    h1 = draw_realization(p, 1.0, stream, 1, slots=20000).h
    cross = 0.5 * np.mean(h0 @ np.conj(np.swapaxes(h1, -1, -2)), axis=0)
    assert np.max(np.abs(cross)) < 0.05
    auto = 0.5 * np.mean(h0 @ np.conj(np.swapaxes(h0, -1, -2)), axis=0)
    np.testing.assert_allclose(np.real(np.diag(auto)), p.n * 0.5, rtol=0.03)


def test_realization_reproducible_and_k_checked():
    p = ChannelParams(4, 2, 0.5, 0.0)
    a = draw_realization(p, 1.0, RngStream(3, (7,)), 1)
    b = draw_realization(p, 1.0, RngStream(3, (7,)), 1)
    np.testing.assert_array_equal(a.h, b.h)
    np.testing.assert_array_equal(a.w, b.w)
    with pytest.raises(ParameterError):
        draw_realization(p, 1.0, RngStream(3), 2)


def test_transmit_identity_channel():
    s = QPSK_POINTS[[0, 3, 1, 2]]
    real = ChannelRealization(np.eye(4, dtype=complex), np.zeros(4, dtype=complex))
    np.testing.assert_array_equal(transmit(real, s), s)


def test_transmit_scalar():
    real = ChannelRealization(np.array([[2.0 + 0j]]), np.zeros(1, dtype=complex))
    np.testing.assert_array_equal(transmit(real, [1 + 1j]), [2 + 2j])


def test_transmit_rejects_bad_input():
    real = ChannelRealization(np.eye(2, dtype=complex), np.zeros(2, dtype=complex))
    with pytest.raises(ParameterError):
        transmit(real, [1 + 1j])
    with pytest.raises(ParameterError):
        transmit(real, [1 + 1j, 0.5 + 1j])


def test_qpsk_average_power():
    assert np.mean(QPSK_POINTS.real**2 + QPSK_POINTS.imag**2) == QPSK_AVG_POWER == 2.0


def test_received_signal_power_and_snr_identity():
    p = ChannelParams(16, 2, 0.5, 4.0)
    sw = noise_variance_from_snr(p)
    rng = np.random.default_rng(4)
    s = QPSK_POINTS[rng.integers(0, 4, size=(8000, 16))]
    real = draw_realization(p, sw, RngStream(9, (0, 1)), 0, slots=8000)
    signal = (real.h @ s[..., None])[..., 0]
    sig_power = np.mean(np.abs(signal) ** 2)
    assert sig_power == pytest.approx(2 * p.n * p.sigma_h_sq * QPSK_AVG_POWER, rel=0.02)
    measured = 10 * np.log10(sig_power * 2 * p.n_rt / np.mean(np.abs(real.w) ** 2))
    assert measured == pytest.approx(p.snr_av_b_db, abs=0.1)
    r = transmit(real, s)
    np.testing.assert_allclose(r - real.w, signal)


def test_zero_noise_realization():
    real = draw_realization(ChannelParams(2, 1), 0.0, RngStream(1), 0)
    assert not np.any(real.w)
