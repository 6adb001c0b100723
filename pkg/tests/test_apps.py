import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlti.apps import (
    CavityLossModel,
    FeedbackOscillator,
    cavity_F,
    cavity_F_magnitude_sq,
    hidden_squeezing_metrics,
    lossy_channel,
    lossy_squeezer_sdm,
    oscillator_bound,
    oscillator_H,
    oscillator_inverse,
    oscillator_noise_blocks,
    oscillator_open_bound,
    oscillator_transfer,
    r_lim,
    two_mode_invariants,
    two_mode_sigma_delta,
)
from qlti.core import GuardError
from qlti.sdm import normal_form, uncertainty_margin


def test_cavity_modulus_matches_closed_form():
    m = CavityLossModel(0.8, phi0=0.3, tau_rt=0.5)
    w = np.linspace(-3, 3, 41)
    assert np.allclose(np.abs(cavity_F(m, w)) ** 2, cavity_F_magnitude_sq(m, w))


def test_lossless_squeezer_is_rotated_squeezed_state():
    S = lossy_squeezer_sdm(1.0, 1.0, 0.8)
    assert abs(S[0, 1].imag) < 1e-15
    assert np.linalg.eigvalsh(S) == pytest.approx(np.exp([-1.6, 1.6]) / 2)


def test_lossy_squeezer_imaginary_part():
    Fp, Fm = np.sqrt(0.99), np.sqrt(0.3)
    S = lossy_squeezer_sdm(Fp, Fm, 1.0)
    assert abs(S[0, 1].imag) == pytest.approx((0.99 - 0.3) * np.sinh(1.0) ** 2 / 2)


def test_lossy_squeezer_matches_channel():
    Fp, Fm, r = 0.9 * np.exp(0.3j), 0.6 * np.exp(-0.5j), 0.7
    G, N = lossy_channel(Fp, Fm)
    S_in = np.diag([np.exp(2 * r), np.exp(-2 * r)]) / 2
    assert np.allclose(G @ S_in @ G.conj().T + N @ N.conj().T / 2, lossy_squeezer_sdm(Fp, Fm, r), atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(0.0, 1.0), b=st.floats(0.0, 1.0), ph=st.floats(-3, 3), r=st.floats(0.0, 3.0))
def test_lossy_output_is_physical(a, b, ph, r):
    S = lossy_squeezer_sdm(a * np.exp(1j * ph), b, r)
    assert uncertainty_margin(S) >= -1e-10 * max(1.0, np.linalg.norm(S))


def test_hidden_squeezing_verdict_flips_at_r_lim():
    Fp, Fm = np.sqrt(0.99), np.sqrt(0.3)
    rl = r_lim(Fp, Fm)
    assert not hidden_squeezing_metrics(np.eye(2) / 2).hidden
    assert not hidden_squeezing_metrics(lossy_squeezer_sdm(Fp, Fm, 0.8 * rl)).hidden
    assert hidden_squeezing_metrics(lossy_squeezer_sdm(Fp, Fm, 1.2 * rl)).hidden


def test_r_lim_limits():
    assert r_lim(0.7, 0.7) == np.inf
    assert r_lim(1.0, 1e-9) == pytest.approx(0, abs=1e-8)
    with pytest.raises(ValueError):
        r_lim(0.0, 0.5)


def test_two_mode_vacuum_and_closed_form():
    assert np.allclose(two_mode_sigma_delta(0.0, 0.0), np.eye(2) / 2)
    for r1, r2 in [(0.0, 1.0), (0.4, 0.9), (1.2, 0.3)]:
        sig, dlt = two_mode_invariants(r1, r2)
        assert np.allclose(two_mode_sigma_delta(r1, r2), normal_form([sig], [dlt]), atol=1e-12)
        assert dlt == pytest.approx((np.sinh(r2) ** 2 - np.sinh(r1) ** 2) / 2)


def test_oscillator_zero_frequency():
    eta = 0.3
    h0, hg, ha, _ = oscillator_H(FeedbackOscillator(eta), 0.0)
    s = np.sqrt(eta)
    assert h0 == pytest.approx((s + 1 / s) / 2)
    assert hg == pytest.approx((1 / s - s) / 2)
    assert ha == pytest.approx((1 / s + s) / 2)


def test_oscillator_pole_guard():
    with pytest.raises(GuardError):
        oscillator_H(FeedbackOscillator(0.5, tau=1.0), np.pi)


def test_oscillator_inverse_and_noise_proportionality():
    osc = FeedbackOscillator(0.5)
    for w in np.linspace(-2.5, 2.5, 9):
        assert np.allclose(oscillator_transfer(osc, w) @ oscillator_inverse(osc, w), np.eye(4), atol=1e-10)
        a, b = oscillator_noise_blocks(osc, w)
        A, B = a @ a.conj().T, b @ b.conj().T
        c = np.trace(A) / np.trace(B)
        assert np.linalg.norm(A - c * B) < 1e-10


def test_oscillator_bound_examples():
    bound, achieved = oscillator_bound(FeedbackOscillator(0.5), np.pi / 2)
    assert achieved / bound == pytest.approx(1, abs=1e-9)
    bound, _ = oscillator_bound(FeedbackOscillator(1 - 1e-9), 0.3)
    assert bound == pytest.approx(0.25, abs=1e-8)
    osc = FeedbackOscillator(0.25)
    rep = oscillator_open_bound(osc, 0.7)
    _, hg, _, _ = oscillator_H(osc, 0.7)
    assert rep.rhs[0] ** 2 == pytest.approx((abs(hg) ** 2 + 0.5) ** 2, abs=1e-10)
