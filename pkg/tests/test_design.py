import numpy as np
import pytest

from jdsp.design import (
    EquirippleSpec,
    FirSpec,
    IirSpec,
    _analog_prototype,
    _bilinear_zpk,
    _kaiser_window,
    _lp_to_hp,
    _lp_to_lp,
    bessel_i0,
    design_fir_equiripple,
    design_fir_freq_sampling,
    design_fir_kaiser,
    design_iir,
    kaiser_params,
)
from jdsp.errors import InvalidSpec
from jdsp.filters import TransferFunction, frequency_response, is_stable


def _mag_db(tf, n=4096):
    fr = frequency_response(tf, n + 1)
    return fr.omega, 20.0 * np.log10(np.abs(fr.h) + 1e-300)


def _amplitude(tf, omega):
    # zero-phase amplitude of a type-I filter evaluated at arbitrary omega
    b = tf.b
    half = (len(b) - 1) // 2
    w = np.atleast_1d(omega)
    e = np.exp(-1j * np.outer(w, np.arange(len(b))))
    return np.real(e @ b * np.exp(1j * w * half))


# --- Kaiser -----------------------------------------------------------------

def test_kaiser_params_formula():
    p = kaiser_params(60.0, 0.2 * np.pi)
    assert abs(p.beta - 5.65326) < 1e-5
    assert p.order == 38  # ceil(52.05/1.43566) = 37, forced even
    assert kaiser_params(21.0, 0.3).beta == 0.0
    assert kaiser_params(10.0, 0.3).beta == 0.0
    mid = kaiser_params(40.0, 0.3).beta
    assert abs(mid - (0.5842 * 19.0 ** 0.4 + 0.07886 * 19.0)) < 1e-12
    with pytest.raises(InvalidSpec):
        kaiser_params(60.0, 0.0)
    with pytest.raises(InvalidSpec):
        kaiser_params(-1.0, 0.5)


def test_bessel_i0():
    assert bessel_i0(0.0) == 1.0
    assert abs(bessel_i0(1.0) - 1.26606587775) < 1e-10
    rng = np.random.default_rng(0)
    for x in rng.uniform(0, 20, 10):
        assert bessel_i0(-x) == bessel_i0(x)


def test_kaiser_window_beta_zero_is_rectangular():
    assert np.allclose(_kaiser_window(10, 0.0), 1.0)


def test_kaiser_design_meets_stopband():
    tf = design_fir_kaiser(FirSpec(0.2 * np.pi, 0.3 * np.pi, 60.0))
    assert np.max(np.abs(tf.b - tf.b[::-1])) < 1e-14
    assert np.array_equal(tf.a, [1.0])
    omega, mag = _mag_db(tf)
    assert np.max(mag[omega >= 0.3 * np.pi]) <= -(60.0 - 2.0)


def test_kaiser_highpass():
    tf = design_fir_kaiser(FirSpec(0.5 * np.pi, 0.35 * np.pi, 50.0, kind="highpass"))
    omega, mag = _mag_db(tf)
    assert np.max(mag[omega <= 0.35 * np.pi]) <= -(50.0 - 2.0)
    assert np.max(np.abs(mag[omega >= 0.5 * np.pi])) < 1.0  # passband near 0 dB
    with pytest.raises(InvalidSpec):
        design_fir_kaiser(FirSpec(0.3 * np.pi, 0.5 * np.pi, 50.0, kind="highpass"))


# --- frequency sampling -------------------------------------------------------

def test_freq_sampling_flat_is_delayed_impulse():
    tf = design_fir_freq_sampling(np.ones(7))
    want = np.zeros(7)
    want[3] = 1.0
    assert np.max(np.abs(tf.b - want)) < 1e-12


def test_freq_sampling_zero_target():
    tf = design_fir_freq_sampling(np.zeros(5))
    assert np.max(np.abs(tf.b)) < 1e-12


def test_freq_sampling_interpolates_samples():
    rng = np.random.default_rng(1)
    n = 9
    desired = np.abs(rng.normal(size=n))
    desired[(n - 1) // 2 + 1:] = desired[1:(n - 1) // 2 + 1][::-1]  # mirrored target
    tf = design_fir_freq_sampling(desired)
    assert np.max(np.abs(tf.b - tf.b[::-1])) < 1e-12
    omegas = 2 * np.pi * np.arange(n) / n
    resp = np.abs([np.sum(tf.b * np.exp(-1j * w * np.arange(n))) for w in omegas])
    assert np.max(np.abs(resp - desired)) < 1e-9


def test_freq_sampling_rejects_even_length():
    with pytest.raises(InvalidSpec):
        design_fir_freq_sampling(np.ones(8))


# --- equiripple -----------------------------------------------------------------

def test_equiripple_two_band_alternation():
    spec = EquirippleSpec(15, [(0, 0.2 * np.pi), (0.3 * np.pi, np.pi)], [1.0, 0.0])
    res = design_fir_equiripple(spec)
    assert res.iterations <= 40
    assert np.max(np.abs(res.tf.b - res.tf.b[::-1])) < 1e-12
    assert len(res.extrema) >= 9
    desired = np.where(res.extrema <= 0.25 * np.pi, 1.0, 0.0)
    errs = desired - _amplitude(res.tf, res.extrema)
    assert np.all(np.sign(errs[1:]) != np.sign(errs[:-1]))
    assert np.max(np.abs(np.abs(errs) - res.delta)) <= 1e-3 * res.delta


def test_equiripple_achievable_allpass():
    res = design_fir_equiripple(EquirippleSpec(5, [(0, np.pi)], [1.0]))
    assert np.max(np.abs(res.tf.b - [0, 0, 1, 0, 0])) < 1e-9
    assert res.delta < 1e-9


def test_equiripple_weight_homogeneity():
    bands = [(0, 0.2 * np.pi), (0.3 * np.pi, np.pi)]
    one = design_fir_equiripple(EquirippleSpec(15, bands, [1.0, 0.0], [1.0, 1.0]))
    two = design_fir_equiripple(EquirippleSpec(15, bands, [1.0, 0.0], [2.0, 2.0]))
    assert np.max(np.abs(one.tf.b - two.tf.b)) < 1e-9
    assert abs(two.delta - 2.0 * one.delta) < 1e-6 * one.delta


def test_equiripple_weighted_error_matches_delta_at_extrema():
    spec = EquirippleSpec(21, [(0, 0.25 * np.pi), (0.4 * np.pi, np.pi)], [1.0, 0.0], [1.0, 3.0])
    res = design_fir_equiripple(spec)
    desired = np.where(res.extrema <= 0.3 * np.pi, 1.0, 0.0)
    weight = np.where(res.extrema <= 0.3 * np.pi, 1.0, 3.0)
    errs = weight * (desired - _amplitude(res.tf, res.extrema))
    assert np.max(np.abs(np.abs(errs) - res.delta)) <= 1e-5 * res.delta


def test_equiripple_validation():
    with pytest.raises(InvalidSpec):
        design_fir_equiripple(EquirippleSpec(8, [(0, 1)], [1.0]))  # even taps
    with pytest.raises(InvalidSpec):
        design_fir_equiripple(EquirippleSpec(7, [(1.0, 0.5)], [1.0]))  # lo > hi
    with pytest.raises(InvalidSpec):
        design_fir_equiripple(EquirippleSpec(7, [(0, 1), (0.5, 2)], [1, 0]))  # overlap
    with pytest.raises(InvalidSpec):
        design_fir_equiripple(EquirippleSpec(7, [(0, 1)], [1.0], [0.0]))  # weight


# --- IIR --------------------------------------------------------------------------

def test_butterworth_cutoff_is_3db():
    for n in (2, 4):
        tf = design_iir(IirSpec("butterworth", "lowpass", n, 0.5 * np.pi))
        wc = 0.5 * np.pi
        h = np.polyval(tf.b[::-1], np.exp(-1j * wc)) / np.polyval(tf.a[::-1], np.exp(-1j * wc))
        assert abs(abs(h) - 1.0 / np.sqrt(2.0)) < 1e-9


def test_butterworth_dc_and_nyquist():
    for n in range(1, 7):
        tf = design_iir(IirSpec("butterworth", "lowpass", n, 0.37 * np.pi))
        h0 = np.sum(tf.b) / np.sum(tf.a)
        h_pi = np.polyval(tf.b[::-1], -1.0) / np.polyval(tf.a[::-1], -1.0)
        assert abs(abs(h0) - 1.0) < 1e-9
        assert abs(h_pi) < 1e-9


def test_chebyshev1_passband_excursion():
    tf = design_iir(IirSpec("chebyshev1", "lowpass", 4, 0.5 * np.pi, passband_ripple_db=1.0))
    omega, mag = _mag_db(tf, 8192)
    band = mag[omega <= 0.5 * np.pi]
    assert abs((band.max() - band.min()) - 1.0) < 0.01


def test_chebyshev2_stopband():
    tf = design_iir(IirSpec("chebyshev2", "lowpass", 4, 0.6 * np.pi, stopband_atten_db=40.0))
    omega, mag = _mag_db(tf, 8192)
    assert abs(mag[0]) < 1e-9  # DC gain 1
    assert np.max(mag[omega >= 0.6 * np.pi]) <= -40.0 + 0.05


def test_elliptic_meets_both_specs():
    import math

    from jdsp.design import _ellipdeg

    rp, atten, wc = 1.0, 40.0, 0.5 * np.pi
    tf = design_iir(IirSpec("elliptic", "lowpass", 4, wc,
                            passband_ripple_db=rp, stopband_atten_db=atten))
    k = _ellipdeg(4, math.sqrt(10 ** (rp / 10) - 1) / math.sqrt(10 ** (atten / 10) - 1))
    ws = 2 * math.atan(2 * math.tan(wc / 2) / k / 2)
    omega, mag = _mag_db(tf, 8192)
    passband = mag[omega <= wc]
    assert passband.max() <= 0.05 and passband.min() >= -rp - 0.05
    assert np.max(mag[omega >= ws]) <= -atten + 0.05


def test_all_iir_families_stable():
    for family, kw in (
        ("butterworth", {}),
        ("chebyshev1", {"passband_ripple_db": 0.5}),
        ("chebyshev2", {"stopband_atten_db": 50.0}),
        ("elliptic", {"passband_ripple_db": 0.5, "stopband_atten_db": 50.0}),
    ):
        for kind in ("lowpass", "highpass"):
            for order in (1, 3, 6):
                tf = design_iir(IirSpec(family, kind, order, 0.4 * np.pi, **kw))
                stable, mag = is_stable(tf)
                assert stable, (family, kind, order, mag)


def test_highpass_reference_gains():
    tf = design_iir(IirSpec("butterworth", "highpass", 3, 0.6 * np.pi))
    h_pi = np.polyval(tf.b[::-1], -1.0) / np.polyval(tf.a[::-1], -1.0)
    h_0 = np.sum(tf.b) / np.sum(tf.a)
    assert abs(abs(h_pi) - 1.0) < 1e-9
    assert abs(h_0) < 1e-9
    wc = 0.6 * np.pi
    h = np.polyval(tf.b[::-1], np.exp(-1j * wc)) / np.polyval(tf.a[::-1], np.exp(-1j * wc))
    assert abs(abs(h) - 1.0 / np.sqrt(2.0)) < 1e-9


def test_bilinear_preserves_prototype_magnitude():
    # analog magnitude at Omega must equal digital magnitude at 2 atan(Omega/2)
    rng = np.random.default_rng(2)
    spec = IirSpec("chebyshev1", "lowpass", 5, 0.45 * np.pi, passband_ripple_db=1.0)
    z, p, k = _analog_prototype(spec)
    z, p, k = _lp_to_lp(z, p, k, 2.0 * np.tan(spec.cutoff / 2.0))
    zd, pd, kd = _bilinear_zpk(z, p, k)
    for omega_a in rng.uniform(0.05, 8.0, 12):
        s = 1j * omega_a
        h_analog = k * np.prod(s - z) / np.prod(s - p)
        w = 2.0 * np.arctan(omega_a / 2.0)
        zz = np.exp(1j * w)
        h_digital = kd * np.prod(zz - zd) / np.prod(zz - pd)
        assert abs(abs(h_analog) - abs(h_digital)) < 1e-9 * max(1.0, abs(h_analog))


def test_lp_to_hp_transform_is_involutive_on_magnitude():
    spec = IirSpec("butterworth", "lowpass", 4, 0.5 * np.pi)
    z, p, k = _analog_prototype(spec)
    omega = 2.0
    zh, ph, kh = _lp_to_hp(z, p, k, omega)
    s = 1j * 1.7
    h_hp = kh * np.prod(s - zh) / np.prod(s - ph)
    s_lp = omega / s
    h_lp = k * np.prod(s_lp - z) / np.prod(s_lp - p) if len(z) else k / np.prod(s_lp - p)
    assert abs(h_hp - h_lp) < 1e-9 * max(1.0, abs(h_lp))


def test_iir_validation():
    with pytest.raises(InvalidSpec):
        design_iir(IirSpec("bessel", "lowpass", 2, 1.0))
    with pytest.raises(InvalidSpec):
        design_iir(IirSpec("butterworth", "bandpass", 2, 1.0))
    with pytest.raises(InvalidSpec):
        design_iir(IirSpec("butterworth", "lowpass", 0, 1.0))
    with pytest.raises(InvalidSpec):
        design_iir(IirSpec("butterworth", "lowpass", 2, 3.2))
    with pytest.raises(InvalidSpec):
        design_iir(IirSpec("chebyshev1", "lowpass", 2, 1.0))  # ripple missing
    with pytest.raises(InvalidSpec):
        design_iir(IirSpec("elliptic", "lowpass", 2, 1.0,
                           passband_ripple_db=2.0, stopband_atten_db=1.0))
