import numpy as np
import pytest

import jdsp.filters as filters
from jdsp.errors import DivisionNearZero, InvalidLength, NoConvergence, NonConjugateRoots
from jdsp.filters import (
    TransferFunction,
    expand_roots,
    filter_signal,
    find_roots,
    frequency_response,
    impulse_response,
    is_stable,
    pole_zero_set,
)
from jdsp.signals import Signal


def _sig(x, fs=1.0):
    return Signal(np.asarray(x, dtype=float), fs)


def _random_stable_tf(rng, max_order=10):
    n_pairs = int(rng.integers(0, max_order // 2 + 1))
    n_real = int(rng.integers(0, max_order - 2 * n_pairs + 1))
    poles = []
    for _ in range(n_pairs):
        r = rng.uniform(0.1, 0.9)
        th = rng.uniform(0.05, np.pi - 0.05)
        poles += [r * np.exp(1j * th), r * np.exp(-1j * th)]
    poles += [complex(rng.uniform(-0.9, 0.9)) for _ in range(n_real)]
    a = expand_roots(poles, 1.0) if poles else np.array([1.0])
    b = rng.normal(size=int(rng.integers(1, 6)))
    return TransferFunction(b, a)


def test_identity_filter():
    rng = np.random.default_rng(0)
    x = rng.normal(size=32)
    y = filter_signal(TransferFunction([1.0], [1.0]), _sig(x))
    assert np.array_equal(y.samples, x)


def test_fir_convolution():
    y = filter_signal(TransferFunction([1.0, 1.0], [1.0]), _sig([1, 0, 0]))
    assert np.array_equal(y.samples, [1, 1, 0])


def test_geometric_recursion():
    y = filter_signal(TransferFunction([1.0], [1.0, -0.5]), _sig([1, 0, 0, 0, 0]))
    assert np.allclose(y.samples, 0.5 ** np.arange(5), rtol=0, atol=1e-15)


def test_impulse_response_examples():
    h = impulse_response(TransferFunction([3.0, 2.0, 1.0], [1.0]), 6)
    assert np.array_equal(h.samples, [3, 2, 1, 0, 0, 0])
    h = impulse_response(TransferFunction([1.0], [1.0, -0.9]), 11)
    assert abs(h.samples[10] - 0.9 ** 10) < 1e-12
    assert np.array_equal(impulse_response(TransferFunction([5.0, 1.0], [1.0]), 1).samples, [5.0])
    with pytest.raises(InvalidLength):
        impulse_response(TransferFunction([1.0], [1.0]), 0)


def test_frequency_response_examples():
    fr = frequency_response(TransferFunction([0.5, 0.5], [1.0]), 64)
    assert abs(abs(fr.h[0]) - 1.0) < 1e-12
    assert abs(fr.h[-1]) < 1e-12
    fr = frequency_response(TransferFunction([1.0], [1.0]), 16)
    assert np.allclose(fr.h, 1.0)
    fr = frequency_response(TransferFunction([1.0], [1.0, -0.9]), 33)
    assert abs(abs(fr.h[0]) - 10.0) < 1e-9
    assert np.all(np.diff(fr.omega) > 0) and fr.omega[0] == 0 and abs(fr.omega[-1] - np.pi) < 1e-15


def test_frequency_response_pole_on_grid():
    with pytest.raises(DivisionNearZero):
        frequency_response(TransferFunction([1.0], [1.0, -1.0]), 8)  # pole at z = 1


def test_find_roots_examples():
    r = np.sort_complex(find_roots([1, -1.5, 0.56]))
    assert np.allclose(r, [0.7, 0.8], atol=1e-9)
    r = find_roots([1, 0, 1])
    assert np.allclose(np.sort(r.imag), [-1, 1], atol=1e-9)
    assert np.allclose(r.real, 0, atol=1e-9)
    assert np.allclose(find_roots([2, -1]), [0.5])


def test_find_roots_trailing_zeros_become_origin_roots():
    r = find_roots([1.0, -1.0, 0.0, 0.0])  # z^3 - z^2 = z^2 (z - 1)
    mags = np.sort(np.abs(r))
    assert np.allclose(mags, [0, 0, 1], atol=1e-9)


def test_find_roots_no_convergence_diagnostics(monkeypatch):
    monkeypatch.setattr(filters, "_MAX_ABERTH_ITER", 1)
    with pytest.raises(NoConvergence) as exc:
        find_roots([1.0, 0.3, -2.0, 0.5, 1.1, -0.7, 0.2])
    assert "residuals" in exc.value.diagnostics


def test_expand_roots_examples():
    assert np.allclose(expand_roots([0.5 + 0.5j, 0.5 - 0.5j], 1.0), [1, -1, 0.5])
    assert np.array_equal(expand_roots([], 2.0), [2.0])
    with pytest.raises(NonConjugateRoots):
        expand_roots([0.5 + 0.5j], 1.0)


def test_roots_round_trip_random_sets():
    rng = np.random.default_rng(42)
    for _ in range(25):
        n_pairs = int(rng.integers(0, 4))
        n_real = int(rng.integers(1, 13 - 2 * n_pairs))
        roots = []
        for _ in range(n_pairs):
            z = complex(rng.uniform(-2, 2), rng.uniform(0.05, 2))
            roots += [z, z.conjugate()]
        roots += [complex(rng.uniform(-2, 2)) for _ in range(n_real)]
        poly = expand_roots(roots, 1.0)
        found = find_roots(poly)
        missed = _set_distance(np.asarray(roots), found)
        assert missed < 1e-8


def _set_distance(expected, found):
    expected = list(expected)
    worst = 0.0
    for f in found:
        d = [abs(f - e) for e in expected]
        i = int(np.argmin(d))
        worst = max(worst, d[i])
        expected.pop(i)
    return worst


def test_is_stable_examples():
    stable, mag = is_stable(TransferFunction([1.0], [1.0, -0.9]))
    assert stable and abs(mag - 0.9) < 1e-9
    stable, mag = is_stable(TransferFunction([1.0], [1.0, -1.0]))
    assert not stable and abs(mag - 1.0) < 1e-9
    stable, mag = is_stable(TransferFunction([1.0, 2.0, 3.0], [1.0]))
    assert stable and mag == 0.0


def test_linearity_property():
    rng = np.random.default_rng(7)
    for _ in range(20):
        tf = _random_stable_tf(rng)
        x, y = rng.normal(size=64), rng.normal(size=64)
        alpha, beta = rng.normal(), rng.normal()
        lhs = filter_signal(tf, _sig(alpha * x + beta * y)).samples
        rhs = alpha * filter_signal(tf, _sig(x)).samples + beta * filter_signal(tf, _sig(y)).samples
        scale = max(np.max(np.abs(rhs)), 1e-30)
        assert np.max(np.abs(lhs - rhs)) / scale < 1e-10


def test_time_invariance_property():
    rng = np.random.default_rng(8)
    for _ in range(10):
        tf = _random_stable_tf(rng)
        length, shift = 96, int(rng.integers(1, 24))
        h = impulse_response(tf, length).samples
        shifted = np.zeros(length)
        shifted[shift] = 1.0
        y = filter_signal(tf, _sig(shifted)).samples
        scale = max(np.max(np.abs(h)), 1e-30)
        assert np.max(np.abs(y[shift:] - h[: length - shift])) / scale < 1e-10
        assert np.max(np.abs(y[:shift])) == 0.0


def test_fir_response_matches_zero_padded_dft():
    from jdsp.spectral import fft, zero_pad

    rng = np.random.default_rng(9)
    b = rng.normal(size=9)
    n = 256
    fr = frequency_response(TransferFunction(b, [1.0]), n // 2 + 1)
    dft = fft(zero_pad(b, n))[: n // 2 + 1]
    assert np.max(np.abs(fr.h - dft)) < 1e-10


def test_conjugate_pairing_of_random_real_polynomials():
    rng = np.random.default_rng(10)
    for _ in range(10):
        poly = rng.normal(size=int(rng.integers(3, 10)))
        roots = find_roots(poly)
        complex_part = np.sort_complex(roots[np.abs(roots.imag) > 0])
        paired = np.sort_complex(np.conj(complex_part))
        assert np.allclose(complex_part, paired, atol=1e-8)


def test_stable_impulse_response_decays_within_pole_envelope():
    rng = np.random.default_rng(11)
    for _ in range(20):
        tf = _random_stable_tf(rng)
        stable, max_pole = is_stable(tf)
        assert stable
        order = len(tf.a) - 1
        if order == 0:
            continue
        rho = max_pole + 1e-6
        start = 5 * order
        # horizon capped so rho**n stays far from underflow
        horizon = min(start + 4000, start + int(250 * np.log(10) / -np.log(rho)))
        h = impulse_response(tf, horizon).samples
        u = np.abs(h[start:]) / rho ** np.arange(start, horizon)
        assert np.isfinite(u).all()
        if np.max(u) > 0:
            # bounded by C * rho^n: the normalized sequence peaks early and
            # decays; a wrong envelope would put its maximum at the horizon
            assert int(np.argmax(u)) < 0.7 * len(u)


def test_pole_zero_set_degree_bookkeeping():
    pz = pole_zero_set(TransferFunction([1.0], [1.0, -0.5]))  # H = z/(z-0.5)
    assert len(pz.zeros) == 1 and abs(pz.zeros[0]) < 1e-12
    assert len(pz.poles) == 1 and abs(pz.poles[0] - 0.5) < 1e-9
    pz = pole_zero_set(TransferFunction([1.0, 0.0, -0.25], [1.0]))
    assert len(pz.poles) == 2 and np.allclose(np.abs(pz.poles), 0)
    assert np.allclose(np.sort(pz.zeros.real), [-0.5, 0.5], atol=1e-9)
