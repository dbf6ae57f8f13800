import numpy as np
import pytest

from jdsp.errors import CorruptHeader, InvalidSpec, LengthMismatch, OutOfRange, UnsupportedFormat
from jdsp.signals import (
    GeneratorSpec,
    Signal,
    export_series_csv,
    generate_signal,
    read_wav,
    write_wav,
)
from jdsp.spectral import WindowSpec, periodogram


def test_impulse_definition():
    s = generate_signal(GeneratorSpec(kind="impulse", length=4, amplitude=1.0))
    assert np.array_equal(s.samples, [1, 0, 0, 0])


def test_sine_quarter_period():
    s = generate_signal(GeneratorSpec(kind="sine", freq_hz=2000, length=4,
                                      sample_rate_hz=8000, amplitude=1.0))
    assert np.allclose(s.samples, [0, 1, 0, -1], atol=1e-12)


def test_step_and_square_and_triangle():
    assert np.array_equal(
        generate_signal(GeneratorSpec(kind="step", length=3, amplitude=2.0)).samples,
        [2, 2, 2])
    sq = generate_signal(GeneratorSpec(kind="square", freq_hz=1000, length=8,
                                       sample_rate_hz=8000))
    assert set(np.unique(sq.samples)) <= {-1.0, 1.0}
    tri = generate_signal(GeneratorSpec(kind="triangle", freq_hz=1000, length=9,
                                        sample_rate_hz=8000))
    assert np.max(np.abs(tri.samples)) <= 1.0 + 1e-12


def test_dtmf_digit_5_tones_dominate_periodogram():
    s = generate_signal(GeneratorSpec(kind="dtmf", dtmf_digit="5", length=2048,
                                      sample_rate_hz=8000))
    p = periodogram(s, WindowSpec("rectangular", 2048), 2048)
    top = np.argsort(p)[-2:]
    freqs = sorted(k * 8000.0 / 2048 for k in top)
    assert abs(freqs[0] - 770.0) <= 8000.0 / 2048
    assert abs(freqs[1] - 1336.0) <= 8000.0 / 2048


def test_generated_length_always_matches_spec():
    for kind in ("sine", "square", "triangle", "impulse", "step", "white_noise", "dtmf"):
        s = generate_signal(GeneratorSpec(kind=kind, freq_hz=500, length=37,
                                          sample_rate_hz=8000))
        assert len(s) == 37


def test_white_noise_seeding():
    a = generate_signal(GeneratorSpec(kind="white_noise", length=64, seed=9))
    b = generate_signal(GeneratorSpec(kind="white_noise", length=64, seed=9))
    c = generate_signal(GeneratorSpec(kind="white_noise", length=64, seed=10))
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)
    assert np.max(np.abs(a.samples)) <= 1.0


def test_generator_invalid_specs():
    with pytest.raises(InvalidSpec):
        generate_signal(GeneratorSpec(kind="sine", freq_hz=5000, sample_rate_hz=8000))
    with pytest.raises(InvalidSpec):
        generate_signal(GeneratorSpec(kind="sine", length=0))
    with pytest.raises(InvalidSpec):
        generate_signal(GeneratorSpec(kind="nope"))


# --- WAV ---------------------------------------------------------------------

def _pcm_wav(samples_i16, rate=8000, channels=1, bits=16, fmt=1):
    import struct

    payload = b"".join(struct.pack("<h", v) for v in samples_i16)
    hdr = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    hdr += b"fmt " + struct.pack("<IHHIIHH", 16, fmt, channels, rate,
                                 rate * channels * bits // 8, channels * bits // 8, bits)
    hdr += b"data" + struct.pack("<I", len(payload))
    return hdr + payload


def test_read_wav_scaling():
    s = read_wav(_pcm_wav([0, 16384, -16384]))
    assert np.allclose(s.samples, [0.0, 0.5, -0.5])
    assert s.sample_rate_hz == 8000


def test_read_wav_rejects_stereo_and_other_formats():
    with pytest.raises(UnsupportedFormat):
        read_wav(_pcm_wav([0, 0], channels=2))
    with pytest.raises(UnsupportedFormat):
        read_wav(_pcm_wav([0], fmt=3))
    with pytest.raises(CorruptHeader):
        read_wav(b"RIFFxxxxNOPE")
    with pytest.raises(CorruptHeader):
        read_wav(_pcm_wav([1, 2, 3])[:-2])  # truncated data chunk


def test_wav_round_trip_stable():
    rng = np.random.default_rng(0)
    x = Signal(rng.uniform(-1, 1, 300), 16000)
    once = read_wav(write_wav(x))
    twice = read_wav(write_wav(once))
    assert np.array_equal(once.samples, twice.samples)
    assert np.max(np.abs(x.samples - once.samples)) <= 1.0 / 32768


def test_write_wav_rounding_and_clamp():
    data = write_wav(Signal([0.0], 8000))
    assert data[-2:] == b"\x00\x00"
    full = write_wav(Signal([1.0, -1.0], 8000))
    vals = np.frombuffer(full[-4:], dtype="<i2")
    assert list(vals) == [32767, -32767]
    with pytest.raises(OutOfRange):
        write_wav(Signal([1.1], 8000))


# --- CSV ----------------------------------------------------------------------

def test_export_series_csv_example():
    assert export_series_csv("x", [0, 1], [("y", [2, 3])]) == "x,y\n0,2\n1,3"


def test_export_series_csv_header_only_and_mismatch():
    assert export_series_csv("x", [], [("y", [])]) == "x,y"
    with pytest.raises(LengthMismatch):
        export_series_csv("x", [0, 1], [("y", [2])])


def test_export_series_csv_round_trips_doubles():
    rng = np.random.default_rng(1)
    x = rng.normal(size=20)
    y = rng.normal(size=20)
    text = export_series_csv("t", x, [("v", y)])
    rows = [line.split(",") for line in text.splitlines()[1:]]
    assert np.array_equal(np.array([float(r[0]) for r in rows]), x)
    assert np.array_equal(np.array([float(r[1]) for r in rows]), y)
