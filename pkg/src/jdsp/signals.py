"""Signal generation (sine/square/triangle/impulse/step/noise/DTMF), WAV
PCM16 ingestion and emission, and CSV export of plot series."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CorruptHeader,
    InvalidSpec,
    LengthMismatch,
    OutOfRange,
    UnsupportedFormat,
)

GENERATOR_KINDS = ("sine", "square", "triangle", "impulse", "step", "white_noise", "dtmf")

# Standard DTMF keypad: row tone + column tone per digit.
DTMF_ROW_HZ = {
    "1": 697, "2": 697, "3": 697, "A": 697,
    "4": 770, "5": 770, "6": 770, "B": 770,
    "7": 852, "8": 852, "9": 852, "C": 852,
    "*": 941, "0": 941, "#": 941, "D": 941,
}
DTMF_COL_HZ = {
    "1": 1209, "4": 1209, "7": 1209, "*": 1209,
    "2": 1336, "5": 1336, "8": 1336, "0": 1336,
    "3": 1477, "6": 1477, "9": 1477, "#": 1477,
    "A": 1633, "B": 1633, "C": 1633, "D": 1633,
}


@dataclass
class Signal:
    """Sampled time-domain data: samples plus their sample rate in Hz."""

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise InvalidSpec("signal samples must be one dimensional")
        self.sample_rate_hz = float(self.sample_rate_hz)
        if not self.sample_rate_hz > 0:
            raise InvalidSpec(f"sample rate must be > 0, got {self.sample_rate_hz}")

    def __len__(self) -> int:
        return len(self.samples)


@dataclass
class GeneratorSpec:
    kind: str = "sine"
    freq_hz: float = 1000.0
    amplitude: float = 1.0
    length: int = 256
    sample_rate_hz: float = 8000.0
    phase_rad: float = 0.0
    dtmf_digit: str = "5"
    seed: int = 0  # white_noise only


def generate_signal(spec: GeneratorSpec) -> Signal:
    """Synthesize one whole buffer according to the generator spec.

    Deterministic for all kinds except white_noise, which is seeded uniform
    in [-amplitude, +amplitude]. DTMF emits the keypad row and column tones
    at amplitude/2 each. Square and triangle are the ideal (non-band-limited)
    waveforms, so they alias on purpose.
    """
    if spec.kind not in GENERATOR_KINDS:
        raise InvalidSpec(f"unknown generator kind '{spec.kind}'")
    if spec.length < 1:
        raise InvalidSpec(f"length must be >= 1, got {spec.length}")
    fs = float(spec.sample_rate_hz)
    if not fs > 0:
        raise InvalidSpec("sample_rate_hz must be > 0")
    if not np.isfinite([spec.freq_hz, spec.amplitude, spec.phase_rad]).all():
        raise InvalidSpec("generator parameters must be finite")

    n = np.arange(spec.length, dtype=np.float64)
    amp = float(spec.amplitude)

    if spec.kind in ("sine", "square", "triangle"):
        if not 0.0 < spec.freq_hz < fs / 2:
            raise InvalidSpec(
                f"freq_hz must lie in (0, fs/2) = (0, {fs / 2}), got {spec.freq_hz}"
            )
        arg = 2.0 * np.pi * spec.freq_hz * n / fs + spec.phase_rad
        if spec.kind == "sine":
            samples = amp * np.sin(arg)
        elif spec.kind == "square":
            s = np.sin(arg)
            samples = np.where(s >= 0.0, amp, -amp)
        else:
            samples = amp * (2.0 / np.pi) * np.arcsin(np.sin(arg))
    elif spec.kind == "impulse":
        samples = np.zeros(spec.length)
        samples[0] = amp
    elif spec.kind == "step":
        samples = np.full(spec.length, amp)
    elif spec.kind == "white_noise":
        rng = np.random.default_rng(spec.seed)
        samples = rng.uniform(-amp, amp, size=spec.length)
    else:  # dtmf
        digit = str(spec.dtmf_digit).upper()
        if digit not in DTMF_ROW_HZ:
            raise InvalidSpec(f"unknown DTMF digit {spec.dtmf_digit!r}")
        f_row, f_col = DTMF_ROW_HZ[digit], DTMF_COL_HZ[digit]
        if f_col >= fs / 2:
            raise InvalidSpec(
                f"sample rate {fs} Hz too low for DTMF tones {f_row}/{f_col} Hz"
            )
        w = 2.0 * np.pi * n / fs
        samples = (amp / 2.0) * (np.sin(f_row * w) + np.sin(f_col * w))

    return Signal(samples, fs)


# --- WAV (RIFF little-endian, PCM16 mono only) -----------------------------

def read_wav(data: bytes) -> Signal:
    """Parse a 16-bit mono PCM WAV; samples scaled to [-1, 1) by 1/32768."""
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptHeader("not a RIFF/WAVE container")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + size]
        if len(body) < size:
            raise CorruptHeader(f"chunk {chunk_id!r} truncated")
        if chunk_id == b"fmt ":
            if size < 16:
                raise CorruptHeader("fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word aligned

    if fmt is None or payload is None:
        raise CorruptHeader("missing fmt or data chunk")
    audio_format, channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if audio_format != 1:
        raise UnsupportedFormat(f"only PCM supported, got format tag {audio_format}")
    if channels != 1:
        raise UnsupportedFormat(f"only mono supported, got {channels} channels")
    if bits != 16:
        raise UnsupportedFormat(f"only 16-bit supported, got {bits}")
    if sample_rate == 0:
        raise CorruptHeader("zero sample rate")
    if len(payload) % 2:
        raise CorruptHeader("data chunk has odd byte length")

    raw = np.frombuffer(payload, dtype="<i2")
    return Signal(raw.astype(np.float64) / 32768.0, float(sample_rate))


def write_wav(signal: Signal) -> bytes:
    """Emit 16-bit mono PCM. Rounds half away from zero, clamps at +-32767."""
    x = signal.samples
    if not np.isfinite(x).all():
        raise OutOfRange("samples must be finite")
    if len(x) and np.max(np.abs(x)) > 1.0 + 1e-9:
        raise OutOfRange(f"sample magnitude {np.max(np.abs(x))} exceeds 1")

    scaled = x * 32768.0
    q = np.where(scaled >= 0, np.floor(scaled + 0.5), np.ceil(scaled - 0.5))
    q = np.clip(q, -32767, 32767).astype("<i2")
    payload = q.tobytes()

    rate = int(round(signal.sample_rate_hz))
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16)
    header += b"data" + struct.pack("<I", len(payload))
    return header + payload


# --- CSV export -------------------------------------------------------------

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def export_series_csv(name: str, x, columns) -> str:
    """Render an x column plus named y columns as RFC-4180-style CSV text.

    ``name`` labels the x column. Numbers are written with %.17g so the file
    round-trips to the exact doubles. LF line endings, no trailing newline.
    """
    x = np.asarray(x, dtype=np.float64)
    cols = [(str(label), np.asarray(vals, dtype=np.float64)) for label, vals in columns]
    for label, vals in cols:
        if len(vals) != len(x):
            raise LengthMismatch(
                f"column '{label}' has {len(vals)} rows, x has {len(x)}"
            )
    lines = [",".join([name] + [label for label, _ in cols])]
    for i in range(len(x)):
        lines.append(",".join([_fmt(x[i])] + [_fmt(vals[i]) for _, vals in cols]))
    return "\n".join(lines)
