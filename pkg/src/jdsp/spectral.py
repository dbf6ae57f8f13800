"""FFT and windows, periodogram, spectral peak picking, and multirate
operations (down/up-sampling, decimation/interpolation, 2-channel QMF bank)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyInput,
    InvalidFactor,
    InvalidLength,
    InvalidSpec,
    LengthMismatch,
    NotPowerOfTwo,
)
from .filters import TransferFunction, filter_signal
from .signals import Signal

WINDOW_KINDS = ("rectangular", "bartlett", "hann", "hamming", "blackman", "kaiser")


@dataclass
class Spectrum:
    """Complex DFT bins (power-of-two length) with the source sample rate."""

    bins: np.ndarray
    sample_rate_hz: float
    normalization: str = "unnormalized_dft"

    def __post_init__(self):
        self.bins = np.atleast_1d(np.asarray(self.bins, dtype=np.complex128))
        n = self.bins.size
        if n < 1 or n & (n - 1):
            raise NotPowerOfTwo(f"spectrum length {n} is not a power of two")

    def __len__(self) -> int:
        return len(self.bins)


@dataclass
class WindowSpec:
    kind: str = "rectangular"
    length: int = 0
    beta: float = 0.0  # kaiser only


@dataclass
class QmfBank:
    """Two-channel quadrature mirror bank built from the analysis lowpass h0.

    h1[n] = (-1)^n h0[n]; synthesis filters f0 = h0, f1 = -h1 cancel aliasing.
    """

    h0: np.ndarray

    def __post_init__(self):
        self.h0 = np.atleast_1d(np.asarray(self.h0, dtype=np.float64))
        if self.h0.size == 0:
            raise InvalidSpec("h0 must be non-empty")

    @property
    def h1(self) -> np.ndarray:
        signs = np.where(np.arange(self.h0.size) % 2 == 0, 1.0, -1.0)
        return self.h0 * signs

    @property
    def f0(self) -> np.ndarray:
        return self.h0.copy()

    @property
    def f1(self) -> np.ndarray:
        return -self.h1


HAAR_BANK = QmfBank(np.array([1.0, 1.0]) / np.sqrt(2.0))


def make_window(spec: WindowSpec) -> np.ndarray:
    """Symmetric window of the requested kind, denominator N-1; N=1 -> [1]."""
    n_len = spec.length
    if n_len < 1:
        raise InvalidSpec(f"window length must be >= 1, got {n_len}")
    if spec.kind not in WINDOW_KINDS:
        raise InvalidSpec(f"unknown window kind '{spec.kind}'")
    if n_len == 1:
        return np.ones(1)
    n = np.arange(n_len, dtype=np.float64)
    c = 2.0 * np.pi * n / (n_len - 1)
    if spec.kind == "rectangular":
        return np.ones(n_len)
    if spec.kind == "bartlett":
        return 1.0 - np.abs(2.0 * n / (n_len - 1) - 1.0)
    if spec.kind == "hann":
        return 0.5 - 0.5 * np.cos(c)
    if spec.kind == "hamming":
        return 0.54 - 0.46 * np.cos(c)
    if spec.kind == "blackman":
        return 0.42 - 0.5 * np.cos(c) + 0.08 * np.cos(2.0 * c)
    # kaiser
    from .design import bessel_i0

    if spec.beta < 0 or not np.isfinite(spec.beta):
        raise InvalidSpec("kaiser beta must be finite and >= 0")
    t = 2.0 * n / (n_len - 1) - 1.0
    return np.array([bessel_i0(spec.beta * np.sqrt(max(0.0, 1.0 - ti * ti)))
                     for ti in t]) / bessel_i0(spec.beta)


# --- FFT ---------------------------------------------------------------------

def fft(x, inverse: bool = False) -> np.ndarray:
    """Iterative radix-2 FFT with bit-reversal reordering.

    Forward is the unnormalized DFT X[k] = sum x[n] e^{-2pi i nk/N}; the
    inverse applies the 1/N factor. Length must be a power of two.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.complex128))
    n = x.size
    if n < 1 or n & (n - 1):
        raise NotPowerOfTwo(f"FFT length {n} is not a power of two")
    levels = n.bit_length() - 1
    out = x[_bit_reversal_indices(n)].copy() if n > 1 else x.copy()

    sign = 1.0 if inverse else -1.0
    size = 2
    while size <= n:
        half = size // 2
        tw = np.exp(sign * 2j * np.pi * np.arange(half) / size)
        blocks = out.reshape(-1, size)
        even = blocks[:, :half].copy()
        odd = blocks[:, half:] * tw
        blocks[:, :half] = even + odd
        blocks[:, half:] = even - odd
        size *= 2
    del levels
    if inverse:
        out /= n
    return out


def _bit_reversal_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def zero_pad(x, target_len: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x))
    if target_len < x.size:
        raise InvalidLength(f"target {target_len} shorter than input {x.size}")
    if target_len < 1 or target_len & (target_len - 1):
        raise InvalidLength(f"target {target_len} is not a power of two")
    if target_len == x.size:
        return x.copy()
    return np.concatenate([x, np.zeros(target_len - x.size, dtype=x.dtype)])


def next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def periodogram(x: Signal, window: WindowSpec, nfft: int) -> np.ndarray:
    """Windowed periodogram P[k] = |FFT(w x)[k]|^2 / (N U) for k = 0..nfft/2,
    with U the window power (1/N) sum w^2, so the white-noise level does not
    depend on the window choice."""
    n = len(x)
    if n < 1:
        raise InvalidSpec("empty signal")
    if nfft < n or nfft & (nfft - 1):
        raise InvalidSpec(f"nfft must be a power of two >= signal length, got {nfft}")
    if window.length != n:
        raise InvalidSpec(f"window length {window.length} != signal length {n}")
    w = make_window(window)
    u = float(np.mean(w * w))
    if u <= 0.0:
        raise InvalidSpec("window has zero power")
    spec = fft(zero_pad(x.samples * w, nfft))
    p = np.abs(spec[: nfft // 2 + 1]) ** 2 / (n * u)
    return p


def pick_peaks(mag, count: int) -> np.ndarray:
    """Indices of the ``count`` largest local maxima (plateaus count once, at
    their left edge; array ends count as maxima). If the array has fewer local
    maxima, the largest remaining bins fill in. Ascending order, no duplicates.
    """
    mag = np.atleast_1d(np.asarray(mag, dtype=np.float64))
    n = mag.size
    if n == 0:
        raise EmptyInput("empty magnitude array")
    if count < 1:
        raise InvalidSpec(f"count must be >= 1, got {count}")

    is_max = np.ones(n, dtype=bool)
    if n > 1:
        is_max[1:] &= mag[1:] > mag[:-1]       # strict rise kills plateau interiors
        is_max[:-1] &= mag[:-1] >= mag[1:]
    maxima = np.nonzero(is_max)[0]

    # sort by magnitude descending, ties to the lower index (stable on -mag)
    maxima = maxima[np.argsort(-mag[maxima], kind="stable")]
    chosen = list(maxima[:count])
    if len(chosen) < count:
        rest = np.setdiff1d(np.arange(n), maxima, assume_unique=False)
        rest = rest[np.argsort(-mag[rest], kind="stable")]
        chosen.extend(rest[: count - len(chosen)])
    return np.sort(np.asarray(chosen, dtype=np.int64))


# --- multirate ---------------------------------------------------------------

def downsample(x: Signal, m: int) -> Signal:
    """Keep every M-th sample (no anti-alias filter; aliasing is the point)."""
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidFactor(f"factor must be an integer >= 1, got {m}")
    return Signal(x.samples[::m].copy(), x.sample_rate_hz / m)


def decimate(x: Signal, m: int, atten_db: float = 60.0) -> Signal:
    """Anti-alias lowpass (Kaiser design, cutoff pi/M) then downsample."""
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidFactor(f"factor must be an integer >= 1, got {m}")
    if m == 1:
        return Signal(x.samples.copy(), x.sample_rate_hz)
    from .design import FirSpec, design_fir_kaiser

    tf = design_fir_kaiser(FirSpec(
        passband_edge=0.9 * np.pi / m,
        stopband_edge=1.1 * np.pi / m,
        stopband_atten_db=atten_db,
        kind="lowpass",
    ))
    return downsample(filter_signal(tf, x), m)


def upsample(x: Signal, l: int) -> Signal:
    """Zero insertion: y[Ln] = x[n], zeros elsewhere; length L * len(x)."""
    if not isinstance(l, (int, np.integer)) or l < 1:
        raise InvalidFactor(f"factor must be an integer >= 1, got {l}")
    y = np.zeros(len(x) * l)
    y[::l] = x.samples
    return Signal(y, x.sample_rate_hz * l)


def interpolate(x: Signal, l: int, atten_db: float = 60.0) -> Signal:
    """Upsample then anti-image lowpass (cutoff pi/L) with gain L."""
    up = upsample(x, l)
    if l == 1:
        return up
    from .design import FirSpec, design_fir_kaiser

    tf = design_fir_kaiser(FirSpec(
        passband_edge=0.9 * np.pi / l,
        stopband_edge=1.1 * np.pi / l,
        stopband_atten_db=atten_db,
        kind="lowpass",
    ))
    tf = TransferFunction(tf.b * l, tf.a)
    return filter_signal(tf, up)


# --- QMF bank ------------------------------------------------------------------

def qmf_analysis(bank: QmfBank, x: Signal) -> tuple[Signal, Signal]:
    low = downsample(filter_signal(TransferFunction(bank.h0, [1.0]), x), 2)
    high = downsample(filter_signal(TransferFunction(bank.h1, [1.0]), x), 2)
    return low, high


def qmf_synthesis(bank: QmfBank, low: Signal, high: Signal) -> Signal:
    if len(low) != len(high):
        raise LengthMismatch(f"subband lengths differ: {len(low)} vs {len(high)}")
    up_low = upsample(low, 2)
    up_high = upsample(high, 2)
    y0 = filter_signal(TransferFunction(bank.f0, [1.0]), up_low)
    y1 = filter_signal(TransferFunction(bank.f1, [1.0]), up_high)
    return Signal(y0.samples + y1.samples, y0.sample_rate_hz)


def spectrum_csv(spec: Spectrum) -> str:
    """CSV columns bin,freq_hz,re,im,mag,mag_db (dB floor at -400)."""
    n = len(spec)
    lines = ["bin,freq_hz,re,im,mag,mag_db"]
    for k in range(n):
        z = spec.bins[k]
        mag = abs(z)
        mag_db = 20.0 * np.log10(mag) if mag > 1e-20 else -400.0
        freq = k * spec.sample_rate_hz / n
        lines.append(",".join(format(float(v), ".17g")
                              for v in (k, freq, z.real, z.imag, mag, mag_db)))
    return "\n".join(lines)
