"""Linear prediction: autocorrelation, Levinson-Durbin, spectral envelope,
formant extraction from the prediction polynomial, framing, and the exact
residual-excited analysis-synthesis loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivisionNearZero, InvalidLag, InvalidSpec, SingularError
from .filters import TransferFunction, find_roots, frequency_response
from .signals import Signal
from .spectral import WindowSpec, make_window

# conventional speech-analysis gates for accepting a pole pair as a formant
MAX_FORMANT_BANDWIDTH_HZ = 500.0
FORMANT_GUARD_HZ = 90.0


@dataclass
class CorrelationSequence:
    r: np.ndarray  # lags 0..p

    def __post_init__(self):
        self.r = np.atleast_1d(np.asarray(self.r, dtype=np.float64))


@dataclass
class LpcModel:
    a: np.ndarray        # prediction polynomial A(z), a[0] = 1
    k: np.ndarray        # reflection coefficients
    prediction_error: float
    order: int

    def to_json_dict(self) -> dict:
        return {"a": [float(v) for v in self.a],
                "k": [float(v) for v in self.k],
                "error": float(self.prediction_error)}


@dataclass
class Formant:
    frequency_hz: float
    bandwidth_hz: float


@dataclass
class FrameSpec:
    frame_len: int
    hop: int
    window: WindowSpec = None

    def __post_init__(self):
        if self.window is None:
            self.window = WindowSpec("rectangular", self.frame_len)
        if not 1 <= self.hop <= self.frame_len:
            raise InvalidSpec(f"need 1 <= hop <= frame_len, got hop={self.hop}")
        if self.window.length != self.frame_len:
            raise InvalidSpec(
                f"window length {self.window.length} != frame_len {self.frame_len}"
            )


def autocorrelation(x, max_lag: int) -> CorrelationSequence:
    """Unnormalized biased-support autocorrelation r[m] = sum x[n] x[n+m]."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if not 0 <= max_lag < len(x):
        raise InvalidLag(f"need 0 <= max_lag < len(x)={len(x)}, got {max_lag}")
    full = np.correlate(x, x, mode="full")
    return CorrelationSequence(full[len(x) - 1: len(x) + max_lag])


def levinson_durbin(r, order: int) -> LpcModel:
    """Solve the Toeplitz normal equations by the Levinson-Durbin recursion.

    Returns A(z) with a[0] = 1 such that the residual is A(z) x, the
    reflection coefficients, and the final prediction error power.
    """
    if isinstance(r, CorrelationSequence):
        r = r.r
    r = np.atleast_1d(np.asarray(r, dtype=np.float64))
    if order < 0:
        raise InvalidLag(f"order must be >= 0, got {order}")
    if len(r) < order + 1:
        raise InvalidLag(f"need lags 0..{order}, got only {len(r)}")

    err = r[0]
    if err <= 1e-300:
        raise SingularError(f"r[0] = {r[0]} is not positive")
    w = np.zeros(order)  # predictor coefficients: x_hat[n] = sum w[j] x[n-1-j]
    k = np.zeros(order)
    for i in range(1, order + 1):
        acc = r[i] - np.dot(w[: i - 1], r[i - 1: 0: -1])
        ki = acc / err
        k[i - 1] = ki
        w_new = w.copy()
        w_new[i - 1] = ki
        w_new[: i - 1] = w[: i - 1] - ki * w[i - 2:: -1][: i - 1]
        w = w_new
        err *= 1.0 - ki * ki
        if err <= 1e-300:
            raise SingularError(f"prediction error vanished at order {i}")
    a = np.concatenate([[1.0], -w])
    return LpcModel(a=a, k=k, prediction_error=float(err), order=order)


def lpc_envelope(model: LpcModel, gain: float = None, n_points: int = 512) -> np.ndarray:
    """Vocal-tract envelope S(w) = g / |A(e^{jw})| on the [0, pi] grid.
    Defaults g to sqrt(prediction error)."""
    g = float(gain) if gain is not None else float(np.sqrt(model.prediction_error))
    if g <= 0:
        raise InvalidSpec(f"gain must be > 0, got {g}")
    fr = frequency_response(TransferFunction([g], model.a), n_points)
    return np.abs(fr.h)


def formants_from_lpc(model: LpcModel, sample_rate_hz: float) -> list[Formant]:
    """Resonances from the complex roots of A(z).

    Keeps upper-half-plane roots inside the unit circle, maps angle to Hz and
    radius to bandwidth -(fs/pi) ln|root|, then gates on bandwidth < 500 Hz
    and a 90 Hz guard band at both spectrum ends. Ascending by frequency.
    """
    fs = float(sample_rate_hz)
    roots = find_roots(model.a)
    formants = []
    for z in roots:
        if z.imag <= 0.0 or abs(z) >= 1.0 or abs(z) <= 0.0:
            continue
        freq = np.angle(z) * fs / (2.0 * np.pi)
        bw = -(fs / np.pi) * np.log(abs(z))
        if bw < MAX_FORMANT_BANDWIDTH_HZ and FORMANT_GUARD_HZ < freq < fs / 2 - FORMANT_GUARD_HZ:
            formants.append(Formant(float(freq), float(bw)))
    formants.sort(key=lambda f: f.frequency_hz)
    return formants


def frame_signal(x: Signal, spec: FrameSpec) -> list[np.ndarray]:
    """Windowed frames at 0, hop, 2 hop, ...; count floor((L-N)/hop) + 1."""
    if spec.frame_len > len(x):
        raise InvalidSpec(f"frame_len {spec.frame_len} exceeds signal length {len(x)}")
    w = make_window(spec.window)
    count = (len(x) - spec.frame_len) // spec.hop + 1
    return [x.samples[i * spec.hop: i * spec.hop + spec.frame_len] * w
            for i in range(count)]


def formant_track_csv(x: Signal, order: int, frames: FrameSpec,
                      max_formants: int = 3) -> str:
    """Per-frame formant table: frame_index,f1,b1,f2,b2,f3,b3 with empty
    cells where a frame yields fewer formants."""
    header = ["frame_index"]
    for i in range(1, max_formants + 1):
        header += [f"f{i}", f"b{i}"]
    lines = [",".join(header)]
    for index, frame in enumerate(frame_signal(x, frames)):
        cells = [str(index)]
        r = autocorrelation(frame, order)
        found = []
        if r.r[0] > 1e-300:
            model = levinson_durbin(r, order)
            found = formants_from_lpc(model, x.sample_rate_hz)
        for i in range(max_formants):
            if i < len(found):
                cells += [format(found[i].frequency_hz, ".17g"),
                          format(found[i].bandwidth_hz, ".17g")]
            else:
                cells += ["", ""]
        lines.append(",".join(cells))
    return "\n".join(lines)


def lpc_analysis_synthesis(x: Signal, order: int, frames: FrameSpec) -> tuple[Signal, Signal]:
    """Residual-excited LPC round trip over non-overlapping frames.

    Per frame, A(z) is fit to the windowed frame; the residual is the raw
    signal filtered by A(z) and synthesis re-runs 1/A(z) on that residual.
    History (raw input for analysis, reconstructed output for synthesis) is
    carried across frame boundaries, so the unquantized round trip is exact.
    Trailing samples past the last full frame reuse the last frame's model.
    """
    if frames.hop != frames.frame_len:
        raise InvalidSpec("analysis-synthesis requires non-overlapping frames (hop == frame_len)")
    if order < 0:
        raise InvalidSpec(f"order must be >= 0, got {order}")
    n = len(x)
    flen = frames.frame_len
    if flen > n:
        raise InvalidSpec(f"frame_len {flen} exceeds signal length {n}")

    window = make_window(frames.window)
    samples = x.samples
    n_frames = n // flen
    residual = np.zeros(n)
    recon = np.zeros(n)

    coeffs = np.array([1.0])
    for f in range(n_frames + 1):
        start = f * flen
        stop = min(start + flen, n)
        if stop <= start:
            break
        if f < n_frames and order > 0:
            frame = samples[start:stop] * window
            r = autocorrelation(frame, order)
            if r.r[0] > 1e-300:
                coeffs = levinson_durbin(r, order).a
            else:
                coeffs = np.array([1.0])  # silent frame: pass through
        # analysis: e[n] = sum_k a[k] x[n-k] over the raw signal
        for i in range(start, stop):
            acc = 0.0
            for kk in range(len(coeffs)):
                if i - kk >= 0:
                    acc += coeffs[kk] * samples[i - kk]
            residual[i] = acc
        # synthesis: x_hat[n] = e[n] - sum_{k>=1} a[k] x_hat[n-k]
        for i in range(start, stop):
            acc = residual[i]
            for kk in range(1, len(coeffs)):
                if i - kk >= 0:
                    acc -= coeffs[kk] * recon[i - kk]
            recon[i] = acc

    return Signal(recon, x.sample_rate_hz), Signal(residual, x.sample_rate_hz)
