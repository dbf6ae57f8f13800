"""FIR design (Kaiser window, frequency sampling, equiripple Remez exchange)
and IIR design (Butterworth, Chebyshev I/II, elliptic analog prototypes with
prewarped bilinear transform).

All digital frequencies are in radians/sample on (0, pi). FIR designs return
type-I linear phase filters (odd length, symmetric b, a = [1]).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec, NoConvergence, NumericalFailure
from .filters import TransferFunction, expand_roots

IIR_FAMILIES = ("butterworth", "chebyshev1", "chebyshev2", "elliptic")


@dataclass
class FirSpec:
    passband_edge: float
    stopband_edge: float
    stopband_atten_db: float
    kind: str = "lowpass"


@dataclass
class KaiserParams:
    beta: float
    order: int  # M; taps = M + 1


@dataclass
class EquirippleSpec:
    numtaps: int
    bands: list          # [(lo, hi), ...] disjoint ascending in [0, pi]
    desired: list        # one target per band
    weight: list = None  # one positive weight per band; default all 1

    def __post_init__(self):
        if self.weight is None:
            self.weight = [1.0] * len(self.bands)


@dataclass
class EquirippleResult:
    tf: TransferFunction
    delta: float           # achieved weighted ripple
    extrema: np.ndarray    # final extremal frequencies
    iterations: int = 0


@dataclass
class IirSpec:
    family: str
    kind: str = "lowpass"
    order: int = 4
    cutoff: float = np.pi / 2
    passband_ripple_db: float = None
    stopband_atten_db: float = None


# --- Kaiser window FIR -------------------------------------------------------

def bessel_i0(x: float) -> float:
    """Modified Bessel I0 by its power series, terminated at term/sum < 1e-14."""
    x = float(x)
    if not abs(x) <= 100.0:
        raise InvalidSpec(f"|x| must be <= 100, got {x}")
    half_sq = (x / 2.0) ** 2
    term = 1.0
    total = 1.0
    k = 1
    while term / total > 1e-14:
        term *= half_sq / (k * k)
        total += term
        k += 1
    return total


def kaiser_params(atten_db: float, transition_width: float) -> KaiserParams:
    """Empirical Kaiser beta and order for a stopband attenuation A (dB) and
    transition width (rad/sample). The order is forced even so the tap count
    M + 1 is odd (type I)."""
    if not 0.0 < transition_width < np.pi:
        raise InvalidSpec(f"transition width must be in (0, pi), got {transition_width}")
    if atten_db < 0:
        raise InvalidSpec(f"attenuation must be >= 0 dB, got {atten_db}")
    a = float(atten_db)
    if a > 50.0:
        beta = 0.1102 * (a - 8.7)
    elif a >= 21.0:
        beta = 0.5842 * (a - 21.0) ** 0.4 + 0.07886 * (a - 21.0)
    else:
        beta = 0.0
    m = math.ceil((a - 7.95) / (2.285 * transition_width))
    m = max(m, 2)
    if m % 2:
        m += 1
    return KaiserParams(beta=beta, order=m)


def _kaiser_window(m: int, beta: float) -> np.ndarray:
    i0b = bessel_i0(beta)
    n = np.arange(m + 1, dtype=np.float64)
    t = 2.0 * n / m - 1.0
    return np.array([bessel_i0(beta * math.sqrt(max(0.0, 1.0 - ti * ti))) for ti in t]) / i0b


def design_fir_kaiser(spec: FirSpec) -> TransferFunction:
    """Windowed-sinc design: ideal lowpass at the mid-transition cutoff times
    a Kaiser window; highpass by spectral inversion of the lowpass."""
    wp, ws = float(spec.passband_edge), float(spec.stopband_edge)
    if spec.kind not in ("lowpass", "highpass"):
        raise InvalidSpec(f"kind must be lowpass or highpass, got '{spec.kind}'")
    for w in (wp, ws):
        if not 0.0 < w < np.pi:
            raise InvalidSpec(f"band edge {w} outside (0, pi)")
    if spec.kind == "lowpass" and not wp < ws:
        raise InvalidSpec("lowpass needs passband_edge < stopband_edge")
    if spec.kind == "highpass" and not ws < wp:
        raise InvalidSpec("highpass needs stopband_edge < passband_edge")

    params = kaiser_params(spec.stopband_atten_db, abs(ws - wp))
    m = params.order
    wc = (wp + ws) / 2.0
    n = np.arange(m + 1) - m // 2
    h = np.where(n == 0, wc / np.pi, np.sin(wc * n) / (np.pi * np.where(n == 0, 1, n)))
    b = h * _kaiser_window(m, params.beta)
    if spec.kind == "highpass":
        b = -b
        b[m // 2] += 1.0
    return TransferFunction(b, [1.0])


# --- frequency sampling FIR ---------------------------------------------------

def design_fir_freq_sampling(desired_mag) -> TransferFunction:
    """Type-I linear phase filter that interpolates the given magnitudes at
    the N uniform DFT frequencies. Entries above (N-1)/2 are regenerated by
    mirroring the lower half."""
    d = np.atleast_1d(np.asarray(desired_mag, dtype=np.float64))
    n = d.size
    if n < 1 or n % 2 == 0:
        raise InvalidSpec(f"length must be odd and >= 1, got {n}")
    half = (n - 1) // 2
    if (d[: half + 1] < 0).any():
        raise InvalidSpec("desired magnitudes must be >= 0")

    freq_samples = np.zeros(n, dtype=np.complex128)
    for k in range(half + 1):
        freq_samples[k] = d[k] * np.exp(-1j * np.pi * k * (n - 1) / n)
    for k in range(half + 1, n):
        freq_samples[k] = np.conj(freq_samples[n - k])

    # direct IDFT; taps counts are small so O(N^2) is fine
    j = np.arange(n)
    kernel = np.exp(2j * np.pi * np.outer(j, j) / n)
    h = kernel @ freq_samples / n
    if np.max(np.abs(h.imag)) >= 1e-10:
        raise NumericalFailure("inverse DFT left a non-negligible imaginary part")
    return TransferFunction(h.real, [1.0])


# --- Parks-McClellan equiripple FIR --------------------------------------------

_REMEZ_MAX_ITER = 40
_REMEZ_GRID_DENSITY = 16


def design_fir_equiripple(spec: EquirippleSpec) -> EquirippleResult:
    """Remez exchange for type-I lowpass/highpass/multiband targets.

    Works on the cosine abscissa x = cos(omega) with barycentric Lagrange
    interpolation over r+1 extremal points, r = (numtaps-1)/2 + 1. Each pass
    solves for the ripple delta, rebuilds the weighted error on a dense grid
    (16 points per tap), and exchanges extrema until the relative change of
    delta drops below 1e-6.
    """
    numtaps = int(spec.numtaps)
    if numtaps < 3 or numtaps % 2 == 0:
        raise InvalidSpec(f"numtaps must be odd and >= 3, got {numtaps}")
    bands = [(float(lo), float(hi)) for lo, hi in spec.bands]
    if not bands:
        raise InvalidSpec("at least one band required")
    last_hi = -1.0
    for lo, hi in bands:
        if not (0.0 <= lo <= hi <= np.pi):
            raise InvalidSpec(f"band ({lo}, {hi}) outside [0, pi]")
        if lo < last_hi:
            raise InvalidSpec("bands must be disjoint and ascending")
        last_hi = hi
    if len(spec.desired) != len(bands) or len(spec.weight) != len(bands):
        raise InvalidSpec("desired and weight must have one entry per band")
    if any(w <= 0 for w in spec.weight):
        raise InvalidSpec("weights must be positive")
    total_width = sum(hi - lo for lo, hi in bands)
    if total_width <= 0:
        raise InvalidSpec("total band measure must be positive")

    half = (numtaps - 1) // 2
    r = half + 1                      # cosine-polynomial coefficients
    n_ext = r + 1                     # extremal points

    # dense grid over the band union, band edges included
    grid_total = max(_REMEZ_GRID_DENSITY * numtaps, 4 * n_ext)
    omega_grid, desired_grid, weight_grid, band_starts = [], [], [], []
    for (lo, hi), des, wgt in zip(bands, spec.desired, spec.weight):
        npts = max(2, int(round(grid_total * (hi - lo) / total_width)))
        seg = np.linspace(lo, hi, npts)
        band_starts.append(len(omega_grid))
        omega_grid.extend(seg)
        desired_grid.extend([float(des)] * npts)
        weight_grid.extend([float(wgt)] * npts)
    omega_grid = np.asarray(omega_grid)
    desired_grid = np.asarray(desired_grid)
    weight_grid = np.asarray(weight_grid)
    band_starts.append(len(omega_grid))
    grid_n = len(omega_grid)
    if grid_n < n_ext:
        raise InvalidSpec("bands too narrow for the requested tap count")

    x_grid = np.cos(omega_grid)
    ext = np.unique(np.round(np.linspace(0, grid_n - 1, n_ext)).astype(int))
    while ext.size < n_ext:  # collisions only on degenerate grids
        missing = np.setdiff1d(np.arange(grid_n), ext)
        ext = np.sort(np.concatenate([ext, missing[: n_ext - ext.size]]))

    delta_signed = 0.0
    prev_delta = None
    iterations = 0
    err_grid = np.zeros(grid_n)
    for iterations in range(1, _REMEZ_MAX_ITER + 1):
        xe = x_grid[ext]
        de = desired_grid[ext]
        we = weight_grid[ext]
        gamma = _barycentric_weights(xe)
        signs = np.where(np.arange(n_ext) % 2 == 0, 1.0, -1.0)
        denom = np.sum(gamma * signs / we)
        if denom == 0.0:
            raise NumericalFailure("degenerate extremal set in Remez exchange")
        delta_signed = np.sum(gamma * de) / denom
        y = de - signs * delta_signed / we

        p_grid = _barycentric_eval(xe, y, gamma, x_grid)
        err_grid = weight_grid * (desired_grid - p_grid)

        max_err = float(np.max(np.abs(err_grid)))
        scale = 1.0 + float(np.max(np.abs(desired_grid)))
        if max_err <= 1e-12 * scale:
            break  # target met exactly (e.g. achievable all-pass)

        new_ext = _select_extrema(err_grid, band_starts, n_ext)
        if new_ext is None:
            raise NoConvergence(
                "Remez exchange lost alternation",
                diagnostics={"iteration": iterations, "delta": float(delta_signed)},
            )
        moved = not np.array_equal(new_ext, ext)
        ext = new_ext
        if prev_delta is not None:
            rel = abs(abs(delta_signed) - prev_delta) / max(abs(delta_signed), 1e-300)
            if rel < 1e-6 or not moved:
                break
        prev_delta = abs(delta_signed)
    else:
        raise NoConvergence(
            f"Remez exchange did not settle in {_REMEZ_MAX_ITER} iterations",
            diagnostics={"delta": float(delta_signed)},
        )

    # final coefficients: sample the cosine polynomial at the N DFT frequencies
    xe = x_grid[ext]
    de = desired_grid[ext]
    we = weight_grid[ext]
    gamma = _barycentric_weights(xe)
    signs = np.where(np.arange(n_ext) % 2 == 0, 1.0, -1.0)
    y = de - signs * delta_signed / we
    omega_s = 2.0 * np.pi * np.arange(half + 1) / numtaps
    amp = _barycentric_eval(xe, y, gamma, np.cos(omega_s))
    b = np.zeros(numtaps)
    for i in range(numtaps):
        acc = amp[0]
        acc += 2.0 * np.sum(amp[1:] * np.cos(omega_s[1:] * (i - half)))
        b[i] = acc / numtaps
    b = (b + b[::-1]) / 2.0  # kill rounding asymmetry

    return EquirippleResult(
        tf=TransferFunction(b, [1.0]),
        delta=abs(float(delta_signed)),
        extrema=omega_grid[ext].copy(),
        iterations=iterations,
    )


def _barycentric_weights(x: np.ndarray) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def _barycentric_eval(nodes, values, gamma, x):
    num = np.zeros(len(x))
    den = np.zeros(len(x))
    exact = np.full(len(x), -1, dtype=int)
    for k in range(len(nodes)):
        d = x - nodes[k]
        hit = d == 0.0
        exact[hit] = k
        d[hit] = 1.0
        c = gamma[k] / d
        num += c * values[k]
        den += c
    out = num / den
    hits = exact >= 0
    out[hits] = values[exact[hits]]
    return out


def _select_extrema(err: np.ndarray, band_starts, n_ext: int):
    """Local maxima of |err| per band segment, alternation enforced by keeping
    the larger of same-sign neighbours, then trimmed to n_ext from the ends."""
    cand = []
    for b in range(len(band_starts) - 1):
        lo, hi = band_starts[b], band_starts[b + 1]
        seg = np.abs(err[lo:hi])
        for i in range(hi - lo):
            left_ok = i == 0 or seg[i] > seg[i - 1]
            right_ok = i == hi - lo - 1 or seg[i] >= seg[i + 1]
            if left_ok and right_ok and seg[i] > 0:
                cand.append(lo + i)
    if not cand:
        return None

    filtered = []
    for c in cand:
        if filtered and np.sign(err[c]) == np.sign(err[filtered[-1]]):
            if abs(err[c]) > abs(err[filtered[-1]]):
                filtered[-1] = c
        else:
            filtered.append(c)
    while len(filtered) > n_ext:
        if abs(err[filtered[0]]) < abs(err[filtered[-1]]):
            filtered.pop(0)
        else:
            filtered.pop()
    if len(filtered) < n_ext:
        return None
    return np.asarray(filtered, dtype=int)


# --- IIR: analog prototypes + bilinear transform ---------------------------------

def design_iir(spec: IirSpec) -> TransferFunction:
    """Classic analog-prototype IIR design.

    Unit-cutoff analog lowpass prototype -> frequency scale to the prewarped
    cutoff Omega = 2 tan(omega_c/2) (highpass via s -> Omega/s) -> bilinear
    transform s = 2(1 - z^-1)/(1 + z^-1) -> gain normalized at DC (lowpass)
    or Nyquist (highpass): 1 for Butterworth/Chebyshev II, the passband crest
    for Chebyshev I/elliptic.
    """
    _validate_iir_spec(spec)
    z, p, k = _analog_prototype(spec)

    omega_big = 2.0 * math.tan(spec.cutoff / 2.0)
    if spec.kind == "lowpass":
        z, p, k = _lp_to_lp(z, p, k, omega_big)
    else:
        z, p, k = _lp_to_hp(z, p, k, omega_big)

    zd, pd, kd = _bilinear_zpk(z, p, k)
    b = expand_roots(zd, kd) if len(zd) else np.array([kd])
    a = expand_roots(pd, 1.0)
    tf = TransferFunction(b, a)

    # snap the reference gain exactly onto the family convention
    ref = 1.0 if spec.kind == "lowpass" else -1.0
    h_ref = abs(np.polyval(tf.b[::-1], ref) / np.polyval(tf.a[::-1], ref))
    target = _reference_gain(spec)
    if h_ref <= 0 or not np.isfinite(h_ref):
        raise NumericalFailure("degenerate reference gain in IIR design")
    return TransferFunction(tf.b * (target / h_ref), tf.a)


def _validate_iir_spec(spec: IirSpec):
    if spec.family not in IIR_FAMILIES:
        raise InvalidSpec(f"unknown family '{spec.family}'")
    if spec.kind not in ("lowpass", "highpass"):
        raise InvalidSpec(f"kind must be lowpass or highpass, got '{spec.kind}'")
    if int(spec.order) < 1:
        raise InvalidSpec(f"order must be >= 1, got {spec.order}")
    if not 0.0 < spec.cutoff < np.pi:
        raise InvalidSpec(f"cutoff must be in (0, pi), got {spec.cutoff}")
    if spec.family in ("chebyshev1", "elliptic"):
        if spec.passband_ripple_db is None or spec.passband_ripple_db <= 0:
            raise InvalidSpec(f"{spec.family} requires passband_ripple_db > 0")
    if spec.family in ("chebyshev2", "elliptic"):
        if spec.stopband_atten_db is None or spec.stopband_atten_db <= 0:
            raise InvalidSpec(f"{spec.family} requires stopband_atten_db > 0")
    if spec.family == "elliptic" and spec.stopband_atten_db <= spec.passband_ripple_db:
        raise InvalidSpec("elliptic requires stopband_atten_db > passband_ripple_db")


def _reference_gain(spec: IirSpec) -> float:
    if spec.family in ("butterworth", "chebyshev2"):
        return 1.0
    if spec.order % 2:
        return 1.0
    return 10.0 ** (-spec.passband_ripple_db / 20.0)


def _analog_prototype(spec: IirSpec):
    n = int(spec.order)
    if spec.family == "butterworth":
        poles = np.array([cmath.exp(1j * math.pi * (2 * k + n - 1) / (2 * n))
                          for k in range(1, n + 1)])
        zeros = np.zeros(0, dtype=complex)
        gain = float(np.real(np.prod(-poles)))
        return zeros, poles, gain

    if spec.family == "chebyshev1":
        eps = math.sqrt(10.0 ** (spec.passband_ripple_db / 10.0) - 1.0)
        mu = math.asinh(1.0 / eps) / n
        theta = np.pi * (2 * np.arange(1, n + 1) - 1) / (2 * n)
        poles = -math.sinh(mu) * np.sin(theta) + 1j * math.cosh(mu) * np.cos(theta)
        zeros = np.zeros(0, dtype=complex)
        gain = float(np.real(np.prod(-poles)))
        if n % 2 == 0:
            gain /= math.sqrt(1.0 + eps * eps)
        return zeros, poles, gain

    if spec.family == "chebyshev2":
        # inverse Chebyshev; cutoff is the stopband edge frequency
        de = 1.0 / math.sqrt(10.0 ** (spec.stopband_atten_db / 10.0) - 1.0)
        mu = math.asinh(1.0 / de) / n
        theta = np.pi * (2 * np.arange(1, n + 1) - 1) / (2 * n)
        base = -math.sinh(mu) * np.sin(theta) + 1j * math.cosh(mu) * np.cos(theta)
        poles = 1.0 / base
        cos_t = np.cos(theta)
        zeros = np.array([1j / c for c in cos_t if abs(c) > 1e-12])
        gain = float(np.real(np.prod(-poles) / np.prod(-zeros)))
        return zeros, poles, gain

    return _elliptic_prototype(n, spec.passband_ripple_db, spec.stopband_atten_db)


# Jacobi elliptic machinery via descending Landen recursions. Arguments u are
# in units of the complete integral K(k), i.e. sne(u, k) = sn(u K(k), k).

_LANDEN_TOL = 1e-14


def _landen(k: float) -> list:
    seq = []
    while k > _LANDEN_TOL:
        k = (k / (1.0 + math.sqrt(1.0 - k * k))) ** 2
        seq.append(k)
        if len(seq) > 200:
            raise NumericalFailure("Landen recursion failed to converge")
    return seq


def _ellipk(k: float) -> float:
    if not 0.0 <= k < 1.0:
        raise NumericalFailure(f"elliptic modulus {k} outside [0, 1)")
    prod = 1.0
    for ki in _landen(k):
        prod *= 1.0 + ki
    return prod * math.pi / 2.0


def _cde(u: complex, k: float) -> complex:
    w = cmath.cos(u * math.pi / 2.0)
    for ki in reversed(_landen(k)):
        w = (1.0 + ki) * w / (1.0 + ki * w * w)
    return w


def _sne(u: complex, k: float) -> complex:
    w = cmath.sin(u * math.pi / 2.0)
    for ki in reversed(_landen(k)):
        w = (1.0 + ki) * w / (1.0 + ki * w * w)
    return w


def _asne(w: complex, k: float) -> complex:
    v_prev = k
    for ki in _landen(k):
        w = 2.0 * w / ((1.0 + ki) * (1.0 + cmath.sqrt(1.0 - v_prev * v_prev * w * w)))
        v_prev = ki
    return 2.0 / math.pi * cmath.asin(w)


def _ellipdeg(n: int, k1: float) -> float:
    """Solve the degree equation n = K K1' / (K' K1) for the selectivity k."""
    k1p = math.sqrt(1.0 - k1 * k1)
    prod = 1.0
    for i in range(1, n // 2 + 1):
        u = (2.0 * i - 1.0) / n
        prod *= abs(_sne(u, k1p))
    kp = (k1p ** n) * prod ** 4
    if not 0.0 < kp < 1.0:
        raise NumericalFailure(f"elliptic degree equation out of range (kp={kp})")
    return math.sqrt(1.0 - kp * kp)


def _elliptic_prototype(n: int, rp: float, rs: float):
    eps_p = math.sqrt(10.0 ** (rp / 10.0) - 1.0)
    eps_s = math.sqrt(10.0 ** (rs / 10.0) - 1.0)
    k1 = eps_p / eps_s
    k = _ellipdeg(n, k1)

    v0 = -1j * _asne(1j / eps_p, k1) / n
    zeros = []
    poles = []
    for i in range(1, n // 2 + 1):
        u = (2.0 * i - 1.0) / n
        zeta = _cde(u, k).real
        z = 1j / (k * zeta)
        zeros.extend([z, z.conjugate()])
        p = 1j * _cde(u - 1j * v0, k)
        poles.extend([p, p.conjugate()])
    if n % 2:
        p0 = 1j * _sne(1j * v0, k)
        poles.append(complex(p0.real, 0.0))

    poles = np.asarray(poles, dtype=complex)
    zeros = np.asarray(zeros, dtype=complex)
    if (poles.real >= 0).any() or not np.isfinite(poles).all():
        raise NumericalFailure("elliptic prototype produced unstable poles")
    gain = np.prod(-poles) / np.prod(-zeros) if len(zeros) else np.prod(-poles)
    gain = float(np.real(gain))
    if n % 2 == 0:
        gain /= math.sqrt(1.0 + eps_p * eps_p)
    return zeros, poles, gain


def _lp_to_lp(z, p, k, omega):
    kz = omega ** (len(p) - len(z))
    return z * omega, p * omega, k * kz


def _lp_to_hp(z, p, k, omega):
    degree = len(p) - len(z)
    k_new = k * float(np.real(np.prod(-z) / np.prod(-p))) if len(z) else \
        k * float(np.real(1.0 / np.prod(-p)))
    z_new = np.concatenate([omega / z, np.zeros(degree, dtype=complex)]) if len(z) \
        else np.zeros(degree, dtype=complex)
    p_new = omega / p
    return z_new, p_new, k_new


def _bilinear_zpk(z, p, k):
    """s = 2 (1 - z^-1)/(1 + z^-1); analog roots map through (2+s)/(2-s) and
    the numerator degree deficit becomes zeros at z = -1."""
    degree = len(p) - len(z)
    zd = (2.0 + z) / (2.0 - z)
    pd = (2.0 + p) / (2.0 - p)
    zd = np.concatenate([zd, -np.ones(degree, dtype=complex)])
    factor = np.prod(2.0 - z) / np.prod(2.0 - p)
    kd = k * factor
    if abs(kd.imag) > 1e-9 * max(1.0, abs(kd.real)):
        raise NumericalFailure("bilinear gain came out complex")
    return zd, pd, float(kd.real)
