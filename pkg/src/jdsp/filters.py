"""Rational digital filters: simulation, impulse/frequency responses,
polynomial root finding, and stability analysis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DivisionNearZero,
    InvalidLength,
    InvalidSpec,
    NoConvergence,
    NonConjugateRoots,
)
from .signals import Signal

STABILITY_MARGIN = 1e-9


@dataclass
class TransferFunction:
    """H(z) = B(z)/A(z) with b = [b0..bM], a = [1, a1..aN]."""

    b: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        self.b = np.atleast_1d(np.asarray(self.b, dtype=np.float64))
        self.a = np.atleast_1d(np.asarray(self.a, dtype=np.float64))
        if self.b.size == 0 or self.a.size == 0:
            raise InvalidSpec("b and a must be non-empty")
        if not (np.isfinite(self.b).all() and np.isfinite(self.a).all()):
            raise InvalidSpec("filter coefficients must be finite")
        if self.a[0] != 1.0:
            raise InvalidSpec(f"a[0] must be exactly 1, got {self.a[0]}")

    def to_json_dict(self) -> dict:
        return {"b": self.b.tolist(), "a": self.a.tolist()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "TransferFunction":
        return cls(np.asarray(d["b"], dtype=float), np.asarray(d["a"], dtype=float))


@dataclass
class PoleZeroSet:
    zeros: np.ndarray
    poles: np.ndarray
    gain: float


@dataclass
class FrequencyResponse:
    omega: np.ndarray  # [0, pi], strictly increasing
    h: np.ndarray      # complex, same length


def filter_signal(tf: TransferFunction, x: Signal) -> Signal:
    """Run the filter over the whole buffer, direct form II transposed,
    zero initial state. Output length and sample rate match the input."""
    return Signal(_lfilter(tf.b, tf.a, x.samples), x.sample_rate_hz)


def _lfilter(b: np.ndarray, a: np.ndarray, x: np.ndarray) -> np.ndarray:
    if len(a) == 1:  # pure FIR: plain convolution truncated to input length
        if len(x) == 0:
            return np.zeros(0)
        return np.convolve(x, b)[: len(x)]
    order = max(len(b), len(a)) - 1
    bp = np.zeros(order + 1)
    ap = np.zeros(order + 1)
    bp[: len(b)] = b
    ap[: len(a)] = a
    y = np.zeros(len(x))
    z = np.zeros(order)
    for n in range(len(x)):
        xn = x[n]
        yn = bp[0] * xn + z[0]
        for i in range(order - 1):
            z[i] = bp[i + 1] * xn + z[i + 1] - ap[i + 1] * yn
        z[order - 1] = bp[order] * xn - ap[order] * yn
        y[n] = yn
    return y


def filter_with_state(b, a, x, zi):
    """DF2T step with explicit carried state; used by frame-based LPC."""
    b = np.atleast_1d(np.asarray(b, dtype=float))
    a = np.atleast_1d(np.asarray(a, dtype=float))
    order = max(len(b), len(a)) - 1
    bp = np.zeros(order + 1)
    ap = np.zeros(order + 1)
    bp[: len(b)] = b
    ap[: len(a)] = a
    z = np.zeros(order)
    z[: len(zi)] = zi
    y = np.zeros(len(x))
    for n in range(len(x)):
        xn = x[n]
        yn = bp[0] * xn + (z[0] if order else 0.0)
        for i in range(order - 1):
            z[i] = bp[i + 1] * xn + z[i + 1] - ap[i + 1] * yn
        if order:
            z[order - 1] = bp[order] * xn - ap[order] * yn
        y[n] = yn
    return y, z


def impulse_response(tf: TransferFunction, length: int, sample_rate_hz: float = 1.0) -> Signal:
    if length < 1:
        raise InvalidLength(f"length must be >= 1, got {length}")
    impulse = np.zeros(length)
    impulse[0] = 1.0
    return filter_signal(tf, Signal(impulse, sample_rate_hz))


def frequency_response(tf: TransferFunction, n_points: int) -> FrequencyResponse:
    """Evaluate H on the uniform [0, pi] grid by Horner evaluation of both
    polynomials at w = e^{-j omega}."""
    if n_points < 2:
        raise InvalidSpec(f"n_points must be >= 2, got {n_points}")
    omega = np.arange(n_points) * (np.pi / (n_points - 1))
    w = np.exp(-1j * omega)
    num = _polyval_ascending(tf.b, w)
    den = _polyval_ascending(tf.a, w)
    small = np.abs(den) < 1e-300
    if small.any():
        k = int(np.argmax(small))
        raise DivisionNearZero(f"|A| vanishes at grid point {k} (omega={omega[k]:.6g})")
    return FrequencyResponse(omega, num / den)


def _polyval_ascending(coeffs: np.ndarray, w: np.ndarray) -> np.ndarray:
    # sum_k c[k] w^k, Horner from the highest power down
    acc = np.full_like(w, complex(coeffs[-1]))
    for c in coeffs[-2::-1]:
        acc = acc * w + c
    return acc


# --- polynomial roots (Aberth-Ehrlich) --------------------------------------

_MAX_ABERTH_ITER = 200
_RESIDUAL_TOL = 1e-10


def find_roots(poly) -> np.ndarray:
    """All roots of a real polynomial given in descending powers.

    Aberth-Ehrlich simultaneous iteration from a circle of starting points,
    polished until the residual |p(r)|/max|coef| <= 1e-10 at every root.
    Trailing zero coefficients are trimmed first and re-added as roots at the
    origin; a conjugate-pairing pass snaps the output to exact symmetry.
    """
    p = np.atleast_1d(np.asarray(poly, dtype=np.float64))
    if p.size == 0:
        raise InvalidSpec("empty polynomial")
    nz = np.nonzero(p)[0]
    if nz.size == 0:
        raise InvalidSpec("zero polynomial has no defined roots")
    origin_roots = p.size - 1 - nz[-1]
    p = p[nz[0]: nz[-1] + 1]  # strip leading zero padding and trailing zeros

    n = p.size - 1
    if n == 0:
        roots = np.zeros(0, dtype=complex)
    elif n == 1:
        roots = np.array([-p[1] / p[0]], dtype=complex)
    else:
        roots = _aberth(p)
        roots = _pair_conjugates(roots)

    if origin_roots:
        roots = np.concatenate([roots, np.zeros(origin_roots, dtype=complex)])
    # deterministic ordering
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def _aberth(p: np.ndarray) -> np.ndarray:
    n = p.size - 1
    pnorm = np.max(np.abs(p))
    dp = p[:-1] * np.arange(n, 0, -1)

    radius = 1.0 + np.max(np.abs(p)) / np.abs(p[0])
    angles = 2.0 * np.pi * np.arange(n) / n + 0.7  # fixed rotation breaks symmetry
    z = radius * np.exp(1j * angles)

    last_resid = np.inf
    for _ in range(_MAX_ABERTH_ITER):
        pv = np.polyval(p, z)
        resid = np.max(np.abs(pv)) / pnorm
        dv = np.polyval(dp, z)
        dv = np.where(dv == 0, 1e-30, dv)
        newton = pv / dv
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        cross = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * cross
        denom = np.where(np.abs(denom) < 1e-30, 1e-30, denom)
        step = newton / denom
        z = z - step
        # converged: residuals met and the iteration has gone quiet
        if resid <= _RESIDUAL_TOL and np.max(np.abs(step) / (1.0 + np.abs(z))) < 1e-14:
            return z
        last_resid = resid

    pv = np.polyval(p, z)
    if np.max(np.abs(pv)) / pnorm <= _RESIDUAL_TOL:
        return z
    raise NoConvergence(
        f"Aberth iteration did not converge in {_MAX_ABERTH_ITER} iterations",
        diagnostics={
            "residuals": (np.abs(pv) / pnorm).tolist(),
            "last_residual": float(last_resid),
            "roots": z.tolist(),
        },
    )


def _pair_conjugates(roots: np.ndarray) -> np.ndarray:
    """Snap near-real roots to the axis and average conjugate partners."""
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]
    used = np.zeros(roots.size, dtype=bool)
    out = []
    for i, z in enumerate(roots):
        if used[i]:
            continue
        used[i] = True
        scale = 1.0 + abs(z)
        if abs(z.imag) <= 1e-9 * scale:
            out.append(complex(z.real, 0.0))
            continue
        target = np.conj(z)
        best, best_d = -1, np.inf
        for j in range(roots.size):
            if used[j] or j == i:
                continue
            d = abs(roots[j] - target)
            if d < best_d:
                best, best_d = j, d
        # multiple roots blur by ~eps^(1/m); pair generously so the returned
        # set stays conjugate-symmetric even for defective clusters
        if best >= 0 and best_d <= 1e-3 * scale:
            used[best] = True
            avg = (z + np.conj(roots[best])) / 2.0
            out.extend([avg, np.conj(avg)])
        else:
            out.append(z)  # leave asymmetric stragglers untouched
    return np.asarray(out, dtype=complex)


def expand_roots(roots, gain: float) -> np.ndarray:
    """Real monic polynomial (descending powers) from a conjugate-closed root
    set, scaled by gain. Conjugate pairs are multiplied as real quadratics so
    the coefficients are exactly real."""
    roots = np.atleast_1d(np.asarray(roots, dtype=complex))
    poly = np.array([1.0])
    remaining = list(roots)
    while remaining:
        r = remaining.pop(0)
        scale = 1.0 + abs(r)
        if abs(r.imag) <= 1e-9 * scale:
            poly = np.convolve(poly, [1.0, -r.real])
            continue
        target = np.conj(r)
        best, best_d = -1, np.inf
        for j, cand in enumerate(remaining):
            d = abs(cand - target)
            if d < best_d:
                best, best_d = j, d
        if best < 0 or best_d > 1e-9 * scale:
            raise NonConjugateRoots(f"root {r} has no conjugate partner within 1e-9")
        mate = remaining.pop(best)
        re = (r.real + mate.real) / 2.0
        mag2 = (abs(r) * abs(mate))
        poly = np.convolve(poly, [1.0, -2.0 * re, mag2])
    return poly * float(gain)


def is_stable(tf: TransferFunction) -> tuple[bool, float]:
    """True iff every pole lies strictly inside the unit circle (margin 1e-9).
    Also reports the largest pole magnitude (0 for FIR)."""
    a = np.trim_zeros(tf.a, "b")
    if a.size <= 1:
        return True, 0.0
    poles = find_roots(tf.a)
    max_mag = float(np.max(np.abs(poles))) if poles.size else 0.0
    return max_mag < 1.0 - STABILITY_MARGIN, max_mag


def pole_zero_set(tf: TransferFunction) -> PoleZeroSet:
    """Zeros/poles of H(z) in positive powers of z, including the origin
    roots that balance the numerator/denominator degree difference."""
    b = np.trim_zeros(tf.b, "f")
    if b.size == 0:
        return PoleZeroSet(np.zeros(0, complex), find_roots(tf.a), 0.0)
    zeros = find_roots(tf.b)
    poles = find_roots(tf.a)
    deg_b = tf.b.size - 1
    deg_a = tf.a.size - 1
    if deg_a > deg_b:
        zeros = np.concatenate([zeros, np.zeros(deg_a - deg_b, complex)])
    elif deg_b > deg_a:
        poles = np.concatenate([poles, np.zeros(deg_b - deg_a, complex)])
    return PoleZeroSet(zeros, poles, float(b[0]))


def pole_zero_csv(pz: PoleZeroSet) -> str:
    lines = ["kind,re,im"]
    for z in pz.zeros:
        lines.append(f"zero,{format(z.real, '.17g')},{format(z.imag, '.17g')}")
    for p in pz.poles:
        lines.append(f"pole,{format(p.real, '.17g')},{format(p.imag, '.17g')}")
    return "\n".join(lines)
