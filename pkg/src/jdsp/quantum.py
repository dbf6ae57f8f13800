"""n-qubit statevector simulation of the QFT/IQFT gate decomposition, with
depolarizing Pauli-trajectory and measurement-shot noise, and the
peak-picking analysis-synthesis codec scored by SNR.

Convention: the QFT here is y_k = (1/sqrt(N)) sum_j x_j e^{+2 pi i jk/N};
for real input it is the conjugate of the spectral module's unnormalized
DFT scaled by 1/sqrt(N). Qubit 0 holds the most significant basis-index bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidQubits,
    InvalidShots,
    InvalidSpec,
    LengthMismatch,
    NumericalFailure,
    TooLong,
    ZeroReference,
    ZeroSignal,
)

MAX_QUBITS = 14
_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass
class StateVector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.n_qubits < 1:
            raise InvalidQubits(f"need at least one qubit, got {self.n_qubits}")
        if self.amplitudes.size != 2 ** self.n_qubits:
            raise DimensionMismatch(
                f"{self.amplitudes.size} amplitudes for {self.n_qubits} qubits"
            )
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-10:
            raise InvalidSpec(f"state norm {norm} deviates from 1 beyond 1e-10")


@dataclass(frozen=True)
class Gate:
    kind: str            # "h" | "cphase" | "swap"
    qubits: tuple
    theta: float = 0.0   # cphase only


@dataclass
class QftCircuit:
    gates: list
    n_qubits: int


@dataclass
class NoiseModel:
    depolarizing_p: float = 0.0
    shots: int = 0       # 0 = exact amplitudes, no measurement noise
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.depolarizing_p <= 1.0:
            raise InvalidSpec(f"depolarizing_p must be in [0,1], got {self.depolarizing_p}")
        if self.shots < 0:
            raise InvalidShots(f"shots must be >= 0, got {self.shots}")


@dataclass
class EncodedSignal:
    state: StateVector
    norm: float
    original_len: int


@dataclass
class CodecConfig:
    n_qubits: int
    peaks_retained: int
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self):
        if self.peaks_retained < 1:
            raise InvalidSpec(f"peaks_retained must be >= 1, got {self.peaks_retained}")
        if self.peaks_retained > 2 ** self.n_qubits:
            raise InvalidSpec("peaks_retained exceeds the number of bins")


@dataclass
class CodecResult:
    reconstructed: np.ndarray
    snr_db: float
    spectrum: np.ndarray       # (possibly noisy) QFT-domain estimate
    retained_bins: list


def amplitude_encode(x, n_qubits: int) -> EncodedSignal:
    """Zero-pad to 2^n and write x/||x|| into the state amplitudes."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise InvalidQubits(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    size = 2 ** n_qubits
    if x.size > size:
        raise TooLong(f"{x.size} samples exceed 2^{n_qubits} = {size}")
    norm = float(np.linalg.norm(x))
    if norm <= 0.0:
        raise ZeroSignal("cannot encode an all-zero signal")
    amp = np.zeros(size, dtype=np.complex128)
    amp[: x.size] = x / norm
    return EncodedSignal(StateVector(amp, n_qubits), norm, x.size)


def amplitude_decode(enc: EncodedSignal) -> np.ndarray:
    return np.real(enc.state.amplitudes[: enc.original_len]) * enc.norm


def build_qft_circuit(n_qubits: int) -> QftCircuit:
    """Hadamard + controlled-phase + final swap decomposition of the QFT:
    n H gates, n(n-1)/2 CPhase gates, floor(n/2) swaps."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise InvalidQubits(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    gates = []
    for j in range(n_qubits):
        gates.append(Gate("h", (j,)))
        for k in range(j + 1, n_qubits):
            gates.append(Gate("cphase", (k, j), 2.0 * np.pi / 2 ** (k - j + 1)))
    for q in range(n_qubits // 2):
        gates.append(Gate("swap", (q, n_qubits - 1 - q)))
    return QftCircuit(gates, n_qubits)


def inverse_circuit(circuit: QftCircuit) -> QftCircuit:
    gates = []
    for g in reversed(circuit.gates):
        if g.kind == "cphase":
            gates.append(Gate("cphase", g.qubits, -g.theta))
        else:
            gates.append(g)  # H and Swap are self-inverse
    return QftCircuit(gates, circuit.n_qubits)


def apply_circuit(state: StateVector, circuit: QftCircuit,
                  noise: NoiseModel = None, rng: np.random.Generator = None) -> StateVector:
    """Apply the gate list with per-gate amplitude updates (no dense matrix).

    With depolarizing noise, each gate is followed, with probability p, by a
    uniformly random non-identity Pauli on one uniformly chosen qubit the gate
    touched (a Monte-Carlo trajectory). All operations are unitary, so the
    norm is checked, never renormalized.
    """
    if circuit.n_qubits != state.n_qubits:
        raise DimensionMismatch(
            f"circuit has {circuit.n_qubits} qubits, state has {state.n_qubits}"
        )
    p_err = noise.depolarizing_p if noise is not None else 0.0
    if p_err > 0.0 and rng is None:
        rng = np.random.default_rng(noise.seed)

    n = state.n_qubits
    psi = state.amplitudes.reshape([2] * n).copy()
    for gate in circuit.gates:
        psi = _apply_gate(psi, gate)
        if p_err > 0.0 and rng.uniform() < p_err:
            qubit = int(gate.qubits[int(rng.integers(len(gate.qubits)))])
            pauli = ("x", "y", "z")[int(rng.integers(3))]
            psi = _apply_pauli(psi, pauli, qubit)
    flat = psi.reshape(-1)
    norm = np.linalg.norm(flat)
    if abs(norm - 1.0) > 1e-9:
        raise NumericalFailure(f"unitary evolution drifted to norm {norm}")
    return StateVector(flat, n)


def _apply_gate(psi: np.ndarray, gate: Gate) -> np.ndarray:
    if gate.kind == "h":
        q = gate.qubits[0]
        view = np.moveaxis(psi, q, 0)
        a, b = view[0].copy(), view[1].copy()
        view[0] = (a + b) * _SQRT_HALF
        view[1] = (a - b) * _SQRT_HALF
        return psi
    if gate.kind == "cphase":
        c, t = gate.qubits
        view = np.moveaxis(psi, c, 0)
        view = np.moveaxis(view, t + 1 if t < c else t, 1)
        view[1, 1] *= np.exp(1j * gate.theta)
        return psi
    if gate.kind == "swap":
        q1, q2 = gate.qubits
        return np.swapaxes(psi, q1, q2).copy()
    raise InvalidSpec(f"unknown gate kind '{gate.kind}'")


def _apply_pauli(psi: np.ndarray, pauli: str, qubit: int) -> np.ndarray:
    view = np.moveaxis(psi, qubit, 0)
    if pauli == "x":
        view[[0, 1]] = view[[1, 0]]
    elif pauli == "z":
        view[1] *= -1.0
    else:  # y
        a, b = view[0].copy(), view[1].copy()
        view[0] = -1j * b
        view[1] = 1j * a
    return psi


def qft_matrix(n_qubits: int) -> np.ndarray:
    """Dense QFT matrix F[k, j] = e^{+2 pi i jk/N}/sqrt(N); oracle-sized only."""
    size = 2 ** n_qubits
    jk = np.outer(np.arange(size), np.arange(size))
    return np.exp(2j * np.pi * jk / size) / np.sqrt(size)


def measure_counts(state: StateVector, shots: int, seed: int) -> dict:
    """M seeded multinomial draws from |amplitude|^2; returns nonzero counts."""
    if shots < 1:
        raise InvalidShots(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    return _measure_counts_rng(state, shots, rng)


def _measure_counts_rng(state: StateVector, shots: int, rng: np.random.Generator) -> dict:
    probs = np.abs(state.amplitudes) ** 2
    probs = probs / probs.sum()
    counts = rng.multinomial(shots, probs)
    return {int(i): int(c) for i, c in enumerate(counts) if c}


def noisy_spectrum_estimate(state: StateVector, noise: NoiseModel) -> np.ndarray:
    """Shot-noise emulation of the measured spectrum.

    Magnitudes come from sqrt(counts/M); phases are copied from the
    statevector, a deliberate classroom emulation since measurement alone
    carries no phase. shots = 0 bypasses to the exact amplitudes. The result
    is not renormalized.
    """
    if noise.shots == 0:
        return state.amplitudes.copy()
    rng = np.random.default_rng(noise.seed)
    return _noisy_estimate_rng(state, noise.shots, rng)


def _noisy_estimate_rng(state: StateVector, shots: int, rng: np.random.Generator) -> np.ndarray:
    if shots == 0:
        return state.amplitudes.copy()
    counts = _measure_counts_rng(state, shots, rng)
    mags = np.zeros(state.amplitudes.size)
    for idx, c in counts.items():
        mags[idx] = math.sqrt(c / shots)
    return mags * np.exp(1j * np.angle(state.amplitudes))


def _conjugate_pair_mask(est: np.ndarray, peaks: int) -> np.ndarray:
    """Mask keeping the top-``peaks`` magnitudes with conjugate partners;
    bin k and (N-k) mod N count as one peak (k = 0 and N/2 self-pair)."""
    size = est.size
    order = np.argsort(-np.abs(est), kind="stable")  # ties to lower index
    keep = np.zeros(size, dtype=bool)
    kept_peaks = 0
    for idx in order:
        if kept_peaks >= peaks:
            break
        if keep[idx]:
            continue
        keep[idx] = True
        keep[(size - idx) % size] = True
        kept_peaks += 1
    return keep


def qft_codec(x, cfg: CodecConfig) -> CodecResult:
    """QFT analysis, top-peak retention, IQFT synthesis, SNR score.

    Pipeline: amplitude encode -> QFT with cfg.noise (depolarizing trajectory
    plus shot-noise estimate, one seeded generator) -> keep the strongest
    peaks_retained conjugate pairs -> renormalize -> IQFT (noise-free) ->
    real part, rescale by the stored norm, truncate to the input length.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    enc = amplitude_encode(x, cfg.n_qubits)
    rng = np.random.default_rng(cfg.noise.seed)

    circuit = build_qft_circuit(cfg.n_qubits)
    transformed = apply_circuit(enc.state, circuit, noise=cfg.noise, rng=rng)
    est = _noisy_estimate_rng(transformed, cfg.noise.shots, rng)

    keep = _conjugate_pair_mask(est, cfg.peaks_retained)
    pruned = np.where(keep, est, 0.0)
    pruned_norm = np.linalg.norm(pruned)
    if pruned_norm <= 0.0:
        raise NumericalFailure("all retained spectral bins are zero")
    spec_state = StateVector(pruned / pruned_norm, cfg.n_qubits)

    out_state = apply_circuit(spec_state, inverse_circuit(circuit))
    noiseless = cfg.noise.depolarizing_p == 0.0 and cfg.noise.shots == 0
    residue = float(np.max(np.abs(out_state.amplitudes.imag)))
    if noiseless and residue >= 1e-9:
        raise NumericalFailure(f"imaginary residue {residue} in a noiseless run")

    recon = np.real(out_state.amplitudes)[: enc.original_len] * enc.norm
    return CodecResult(
        reconstructed=recon,
        snr_db=snr_db(x, recon),
        spectrum=est,
        retained_bins=sorted(int(i) for i in np.nonzero(keep)[0]),
    )


def snr_db(reference, estimate) -> float:
    """10 log10 of signal power over error power; exact match gives +inf."""
    reference = np.atleast_1d(np.asarray(reference, dtype=np.float64))
    estimate = np.atleast_1d(np.asarray(estimate, dtype=np.float64))
    if reference.size != estimate.size:
        raise LengthMismatch(f"{reference.size} vs {estimate.size} samples")
    sig = float(np.sum(reference ** 2))
    if sig <= 0.0:
        raise ZeroReference("reference signal has zero energy")
    err = float(np.sum((reference - estimate) ** 2))
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(sig / err)
