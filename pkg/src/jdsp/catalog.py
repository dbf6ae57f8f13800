"""Block catalog: descriptors plus runners that wire the DSP modules into
the graph engine. Every block consumes/produces whole buffers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import classify, design, lpc, quantum, spectral
from .errors import InvalidSpec
from .filters import (
    TransferFunction,
    filter_signal,
    frequency_response,
    impulse_response,
    is_stable,
    pole_zero_set,
)
from .graph import BlockDescriptor, ParamSpec, PortSpec
from .signals import GeneratorSpec, Signal, generate_signal

PI = float(np.pi)
_HAAR = [1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)]


@dataclass(frozen=True)
class BlockDef:
    descriptor: BlockDescriptor
    run: callable


_REGISTRY = {}


def _block(type_name, params=(), inputs=(), outputs=()):
    def wrap(fn):
        desc = BlockDescriptor(type_name, tuple(params), tuple(inputs), tuple(outputs))
        _REGISTRY[type_name] = BlockDef(desc, fn)
        return fn
    return wrap


def registry() -> dict:
    return _REGISTRY


def block_catalog() -> list:
    """All block descriptors, sorted by type name (deterministic)."""
    return [_REGISTRY[name].descriptor for name in sorted(_REGISTRY)]


def _spectrum_from(x: Signal, nfft: int) -> spectral.Spectrum:
    n = max(1, spectral.next_pow2(len(x))) if nfft == 0 else nfft
    bins = spectral.fft(spectral.zero_pad(x.samples, n))
    return spectral.Spectrum(bins, x.sample_rate_hz)


# --- signals ---------------------------------------------------------------

@_block(
    "SignalGenerator",
    params=[
        ParamSpec("kind", "enum", "sine",
                  enum_values=("sine", "square", "triangle", "impulse", "step",
                               "white_noise", "dtmf")),
        ParamSpec("freq_hz", "real", 1000.0, min=1e-9, max=1e9),
        ParamSpec("amplitude", "real", 1.0, min=0.0, max=1e6),
        ParamSpec("length", "int", 256, min=1, max=1 << 20),
        ParamSpec("sample_rate_hz", "real", 8000.0, min=1e-6, max=1e9),
        ParamSpec("phase_rad", "real", 0.0, min=-1e6, max=1e6),
        ParamSpec("dtmf_digit", "enum", "5",
                  enum_values=tuple("0123456789*#ABCD")),
    ],
    outputs=[PortSpec("out", "signal")],
)
def _run_generator(ctx):
    p = ctx.params
    seed = 0
    if p["kind"] == "white_noise":
        seed = int(ctx.rng.integers(2 ** 63))
    return {"out": generate_signal(GeneratorSpec(
        kind=p["kind"], freq_hz=p["freq_hz"], amplitude=p["amplitude"],
        length=p["length"], sample_rate_hz=p["sample_rate_hz"],
        phase_rad=p["phase_rad"], dtmf_digit=p["dtmf_digit"], seed=seed,
    ))}


# --- filters ---------------------------------------------------------------

@_block(
    "FirIirFilter",
    params=[
        ParamSpec("b", "real-array", (1.0,)),
        ParamSpec("a", "real-array", (1.0,)),
        ParamSpec("halt_on_unstable", "enum", "true", enum_values=("true", "false")),
    ],
    inputs=[PortSpec("in", "signal"),
            PortSpec("tf", "transfer_function", required=False)],
    outputs=[PortSpec("out", "signal")],
)
def _run_filter(ctx):
    tf = ctx.inputs.get("tf")
    if tf is None:
        tf = TransferFunction(np.asarray(ctx.params["b"]), np.asarray(ctx.params["a"]))
    if ctx.params["halt_on_unstable"] == "true" and len(tf.a) > 1:
        stable, max_mag = is_stable(tf)
        if not stable:
            raise InvalidSpec(f"unstable filter (max pole magnitude {max_mag:.6g})")
    return {"out": filter_signal(tf, ctx.inputs["in"])}


@_block(
    "FilterDesigner",
    params=[
        ParamSpec("method", "enum", "kaiser",
                  enum_values=("kaiser", "sampling", "equiripple",
                               "butterworth", "cheby1", "cheby2", "elliptic")),
        ParamSpec("kind", "enum", "lowpass", enum_values=("lowpass", "highpass")),
        ParamSpec("passband_edge", "real", 0.2 * PI, min=1e-6, max=PI - 1e-6),
        ParamSpec("stopband_edge", "real", 0.3 * PI, min=1e-6, max=PI - 1e-6),
        ParamSpec("stopband_atten_db", "real", 60.0, min=0.0, max=200.0),
        ParamSpec("passband_ripple_db", "real", 1.0, min=1e-6, max=30.0),
        ParamSpec("order", "int", 4, min=1, max=24),
        ParamSpec("cutoff", "real", 0.5 * PI, min=1e-6, max=PI - 1e-6),
        ParamSpec("numtaps", "int", 15, min=3, max=127),
        ParamSpec("bands", "real-array", (0.0, 0.2 * PI, 0.3 * PI, PI)),
        ParamSpec("desired", "real-array", (1.0, 0.0)),
        ParamSpec("weights", "real-array", (1.0, 1.0)),
        ParamSpec("desired_mag", "real-array", (1.0,) * 9),
    ],
    outputs=[PortSpec("tf", "transfer_function")],
)
def _run_designer(ctx):
    p = ctx.params
    method = p["method"]
    if method == "kaiser":
        tf = design.design_fir_kaiser(design.FirSpec(
            p["passband_edge"], p["stopband_edge"], p["stopband_atten_db"], p["kind"]))
    elif method == "sampling":
        tf = design.design_fir_freq_sampling(p["desired_mag"])
    elif method == "equiripple":
        flat = p["bands"]
        if len(flat) % 2:
            raise InvalidSpec("bands must hold (lo, hi) pairs")
        bands = [(flat[i], flat[i + 1]) for i in range(0, len(flat), 2)]
        tf = design.design_fir_equiripple(design.EquirippleSpec(
            p["numtaps"], bands, list(p["desired"]), list(p["weights"]))).tf
    else:
        family = {"cheby1": "chebyshev1", "cheby2": "chebyshev2"}.get(method, method)
        tf = design.design_iir(design.IirSpec(
            family=family, kind=p["kind"], order=p["order"], cutoff=p["cutoff"],
            passband_ripple_db=p["passband_ripple_db"],
            stopband_atten_db=p["stopband_atten_db"]))
    return {"tf": tf}


@_block(
    "ImpulseResponse",
    params=[ParamSpec("length", "int", 64, min=1, max=1 << 20),
            ParamSpec("sample_rate_hz", "real", 1.0, min=1e-6, max=1e9)],
    inputs=[PortSpec("tf", "transfer_function")],
    outputs=[PortSpec("out", "signal")],
)
def _run_impulse(ctx):
    return {"out": impulse_response(ctx.inputs["tf"], ctx.params["length"],
                                    ctx.params["sample_rate_hz"])}


@_block(
    "FrequencyResponse",
    params=[ParamSpec("n_points", "int", 512, min=2, max=1 << 16)],
    inputs=[PortSpec("tf", "transfer_function")],
    outputs=[PortSpec("out", "feature_matrix")],
)
def _run_freq_response(ctx):
    fr = frequency_response(ctx.inputs["tf"], ctx.params["n_points"])
    mag = np.abs(fr.h)
    mag_db = 20.0 * np.log10(np.maximum(mag, 1e-20))
    rows = np.column_stack([fr.omega, mag, mag_db, np.angle(fr.h), fr.h.real, fr.h.imag])
    return {"out": classify.FeatureMatrix(
        rows, columns=("omega", "mag", "mag_db", "phase_rad", "re", "im"))}


@_block(
    "PoleZero",
    inputs=[PortSpec("tf", "transfer_function")],
    outputs=[PortSpec("out", "feature_matrix")],
)
def _run_pole_zero(ctx):
    pz = pole_zero_set(ctx.inputs["tf"])
    rows = [[0.0, z.real, z.imag] for z in pz.zeros]
    rows += [[1.0, p.real, p.imag] for p in pz.poles]
    if not rows:
        rows = np.zeros((0, 3))
    return {"out": classify.FeatureMatrix(np.asarray(rows, dtype=float).reshape(-1, 3),
                                          columns=("kind", "re", "im"))}


# --- spectral ----------------------------------------------------------------

@_block(
    "Fft",
    params=[ParamSpec("nfft", "int", 0, min=0, max=1 << 22)],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("out", "spectrum")],
)
def _run_fft(ctx):
    return {"out": _spectrum_from(ctx.inputs["in"], ctx.params["nfft"])}


@_block(
    "Window",
    params=[ParamSpec("kind", "enum", "hann", enum_values=spectral.WINDOW_KINDS),
            ParamSpec("beta", "real", 8.6, min=0.0, max=60.0)],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("out", "signal")],
)
def _run_window(ctx):
    x = ctx.inputs["in"]
    w = spectral.make_window(spectral.WindowSpec(ctx.params["kind"], len(x), ctx.params["beta"]))
    return {"out": Signal(x.samples * w, x.sample_rate_hz)}


@_block(
    "Periodogram",
    params=[ParamSpec("window", "enum", "hann", enum_values=spectral.WINDOW_KINDS),
            ParamSpec("beta", "real", 8.6, min=0.0, max=60.0),
            ParamSpec("nfft", "int", 0, min=0, max=1 << 22)],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("out", "feature_matrix")],
)
def _run_periodogram(ctx):
    x = ctx.inputs["in"]
    nfft = max(1, spectral.next_pow2(len(x))) if ctx.params["nfft"] == 0 else ctx.params["nfft"]
    w = spectral.WindowSpec(ctx.params["window"], len(x), ctx.params["beta"])
    p = spectral.periodogram(x, w, nfft)
    freqs = np.arange(len(p)) * x.sample_rate_hz / nfft
    return {"out": classify.FeatureMatrix(np.column_stack([freqs, p]),
                                          columns=("freq_hz", "power"))}


@_block(
    "PeakPicker",
    params=[ParamSpec("count", "int", 4, min=1, max=1 << 14)],
    inputs=[PortSpec("in", "spectrum")],
    outputs=[PortSpec("peaks", "label_vector")],
)
def _run_peak_picker(ctx):
    return {"peaks": spectral.pick_peaks(np.abs(ctx.inputs["in"].bins), ctx.params["count"])}


@_block(
    "Downsample",
    params=[ParamSpec("factor", "int", 2, min=1, max=64),
            ParamSpec("antialias", "enum", "false", enum_values=("false", "true"))],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("out", "signal")],
)
def _run_downsample(ctx):
    x = ctx.inputs["in"]
    if ctx.params["antialias"] == "true":
        return {"out": spectral.decimate(x, ctx.params["factor"])}
    return {"out": spectral.downsample(x, ctx.params["factor"])}


@_block(
    "Upsample",
    params=[ParamSpec("factor", "int", 2, min=1, max=64),
            ParamSpec("interpolate", "enum", "false", enum_values=("false", "true"))],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("out", "signal")],
)
def _run_upsample(ctx):
    x = ctx.inputs["in"]
    if ctx.params["interpolate"] == "true":
        return {"out": spectral.interpolate(x, ctx.params["factor"])}
    return {"out": spectral.upsample(x, ctx.params["factor"])}


@_block(
    "QmfAnalysis",
    params=[ParamSpec("h0", "real-array", tuple(_HAAR))],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("low", "signal"), PortSpec("high", "signal")],
)
def _run_qmf_analysis(ctx):
    bank = spectral.QmfBank(np.asarray(ctx.params["h0"]))
    low, high = spectral.qmf_analysis(bank, ctx.inputs["in"])
    return {"low": low, "high": high}


@_block(
    "QmfSynthesis",
    params=[ParamSpec("h0", "real-array", tuple(_HAAR))],
    inputs=[PortSpec("low", "signal"), PortSpec("high", "signal")],
    outputs=[PortSpec("out", "signal")],
)
def _run_qmf_synthesis(ctx):
    bank = spectral.QmfBank(np.asarray(ctx.params["h0"]))
    return {"out": spectral.qmf_synthesis(bank, ctx.inputs["low"], ctx.inputs["high"])}


# --- LPC / speech --------------------------------------------------------------

@_block(
    "Autocorrelation",
    params=[ParamSpec("max_lag", "int", 32, min=0, max=4096)],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("out", "feature_matrix")],
)
def _run_autocorrelation(ctx):
    x = ctx.inputs["in"]
    r = lpc.autocorrelation(x.samples, min(ctx.params["max_lag"], len(x) - 1)).r
    return {"out": classify.FeatureMatrix(
        np.column_stack([np.arange(len(r), dtype=float), r]), columns=("lag", "r"))}


@_block(
    "LpcAnalyzer",
    params=[ParamSpec("order", "int", 10, min=1, max=30),
            ParamSpec("window", "enum", "hamming", enum_values=spectral.WINDOW_KINDS)],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("tf", "transfer_function"),
             PortSpec("formants", "feature_matrix")],
)
def _run_lpc_analyzer(ctx):
    x = ctx.inputs["in"]
    order = ctx.params["order"]
    if order >= len(x):
        raise InvalidSpec(f"order {order} needs a longer signal than {len(x)}")
    w = spectral.make_window(spectral.WindowSpec(ctx.params["window"], len(x)))
    model = lpc.levinson_durbin(lpc.autocorrelation(x.samples * w, order), order)
    gain = float(np.sqrt(model.prediction_error))
    formants = lpc.formants_from_lpc(model, x.sample_rate_hz)
    rows = np.asarray([[f.frequency_hz, f.bandwidth_hz] for f in formants],
                      dtype=float).reshape(-1, 2)
    return {
        "tf": TransferFunction([gain], model.a),  # synthesis filter g/A(z)
        "formants": classify.FeatureMatrix(rows, columns=("freq_hz", "bandwidth_hz")),
    }


@_block(
    "FormantTrack",
    params=[ParamSpec("order", "int", 10, min=1, max=30),
            ParamSpec("frame_len", "int", 256, min=64, max=1024),
            ParamSpec("hop", "int", 256, min=1, max=1024),
            ParamSpec("window", "enum", "hamming", enum_values=spectral.WINDOW_KINDS)],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("features", "feature_matrix")],
)
def _run_formant_track(ctx):
    spec = lpc.FrameSpec(ctx.params["frame_len"], ctx.params["hop"],
                         spectral.WindowSpec(ctx.params["window"], ctx.params["frame_len"]))
    feats = classify.formant_features([(0, ctx.inputs["in"])], ctx.params["order"], spec)
    return {"features": classify.FeatureMatrix(feats.rows, columns=feats.columns)}


@_block(
    "LpcAnalysisSynthesis",
    params=[ParamSpec("order", "int", 10, min=0, max=30),
            ParamSpec("frame_len", "int", 256, min=64, max=1024),
            ParamSpec("window", "enum", "hamming", enum_values=spectral.WINDOW_KINDS)],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("reconstructed", "signal"), PortSpec("residual", "signal")],
)
def _run_lpc_analysis_synthesis(ctx):
    flen = ctx.params["frame_len"]
    spec = lpc.FrameSpec(flen, flen, spectral.WindowSpec(ctx.params["window"], flen))
    rec, res = lpc.lpc_analysis_synthesis(ctx.inputs["in"], ctx.params["order"], spec)
    return {"reconstructed": rec, "residual": res}


# --- machine learning ------------------------------------------------------------

@_block(
    "KMeans",
    params=[ParamSpec("k", "int", 2, min=1, max=64),
            ParamSpec("max_iter", "int", 300, min=1, max=10000),
            ParamSpec("tol", "real", 1e-6, min=0.0, max=1.0)],
    inputs=[PortSpec("features", "feature_matrix")],
    outputs=[PortSpec("centroids", "feature_matrix"),
             PortSpec("assignments", "label_vector"),
             PortSpec("inertia", "scalar")],
)
def _run_kmeans(ctx):
    model = classify.kmeans(ctx.inputs["features"], ctx.params["k"],
                            seed=int(ctx.rng.integers(2 ** 63)),
                            max_iter=ctx.params["max_iter"], tol=ctx.params["tol"])
    return {
        "centroids": classify.FeatureMatrix(model.centroids),
        "assignments": model.assignments,
        "inertia": float(model.inertia),
    }


@_block(
    "NearestCentroid",
    inputs=[PortSpec("centroids", "feature_matrix"), PortSpec("points", "feature_matrix")],
    outputs=[PortSpec("labels", "label_vector")],
)
def _run_nearest_centroid(ctx):
    centroids = ctx.inputs["centroids"].rows
    model = classify.KMeansModel(centroids, 0.0, 0, np.zeros(0, dtype=np.int64))
    return {"labels": classify.nearest_centroid_classify(model, ctx.inputs["points"])}


@_block(
    "ConfusionMatrix",
    params=[ParamSpec("n_classes", "int", 0, min=0, max=1024)],
    inputs=[PortSpec("true", "label_vector"), PortSpec("predicted", "label_vector")],
    outputs=[PortSpec("matrix", "feature_matrix"), PortSpec("accuracy", "scalar")],
)
def _run_confusion(ctx):
    true = np.asarray(ctx.inputs["true"], dtype=np.int64)
    pred = np.asarray(ctx.inputs["predicted"], dtype=np.int64)
    n_classes = ctx.params["n_classes"]
    if n_classes == 0:
        n_classes = int(max(true.max(initial=-1), pred.max(initial=-1))) + 1
        n_classes = max(n_classes, 1)
    cm = classify.confusion_matrix(true, pred, n_classes)
    return {
        "matrix": classify.FeatureMatrix(cm.counts.astype(float),
                                         columns=tuple(cm.class_names)),
        "accuracy": cm.accuracy,
    }


# --- quantum ----------------------------------------------------------------------

def _auto_qubits(length: int, requested: int) -> int:
    if requested:
        return requested
    return max(1, int(math.ceil(math.log2(max(1, length)))))


@_block(
    "Qft",
    params=[ParamSpec("qubits", "int", 0, min=0, max=quantum.MAX_QUBITS),
            ParamSpec("depolarizing_p", "real", 0.0, min=0.0, max=1.0),
            ParamSpec("shots", "int", 0, min=0, max=10 ** 7)],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("out", "spectrum")],
)
def _run_qft(ctx):
    x = ctx.inputs["in"]
    n = _auto_qubits(len(x), ctx.params["qubits"])
    enc = quantum.amplitude_encode(x.samples, n)
    noise = quantum.NoiseModel(ctx.params["depolarizing_p"], ctx.params["shots"])
    state = quantum.apply_circuit(enc.state, quantum.build_qft_circuit(n),
                                  noise=noise, rng=ctx.rng)
    est = quantum._noisy_estimate_rng(state, noise.shots, ctx.rng)
    # bridge to the engine-wide unnormalized-DFT spectrum convention
    bins = np.conj(est) * math.sqrt(2 ** n) * enc.norm
    return {"out": spectral.Spectrum(bins, x.sample_rate_hz)}


@_block(
    "Iqft",
    inputs=[PortSpec("in", "spectrum")],
    outputs=[PortSpec("out", "signal")],
)
def _run_iqft(ctx):
    spec = ctx.inputs["in"]
    n = int(math.log2(len(spec)))
    norm = float(np.linalg.norm(spec.bins))
    if norm <= 0.0:
        raise InvalidSpec("cannot invert an all-zero spectrum")
    state = quantum.StateVector(np.conj(spec.bins) / norm, n)
    out = quantum.apply_circuit(state, quantum.inverse_circuit(quantum.build_qft_circuit(n)))
    samples = np.real(out.amplitudes) * norm / math.sqrt(len(spec))
    return {"out": Signal(samples, spec.sample_rate_hz)}


@_block(
    "QftCodec",
    params=[ParamSpec("qubits", "int", 0, min=0, max=quantum.MAX_QUBITS),
            ParamSpec("peaks", "int", 4, min=1, max=1 << 14),
            ParamSpec("depolarizing_p", "real", 0.0, min=0.0, max=1.0),
            ParamSpec("shots", "int", 0, min=0, max=10 ** 7)],
    inputs=[PortSpec("in", "signal")],
    outputs=[PortSpec("reconstructed", "signal"), PortSpec("snr_db", "scalar"),
             PortSpec("spectrum", "spectrum")],
)
def _run_qft_codec(ctx):
    x = ctx.inputs["in"]
    n = _auto_qubits(len(x), ctx.params["qubits"])
    cfg = quantum.CodecConfig(
        n_qubits=n,
        peaks_retained=min(ctx.params["peaks"], 2 ** n),
        noise=quantum.NoiseModel(ctx.params["depolarizing_p"], ctx.params["shots"],
                                 seed=int(ctx.rng.integers(2 ** 63))),
    )
    result = quantum.qft_codec(x.samples, cfg)
    bins = np.conj(result.spectrum) * math.sqrt(2 ** n) * float(np.linalg.norm(x.samples))
    return {
        "reconstructed": Signal(result.reconstructed, x.sample_rate_hz),
        "snr_db": result.snr_db,
        "spectrum": spectral.Spectrum(bins, x.sample_rate_hz),
    }


@_block(
    "SnrMeter",
    inputs=[PortSpec("reference", "signal"), PortSpec("estimate", "signal")],
    outputs=[PortSpec("snr_db", "scalar")],
)
def _run_snr_meter(ctx):
    return {"snr_db": quantum.snr_db(ctx.inputs["reference"].samples,
                                     ctx.inputs["estimate"].samples)}
