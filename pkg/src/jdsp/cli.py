"""Command-line interface.

Exit codes: 0 success, 1 usage/input error, 2 engine/runtime error.
All output files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .catalog import block_catalog, registry
from .classify import FeatureMatrix, phoneme_experiment
from .design import (
    EquirippleSpec,
    FirSpec,
    IirSpec,
    design_fir_equiripple,
    design_fir_freq_sampling,
    design_fir_kaiser,
    design_iir,
)
from .errors import BlockRuntimeError, JdspError
from .graph import execute_plan, parse_graph_json, sink_blocks, validate_and_plan
from .quantum import CodecConfig, NoiseModel, qft_codec
from .serialize import value_to_file
from .signals import Signal, read_wav, write_wav

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _atomic_write(path: str, data) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(tmp, mode) as fh:
        fh.write(data)
    os.replace(tmp, path)


def _fail(message: str, code: int) -> int:
    print(f"jdsp: error: {message}", file=sys.stderr)
    return code


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise JdspError(f"could not parse number list '{text}'") from None


def _json_default(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
    raise TypeError(f"not JSON serializable: {v!r}")


def _dump_json(obj) -> str:
    def clean(o):
        if isinstance(o, float) and not math.isfinite(o):
            return _json_default(o)
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, list):
            return [clean(v) for v in o]
        return o

    return json.dumps(clean(obj), indent=2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jdsp", description="Block-diagram DSP simulation engine")
    parser.add_argument("--version", action="version", version=f"jdsp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("catalog", help="list the block catalog")
    p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("run", help="validate and execute a graph JSON file")
    p.add_argument("graph", help="path to graph JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="directory for sink output files")
    p.add_argument("--output", action="append", default=None, metavar="BLOCK.PORT",
                   help="emit only these outputs (repeatable; default: all sink outputs)")

    p = sub.add_parser("design", help="design a filter and write its coefficients")
    dsub = p.add_subparsers(dest="design_kind", required=True, parser_class=_Parser)

    fir = dsub.add_parser("fir")
    fir.add_argument("--method", required=True, choices=("kaiser", "sampling", "equiripple"))
    fir.add_argument("--kind", default="lowpass", choices=("lowpass", "highpass"))
    fir.add_argument("--passband-edge", type=float, default=None)
    fir.add_argument("--stopband-edge", type=float, default=None)
    fir.add_argument("--atten-db", type=float, default=60.0)
    fir.add_argument("--desired-mag", default=None, help="comma list, odd length")
    fir.add_argument("--numtaps", type=int, default=15)
    fir.add_argument("--bands", default=None, help="lo:hi pairs, comma separated")
    fir.add_argument("--desired", default=None, help="comma list, one per band")
    fir.add_argument("--weights", default=None, help="comma list, one per band")
    fir.add_argument("--out", default=None, help="write TransferFunction JSON here")

    iir = dsub.add_parser("iir")
    iir.add_argument("--family", required=True,
                     choices=("butterworth", "cheby1", "cheby2", "elliptic"))
    iir.add_argument("--kind", default="lowpass", choices=("lowpass", "highpass"))
    iir.add_argument("--order", type=int, required=True)
    iir.add_argument("--cutoff", type=float, required=True, help="rad/sample in (0, pi)")
    iir.add_argument("--ripple-db", type=float, default=None)
    iir.add_argument("--atten-db", type=float, default=None)
    iir.add_argument("--out", default=None)

    p = sub.add_parser("qft-codec", help="QFT analysis-synthesis on a WAV file")
    p.add_argument("--input", required=True, help="16-bit mono PCM WAV (truncated to 2^qubits samples)")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--peaks", type=int, required=True)
    p.add_argument("--noise-p", type=float, default=0.0)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the report JSON here")
    p.add_argument("--save-audio", default=None, help="write the reconstruction as WAV")

    p = sub.add_parser("kmeans", help="cluster labeled features and report a confusion matrix")
    p.add_argument("--input", required=True, help="CSV: label,f1,f2[,f3]")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the confusion CSV here")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--assets", default=None, help="static UI bundle directory")

    return parser


def _cmd_catalog(args) -> int:
    cat = block_catalog()
    if args.json:
        print(json.dumps([d.to_json_dict() for d in cat], indent=2))
        return 0
    for d in cat:
        ins = ", ".join(f"{p.name}:{p.value_kind}{'' if p.required else '?'}" for p in d.inputs)
        outs = ", ".join(f"{p.name}:{p.value_kind}" for p in d.outputs)
        print(f"{d.type_name:22s} in[{ins}] out[{outs}]")
    return 0


def _cmd_run(args) -> int:
    try:
        with open(args.graph, "r", encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        return _fail(f"file not found: {args.graph}", USAGE_ERROR)
    try:
        graph = parse_graph_json(text)
        plan = validate_and_plan(graph)
    except JdspError as e:
        return _fail(f"[{e.code}] {e}", USAGE_ERROR)

    try:
        outputs = execute_plan(plan, graph, args.seed)
    except JdspError as e:
        return _fail(f"[{e.code}] {e}", RUNTIME_ERROR)

    wanted = []
    if args.output:
        for ref in args.output:
            if ref.count(".") != 1:
                return _fail(f"bad output reference '{ref}'", USAGE_ERROR)
            bid, port = ref.split(".")
            if bid not in outputs or port not in outputs[bid]:
                return _fail(f"output '{ref}' not produced by the graph", USAGE_ERROR)
            wanted.append((bid, port))
    else:
        for bid in sink_blocks(graph):
            for port in outputs[bid]:
                wanted.append((bid, port))

    types = {b.id: b.type_name for b in graph.blocks}
    os.makedirs(args.out, exist_ok=True)
    for bid, port in wanted:
        ext, text = value_to_file(outputs[bid][port], types[bid], port)
        path = os.path.join(args.out, f"{bid}.{port}.{ext}")
        _atomic_write(path, text)
        print(path)
    return 0


def _cmd_design(args) -> int:
    try:
        if args.design_kind == "fir":
            if args.method == "kaiser":
                if args.passband_edge is None or args.stopband_edge is None:
                    return _fail("kaiser needs --passband-edge and --stopband-edge", USAGE_ERROR)
                tf = design_fir_kaiser(FirSpec(args.passband_edge, args.stopband_edge,
                                               args.atten_db, args.kind))
            elif args.method == "sampling":
                if args.desired_mag is None:
                    return _fail("sampling needs --desired-mag", USAGE_ERROR)
                tf = design_fir_freq_sampling(_floats(args.desired_mag))
            else:
                if args.bands is None or args.desired is None:
                    return _fail("equiripple needs --bands and --desired", USAGE_ERROR)
                bands = []
                for pair in args.bands.split(","):
                    lo, _, hi = pair.partition(":")
                    bands.append((float(lo), float(hi)))
                desired = _floats(args.desired)
                weights = _floats(args.weights) if args.weights else [1.0] * len(bands)
                tf = design_fir_equiripple(
                    EquirippleSpec(args.numtaps, bands, desired, weights)).tf
        else:
            family = {"cheby1": "chebyshev1", "cheby2": "chebyshev2"}.get(args.family, args.family)
            tf = design_iir(IirSpec(family=family, kind=args.kind, order=args.order,
                                    cutoff=args.cutoff,
                                    passband_ripple_db=args.ripple_db,
                                    stopband_atten_db=args.atten_db))
    except JdspError as e:
        return _fail(f"[{e.code}] {e}", RUNTIME_ERROR)
    except ValueError as e:
        return _fail(str(e), USAGE_ERROR)

    text = json.dumps(tf.to_json_dict(), indent=2)
    if args.out:
        _atomic_write(args.out, text)
        print(args.out)
    else:
        print(text)
    return 0


def _cmd_qft_codec(args) -> int:
    try:
        with open(args.input, "rb") as fh:
            signal = read_wav(fh.read())
    except FileNotFoundError:
        return _fail(f"file not found: {args.input}", USAGE_ERROR)
    except JdspError as e:
        return _fail(f"[{e.code}] {e}", USAGE_ERROR)

    samples = signal.samples[: 2 ** args.qubits]  # keep the leading window
    try:
        cfg = CodecConfig(args.qubits, args.peaks,
                          NoiseModel(args.noise_p, args.shots, args.seed))
        result = qft_codec(samples, cfg)
    except JdspError as e:
        return _fail(f"[{e.code}] {e}", RUNTIME_ERROR)

    report = {
        "n_qubits": args.qubits,
        "peaks": args.peaks,
        "depolarizing_p": args.noise_p,
        "shots": args.shots,
        "seed": args.seed,
        "snr_db": result.snr_db,
        "retained_bins": result.retained_bins,
    }
    text = _dump_json(report)
    if args.save_audio:
        audio = Signal(np.clip(result.reconstructed, -1.0, 1.0), signal.sample_rate_hz)
        _atomic_write(args.save_audio, write_wav(audio))
    if args.out:
        _atomic_write(args.out, text)
        print(args.out)
    else:
        print(text)
    return 0


def _read_features_csv(path: str) -> FeatureMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise JdspError("features file is empty")
    header = [h.strip().lower() for h in lines[0].split(",")]
    if header[0] != "label" or len(header) < 3:
        raise JdspError("features CSV must start with header label,f1,f2[,f3]")
    rows, labels = [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(header):
            raise JdspError(f"row '{ln}' does not match the header")
        labels.append(int(float(parts[0])))
        rows.append([float(v) for v in parts[1:]])
    return FeatureMatrix(np.asarray(rows), np.asarray(labels), tuple(header[1:]))


def _cmd_kmeans(args) -> int:
    try:
        features = _read_features_csv(args.input)
    except FileNotFoundError:
        return _fail(f"file not found: {args.input}", USAGE_ERROR)
    except (JdspError, ValueError) as e:
        return _fail(str(e), USAGE_ERROR)
    try:
        cm, _model = phoneme_experiment(features, args.k, args.seed)
    except JdspError as e:
        return _fail(f"[{e.code}] {e}", RUNTIME_ERROR)
    text = cm.to_csv()
    if args.out:
        _atomic_write(args.out, text)
        print(args.out)
    else:
        print(text)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(assets_dir=args.assets)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "catalog": _cmd_catalog,
        "run": _cmd_run,
        "design": _cmd_design,
        "qft-codec": _cmd_qft_codec,
        "kmeans": _cmd_kmeans,
        "serve": _cmd_serve,
    }[args.command]
    try:
        return handler(args)
    except BlockRuntimeError as e:
        return _fail(f"[{e.code}] {e}", RUNTIME_ERROR)
    except JdspError as e:
        return _fail(f"[{e.code}] {e}", RUNTIME_ERROR)


if __name__ == "__main__":
    sys.exit(main())
