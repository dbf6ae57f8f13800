"""Stateless HTTP service: catalog, graph validation/execution, filter
design, and the QFT codec, plus static hosting for the browser UI.

Every request builds an isolated engine execution; identical bodies produce
byte-identical response bodies (timing travels in the X-Timing-Ms header so
it cannot break that guarantee).
"""

from __future__ import annotations

import base64
import math
import time

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .catalog import block_catalog
from .design import (
    EquirippleSpec,
    FirSpec,
    IirSpec,
    design_fir_equiripple,
    design_fir_freq_sampling,
    design_fir_kaiser,
    design_iir,
)
from .errors import (
    BlockRuntimeError,
    InvalidSpec,
    JdspError,
    NoConvergence,
    NumericalFailure,
    ResourceLimit,
    UnknownOutput,
)
from .graph import execute_plan, parse_graph_json, sink_blocks, validate_and_plan
from .quantum import CodecConfig, NoiseModel, qft_codec
from .serialize import series_length, value_to_json
from .signals import read_wav

MAX_SERIES_SAMPLES = 1 << 22
_ENGINE_FAULTS = (BlockRuntimeError, NoConvergence, NumericalFailure)


def _error_response(exc: JdspError) -> JSONResponse:
    status = 500 if isinstance(exc, _ENGINE_FAULTS) else 400
    payload = {"error": exc.code, "detail": str(exc)}
    if isinstance(exc, BlockRuntimeError):
        payload["block_id"] = exc.block_id
    return JSONResponse(payload, status_code=status)


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception as e:
        raise InvalidSpec(f"malformed JSON body: {e}") from e
    if not isinstance(body, dict):
        raise InvalidSpec("request body must be a JSON object")
    return body


def create_app(assets_dir: str = None) -> FastAPI:
    app = FastAPI(title="jdsp", version=__version__)

    @app.exception_handler(JdspError)
    async def _jdsp_error(_request, exc: JdspError):
        return _error_response(exc)

    @app.get("/api/catalog")
    def get_catalog():
        return JSONResponse([d.to_json_dict() for d in block_catalog()])

    @app.post("/api/graph/validate")
    async def post_validate(request: Request):
        body = await _json_body(request)
        graph = parse_graph_json(body.get("graph", body))
        plan = validate_and_plan(graph)
        return JSONResponse({"ok": True, "order": plan.order})

    @app.post("/api/graph/execute")
    async def post_execute(request: Request):
        body = await _json_body(request)
        if "graph" not in body:
            raise InvalidSpec("request needs a 'graph' field")
        graph = parse_graph_json(body["graph"])
        seed = body.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise InvalidSpec("seed must be an integer")
        plan = validate_and_plan(graph)

        started = time.perf_counter()
        outputs = execute_plan(plan, graph, seed)
        elapsed_ms = (time.perf_counter() - started) * 1000.0

        requested = body.get("outputs")
        if requested is None:
            refs = [(bid, port) for bid in sink_blocks(graph) for port in outputs[bid]]
        else:
            refs = []
            for ref in requested:
                if not isinstance(ref, str) or ref.count(".") != 1:
                    raise UnknownOutput(f"bad output reference {ref!r}")
                bid, port = ref.split(".")
                if bid not in outputs or port not in outputs[bid]:
                    raise UnknownOutput(f"output '{ref}' not produced by this graph")
                refs.append((bid, port))

        types = {b.id: b.type_name for b in graph.blocks}
        payload = {}
        for bid, port in refs:
            value = outputs[bid][port]
            if series_length(value) > MAX_SERIES_SAMPLES:
                raise ResourceLimit(
                    f"output '{bid}.{port}' exceeds {MAX_SERIES_SAMPLES} samples"
                )
            entry = value_to_json(value)
            entry["block_type"] = types[bid]
            payload[f"{bid}.{port}"] = entry
        return JSONResponse(
            {"outputs": payload, "engine_version": __version__},
            headers={"X-Timing-Ms": format(elapsed_ms, ".3f")},
        )

    @app.post("/api/design/fir")
    async def post_design_fir(request: Request):
        body = await _json_body(request)
        method = body.get("method")
        if method == "kaiser":
            tf = design_fir_kaiser(FirSpec(
                passband_edge=_need(body, "passband_edge"),
                stopband_edge=_need(body, "stopband_edge"),
                stopband_atten_db=_need(body, "stopband_atten_db"),
                kind=body.get("kind", "lowpass"),
            ))
        elif method == "sampling":
            tf = design_fir_freq_sampling(_need(body, "desired_mag"))
        elif method == "equiripple":
            bands = [(float(lo), float(hi)) for lo, hi in _need(body, "bands")]
            tf = design_fir_equiripple(EquirippleSpec(
                numtaps=_need(body, "numtaps"),
                bands=bands,
                desired=_need(body, "desired"),
                weight=body.get("weight"),
            )).tf
        else:
            raise InvalidSpec(f"method must be kaiser|sampling|equiripple, got {method!r}")
        return JSONResponse(tf.to_json_dict())

    @app.post("/api/design/iir")
    async def post_design_iir(request: Request):
        body = await _json_body(request)
        tf = design_iir(IirSpec(
            family=_need(body, "family"),
            kind=body.get("kind", "lowpass"),
            order=_need(body, "order"),
            cutoff=_need(body, "cutoff"),
            passband_ripple_db=body.get("passband_ripple_db"),
            stopband_atten_db=body.get("stopband_atten_db"),
        ))
        return JSONResponse(tf.to_json_dict())

    @app.post("/api/qft/codec")
    async def post_qft_codec(request: Request):
        body = await _json_body(request)
        n_qubits = _need(body, "n_qubits")
        if "samples" in body:
            samples = np.asarray(body["samples"], dtype=np.float64)
        elif "wav_base64" in body:
            samples = read_wav(base64.b64decode(body["wav_base64"])).samples
        else:
            raise InvalidSpec("request needs 'samples' or 'wav_base64'")
        samples = samples[: 2 ** int(n_qubits)]
        cfg = CodecConfig(
            n_qubits=n_qubits,
            peaks_retained=_need(body, "peaks"),
            noise=NoiseModel(
                depolarizing_p=body.get("depolarizing_p", 0.0),
                shots=body.get("shots", 0),
                seed=body.get("seed", 0),
            ),
        )
        result = qft_codec(samples, cfg)
        snr = "inf" if math.isinf(result.snr_db) else result.snr_db
        return JSONResponse({
            "n_qubits": cfg.n_qubits,
            "peaks": cfg.peaks_retained,
            "depolarizing_p": cfg.noise.depolarizing_p,
            "shots": cfg.noise.shots,
            "seed": cfg.noise.seed,
            "snr_db": snr,
            "retained_bins": result.retained_bins,
        })

    if assets_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=assets_dir, html=True), name="ui")
    else:
        @app.get("/")
        def index():
            return JSONResponse({"service": "jdsp", "version": __version__,
                                 "hint": "start with --assets to serve the UI"})

    return app


def _need(body: dict, key: str):
    if key not in body:
        raise InvalidSpec(f"missing required field '{key}'")
    return body[key]
