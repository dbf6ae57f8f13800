"""Shared value serialization for the CLI and the HTTP service, so both
paths emit numerically identical payloads."""

from __future__ import annotations

import math

import numpy as np

from .classify import FeatureMatrix
from .filters import TransferFunction
from .signals import Signal, export_series_csv
from .spectral import Spectrum, spectrum_csv


def value_kind(value) -> str:
    if isinstance(value, Signal):
        return "signal"
    if isinstance(value, Spectrum):
        return "spectrum"
    if isinstance(value, TransferFunction):
        return "transfer_function"
    if isinstance(value, FeatureMatrix):
        return "feature_matrix"
    if isinstance(value, (float, int)):
        return "scalar"
    return "label_vector"


def _json_float(v: float):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v


def _json_floats(arr) -> list:
    return [_json_float(v) for v in np.asarray(arr, dtype=np.float64)]


def value_to_json(value) -> dict:
    kind = value_kind(value)
    if kind == "signal":
        return {"kind": kind, "sample_rate_hz": value.sample_rate_hz,
                "samples": _json_floats(value.samples)}
    if kind == "spectrum":
        return {"kind": kind, "sample_rate_hz": value.sample_rate_hz,
                "re": _json_floats(value.bins.real), "im": _json_floats(value.bins.imag)}
    if kind == "transfer_function":
        return {"kind": kind, "b": _json_floats(value.b), "a": _json_floats(value.a)}
    if kind == "feature_matrix":
        return {"kind": kind,
                "columns": list(value.columns) if value.columns else None,
                "rows": [_json_floats(row) for row in value.rows]}
    if kind == "scalar":
        return {"kind": kind, "value": _json_float(value)}
    return {"kind": "label_vector", "values": [int(v) for v in value]}


def series_length(value) -> int:
    kind = value_kind(value)
    if kind == "signal":
        return len(value.samples)
    if kind == "spectrum":
        return len(value.bins)
    if kind == "feature_matrix":
        return int(value.rows.size)
    if kind == "label_vector":
        return len(value)
    return 1


def value_to_file(value, block_type: str = "", port: str = "value") -> tuple[str, str]:
    """(extension, text) for writing one sink output to disk. Signal CSVs
    label the data column after the producing port (e.g. low/high subbands)."""
    kind = value_kind(value)
    if kind == "signal":
        idx = np.arange(len(value.samples), dtype=np.float64)
        return "csv", export_series_csv("n", idx, [(port or "value", value.samples)])
    if kind == "spectrum":
        return "csv", spectrum_csv(value)
    if kind == "transfer_function":
        import json

        return "json", json.dumps({"b": list(map(float, value.b)),
                                   "a": list(map(float, value.a))}, indent=2)
    if kind == "feature_matrix":
        if block_type == "PoleZero":
            lines = ["kind,re,im"]
            for row in value.rows:
                name = "pole" if row[0] >= 0.5 else "zero"
                lines.append(f"{name},{format(row[1], '.17g')},{format(row[2], '.17g')}")
            return "csv", "\n".join(lines)
        cols = value.columns or tuple(f"c{i}" for i in range(value.rows.shape[1]))
        lines = [",".join(cols)]
        for row in value.rows:
            lines.append(",".join(format(float(v), ".17g") for v in row))
        return "csv", "\n".join(lines)
    if kind == "scalar":
        import json

        return "json", json.dumps({"value": _json_float(value)})
    lines = ["index,label"] + [f"{i},{int(v)}" for i, v in enumerate(value)]
    return "csv", "\n".join(lines)
