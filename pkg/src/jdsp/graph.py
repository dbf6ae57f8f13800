"""Declarative block-diagram model: strict JSON parsing, validation (types,
bounds, wire kinds, cycles), topological planning, and seeded execution."""

from __future__ import annotations

import hashlib
import heapq
import json
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BlockRuntimeError,
    CycleDetected,
    DanglingWire,
    DuplicateInputWire,
    GraphFormatError,
    JdspError,
    KindMismatch,
    MissingInput,
    ParamOutOfBounds,
    UnknownBlockType,
    UnknownParam,
)

VALUE_KINDS = ("signal", "spectrum", "transfer_function", "feature_matrix",
               "scalar", "label_vector")
PARAM_KINDS = ("int", "real", "string", "enum", "real-array")

GRAPH_VERSION = 1
_TOP_LEVEL_KEYS = {"version", "blocks", "wires", "ui"}  # "ui" is reserved for editors
_BLOCK_KEYS = {"id", "type", "params"}
_WIRE_KEYS = {"from", "to"}


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str
    default: object
    min: float = None
    max: float = None
    enum_values: tuple = None


@dataclass(frozen=True)
class PortSpec:
    name: str
    value_kind: str
    required: bool = True  # inputs only; unwired optional ports use block defaults


@dataclass(frozen=True)
class BlockDescriptor:
    type_name: str
    params: tuple
    inputs: tuple
    outputs: tuple

    def to_json_dict(self) -> dict:
        return {
            "type_name": self.type_name,
            "params": [
                {
                    "name": p.name,
                    "kind": p.kind,
                    "default": list(p.default) if p.kind == "real-array" else p.default,
                    **({"min": p.min} if p.min is not None else {}),
                    **({"max": p.max} if p.max is not None else {}),
                    **({"enum_values": list(p.enum_values)} if p.enum_values else {}),
                }
                for p in self.params
            ],
            "inputs": [
                {"name": p.name, "kind": p.value_kind, "required": p.required}
                for p in self.inputs
            ],
            "outputs": [{"name": p.name, "kind": p.value_kind} for p in self.outputs],
        }


@dataclass
class BlockInstance:
    id: str
    type_name: str
    params: dict = field(default_factory=dict)


@dataclass
class Wire:
    src: str  # "blockId.portName"
    dst: str


@dataclass
class Graph:
    version: int = GRAPH_VERSION
    blocks: list = field(default_factory=list)
    wires: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "version": self.version,
            "blocks": [
                {"id": b.id, "type": b.type_name, "params": dict(b.params)}
                for b in self.blocks
            ],
            "wires": [{"from": w.src, "to": w.dst} for w in self.wires],
        }


@dataclass
class ExecutionPlan:
    order: list
    resolved_params: dict  # block id -> fully defaulted, bounds-checked params


def parse_graph_json(obj) -> Graph:
    """Strict version-1 graph parser. Unknown fields are rejected everywhere
    except the whitelisted top-level "ui" key, which editors own."""
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as e:
            raise GraphFormatError(f"not valid JSON: {e}") from e
    if not isinstance(obj, dict):
        raise GraphFormatError("graph JSON must be an object")
    unknown = set(obj) - _TOP_LEVEL_KEYS
    if unknown:
        raise GraphFormatError(f"unknown top-level fields: {sorted(unknown)}")
    if obj.get("version") != GRAPH_VERSION:
        raise GraphFormatError(f"version must be {GRAPH_VERSION}, got {obj.get('version')!r}")

    blocks = []
    seen_ids = set()
    for i, raw in enumerate(obj.get("blocks", [])):
        if not isinstance(raw, dict):
            raise GraphFormatError(f"blocks[{i}] must be an object")
        unknown = set(raw) - _BLOCK_KEYS
        if unknown:
            raise GraphFormatError(f"blocks[{i}] has unknown fields: {sorted(unknown)}")
        bid = raw.get("id")
        btype = raw.get("type")
        if not isinstance(bid, str) or not bid:
            raise GraphFormatError(f"blocks[{i}] needs a non-empty string id")
        if not isinstance(btype, str) or not btype:
            raise GraphFormatError(f"block '{bid}' needs a non-empty string type")
        if bid in seen_ids:
            raise GraphFormatError(f"duplicate block id '{bid}'")
        seen_ids.add(bid)
        params = raw.get("params", {})
        if not isinstance(params, dict):
            raise GraphFormatError(f"block '{bid}' params must be an object")
        blocks.append(BlockInstance(bid, btype, dict(params)))

    wires = []
    for i, raw in enumerate(obj.get("wires", [])):
        if not isinstance(raw, dict):
            raise GraphFormatError(f"wires[{i}] must be an object")
        unknown = set(raw) - _WIRE_KEYS
        if unknown:
            raise GraphFormatError(f"wires[{i}] has unknown fields: {sorted(unknown)}")
        src, dst = raw.get("from"), raw.get("to")
        if not isinstance(src, str) or not isinstance(dst, str):
            raise GraphFormatError(f"wires[{i}] endpoints must be strings")
        wires.append(Wire(src, dst))

    return Graph(GRAPH_VERSION, blocks, wires)


def _split_endpoint(endpoint: str):
    if endpoint.count(".") != 1:
        raise DanglingWire(f"endpoint '{endpoint}' is not of the form blockId.portName")
    return tuple(endpoint.split("."))


def _coerce_param(block_id: str, spec: ParamSpec, value):
    where = f"block '{block_id}' param '{spec.name}'"
    if spec.kind == "int":
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise ParamOutOfBounds(f"{where} expects an integer, got {value!r}")
        value = int(value)
    elif spec.kind == "real":
        if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
            raise ParamOutOfBounds(f"{where} expects a number, got {value!r}")
        value = float(value)
        if not np.isfinite(value):
            raise ParamOutOfBounds(f"{where} must be finite")
    elif spec.kind == "string":
        if not isinstance(value, str):
            raise ParamOutOfBounds(f"{where} expects a string, got {value!r}")
    elif spec.kind == "enum":
        if not isinstance(value, str) or value not in spec.enum_values:
            raise ParamOutOfBounds(
                f"{where} must be one of {list(spec.enum_values)}, got {value!r}"
            )
    else:  # real-array
        if not isinstance(value, (list, tuple, np.ndarray)):
            raise ParamOutOfBounds(f"{where} expects an array of numbers")
        try:
            arr = [float(v) for v in value]
        except (TypeError, ValueError):
            raise ParamOutOfBounds(f"{where} expects an array of numbers") from None
        if not all(np.isfinite(arr)):
            raise ParamOutOfBounds(f"{where} entries must be finite")
        value = arr
    if spec.kind in ("int", "real"):
        if spec.min is not None and value < spec.min:
            raise ParamOutOfBounds(f"{where} = {value} below minimum {spec.min}")
        if spec.max is not None and value > spec.max:
            raise ParamOutOfBounds(f"{where} = {value} above maximum {spec.max}")
    return value


def validate_and_plan(graph: Graph, registry=None) -> ExecutionPlan:
    """Type-check blocks/params/wires and return a topological execution plan
    (ties broken by block id, so the order is reproducible)."""
    registry = registry if registry is not None else _default_registry()

    descriptors = {}
    for block in graph.blocks:
        if block.type_name not in registry:
            raise UnknownBlockType(f"unknown block type '{block.type_name}'")
        descriptors[block.id] = registry[block.type_name].descriptor

    resolved = {}
    for block in graph.blocks:
        desc = descriptors[block.id]
        by_name = {p.name: p for p in desc.params}
        params = {}
        for name, value in block.params.items():
            if name not in by_name:
                raise UnknownParam(f"block '{block.id}' has unknown param '{name}'")
            params[name] = _coerce_param(block.id, by_name[name], value)
        for p in desc.params:
            if p.name not in params:
                params[p.name] = list(p.default) if p.kind == "real-array" else p.default
        resolved[block.id] = params

    seen_dst = set()
    adjacency = defaultdict(list)
    indegree = {block.id: 0 for block in graph.blocks}
    for wire in graph.wires:
        src_id, src_port = _split_endpoint(wire.src)
        dst_id, dst_port = _split_endpoint(wire.dst)
        if src_id not in descriptors:
            raise DanglingWire(f"wire source block '{src_id}' does not exist")
        if dst_id not in descriptors:
            raise DanglingWire(f"wire target block '{dst_id}' does not exist")
        src_spec = next((p for p in descriptors[src_id].outputs if p.name == src_port), None)
        if src_spec is None:
            raise DanglingWire(f"'{wire.src}' is not an output port")
        dst_spec = next((p for p in descriptors[dst_id].inputs if p.name == dst_port), None)
        if dst_spec is None:
            raise DanglingWire(f"'{wire.dst}' is not an input port")
        if src_spec.value_kind != dst_spec.value_kind:
            raise KindMismatch(
                f"wire {wire.src} -> {wire.dst} connects {src_spec.value_kind} "
                f"to {dst_spec.value_kind}"
            )
        if wire.dst in seen_dst:
            raise DuplicateInputWire(f"input port '{wire.dst}' has multiple wires")
        seen_dst.add(wire.dst)
        adjacency[src_id].append(dst_id)
        indegree[dst_id] += 1

    order = []
    ready = sorted(bid for bid, deg in indegree.items() if deg == 0)
    heapq.heapify(ready)
    remaining = dict(indegree)
    while ready:
        bid = heapq.heappop(ready)
        order.append(bid)
        for nb in adjacency[bid]:
            remaining[nb] -= 1
            if remaining[nb] == 0:
                heapq.heappush(ready, nb)
    if len(order) != len(graph.blocks):
        raise CycleDetected(_find_cycle(adjacency, {b for b, d in remaining.items() if d > 0}))

    return ExecutionPlan(order=order, resolved_params=resolved)


def _find_cycle(adjacency, candidates) -> list:
    # peel nodes that cannot be on a cycle (no successor inside the residue)
    core = set(candidates)
    changed = True
    while changed:
        changed = False
        for n in list(core):
            if not any(m in core for m in adjacency[n]):
                core.discard(n)
                changed = True
    path, seen = [], {}
    node = sorted(core)[0]
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = sorted(n for n in adjacency[node] if n in core)[0]
    return path[seen[node]:]


class BlockContext:
    """Per-block execution context: resolved params, wired inputs, and a
    deterministic per-block random generator derived from (run seed, block id).
    Deriving per block keeps every block's output independent of unrelated
    blocks, so deleting a sink cannot shift another block's noise."""

    def __init__(self, block_id: str, params: dict, inputs: dict, run_seed: int):
        self.block_id = block_id
        self.params = params
        self.inputs = inputs
        self._run_seed = run_seed
        self._rng = None

    @property
    def rng(self) -> np.random.Generator:
        if self._rng is None:
            digest = hashlib.sha256(self.block_id.encode("utf-8")).digest()
            block_key = int.from_bytes(digest[:8], "big")
            seed = self._run_seed & 0xFFFFFFFFFFFFFFFF
            self._rng = np.random.default_rng(np.random.SeedSequence([seed, block_key]))
        return self._rng

    def seed_for(self, label: str) -> int:
        """Stable sub-seed for ops that take an integer seed themselves."""
        digest = hashlib.sha256(f"{self.block_id}:{label}".encode("utf-8")).digest()
        return (self._run_seed & 0xFFFFFFFFFFFFFFFF) ^ int.from_bytes(digest[:8], "big")


def execute_plan(plan: ExecutionPlan, graph: Graph, seed: int, registry=None) -> dict:
    """Evaluate each block once in plan order; whole-buffer semantics.

    Returns {block_id: {port_name: value}}. The first failing block aborts
    the run with BlockRuntimeError naming it.
    """
    registry = registry if registry is not None else _default_registry()
    by_id = {b.id: b for b in graph.blocks}
    wire_map = {}
    for wire in graph.wires:
        wire_map[_split_endpoint(wire.dst)] = _split_endpoint(wire.src)

    outputs = {}
    for bid in plan.order:
        block = by_id[bid]
        bdef = registry[block.type_name]
        inputs = {}
        for port in bdef.descriptor.inputs:
            key = (bid, port.name)
            if key in wire_map:
                src_id, src_port = wire_map[key]
                inputs[port.name] = outputs[src_id][src_port]
            elif port.required:
                raise MissingInput(f"required input '{bid}.{port.name}' is unwired")
        ctx = BlockContext(bid, plan.resolved_params[bid], inputs, seed)
        try:
            result = bdef.run(ctx)
        except JdspError as e:
            raise BlockRuntimeError(bid, e) from e
        except Exception as e:  # engine bug or numeric blowup inside a block
            raise BlockRuntimeError(bid, e) from e
        expected = {p.name for p in bdef.descriptor.outputs}
        if set(result) != expected:
            raise BlockRuntimeError(
                bid, JdspError(f"block produced ports {sorted(result)}, declared {sorted(expected)}")
            )
        outputs[bid] = result
    return outputs


def sink_blocks(graph: Graph) -> list:
    """Blocks with no outgoing wires, in block order."""
    sources = {_split_endpoint(w.src)[0] for w in graph.wires}
    return [b.id for b in graph.blocks if b.id not in sources]


def _default_registry():
    from .catalog import registry

    return registry()
