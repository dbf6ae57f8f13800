// Editable canvas document: the graph plus per-block layout, with client-side
// checks that are a strict subset of the engine's validation. Anything this
// document lets through must pass POST /api/graph/validate.

import type {
  BlockDescriptor,
  BlockLayout,
  GraphBlock,
  GraphJson,
  GraphWire,
  ParamDescriptor,
  ParamValue,
  RunResponse,
  ValueKind,
} from "./types.js";

export class EditError extends Error {}

export interface PortRef {
  blockId: string;
  port: string;
}

export function portKey(ref: PortRef): string {
  return `${ref.blockId}.${ref.port}`;
}

export class CanvasDocument {
  private catalog: Map<string, BlockDescriptor>;
  blocks: GraphBlock[] = [];
  wires: GraphWire[] = [];
  layout: Map<string, BlockLayout> = new Map();
  dirty = false;
  lastRun: RunResponse | null = null;
  private counter = 0;

  constructor(catalog: BlockDescriptor[]) {
    this.catalog = new Map(catalog.map((d) => [d.type_name, d]));
  }

  descriptor(typeName: string): BlockDescriptor {
    const desc = this.catalog.get(typeName);
    if (!desc) throw new EditError(`unknown block type '${typeName}'`);
    return desc;
  }

  descriptorFor(blockId: string): BlockDescriptor {
    return this.descriptor(this.block(blockId).type);
  }

  block(blockId: string): GraphBlock {
    const block = this.blocks.find((b) => b.id === blockId);
    if (!block) throw new EditError(`no block '${blockId}'`);
    return block;
  }

  /** Add a block with the descriptor's defaults; returns its generated id. */
  addBlock(typeName: string, at?: BlockLayout): string {
    const desc = this.descriptor(typeName);
    let id: string;
    do {
      this.counter += 1;
      id = `${lowerFirst(typeName)}${this.counter}`;
    } while (this.blocks.some((b) => b.id === id));
    const params: Record<string, ParamValue> = {};
    for (const p of desc.params) {
      params[p.name] = Array.isArray(p.default) ? [...p.default] : p.default;
    }
    this.blocks.push({ id, type: typeName, params });
    this.layout.set(id, at ?? { x: 40 + 60 * (this.blocks.length % 8), y: 40 + 90 * Math.floor(this.blocks.length / 8) });
    this.dirty = true;
    return id;
  }

  removeBlock(blockId: string): void {
    this.block(blockId);
    this.blocks = this.blocks.filter((b) => b.id !== blockId);
    this.wires = this.wires.filter(
      (w) => w.from.split(".")[0] !== blockId && w.to.split(".")[0] !== blockId,
    );
    this.layout.delete(blockId);
    this.dirty = true;
  }

  moveBlock(blockId: string, at: BlockLayout): void {
    this.block(blockId);
    this.layout.set(blockId, { x: at.x, y: at.y });
    this.dirty = true;
  }

  outputKind(ref: PortRef): ValueKind {
    const desc = this.descriptorFor(ref.blockId);
    const port = desc.outputs.find((p) => p.name === ref.port);
    if (!port) throw new EditError(`'${portKey(ref)}' is not an output port`);
    return port.kind;
  }

  inputKind(ref: PortRef): ValueKind {
    const desc = this.descriptorFor(ref.blockId);
    const port = desc.inputs.find((p) => p.name === ref.port);
    if (!port) throw new EditError(`'${portKey(ref)}' is not an input port`);
    return port.kind;
  }

  /**
   * Wire an output to an input. Mirrors the engine's KindMismatch,
   * DuplicateInputWire, and CycleDetected checks so a wired document always
   * validates server-side.
   */
  addWire(from: PortRef, to: PortRef): void {
    const srcKind = this.outputKind(from);
    const dstKind = this.inputKind(to);
    if (srcKind !== dstKind) {
      throw new EditError(
        `cannot connect ${srcKind} output to ${dstKind} input`,
      );
    }
    const toKey = portKey(to);
    if (this.wires.some((w) => w.to === toKey)) {
      throw new EditError(`input '${toKey}' already has a wire`);
    }
    if (from.blockId === to.blockId || this.reaches(to.blockId, from.blockId)) {
      throw new EditError("wire would create a feedback loop");
    }
    this.wires.push({ from: portKey(from), to: toKey });
    this.dirty = true;
  }

  removeWire(toKey: string): void {
    this.wires = this.wires.filter((w) => w.to !== toKey);
    this.dirty = true;
  }

  private reaches(start: string, goal: string): boolean {
    const adjacency = new Map<string, string[]>();
    for (const w of this.wires) {
      const src = w.from.split(".")[0];
      const dst = w.to.split(".")[0];
      adjacency.set(src, [...(adjacency.get(src) ?? []), dst]);
    }
    const stack = [start];
    const seen = new Set<string>();
    while (stack.length) {
      const node = stack.pop()!;
      if (node === goal) return true;
      if (seen.has(node)) continue;
      seen.add(node);
      stack.push(...(adjacency.get(node) ?? []));
    }
    return false;
  }

  /** Set a parameter, enforcing the descriptor's type/bounds/enum rules. */
  setParam(blockId: string, name: string, value: ParamValue): void {
    const block = this.block(blockId);
    const desc = this.descriptorFor(blockId);
    const param = desc.params.find((p) => p.name === name);
    if (!param) throw new EditError(`block '${blockId}' has no param '${name}'`);
    block.params[name] = checkParamValue(param, value);
    this.dirty = true;
  }

  /** Version-1 graph JSON with the layout stored under the "ui" key. */
  toGraphJson(includeUi = true): GraphJson {
    const graph: GraphJson = {
      version: 1,
      blocks: this.blocks.map((b) => ({
        id: b.id,
        type: b.type,
        params: sortedParams(b.params),
      })),
      wires: this.wires.map((w) => ({ from: w.from, to: w.to })),
    };
    if (includeUi) {
      const layout: Record<string, BlockLayout> = {};
      for (const b of this.blocks) {
        const at = this.layout.get(b.id) ?? { x: 0, y: 0 };
        layout[b.id] = { x: at.x, y: at.y };
      }
      graph.ui = { layout };
    }
    return graph;
  }

  /** Canonical serialization; save -> load -> save is byte-identical. */
  serialize(): string {
    return JSON.stringify(this.toGraphJson(), null, 2);
  }

  /** Restore a document from graph JSON; layout falls back to auto-layout. */
  static load(text: string, catalog: BlockDescriptor[]): CanvasDocument {
    let raw: unknown;
    try {
      raw = JSON.parse(text);
    } catch (e) {
      throw new EditError(`not valid JSON: ${String(e)}`);
    }
    if (typeof raw !== "object" || raw === null) {
      throw new EditError("graph JSON must be an object");
    }
    const graph = raw as Partial<GraphJson>;
    if (graph.version !== 1) {
      throw new EditError(`unsupported graph version ${String(graph.version)}`);
    }
    const doc = new CanvasDocument(catalog);
    for (const b of graph.blocks ?? []) {
      if (!b.id || !b.type) throw new EditError("block needs id and type");
      if (doc.blocks.some((x) => x.id === b.id)) {
        throw new EditError(`duplicate block id '${b.id}'`);
      }
      const desc = doc.descriptor(b.type);
      const params: Record<string, ParamValue> = {};
      for (const p of desc.params) {
        params[p.name] = Array.isArray(p.default) ? [...p.default] : p.default;
      }
      for (const [name, value] of Object.entries(b.params ?? {})) {
        const param = desc.params.find((p) => p.name === name);
        if (!param) throw new EditError(`block '${b.id}' has no param '${name}'`);
        params[name] = checkParamValue(param, value);
      }
      doc.blocks.push({ id: b.id, type: b.type, params });
    }
    for (const w of graph.wires ?? []) {
      const [fromId, fromPort] = splitEndpoint(w.from);
      const [toId, toPort] = splitEndpoint(w.to);
      doc.addWire({ blockId: fromId, port: fromPort }, { blockId: toId, port: toPort });
    }
    const saved = graph.ui?.layout ?? {};
    const missing = doc.blocks.filter((b) => !(b.id in saved));
    for (const b of doc.blocks) {
      if (b.id in saved) doc.layout.set(b.id, { x: saved[b.id].x, y: saved[b.id].y });
    }
    if (missing.length) {
      autoLayout(doc, missing.map((b) => b.id));
    }
    doc.dirty = false;
    return doc;
  }
}

function lowerFirst(name: string): string {
  return name.charAt(0).toLowerCase() + name.slice(1);
}

function splitEndpoint(endpoint: string): [string, string] {
  const parts = endpoint.split(".");
  if (parts.length !== 2 || !parts[0] || !parts[1]) {
    throw new EditError(`bad wire endpoint '${endpoint}'`);
  }
  return [parts[0], parts[1]];
}

function sortedParams(params: Record<string, ParamValue>): Record<string, ParamValue> {
  const out: Record<string, ParamValue> = {};
  for (const key of Object.keys(params).sort()) {
    const v = params[key];
    out[key] = Array.isArray(v) ? [...v] : v;
  }
  return out;
}

export function checkParamValue(param: ParamDescriptor, value: unknown): ParamValue {
  const where = `param '${param.name}'`;
  switch (param.kind) {
    case "int": {
      if (typeof value !== "number" || !Number.isInteger(value)) {
        throw new EditError(`${where} expects an integer`);
      }
      checkBounds(param, value);
      return value;
    }
    case "real": {
      if (typeof value !== "number" || !Number.isFinite(value)) {
        throw new EditError(`${where} expects a finite number`);
      }
      checkBounds(param, value);
      return value;
    }
    case "string": {
      if (typeof value !== "string") throw new EditError(`${where} expects a string`);
      return value;
    }
    case "enum": {
      if (typeof value !== "string" || !(param.enum_values ?? []).includes(value)) {
        throw new EditError(
          `${where} must be one of ${(param.enum_values ?? []).join(", ")}`,
        );
      }
      return value;
    }
    case "real-array": {
      if (!Array.isArray(value) || value.some((v) => typeof v !== "number" || !Number.isFinite(v))) {
        throw new EditError(`${where} expects an array of finite numbers`);
      }
      return [...(value as number[])];
    }
  }
}

function checkBounds(param: ParamDescriptor, value: number): void {
  if (param.min !== undefined && value < param.min) {
    throw new EditError(`param '${param.name}' = ${value} below minimum ${param.min}`);
  }
  if (param.max !== undefined && value > param.max) {
    throw new EditError(`param '${param.name}' = ${value} above maximum ${param.max}`);
  }
}

/** Left-to-right grid placement by topological depth (imported headless graphs). */
export function autoLayout(doc: CanvasDocument, onlyIds?: string[]): void {
  const depth = new Map<string, number>();
  for (const b of doc.blocks) depth.set(b.id, 0);
  let changed = true;
  let guard = 0;
  while (changed && guard < doc.blocks.length + 1) {
    changed = false;
    guard += 1;
    for (const w of doc.wires) {
      const src = w.from.split(".")[0];
      const dst = w.to.split(".")[0];
      const want = (depth.get(src) ?? 0) + 1;
      if ((depth.get(dst) ?? 0) < want) {
        depth.set(dst, want);
        changed = true;
      }
    }
  }
  const perColumn = new Map<number, number>();
  const targets = new Set(onlyIds ?? doc.blocks.map((b) => b.id));
  for (const b of doc.blocks) {
    const col = depth.get(b.id) ?? 0;
    const row = perColumn.get(col) ?? 0;
    perColumn.set(col, row + 1);
    if (targets.has(b.id)) {
      doc.layout.set(b.id, { x: 60 + col * 190, y: 50 + row * 110 });
    }
  }
}
