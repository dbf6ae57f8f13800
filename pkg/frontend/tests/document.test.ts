import { describe, expect, it } from "vitest";

import { CanvasDocument, EditError, autoLayout } from "../src/document.js";
import type { BlockDescriptor } from "../src/types.js";

// trimmed copy of the engine catalog: enough structure for the editor logic
export const MINI_CATALOG: BlockDescriptor[] = [
  {
    type_name: "SignalGenerator",
    params: [
      { name: "kind", kind: "enum", default: "sine", enum_values: ["sine", "square", "impulse", "white_noise"] },
      { name: "freq_hz", kind: "real", default: 1000.0, min: 1e-9, max: 1e9 },
      { name: "length", kind: "int", default: 256, min: 1, max: 1048576 },
      { name: "sample_rate_hz", kind: "real", default: 8000.0, min: 1e-6, max: 1e9 },
    ],
    inputs: [],
    outputs: [{ name: "out", kind: "signal" }],
  },
  {
    type_name: "Window",
    params: [{ name: "kind", kind: "enum", default: "hann", enum_values: ["hann", "hamming"] }],
    inputs: [{ name: "in", kind: "signal", required: true }],
    outputs: [{ name: "out", kind: "signal" }],
  },
  {
    type_name: "Fft",
    params: [{ name: "nfft", kind: "int", default: 0, min: 0, max: 4194304 }],
    inputs: [{ name: "in", kind: "signal", required: true }],
    outputs: [{ name: "out", kind: "spectrum" }],
  },
  {
    type_name: "FirIirFilter",
    params: [
      { name: "b", kind: "real-array", default: [1.0] },
      { name: "a", kind: "real-array", default: [1.0] },
    ],
    inputs: [
      { name: "in", kind: "signal", required: true },
      { name: "tf", kind: "transfer_function", required: false },
    ],
    outputs: [{ name: "out", kind: "signal" }],
  },
];

function demoDoc(): CanvasDocument {
  const doc = new CanvasDocument(MINI_CATALOG);
  const gen = doc.addBlock("SignalGenerator");
  const win = doc.addBlock("Window");
  const fft = doc.addBlock("Fft");
  doc.addWire({ blockId: gen, port: "out" }, { blockId: win, port: "in" });
  doc.addWire({ blockId: win, port: "out" }, { blockId: fft, port: "in" });
  return doc;
}

describe("document editing", () => {
  it("adds blocks with descriptor defaults", () => {
    const doc = new CanvasDocument(MINI_CATALOG);
    const id = doc.addBlock("SignalGenerator");
    expect(doc.block(id).params).toEqual({
      kind: "sine", freq_hz: 1000.0, length: 256, sample_rate_hz: 8000.0,
    });
    expect(doc.layout.has(id)).toBe(true);
  });

  it("rejects kind-mismatched wires with the kind names", () => {
    const doc = new CanvasDocument(MINI_CATALOG);
    const gen = doc.addBlock("SignalGenerator");
    const flt = doc.addBlock("FirIirFilter");
    expect(() =>
      doc.addWire({ blockId: gen, port: "out" }, { blockId: flt, port: "tf" }),
    ).toThrowError(/signal output to transfer_function input/);
  });

  it("rejects duplicate input wires", () => {
    const doc = new CanvasDocument(MINI_CATALOG);
    const gen = doc.addBlock("SignalGenerator");
    const w1 = doc.addBlock("Window");
    const w2 = doc.addBlock("Window");
    doc.addWire({ blockId: gen, port: "out" }, { blockId: w1, port: "in" });
    expect(() =>
      doc.addWire({ blockId: w2, port: "out" }, { blockId: w1, port: "in" }),
    ).toThrowError(/already has a wire/);
  });

  it("rejects wires that would close a feedback loop", () => {
    const doc = new CanvasDocument(MINI_CATALOG);
    const w1 = doc.addBlock("Window");
    const w2 = doc.addBlock("Window");
    const w3 = doc.addBlock("Window");
    doc.addWire({ blockId: w1, port: "out" }, { blockId: w2, port: "in" });
    doc.addWire({ blockId: w2, port: "out" }, { blockId: w3, port: "in" });
    expect(() =>
      doc.addWire({ blockId: w3, port: "out" }, { blockId: w1, port: "in" }),
    ).toThrowError(/feedback/);
    const solo = doc.addBlock("Window");
    expect(() =>
      doc.addWire({ blockId: solo, port: "out" }, { blockId: solo, port: "in" }),
    ).toThrowError(/feedback/);
  });

  it("enforces parameter bounds and enums", () => {
    const doc = new CanvasDocument(MINI_CATALOG);
    const gen = doc.addBlock("SignalGenerator");
    doc.setParam(gen, "length", 64);
    expect(doc.block(gen).params.length).toBe(64);
    expect(() => doc.setParam(gen, "length", 0)).toThrowError(/below minimum/);
    expect(() => doc.setParam(gen, "length", 2.5)).toThrowError(/integer/);
    expect(() => doc.setParam(gen, "kind", "noise")).toThrowError(/one of/);
    expect(() => doc.setParam(gen, "bogus", 1)).toThrowError(EditError);
  });

  it("removing a block removes its wires", () => {
    const doc = demoDoc();
    const winId = doc.blocks[1].id;
    doc.removeBlock(winId);
    expect(doc.blocks).toHaveLength(2);
    expect(doc.wires).toHaveLength(0);
  });

  it("double-click delete of a wire is modelled by removeWire", () => {
    const doc = demoDoc();
    doc.removeWire(doc.wires[0].to);
    expect(doc.wires).toHaveLength(1);
  });
});

describe("save / load round trip", () => {
  it("save -> load -> save is byte-identical", () => {
    const doc = demoDoc();
    doc.setParam(doc.blocks[0].id, "freq_hz", 1234.5);
    doc.moveBlock(doc.blocks[0].id, { x: 101, y: 77 });
    const s1 = doc.serialize();
    const restored = CanvasDocument.load(s1, MINI_CATALOG);
    const s2 = restored.serialize();
    expect(s2).toBe(s1);
    expect(CanvasDocument.load(s2, MINI_CATALOG).serialize()).toBe(s1);
  });

  it("round trip preserves layout and params exactly", () => {
    const doc = demoDoc();
    doc.moveBlock(doc.blocks[1].id, { x: 400, y: 250 });
    const restored = CanvasDocument.load(doc.serialize(), MINI_CATALOG);
    expect(restored.layout.get(doc.blocks[1].id)).toEqual({ x: 400, y: 250 });
    expect(restored.blocks).toEqual(
      doc.toGraphJson().blocks.map((b) => ({ id: b.id, type: b.type, params: b.params })),
    );
    expect(restored.dirty).toBe(false);
  });

  it("engine-produced JSON without ui key gets an auto layout", () => {
    const headless = JSON.stringify({
      version: 1,
      blocks: [
        { id: "a", type: "SignalGenerator", params: {} },
        { id: "b", type: "Window", params: {} },
        { id: "c", type: "Fft", params: {} },
      ],
      wires: [
        { from: "a.out", to: "b.in" },
        { from: "b.out", to: "c.in" },
      ],
    });
    const doc = CanvasDocument.load(headless, MINI_CATALOG);
    const xa = doc.layout.get("a")!.x;
    const xb = doc.layout.get("b")!.x;
    const xc = doc.layout.get("c")!.x;
    expect(xa).toBeLessThan(xb);
    expect(xb).toBeLessThan(xc); // left-to-right by topological depth
  });

  it("rejects other versions and broken files without touching the doc", () => {
    expect(() => CanvasDocument.load('{"version": 2, "blocks": []}', MINI_CATALOG))
      .toThrowError(/version/);
    expect(() => CanvasDocument.load("{nope", MINI_CATALOG)).toThrowError(/JSON/);
    expect(() =>
      CanvasDocument.load(JSON.stringify({
        version: 1,
        blocks: [{ id: "a", type: "SignalGenerator", params: { length: -4 } }],
        wires: [],
      }), MINI_CATALOG),
    ).toThrowError(/below minimum/);
  });
});

describe("auto layout", () => {
  it("columns follow topological depth for every block", () => {
    const doc = demoDoc();
    autoLayout(doc);
    const [gen, win, fft] = doc.blocks.map((b) => doc.layout.get(b.id)!);
    expect(gen.x).toBeLessThan(win.x);
    expect(win.x).toBeLessThan(fft.x);
  });
});
