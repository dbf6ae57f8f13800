import { describe, expect, it } from "vitest";

import { panelFor, rendererFor, renderPanel, type DrawContext } from "../src/plots.js";
import type { OutputPayload, RunResponse } from "../src/types.js";

/** Recording stub standing in for CanvasRenderingContext2D. */
function stubContext(): DrawContext & { calls: string[] } {
  const calls: string[] = [];
  const record = (name: string) => (..._args: unknown[]) => { calls.push(name); };
  return {
    calls,
    canvas: { width: 360, height: 220 },
    fillStyle: "",
    strokeStyle: "",
    lineWidth: 1,
    font: "",
    textAlign: "left" as CanvasTextAlign,
    textBaseline: "top" as CanvasTextBaseline,
    beginPath: record("beginPath"),
    moveTo: record("moveTo"),
    lineTo: record("lineTo"),
    arc: record("arc"),
    rect: record("rect"),
    stroke: record("stroke"),
    fill: record("fill"),
    fillRect: record("fillRect"),
    strokeRect: record("strokeRect"),
    clearRect: record("clearRect"),
    fillText: record("fillText"),
  };
}

describe("renderer dispatch", () => {
  it("maps payload kinds and block types to renderers", () => {
    expect(rendererFor({ kind: "signal", sample_rate_hz: 1, samples: [] })).toBe("time");
    expect(rendererFor({ kind: "spectrum", sample_rate_hz: 1, re: [], im: [] })).toBe("spectrum");
    expect(rendererFor({ kind: "scalar", value: 3 })).toBe("readout");
    expect(rendererFor({ kind: "label_vector", values: [] })).toBe("stems");
    expect(rendererFor({ kind: "feature_matrix", block_type: "PoleZero", columns: null, rows: [] }))
      .toBe("polezero");
    expect(rendererFor({ kind: "feature_matrix", block_type: "FrequencyResponse", columns: null, rows: [] }))
      .toBe("response");
    expect(rendererFor({ kind: "feature_matrix", block_type: "ConfusionMatrix", columns: null, rows: [] }))
      .toBe("heatmap");
  });
});

describe("panel rendering", () => {
  const payloads: OutputPayload[] = [
    { kind: "signal", block_type: "SignalGenerator", sample_rate_hz: 8000, samples: [0, 1, 0, -1] },
    { kind: "spectrum", block_type: "Fft", sample_rate_hz: 8000, re: [4, 0, 0, 0], im: [0, 0, 0, 0] },
    {
      kind: "feature_matrix", block_type: "FrequencyResponse",
      columns: ["omega", "mag", "mag_db", "phase_rad", "re", "im"],
      rows: [[0, 1, 0, 0, 1, 0], [1.5, 0.5, -6.02, -0.7, 0.3, -0.4]],
    },
    {
      kind: "feature_matrix", block_type: "PoleZero", columns: ["kind", "re", "im"],
      rows: [[0, -1, 0], [1, 0.5, 0.3], [1, 0.5, -0.3]],
    },
    {
      kind: "feature_matrix", block_type: "ConfusionMatrix", columns: ["0", "1"],
      rows: [[12, 1], [0, 14]],
    },
    { kind: "scalar", block_type: "SnrMeter", value: "inf" },
    { kind: "label_vector", block_type: "PeakPicker", values: [3, 9, 17] },
    { kind: "transfer_function", block_type: "FilterDesigner", b: [0.2, 0.6, 0.2], a: [1] },
  ];

  it("renders every payload kind on a bare 2D context", () => {
    for (const payload of payloads) {
      const ctx = stubContext();
      renderPanel(ctx, panelFor("blk.out", payload));
      expect(ctx.calls.length).toBeGreaterThan(2);
      expect(ctx.calls[0]).toBe("clearRect");
    }
  });

  it("keeps the plotted arrays byte-identical to the payload and never copies", () => {
    for (const payload of payloads) {
      const before = JSON.stringify(payload);
      const panel = panelFor("blk.out", payload);
      expect(panel.data).toBe(payload); // same object, not a transformed copy
      renderPanel(stubContext(), panel);
      expect(JSON.stringify(panel.data)).toBe(before); // rendering mutates nothing
    }
  });

  it("builds one panel per run output in response order", () => {
    const response: RunResponse = {
      engine_version: "0.1.0",
      outputs: {
        "fft1.out": payloads[1],
        "fr1.out": payloads[2],
        "pz1.out": payloads[3],
      },
    };
    const panels = Object.entries(response.outputs).map(([ref, p]) => panelFor(ref, p));
    expect(panels.map((p) => p.renderer)).toEqual(["spectrum", "response", "polezero"]);
    panels.forEach((panel, i) => {
      expect(panel.data).toBe(Object.values(response.outputs)[i]);
    });
  });
});
