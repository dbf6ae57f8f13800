// Canvas plot renderers for run outputs. Pure functions over a structural
// 2D-context interface so tests can drive them with a recording stub; the
// renderers never copy or mutate the payload arrays they are given.

import type { OutputPayload } from "./types.js";
import { asNumber } from "./types.js";

export interface DrawContext {
  canvas: { width: number; height: number };
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
  textBaseline: CanvasTextBaseline;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  rect(x: number, y: number, w: number, h: number): void;
  stroke(): void;
  fill(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export interface Panel {
  title: string;
  renderer: string;
  /** The exact arrays plotted, by reference: byte-comparable to the payload. */
  data: OutputPayload;
}

const MARGIN = { left: 46, right: 12, top: 22, bottom: 26 };
const AXIS = "#8a93a6";
const TRACE = "#4da3ff";
const TRACE2 = "#ffb454";

export function panelFor(ref: string, payload: OutputPayload): Panel {
  return { title: `${ref} [${payload.block_type ?? payload.kind}]`, renderer: rendererFor(payload), data: payload };
}

export function rendererFor(payload: OutputPayload): string {
  if (payload.kind === "signal") return "time";
  if (payload.kind === "spectrum") return "spectrum";
  if (payload.kind === "scalar") return "readout";
  if (payload.kind === "label_vector") return "stems";
  if (payload.kind === "transfer_function") return "coefficients";
  if (payload.block_type === "PoleZero") return "polezero";
  if (payload.block_type === "FrequencyResponse") return "response";
  if (payload.block_type === "ConfusionMatrix") return "heatmap";
  return "table";
}

export function renderPanel(ctx: DrawContext, panel: Panel): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#11141b";
  ctx.fillRect(0, 0, width, height);
  ctx.fillStyle = "#d7dce6";
  ctx.font = "12px system-ui, sans-serif";
  ctx.textAlign = "left";
  ctx.textBaseline = "top";
  ctx.fillText(panel.title, 8, 5);

  switch (panel.renderer) {
    case "time": {
      const p = panel.data;
      if (p.kind === "signal") drawSeries(ctx, p.samples.map(asNumber));
      break;
    }
    case "spectrum": {
      const p = panel.data;
      if (p.kind === "spectrum") {
        const mags = p.re.map((re, i) => Math.hypot(asNumber(re), asNumber(p.im[i])));
        drawBars(ctx, mags.slice(0, Math.floor(mags.length / 2) + 1));
      }
      break;
    }
    case "response": {
      const p = panel.data;
      if (p.kind === "feature_matrix") drawResponse(ctx, p.rows.map((r) => r.map(asNumber)), p.columns ?? []);
      break;
    }
    case "polezero": {
      const p = panel.data;
      if (p.kind === "feature_matrix") drawPoleZero(ctx, p.rows.map((r) => r.map(asNumber)));
      break;
    }
    case "heatmap": {
      const p = panel.data;
      if (p.kind === "feature_matrix") drawHeatmap(ctx, p.rows.map((r) => r.map(asNumber)), p.columns ?? []);
      break;
    }
    case "stems": {
      const p = panel.data;
      if (p.kind === "label_vector") drawStems(ctx, p.values);
      break;
    }
    case "readout": {
      const p = panel.data;
      if (p.kind === "scalar") {
        ctx.font = "26px system-ui, sans-serif";
        ctx.textAlign = "center";
        ctx.textBaseline = "middle";
        ctx.fillStyle = TRACE;
        const v = asNumber(p.value);
        const text = v === Infinity ? "inf" : Number.isFinite(v) ? v.toPrecision(6) : String(v);
        ctx.fillText(text, ctx.canvas.width / 2, ctx.canvas.height / 2);
      }
      break;
    }
    case "coefficients": {
      const p = panel.data;
      if (p.kind === "transfer_function") {
        drawStems(ctx, p.b.map(asNumber));
      }
      break;
    }
    default: {
      const p = panel.data;
      if (p.kind === "feature_matrix" && p.rows.length) {
        drawSeries(ctx, p.rows.map((r) => asNumber(r[r.length - 1])));
      }
    }
  }
}

interface Frame {
  x0: number;
  y0: number;
  w: number;
  h: number;
  lo: number;
  hi: number;
}

function frameFor(ctx: DrawContext, values: number[]): Frame {
  const finite = values.filter((v) => Number.isFinite(v));
  let lo = Math.min(0, ...finite);
  let hi = Math.max(0, ...finite);
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  const pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const frame = {
    x0: MARGIN.left,
    y0: MARGIN.top,
    w: ctx.canvas.width - MARGIN.left - MARGIN.right,
    h: ctx.canvas.height - MARGIN.top - MARGIN.bottom,
    lo,
    hi,
  };
  ctx.strokeStyle = AXIS;
  ctx.lineWidth = 1;
  ctx.strokeRect(frame.x0, frame.y0, frame.w, frame.h);
  ctx.fillStyle = AXIS;
  ctx.font = "10px system-ui, sans-serif";
  ctx.textAlign = "right";
  ctx.textBaseline = "middle";
  ctx.fillText(hi.toPrecision(3), frame.x0 - 4, frame.y0 + 4);
  ctx.fillText(lo.toPrecision(3), frame.x0 - 4, frame.y0 + frame.h - 4);
  return frame;
}

function toY(frame: Frame, v: number): number {
  const t = (v - frame.lo) / (frame.hi - frame.lo);
  return frame.y0 + frame.h * (1 - t);
}

function drawSeries(ctx: DrawContext, values: number[]): void {
  if (!values.length) return;
  const frame = frameFor(ctx, values);
  ctx.strokeStyle = TRACE;
  ctx.lineWidth = 1.4;
  ctx.beginPath();
  const step = frame.w / Math.max(values.length - 1, 1);
  values.forEach((v, i) => {
    const x = frame.x0 + i * step;
    const y = toY(frame, Number.isFinite(v) ? v : frame.hi);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

function drawBars(ctx: DrawContext, mags: number[]): void {
  if (!mags.length) return;
  const frame = frameFor(ctx, mags);
  ctx.fillStyle = TRACE;
  const step = frame.w / mags.length;
  mags.forEach((v, i) => {
    const y = toY(frame, v);
    ctx.fillRect(frame.x0 + i * step, y, Math.max(step - 1, 1), frame.y0 + frame.h - y);
  });
}

function drawStems(ctx: DrawContext, values: number[]): void {
  if (!values.length) return;
  const frame = frameFor(ctx, values);
  const zero = toY(frame, 0);
  const step = frame.w / Math.max(values.length, 1);
  ctx.strokeStyle = TRACE;
  ctx.fillStyle = TRACE;
  values.forEach((v, i) => {
    const x = frame.x0 + (i + 0.5) * step;
    const y = toY(frame, v);
    ctx.beginPath();
    ctx.moveTo(x, zero);
    ctx.lineTo(x, y);
    ctx.stroke();
    ctx.beginPath();
    ctx.arc(x, y, 2.5, 0, 2 * Math.PI);
    ctx.fill();
  });
}

function drawResponse(ctx: DrawContext, rows: number[][], columns: string[]): void {
  // FrequencyResponse matrix: omega, mag, mag_db, phase_rad, re, im
  const dbCol = Math.max(columns.indexOf("mag_db"), 0);
  const phaseCol = columns.indexOf("phase_rad");
  const db = rows.map((r) => Math.max(r[dbCol], -120));
  const frame = frameFor(ctx, db);
  const step = frame.w / Math.max(db.length - 1, 1);
  ctx.strokeStyle = TRACE;
  ctx.lineWidth = 1.4;
  ctx.beginPath();
  db.forEach((v, i) => {
    const x = frame.x0 + i * step;
    if (i === 0) ctx.moveTo(x, toY(frame, v));
    else ctx.lineTo(x, toY(frame, v));
  });
  ctx.stroke();
  if (phaseCol >= 0) {
    ctx.strokeStyle = TRACE2;
    ctx.lineWidth = 1;
    ctx.beginPath();
    rows.forEach((r, i) => {
      const t = (r[phaseCol] + Math.PI) / (2 * Math.PI);
      const y = frame.y0 + frame.h * (1 - t);
      const x = frame.x0 + i * step;
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  }
}

function drawPoleZero(ctx: DrawContext, rows: number[][]): void {
  const { width, height } = ctx.canvas;
  const cx = width / 2;
  const cy = (height + MARGIN.top) / 2;
  const extent = Math.max(1.2, ...rows.map((r) => Math.hypot(r[1], r[2]) * 1.1));
  const radius = Math.min(width, height - MARGIN.top) / 2 - 14;
  const scale = radius / extent;
  ctx.strokeStyle = AXIS;
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.arc(cx, cy, scale, 0, 2 * Math.PI); // unit circle
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(cx - radius, cy);
  ctx.lineTo(cx + radius, cy);
  ctx.moveTo(cx, cy - radius);
  ctx.lineTo(cx, cy + radius);
  ctx.stroke();
  for (const row of rows) {
    const [kind, re, im] = row;
    const x = cx + re * scale;
    const y = cy - im * scale;
    if (kind >= 0.5) {
      ctx.strokeStyle = TRACE2; // pole: x marker
      ctx.beginPath();
      ctx.moveTo(x - 4, y - 4);
      ctx.lineTo(x + 4, y + 4);
      ctx.moveTo(x - 4, y + 4);
      ctx.lineTo(x + 4, y - 4);
      ctx.stroke();
    } else {
      ctx.strokeStyle = TRACE; // zero: o marker
      ctx.beginPath();
      ctx.arc(x, y, 4, 0, 2 * Math.PI);
      ctx.stroke();
    }
  }
}

function drawHeatmap(ctx: DrawContext, rows: number[][], columns: string[]): void {
  if (!rows.length) return;
  const n = rows.length;
  const m = rows[0].length;
  const frame = {
    x0: MARGIN.left,
    y0: MARGIN.top,
    w: ctx.canvas.width - MARGIN.left - MARGIN.right,
    h: ctx.canvas.height - MARGIN.top - MARGIN.bottom,
  };
  const peak = Math.max(1, ...rows.flat());
  const cw = frame.w / m;
  const chh = frame.h / n;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < m; j++) {
      const t = rows[i][j] / peak;
      ctx.fillStyle = `rgba(77, 163, 255, ${0.12 + 0.85 * t})`;
      ctx.fillRect(frame.x0 + j * cw, frame.y0 + i * chh, cw - 1, chh - 1);
      ctx.fillStyle = "#e8edf6";
      ctx.font = "11px system-ui, sans-serif";
      ctx.textAlign = "center";
      ctx.textBaseline = "middle";
      ctx.fillText(String(rows[i][j]), frame.x0 + (j + 0.5) * cw, frame.y0 + (i + 0.5) * chh);
    }
  }
  ctx.fillStyle = AXIS;
  columns.forEach((label, j) => {
    if (j < m) ctx.fillText(label, frame.x0 + (j + 0.5) * cw, frame.y0 - 8);
  });
}
