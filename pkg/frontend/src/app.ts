// Editor shell: palette, SVG wiring canvas, parameter forms, run + plots.
// All computation happens server-side; this file only edits the document,
// round-trips JSON, and draws what the engine returns.

import { EngineApi, ServerError } from "./api.js";
import { CanvasDocument, EditError, autoLayout, portKey, type PortRef } from "./document.js";
import { panelFor, renderPanel, type Panel } from "./plots.js";
import type { BlockDescriptor, ParamDescriptor, RunResponse } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const BLOCK_W = 150;
const PORT_GAP = 22;

interface DragState {
  kind: "block" | "wire";
  blockId: string;
  port?: string;
  dx: number;
  dy: number;
}

export class EditorApp {
  private api: EngineApi;
  private catalog: BlockDescriptor[] = [];
  private doc!: CanvasDocument;
  private selected: string | null = null;
  private failedBlock: string | null = null;
  private drag: DragState | null = null;
  private rubber: SVGPathElement | null = null;
  private running = false;

  private root: HTMLElement;
  private palette!: HTMLElement;
  private svg!: SVGSVGElement;
  private paramsPane!: HTMLElement;
  private plotsPane!: HTMLElement;
  private banner!: HTMLElement;
  private seedInput!: HTMLInputElement;
  private runButton!: HTMLButtonElement;

  constructor(root: HTMLElement, api: EngineApi = new EngineApi()) {
    this.root = root;
    this.api = api;
  }

  async start(): Promise<void> {
    this.catalog = await this.api.catalog();
    this.doc = new CanvasDocument(this.catalog);
    this.buildShell();
    this.redraw();
  }

  // --- shell -----------------------------------------------------------------

  private buildShell(): void {
    this.root.innerHTML = "";
    const toolbar = el("div", "toolbar");
    const title = el("span", "brand");
    title.textContent = "jdsp block editor";
    toolbar.append(title);

    this.runButton = document.createElement("button");
    this.runButton.textContent = "Run";
    this.runButton.addEventListener("click", () => void this.run());
    this.seedInput = document.createElement("input");
    this.seedInput.type = "number";
    this.seedInput.value = "0";
    this.seedInput.title = "seed";
    const reroll = document.createElement("button");
    reroll.textContent = "Re-roll";
    reroll.title = "new random seed, then run";
    reroll.addEventListener("click", () => {
      this.seedInput.value = String(Math.floor(Math.random() * 1e9));
      void this.run();
    });
    const save = document.createElement("button");
    save.textContent = "Save";
    save.addEventListener("click", () => this.download());
    const load = document.createElement("button");
    load.textContent = "Load";
    const file = document.createElement("input");
    file.type = "file";
    file.accept = "application/json";
    file.style.display = "none";
    file.addEventListener("change", () => void this.upload(file));
    load.addEventListener("click", () => file.click());
    const remove = document.createElement("button");
    remove.textContent = "Delete block";
    remove.addEventListener("click", () => this.deleteSelected());
    toolbar.append(this.runButton, label("seed"), this.seedInput, reroll, save, load, file, remove);

    this.banner = el("div", "banner hidden");
    const body = el("div", "body");
    this.palette = el("div", "palette");
    const canvasWrap = el("div", "canvas-wrap");
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.classList.add("graph");
    canvasWrap.append(this.svg);
    this.paramsPane = el("div", "params");
    body.append(this.palette, canvasWrap, this.paramsPane);
    this.plotsPane = el("div", "plots");
    this.root.append(toolbar, this.banner, body, this.plotsPane);

    for (const desc of this.catalog) {
      const item = el("div", "palette-item");
      item.textContent = desc.type_name;
      item.title = describePorts(desc);
      item.draggable = true;
      item.addEventListener("dragstart", (ev) => {
        ev.dataTransfer?.setData("text/jdsp-block", desc.type_name);
      });
      item.addEventListener("click", () => {
        const id = this.doc.addBlock(desc.type_name);
        this.selected = id;
        this.redraw();
      });
      this.palette.append(item);
    }
    this.svg.addEventListener("dragover", (ev) => ev.preventDefault());
    this.svg.addEventListener("drop", (ev) => {
      ev.preventDefault();
      const typeName = ev.dataTransfer?.getData("text/jdsp-block");
      if (!typeName) return;
      const rect = this.svg.getBoundingClientRect();
      const id = this.doc.addBlock(typeName, {
        x: ev.clientX - rect.left - BLOCK_W / 2,
        y: ev.clientY - rect.top - 16,
      });
      this.selected = id;
      this.redraw();
    });

    this.svg.addEventListener("pointermove", (ev) => this.onPointerMove(ev));
    this.svg.addEventListener("pointerup", (ev) => this.onPointerUp(ev));
    document.addEventListener("keydown", (ev) => {
      if (ev.key === "Delete" || ev.key === "Backspace") this.deleteSelected();
    });
  }

  // --- canvas ------------------------------------------------------------------

  private redraw(): void {
    this.svg.innerHTML = "";
    for (const wire of this.doc.wires) {
      this.svg.append(this.wirePath(wire.from, wire.to));
    }
    for (const block of this.doc.blocks) {
      this.svg.append(this.blockGroup(block.id));
    }
    this.renderParams();
  }

  private portPosition(blockId: string, port: string, isOutput: boolean): { x: number; y: number } {
    const at = this.doc.layout.get(blockId) ?? { x: 0, y: 0 };
    const desc = this.doc.descriptorFor(blockId);
    const ports = isOutput ? desc.outputs : desc.inputs;
    const index = Math.max(ports.findIndex((p) => p.name === port), 0);
    return {
      x: at.x + (isOutput ? BLOCK_W : 0),
      y: at.y + 34 + index * PORT_GAP,
    };
  }

  private wirePath(fromKey: string, toKey: string): SVGPathElement {
    const [fb, fp] = fromKey.split(".");
    const [tb, tp] = toKey.split(".");
    const a = this.portPosition(fb, fp, true);
    const b = this.portPosition(tb, tp, false);
    const path = document.createElementNS(SVG_NS, "path");
    const mid = Math.max(40, (b.x - a.x) / 2);
    path.setAttribute("d", `M ${a.x} ${a.y} C ${a.x + mid} ${a.y}, ${b.x - mid} ${b.y}, ${b.x} ${b.y}`);
    path.classList.add("wire");
    path.addEventListener("dblclick", () => {
      this.doc.removeWire(toKey);
      this.redraw();
    });
    return path;
  }

  private blockGroup(blockId: string): SVGGElement {
    const block = this.doc.block(blockId);
    const desc = this.doc.descriptorFor(blockId);
    const at = this.doc.layout.get(blockId) ?? { x: 0, y: 0 };
    const height = 34 + Math.max(desc.inputs.length, desc.outputs.length, 1) * PORT_GAP;

    const g = document.createElementNS(SVG_NS, "g");
    g.setAttribute("transform", `translate(${at.x}, ${at.y})`);
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("width", String(BLOCK_W));
    rect.setAttribute("height", String(height));
    rect.setAttribute("rx", "7");
    rect.classList.add("block");
    if (blockId === this.selected) rect.classList.add("selected");
    if (blockId === this.failedBlock) rect.classList.add("failed");
    g.append(rect);

    const name = textNode(block.type, BLOCK_W / 2, 14, "block-type");
    const id = textNode(block.id, BLOCK_W / 2, 26, "block-id");
    g.append(name, id);

    rect.addEventListener("pointerdown", (ev) => {
      this.selected = blockId;
      this.drag = { kind: "block", blockId, dx: ev.offsetX - at.x, dy: ev.offsetY - at.y };
      this.redraw();
    });

    desc.inputs.forEach((port, i) => {
      const c = portCircle(0, 34 + i * PORT_GAP, "input");
      c.dataset.block = blockId;
      c.dataset.port = port.name;
      g.append(c, textNode(port.name, 9, 37 + i * PORT_GAP, "port-label in"));
    });
    desc.outputs.forEach((port, i) => {
      const c = portCircle(BLOCK_W, 34 + i * PORT_GAP, "output");
      c.addEventListener("pointerdown", (ev) => {
        ev.stopPropagation();
        this.drag = { kind: "wire", blockId, port: port.name, dx: 0, dy: 0 };
        this.rubber = document.createElementNS(SVG_NS, "path");
        this.rubber.classList.add("wire", "rubber");
        this.svg.append(this.rubber);
      });
      g.append(c, textNode(port.name, BLOCK_W - 9, 37 + i * PORT_GAP, "port-label out"));
    });
    return g;
  }

  private onPointerMove(ev: PointerEvent): void {
    if (!this.drag) return;
    const point = this.svgPoint(ev);
    if (this.drag.kind === "block") {
      this.doc.moveBlock(this.drag.blockId, { x: point.x - this.drag.dx, y: point.y - this.drag.dy });
      this.redraw();
    } else if (this.rubber) {
      const a = this.portPosition(this.drag.blockId, this.drag.port!, true);
      const mid = Math.max(40, (point.x - a.x) / 2);
      this.rubber.setAttribute(
        "d",
        `M ${a.x} ${a.y} C ${a.x + mid} ${a.y}, ${point.x - mid} ${point.y}, ${point.x} ${point.y}`,
      );
    }
  }

  private onPointerUp(ev: PointerEvent): void {
    if (this.drag?.kind === "wire") {
      const target = ev.target as Element | null;
      this.rubber?.remove();
      this.rubber = null;
      if (target instanceof SVGCircleElement && target.classList.contains("input")) {
        const to: PortRef = { blockId: target.dataset.block!, port: target.dataset.port! };
        const from: PortRef = { blockId: this.drag.blockId, port: this.drag.port! };
        try {
          this.doc.addWire(from, to);
          this.clearBanner();
        } catch (e) {
          if (e instanceof EditError) this.showBanner(e.message, "warn");
          else throw e;
        }
        this.redraw();
      }
    }
    this.drag = null;
  }

  private svgPoint(ev: PointerEvent): { x: number; y: number } {
    const rect = this.svg.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  }

  private deleteSelected(): void {
    if (!this.selected) return;
    this.doc.removeBlock(this.selected);
    this.selected = null;
    this.redraw();
  }

  // --- parameter forms ------------------------------------------------------------

  private renderParams(): void {
    this.paramsPane.innerHTML = "";
    if (!this.selected) {
      this.paramsPane.append(muted("select a block to edit its parameters"));
      return;
    }
    const block = this.doc.block(this.selected);
    const desc = this.doc.descriptorFor(this.selected);
    const heading = el("h3");
    heading.textContent = `${block.id} : ${block.type}`;
    this.paramsPane.append(heading);
    for (const param of desc.params) {
      this.paramsPane.append(this.paramRow(block.id, param, block.params[param.name]));
    }
    if (!desc.params.length) this.paramsPane.append(muted("no parameters"));
  }

  private paramRow(blockId: string, param: ParamDescriptor, current: unknown): HTMLElement {
    const row = el("label", "param-row");
    const caption = el("span");
    caption.textContent = param.name;
    row.append(caption);
    const apply = (value: unknown, input: HTMLElement) => {
      try {
        this.doc.setParam(blockId, param.name, value as never);
        input.classList.remove("invalid");
        this.clearBanner();
      } catch (e) {
        if (e instanceof EditError) {
          input.classList.add("invalid");
          this.showBanner(e.message, "warn");
        } else throw e;
      }
    };
    if (param.kind === "enum") {
      const select = document.createElement("select");
      for (const option of param.enum_values ?? []) {
        const opt = document.createElement("option");
        opt.value = option;
        opt.textContent = option;
        if (option === current) opt.selected = true;
        select.append(opt);
      }
      select.addEventListener("change", () => apply(select.value, select));
      row.append(select);
    } else {
      const input = document.createElement("input");
      input.value = Array.isArray(current) ? current.join(", ") : String(current);
      if (param.kind === "int" || param.kind === "real") {
        if (param.min !== undefined) input.title = `min ${param.min}, max ${param.max}`;
      }
      input.addEventListener("change", () => {
        if (param.kind === "string") apply(input.value, input);
        else if (param.kind === "real-array") {
          const parts = input.value.split(",").map((s) => Number(s.trim())).filter((v) => !Number.isNaN(v));
          apply(parts, input);
        } else apply(Number(input.value), input);
      });
      row.append(input);
    }
    return row;
  }

  // --- run + plots -------------------------------------------------------------------

  private async run(): Promise<void> {
    if (this.running) return;
    this.running = true;
    this.runButton.disabled = true;
    this.failedBlock = null;
    try {
      const graph = this.doc.toGraphJson(false);
      await this.api.validate(graph);
      const seed = Number(this.seedInput.value) || 0;
      const response = await this.api.execute(graph, seed);
      this.doc.lastRun = response;
      this.clearBanner();
      this.renderPlots(response);
    } catch (e) {
      if (e instanceof ServerError) {
        this.failedBlock = e.blockId ?? null;
        this.showBanner(`${e.code}: ${e.message}`, "error");
      } else {
        this.showBanner(String(e), "error");
      }
    } finally {
      this.running = false;
      this.runButton.disabled = false;
      this.redraw();
    }
  }

  buildPanels(response: RunResponse): Panel[] {
    return Object.entries(response.outputs).map(([ref, payload]) => panelFor(ref, payload));
  }

  private renderPlots(response: RunResponse): void {
    this.plotsPane.innerHTML = "";
    for (const panel of this.buildPanels(response)) {
      const holder = el("div", "panel");
      const canvas = document.createElement("canvas");
      canvas.width = 360;
      canvas.height = 220;
      holder.append(canvas);
      this.plotsPane.append(holder);
      const ctx = canvas.getContext("2d");
      if (ctx) renderPanel(ctx, panel);
    }
  }

  // --- save / load ----------------------------------------------------------------------

  private download(): void {
    const blob = new Blob([this.doc.serialize()], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "graph.json";
    a.click();
    URL.revokeObjectURL(a.href);
    this.doc.dirty = false;
  }

  private async upload(input: HTMLInputElement): Promise<void> {
    const file = input.files?.[0];
    input.value = "";
    if (!file) return;
    try {
      const doc = CanvasDocument.load(await file.text(), this.catalog);
      this.doc = doc;
      this.selected = null;
      this.failedBlock = null;
      this.clearBanner();
      this.redraw();
    } catch (e) {
      // document untouched on parse failure
      this.showBanner(e instanceof EditError ? e.message : String(e), "error");
    }
  }

  private showBanner(message: string, tone: "warn" | "error"): void {
    this.banner.textContent = message;
    this.banner.className = `banner ${tone}`;
  }

  private clearBanner(): void {
    this.banner.className = "banner hidden";
  }
}

function el(tag: string, className = ""): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  return node;
}

function muted(text: string): HTMLElement {
  const node = el("p", "muted");
  node.textContent = text;
  return node;
}

function label(text: string): HTMLElement {
  const node = el("span", "toolbar-label");
  node.textContent = text;
  return node;
}

function textNode(text: string, x: number, y: number, className: string): SVGTextElement {
  const node = document.createElementNS(SVG_NS, "text");
  node.setAttribute("x", String(x));
  node.setAttribute("y", String(y));
  node.classList.add(...className.split(" "));
  node.textContent = text;
  return node;
}

function portCircle(cx: number, cy: number, kind: "input" | "output"): SVGCircleElement {
  const c = document.createElementNS(SVG_NS, "circle");
  c.setAttribute("cx", String(cx));
  c.setAttribute("cy", String(cy));
  c.setAttribute("r", "5");
  c.classList.add("port", kind);
  return c;
}

function describePorts(desc: BlockDescriptor): string {
  const ins = desc.inputs.map((p) => `${p.name}:${p.kind}`).join(", ") || "none";
  const outs = desc.outputs.map((p) => `${p.name}:${p.kind}`).join(", ");
  return `inputs: ${ins}\noutputs: ${outs}`;
}

export { autoLayout };
