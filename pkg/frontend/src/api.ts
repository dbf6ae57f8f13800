// Thin typed wrappers over the engine's HTTP API (same origin by default).

import type { ApiError, BlockDescriptor, GraphJson, RunResponse } from "./types.js";

export class ServerError extends Error {
  code: string;
  blockId?: string;

  constructor(err: ApiError, status: number) {
    super(`${err.error} (${status}): ${err.detail}`);
    this.code = err.error;
    this.blockId = err.block_id;
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let payload: ApiError;
  try {
    payload = (await response.json()) as ApiError;
  } catch {
    payload = { error: `Http${response.status}`, detail: response.statusText };
  }
  throw new ServerError(payload, response.status);
}

export class EngineApi {
  constructor(private base: string = "") {}

  async catalog(): Promise<BlockDescriptor[]> {
    return unwrap(await fetch(`${this.base}/api/catalog`));
  }

  async validate(graph: GraphJson): Promise<{ ok: boolean; order: string[] }> {
    return unwrap(await fetch(`${this.base}/api/graph/validate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ graph }),
    }));
  }

  async execute(graph: GraphJson, seed: number, outputs?: string[]): Promise<RunResponse> {
    const body: Record<string, unknown> = { graph, seed };
    if (outputs) body.outputs = outputs;
    return unwrap(await fetch(`${this.base}/api/graph/execute`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }));
  }
}
