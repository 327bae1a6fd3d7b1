/** Typed client for the segmentation service endpoints. */

import type { Stroke } from "./raster.js";

export interface SessionInfo {
  id: string;
  width: number;
  height: number;
}

export interface SegmentResult {
  labels_png: string;
  energy: number;
  gap: number;
  iterations: number;
  millis: number;
  active_labels: number[];
}

export interface ConfigOverrides {
  [key: string]: number | undefined;
}

export class BusyError extends Error {}

export class ServiceError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

async function parseOrThrow<T>(resp: Response): Promise<T> {
  if (resp.ok) return (await resp.json()) as T;
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    /* non-JSON error body */
  }
  if (resp.status === 409) throw new BusyError(detail);
  throw new ServiceError(detail, resp.status);
}

export class SegmentationClient {
  constructor(private readonly base: string = "") {}

  createSession(imageBase64: string, config?: ConfigOverrides): Promise<SessionInfo> {
    return this.request("POST", "/sessions", { image: imageBase64, config });
  }

  updateStrokes(id: string, strokes: Stroke[]): Promise<{ accepted: boolean; labels: number }> {
    return this.request("PUT", `/sessions/${id}/strokes`, { strokes });
  }

  segment(id: string): Promise<SegmentResult> {
    return this.request("POST", `/sessions/${id}/segment`);
  }

  lastResult(id: string): Promise<SegmentResult> {
    return this.request("GET", `/sessions/${id}/result`);
  }

  /** Debug view of the server-side rasterized scribbles (indexed PNG, base64). */
  scribbleMask(id: string): Promise<{ mask_png: string }> {
    return this.request("GET", `/sessions/${id}/scribbles`);
  }

  deleteSession(id: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/sessions/${id}`);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    return parseOrThrow<T>(resp);
  }
}
