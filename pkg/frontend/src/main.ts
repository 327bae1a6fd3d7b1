/** Page wiring: upload, scribble canvases, segmentation round trip. */

import { BusyError, SegmentationClient, SegmentResult } from "./api.js";
import { labelColor, MAX_LABELS, PALETTE } from "./palette.js";
import { ScribbleState } from "./state.js";

const OVERLAY_ALPHA = 0.5;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class App {
  private client = new SegmentationClient();
  private state: ScribbleState | null = null;
  private sessionId: string | null = null;
  private running = false;
  private drawing = false;

  private imageCanvas = el<HTMLCanvasElement>("image-canvas");
  private strokeCanvas = el<HTMLCanvasElement>("stroke-canvas");
  private overlayCanvas = el<HTMLCanvasElement>("overlay-canvas");
  private fileInput = el<HTMLInputElement>("file-input");
  private labelBar = el<HTMLDivElement>("label-bar");
  private brushInput = el<HTMLInputElement>("brush-width");
  private segmentBtn = el<HTMLButtonElement>("segment-btn");
  private undoBtn = el<HTMLButtonElement>("undo-btn");
  private clearBtn = el<HTMLButtonElement>("clear-btn");
  private readout = el<HTMLDivElement>("readout");
  private status = el<HTMLDivElement>("status");

  constructor() {
    this.fileInput.addEventListener("change", () => void this.onUpload());
    this.brushInput.addEventListener("input", () => {
      if (this.state) this.state.brushWidth = Number(this.brushInput.value);
    });
    this.segmentBtn.addEventListener("click", () => void this.onSegment());
    this.undoBtn.addEventListener("click", () => void this.onUndo());
    this.clearBtn.addEventListener("click", () => void this.onClear());
    this.strokeCanvas.addEventListener("pointerdown", (e) => this.onPointerDown(e));
    this.strokeCanvas.addEventListener("pointermove", (e) => this.onPointerMove(e));
    window.addEventListener("pointerup", () => void this.onPointerUp());
    this.refreshControls();
  }

  private canvasPoint(e: PointerEvent): [number, number] {
    const rect = this.strokeCanvas.getBoundingClientRect();
    const sx = this.strokeCanvas.width / rect.width;
    const sy = this.strokeCanvas.height / rect.height;
    return [(e.clientX - rect.left) * sx, (e.clientY - rect.top) * sy];
  }

  private async onUpload(): Promise<void> {
    const file = this.fileInput.files?.[0];
    if (!file) return;
    const bytes = new Uint8Array(await file.arrayBuffer());
    let bin = "";
    bytes.forEach((b) => (bin += String.fromCharCode(b)));
    const b64 = btoa(bin);
    this.setStatus("uploading...");
    try {
      const info = await this.client.createSession(b64);
      this.sessionId = info.id;
      this.state = new ScribbleState(info.width, info.height);
      for (const canvas of [this.imageCanvas, this.strokeCanvas, this.overlayCanvas]) {
        canvas.width = info.width;
        canvas.height = info.height;
      }
      const img = new Image();
      img.onload = () => {
        this.imageCanvas.getContext("2d")!.drawImage(img, 0, 0);
        URL.revokeObjectURL(img.src);
      };
      img.src = URL.createObjectURL(file);
      this.overlayCanvas.getContext("2d")!.clearRect(0, 0, info.width, info.height);
      this.setStatus(`session ${info.id.slice(0, 8)} (${info.width}x${info.height})`);
    } catch (err) {
      this.setStatus(`upload failed: ${(err as Error).message}`);
    }
    this.refreshControls();
  }

  private onPointerDown(e: PointerEvent): void {
    if (!this.state || this.running) return;
    this.drawing = true;
    const [x, y] = this.canvasPoint(e);
    this.state.beginStroke(x, y);
    e.preventDefault();
  }

  private onPointerMove(e: PointerEvent): void {
    if (!this.state || !this.drawing) return;
    const [x, y] = this.canvasPoint(e);
    this.state.extendStroke(x, y);
    this.redrawStrokes(true);
  }

  private async onPointerUp(): Promise<void> {
    if (!this.state || !this.drawing) return;
    this.drawing = false;
    if (this.state.endStroke()) await this.syncStrokes();
    this.redrawStrokes(false);
    this.refreshControls();
  }

  private async onUndo(): Promise<void> {
    if (!this.state) return;
    if (this.state.undo()) await this.syncStrokes();
    this.redrawStrokes(false);
    this.refreshControls();
  }

  private async onClear(): Promise<void> {
    if (!this.state) return;
    this.state.clear();
    await this.syncStrokes();
    this.redrawStrokes(false);
    this.refreshControls();
  }

  private async syncStrokes(): Promise<void> {
    if (!this.state || !this.sessionId) return;
    try {
      await this.client.updateStrokes(this.sessionId, this.state.strokes);
    } catch (err) {
      // keep local strokes; surface the failure without destroying work
      this.setStatus(`stroke sync failed: ${(err as Error).message}`);
    }
  }

  private async onSegment(): Promise<void> {
    if (!this.state || !this.sessionId || this.running || !this.state.canSegment()) return;
    this.running = true;
    this.refreshControls();
    this.setStatus("segmenting...");
    try {
      const result = await this.client.segment(this.sessionId);
      this.renderOverlay(result);
      this.readout.textContent =
        `energy ${result.energy.toFixed(1)} | gap ${(result.gap * 100).toFixed(2)}% | ` +
        `${result.iterations} iters | ${(result.millis / 1000).toFixed(2)}s | ` +
        `${result.active_labels.length} labels`;
      this.setStatus("done; refine strokes and run again");
    } catch (err) {
      this.setStatus(err instanceof BusyError ? "busy: a run is in flight" : `error: ${(err as Error).message}`);
    } finally {
      this.running = false;
      this.refreshControls();
    }
  }

  private renderOverlay(result: SegmentResult): void {
    const img = new Image();
    img.onload = () => {
      const ctx = this.overlayCanvas.getContext("2d")!;
      ctx.clearRect(0, 0, this.overlayCanvas.width, this.overlayCanvas.height);
      ctx.globalAlpha = OVERLAY_ALPHA;
      ctx.drawImage(img, 0, 0);
      ctx.globalAlpha = 1.0;
    };
    img.src = `data:image/png;base64,${result.labels_png}`;
  }

  private redrawStrokes(includeCurrent: boolean): void {
    if (!this.state) return;
    const ctx = this.strokeCanvas.getContext("2d")!;
    ctx.clearRect(0, 0, this.strokeCanvas.width, this.strokeCanvas.height);
    const pending = includeCurrent ? this.state.pendingStroke : null;
    const strokes = pending ? [...this.state.strokes, pending] : this.state.strokes;
    for (const s of strokes) {
      ctx.strokeStyle = labelColor(s.label);
      ctx.fillStyle = labelColor(s.label);
      ctx.lineWidth = s.width;
      ctx.lineCap = "round";
      ctx.lineJoin = "round";
      if (s.points.length === 1) {
        ctx.beginPath();
        ctx.arc(s.points[0][0], s.points[0][1], s.width / 2, 0, 2 * Math.PI);
        ctx.fill();
      } else {
        ctx.beginPath();
        ctx.moveTo(s.points[0][0], s.points[0][1]);
        for (const [x, y] of s.points.slice(1)) ctx.lineTo(x, y);
        ctx.stroke();
      }
    }
  }

  private refreshControls(): void {
    const st = this.state;
    this.labelBar.innerHTML = "";
    const selectable = st ? st.maxSelectable() : 0;
    for (let label = 1; label <= MAX_LABELS; label++) {
      const btn = document.createElement("button");
      btn.className = "label-btn";
      btn.style.background = labelColor(label);
      btn.disabled = !st || label > selectable || this.running;
      if (st && label === st.activeLabel) btn.classList.add("active");
      btn.title = `label ${label}`;
      btn.addEventListener("click", () => {
        st?.setActiveLabel(label);
        this.refreshControls();
      });
      this.labelBar.appendChild(btn);
    }
    this.segmentBtn.disabled = !st || this.running || !st.canSegment();
    this.undoBtn.disabled = !st || this.running || st.strokes.length === 0;
    this.clearBtn.disabled = !st || this.running || st.strokes.length === 0;
    this.brushInput.disabled = !st || this.running;
  }

  private setStatus(text: string): void {
    this.status.textContent = text;
  }
}

new App();
export { PALETTE };
