/**
 * Client-side scribble session state.
 *
 * Strokes are kept as an ordered list (the undo unit); per-label layers
 * are derived views. Labels are allocated contiguously from 1 so the
 * stroke set is always valid for the service. Points are clipped to the
 * image rectangle on entry.
 */

import { DEFAULT_BRUSH, Stroke } from "./raster.js";
import { MAX_LABELS } from "./palette.js";

export class ScribbleState {
  strokes: Stroke[] = [];
  activeLabel = 1;
  brushWidth = DEFAULT_BRUSH;
  private current: Stroke | null = null;

  constructor(readonly width: number, readonly height: number) {}

  /** Labels that currently own at least one stroke, ascending. */
  labelsPresent(): number[] {
    return [...new Set(this.strokes.map((s) => s.label))].sort((a, b) => a - b);
  }

  /** Highest label selectable right now: existing labels plus one more. */
  maxSelectable(): number {
    return Math.min(MAX_LABELS, this.labelsPresent().length + 1);
  }

  setActiveLabel(label: number): void {
    if (label < 1 || label > this.maxSelectable()) {
      throw new Error(`label ${label} not selectable (next free is ${this.maxSelectable()})`);
    }
    this.activeLabel = label;
  }

  clip(x: number, y: number): [number, number] {
    return [
      Math.min(this.width - 1, Math.max(0, x)),
      Math.min(this.height - 1, Math.max(0, y)),
    ];
  }

  beginStroke(x: number, y: number): void {
    this.current = { label: this.activeLabel, points: [this.clip(x, y)], width: this.brushWidth };
  }

  extendStroke(x: number, y: number): void {
    if (!this.current) return;
    this.current.points.push(this.clip(x, y));
  }

  /** The stroke being drawn right now, for live preview. */
  get pendingStroke(): Stroke | null {
    return this.current;
  }

  /** Finish the in-flight stroke; returns it, or null for a no-op. */
  endStroke(): Stroke | null {
    const done = this.current;
    this.current = null;
    if (!done) return null;
    this.strokes.push(done);
    this.renumber();
    return done;
  }

  undo(): Stroke | null {
    const removed = this.strokes.pop() ?? null;
    this.renumber();
    return removed;
  }

  clear(): void {
    this.strokes = [];
    this.current = null;
    this.activeLabel = 1;
  }

  /** At least two labels scribbled, the precondition for segmentation. */
  canSegment(): boolean {
    return this.labelsPresent().length >= 2;
  }

  strokesForLabel(label: number): Stroke[] {
    return this.strokes.filter((s) => s.label === label);
  }

  /** Keep labels contiguous from 1 after removals so the service never
   * sees a gap; the active label follows the mapping. */
  private renumber(): void {
    const present = this.labelsPresent();
    const mapping = new Map(present.map((l, i) => [l, i + 1]));
    for (const s of this.strokes) s.label = mapping.get(s.label) ?? s.label;
    if (mapping.size > 0 && !mapping.has(this.activeLabel)) {
      this.activeLabel = Math.min(this.activeLabel, this.maxSelectable());
    }
  }
}
