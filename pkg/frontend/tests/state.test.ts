import { describe, expect, it } from "vitest";

import { ScribbleState } from "../src/state.js";

function drawStroke(st: ScribbleState, pts: [number, number][]) {
  st.beginStroke(...pts[0]);
  for (const [x, y] of pts.slice(1)) st.extendStroke(x, y);
  return st.endStroke();
}

describe("ScribbleState", () => {
  it("appends strokes under the active label", () => {
    const st = new ScribbleState(64, 64);
    drawStroke(st, [[5, 5], [10, 5]]);
    expect(st.strokes).toHaveLength(1);
    expect(st.strokes[0].label).toBe(1);
    expect(st.labelsPresent()).toEqual([1]);
  });

  it("allocates labels contiguously", () => {
    const st = new ScribbleState(64, 64);
    expect(st.maxSelectable()).toBe(1);
    expect(() => st.setActiveLabel(2)).toThrow();
    drawStroke(st, [[5, 5]]);
    expect(st.maxSelectable()).toBe(2);
    st.setActiveLabel(2);
    drawStroke(st, [[20, 20]]);
    expect(st.labelsPresent()).toEqual([1, 2]);
    expect(st.canSegment()).toBe(true);
  });

  it("undo removes the last stroke and renumbers to close gaps", () => {
    const st = new ScribbleState(64, 64);
    drawStroke(st, [[5, 5]]);          // label 1
    st.setActiveLabel(2);
    drawStroke(st, [[20, 20]]);        // label 2
    st.setActiveLabel(3);
    drawStroke(st, [[40, 40]]);        // label 3
    // drop the label-2 stroke from the middle of the list
    st.strokes.splice(1, 1);
    const removed = st.undo();         // removes the old label-3 stroke
    expect(removed).not.toBeNull();
    expect(st.labelsPresent()).toEqual([1]);
    const again = st.undo();
    expect(again?.label).toBe(1);
    expect(st.strokes).toHaveLength(0);
    expect(st.undo()).toBeNull();
  });

  it("clips points to the image rectangle", () => {
    const st = new ScribbleState(32, 16);
    drawStroke(st, [[-5, -2], [100, 50]]);
    for (const [x, y] of st.strokes[0].points) {
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThanOrEqual(31);
      expect(y).toBeGreaterThanOrEqual(0);
      expect(y).toBeLessThanOrEqual(15);
    }
  });

  it("needs two labels before segmentation", () => {
    const st = new ScribbleState(64, 64);
    expect(st.canSegment()).toBe(false);
    drawStroke(st, [[5, 5]]);
    expect(st.canSegment()).toBe(false);
    st.setActiveLabel(2);
    drawStroke(st, [[30, 30]]);
    expect(st.canSegment()).toBe(true);
  });

  it("clear resets strokes and the active label", () => {
    const st = new ScribbleState(64, 64);
    drawStroke(st, [[5, 5]]);
    st.setActiveLabel(2);
    st.clear();
    expect(st.strokes).toHaveLength(0);
    expect(st.activeLabel).toBe(1);
    expect(st.pendingStroke).toBeNull();
  });

  it("per-label layers are derived views", () => {
    const st = new ScribbleState(64, 64);
    drawStroke(st, [[1, 1]]);
    st.setActiveLabel(2);
    drawStroke(st, [[2, 2]]);
    st.setActiveLabel(1);
    drawStroke(st, [[3, 3]]);
    expect(st.strokesForLabel(1)).toHaveLength(2);
    expect(st.strokesForLabel(2)).toHaveLength(1);
  });
});
