import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { rasterizeStrokes, Stroke } from "../src/raster.js";

interface FixtureCase {
  name: string;
  shape: [number, number];
  strokes: [number, [number, number][], number][];
  mask: number[];
}

const cases: FixtureCase[] = JSON.parse(
  readFileSync(new URL("../fixtures/raster_cases.json", import.meta.url), "utf-8"),
);

describe("rasterizeStrokes", () => {
  it.each(cases.map((c) => [c.name, c] as const))(
    "matches the server rasterization pixel-exactly: %s",
    (_name, c) => {
      const strokes: Stroke[] = c.strokes.map(([label, points, width]) => ({
        label,
        points,
        width,
      }));
      const [h, w] = c.shape;
      const mask = rasterizeStrokes(strokes, h, w);
      expect(Array.from(mask)).toEqual(c.mask);
    },
  );

  it("covers exactly the disc of diameter 13 around a point", () => {
    const mask = rasterizeStrokes([{ label: 1, points: [[10, 10]], width: 13 }], 21, 21);
    for (let y = 0; y < 21; y++) {
      for (let x = 0; x < 21; x++) {
        const inside = (x - 10) ** 2 + (y - 10) ** 2 <= 6.5 ** 2;
        expect(mask[y * 21 + x]).toBe(inside ? 1 : 0);
      }
    }
  });

  it("later strokes overwrite earlier ones", () => {
    const mask = rasterizeStrokes(
      [
        { label: 1, points: [[5, 5]], width: 9 },
        { label: 2, points: [[5, 5]], width: 5 },
      ],
      11,
      11,
    );
    expect(mask[5 * 11 + 5]).toBe(2);
    expect(mask[5 * 11 + 1]).toBe(1);
  });

  it("clips brush coverage at the image border", () => {
    const mask = rasterizeStrokes([{ label: 1, points: [[0, 0]], width: 13 }], 8, 8);
    expect(mask[0]).toBe(1);
    expect(mask.length).toBe(64);
  });

  it("rejects out-of-range labels", () => {
    expect(() => rasterizeStrokes([{ label: 0, points: [[1, 1]], width: 3 }], 4, 4)).toThrow();
  });

  it("an empty stroke list produces an empty mask", () => {
    const mask = rasterizeStrokes([], 4, 4);
    expect(mask.every((v) => v === 0)).toBe(true);
  });
});
