/**
 * Round-brush stroke rasterization.
 *
 * Mirrors the server's rasterizer operation for operation so the mask the
 * client previews is pixel-identical to the one the service segments: a
 * pixel is covered when its center lies within width/2 of the polyline,
 * bounding boxes are floor/ceil-expanded and clamped, later strokes
 * overwrite earlier ones.
 */

export interface Stroke {
  label: number;
  points: [number, number][];
  width: number;
}

export const DEFAULT_BRUSH = 13;

export function rasterizeStrokes(
  strokes: Stroke[],
  height: number,
  width: number,
): Uint8Array {
  const mask = new Uint8Array(height * width);
  for (const stroke of strokes) {
    if (stroke.label < 1 || stroke.label > 255) {
      throw new Error(`stroke label ${stroke.label} out of range 1..255`);
    }
    const r = stroke.width / 2.0;
    const pts = stroke.points;
    if (pts.length === 0) continue;
    const segments: [[number, number], [number, number]][] = [];
    for (let i = 0; i + 1 < pts.length; i++) segments.push([pts[i], pts[i + 1]]);
    if (segments.length === 0) segments.push([pts[0], pts[0]]);
    for (const [[ax, ay], [bx, by]] of segments) {
      const x0 = Math.max(0, Math.floor(Math.min(ax, bx) - r));
      const x1 = Math.min(width - 1, Math.ceil(Math.max(ax, bx) + r));
      const y0 = Math.max(0, Math.floor(Math.min(ay, by) - r));
      const y1 = Math.min(height - 1, Math.ceil(Math.max(ay, by) + r));
      if (x1 < x0 || y1 < y0) continue;
      const vx = bx - ax;
      const vy = by - ay;
      const seg2 = vx * vx + vy * vy;
      for (let py = y0; py <= y1; py++) {
        for (let px = x0; px <= x1; px++) {
          let t = 0.0;
          if (seg2 !== 0.0) {
            t = ((px - ax) * vx + (py - ay) * vy) / seg2;
            t = Math.min(1.0, Math.max(0.0, t));
          }
          const dx = px - (ax + t * vx);
          const dy = py - (ay + t * vy);
          if (dx * dx + dy * dy <= r * r) {
            mask[py * width + px] = stroke.label;
          }
        }
      }
    }
  }
  return mask;
}
