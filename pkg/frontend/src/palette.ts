/** Label colors, identical to the palette the service embeds in label PNGs. */

export const PALETTE: [number, number, number][] = [
  [230, 25, 75],
  [60, 180, 75],
  [0, 130, 200],
  [255, 225, 25],
  [245, 130, 48],
  [145, 30, 180],
  [70, 240, 240],
  [240, 50, 230],
  [210, 245, 60],
  [170, 110, 40],
  [128, 128, 128],
  [255, 250, 200],
  [0, 0, 128],
];

export const MAX_LABELS = PALETTE.length;

export function labelColor(label: number): string {
  const [r, g, b] = PALETTE[(label - 1) % PALETTE.length];
  return `rgb(${r}, ${g}, ${b})`;
}
