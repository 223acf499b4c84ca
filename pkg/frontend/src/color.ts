/**
 * Fixed color assets: a perceptually ordered sequential colormap for field
 * magnitudes, a diverging-ish categorical palette for series curves, and
 * the two tones of the region maps.  All values are constants so a given
 * normalized input always maps to the same RGB triple.
 */

import type { Rgb } from "./raster.js";

/** Sequential dark-violet-to-yellow colormap anchors (evenly spaced). */
const FIELD_ANCHORS: readonly Rgb[] = [
  [68, 1, 84],
  [72, 40, 120],
  [62, 74, 137],
  [49, 104, 142],
  [38, 130, 142],
  [31, 158, 137],
  [53, 183, 121],
  [109, 205, 89],
  [180, 222, 44],
  [253, 231, 37],
];

/** Map a value in [0, 1] (clamped) onto the sequential field colormap. */
export function fieldColor(v: number): Rgb {
  let x = v;
  if (!Number.isFinite(x)) x = 0;
  if (x < 0) x = 0;
  if (x > 1) x = 1;
  const scaled = x * (FIELD_ANCHORS.length - 1);
  const i = Math.min(FIELD_ANCHORS.length - 2, Math.floor(scaled));
  const f = scaled - i;
  const a = FIELD_ANCHORS[i];
  const b = FIELD_ANCHORS[i + 1];
  return [
    Math.round(a[0] + f * (b[0] - a[0])),
    Math.round(a[1] + f * (b[1] - a[1])),
    Math.round(a[2] + f * (b[2] - a[2])),
  ];
}

/** Categorical palette for series curves, in drawing order. */
export const SERIES_COLORS: readonly Rgb[] = [
  [31, 119, 180], // blue
  [214, 39, 40], // red
  [44, 160, 44], // green
  [255, 127, 14], // orange
  [148, 103, 189], // purple
  [140, 86, 75], // brown
  [227, 119, 194], // pink
  [127, 127, 127], // gray
];

export function seriesColor(index: number): Rgb {
  return SERIES_COLORS[index % SERIES_COLORS.length];
}

/** Region-map tones: retained cells vs excised cells. */
export const RETAINED_COLOR: Rgb = [38, 130, 142];
export const EXCISED_COLOR: Rgb = [234, 234, 234];

/** Multiply a color by a brightness factor in [0, 1] (surface shading). */
export function shade(color: Rgb, factor: number): Rgb {
  const f = Math.max(0, Math.min(1, factor));
  return [Math.round(color[0] * f), Math.round(color[1] * f), Math.round(color[2] * f)];
}
