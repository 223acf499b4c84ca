/**
 * Figure rendering: turns one solver artifact into one static PNG.
 *
 * Four figure kinds are supported:
 *
 * - `heatmap`     — a field snapshot as a top-down color map (complex
 *                   snapshots render as two side-by-side panels sharing
 *                   one color scale);
 * - `surface`     — a field snapshot as an isometric height surface;
 * - `series`      — selected CSV columns as curves over the first column;
 * - `region-map`  — a retained/excised classification as a two-tone map.
 *
 * Rendering is fully deterministic: the PNG bytes are a pure function of
 * the input file content and the spec.  Color scales can be pinned via
 * `scaleMin`/`scaleMax` so every figure of a kind within a run shares one
 * scale; the range actually used is reported back for the sidecar file.
 */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { basename, dirname } from "node:path";

import {
  parseSnapshot,
  parseComplexSnapshot,
  parseRegionMap,
  parseSeriesCsv,
  isComplexSnapshotText,
  ParseError,
  type GridInfo,
} from "./formats.js";
import { encodePng } from "./png.js";
import { Canvas, measureText, BLACK, AXIS_GRAY, LIGHT_GRAY, type Rgb } from "./raster.js";
import { fieldColor, seriesColor, shade, RETAINED_COLOR, EXCISED_COLOR } from "./color.js";

export type FigureKind = "heatmap" | "surface" | "series" | "region-map";

export interface FigureSpec {
  kind: FigureKind;
  /** Path of the artifact to read. */
  input: string;
  /** Path of the PNG to write (parent directories are created). */
  output: string;
  /** Title drawn across the top; defaults to the input file's basename. */
  title?: string;
  /** Pinned lower bound of the color/height scale (heatmap, surface). */
  scaleMin?: number;
  /** Pinned upper bound of the color/height scale (heatmap, surface). */
  scaleMax?: number;
  /** Series only: which columns to plot (default: every column after the first). */
  columns?: string[];
}

export interface RenderResult {
  output: string;
  width: number;
  height: number;
  /** Sidecar payload describing the scale/range this figure used. */
  note: string;
}

/** Compact deterministic number label (fits the built-in glyph set). */
export function formatNum(x: number): string {
  if (Number.isNaN(x)) return "nan";
  if (x === Infinity) return "inf";
  if (x === -Infinity) return "-inf";
  if (x === 0) return "0";
  return String(Number.parseFloat(x.toPrecision(4)));
}

function finiteRange(arrays: ArrayLike<number>[]): { min: number; max: number } | null {
  let lo = Infinity;
  let hi = -Infinity;
  for (const arr of arrays) {
    for (let i = 0; i < arr.length; i += 1) {
      const v = arr[i];
      if (!Number.isFinite(v)) continue;
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo > hi) return null;
  return { min: lo, max: hi };
}

function resolveScale(
  spec: FigureSpec,
  dataMin: number,
  dataMax: number,
): { lo: number; hi: number } {
  let lo = spec.scaleMin ?? dataMin;
  let hi = spec.scaleMax ?? dataMax;
  if (!(hi > lo)) {
    // Degenerate (constant field or collapsed pin): widen symmetrically.
    const pad = lo === 0 ? 0.5 : Math.abs(lo) * 0.05;
    lo -= pad;
    hi += pad;
  }
  return { lo, hi };
}

function gridCaption(t: number, grid: GridInfo): string {
  return (
    `t=${formatNum(t)}  u1 [${formatNum(grid.u1Min)}, ${formatNum(grid.u1Max)}]` +
    `  u2 [${formatNum(grid.u2Min)}, ${formatNum(grid.u2Max)}]`
  );
}

function writePng(canvas: Canvas, output: string): void {
  mkdirSync(dirname(output), { recursive: true });
  writeFileSync(output, encodePng(canvas.width, canvas.height, canvas.data));
}

interface Panel {
  label?: string;
  values: Float64Array;
}

function cellSize(m: number, l: number): number {
  return Math.max(1, Math.min(6, Math.floor(440 / Math.max(m, l))));
}

function drawColorbar(
  canvas: Canvas,
  x: number,
  y: number,
  w: number,
  h: number,
  lo: number,
  hi: number,
): void {
  for (let yy = 0; yy < h; yy += 1) {
    const v = h === 1 ? 1 : 1 - yy / (h - 1);
    canvas.fillRect(x, y + yy, w, 1, fieldColor(v));
  }
  canvas.strokeRect(x - 1, y - 1, w + 2, h + 2, AXIS_GRAY);
  canvas.drawText(x + w + 5, y, formatNum(hi), BLACK);
  canvas.drawText(x + w + 5, y + h - 7, formatNum(lo), BLACK);
}

function renderHeatmap(spec: FigureSpec): RenderResult {
  const text = readFileSync(spec.input, "utf8");
  let grid: GridInfo;
  let t: number;
  let panels: Panel[];
  if (isComplexSnapshotText(text)) {
    const snap = parseComplexSnapshot(text, spec.input);
    grid = snap.grid;
    t = snap.t;
    panels = [
      { label: "re", values: snap.re },
      { label: "im", values: snap.im },
    ];
  } else {
    const snap = parseSnapshot(text, spec.input);
    grid = snap.grid;
    t = snap.t;
    panels = [{ values: snap.values }];
  }

  const range = finiteRange(panels.map((p) => p.values));
  if (!range) {
    throw new ParseError(spec.input, 2, 1, "field contains no finite values");
  }
  const { lo, hi } = resolveScale(spec, range.min, range.max);

  const s = cellSize(grid.m, grid.l);
  const plotW = grid.m * s;
  const plotH = grid.l * s;
  const titleH = 22;
  const labelH = panels.length > 1 ? 14 : 0;
  const leftM = 10;
  const gap = 14;
  const barW = 14;
  const barGap = 10;
  const labelW = Math.max(measureText(formatNum(lo)), measureText(formatNum(hi))) + 10;
  const bottomM = 26;
  const width = leftM + panels.length * plotW + (panels.length - 1) * gap + barGap + barW + labelW + 6;
  const height = titleH + labelH + plotH + bottomM;

  const canvas = new Canvas(width, height);
  const title = spec.title ?? basename(spec.input);
  canvas.drawText(leftM, 7, title, BLACK);

  const span = hi - lo;
  panels.forEach((panel, p) => {
    const x0 = leftM + p * (plotW + gap);
    const y0 = titleH + labelH;
    if (panel.label) {
      canvas.drawText(x0, titleH + 2, panel.label, AXIS_GRAY);
    }
    for (let k = 0; k < grid.l; k += 1) {
      const sy = y0 + (grid.l - 1 - k) * s;
      const rowOff = k * grid.m;
      for (let j = 0; j < grid.m; j += 1) {
        const v = (panel.values[rowOff + j] - lo) / span;
        canvas.fillRect(x0 + j * s, sy, s, s, fieldColor(v));
      }
    }
    canvas.strokeRect(x0 - 1, y0 - 1, plotW + 2, plotH + 2, AXIS_GRAY);
  });

  const barX = leftM + panels.length * plotW + (panels.length - 1) * gap + barGap;
  drawColorbar(canvas, barX, titleH + labelH, barW, plotH, lo, hi);
  canvas.drawText(leftM, titleH + labelH + plotH + 9, gridCaption(t, grid), AXIS_GRAY);

  writePng(canvas, spec.output);
  return {
    output: spec.output,
    width,
    height,
    note: `scale=[${lo},${hi}] data=[${range.min},${range.max}]`,
  };
}

function renderSurface(spec: FigureSpec): RenderResult {
  const text = readFileSync(spec.input, "utf8");
  let grid: GridInfo;
  let t: number;
  let values: Float64Array;
  if (isComplexSnapshotText(text)) {
    // Complex fields render their magnitude as the surface height.
    const snap = parseComplexSnapshot(text, spec.input);
    grid = snap.grid;
    t = snap.t;
    values = new Float64Array(snap.re.length);
    for (let i = 0; i < values.length; i += 1) {
      values[i] = Math.hypot(snap.re[i], snap.im[i]);
    }
  } else {
    const snap = parseSnapshot(text, spec.input);
    grid = snap.grid;
    t = snap.t;
    values = snap.values;
  }

  const range = finiteRange([values]);
  if (!range) {
    throw new ParseError(spec.input, 2, 1, "field contains no finite values");
  }
  const { lo, hi } = resolveScale(spec, range.min, range.max);
  const span = hi - lo;

  // Downsample to at most ~80 samples per axis for legible facets.
  const pick = (n: number): number[] => {
    const stride = Math.max(1, Math.ceil((n - 1) / 80));
    const idx: number[] = [];
    for (let i = 0; i < n; i += stride) idx.push(i);
    if (idx[idx.length - 1] !== n - 1) idx.push(n - 1);
    return idx;
  };
  const js = pick(grid.m);
  const ks = pick(grid.l);
  const nj = js.length;
  const nk = ks.length;

  const z = new Float64Array(nj * nk);
  for (let b = 0; b < nk; b += 1) {
    for (let a = 0; a < nj; a += 1) {
      const raw = values[ks[b] * grid.m + js[a]];
      const vn = Number.isFinite(raw) ? (raw - lo) / span : 0;
      z[b * nj + a] = Math.max(0, Math.min(1, vn));
    }
  }

  const width = 560;
  const topM = 30;
  const xHalf = 250;
  const xyScale = 105;
  const zScale = 130;
  const cx = Math.floor(width / 2);
  const baseY = topM + zScale;
  const height = baseY + 2 * xyScale + 30;

  const canvas = new Canvas(width, height);
  const title = spec.title ?? basename(spec.input);
  canvas.drawText(10, 7, title, BLACK);

  const px = (a: number, b: number): number =>
    Math.round(cx + (a / (nj - 1) - b / (nk - 1)) * xHalf);
  const py = (a: number, b: number, zz: number): number =>
    Math.round(baseY + (a / (nj - 1) + b / (nk - 1)) * xyScale - zz * zScale);

  // Paint far-to-near: cells with larger (a+b) project lower on screen and
  // must be drawn last so they occlude what lies behind them.
  for (let d = 0; d <= nj - 2 + nk - 2; d += 1) {
    const bLo = Math.max(0, d - (nj - 2));
    const bHi = Math.min(nk - 2, d);
    for (let b = bLo; b <= bHi; b += 1) {
      const a = d - b;
      const z00 = z[b * nj + a];
      const z10 = z[b * nj + a + 1];
      const z01 = z[(b + 1) * nj + a];
      const z11 = z[(b + 1) * nj + a + 1];
      const zMean = (z00 + z10 + z01 + z11) / 4;
      const slope = Math.abs(z10 - z01) + Math.abs(z11 - z00);
      const color = shade(fieldColor(zMean), 0.78 + 0.22 / (1 + 3 * slope));
      const x00 = px(a, b);
      const y00 = py(a, b, z00);
      const x10 = px(a + 1, b);
      const y10 = py(a + 1, b, z10);
      const x01 = px(a, b + 1);
      const y01 = py(a, b + 1, z01);
      const x11 = px(a + 1, b + 1);
      const y11 = py(a + 1, b + 1, z11);
      canvas.fillTriangle(x00, y00, x10, y10, x11, y11, color);
      canvas.fillTriangle(x00, y00, x11, y11, x01, y01, color);
    }
  }

  // Base rhombus outline for orientation.
  const corners: Array<[number, number]> = [
    [px(0, 0), baseY + 0],
    [px(nj - 1, 0), baseY + xyScale],
    [px(nj - 1, nk - 1), baseY + 2 * xyScale],
    [px(0, nk - 1), baseY + xyScale],
  ];
  for (let i = 0; i < 4; i += 1) {
    const [ax, ay] = corners[i];
    const [bx, by] = corners[(i + 1) % 4];
    canvas.drawLine(ax, ay, bx, by, AXIS_GRAY);
  }
  canvas.drawText(10, height - 12, `${gridCaption(t, grid)}  height [${formatNum(lo)}, ${formatNum(hi)}]`, AXIS_GRAY);

  writePng(canvas, spec.output);
  return {
    output: spec.output,
    width,
    height,
    note: `scale=[${lo},${hi}] data=[${range.min},${range.max}]`,
  };
}

function renderSeries(spec: FigureSpec): RenderResult {
  const text = readFileSync(spec.input, "utf8");
  const table = parseSeriesCsv(text, spec.input);
  if (table.columns.length < 2) {
    throw new ParseError(spec.input, 1, 1, "series CSV needs at least two columns");
  }
  const wanted = spec.columns ?? table.columns.slice(1);
  const curves: Array<{ name: string; y: Float64Array }> = wanted.map((name) => {
    const idx = table.columns.indexOf(name);
    if (idx < 0) {
      throw new ParseError(
        spec.input,
        1,
        1,
        `no column named ${JSON.stringify(name)} (have ${table.columns.join(", ")})`,
      );
    }
    return { name, y: table.data[idx] };
  });
  const x = table.data[0];

  const xRange = finiteRange([x]);
  const yRange = finiteRange(curves.map((c) => c.y));
  if (!xRange || !yRange) {
    throw new ParseError(spec.input, 2, 1, "series contains no finite data points");
  }
  let { min: yLo, max: yHi } = yRange;
  if (yLo === yHi) {
    const pad = yLo === 0 ? 0.5 : Math.abs(yLo) * 0.05;
    yLo -= pad;
    yHi += pad;
  } else {
    const pad = (yHi - yLo) * 0.05;
    yLo -= pad;
    yHi += pad;
  }
  let { min: xLo, max: xHi } = xRange;
  if (xLo === xHi) {
    const pad = xLo === 0 ? 0.5 : Math.abs(xLo) * 0.05;
    xLo -= pad;
    xHi += pad;
  }

  const width = 640;
  const height = 360;
  const leftM = 12 + Math.max(measureText(formatNum(yLo)), measureText(formatNum(yHi)));
  const rightM = 16;
  const topM = 30;
  const bottomM = 40;
  const plotW = width - leftM - rightM;
  const plotH = height - topM - bottomM;

  const canvas = new Canvas(width, height);
  const title = spec.title ?? basename(spec.input);
  canvas.drawText(10, 7, title, BLACK);

  const mapX = (v: number): number => Math.round(leftM + ((v - xLo) / (xHi - xLo)) * (plotW - 1));
  const mapY = (v: number): number => Math.round(topM + (1 - (v - yLo) / (yHi - yLo)) * (plotH - 1));

  // Frame and quarter-interval ticks on both axes.
  for (let i = 0; i <= 4; i += 1) {
    const f = i / 4;
    const gx = Math.round(leftM + f * (plotW - 1));
    const gy = Math.round(topM + f * (plotH - 1));
    if (i > 0 && i < 4) {
      canvas.fillRect(gx, topM, 1, plotH, LIGHT_GRAY);
      canvas.fillRect(leftM, gy, plotW, 1, LIGHT_GRAY);
    }
    const xv = xLo + f * (xHi - xLo);
    const yv = yHi - f * (yHi - yLo);
    if (i === 0 || i === 2 || i === 4) {
      const label = formatNum(xv);
      const lx = Math.min(width - measureText(label) - 2, Math.max(2, gx - Math.floor(measureText(label) / 2)));
      canvas.drawText(lx, topM + plotH + 6, label, BLACK);
      canvas.drawText(leftM - measureText(formatNum(yv)) - 6, gy - 3, formatNum(yv), BLACK);
    }
  }
  canvas.strokeRect(leftM - 1, topM - 1, plotW + 2, plotH + 2, AXIS_GRAY);
  canvas.drawText(leftM + Math.floor(plotW / 2) - measureText(table.columns[0]) / 2, height - 14, table.columns[0], BLACK);

  curves.forEach((curve, ci) => {
    const color = seriesColor(ci);
    let prevX: number | null = null;
    let prevY: number | null = null;
    for (let i = 0; i < x.length; i += 1) {
      const xv = x[i];
      const yv = curve.y[i];
      if (!Number.isFinite(xv) || !Number.isFinite(yv)) {
        prevX = null;
        prevY = null;
        continue;
      }
      const sx = mapX(xv);
      const sy = mapY(yv);
      if (prevX !== null && prevY !== null) {
        canvas.drawThickLine(prevX, prevY, sx, sy, color, 2);
      } else {
        canvas.fillRect(sx - 1, sy - 1, 3, 3, color);
      }
      prevX = sx;
      prevY = sy;
    }
  });

  // Legend, top-right inside the frame.
  const legendW = Math.max(...curves.map((c) => measureText(c.name))) + 24;
  let ly = topM + 6;
  const lx = leftM + plotW - legendW - 6;
  curves.forEach((curve, ci) => {
    canvas.fillRect(lx, ly + 2, 14, 2, seriesColor(ci));
    canvas.drawText(lx + 18, ly - 1, curve.name, BLACK);
    ly += 12;
  });

  writePng(canvas, spec.output);
  return {
    output: spec.output,
    width,
    height,
    note: `data=[${yRange.min},${yRange.max}]`,
  };
}

function renderRegionMap(spec: FigureSpec): RenderResult {
  const text = readFileSync(spec.input, "utf8");
  const region = parseRegionMap(text, spec.input);
  const { grid } = region;

  const s = cellSize(grid.m, grid.l);
  const plotW = grid.m * s;
  const plotH = grid.l * s;
  const titleH = 22;
  const leftM = 10;
  const bottomM = 42;
  const width = Math.max(leftM + plotW + 10, 300);
  const height = titleH + plotH + bottomM;

  const canvas = new Canvas(width, height);
  const title = spec.title ?? basename(spec.input);
  canvas.drawText(leftM, 7, title, BLACK);

  let retainedCount = 0;
  for (let k = 0; k < grid.l; k += 1) {
    const sy = titleH + (grid.l - 1 - k) * s;
    const rowOff = k * grid.m;
    for (let j = 0; j < grid.m; j += 1) {
      const isRetained = region.retained[rowOff + j] === 1;
      if (isRetained) retainedCount += 1;
      canvas.fillRect(leftM + j * s, sy, s, s, isRetained ? RETAINED_COLOR : EXCISED_COLOR);
    }
  }
  canvas.strokeRect(leftM - 1, titleH - 1, plotW + 2, plotH + 2, AXIS_GRAY);

  const legendY = titleH + plotH + 7;
  canvas.fillRect(leftM, legendY, 10, 8, RETAINED_COLOR);
  canvas.drawText(leftM + 14, legendY, "retained", BLACK);
  const exX = leftM + 14 + measureText("retained") + 16;
  canvas.fillRect(exX, legendY, 10, 8, EXCISED_COLOR);
  canvas.strokeRect(exX, legendY, 10, 8, AXIS_GRAY);
  canvas.drawText(exX + 14, legendY, "excised", BLACK);
  canvas.drawText(leftM, legendY + 13, gridCaption(region.t, grid), AXIS_GRAY);

  writePng(canvas, spec.output);
  const total = grid.m * grid.l;
  return {
    output: spec.output,
    width,
    height,
    note: `retained=${retainedCount} excised=${total - retainedCount}`,
  };
}

/** Render one figure; returns the geometry and sidecar note. */
export function renderFigure(spec: FigureSpec): RenderResult {
  switch (spec.kind) {
    case "heatmap":
      return renderHeatmap(spec);
    case "surface":
      return renderSurface(spec);
    case "series":
      return renderSeries(spec);
    case "region-map":
      return renderRegionMap(spec);
    default: {
      const bad: never = spec.kind;
      throw new Error(`unknown figure kind ${JSON.stringify(bad)}`);
    }
  }
}
