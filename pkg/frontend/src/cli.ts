/**
 * Command-line entry point: render every figure a solver run directory
 * supports.
 *
 *     oscenv-plots <run-dir> [--out <dir>]
 *
 * The run directory is scanned for known artifacts:
 *
 * - `fp_t*.txt`, `density_t*.txt`  → heatmap + surface (one shared color
 *   scale across all of them, so frames at different times are comparable);
 * - `q_t*.txt`                     → two-panel heatmap (own shared scale);
 * - `region_t*.txt`                → region map;
 * - `alpha.csv`, `trajectory.csv`, `fk.csv`, `entropy.csv`,
 *   `validation.csv`, `components.csv` → series plots.
 *
 * Images land in `<run-dir>/plots` unless `--out` says otherwise, next to
 * a `scales.txt` sidecar recording the numeric range each figure used.
 * Output is deterministic: the same run directory renders to byte-identical
 * files every time.
 */

import { readdirSync, readFileSync, writeFileSync, mkdirSync, statSync } from "node:fs";
import { join, basename, resolve } from "node:path";
import { pathToFileURL } from "node:url";

import {
  parseSnapshot,
  parseComplexSnapshot,
  isComplexSnapshotText,
  ParseError,
} from "./formats.js";
import { renderFigure, type FigureSpec, type RenderResult } from "./figures.js";

const USAGE = "usage: oscenv-plots <run-dir> [--out <dir>]";

interface PlannedFigure {
  spec: FigureSpec;
  /** Snapshot scale group this figure's color range is pinned to, if any. */
  scaleGroup?: "field" | "complex";
}

function stem(name: string): string {
  const dot = name.lastIndexOf(".");
  return dot > 0 ? name.slice(0, dot) : name;
}

/** Series figures per CSV artifact: output suffix and column selection. */
const SERIES_PLANS: ReadonlyArray<{
  file: string;
  figures: ReadonlyArray<{ suffix: string; columns?: string[] }>;
}> = [
  { file: "alpha.csv", figures: [{ suffix: "alpha" }] },
  {
    file: "trajectory.csv",
    figures: [
      { suffix: "trajectory_lambda", columns: ["re_lambda", "im_lambda"] },
      { suffix: "trajectory_xi", columns: ["re_xi", "im_xi"] },
    ],
  },
  { file: "fk.csv", figures: [{ suffix: "fk", columns: ["re_mean", "im_mean"] }] },
  { file: "entropy.csv", figures: [{ suffix: "entropy" }] },
  { file: "validation.csv", figures: [{ suffix: "validation" }] },
  { file: "components.csv", figures: [{ suffix: "components", columns: ["n_total", "n_upper", "n_lower"] }] },
];

/** Decide every figure a run directory's contents call for. */
export function planFigures(runDir: string, outDir: string): PlannedFigure[] {
  const entries = readdirSync(runDir).sort();
  const planned: PlannedFigure[] = [];

  for (const name of entries) {
    const input = join(runDir, name);
    if (/^(fp|density)_t.*\.txt$/.test(name)) {
      planned.push({
        spec: { kind: "heatmap", input, output: join(outDir, `heatmap_${stem(name)}.png`), title: stem(name) },
        scaleGroup: "field",
      });
      planned.push({
        spec: { kind: "surface", input, output: join(outDir, `surface_${stem(name)}.png`), title: stem(name) },
        scaleGroup: "field",
      });
    } else if (/^q_t.*\.txt$/.test(name)) {
      planned.push({
        spec: { kind: "heatmap", input, output: join(outDir, `heatmap_${stem(name)}.png`), title: stem(name) },
        scaleGroup: "complex",
      });
    } else if (/^region_t.*\.txt$/.test(name)) {
      planned.push({
        spec: { kind: "region-map", input, output: join(outDir, `${stem(name)}.png`), title: stem(name) },
      });
    } else {
      const plan = SERIES_PLANS.find((p) => p.file === name);
      if (plan) {
        for (const fig of plan.figures) {
          planned.push({
            spec: {
              kind: "series",
              input,
              output: join(outDir, `series_${fig.suffix}.png`),
              title: fig.suffix,
              columns: fig.columns,
            },
          });
        }
      }
    }
  }
  return planned;
}

/** Run-wide min/max over every input in a snapshot scale group. */
function groupRange(figures: PlannedFigure[], group: "field" | "complex"): { lo: number; hi: number } | null {
  let lo = Infinity;
  let hi = -Infinity;
  const seen = new Set<string>();
  for (const fig of figures) {
    if (fig.scaleGroup !== group || seen.has(fig.spec.input)) continue;
    seen.add(fig.spec.input);
    const text = readFileSync(fig.spec.input, "utf8");
    const arrays: Float64Array[] = [];
    if (isComplexSnapshotText(text)) {
      const snap = parseComplexSnapshot(text, fig.spec.input);
      arrays.push(snap.re, snap.im);
    } else {
      arrays.push(parseSnapshot(text, fig.spec.input).values);
    }
    for (const arr of arrays) {
      for (let i = 0; i < arr.length; i += 1) {
        const v = arr[i];
        if (!Number.isFinite(v)) continue;
        if (v < lo) lo = v;
        if (v > hi) hi = v;
      }
    }
  }
  if (lo > hi) return null;
  return { lo, hi };
}

/**
 * Render every figure for a run directory.  Returns the render results in
 * output order (the sidecar mirrors them).
 */
export function renderRunDirectory(runDir: string, outDir: string): RenderResult[] {
  const planned = planFigures(runDir, outDir);
  if (planned.length === 0) {
    throw new Error(`${runDir}: no renderable artifacts found`);
  }

  const fieldRange = groupRange(planned, "field");
  const complexRange = groupRange(planned, "complex");
  for (const fig of planned) {
    const range = fig.scaleGroup === "field" ? fieldRange : fig.scaleGroup === "complex" ? complexRange : null;
    if (range) {
      fig.spec.scaleMin = range.lo;
      fig.spec.scaleMax = range.hi;
    }
  }

  planned.sort((a, b) => (a.spec.output < b.spec.output ? -1 : a.spec.output > b.spec.output ? 1 : 0));
  mkdirSync(outDir, { recursive: true });
  const results: RenderResult[] = [];
  for (const fig of planned) {
    results.push(renderFigure(fig.spec));
  }

  const sidecar = results
    .map((r, i) => `${basename(r.output)}: kind=${planned[i].spec.kind} ${r.note}`)
    .join("\n");
  writeFileSync(join(outDir, "scales.txt"), `${sidecar}\n`);
  return results;
}

/** CLI driver; returns the process exit code. */
export function main(argv: string[]): number {
  let runDir: string | null = null;
  let outDir: string | null = null;
  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    if (arg === "--out") {
      i += 1;
      if (i >= argv.length) {
        process.stderr.write(`--out needs a value\n${USAGE}\n`);
        return 2;
      }
      outDir = argv[i];
    } else if (arg === "-h" || arg === "--help") {
      process.stdout.write(`${USAGE}\n`);
      return 0;
    } else if (arg.startsWith("-")) {
      process.stderr.write(`unknown option ${arg}\n${USAGE}\n`);
      return 2;
    } else if (runDir === null) {
      runDir = arg;
    } else {
      process.stderr.write(`unexpected argument ${arg}\n${USAGE}\n`);
      return 2;
    }
  }
  if (runDir === null) {
    process.stderr.write(`${USAGE}\n`);
    return 2;
  }

  const run = resolve(runDir);
  try {
    if (!statSync(run).isDirectory()) {
      process.stderr.write(`${run}: not a directory\n`);
      return 2;
    }
  } catch {
    process.stderr.write(`${run}: no such directory\n`);
    return 2;
  }

  const out = resolve(outDir ?? join(run, "plots"));
  try {
    const results = renderRunDirectory(run, out);
    for (const r of results) {
      process.stdout.write(`wrote ${r.output} (${r.width}x${r.height})\n`);
    }
    process.stdout.write(`wrote ${join(out, "scales.txt")}\n`);
  } catch (err) {
    if (err instanceof ParseError || err instanceof Error) {
      process.stderr.write(`${err.message}\n`);
      return 2;
    }
    throw err;
  }
  return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
