/**
 * Parsers for the solver's on-disk artifacts.
 *
 * Every reader works from the file's text content plus its path; all
 * failures raise {@link ParseError} whose message starts with
 * `path:line:column:` (both 1-based) so a malformed file is pinpointed
 * exactly.  The formats:
 *
 * - scalar field snapshot: a `#`-prefixed header carrying the time and the
 *   grid geometry, then `L` rows of `M` comma-separated floats (row 0 is the
 *   bottom edge of the second coordinate);
 * - complex field snapshot: the same, followed by a `# component=qi`
 *   separator line and `L` further rows for the imaginary part;
 * - region map: the same header, then `L` rows of `M` characters, `R` for
 *   retained cells and `X` for excised ones;
 * - series CSV: a comma-separated header naming each column, then numeric
 *   rows (`nan`/`inf` tokens are legal values).
 */

export class ParseError extends Error {
  readonly file: string;
  readonly line: number;
  readonly column: number;

  constructor(file: string, line: number, column: number, detail: string) {
    super(`${file}:${line}:${column}: ${detail}`);
    this.name = "ParseError";
    this.file = file;
    this.line = line;
    this.column = column;
  }
}

/** Uniform rectangular grid geometry, reconstructed from a snapshot header. */
export interface GridInfo {
  /** Number of samples along the first coordinate (values per row). */
  m: number;
  /** Number of samples along the second coordinate (number of rows). */
  l: number;
  u1Min: number;
  u1Max: number;
  u2Min: number;
  u2Max: number;
  du1: number;
  du2: number;
}

/** A scalar field sampled on a grid at one instant. */
export interface Snapshot {
  t: number;
  grid: GridInfo;
  /** Row-major values, `l` rows of `m`; row 0 sits at `u2Min`. */
  values: Float64Array;
}

/** A complex field sampled on a grid at one instant. */
export interface ComplexSnapshot {
  t: number;
  grid: GridInfo;
  re: Float64Array;
  im: Float64Array;
}

/** A retained/excised cell classification on a grid. */
export interface RegionMap {
  t: number;
  grid: GridInfo;
  /** Row-major flags, 1 = retained, 0 = excised. */
  retained: Uint8Array;
}

/** A parsed series CSV: named columns over a shared row index. */
export interface SeriesTable {
  columns: string[];
  /** One Float64Array per column, all the same length. */
  data: Float64Array[];
}

const HEADER_RE =
  /^# t=(\S+) M=(\d+) L=(\d+) u1=\[([^\],]+),([^\]]+)\] u2=\[([^\],]+),([^\]]+)\]$/;

const FLOAT_RE = /^[+-]?(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)$/;

/**
 * Parse one numeric token as the solver writes them (Python `repr` output,
 * so `nan`, `inf` and `-inf` are possible).  Returns `null` on garbage.
 */
function parseFloatToken(token: string): number | null {
  const t = token.trim();
  if (FLOAT_RE.test(t)) return Number(t);
  const low = t.toLowerCase();
  if (low === "nan" || low === "+nan" || low === "-nan") return NaN;
  if (low === "inf" || low === "+inf" || low === "infinity") return Infinity;
  if (low === "-inf" || low === "-infinity") return -Infinity;
  return null;
}

function roundTo12(x: number): number {
  // Matches the writer's spacing reconstruction: round to 12 decimals.
  const factor = 1e12;
  return Math.round(x * factor) / factor;
}

function splitLines(text: string): string[] {
  const lines = text.split(/\r?\n/);
  // A trailing newline yields one empty final entry; drop it (but keep
  // interior empty lines so their line numbers stay accurate in errors).
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  return lines;
}

function parseHeaderLine(
  file: string,
  lineNo: number,
  line: string,
): { t: number; grid: GridInfo } {
  const match = HEADER_RE.exec(line);
  if (!match) {
    throw new ParseError(
      file,
      lineNo,
      1,
      `malformed snapshot header (expected "# t=<t> M=<m> L=<l> u1=[lo,hi] u2=[lo,hi]"): ${JSON.stringify(line)}`,
    );
  }
  const nums: number[] = [];
  for (let i = 1; i <= 7; i += 1) {
    if (i === 2 || i === 3) {
      nums.push(Number.parseInt(match[i], 10));
      continue;
    }
    const v = parseFloatToken(match[i]);
    if (v === null) {
      throw new ParseError(file, lineNo, 1, `non-numeric header field: ${JSON.stringify(match[i])}`);
    }
    nums.push(v);
  }
  const [t, m, l, u1Min, u1Max, u2Min, u2Max] = nums;
  if (m < 2 || l < 2) {
    throw new ParseError(file, lineNo, 1, `grid must be at least 2x2, got M=${m} L=${l}`);
  }
  const grid: GridInfo = {
    m,
    l,
    u1Min,
    u1Max,
    u2Min,
    u2Max,
    du1: roundTo12((u1Max - u1Min) / (m - 1)),
    du2: roundTo12((u2Max - u2Min) / (l - 1)),
  };
  return { t, grid };
}

/**
 * Parse `count` comma-separated floats from a data row into `out` starting
 * at `offset`.  Errors carry the 1-based field index as the column.
 */
function parseValueRow(
  file: string,
  lineNo: number,
  line: string,
  count: number,
  out: Float64Array,
  offset: number,
): void {
  const parts = line.split(",");
  if (parts.length !== count) {
    throw new ParseError(
      file,
      lineNo,
      Math.min(parts.length, count) + 1,
      `expected ${count} comma-separated values, found ${parts.length}`,
    );
  }
  for (let j = 0; j < count; j += 1) {
    const v = parseFloatToken(parts[j]);
    if (v === null) {
      throw new ParseError(file, lineNo, j + 1, `non-numeric value: ${JSON.stringify(parts[j].trim())}`);
    }
    out[offset + j] = v;
  }
}

function requireLine(file: string, lines: string[], index: number, what: string): string {
  if (index >= lines.length) {
    throw new ParseError(file, lines.length + 1, 1, `unexpected end of file: missing ${what}`);
  }
  return lines[index];
}

/** Parse a scalar field snapshot. Rejects files with trailing content. */
export function parseSnapshot(text: string, file: string): Snapshot {
  const lines = splitLines(text);
  const header = parseHeaderLine(file, 1, requireLine(file, lines, 0, "header"));
  const { m, l } = header.grid;
  const values = new Float64Array(m * l);
  for (let k = 0; k < l; k += 1) {
    const row = requireLine(file, lines, 1 + k, `data row ${k + 1} of ${l}`);
    parseValueRow(file, 2 + k, row, m, values, k * m);
  }
  if (lines.length > 1 + l) {
    throw new ParseError(file, 2 + l, 1, `expected ${l} data rows, file continues past them`);
  }
  return { t: header.t, grid: header.grid, values };
}

/** Parse a complex field snapshot (real block, separator, imaginary block). */
export function parseComplexSnapshot(text: string, file: string): ComplexSnapshot {
  const lines = splitLines(text);
  const header = parseHeaderLine(file, 1, requireLine(file, lines, 0, "header"));
  const { m, l } = header.grid;
  const re = new Float64Array(m * l);
  const im = new Float64Array(m * l);
  for (let k = 0; k < l; k += 1) {
    const row = requireLine(file, lines, 1 + k, `real data row ${k + 1} of ${l}`);
    parseValueRow(file, 2 + k, row, m, re, k * m);
  }
  const sep = requireLine(file, lines, 1 + l, `"# component=qi" separator`);
  if (sep !== "# component=qi") {
    throw new ParseError(file, 2 + l, 1, `expected "# component=qi" separator, got ${JSON.stringify(sep)}`);
  }
  for (let k = 0; k < l; k += 1) {
    const row = requireLine(file, lines, 2 + l + k, `imaginary data row ${k + 1} of ${l}`);
    parseValueRow(file, 3 + l + k, row, m, im, k * m);
  }
  if (lines.length > 2 + 2 * l) {
    throw new ParseError(file, 3 + 2 * l, 1, `expected ${2 * l} data rows, file continues past them`);
  }
  return { t: header.t, grid: header.grid, re, im };
}

/** True if the snapshot file contains a complex field (has the qi separator). */
export function isComplexSnapshotText(text: string): boolean {
  return text.includes("\n# component=qi\n") || text.endsWith("\n# component=qi");
}

/** Parse a retained/excised region map. */
export function parseRegionMap(text: string, file: string): RegionMap {
  const lines = splitLines(text);
  const header = parseHeaderLine(file, 1, requireLine(file, lines, 0, "header"));
  const { m, l } = header.grid;
  const retained = new Uint8Array(m * l);
  for (let k = 0; k < l; k += 1) {
    const row = requireLine(file, lines, 1 + k, `region row ${k + 1} of ${l}`);
    if (row.length !== m) {
      throw new ParseError(
        file,
        2 + k,
        Math.min(row.length, m) + 1,
        `expected ${m} region characters, found ${row.length}`,
      );
    }
    for (let j = 0; j < m; j += 1) {
      const ch = row[j];
      if (ch === "R") retained[k * m + j] = 1;
      else if (ch === "X") retained[k * m + j] = 0;
      else {
        throw new ParseError(file, 2 + k, j + 1, `region characters must be R or X, got ${JSON.stringify(ch)}`);
      }
    }
  }
  if (lines.length > 1 + l) {
    throw new ParseError(file, 2 + l, 1, `expected ${l} region rows, file continues past them`);
  }
  return { t: header.t, grid: header.grid, retained };
}

/**
 * Parse a series CSV: a header row naming columns, then numeric rows.
 * If `expectedColumns` is given, the header must match it exactly.
 */
export function parseSeriesCsv(text: string, file: string, expectedColumns?: string[]): SeriesTable {
  const lines = splitLines(text);
  const headerLine = requireLine(file, lines, 0, "CSV header");
  const columns = headerLine.split(",").map((c) => c.trim());
  if (columns.length < 1 || columns.some((c) => c.length === 0)) {
    throw new ParseError(file, 1, 1, `malformed CSV header: ${JSON.stringify(headerLine)}`);
  }
  if (expectedColumns) {
    const got = columns.join(",");
    const want = expectedColumns.join(",");
    if (got !== want) {
      throw new ParseError(file, 1, 1, `expected header ${JSON.stringify(want)}, got ${JSON.stringify(got)}`);
    }
  }
  const ncol = columns.length;
  const nrow = lines.length - 1;
  const row = new Float64Array(ncol);
  const data = columns.map(() => new Float64Array(nrow));
  for (let i = 0; i < nrow; i += 1) {
    parseValueRow(file, 2 + i, lines[1 + i], ncol, row, 0);
    for (let c = 0; c < ncol; c += 1) data[c][i] = row[c];
  }
  return { columns, data };
}

/** Grids attached to two files must agree before they can be compared. */
export function sameGrid(a: GridInfo, b: GridInfo): boolean {
  return (
    a.m === b.m &&
    a.l === b.l &&
    a.u1Min === b.u1Min &&
    a.u1Max === b.u1Max &&
    a.u2Min === b.u2Min &&
    a.u2Max === b.u2Max
  );
}
