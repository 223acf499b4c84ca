export {
  ParseError,
  parseSnapshot,
  parseComplexSnapshot,
  parseRegionMap,
  parseSeriesCsv,
  isComplexSnapshotText,
  sameGrid,
} from "./formats.js";
export type { GridInfo, Snapshot, ComplexSnapshot, RegionMap, SeriesTable } from "./formats.js";
export { renderFigure, formatNum } from "./figures.js";
export type { FigureKind, FigureSpec, RenderResult } from "./figures.js";
export { encodePng, pngDimensions } from "./png.js";
export { planFigures, renderRunDirectory, main } from "./cli.js";
