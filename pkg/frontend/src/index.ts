export {
  RESULT_COLUMNS,
  SchemaError,
  parseProfile,
  parseResults,
} from "./schema.js";
export type { ProfileDoc, ResultColumn, ResultRow } from "./schema.js";
export {
  FIGURE_KINDS,
  complexityOption,
  e1Cdf,
  e1CdfOption,
  ferOption,
  groupCurves,
  orderDistOption,
  orderShares,
  seriesLabel,
} from "./figures.js";
export type { CurveSeries, FigureKind } from "./figures.js";
export { optionForKind, renderFigure, renderOptionToSvg } from "./render.js";
export type { RenderSpec } from "./render.js";
