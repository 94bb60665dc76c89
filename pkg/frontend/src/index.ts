export {
  buildComparison,
  comparisonOption,
  extractComparison,
  loadNormalized,
  renderComparison,
  METRIC_PANELS,
  NORMALIZED_COLUMNS,
} from "./comparison.js";
export type { ComparisonData, NormalizedRow } from "./comparison.js";
export {
  demandOption,
  extractDemand,
  loadTraceDemand,
  renderDemand,
  TRACE_COLUMNS,
} from "./demand.js";
export type { DemandPoint } from "./demand.js";
export { PlotError, readCsv } from "./csv.js";
export { renderSvg } from "./render.js";
