/** Four-panel grouped-bar comparison from normalized.csv.
 *
 * Panels: TTFT, carbon, energy cost, water. Every bar is a mode's value
 * normalized against the baseline the run was normalized to, so the
 * baseline's own bars sit exactly at 1.0.
 */

import type { EChartsOption } from "echarts/types/dist/echarts";
import { CsvTable, PlotError, parseNumber, readCsv } from "./csv.js";
import { renderSvg } from "./render.js";

export const NORMALIZED_COLUMNS = ["metric", "mode", "value"];

export const METRIC_PANELS = [
  { metric: "ttft", title: "TTFT" },
  { metric: "carbon", title: "Carbon" },
  { metric: "cost", title: "Energy cost" },
  { metric: "water", title: "Water" },
];

export interface NormalizedRow {
  metric: string;
  mode: string;
  value: string; // exact file text; parsed only for plotting
}

export interface ComparisonData {
  modes: string[];
  values: Map<string, Map<string, number>>;
  rows: NormalizedRow[];
}

export function loadNormalized(path: string): NormalizedRow[] {
  const table: CsvTable = readCsv(path, NORMALIZED_COLUMNS);
  return table.rows.map((r) => ({
    metric: r.metric,
    mode: r.mode,
    value: r.value,
  }));
}

/** Index rows by panel, preserving input order for modes and extraction. */
export function buildComparison(input: NormalizedRow[]): ComparisonData {
  const panelMetrics = METRIC_PANELS.map((p) => p.metric);
  const rows = input.filter((r) => panelMetrics.includes(r.metric));

  const modes: string[] = [];
  for (const r of rows) {
    if (!modes.includes(r.mode)) modes.push(r.mode);
  }
  if (modes.length === 0) {
    throw new PlotError("no rows for any plottable metric");
  }

  const values = new Map<string, Map<string, number>>();
  for (const metric of panelMetrics) values.set(metric, new Map());
  for (const r of rows) {
    values
      .get(r.metric)!
      .set(r.mode, parseNumber(r.value, `${r.metric}/${r.mode}`));
  }

  for (const metric of panelMetrics) {
    const byMode = values.get(metric)!;
    if (byMode.size === 0) {
      throw new PlotError(`missing metric '${metric}'`);
    }
    for (const mode of modes) {
      if (!byMode.has(mode)) {
        throw new PlotError(`mode '${mode}' missing metric '${metric}'`);
      }
    }
  }
  return { modes, values, rows };
}

export function comparisonOption(data: ComparisonData): EChartsOption {
  const lefts = ["7%", "57%", "7%", "57%"];
  const tops = ["9%", "9%", "59%", "59%"];
  const titleLefts = ["25%", "75%", "25%", "75%"];
  const titleTops = ["2%", "2%", "52%", "52%"];

  return {
    title: METRIC_PANELS.map((p, i) => ({
      text: p.title,
      left: titleLefts[i],
      top: titleTops[i],
      textAlign: "center",
      textStyle: { fontSize: 14 },
    })),
    grid: METRIC_PANELS.map((_, i) => ({
      left: lefts[i],
      top: tops[i],
      width: "36%",
      height: "30%",
    })),
    xAxis: METRIC_PANELS.map((_, i) => ({
      type: "category" as const,
      gridIndex: i,
      data: data.modes,
      axisLabel: { rotate: 30, fontSize: 10 },
    })),
    yAxis: METRIC_PANELS.map((_, i) => ({
      type: "value" as const,
      gridIndex: i,
    })),
    series: METRIC_PANELS.map((p, i) => ({
      type: "bar" as const,
      name: p.title,
      xAxisIndex: i,
      yAxisIndex: i,
      data: data.modes.map((m) => data.values.get(p.metric)!.get(m)!),
      markLine: {
        silent: true,
        symbol: "none",
        lineStyle: { type: "dashed" as const },
        label: { show: false },
        data: [{ yAxis: 1.0 }],
      },
    })),
  };
}

export function renderComparison(data: ComparisonData): string {
  return renderSvg(comparisonOption(data));
}

/** The plotted values, byte-identical to the input rows that fed them. */
export function extractComparison(data: ComparisonData): string {
  const lines = [NORMALIZED_COLUMNS.join(",")];
  for (const r of data.rows) {
    lines.push(`${r.metric},${r.mode},${r.value}`);
  }
  return lines.join("\n") + "\n";
}
