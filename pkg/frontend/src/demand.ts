/** Token demand over time from a trace CSV. */

import type { EChartsOption } from "echarts/types/dist/echarts";
import { PlotError, parseNumber, readCsv } from "./csv.js";
import { renderSvg } from "./render.js";

export const TRACE_COLUMNS = [
  "request_id",
  "arrival_epoch",
  "model_id",
  "input_tokens",
  "output_tokens",
  "origin_region",
];

export interface DemandPoint {
  epoch: number;
  tokens: number;
}

export function loadTraceDemand(path: string): DemandPoint[] {
  const table = readCsv(path, TRACE_COLUMNS);
  const perEpoch = new Map<number, number>();
  for (const r of table.rows) {
    const epoch = parseNumber(r.arrival_epoch, `${path} request ${r.request_id}`);
    if (!Number.isInteger(epoch) || epoch < 0) {
      throw new PlotError(`${path}: bad arrival_epoch '${r.arrival_epoch}'`);
    }
    const tokens =
      parseNumber(r.input_tokens, `${path} request ${r.request_id}`) +
      parseNumber(r.output_tokens, `${path} request ${r.request_id}`);
    perEpoch.set(epoch, (perEpoch.get(epoch) ?? 0) + tokens);
  }
  // A trace with no rows still plots: one flat zero point.
  if (perEpoch.size === 0) return [{ epoch: 0, tokens: 0 }];
  const last = Math.max(...perEpoch.keys());
  const series: DemandPoint[] = [];
  for (let epoch = 0; epoch <= last; epoch++) {
    series.push({ epoch, tokens: perEpoch.get(epoch) ?? 0 });
  }
  return series;
}

export function demandOption(series: DemandPoint[]): EChartsOption {
  return {
    title: { text: "Token demand per epoch", left: "center" },
    grid: { left: "10%", right: "5%", top: "12%", bottom: "12%" },
    xAxis: {
      type: "category",
      name: "epoch",
      data: series.map((p) => String(p.epoch)),
    },
    yAxis: { type: "value", name: "tokens" },
    series: [
      {
        type: "line",
        showSymbol: false,
        data: series.map((p) => p.tokens),
      },
    ],
  };
}

export function renderDemand(series: DemandPoint[]): string {
  return renderSvg(demandOption(series), 960, 420);
}

export function extractDemand(series: DemandPoint[]): string {
  const lines = ["epoch,total_tokens"];
  for (const p of series) lines.push(`${p.epoch},${p.tokens}`);
  return lines.join("\n") + "\n";
}
