/** CSV ingestion shared by both plot pipelines.
 *
 * Values are kept as the exact strings from the file so the extraction
 * mode can re-emit them byte-for-byte; numeric parsing happens only at
 * plot time.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class PlotError extends Error {}

export interface CsvTable {
  columns: string[];
  rows: Record<string, string>[];
}

export function readCsv(path: string, requiredColumns: string[]): CsvTable {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new PlotError(`input file not found: ${path}`);
  }
  const parsed = Papa.parse<Record<string, string>>(text.trimEnd(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new PlotError(`${path}: malformed CSV (${e.message})`);
  }
  const columns = parsed.meta.fields ?? [];
  for (const col of requiredColumns) {
    if (!columns.includes(col)) {
      throw new PlotError(`${path}: missing column '${col}'`);
    }
  }
  return { columns, rows: parsed.data };
}

export function parseNumber(value: string, where: string): number {
  const n = Number(value);
  if (value.trim() === "" || Number.isNaN(n)) {
    throw new PlotError(`${where}: not a number: '${value}'`);
  }
  return n;
}
