import { readFileSync, writeFileSync, mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  buildComparison,
  extractComparison,
  loadNormalized,
  renderComparison,
  METRIC_PANELS,
} from "../src/comparison.js";
import { PlotError } from "../src/csv.js";

const HERE = fileURLToPath(new URL(".", import.meta.url));
const RUN_DIR = join(HERE, "..", "testdata", "tiny-run");
const NORMALIZED = join(RUN_DIR, "normalized.csv");

function stripSchemaColumn(csvText: string): string {
  // drop the trailing schema_version column to get the documented subset
  return (
    csvText
      .trimEnd()
      .split("\n")
      .map((line) => line.split(",").slice(0, 3).join(","))
      .join("\n") + "\n"
  );
}

describe("comparison pipeline", () => {
  it("extracted data equals the input normalized.csv exactly", () => {
    const data = buildComparison(loadNormalized(NORMALIZED));
    const extracted = extractComparison(data);
    expect(extracted).toBe(stripSchemaColumn(readFileSync(NORMALIZED, "utf8")));
  });

  it("baseline bars are exactly 1.0 on every panel", () => {
    const data = buildComparison(loadNormalized(NORMALIZED));
    for (const panel of METRIC_PANELS) {
      expect(data.values.get(panel.metric)!.get("queue-split")).toBe(1.0);
    }
  });

  it("renders one svg with all four panel titles", () => {
    const data = buildComparison(loadNormalized(NORMALIZED));
    const svg = renderComparison(data);
    expect(svg.startsWith("<svg")).toBe(true);
    for (const panel of METRIC_PANELS) {
      expect(svg).toContain(panel.title);
    }
    for (const mode of data.modes) {
      expect(svg).toContain(mode);
    }
  });

  it("keeps modes in first-appearance order", () => {
    const data = buildComparison(loadNormalized(NORMALIZED));
    const fromFile: string[] = [];
    for (const r of loadNormalized(NORMALIZED)) {
      if (!fromFile.includes(r.mode)) fromFile.push(r.mode);
    }
    expect(data.modes).toEqual(fromFile);
  });

  it("accepts single-mode input", () => {
    const rows = METRIC_PANELS.map((p) => ({
      metric: p.metric,
      mode: "only",
      value: "0.5",
    }));
    const data = buildComparison(rows);
    expect(data.modes).toEqual(["only"]);
    const svg = renderComparison(data);
    expect(svg).toContain("only");
  });

  it("names a wholly missing metric", () => {
    const rows = loadNormalized(NORMALIZED).filter((r) => r.metric !== "water");
    expect(() => buildComparison(rows)).toThrow(/missing metric 'water'/);
  });

  it("names a mode with a metric hole", () => {
    const rows = loadNormalized(NORMALIZED).filter(
      (r) => !(r.metric === "carbon" && r.mode === "opt-cost"),
    );
    expect(() => buildComparison(rows)).toThrow(
      /mode 'opt-cost' missing metric 'carbon'/,
    );
  });

  it("rejects a csv without the value column, naming it", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(dir, "normalized.csv");
    writeFileSync(bad, "metric,mode\ncost,opt-cost\n");
    expect(() => loadNormalized(bad)).toThrow(/missing column 'value'/);
  });

  it("rejects non-numeric values", () => {
    const rows = [{ metric: "ttft", mode: "m", value: "abc" }];
    expect(() => buildComparison(rows)).toThrow(PlotError);
  });
});
