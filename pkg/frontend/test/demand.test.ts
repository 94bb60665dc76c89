import { readFileSync, writeFileSync, mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  extractDemand,
  loadTraceDemand,
  renderDemand,
} from "../src/demand.js";

const HERE = fileURLToPath(new URL(".", import.meta.url));
const TRACE = join(HERE, "..", "testdata", "trace-tiny.csv");
const SNAPSHOT = join(HERE, "..", "testdata", "snapshots", "demand-tiny.csv");

const TRACE_HEADER =
  "request_id,arrival_epoch,model_id,input_tokens,output_tokens,origin_region";

function tmpTrace(lines: string[]): string {
  const dir = mkdtempSync(join(tmpdir(), "plots-"));
  const path = join(dir, "trace.csv");
  writeFileSync(path, [TRACE_HEADER, ...lines].join("\n") + "\n");
  return path;
}

// Small deterministic PRNG so the Poisson trace below is reproducible.
function lcg(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
}

function poisson(lambda: number, rand: () => number): number {
  // Knuth's method; fine for the lambdas used here
  const limit = Math.exp(-lambda);
  let count = 0;
  let product = rand();
  while (product > limit) {
    count += 1;
    product *= rand();
  }
  return count;
}

describe("demand pipeline", () => {
  it("matches the committed data snapshot for the bundled trace", () => {
    const series = loadTraceDemand(TRACE);
    expect(extractDemand(series)).toBe(readFileSync(SNAPSHOT, "utf8"));
  });

  it("renders an svg line chart", () => {
    const svg = renderDemand(loadTraceDemand(TRACE));
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("Token demand per epoch");
  });

  it("still renders a flat zero line for an empty trace", () => {
    const series = loadTraceDemand(tmpTrace([]));
    expect(series).toEqual([{ epoch: 0, tokens: 0 }]);
    expect(renderDemand(series).startsWith("<svg")).toBe(true);
  });

  it("fills unmentioned epochs with zero demand", () => {
    const series = loadTraceDemand(
      tmpTrace(["r1,0,m,10,5,east", "r2,3,m,20,0,east"]),
    );
    expect(series).toEqual([
      { epoch: 0, tokens: 15 },
      { epoch: 1, tokens: 0 },
      { epoch: 2, tokens: 0 },
      { epoch: 3, tokens: 20 },
    ]);
  });

  it("keeps a constant-rate synthetic trace within 4 sigma of its mean", () => {
    const rand = lcg(7);
    const lambda = 400;
    const tokensPerRequest = 50;
    const lines: string[] = [];
    let id = 0;
    const epochs = 24;
    for (let epoch = 0; epoch < epochs; epoch++) {
      const n = poisson(lambda, rand);
      for (let i = 0; i < n; i++) {
        lines.push(`r${id++},${epoch},m,30,20,east`);
      }
    }
    const series = loadTraceDemand(tmpTrace(lines));
    expect(series).toHaveLength(epochs);
    const mean = lambda * tokensPerRequest;
    const sigma = Math.sqrt(lambda) * tokensPerRequest;
    const max = Math.max(...series.map((p) => p.tokens));
    expect(max).toBeLessThanOrEqual(mean + 4 * sigma);
    expect(Math.min(...series.map((p) => p.tokens))).toBeGreaterThanOrEqual(
      mean - 4 * sigma,
    );
  });

  it("rejects a trace missing a column, naming it", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(dir, "trace.csv");
    writeFileSync(bad, "request_id,arrival_epoch\nr0,0\n");
    expect(() => loadTraceDemand(bad)).toThrow(/missing column 'model_id'/);
  });

  it("rejects non-numeric token counts, naming the request", () => {
    expect(() => loadTraceDemand(tmpTrace(["r7,0,m,abc,5,east"]))).toThrow(
      /r7/,
    );
  });
});
