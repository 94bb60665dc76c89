#!/usr/bin/env node
/** plot comparison|demand --in <dir> --out <file> [--extract <file>]
 *
 * comparison reads <dir>/normalized.csv; demand reads <dir>/trace.csv.
 * --out writes the SVG figure; --extract additionally dumps the plotted
 * values as CSV, byte-comparable to the input subset.
 */

import { writeFileSync } from "node:fs";
import { join } from "node:path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import {
  buildComparison,
  extractComparison,
  loadNormalized,
  renderComparison,
} from "./comparison.js";
import { extractDemand, loadTraceDemand, renderDemand } from "./demand.js";
import { PlotError } from "./csv.js";

interface CommonArgs {
  in: string;
  out: string;
  extract?: string;
}

function runComparison(args: CommonArgs): void {
  const data = buildComparison(loadNormalized(join(args.in, "normalized.csv")));
  writeFileSync(args.out, renderComparison(data));
  if (args.extract) writeFileSync(args.extract, extractComparison(data));
}

function runDemand(args: CommonArgs): void {
  const series = loadTraceDemand(join(args.in, "trace.csv"));
  writeFileSync(args.out, renderDemand(series));
  if (args.extract) writeFileSync(args.extract, extractDemand(series));
}

export function main(argv: string[]): number {
  let exitCode = 0;
  const report = (err: unknown) => {
    exitCode = 1;
    if (err instanceof PlotError) {
      console.error(err.message);
    } else {
      throw err;
    }
  };
  const guarded =
    (fn: (a: CommonArgs) => void) =>
    (a: unknown): void => {
      try {
        fn(a as CommonArgs);
      } catch (err) {
        report(err);
      }
    };

  yargs(argv)
    .scriptName("plot")
    .option("in", {
      type: "string",
      demandOption: true,
      describe: "input directory",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .option("extract", {
      type: "string",
      describe: "also dump the plotted values as CSV",
    })
    .command("comparison", "four normalized metric panels", {}, guarded(runComparison))
    .command("demand", "token demand over time", {}, guarded(runDemand))
    .demandCommand(1, "choose a subcommand: comparison or demand")
    .strict()
    .fail((msg, err) => {
      exitCode = 1;
      console.error(msg ?? err?.message ?? "unknown error");
    })
    .exitProcess(false)
    .parseSync();

  return exitCode;
}

// Run when invoked as a script (node dist/cli.js or the plot bin).
if (
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href
) {
  process.exit(main(hideBin(process.argv)));
}
