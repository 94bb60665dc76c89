import { createRequire } from "node:module";
import type { EChartsOption } from "echarts/types/dist/echarts";

// echarts ships export=-style type declarations that NodeNext refuses to pair
// with its ESM entry point, so load the CommonJS build and type it by hand.
const require = createRequire(import.meta.url);
const echarts = require("echarts") as typeof import("echarts/types/dist/echarts");

/** Render an echarts option to an SVG string, server-side. */
export function renderSvg(
  option: EChartsOption,
  width = 960,
  height = 640,
): string {
  const chart = echarts.init(null, undefined, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  chart.setOption({ animation: false, ...option });
  const svg = chart.renderToSVGString();
  chart.dispose();
  return svg;
}
