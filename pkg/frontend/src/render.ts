/**
 * Headless SVG rendering of figure panels via echarts server-side renderer.
 * Output is deterministic for a fixed spec (animation off, no timestamps).
 */

import { createRequire } from "node:module";

import { PanelData } from "./figures.js";

// echarts ships an ESM entry without a module-type marker, which plain Node
// refuses; the CommonJS build loads everywhere, so use that.
const requireModule = createRequire(import.meta.url);
const echarts = requireModule("echarts") as typeof import("echarts");

type EChartsOption = import("echarts").EChartsOption;

export const PANEL_WIDTH = 640;
export const PANEL_HEIGHT = 480;

const AXIS_LABEL: Record<PanelData["kind"], string> = {
  regret: "regret",
  d1: "d1",
  reward: "cumulative reward",
};

function panelOption(panel: PanelData): EChartsOption {
  return {
    animation: false,
    title: { text: panel.title, left: "center" },
    legend: { data: panel.lines.map((l) => l.policy), bottom: 0 },
    grid: { left: 70, right: 20, top: 50, bottom: 60 },
    xAxis: { type: "value", name: "t", min: "dataMin", max: "dataMax" },
    yAxis: { type: "value", name: AXIS_LABEL[panel.kind] },
    series: panel.lines.map((line) => ({
      name: line.policy,
      type: "line" as const,
      showSymbol: false,
      data: line.t.map((t, i) => [t, line.values[i]]),
    })),
  };
}

/**
 * zrender numbers generated class/clip/gradient ids with process-global
 * counters, so raw output bytes depend on how many charts rendered before
 * this one. Renumber every generated token in order of first appearance.
 */
function normalizeLibraryIds(svg: string, prefix: string): string {
  const rename = new Map<string, string>();
  const counters = new Map<string, number>();
  return svg.replace(/zr\d+-([a-z]+)-?(\d+)/g, (token, kind: string) => {
    let fresh = rename.get(token);
    if (fresh === undefined) {
      const n = counters.get(kind) ?? 0;
      counters.set(kind, n + 1);
      fresh = `${prefix}${kind}-${n}`;
      rename.set(token, fresh);
    }
    return fresh;
  });
}

export function renderPanelSvg(panel: PanelData, idPrefix = "zr-"): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: PANEL_WIDTH,
    height: PANEL_HEIGHT,
  });
  try {
    chart.setOption(panelOption(panel));
    return normalizeLibraryIds(chart.renderToSVGString(), idPrefix);
  } finally {
    chart.dispose();
  }
}

/** Side-by-side composition of several panels into one SVG document. */
export function renderGridSvg(panels: PanelData[]): string {
  if (panels.length === 0) {
    throw new Error("grid needs at least one panel");
  }
  const inner = panels.map((panel, i) => {
    const svg = renderPanelSvg(panel, `p${i}-`);
    return `<svg x="${i * PANEL_WIDTH}" y="0">${svg}</svg>`;
  });
  const width = PANEL_WIDTH * panels.length;
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${PANEL_HEIGHT}" ` +
    `viewBox="0 0 ${width} ${PANEL_HEIGHT}">${inner.join("")}</svg>`
  );
}
