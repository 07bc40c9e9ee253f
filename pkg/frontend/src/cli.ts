#!/usr/bin/env node
/**
 * plot --csv <path> --kind {regret|d1|reward} --out <path>
 *      [--policies a,b,c] [--title text] [--stride n]
 * plot --grid spec.json --out <path>
 *
 * The grid spec is a JSON array of {csv, kind, policies?, title?, stride?}
 * objects rendered side by side into a single SVG.
 */

import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FigureSpec, PanelData, selectPanel } from "./figures.js";
import { renderGridSvg, renderPanelSvg } from "./render.js";
import { SERIES_KINDS, SeriesKind, parseExperimentCsv } from "./schema.js";

function loadPanel(spec: Omit<FigureSpec, "outPath">): PanelData {
  const text = readFileSync(spec.csvPath, "utf-8");
  const table = parseExperimentCsv(text);
  return selectPanel(table, spec.kind, spec.policies, spec.title, spec.stride ?? 1);
}

function parsePolicies(raw: string | undefined): string[] | undefined {
  if (raw === undefined) {
    return undefined;
  }
  return raw
    .split(",")
    .map((p) => p.trim())
    .filter((p) => p.length > 0);
}

interface GridEntry {
  csv: string;
  kind: SeriesKind;
  policies?: string[];
  title?: string;
  stride?: number;
}

function loadGridSpec(path: string): GridEntry[] {
  const data = JSON.parse(readFileSync(path, "utf-8"));
  if (!Array.isArray(data) || data.length === 0) {
    throw new Error(`grid spec ${path} must be a non-empty JSON array`);
  }
  return data.map((entry, i) => {
    if (typeof entry.csv !== "string" || !SERIES_KINDS.includes(entry.kind)) {
      throw new Error(`grid entry ${i} needs "csv" and a valid "kind"`);
    }
    return entry as GridEntry;
  });
}

export function main(argv: string[]): number {
  const args = yargs(argv)
    .scriptName("plot")
    .option("csv", { type: "string", describe: "experiment CSV to read" })
    .option("kind", { choices: SERIES_KINDS, describe: "panel kind" })
    .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
    .option("policies", { type: "string", describe: "comma-separated policy subset" })
    .option("title", { type: "string" })
    .option("stride", { type: "number", default: 1, describe: "keep every n-th point" })
    .option("grid", { type: "string", describe: "JSON file with panel specs" })
    .conflicts("grid", "csv")
    .strict()
    .exitProcess(false)
    .parseSync();

  try {
    let svg: string;
    if (args.grid !== undefined) {
      const panels = loadGridSpec(args.grid).map((entry) =>
        loadPanel({
          csvPath: entry.csv,
          kind: entry.kind,
          policies: entry.policies,
          title: entry.title,
          stride: entry.stride,
        }),
      );
      svg = renderGridSvg(panels);
    } else {
      if (args.csv === undefined || args.kind === undefined) {
        throw new Error("need --csv and --kind (or --grid)");
      }
      const panel = loadPanel({
        csvPath: args.csv,
        kind: args.kind,
        policies: parsePolicies(args.policies),
        title: args.title,
        stride: args.stride,
      });
      svg = renderPanelSvg(panel);
    }
    writeFileSync(args.out, svg, "utf-8");
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(hideBin(process.argv)));
}
