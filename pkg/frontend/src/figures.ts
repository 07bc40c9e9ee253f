/**
 * Figure specifications and series selection. A panel is one axis pair with
 * one line per policy; the panel kind picks which series prefix is drawn
 * (regret panels plot shortfall vs the oracle, d1 panels the first type's
 * arrival share).
 */

import { ExperimentTable, SeriesData, SeriesKind, policiesForKind } from "./schema.js";

export interface FigureSpec {
  csvPath: string;
  kind: SeriesKind;
  /** Policies to draw; undefined = every policy present for the kind. */
  policies?: string[];
  title?: string;
  outPath: string;
  /** Keep every n-th point (1 = all, the default: no downsampling). */
  stride?: number;
}

export interface PanelData {
  kind: SeriesKind;
  title: string;
  lines: { policy: string; t: number[]; values: number[] }[];
}

export class MissingSeriesError extends Error {
  constructor(kind: SeriesKind, missing: string[]) {
    super(`no "${kind}" series for: ${missing.join(", ")}`);
    this.name = "MissingSeriesError";
  }
}

export class EmptyPolicyListError extends Error {
  constructor() {
    super("policy list is empty; nothing to plot");
    this.name = "EmptyPolicyListError";
  }
}

function stridePoints(data: SeriesData, stride: number): { t: number[]; values: number[] } {
  if (stride <= 1) {
    return { t: data.t, values: data.values };
  }
  const t: number[] = [];
  const values: number[] = [];
  for (let i = 0; i < data.t.length; i += stride) {
    t.push(data.t[i]);
    values.push(data.values[i]);
  }
  // always keep the final point so the curve ends at the horizon
  const last = data.t.length - 1;
  if (last >= 0 && t[t.length - 1] !== data.t[last]) {
    t.push(data.t[last]);
    values.push(data.values[last]);
  }
  return { t, values };
}

export function selectPanel(
  table: ExperimentTable,
  kind: SeriesKind,
  policies?: string[],
  title?: string,
  stride = 1,
): PanelData {
  const available = policiesForKind(table, kind);
  const wanted = policies ?? available;
  if (wanted.length === 0) {
    throw new EmptyPolicyListError();
  }
  const missing = wanted.filter((p) => !available.includes(p));
  if (missing.length > 0) {
    throw new MissingSeriesError(kind, missing);
  }
  const lines = wanted.map((policy) => {
    const data = table.series.get(`${kind}:${policy}`)!;
    const { t, values } = stridePoints(data, stride);
    return { policy, t, values };
  });
  return { kind, title: title ?? defaultTitle(kind), lines };
}

function defaultTitle(kind: SeriesKind): string {
  switch (kind) {
    case "regret":
      return "Mean regret vs oracle";
    case "d1":
      return "Share of type-1 arrivals";
    case "reward":
      return "Mean cumulative reward";
  }
}
