/**
 * Reader for the experiment CSV schema: header `t,series,value`, one row per
 * (time step, series) pair, series labels shaped `<kind>:<policy>` with kind
 * in {regret, d1, reward}.
 */

export interface SeriesData {
  /** 1-based time steps, ascending. */
  t: number[];
  values: number[];
}

export interface ExperimentTable {
  /** Keyed by full series label, e.g. "regret:rbae". */
  series: Map<string, SeriesData>;
}

export class CsvFormatError extends Error {
  constructor(
    message: string,
    public readonly line: number,
  ) {
    super(`line ${line}: ${message}`);
    this.name = "CsvFormatError";
  }
}

export const SERIES_KINDS = ["regret", "d1", "reward"] as const;
export type SeriesKind = (typeof SERIES_KINDS)[number];

export function parseExperimentCsv(text: string): ExperimentTable {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new CsvFormatError("empty file", 1);
  }
  if (lines[0].trim() !== "t,series,value") {
    throw new CsvFormatError(`expected header "t,series,value", got "${lines[0]}"`, 1);
  }
  const series = new Map<string, SeriesData>();
  for (let i = 1; i < lines.length; i++) {
    const lineNo = i + 1;
    const parts = lines[i].split(",");
    if (parts.length !== 3) {
      throw new CsvFormatError(`expected 3 fields, got ${parts.length}`, lineNo);
    }
    const t = Number(parts[0]);
    if (!Number.isInteger(t) || t < 1) {
      throw new CsvFormatError(`bad time step "${parts[0]}"`, lineNo);
    }
    const label = parts[1];
    if (!label.includes(":")) {
      throw new CsvFormatError(`series label "${label}" is not <kind>:<policy>`, lineNo);
    }
    const value = Number(parts[2]);
    if (!Number.isFinite(value)) {
      throw new CsvFormatError(`bad value "${parts[2]}"`, lineNo);
    }
    let data = series.get(label);
    if (data === undefined) {
      data = { t: [], values: [] };
      series.set(label, data);
    }
    data.t.push(t);
    data.values.push(value);
  }
  return { series };
}

/** Policies that have a series of the given kind, in file order. */
export function policiesForKind(table: ExperimentTable, kind: SeriesKind): string[] {
  const found: string[] = [];
  for (const label of table.series.keys()) {
    const sep = label.indexOf(":");
    if (label.slice(0, sep) === kind) {
      found.push(label.slice(sep + 1));
    }
  }
  return found;
}
