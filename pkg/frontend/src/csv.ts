import { readFileSync, readdirSync, statSync } from "fs";
import path from "path";
import Papa from "papaparse";

export const TRACE_COLUMNS = [
  "k",
  "comm_rounds",
  "grad_evals",
  "objective",
  "feasibility",
  "wall_seconds",
  "seed",
] as const;

export type TraceColumn = (typeof TRACE_COLUMNS)[number];

export interface TraceRow {
  k: number;
  comm_rounds: number;
  grad_evals: number;
  objective: number;
  feasibility: number;
  wall_seconds: number;
  seed: number;
}

export interface TraceFile {
  /** Series key parsed from the `<algo>_<seed>.csv` filename convention. */
  algo: string;
  seed: number;
  path: string;
  rows: TraceRow[];
}

export function parseTraceCsv(filePath: string): TraceRow[] {
  const text = readFileSync(filePath, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new Error(`${filePath}: ${parsed.errors[0].message}`);
  }
  const header = parsed.meta.fields ?? [];
  for (const col of TRACE_COLUMNS) {
    if (!header.includes(col)) {
      throw new Error(`${filePath}: missing column '${col}' (header: ${header.join(",")})`);
    }
  }
  return parsed.data.map((raw, i) => {
    const row = {} as Record<TraceColumn, number>;
    for (const col of TRACE_COLUMNS) {
      const v = Number(raw[col]);
      if (!Number.isFinite(v)) {
        throw new Error(`${filePath}: row ${i + 1}: non-numeric ${col} '${raw[col]}'`);
      }
      row[col] = v;
    }
    return row as TraceRow;
  });
}

export function seriesKeyFromFilename(filePath: string): { algo: string; seed: number } {
  const base = path.basename(filePath).replace(/\.csv$/, "");
  const cut = base.lastIndexOf("_");
  const algo = cut >= 0 ? base.slice(0, cut) : base;
  const seed = cut >= 0 ? Number(base.slice(cut + 1)) : NaN;
  return { algo, seed: Number.isInteger(seed) ? seed : -1 };
}

/** Expand a directory or a simple `*`-glob into matching trace CSV paths. */
export function expandInputs(input: string): string[] {
  let dir = input;
  let pattern: RegExp | null = null;
  if (input.includes("*")) {
    dir = path.dirname(input);
    const escaped = path
      .basename(input)
      .replace(/[.+^${}()|[\]\\]/g, "\\$&")
      .replace(/\*/g, ".*");
    pattern = new RegExp(`^${escaped}$`);
  } else if (!statSync(input, { throwIfNoEntry: false })?.isDirectory()) {
    return statSync(input, { throwIfNoEntry: false }) ? [input] : [];
  }
  const names = readdirSync(dir).filter(
    (n) => n.endsWith(".csv") && n !== "summary.csv" && (!pattern || pattern.test(n)),
  );
  return names.sort().map((n) => path.join(dir, n));
}

export function loadTraces(input: string): TraceFile[] {
  const paths = expandInputs(input);
  if (paths.length === 0) {
    throw new Error(`no trace CSVs matched '${input}'`);
  }
  return paths.map((p) => ({
    ...seriesKeyFromFilename(p),
    path: p,
    rows: parseTraceCsv(p),
  }));
}
