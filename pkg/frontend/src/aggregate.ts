import type { TraceColumn, TraceFile } from "./csv.js";

export interface SeriesBand {
  algo: string;
  x: number[];
  mean: number[];
  min: number[];
  max: number[];
  runs: number;
}

/**
 * Group runs by algorithm and reduce the chosen y column to a mean line with a
 * min/max band.  Runs of one algorithm must share the checkpoint grid (the
 * harness logs all seeds on the same k schedule).
 */
export function aggregate(
  traces: TraceFile[],
  xCol: TraceColumn,
  yCol: TraceColumn,
): SeriesBand[] {
  const byAlgo = new Map<string, TraceFile[]>();
  for (const t of traces) {
    const bucket = byAlgo.get(t.algo) ?? [];
    bucket.push(t);
    byAlgo.set(t.algo, bucket);
  }
  const out: SeriesBand[] = [];
  for (const [algo, runs] of [...byAlgo.entries()].sort()) {
    const n = runs[0].rows.length;
    for (const run of runs) {
      if (run.rows.length !== n) {
        throw new Error(`${algo}: run ${run.path} has ${run.rows.length} rows, expected ${n}`);
      }
      for (let i = 0; i < n; i++) {
        if (run.rows[i].k !== runs[0].rows[i].k) {
          throw new Error(`${algo}: checkpoint grids disagree at row ${i}`);
        }
      }
    }
    const x = runs[0].rows.map((r) => r[xCol]);
    const mean: number[] = [];
    const min: number[] = [];
    const max: number[] = [];
    for (let i = 0; i < n; i++) {
      const vals = runs.map((run) => run.rows[i][yCol]);
      mean.push(vals.reduce((a, b) => a + b, 0) / vals.length);
      min.push(Math.min(...vals));
      max.push(Math.max(...vals));
    }
    out.push({ algo, x, mean, min, max, runs: runs.length });
  }
  return out;
}
