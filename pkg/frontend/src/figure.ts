import { writeFileSync } from "fs";
import { aggregate, type SeriesBand } from "./aggregate.js";
import { loadTraces, TRACE_COLUMNS, type TraceColumn } from "./csv.js";
import { rateSlope } from "./slope.js";
import { renderSvg } from "./svg.js";

export interface FigureSpec {
  input: string; // directory or simple glob of trace CSVs
  x: TraceColumn;
  y: TraceColumn;
  loglog: boolean;
  out: string; // SVG path; sidecar slopes land next to it
}

export interface RenderResult {
  series: SeriesBand[];
  slopes: Map<string, number>;
  svgPath: string;
  sidecarPath: string;
}

const X_AXES: TraceColumn[] = ["comm_rounds", "grad_evals", "wall_seconds", "k"];
const Y_AXES: TraceColumn[] = ["objective", "feasibility"];

export function validateSpec(spec: FigureSpec): void {
  if (!X_AXES.includes(spec.x)) {
    throw new Error(`x axis must be one of ${X_AXES.join(", ")}, got '${spec.x}'`);
  }
  if (!Y_AXES.includes(spec.y)) {
    throw new Error(`y axis must be one of ${Y_AXES.join(", ")}, got '${spec.y}'`);
  }
  if (!TRACE_COLUMNS.includes(spec.x) || !TRACE_COLUMNS.includes(spec.y)) {
    throw new Error("axes must reference trace columns");
  }
}

export function render(spec: FigureSpec): RenderResult {
  validateSpec(spec);
  const traces = loadTraces(spec.input);
  const series = aggregate(traces, spec.x, spec.y);
  const slopes = new Map<string, number>();
  for (const s of series) {
    slopes.set(s.algo, rateSlope(s.x, s.mean));
  }
  const svg = renderSvg(series, spec.x, spec.y, spec.loglog);
  writeFileSync(spec.out, svg, "utf8");
  const sidecarPath = spec.out.replace(/\.svg$/, "") + ".slopes.txt";
  const lines = [...slopes.entries()].map(([algo, s]) => `${algo} ${s.toPrecision(17)}`);
  writeFileSync(sidecarPath, lines.join("\n") + "\n", "utf8");
  return { series, slopes, svgPath: spec.out, sidecarPath };
}
