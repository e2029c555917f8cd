// A9: cross-check against the solver harness via its CSV interfaces only.
import { execFileSync } from "child_process";
import { mkdtempSync, readFileSync } from "fs";
import { tmpdir } from "os";
import path from "path";
import { beforeAll, describe, expect, it } from "vitest";
import { aggregate } from "../src/aggregate.js";
import { loadTraces } from "../src/csv.js";
import { render } from "../src/figure.js";

const PY = process.env.PYTHON ?? "python3";
let runDir: string;

beforeAll(() => {
  runDir = mkdtempSync(path.join(tmpdir(), "plotkit-a9-"));
  // noisy convex-regime quadratic sweep, several seeds, same instance family
  // the solver's own rate tests use
  execFileSync(
    PY,
    [
      "-m", "asyncpd.harness", "run",
      "--config", "/dev/null",
      "--N", "2000",
      "--m", "5",
      "--algo", "aasdcs",
      "--seeds", "0,1,2,3,4",
      "--out", runDir,
    ],
    { env: { ...process.env }, input: "" },
  );
}, 120000);

function pythonRateSlope(x: number[], y: number[]): number {
  const script =
    "import sys, json\n" +
    "from asyncpd.metrics import rate_slope\n" +
    "pts = json.load(sys.stdin)\n" +
    "print(repr(rate_slope(pts)))\n";
  const out = execFileSync(PY, ["-c", script], {
    input: JSON.stringify(x.map((v, i) => [v, y[i]])),
  });
  return Number(out.toString().trim());
}

describe("A9 plot pipeline", () => {
  it("sidecar slopes match the solver metrics module within 0.05", () => {
    for (const y of ["objective", "feasibility"] as const) {
      const out = path.join(runDir, `${y}.svg`);
      const result = render({ input: runDir, x: "comm_rounds", y, loglog: true, out });
      const [series] = result.series;
      const expected = pythonRateSlope(series.x, series.mean);
      const got = result.slopes.get(series.algo)!;
      const ok = Math.abs(got - expected) <= 0.05;
      console.log(
        `A9-slope-${y}: ${ok ? "PASS" : "FAIL"} (plotkit ${got.toFixed(4)} vs metrics ${expected.toFixed(4)})`,
      );
      expect(ok).toBe(true);
    }
  });

  it("aggregation means match harness summary.csv within 1e-9", () => {
    const summary = readFileSync(path.join(runDir, "summary.csv"), "utf8")
      .trim()
      .split("\n")
      .slice(1)
      .map((line) => line.split(","));
    const traces = loadTraces(runDir);
    const obj = aggregate(traces, "k", "objective")[0];
    const feas = aggregate(traces, "k", "feasibility")[0];
    expect(summary.length).toBe(obj.x.length);
    let worst = 0;
    summary.forEach((row, i) => {
      expect(Number(row[0])).toBe(obj.x[i]);
      worst = Math.max(
        worst,
        Math.abs(Number(row[3]) - obj.mean[i]),
        Math.abs(Number(row[5]) - feas.mean[i]),
      );
    });
    const ok = worst <= 1e-9;
    console.log(`A9-aggregation: ${ok ? "PASS" : "FAIL"} (max |plotkit - summary| = ${worst.toExponential(2)})`);
    expect(ok).toBe(true);
  });
});
