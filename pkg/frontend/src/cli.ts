#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { render, type FigureSpec } from "./figure.js";
import type { TraceColumn } from "./csv.js";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .command("plot", "render a convergence figure from run trace CSVs")
    .demandCommand(1)
    .option("in", { type: "string", demandOption: true, describe: "trace CSV directory or glob" })
    .option("x", {
      type: "string",
      default: "comm_rounds",
      choices: ["comm_rounds", "grad_evals", "wall_seconds", "k"],
    })
    .option("y", { type: "string", default: "objective", choices: ["objective", "feasibility"] })
    .option("loglog", { type: "boolean", default: false })
    .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
    .strict()
    .parse();

  const spec: FigureSpec = {
    input: args.in,
    x: args.x as TraceColumn,
    y: args.y as TraceColumn,
    loglog: args.loglog,
    out: args.out,
  };
  try {
    const result = render(spec);
    for (const [algo, slope] of result.slopes) {
      console.log(`${algo}: fitted slope ${slope.toFixed(4)}`);
    }
    console.log(`wrote ${result.svgPath} and ${result.sidecarPath}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
