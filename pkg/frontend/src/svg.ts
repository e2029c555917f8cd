import type { SeriesBand } from "./aggregate.js";

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { top: 24, right: 24, bottom: 48, left: 64 };
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

interface Scale {
  (v: number): number;
}

function makeScale(lo: number, hi: number, a: number, b: number, log: boolean): Scale {
  if (log) {
    const llo = Math.log10(lo);
    const lhi = Math.log10(hi);
    return (v) => a + ((Math.log10(v) - llo) / (lhi - llo || 1)) * (b - a);
  }
  return (v) => a + ((v - lo) / (hi - lo || 1)) * (b - a);
}

function ticks(lo: number, hi: number, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
      const v = 10 ** e;
      if (v >= lo / 1.001 && v <= hi * 1.001) out.push(v);
    }
    return out.length >= 2 ? out : [lo, hi];
  }
  const step = (hi - lo) / 5 || 1;
  return Array.from({ length: 6 }, (_, i) => lo + i * step);
}

function fmt(v: number): string {
  if (v !== 0 && (Math.abs(v) < 1e-3 || Math.abs(v) >= 1e5)) return v.toExponential(0);
  return `${Number(v.toPrecision(4))}`;
}

function positive(values: number[]): number[] {
  return values.filter((v) => v > 0);
}

/** Hand-rolled SVG: mean line plus min/max band per series, optional log-log axes. */
export function renderSvg(
  series: SeriesBand[],
  xLabel: string,
  yLabel: string,
  loglog: boolean,
): string {
  const xs = series.flatMap((s) => (loglog ? positive(s.x) : s.x));
  const ys = series.flatMap((s) =>
    loglog ? [...positive(s.min), ...positive(s.max)] : [...s.min, ...s.max],
  );
  if (xs.length === 0 || ys.length === 0) {
    throw new Error("nothing to plot: no points on the requested scale");
  }
  const xlo = Math.min(...xs);
  const xhi = Math.max(...xs);
  const ylo = Math.min(...ys);
  const yhi = Math.max(...ys);
  const sx = makeScale(xlo, xhi, MARGIN.left, WIDTH - MARGIN.right, loglog);
  const sy = makeScale(ylo, yhi, HEIGHT - MARGIN.bottom, MARGIN.top, loglog);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" font-family="sans-serif" font-size="12">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
  );
  for (const t of ticks(xlo, xhi, loglog)) {
    const px = sx(t);
    parts.push(
      `<line x1="${px.toFixed(1)}" y1="${MARGIN.top}" x2="${px.toFixed(1)}" y2="${HEIGHT - MARGIN.bottom}" stroke="#eee"/>`,
      `<text x="${px.toFixed(1)}" y="${HEIGHT - MARGIN.bottom + 16}" text-anchor="middle">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(ylo, yhi, loglog)) {
    const py = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py.toFixed(1)}" x2="${WIDTH - MARGIN.right}" y2="${py.toFixed(1)}" stroke="#eee"/>`,
      `<text x="${MARGIN.left - 6}" y="${(py + 4).toFixed(1)}" text-anchor="end">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${(WIDTH / 2).toFixed(0)}" y="${HEIGHT - 8}" text-anchor="middle">${xLabel}</text>`,
    `<text x="14" y="${(HEIGHT / 2).toFixed(0)}" text-anchor="middle" transform="rotate(-90 14 ${(HEIGHT / 2).toFixed(0)})">${yLabel}</text>`,
  );

  series.forEach((s, idx) => {
    const color = COLORS[idx % COLORS.length];
    const keep = s.x
      .map((_, i) => i)
      .filter((i) => !loglog || (s.x[i] > 0 && s.min[i] > 0 && s.max[i] > 0 && s.mean[i] > 0));
    const band =
      keep.map((i, j) => `${j === 0 ? "M" : "L"}${sx(s.x[i]).toFixed(1)},${sy(s.max[i]).toFixed(1)}`).join(" ") +
      " " +
      [...keep].reverse().map((i) => `L${sx(s.x[i]).toFixed(1)},${sy(s.min[i]).toFixed(1)}`).join(" ") +
      " Z";
    const line = keep
      .map((i, j) => `${j === 0 ? "M" : "L"}${sx(s.x[i]).toFixed(1)},${sy(s.mean[i]).toFixed(1)}`)
      .join(" ");
    parts.push(
      `<path d="${band}" fill="${color}" fill-opacity="0.15" stroke="none"/>`,
      `<path d="${line}" fill="none" stroke="${color}" stroke-width="1.5"/>`,
      `<rect x="${WIDTH - MARGIN.right - 150}" y="${MARGIN.top + 18 * idx}" width="12" height="12" fill="${color}"/>`,
      `<text x="${WIDTH - MARGIN.right - 132}" y="${MARGIN.top + 18 * idx + 10}">${s.algo} (${s.runs} run${s.runs === 1 ? "" : "s"})</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n");
}
