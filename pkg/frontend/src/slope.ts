/** Least-squares slope of log(y) against log(x), skipping nonpositive pairs. */
export function rateSlope(x: number[], y: number[]): number {
  const lx: number[] = [];
  const ly: number[] = [];
  for (let i = 0; i < x.length; i++) {
    if (x[i] > 0 && y[i] > 0) {
      lx.push(Math.log(x[i]));
      ly.push(Math.log(y[i]));
    }
  }
  if (lx.length < 2) {
    throw new Error(`need at least two positive points for a slope fit, got ${lx.length}`);
  }
  const n = lx.length;
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  if (den === 0) {
    throw new Error("slope fit needs at least two distinct x values");
  }
  return num / den;
}
