/**
 * Least-squares slope, written in the same centered form as the harness
 * (sum((x - xm)(y - ym)) / sum((x - xm)^2)) so the two implementations act
 * as a cross-language oracle pair.
 */
export function leastSquaresSlope(xs: number[], ys: number[]): number {
  if (xs.length !== ys.length || xs.length < 2) {
    throw new Error("need two equal-length samples for a slope fit");
  }
  const xm = xs.reduce((a, b) => a + b, 0) / xs.length;
  const ym = ys.reduce((a, b) => a + b, 0) / ys.length;
  let num = 0;
  let den = 0;
  for (let i = 0; i < xs.length; i++) {
    num += (xs[i] - xm) * (ys[i] - ym);
    den += (xs[i] - xm) * (xs[i] - xm);
  }
  return num / den;
}

export function safeLog(values: number[]): number[] {
  return values.map((v) => Math.log(Math.max(v, 1e-300)));
}
