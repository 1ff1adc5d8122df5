/** Deterministic SVG scatter/line figures; no canvas or DOM dependencies. */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  line?: boolean;
}

export interface Annotation {
  text: string;
}

export interface Marker {
  x: number;
  label: string;
}

export interface FigureOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: "linear" | "log";
  yScale: "linear" | "log";
  annotations?: Annotation[];
  markers?: Marker[];
}

const W = 720;
const H = 480;
const M = { left: 70, right: 20, top: 40, bottom: 50 };

function transform(v: number, scale: "linear" | "log"): number {
  return scale === "log" ? Math.log10(Math.max(v, 1e-300)) : v;
}

function range(vals: number[]): [number, number] {
  let lo = Math.min(...vals);
  let hi = Math.max(...vals);
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.05 * (hi - lo);
  return [lo - pad, hi + pad];
}

function fmtTick(v: number, scale: "linear" | "log"): string {
  const value = scale === "log" ? Math.pow(10, v) : v;
  if (value !== 0 && (Math.abs(value) < 1e-3 || Math.abs(value) >= 1e4)) {
    return value.toExponential(1);
  }
  return String(Math.round(value * 1000) / 1000);
}

export function renderFigure(series: Series[], opts: FigureOptions): string {
  const pts = series.flatMap((s) =>
    s.x.map((x, i) => [transform(x, opts.xScale), transform(s.y[i], opts.yScale)]));
  const xs = pts.map((p) => p[0]);
  const ys = pts.map((p) => p[1]);
  const [x0, x1] = xs.length ? range(xs) : [0, 1];
  const [y0, y1] = ys.length ? range(ys) : [0, 1];
  const sx = (v: number) => M.left + ((transform(v, opts.xScale) - x0) / (x1 - x0)) * (W - M.left - M.right);
  const sy = (v: number) => H - M.bottom - ((transform(v, opts.yScale) - y0) / (y1 - y0)) * (H - M.top - M.bottom);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">`);
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(`<text x="${W / 2}" y="22" text-anchor="middle" font-size="16" font-family="sans-serif">${esc(opts.title)}</text>`);
  // axes
  parts.push(`<line x1="${M.left}" y1="${H - M.bottom}" x2="${W - M.right}" y2="${H - M.bottom}" stroke="black"/>`);
  parts.push(`<line x1="${M.left}" y1="${M.top}" x2="${M.left}" y2="${H - M.bottom}" stroke="black"/>`);
  parts.push(`<text x="${W / 2}" y="${H - 12}" text-anchor="middle" font-size="12" font-family="sans-serif">${esc(opts.xLabel)}</text>`);
  parts.push(`<text x="18" y="${H / 2}" text-anchor="middle" font-size="12" font-family="sans-serif" transform="rotate(-90 18 ${H / 2})">${esc(opts.yLabel)}</text>`);
  // ticks
  for (let i = 0; i <= 4; i++) {
    const tx = x0 + ((x1 - x0) * i) / 4;
    const px = M.left + ((tx - x0) / (x1 - x0)) * (W - M.left - M.right);
    parts.push(`<line x1="${px}" y1="${H - M.bottom}" x2="${px}" y2="${H - M.bottom + 5}" stroke="black"/>`);
    parts.push(`<text x="${px}" y="${H - M.bottom + 18}" text-anchor="middle" font-size="10" font-family="sans-serif">${fmtTick(tx, opts.xScale)}</text>`);
    const ty = y0 + ((y1 - y0) * i) / 4;
    const py = H - M.bottom - ((ty - y0) / (y1 - y0)) * (H - M.top - M.bottom);
    parts.push(`<line x1="${M.left - 5}" y1="${py}" x2="${M.left}" y2="${py}" stroke="black"/>`);
    parts.push(`<text x="${M.left - 8}" y="${py + 3}" text-anchor="end" font-size="10" font-family="sans-serif">${fmtTick(ty, opts.yScale)}</text>`);
  }
  // vertical markers (e.g. the adversarial r0)
  for (const mk of opts.markers ?? []) {
    const px = sx(mk.x);
    parts.push(`<line x1="${px}" y1="${M.top}" x2="${px}" y2="${H - M.bottom}" stroke="red" stroke-dasharray="4 3"/>`);
    parts.push(`<text x="${px + 4}" y="${M.top + 12}" font-size="10" fill="red" font-family="sans-serif">${esc(mk.label)}</text>`);
  }
  // series
  series.forEach((s, si) => {
    if (s.line && s.x.length > 1) {
      const d = s.x.map((x, i) => `${i === 0 ? "M" : "L"}${sx(x).toFixed(2)},${sy(s.y[i]).toFixed(2)}`).join(" ");
      parts.push(`<path d="${d}" fill="none" stroke="${s.color}" stroke-width="1.5"/>`);
    }
    for (let i = 0; i < s.x.length; i++) {
      parts.push(`<circle cx="${sx(s.x[i]).toFixed(2)}" cy="${sy(s.y[i]).toFixed(2)}" r="3" fill="${s.color}"/>`);
    }
    parts.push(`<text x="${W - M.right - 8}" y="${M.top + 14 + 14 * si}" text-anchor="end" font-size="11" fill="${s.color}" font-family="sans-serif">${esc(s.label)}</text>`);
  });
  (opts.annotations ?? []).forEach((a, i) => {
    parts.push(`<text x="${M.left + 8}" y="${M.top + 14 + 14 * i}" font-size="11" fill="#333" font-family="sans-serif">${esc(a.text)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n");
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
