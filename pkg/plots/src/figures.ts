/** Standard figures for harness runs, with sidecar least-squares fits. */

import { readFileSync, writeFileSync, mkdirSync } from "fs";
import { dirname, join } from "path";

import { MissingColumn, numericColumn, parseCsv, stringColumn, Table } from "./csv.js";
import { leastSquaresSlope, safeLog } from "./fit.js";
import { renderFigure, Series } from "./svg.js";

export interface FigureSpec {
  sourceCsv: string;
  xColumn: string;
  yColumn: string;
  groupColumn?: string;
  xScale: "linear" | "log";
  yScale: "linear" | "log";
  title: string;
  fitLogLogSlope?: boolean;
  markers?: { x: number; label: string }[];
  /** Draw the threshold line y = slope * x over the data's x-range. */
  thresholdLine?: { slope: number; label: string };
  outputPath: string;
}

export interface SidecarFit {
  source: string;
  x_column: string;
  y_column: string;
  slope: number | null;
  n_points: number;
}

const PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2"];

/**
 * Render one figure and its sidecar fit JSON.  Fits are computed on
 * (x, log y) pairs when fitLogLogSlope is set (x is already a log scale for
 * the discrepancy sweeps), with the same centered least-squares expression
 * the harness uses.
 */
export function render(spec: FigureSpec): SidecarFit {
  const table = parseCsv(readFileSync(spec.sourceCsv, "utf-8"));
  const xs = numericColumn(table, spec.xColumn);
  const ys = numericColumn(table, spec.yColumn);
  const series: Series[] = [];
  if (spec.groupColumn) {
    const groups = stringColumn(table, spec.groupColumn);
    const names = [...new Set(groups)].sort();
    names.forEach((name, i) => {
      const sel = groups.map((g, k) => (g === name ? k : -1)).filter((k) => k >= 0);
      series.push({
        label: name,
        x: sel.map((k) => xs[k]),
        y: sel.map((k) => ys[k]),
        color: PALETTE[i % PALETTE.length],
        line: true,
      });
    });
  } else {
    series.push({ label: spec.yColumn, x: xs, y: ys, color: PALETTE[0], line: false });
  }

  let slope: number | null = null;
  const annotations: { text: string }[] = [];
  if (spec.fitLogLogSlope && xs.length >= 2) {
    slope = fitAggregateSlope(table, spec);
    annotations.push({ text: `fitted slope: ${slope.toFixed(6)}` });
  }
  if (spec.thresholdLine && xs.length > 0) {
    const t = spec.thresholdLine;
    const gx = [Math.min(...xs), Math.max(...xs)];
    series.push({ label: t.label, x: gx, y: gx.map((x) => t.slope * x),
                  color: "#888888", line: true });
    annotations.push({ text: `threshold: ${t.label}` });
  }

  const svg = renderFigure(series, {
    title: spec.title,
    xLabel: spec.xColumn,
    yLabel: spec.yColumn,
    xScale: spec.xScale,
    yScale: spec.yScale,
    annotations,
    markers: spec.markers,
  });
  mkdirSync(dirname(spec.outputPath), { recursive: true });
  writeFileSync(spec.outputPath, svg);
  const sidecar: SidecarFit = {
    source: spec.sourceCsv,
    x_column: spec.xColumn,
    y_column: spec.yColumn,
    slope,
    n_points: xs.length,
  };
  writeFileSync(sidecarPath(spec.outputPath), JSON.stringify(sidecar, null, 2));
  return sidecar;
}

export function sidecarPath(outputPath: string): string {
  return outputPath.replace(/\.svg$/, "") + ".fit.json";
}

/**
 * The discrepancy sweep's fitted slope: the harness fits log(max over the
 * siegel tests of the discrepancy) against logT, so replicate exactly that
 * aggregation before fitting.
 */
export function fitAggregateSlope(table: Table, spec: FigureSpec): number {
  const xs = numericColumn(table, spec.xColumn);
  const ys = numericColumn(table, spec.yColumn);
  if (spec.groupColumn) {
    const groups = stringColumn(table, spec.groupColumn);
    const byX = new Map<number, number>();
    for (let i = 0; i < xs.length; i++) {
      if (!groups[i].startsWith("siegel")) {
        continue;
      }
      byX.set(xs[i], Math.max(byX.get(xs[i]) ?? -Infinity, ys[i]));
    }
    const ux = [...byX.keys()].sort((a, b) => a - b);
    return leastSquaresSlope(ux, safeLog(ux.map((x) => byX.get(x)!)));
  }
  return leastSquaresSlope(xs, safeLog(ys));
}
