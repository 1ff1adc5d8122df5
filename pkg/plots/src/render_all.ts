/**
 * render_all <run_dir>: walk a harness run directory and render the standard
 * figure for every experiment found, writing SVGs and sidecar fit JSONs next
 * to a figures/ subdirectory of the run.
 */

import { existsSync, readdirSync, readFileSync, statSync } from "fs";
import { join, relative } from "path";

import { FigureSpec, render } from "./figures.js";

interface RunDir {
  dir: string;
  experiment: string;
  summary: Record<string, unknown>;
}

export function discoverRuns(root: string): RunDir[] {
  const out: RunDir[] = [];
  const walk = (dir: string) => {
    const manifest = join(dir, "manifest.json");
    if (existsSync(manifest)) {
      const m = JSON.parse(readFileSync(manifest, "utf-8"));
      const summary = JSON.parse(readFileSync(join(dir, "summary.json"), "utf-8"));
      out.push({ dir, experiment: m.config.experiment, summary });
      return;
    }
    for (const name of readdirSync(dir)) {
      const p = join(dir, name);
      if (statSync(p).isDirectory()) {
        walk(p);
      }
    }
  };
  walk(root);
  return out.sort((a, b) => a.dir.localeCompare(b.dir));
}

export function specsFor(run: RunDir, figDir: string, root = "."): FigureSpec[] {
  const csv = join(run.dir, "results.csv");
  const rel = relative(root, run.dir) || "run";
  const base = rel.replace(/[\/\\]/g, "_").replace(/^[._]+/, "") || "run";
  const out = (name: string) => join(figDir, `${base}_${name}.svg`);
  switch (run.experiment) {
    case "equidistribute":
      return [{
        sourceCsv: csv, xColumn: "logT", yColumn: "estimate",
        groupColumn: "test", xScale: "linear", yScale: "log",
        title: "discrepancy vs log T (log-log)", fitLogLogSlope: true,
        outputPath: out("discrepancy"),
      }];
    case "nondiverge":
      return [{
        sourceCsv: csv, xColumn: "eps", yColumn: "fraction",
        xScale: "linear", yScale: "linear",
        title: "nondivergence fraction vs eps",
        thresholdLine: { slope: 20, label: "20 eps" },
        outputPath: out("nondivergence"),
      }];
    case "project":
    case "project-nonlinear": {
      const markers: { x: number; label: string }[] = [];
      const exc = run.summary["exceptional_set"] as number[] | undefined;
      if (exc && exc.length > 0) {
        markers.push({ x: exc[0], label: "first exceptional r" });
      }
      return [{
        sourceCsv: csv, xColumn: "r", yColumn: "violating_fraction",
        xScale: "linear", yScale: "linear",
        title: `${run.experiment}: violating fraction vs r`,
        markers, outputPath: out("exceptional"),
      }];
    }
    case "margulis-sweep":
      return [{
        sourceCsv: csv, xColumn: "step", yColumn: "mean_f",
        xScale: "linear", yScale: "log",
        title: "Margulis-sweep decay of E[f_Y]",
        outputPath: out("margulis_decay"),
      }];
    default:
      return [];
  }
}

export function renderAll(root: string): { figures: number; sidecars: string[] } {
  const runs = discoverRuns(root);
  const figDir = join(root, "figures");
  const sidecars: string[] = [];
  let figures = 0;
  for (const run of runs) {
    for (const spec of specsFor(run, figDir, root)) {
      const fit = render(spec);
      sidecars.push(spec.outputPath);
      figures += 1;
      const slopeText = fit.slope === null ? "" : ` slope=${fit.slope}`;
      console.log(`rendered ${spec.outputPath}${slopeText}`);
    }
  }
  return { figures, sidecars };
}

const invokedDirectly = process.argv[1]?.endsWith("render_all.js")
  || process.argv[1]?.endsWith("render_all.ts");
if (invokedDirectly) {
  const root = process.argv[2];
  if (!root) {
    console.error("usage: render_all <run_dir>");
    process.exit(2);
  }
  const { figures } = renderAll(root);
  console.log(`${figures} figure(s) written under ${join(root, "figures")}`);
  process.exit(0);
}
