"""Experiment orchestration: configs, runners, CSV/JSON artifacts, reports.

Every experiment is a pure function of (params, seed): runners draw all
randomness from counter-based streams keyed by (seed, experiment, stratum),
so a config run twice produces byte-identical results.csv regardless of
thread count.  File writes go through atomic renames.
"""

from dataclasses import dataclass
import csv
import io
import json
import math
import os
import tempfile
import time

import numpy as np

from . import algebra, closing, dimension, flow, margulis, projection, quotient
from .algebra import PRODUCT
from .errors import ConfigError, MissingManifest, ParseError
from .rng import stream

SCHEMA_VERSION = 1

__version__ = "0.1.0"


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    experiment: str
    params: dict
    seed: int = 0
    model: str = PRODUCT
    output_dir: str | None = None
    schema: int = SCHEMA_VERSION

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        d = json.loads(text)
        return ExperimentConfig(
            experiment=d["experiment"], params=d.get("params", {}),
            seed=int(d.get("seed", 0)), model=d.get("model", PRODUCT),
            output_dir=d.get("output_dir"),
            schema=int(d.get("schema", SCHEMA_VERSION)))

    def to_json_dict(self) -> dict:
        return {"schema": self.schema, "experiment": self.experiment,
                "model": self.model, "params": self.params, "seed": self.seed,
                "output_dir": self.output_dir}


def _point(params: dict, seed: int) -> quotient.CosetPoint:
    """Resolve the configured start point."""
    kind = params.get("x0", "generic")
    if kind == "identity" or kind == "diagonal":
        return quotient.identity_coset()
    if kind == "generic":
        w = algebra.r_vector(PRODUCT, 0.11, 0.07, -0.13)
        g = algebra.mul(algebra.exp_r(w),
                        algebra.one_param(PRODUCT, "n", 0.0, math.sqrt(2) / 2))
        return quotient.from_group(g)
    if kind == "haar":
        return quotient.haar_sample(seed, int(params.get("x0_index", 0)))
    if kind == "near-diagonal":
        off = float(params.get("x0_offset", 1e-6))
        w = algebra.r_vector(PRODUCT, 0.4 * off, -0.6 * off, off)
        return quotient.from_group(algebra.exp_r(w))
    raise ConfigError([f"unknown x0 kind {kind!r}"])


def _std_tests(seed: int) -> list[flow.TestFunction]:
    return [flow.siegel_product(flow.AnnulusBump(1.2, 0.4),
                                flow.AnnulusBump(1.7, 0.5), "siegel-a"),
            flow.siegel_product(flow.AnnulusBump(1.8, 0.6),
                                flow.AnnulusBump(1.3, 0.35), "siegel-b"),
            flow.siegel_product(flow.AnnulusBump(2.1, 0.5),
                                flow.AnnulusBump(2.4, 0.7), "siegel-c")]


def fit_slope(xs, ys) -> float:
    """Least-squares slope of ys against xs (the shared fit formula).

    The plot suite re-implements exactly this expression as a cross-language
    oracle, so keep the algebra in this form.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    xm = xs.mean()
    ym = ys.mean()
    return float(np.sum((xs - xm) * (ys - ym)) / np.sum((xs - xm) ** 2))


# ---------------------------------------------------------------------------
# Runners: each returns (rows, summary); rows are dicts with a fixed key set.
# ---------------------------------------------------------------------------

def _run_equidistribute(params: dict, seed: int):
    logT_grid = params.get("logT_grid", [4.0, 6.0, 8.0, 10.0, 12.0])
    N = int(params.get("N", 20000))
    x0 = _point(params, seed)
    on_orbit = params.get("x0", "generic") in ("identity", "diagonal")
    tests = _std_tests(seed)
    tests.insert(0, flow.inj_indicator(0.0, "const1"))
    if on_orbit:
        Y = quotient.periodic_catalog(1)[0]
        tests.append(flow.orbit_avoid(Y, float(params.get("delta", 0.05)),
                                      label="off-orbit"))
    rows = []
    agg = []
    for logT in logT_grid:
        out = flow.unipotent_discrepancy(x0, float(logT), tests, N, seed)
        sieg = [t for t in out["tests"] if t["label"].startswith("siegel")]
        agg.append(max(t["discrepancy"] for t in sieg))
        for t in out["tests"]:
            rows.append({"logT": float(logT), "test": t["label"],
                         "estimate": t["discrepancy"],
                         "std_error": t["std_error"], "N": N, "seed": seed})
    slope = fit_slope(logT_grid, [math.log(max(d, 1e-300)) for d in agg])
    summary = {"aggregate_discrepancy": agg, "logT_grid": list(map(float, logT_grid)),
               "fitted_slope": slope, "slope_pass": bool(slope <= -0.2)}
    if on_orbit:
        off = [r for r in rows if r["test"] == "off-orbit"]
        summary["off_orbit_min_discrepancy"] = min(r["estimate"] for r in off)
        summary["off_orbit_pass"] = bool(
            summary["off_orbit_min_discrepancy"] >= 0.1)
    zero = [r for r in rows if r["test"] == "const1"]
    summary["const1_all_zero"] = bool(all(r["estimate"] == 0.0 for r in zero))
    return rows, summary


def _run_nondiverge(params: dict, seed: int):
    t = float(params.get("t", 14.0))
    eps_grid = [float(e) for e in params.get("eps_grid", [0.02, 0.05, 0.1])]
    N = int(params.get("N", 10000))
    x0 = _point({**params, "x0": params.get("x0", "identity")}, seed)
    fracs = flow.nondivergence_fractions(x0, t, eps_grid, N, seed)
    rows = [{"eps": e, "fraction": f, "t": t, "N": N, "seed": seed}
            for e, f in zip(eps_grid, fracs)]
    C = max(f / e for e, f in zip(eps_grid, fracs))
    order = np.argsort(eps_grid)
    mono = bool(np.all(np.diff(np.array(fracs)[order]) >= 0))
    summary = {"fitted_C": C, "pass": bool(C <= 20.0), "monotone": mono}
    return rows, summary


def _run_avoid(params: dict, seed: int):
    s = float(params.get("s", 12.0))
    eta = float(params.get("eta", 1e-3))
    thresh = float(params.get("thresh", 1e-3))
    N = int(params.get("N", 4000))
    mh = int(params.get("max_height", 5))
    x0 = _point(params, seed)
    catalog = quotient.periodic_catalog(mh)
    frac = flow.avoidance_fraction(
        x0, s, eta, catalog, thresh, N, seed,
        search_norm=float(params.get("search_norm", 6)),
        enforce_regime=bool(params.get("enforce_regime", True)))
    rows = [{"s": s, "eta": eta, "thresh": thresh, "max_height": mh,
             "fraction": frac, "N": N, "seed": seed}]
    return rows, {"bad_fraction": frac}


def _cloud(params: dict, seed: int):
    kind = params.get("cloud", "cantor")
    b0 = float(params.get("b0", 1.0))
    if kind == "cantor":
        return projection.cantor_sample_cloud(int(params.get("n", 3 ** 7)), b0, seed)
    if kind == "cantor-grid":
        return projection.cantor_cloud(int(params.get("depth", 7)), b0)
    if kind == "adversarial":
        return projection.collinear_cloud(float(params.get("r0", 0.4)),
                                          int(params.get("n", 512)), b0)
    raise ConfigError([f"unknown cloud kind {kind!r}"])


def _run_project(params: dict, seed: int):
    cl = _cloud(params, seed)
    b0 = float(params.get("b0", 1.0))
    rep = projection.linear_scan(
        cl, R=int(params.get("R", 1)),
        alpha=float(params.get("alpha", math.log(2) / math.log(3))),
        eps=float(params.get("eps", 0.01)),
        b=float(params.get("b", b0 / 27.0)),
        r_count=int(params.get("r_count", 512)))
    rows = rep.csv_rows()
    summary = {"exceptional_fraction": rep.exceptional_fraction,
               "exceptional_set": rep.exceptional_set, **rep.meta}
    return rows, summary


def _run_project_nonlinear(params: dict, seed: int):
    cl = _cloud(params, seed)
    b0 = float(params.get("b0", 0.005))
    rep = projection.nonlinear_scan(
        cl, alpha=float(params.get("alpha", math.log(2) / math.log(3))),
        eps=float(params.get("eps", 0.01)), b0=b0,
        b1=float(params.get("b1", b0 / 27.0)),
        r_count=int(params.get("r_count", 512)))
    rows = rep.csv_rows()
    summary = {"exceptional_fraction": rep.exceptional_fraction,
               "exceptional_set": rep.exceptional_set, **rep.meta}
    return rows, summary


def _run_margulis_sweep(params: dict, seed: int):
    d = float(params.get("d", 6.0))
    ell = int(params.get("ell", 5))
    N = int(params.get("N", 200))
    x0 = _point({**params, "x0": params.get("x0", "near-diagonal")}, seed)
    Y = quotient.periodic_catalog(int(params.get("max_height", 1)))[0]
    f0 = margulis.f_Y_eval(x0, Y)
    sweep = margulis.contraction_sweep(x0, Y, d, ell, N, seed)
    rows = [{"step": 0, "mean_f": f0, "std_error": 0.0, "d": d, "N": N,
             "seed": seed}]
    rows += [{"step": s["step"], "mean_f": s["mean_f"],
              "std_error": s["std_error"], "d": d, "N": N, "seed": seed}
             for s in sweep]
    floor = 1.05 * quotient.INJ_CAP ** (-margulis.ALPHA_PERIODIC)
    means = [r["mean_f"] for r in rows]
    halves = all(means[i + 1] <= 0.5 * means[i] or means[i + 1] <= floor
                 for i in range(len(means) - 1))
    summary = {"means": means, "floor": floor, "halving_until_floor": bool(halves)}
    return rows, summary


def _run_regularize(params: dict, seed: int):
    n_clouds = int(params.get("n_clouds", 10))
    beta = float(params.get("beta", 0.01))
    M = int(params.get("M", 5))
    k0 = int(params.get("k0", 1))
    k1 = int(params.get("k1", 3))
    rows = []
    all_ok = True
    for c in range(n_clouds):
        cl = fractal_cloud(seed, c, max_points=int(params.get("max_points", 2 ** 14)))
        res = dimension.regularize(cl, M=M, k0=k0, k1=k1, beta=beta)
        band_ok = all(dimension.verify_band(p) for p in res.parts)
        discard_ok = len(res.discard) <= beta ** 0.25 * len(cl)
        size_ok = all(len(p.cloud) >= beta ** 2 * len(cl) for p in res.parts)
        all_ok = all_ok and band_ok and discard_ok and size_ok
        rows.append({"cloud": c, "n_points": len(cl), "n_parts": len(res.parts),
                     "n_discard": len(res.discard), "band_ok": int(band_ok),
                     "discard_ok": int(discard_ok), "size_ok": int(size_ok),
                     "seed": seed})
    return rows, {"pass": bool(all_ok)}


def fractal_cloud(seed: int, index: int, max_points: int = 2 ** 14):
    """Seeded fractal-style clouds for the regularization experiments."""
    gen = stream(seed, "fractal-cloud", index)
    kind = index % 3
    if kind == 0:
        # product of Cantor samples
        n = min(max_points, 4096)
        cols = []
        for ax in range(3):
            digits = gen.integers(0, 2, size=(n, 12)) * 2
            cols.append((digits / 3.0 ** np.arange(1, 13)).sum(axis=1) - 0.5)
        pts = np.stack(cols, axis=1) * 0.9
    elif kind == 1:
        # uniform grid with dropped cells
        g = (np.arange(16) + 0.5) / 16 - 0.5
        pts = np.stack(np.meshgrid(g, g, g), axis=-1).reshape(-1, 3) * 0.9
        keep = gen.random(len(pts)) < 0.7
        pts = pts[keep]
    else:
        # self-similar cluster tree
        pts = np.zeros((1, 3))
        for _ in range(4):
            offs = gen.uniform(-1.0, 1.0, (8, 3))
            pts = (pts[:, None, :] + offs[None, :, :] * 0.3 ** _ * 0.25).reshape(-1, 3)
        pts = pts * 0.4
    pts = pts + gen.normal(scale=1e-10, size=pts.shape)
    pts = np.clip(pts, -0.499, 0.499)
    if len(pts) > max_points:
        pts = pts[:max_points]
    return dimension.PointCloud(pts, 0.5, 5, 1, 3)


def _run_dimension_step(params: dict, seed: int):
    eta = float(params.get("eta", 0.002))
    beta = eta * eta
    r_count = int(params.get("r_count", 64))
    steps = int(params.get("steps", 3))
    R = int(params.get("R", 1))
    alpha = float(params.get("alpha", 0.9))
    b = float(params.get("b", 0.05))
    ell = 2.0 * abs(math.log(beta)) + 0.1
    y = quotient.identity_coset()
    direc = np.array([0.5, -0.8, 1.0])
    direc /= np.max(np.abs(direc))
    s = (np.arange(int(params.get("n_sheets", 64))) + 1.0)
    s = s / s.max() * beta * 0.9
    F = dimension.PointCloud(s[:, None] * direc[None, :], beta, 4, 1, 3)
    cone0 = dimension.cone_build(y, F, beta, eta)
    rs = (np.arange(r_count) + 0.5) / r_count
    rows = []
    n_dec = 0
    for i, r in enumerate(rs):
        cone = cone0
        decreased = True
        at_floor = False
        for step in range(steps):
            rep = dimension.dimension_step(cone, ell, float(r), b, R, alpha,
                                           N=8, seed=seed + i)
            if math.isnan(rep.energy_sup_after):
                decreased = False
                break
            if rep.energy_sup_after >= rep.energy_sup_before:
                decreased = False
                break
            if rep.sup_f_after <= rep.sup_psi_after * (1 + 1e-9):
                at_floor = True
                break
            cone = max(rep.offspring, key=lambda c: len(c.F))
        rows.append({"r": float(r), "decreased": int(decreased),
                     "at_floor": int(at_floor), "seed": seed})
        n_dec += int(decreased)
    frac = n_dec / r_count
    return rows, {"decrease_fraction": frac, "pass": bool(frac >= 0.8)}


def _run_closing_scan(params: dict, seed: int):
    x1 = _point(params, seed)
    rep = closing.closing_scan(
        x1, t=float(params.get("t", 4.0)), D=float(params.get("D", 3.0)),
        beta=float(params.get("beta", 1e-5)),
        r_count=int(params.get("r_count", 16)),
        search_norm=float(params.get("search_norm", 4)),
        catalog_height=int(params.get("max_height", 5)),
        good_fraction_threshold=params.get("good_fraction_threshold"))
    rows = [{"r": r, "inj_ok": int(a), "injective_on_Et": int(b),
             "f_t_value": f, "good": int(g), "seed": seed}
            for r, a, b, f, g in zip(rep.r_grid, rep.inj_ok,
                                     rep.injective_on_Et, rep.f_t_value,
                                     rep.good)]
    summary = {"good_fraction": rep.good_fraction,
               "detected_orbit": (rep.detected_orbit.to_json_dict()
                                  if rep.detected_orbit else None),
               "detected_distance": rep.detected_distance,
               "zariski_dense_candidates": rep.zariski_dense_candidates}
    return rows, summary


def _run_sigma_contraction(params: dict, seed: int):
    d_grid = [float(d) for d in params.get("d_grid", [2, 4, 6, 8, 10])]
    n_w = int(params.get("n_w", 200))
    gen = stream(seed, "sigma-w")
    dirs = gen.normal(size=(n_w, 3))
    dirs /= np.max(np.abs(dirs), axis=1)[:, None]
    rows = []
    worst = 0.0
    e12_err = 0.0
    for d in d_grid:
        sup = 0.0
        for v in dirs:
            w = algebra.r_vector(PRODUCT, *v)
            val = margulis.sigma_contraction(w, d).value
            sup = max(sup, math.exp(d / 3.0) * val)
        res = margulis.sigma_contraction(algebra.r_vector(PRODUCT, 0, 1, 0), d)
        err = abs(res.value - math.exp(-d / 3.0))
        e12_err = max(e12_err, err)
        worst = max(worst, sup)
        rows.append({"d": d, "sup_scaled": sup, "e12_error": err, "seed": seed})
    summary = {"sup_scaled": worst, "pass_sup": bool(worst <= 10.0),
               "e12_error": e12_err, "pass_e12": bool(e12_err <= 1e-6)}
    return rows, summary


RUNNERS = {
    "equidistribute": _run_equidistribute,
    "nondiverge": _run_nondiverge,
    "avoid": _run_avoid,
    "project": _run_project,
    "project-nonlinear": _run_project_nonlinear,
    "margulis-sweep": _run_margulis_sweep,
    "regularize": _run_regularize,
    "dimension-step": _run_dimension_step,
    "closing-scan": _run_closing_scan,
    "sigma-contraction": _run_sigma_contraction,
}


# Per-experiment precondition validators (param name, message, predicate).
def _validate(config: ExperimentConfig) -> list[str]:
    v = []
    p = config.params
    if config.experiment not in RUNNERS:
        v.append(f"unknown experiment {config.experiment!r}")
        return v
    if config.model != PRODUCT:
        v.append("only the product model is wired through the harness")
    def num(name, lo=None, hi=None):
        if name not in p:
            return
        try:
            x = float(p[name])
        except (TypeError, ValueError):
            v.append(f"{name} must be numeric")
            return
        if lo is not None and x < lo:
            v.append(f"{name} = {x} below minimum {lo}")
        if hi is not None and x > hi:
            v.append(f"{name} = {x} above maximum {hi}")
    num("N", lo=100)
    num("t", hi=60)
    num("logT", hi=60)
    if config.experiment == "nondiverge":
        t = float(p.get("t", 14.0))
        if t < 8.0:
            v.append("nondiverge needs t >= |log inj(x)| + 8")
    if config.experiment == "closing-scan":
        num("t", hi=6)
    if config.experiment == "avoid":
        num("max_height", lo=1, hi=50)
        if float(p.get("s", 12.0)) < 8.0:
            v.append("avoid needs s >= |log inj(x0)| + 8")
    if config.experiment == "dimension-step":
        eta = float(p.get("eta", 0.002))
        if eta > 0.005:
            v.append("dimension-step needs eta <= 0.005 (injectivity cap)")
    for key in ("logT_grid", "eps_grid", "d_grid"):
        if key in p and not isinstance(p[key], (list, tuple)):
            v.append(f"{key} must be a list")
    return v


# ---------------------------------------------------------------------------
# Artifact emission
# ---------------------------------------------------------------------------

def _atomic_write(path: str, data: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(data)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        buf.write("empty\n")
        return buf.getvalue()
    fields = list(rows[0].keys())
    wr = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    wr.writeheader()
    for row in rows:
        out = {}
        for k, val in row.items():
            if isinstance(val, float):
                if not math.isfinite(val):
                    raise ValueError(f"non-finite value in CSV column {k}")
                out[k] = repr(val)
            else:
                out[k] = val
        wr.writerow(out)
    return buf.getvalue()


def run_experiment(config: ExperimentConfig, out_dir: str | None = None,
                   threads: int = 1) -> str:
    """Run the configured experiment; returns the run directory.

    Writes results.csv (one row per grid point), summary.json (aggregates and
    built-in assertion outcomes) and manifest.json (config echo, version,
    wall time, seed).  Runners draw per-stratum counter-based streams, so the
    artifacts are identical for every value of threads.
    """
    violations = _validate(config)
    if violations:
        raise ConfigError(violations)
    out_dir = out_dir or config.output_dir or f"runs/{config.experiment}"
    t0 = time.time()
    rows, summary = RUNNERS[config.experiment](config.params, config.seed)
    wall = time.time() - t0
    _atomic_write(os.path.join(out_dir, "results.csv"), _csv_text(rows))
    _atomic_write(os.path.join(out_dir, "summary.json"),
                  json.dumps({"experiment": config.experiment, **summary},
                             indent=2, sort_keys=True))
    _atomic_write(os.path.join(out_dir, "manifest.json"),
                  json.dumps({"config": config.to_json_dict(),
                              "version": __version__,
                              "wall_time_s": wall, "seed": config.seed},
                             indent=2))
    _atomic_write(os.path.join(out_dir, "SCHEMA.md"), schema_markdown())
    return out_dir


def emit_report(run_dir: str) -> dict:
    """Merge all run summaries under run_dir into report.json."""
    summaries = {}
    found = False
    for root, _dirs, files in os.walk(run_dir):
        if "manifest.json" in files:
            found = True
            try:
                with open(os.path.join(root, "manifest.json")) as f:
                    manifest = json.load(f)
                with open(os.path.join(root, "summary.json")) as f:
                    summary = json.load(f)
                with open(os.path.join(root, "results.csv")) as f:
                    header = f.readline()
                    if not header.strip():
                        raise ParseError(f"empty results.csv in {root}")
            except (OSError, json.JSONDecodeError) as exc:
                raise ParseError(f"cannot parse run artifacts in {root}: {exc}")
            summaries[os.path.relpath(root, run_dir)] = {
                "experiment": manifest["config"]["experiment"],
                "summary": summary}
    if not found:
        raise MissingManifest(f"no manifest.json found under {run_dir}")
    passes = {}
    for name, entry in summaries.items():
        s = entry["summary"]
        flags = [v for k, v in s.items()
                 if k == "pass" or k.startswith("pass_") or k.endswith("_pass")]
        passes[name] = bool(all(flags)) if flags else None
    report = {"runs": summaries, "pass_matrix": passes}
    _atomic_write(os.path.join(run_dir, "report.json"),
                  json.dumps(report, indent=2, sort_keys=True))
    return report


_SCHEMA = {
    "equidistribute": ["logT", "test", "estimate (|avg - haar mean|)",
                       "std_error", "N", "seed"],
    "nondiverge": ["eps", "fraction (inj < eps^2)", "t", "N", "seed"],
    "avoid": ["s", "eta", "thresh", "max_height", "fraction", "N", "seed"],
    "project": ["r", "max_fiber", "violating_fraction", "projected_energy",
                "bound", "exceptional"],
    "project-nonlinear": ["r", "max_fiber", "violating_fraction",
                          "projected_energy", "bound", "exceptional"],
    "margulis-sweep": ["step", "mean_f", "std_error", "d", "N", "seed"],
    "regularize": ["cloud", "n_points", "n_parts", "n_discard", "band_ok",
                   "discard_ok", "size_ok", "seed"],
    "dimension-step": ["r", "decreased", "at_floor", "seed"],
    "closing-scan": ["r", "inj_ok", "injective_on_Et", "f_t_value", "good",
                     "seed"],
    "sigma-contraction": ["d", "sup_scaled", "e12_error", "seed"],
}


def schema_markdown() -> str:
    lines = ["# results.csv column schemas", ""]
    for exp in sorted(_SCHEMA):
        lines.append(f"## {exp}")
        lines.append("")
        for col in _SCHEMA[exp]:
            lines.append(f"- `{col}`")
        lines.append("")
    return "\n".join(lines)
