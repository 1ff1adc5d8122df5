"""The acceptance matrix: one callable per criterion, reused by CLI and tests.

Each criterion function returns a CriterionResult with the boolean outcome,
the measured quantities, and its wall time.  Tolerances are pinned here.
"""

from dataclasses import dataclass
import itertools
import math
import time

import numpy as np

from . import algebra, dimension, harness, quotient
from .algebra import PRODUCT
from .rng import stream


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    seconds: float
    details: dict


def _timed(cid, name, fn) -> CriterionResult:
    t0 = time.time()
    passed, details = fn()
    return CriterionResult(cid, name, bool(passed), time.time() - t0, details)


# -- 1: algebra kernel -------------------------------------------------------

def criterion_1() -> CriterionResult:
    def run():
        gen = stream(1, "acceptance-bch")
        worst_res, worst_lo, worst_hi = 0.0, math.inf, 0.0
        for _ in range(1000):
            w1 = algebra.r_vector(PRODUCT, *gen.uniform(-0.01, 0.01, 3))
            w2 = algebra.r_vector(PRODUCT, *gen.uniform(-0.01, 0.01, 3))
            g = algebra.mul(algebra.exp_r(w1), algebra.inv(algebra.exp_r(w2)))
            h, w = algebra.bch_split(g)
            rec = algebra.mul(h, algebra.exp_r(w))
            res = max(float(np.max(np.abs(a - b)))
                      for a, b in zip(rec.factors, g.factors))
            worst_res = max(worst_res, res)
            d12 = float(np.max(np.abs(w1.r - w2.r)))
            if d12 > 0:
                ratio = w.norm() / d12
                worst_lo = min(worst_lo, ratio)
                worst_hi = max(worst_hi, ratio)
        xi_err = 0.0
        for _ in range(1000):
            r = float(gen.random())
            w = algebra.r_vector(PRODUCT, *gen.uniform(-1, 1, 3))
            ur = algebra.one_param(PRODUCT, "u", r)
            xi_err = max(xi_err, abs(algebra.xi_project(r, w)
                                     - algebra.adjoint(ur, w).r[1]))
        ok = (worst_res <= 1e-10 and worst_lo >= 2 / 3 and worst_hi <= 1.5
              and xi_err <= 1e-12)
        return ok, {"bch_residual": worst_res, "sandwich": [worst_lo, worst_hi],
                    "xi_vs_adjoint": xi_err}
    return _timed(1, "algebra kernel (BCH sandwich, xi oracle)", run)


# -- 2: sigma_d contraction --------------------------------------------------

def criterion_2() -> CriterionResult:
    def run():
        rows, summary = harness._run_sigma_contraction(
            {"d_grid": [2, 4, 6, 8, 10], "n_w": 200}, seed=2)
        ok = summary["pass_sup"] and summary["pass_e12"]
        return ok, summary
    return _timed(2, "sigma_d contraction (uniform constant, E12 exact)", run)


# -- 3: nondivergence --------------------------------------------------------

def criterion_3() -> CriterionResult:
    def run():
        rows, summary = harness._run_nondiverge(
            {"t": 14.0, "eps_grid": [0.02, 0.05, 0.1], "N": 10000,
             "x0": "identity"}, seed=3)
        ok = summary["pass"] and summary["monotone"]
        return ok, summary
    return _timed(3, "nondivergence fraction <= 20 eps", run)


# -- 4: equidistribution dichotomy -------------------------------------------

def criterion_4() -> CriterionResult:
    def run():
        _, generic = harness._run_equidistribute(
            {"x0": "generic", "N": 20000}, seed=4)
        _, orbit = harness._run_equidistribute(
            {"x0": "diagonal", "N": 20000, "delta": 0.05}, seed=4)
        ok = generic["slope_pass"] and orbit["off_orbit_pass"]
        return ok, {"generic_slope": generic["fitted_slope"],
                    "generic_aggregate": generic["aggregate_discrepancy"],
                    "orbit_min_off_discrepancy":
                        orbit["off_orbit_min_discrepancy"]}
    return _timed(4, "equidistribution dichotomy (slope / orbit obstruction)", run)


# -- 5: regularization -------------------------------------------------------

def criterion_5() -> CriterionResult:
    def run():
        rows, summary = harness._run_regularize(
            {"n_clouds": 10, "beta": 0.01, "M": 5, "k0": 1, "k1": 3}, seed=5)
        return summary["pass"], {"rows": rows}
    return _timed(5, "regularization bands / budgets on fractal clouds", run)


# -- 6: projection theorems --------------------------------------------------

def criterion_6() -> CriterionResult:
    def run():
        alpha = math.log(2) / math.log(3)
        _, lin = harness._run_project(
            {"cloud": "cantor", "n": 3 ** 7, "b0": 1.0, "R": 1,
             "alpha": alpha, "eps": 0.01, "b": 1 / 27.0, "r_count": 512}, seed=6)
        _, nonlin = harness._run_project_nonlinear(
            {"cloud": "cantor", "n": 3 ** 7, "b0": 0.005, "alpha": alpha,
             "eps": 0.01, "b1": 0.005 / 27.0, "r_count": 512}, seed=6)
        r0 = 0.4
        _, adv = harness._run_project(
            {"cloud": "adversarial", "r0": r0, "n": 512, "b0": 1.0, "R": 1,
             "alpha": alpha, "eps": 0.01, "b": 1e-3, "r_count": 512}, seed=6)
        exc = adv["exceptional_set"]
        adv_ok = (len(exc) > 0
                  and all(abs(r - r0) <= 0.05 for r in exc))
        ok = (lin["exceptional_fraction"] <= 0.1
              and nonlin["exceptional_fraction"] <= 0.1 and adv_ok)
        return ok, {"linear_exceptional": lin["exceptional_fraction"],
                    "nonlinear_exceptional": nonlin["exceptional_fraction"],
                    "adversarial_exceptional_r": exc}
    return _timed(6, "projection theorems (Cantor + planted kernel)", run)


# -- 7: Margulis machinery ---------------------------------------------------

def _brute_energy(pts, R, alpha, b0, i):
    n = len(pts)
    if n <= R:
        return b0 ** (-alpha)
    best = math.inf
    for removed in itertools.combinations(range(n), R):
        s = 0.0
        for j in range(n):
            if j == i or j in removed:
                continue
            s += float(np.max(np.abs(pts[j] - pts[i]))) ** (-alpha)
        best = min(best, s)
    return best


def criterion_7() -> CriterionResult:
    def run():
        gen = stream(7, "acceptance-energy")
        # (a) energy vs exhaustive oracle
        for trial in range(50):
            n = int(gen.integers(3, 13))
            pts = gen.uniform(-0.4, 0.4, (n, 3))
            cl = dimension.PointCloud(pts, 0.5, 4, 1, 3)
            for R in (0, 1, 3):
                i = int(gen.integers(0, n))
                a = dimension.energy(cl, R, 0.7, i)
                b = _brute_energy(pts, R, 0.7, 0.5, i)
                if abs(a - b) > 1e-9 * max(1.0, abs(b)):
                    return False, {"stage": "energy-oracle", "trial": trial}
        # (b) f/psi vs brute force on a planted 3-sheet cone
        eta, beta = 0.002, 4e-6
        y = quotient.identity_coset()
        F = dimension.PointCloud(
            np.array([[0.0, 0.0, 0.0], [0.9e-6, -0.4e-6, 0.7e-6],
                      [-1.1e-6, 0.8e-6, -0.2e-6]]), beta, 4, 1, 3)
        cone = dimension.cone_build(y, F, beta, eta)
        z = dimension.sheet_center(cone, 0)
        I = dimension.transversal_set(cone, algebra.identity(PRODUCT), z, 0.1)
        f, psi = dimension.margulis_fpsi(cone, algebra.identity(PRODUCT), z,
                                         0.1, 1, 1 / 3)
        norms = sorted(v.r_norm() for v in I if v.r_norm() > 1e-13)
        brute_f = sum(x ** (-1 / 3.0) for x in norms[1:])
        inj_hz = z.realize(cone).inj
        brute_psi = (0.1 * inj_hz) ** (-1 / 3.0) * len(I)
        if not (len(I) == 3 and abs(f - brute_f) < 1e-9 * brute_f
                and abs(psi - brute_psi) < 1e-9 * brute_psi):
            return False, {"stage": "fpsi", "I": len(I), "f": f,
                           "brute": brute_f}
        # (c) collinear dimension step: energy decrease for >= 80% of 64 r
        _, dstep = harness._run_dimension_step(
            {"r_count": 64, "steps": 3, "eta": eta}, seed=7)
        if not dstep["pass"]:
            return False, {"stage": "dimension-step", **dstep}
        # (d) contraction sweep halving until floor
        _, sweep = harness._run_margulis_sweep(
            {"d": 6.0, "ell": 4, "N": 200, "x0": "near-diagonal",
             "x0_offset": 1e-6}, seed=7)
        if not sweep["halving_until_floor"]:
            return False, {"stage": "sweep", **sweep}
        return True, {"dimension_step": dstep, "sweep_means": sweep["means"]}
    return _timed(7, "Margulis machinery (energy, f/psi, step, sweep)", run)


# -- 8: avoidance ------------------------------------------------------------

def criterion_8() -> CriterionResult:
    def run():
        _, generic = harness._run_avoid(
            {"x0": "generic", "s": 12.0, "eta": 1e-3, "thresh": 1e-3,
             "max_height": 5, "N": 4000}, seed=8)
        _, planted = harness._run_avoid(
            {"x0": "near-diagonal", "x0_offset": 1e-6, "s": 6.0, "eta": 1e-3,
             "thresh": 1e-3, "max_height": 1, "N": 4000,
             "enforce_regime": False}, seed=8)
        ok = generic["bad_fraction"] <= 0.05 and planted["bad_fraction"] >= 0.5
        return ok, {"generic_bad": generic["bad_fraction"],
                    "planted_bad": planted["bad_fraction"]}
    return _timed(8, "avoidance statistic (generic small / planted large)", run)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8]

TIME_LIMITS = {1: 5, 2: 30, 3: 120, 4: 600, 5: 60, 6: 180, 7: 300, 8: 300}


def run_all(threads: int = 1) -> list[CriterionResult]:
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda f: f(), CRITERIA))
    else:
        results = [f() for f in CRITERIA]
    return sorted(results, key=lambda r: r.cid)
