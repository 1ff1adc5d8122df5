"""Averaging operator sigma_d, its contraction, and Margulis functions f_Y.

sigma_d averages over h = a_d u_r with r uniform on [-1, 2]; the interval is
chosen so that averages over it can be converted into averages over [0, 1]
at the cost of a factor 3.  The key contraction is

    int ||Ad(h) w||^{-1/3} d sigma_d(h)  <=  C' e^{-d/3} ||w||^{-1/3},

driven by the fact that the quadratic r -> xi_r(w) spends measure <= C eps^(1/2)
at height eps (which is why the exponent 1/3 < 1/2 works).
"""

from dataclasses import dataclass
import math

import numpy as np

from . import algebra, quotient
from .algebra import LieVector
from .errors import QuadratureFailure
from .quotient import CosetPoint, PeriodicOrbit
from .rng import jittered_grid, stream

ALPHA_PERIODIC = 1.0 / 3.0


def ad_norm_values(d: float, w: LieVector, rs: np.ndarray) -> np.ndarray:
    """max-norm of Ad(a_d u_r) w on the transversal part, vectorized in r."""
    x, y, z = w.r  # (w11, w12, w21)
    xi = -z * rs * rs - 2.0 * x * rs + y
    return np.maximum.reduce([np.abs(x + z * rs),
                              math.exp(d) * np.abs(xi),
                              np.full_like(rs, math.exp(-d) * abs(z))])


@dataclass(frozen=True)
class SigmaAverageResult:
    d: float
    w: LieVector
    value: float
    quad_error: float


def _quad_cells(x: float, y: float, z: float) -> list[tuple[float, float]]:
    """Partition [-1, 2] at the real roots of -z r^2 - 2x r + y, with geometric
    refinement toward each root (the integrand has sqrt-width valleys there)."""
    # roots of z r^2 + 2x r - y = 0 (the zero set of xi_r):
    roots = []
    if abs(z) > 1e-14:
        disc = x * x + z * y
        if disc >= 0:
            s = math.sqrt(disc)
            roots.extend([(-x + s) / z, (-x - s) / z])
    elif abs(x) > 1e-14:
        roots.append(y / (2.0 * x))
    pts = sorted({-1.0, 2.0, *[r for r in roots if -1.0 < r < 2.0]})
    cells = []
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 0:
            continue
        is_root_a = any(abs(a - r) < 1e-13 for r in roots)
        is_root_b = any(abs(b - r) < 1e-13 for r in roots)
        cells.extend(_refine(a, b, is_root_a, is_root_b))
    return cells


def _refine(a: float, b: float, at_a: bool, at_b: bool, levels: int = 44) -> list:
    if not (at_a or at_b):
        return [(a, b)]
    out = []
    if at_a and at_b:
        mid = (a + b) / 2.0
        return _refine(a, mid, True, False, levels) + _refine(mid, b, False, True, levels)
    h = b - a
    # Geometric bands 2^-k toward the singular endpoint.
    cuts = [h * 2.0 ** (-k) for k in range(1, levels)]
    if at_a:
        edges = [a] + [a + c for c in reversed(cuts)] + [b]
    else:
        edges = [a] + [b - c for c in cuts] + [b]
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            out.append((lo, hi))
    return out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _integrate(fn, cells: list, points_per_cell: int) -> float:
    reps = max(1, points_per_cell // 8)
    a = np.array([c[0] for c in cells])
    b = np.array([c[1] for c in cells])
    j = np.arange(reps)
    lo = (a[:, None] + (b - a)[:, None] * j / reps).ravel()
    hi = (a[:, None] + (b - a)[:, None] * (j + 1) / reps).ravel()
    mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = fn(nodes.ravel()).reshape(-1, 8)
    return float(np.sum(half * (vals @ _GL_WEIGHTS)))


def sigma_contraction(w: LieVector, d: float, quad_n: int = 256) -> SigmaAverageResult:
    """(1/3) int_{-1}^{2} ||Ad(a_d u_r) w||^{-1/3} dr with a Richardson error bound.

    Raises QuadratureFailure if the doubled-resolution estimate differs by
    more than 1e-5 (relative to the value).
    """
    if w.r_norm() <= 0.0:
        raise ValueError("w must be a nonzero transversal vector")
    if quad_n < 64:
        raise ValueError("quad_n >= 64 required")
    x, y, z = w.r

    def fn(rs):
        return ad_norm_values(d, w, rs) ** (-ALPHA_PERIODIC)

    cells = _quad_cells(x, y, z)
    n = quad_n
    while True:
        coarse = _integrate(fn, cells, n) / 3.0
        fine = _integrate(fn, cells, 2 * n) / 3.0
        err = abs(fine - coarse)
        if err <= 1e-5 * max(1.0, abs(fine)):
            return SigmaAverageResult(d, w, fine, err)
        if n >= 16 * quad_n:
            raise QuadratureFailure(f"Richardson error {err:.2e} above budget")
        n *= 2


def f_Y_eval(x: CosetPoint, Y: PeriodicOrbit, search_norm: float = 8.0) -> float:
    """f_Y(x) = sum over I_Y(x) of ||w||^{-1/3}, or inj(x)^{-1/3} if empty."""
    returns = quotient.transversal_returns(x, Y, search_norm)
    if not returns:
        return x.inj ** (-ALPHA_PERIODIC)
    return float(sum(v.r_norm() ** (-ALPHA_PERIODIC) for v in returns))


def contraction_sweep(x: CosetPoint, Y: PeriodicOrbit, d: float, ell: int,
                      N: int, seed: int, search_norm: float = 8.0) -> list[dict]:
    """Monte Carlo E[f_Y(h_l ... h_1 x)] under sigma_d^(l) for l = 1..ell."""
    if d < 4:
        raise ValueError("d >= 4 required")
    if ell > 8:
        raise ValueError("ell <= 8 required")
    points = [x] * N
    out = []
    for step in range(1, ell + 1):
        new_points = []
        vals = []
        for i, p in enumerate(points):
            r = float(stream(seed, "sweep", step, i).uniform(-1.0, 2.0))
            q = quotient.from_group(
                algebra.mul(algebra.mul(algebra.one_param(p.model, "a", d),
                                        algebra.one_param(p.model, "u", r)), p.rep))
            new_points.append(q)
            vals.append(f_Y_eval(q, Y, search_norm))
        points = new_points
        vals = np.array(vals)
        out.append({"step": step,
                    "mean_f": float(vals.mean()),
                    "std_error": float(vals.std(ddof=1) / math.sqrt(N))})
    return out


DEFAULT_B_BAR = 0.5


def averaged_return(x: CosetPoint, Y: PeriodicOrbit, logT: float, N: int,
                    seed: int, b_bar: float = DEFAULT_B_BAR,
                    search_norm: float = 8.0) -> dict:
    """Stratified estimate of int_0^1 f_Y(a_{d(T)} u_r x) dr, d(T) = logT - b_bar."""
    if logT < 8:
        raise ValueError("logT >= 8 required")
    dT = logT - b_bar
    rs = jittered_grid(N, seed, "avg-return", logT)
    vals = np.array([f_Y_eval(
        quotient.from_group(algebra.mul(algebra.mul(
            algebra.one_param(x.model, "a", dT),
            algebra.one_param(x.model, "u", float(r))), x.rep)), Y, search_norm)
        for r in rs])
    return {"estimate": float(vals.mean()),
            "std_error": float(vals.std(ddof=1) / math.sqrt(N)),
            "d_of_T": dT}
