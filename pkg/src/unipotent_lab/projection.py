"""Empirical verification of the discretized projection theorems.

For a cloud Theta in B_r(0, b0) with truncated-energy certificate
eng_{Theta,R} <= U, the linear scan checks the fiber bound

    #{w' : |xi_r(w) - xi_r(w')| <= b}  <=  C_fit * U^(1+7 eps) * b^alpha

over an equispaced r-grid, flags the points violating it, and calls r
exceptional when the violating fraction passes a fixed threshold.  The
nonlinear scan does the same for the rational-chart projections zeta_r with
the ball-regularity certificate theta(B(w, b)) <= U * (b/b0)^alpha.

The theorems' absolute constants are non-effective; C_fit is calibrated once
on non-adversarial clouds and frozen here.  Acceptance asserts smallness of
the exceptional fraction, never the constant.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np

from . import algebra
from .dimension import PointCloud, energy, energy_set
from .errors import CertificateMissing
from .rng import stream

# Frozen fiber-bound constant (see module docstring).
C_FIT_LINEAR = 4.0
C_FIT_NONLINEAR = 4.0
# An r is exceptional when more than this fraction of points violate the bound.
EXC_POINT_FRACTION = 0.1
# Sample cap for the per-r projected-energy statistic.
_ENERGY_SAMPLE = 128
# Dedup resolution for sampled clouds.
MIN_SEP = 1e-13


@dataclass
class ProjectionScanReport:
    r_grid: list
    max_fiber: list          # per r: max fiber count over cloud points
    violating_fraction: list  # per r: fraction of points above the bound
    projected_energy: list   # per r: max truncated energy of the projected set
    exceptional_set: list    # r values flagged exceptional
    exceptional_fraction: float
    bound: list              # per r the numeric fiber bound used
    meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.__dict__)

    def csv_rows(self) -> list[dict]:
        rows = []
        exc = set(self.exceptional_set)
        for i, r in enumerate(self.r_grid):
            rows.append({"r": r, "max_fiber": self.max_fiber[i],
                         "violating_fraction": self.violating_fraction[i],
                         "projected_energy": self.projected_energy[i],
                         "bound": self.bound[i],
                         "exceptional": int(r in exc)})
        return rows


def multiplicity(cloud: PointCloud, b: float, q: tuple[float, float]) -> float:
    """m^b(q): uniform mass of points w' with |q_value - xi_{q_r}(w')| <= b."""
    r, value = q
    if b <= 0:
        raise ValueError("b > 0 required")
    proj = algebra.xi_values(r, cloud.points)
    return float(np.mean(np.abs(proj - value) <= b))


def _fiber_counts(proj: np.ndarray, b: float) -> np.ndarray:
    """#{j : |p_i - p_j| <= b} for every i (self included), via sorting."""
    order = np.argsort(proj)
    p = proj[order]
    hi = np.searchsorted(p, p + b, side="right")
    lo = np.searchsorted(p, p - b, side="left")
    counts = hi - lo
    out = np.empty_like(counts)
    out[order] = counts
    return out


def _scan(proj_fn, cloud: PointCloud, bound_fn, b: float, r_count: int,
          R_energy: int, alpha: float, meta: dict) -> ProjectionScanReport:
    n = len(cloud)
    rs = np.linspace(0.0, 1.0, r_count)
    max_fiber, viol, peng, bounds, exc = [], [], [], [], []
    sample = (np.arange(n) if n <= _ENERGY_SAMPLE
              else np.linspace(0, n - 1, _ENERGY_SAMPLE).astype(int))
    for r in rs:
        proj = proj_fn(float(r), cloud.points)
        counts = _fiber_counts(proj, b)
        bound = bound_fn(float(r))
        frac = float(np.mean(counts > bound))
        max_fiber.append(int(counts.max()))
        viol.append(frac)
        bounds.append(float(bound))
        pe = max(energy_set(proj[sample, None], R_energy, alpha,
                            max(proj.max() - proj.min(), b), int(k))
                 for k in range(len(sample)))
        peng.append(float(pe))
        if frac > EXC_POINT_FRACTION:
            exc.append(float(r))
    return ProjectionScanReport(
        r_grid=[float(r) for r in rs], max_fiber=max_fiber,
        violating_fraction=viol, projected_energy=peng,
        exceptional_set=exc, exceptional_fraction=len(exc) / r_count,
        bound=bounds, meta=meta)


def linear_scan(cloud: PointCloud, R: int, alpha: float, eps: float, b: float,
                r_count: int) -> ProjectionScanReport:
    """Fiber scan of the quadratic projections xi_r over an equispaced grid.

    The cloud's energy certificate U = max eng_{Theta,R} is computed
    internally; the per-point bound is max(C_fit U^(1+7 eps) b^alpha, R + 1)
    (small clouds are never exceptional: R+1 points may always be removed).
    """
    n = len(cloud)
    U = max(energy(cloud, R, alpha, i) for i in range(n))
    if not math.isfinite(U) or U > 1e280:
        raise CertificateMissing("cloud energy certificate is unbounded")
    if b < U ** (-1.0 / alpha) - 1e-15:
        raise ValueError(f"b >= U^(-1/alpha) = {U ** (-1.0 / alpha):.3g} required")
    bound_val = max(C_FIT_LINEAR * U ** (1.0 + 7.0 * eps) * b ** alpha, R + 1.0)
    R1 = R + int(math.ceil(C_FIT_LINEAR * U ** (7.0 * eps)))
    rep = _scan(algebra.xi_values, cloud, lambda r: bound_val, b, r_count,
                R1, alpha, {"kind": "linear", "Upsilon": U, "b": b,
                            "alpha": alpha, "eps": eps, "R": R, "R1": R1})
    return rep


def nonlinear_scan(cloud: PointCloud, alpha: float, eps: float, b0: float,
                   b1: float, r_count: int) -> ProjectionScanReport:
    """Fiber scan of the nonlinear projections zeta_r at scale b1.

    The ball-regularity certificate U_bar = max over dyadic b in [b1, b0] and
    points w of #(B(w,b) cap Theta)/#Theta / (b/b0)^alpha is computed
    internally; the fiber bound is #Theta * C_fit U_bar (b/b0)^(alpha-7eps).
    """
    n = len(cloud)
    if not 0 < b1 < b0:
        raise ValueError("0 < b1 < b0 required")
    Ubar = 0.0
    b = b0
    while b >= b1 * (1 - 1e-12):
        for w in cloud.points[:: max(1, n // _ENERGY_SAMPLE)]:
            cnt = np.count_nonzero(np.max(np.abs(cloud.points - w), axis=1) <= b)
            Ubar = max(Ubar, (cnt / n) / (b / b0) ** alpha)
        b /= 2.0
    if not math.isfinite(Ubar):
        raise CertificateMissing("ball-regularity certificate is unbounded")
    bound_val = max(n * C_FIT_NONLINEAR * Ubar * (b1 / b0) ** (alpha - 7 * eps),
                    2.0)
    rep = _scan(algebra.zeta_values, cloud, lambda r: bound_val, b1, r_count,
                1, alpha, {"kind": "nonlinear", "Ubar": Ubar, "b0": b0,
                           "b1": b1, "alpha": alpha, "eps": eps})
    return rep


def kernel_direction(r: float) -> np.ndarray:
    """A unit vector spanning a line inside ker xi_r (2-dim: w12 = w21 r^2 + 2 w11 r)."""
    w = np.array([1.0, 2.0 * r, 0.0])
    return w / np.max(np.abs(w))


def cantor_cloud(depth: int, b0: float, axis: int = 1) -> PointCloud:
    """Middle-thirds Cantor set along one r-coordinate axis, scaled into b0."""
    pos = np.zeros(1)
    for k in range(depth):
        pos = np.concatenate([pos, pos + 2.0 / 3.0 ** (k + 1)])
    pts = np.zeros((len(pos), 3))
    pts[:, axis] = (pos + 0.5 / 3.0 ** depth - 0.5) * 1.8 * b0
    M = 4
    k0 = max(0, int(math.floor(-math.log2(b0) / M)))
    return PointCloud(pts, b0, M, k0, k0 + 3)


def cantor_sample_cloud(n: int, b0: float, seed: int, depth: int = 24,
                        axis: int = 1) -> PointCloud:
    """n seeded samples of the middle-thirds Cantor measure along one axis.

    Sampling the measure (rather than enumerating a construction level)
    gives clouds of any cardinality with the same discretized dimension
    log2/log3 at the scales the scans probe.
    """
    gen = stream(seed, "cantor-cloud", n)
    digits = gen.integers(0, 2, size=(4 * n, depth)) * 2
    pos = (digits / 3.0 ** np.arange(1, depth + 1)).sum(axis=1)
    pos = np.unique(np.round(pos / (2 * MIN_SEP)) * (2 * MIN_SEP))[:n]
    if len(pos) < n:
        raise ValueError("not enough distinct Cantor samples")
    pts = np.zeros((n, 3))
    pts[:, axis] = (pos - 0.5) * 1.8 * b0
    M = 4
    k0 = max(0, int(math.floor(-math.log2(b0) / M)))
    return PointCloud(pts, b0, M, k0, k0 + 3)


def collinear_cloud(r0: float, n: int, b0: float) -> PointCloud:
    """n points along a kernel line of xi_{r0}, the adversarial construction."""
    d = kernel_direction(r0)
    s = (np.arange(n) + 1.0) / n * 0.9 * b0
    M = 4
    k0 = max(0, int(math.floor(-math.log2(b0) / M)))
    return PointCloud(s[:, None] * d[None, :], b0, M, k0, k0 + 3)
