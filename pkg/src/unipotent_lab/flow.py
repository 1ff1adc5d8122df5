"""Orbit translation, equidistribution estimators and nondivergence statistics.

Estimators use stratified sampling (midpoint rule plus jitter) with
counter-based streams, so a fixed (seed, N) gives the same output regardless
of evaluation order.  Reported standard errors are the sample-std / sqrt(N)
of the stratified values, a conservative bound for smooth integrands.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from . import algebra, quotient
from .algebra import PRODUCT
from .errors import OverflowGuard, RegimeViolation
from .quotient import CosetPoint, PeriodicOrbit
from .rng import jittered_grid, stream

T_GUARD = 60.0


def translate(x: CosetPoint, t: float, r: float) -> CosetPoint:
    """reduce(a_t u_r rep(x)) with a refreshed injectivity cache."""
    if abs(t) > T_GUARD:
        raise OverflowGuard(f"|t| = {abs(t)} exceeds the overflow guard {T_GUARD}")
    g = algebra.mul(algebra.mul(algebra.one_param(x.model, "a", t),
                                algebra.one_param(x.model, "u", r)), x.rep)
    return quotient.from_group(g)


def translate_n(x: CosetPoint, r: float, s: float, t: float = 0.0) -> CosetPoint:
    """reduce(a_t n(r, s) rep(x)), the horospherical translate."""
    if abs(t) > T_GUARD:
        raise OverflowGuard(f"|t| = {abs(t)} exceeds the overflow guard {T_GUARD}")
    g = algebra.mul(algebra.one_param(x.model, "n", r, s), x.rep)
    if t != 0.0:
        g = algebra.mul(algebra.one_param(x.model, "a", t), g)
    return quotient.from_group(g)


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnnulusBump:
    """Radial bump (1 - u^2)^2, u = (|v| - c)/w, supported on c-w <= |v| <= c+w."""

    center_radius: float
    half_width: float

    def __post_init__(self):
        if not 0 < self.half_width < self.center_radius:
            raise ValueError("need 0 < half_width < center_radius")

    def __call__(self, norms: np.ndarray) -> np.ndarray:
        u = (np.asarray(norms) - self.center_radius) / self.half_width
        b = np.maximum(1.0 - u * u, 0.0)
        return b * b

    @property
    def lebesgue_integral(self) -> float:
        # 2 pi int f(rho) rho d rho, exact for the quartic bump.
        return 2.0 * math.pi * (16.0 / 15.0) * self.center_radius * self.half_width

    @property
    def sup(self) -> float:
        return 1.0


_HAAR_MC_N = 4000
_HAAR_MC_SEED = 20240101


@dataclass(frozen=True)
class TestFunction:
    """A bounded test function on X with a stored Haar mean.

    kinds:
      siegel_product  phi(x) = F_{f1}(L1) F_{f2}(L2), Siegel transforms of
                      annulus bumps per factor; the Haar mean is the exact
                      product of Lebesgue integrals.
      inj_indicator   phi(x) = 1{inj(x) >= eta}; eta = 0 degenerates to the
                      constant function 1 with exact mean 1.
      smooth_bump     phi(x) = bump(d_X(x, center)/radius).
      orbit_avoid     phi(x) = ramp(dist_to_orbit(x, Y)/delta), 0 near the
                      orbit and 1 beyond twice delta; the off-orbit test of
                      the equidistribution dichotomy.
    """

    kind: str
    haar_mean: float
    haar_mean_se: float
    sup: float
    label: str
    f1: AnnulusBump | None = None
    f2: AnnulusBump | None = None
    eta: float = 0.0
    center: CosetPoint | None = None
    radius: float = 0.0
    orbit: PeriodicOrbit | None = None
    delta: float = 0.0
    search_norm: float = 6.0

    def __call__(self, x: CosetPoint) -> float:
        if self.kind == "siegel_product":
            val = 1.0
            for f, bump in zip(x.rep.factors, (self.f1, self.f2)):
                pts = quotient.lattice_points_in_ball(
                    np.asarray(f, float), bump.center_radius + bump.half_width)
                if len(pts) == 0:
                    return 0.0
                val *= float(np.sum(bump(np.linalg.norm(pts, axis=1))))
            return val
        if self.kind == "inj_indicator":
            return 1.0 if x.inj >= self.eta else 0.0
        if self.kind == "smooth_bump":
            d = quotient.point_distance(x, self.center, self.search_norm)
            u = d / self.radius
            if u >= 1.0:
                return 0.0
            return (1.0 - u * u) ** 2
        if self.kind == "orbit_avoid":
            d = quotient.dist_to_orbit(x, self.orbit, self.search_norm)
            return float(np.clip(d / self.delta - 1.0, 0.0, 1.0))
        raise ValueError(f"unknown test function kind {self.kind!r}")


def _mc_haar_mean(fn, n: int = _HAAR_MC_N, seed: int = _HAAR_MC_SEED) -> tuple[float, float]:
    vals = np.array([fn(quotient.haar_sample(seed, i)) for i in range(n)])
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n))


def siegel_product(f1: AnnulusBump, f2: AnnulusBump, label: str = "") -> TestFunction:
    mean = f1.lebesgue_integral * f2.lebesgue_integral
    tf = TestFunction("siegel_product", mean, 0.0, math.nan, label or "siegel",
                      f1=f1, f2=f2)
    # sup is only informational for Siegel transforms (they are unbounded on
    # the cusp); store an empirical value.
    vals = [tf(quotient.haar_sample(_HAAR_MC_SEED, i)) for i in range(256)]
    return TestFunction("siegel_product", mean, 0.0, float(max(vals)),
                        label or "siegel", f1=f1, f2=f2)


def inj_indicator(eta: float, label: str = "") -> TestFunction:
    if eta <= 0.0:
        return TestFunction("inj_indicator", 1.0, 0.0, 1.0, label or "const1", eta=0.0)
    tf = TestFunction("inj_indicator", math.nan, math.nan, 1.0, "tmp", eta=eta)
    mean, se = _mc_haar_mean(tf)
    return TestFunction("inj_indicator", mean, se, 1.0, label or f"inj>={eta}", eta=eta)


def smooth_bump(center: CosetPoint, radius: float, search_norm: float = 6.0,
                label: str = "") -> TestFunction:
    tf = TestFunction("smooth_bump", math.nan, math.nan, 1.0, "tmp",
                      center=center, radius=radius, search_norm=search_norm)
    mean, se = _mc_haar_mean(tf)
    return TestFunction("smooth_bump", mean, se, 1.0, label or "bump",
                        center=center, radius=radius, search_norm=search_norm)


def orbit_avoid(orbit: PeriodicOrbit, delta: float, search_norm: float = 6.0,
                label: str = "", mc_n: int = _HAAR_MC_N) -> TestFunction:
    tf = TestFunction("orbit_avoid", math.nan, math.nan, 1.0, "tmp",
                      orbit=orbit, delta=delta, search_norm=search_norm)
    mean, se = _mc_haar_mean(tf, n=mc_n)
    return TestFunction("orbit_avoid", mean, se, 1.0, label or "orbit-avoid",
                        orbit=orbit, delta=delta, search_norm=search_norm)


def lipschitz_estimate(tf: TestFunction, points: list[CosetPoint],
                       eps: float = 1e-4) -> float:
    """Finite-difference Lipschitz seminorm along the six group directions."""
    dirs = []
    for kind in ("a", "u", "u_minus"):
        dirs.append(algebra.one_param(PRODUCT, kind, eps))
    for coords in ((eps, 0, 0), (0, eps, 0), (0, 0, eps)):
        dirs.append(algebra.exp_r(algebra.r_vector(PRODUCT, *coords)))
    best = 0.0
    for x in points:
        base = tf(x)
        for g in dirs:
            xp = quotient.from_group(algebra.mul(g, x.rep))
            best = max(best, abs(tf(xp) - base) / eps)
    return best


# ---------------------------------------------------------------------------
# Averages and discrepancies
# ---------------------------------------------------------------------------

@dataclass
class Estimate:
    value: float
    std_error: float


def _strat_values(fn, n: int, *key_parts) -> np.ndarray:
    rs = jittered_grid(n, *key_parts)
    return np.array([fn(r) for r in rs])


def unipotent_discrepancy(x0: CosetPoint, logT: float, tests: list[TestFunction],
                          N: int, seed: int) -> dict:
    """|avg_{r in [0,1]} phi(a_logT u_r x0) - haar_mean(phi)| per test.

    Stratified sampling over N strata; returns per-test discrepancy and
    standard error plus the max over tests.
    """
    if N < 100:
        raise ValueError("N >= 100 required")
    rs = jittered_grid(N, seed, "unipotent_discrepancy", logT)
    pts = [translate(x0, logT, float(r)) for r in rs]
    out = {"tests": [], "max_discrepancy": 0.0}
    for tf in tests:
        vals = np.array([tf(p) for p in pts])
        disc = abs(float(vals.mean()) - tf.haar_mean)
        se = float(vals.std(ddof=1) / math.sqrt(N))
        out["tests"].append({"label": tf.label, "discrepancy": disc,
                             "std_error": se, "mean": float(vals.mean()),
                             "haar_mean": tf.haar_mean})
        out["max_discrepancy"] = max(out["max_discrepancy"], disc)
    return out


def horosphere_average(x: CosetPoint, t: float, delta: float, test: TestFunction,
                       N: int, seed: int) -> Estimate:
    """Monte Carlo average of phi(a_t u_r v_s x) over (r, s) in [0,delta]x[0,1]."""
    if not 0 < delta <= 1:
        raise ValueError("0 < delta <= 1 required")
    ss = jittered_grid(N, seed, "horosphere", t, delta)
    rs = stream(seed, "horosphere-r", t, delta).random(N) * delta
    vals = np.array([test(translate_n(x, float(r), float(s), t))
                     for r, s in zip(rs, ss)])
    return Estimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(N)))


@dataclass(frozen=True)
class SparseMeasure:
    """Atomic probability measure on [0, 1] with a regularity certificate.

    The certificate (C, theta, b) asserts rho(J) <= C * b^(1-theta) for every
    length-b interval J; it is verified exactly at construction by sliding a
    length-b window over the atom positions.
    """

    atoms: np.ndarray    # (k,) positions in [0, 1]
    weights: np.ndarray  # (k,) nonnegative, sums to 1
    C: float
    theta: float
    b: float

    def __post_init__(self):
        if abs(float(self.weights.sum()) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        worst = max_window_mass(self.atoms, self.weights, self.b)
        if worst > self.C * self.b ** (1.0 - self.theta) + 1e-12:
            raise ValueError(
                f"certificate fails: window mass {worst} > C b^(1-theta) "
                f"= {self.C * self.b ** (1.0 - self.theta)}")


def max_window_mass(atoms: np.ndarray, weights: np.ndarray, b: float) -> float:
    """sup over intervals J of length b of the atomic mass of J.

    The supremum over closed windows is attained with the left endpoint at an
    atom, so the scan is exact.
    """
    order = np.argsort(atoms)
    a = atoms[order]
    w = weights[order]
    cum = np.concatenate([[0.0], np.cumsum(w)])
    hi = np.searchsorted(a, a + b, side="right")
    lo = np.arange(len(a))
    return float(np.max(cum[hi] - cum[lo]))


def lebesgue_measure(n_atoms: int, b: float | None = None) -> SparseMeasure:
    atoms = (np.arange(n_atoms) + 0.5) / n_atoms
    w = np.full(n_atoms, 1.0 / n_atoms)
    b = b if b is not None else 4.0 / n_atoms
    C = max_window_mass(atoms, w, b) / b  # theta = 0
    return SparseMeasure(atoms, w, C + 1e-12, 0.0, b)


def dirac_measure(s: float) -> SparseMeasure:
    atoms = np.array([s])
    w = np.array([1.0])
    return SparseMeasure(atoms, w, 1.0, 1.0, 0.5)


def cantor_measure(depth: int) -> SparseMeasure:
    """Middle-thirds Cantor measure at the given depth, theta = 1 - log2/log3."""
    pos = np.zeros(1)
    for k in range(depth):
        pos = np.concatenate([pos, pos + 2.0 / 3.0 ** (k + 1)])
    atoms = pos + 0.5 / 3.0 ** depth
    w = np.full(len(atoms), 1.0 / len(atoms))
    theta = 1.0 - math.log(2.0) / math.log(3.0)
    b = 3.0 ** (-depth)
    C = max_window_mass(atoms, w, b) / b ** (1.0 - theta)
    return SparseMeasure(atoms, w, C + 1e-12, theta, b)


def sparse_average(x: CosetPoint, t: float, delta: float, rho: SparseMeasure,
                   test: TestFunction, N: int, seed: int) -> Estimate:
    """delta^{-1} int int phi(a_t u_r v_s x) dr drho(s), atoms sampled by weight."""
    lo = abs(math.log(rho.b)) / 4.0
    hi = abs(math.log(rho.b))
    if not lo <= t <= hi:
        warnings.warn(f"t = {t} outside the sparse-averaging regime "
                      f"[{lo:.2f}, {hi:.2f}] for b = {rho.b}", stacklevel=2)
    gen = stream(seed, "sparse", t, delta)
    cum = np.cumsum(rho.weights)
    ss = rho.atoms[np.searchsorted(cum, gen.random(N) * cum[-1])]
    rs = gen.random(N) * delta
    vals = np.array([test(translate_n(x, float(r), float(s), t))
                     for r, s in zip(rs, ss)])
    return Estimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(N)))


def nondivergence_fraction(x: CosetPoint, t: float, eps: float,
                           N: int, seed: int) -> float:
    """Fraction of stratified r in [0,1] with inj(a_t u_r x) < eps^2."""
    return nondivergence_fractions(x, t, [eps], N, seed)[0]


def nondivergence_fractions(x: CosetPoint, t: float, eps_list: list[float],
                            N: int, seed: int) -> list[float]:
    """Shared-translate version: one sweep, several thresholds (nested events)."""
    thresh = abs(math.log(x.inj_free)) + 8.0
    if t < thresh:
        raise RegimeViolation(f"need t >= |log inj(x)| + 8 = {thresh:.2f}, got {t}")
    rs = jittered_grid(N, seed, "nondiv", t)
    injs = np.array([translate(x, t, float(r)).inj for r in rs])
    return [float(np.mean(injs < e * e)) for e in eps_list]


def random_walk_push(x: CosetPoint, t: float, ell: float, n: int, beta: float,
                     N: int, seed: int) -> list[CosetPoint]:
    """N samples of h x with h ~ nu_ell^(n) * sigma * nu_t.

    Each h composes a_t u_{r0}, then a uniform element of the stable box
    B^{s,H}_{beta+100 beta^2}, then n factors a_ell u_{r_i}.
    """
    if n > 64:
        raise ValueError("n <= 64 required")
    if n > 0 and math.exp(-ell) > beta * beta:
        warnings.warn(f"e^-ell = {math.exp(-ell):.3g} > beta^2 = {beta * beta:.3g}: "
                      "outside the thickening-stability regime", stacklevel=2)
    out = []
    width = beta + 100.0 * beta * beta
    for i in range(N):
        gen = stream(seed, "rw", i)
        g = algebra.mul(algebra.one_param(x.model, "a", t),
                        algebra.one_param(x.model, "u", float(gen.random())))
        if beta > 0:
            s_ = float(gen.uniform(-width, width))
            tau = float(gen.uniform(-width, width))
            g = algebra.mul(algebra.from_h(x.model, algebra.prd(s_, tau, 0.0)), g)
        for _ in range(n):
            g = algebra.mul(algebra.mul(algebra.one_param(x.model, "a", ell),
                                        algebra.one_param(x.model, "u", float(gen.random()))), g)
        out.append(quotient.from_group(algebra.mul(g, x.rep)))
    return out


def avoidance_fraction(x0: CosetPoint, s: float, eta: float,
                       catalog: list[PeriodicOrbit], thresh: float,
                       N: int, seed: int, search_norm: float = 6.0,
                       enforce_regime: bool = True) -> float:
    """Fraction of r with inj(a_s u_r x0) <= eta or some catalog orbit within thresh.

    Below the regime s >= |log inj(x0)| + 8 the smallness bound has no
    content; enforce_regime=False downgrades the error to a warning for
    regime-boundary experiments (large fractions there document the
    necessity of the Diophantine hypothesis).
    """
    regime = abs(math.log(x0.inj_free)) + 8.0
    if s < regime:
        if enforce_regime:
            raise RegimeViolation(
                f"need s >= |log inj(x0)| + 8 = {regime:.2f}, got {s}")
        warnings.warn(f"s = {s} below the avoidance regime {regime:.2f}",
                      stacklevel=2)
    rs = jittered_grid(N, seed, "avoid", s)
    bad = 0
    for r in rs:
        p = translate(x0, s, float(r))
        if p.inj <= eta:
            bad += 1
            continue
        for Y in catalog:
            if quotient.dist_to_orbit(p, Y, search_norm) <= thresh:
                bad += 1
                break
    return bad / N
