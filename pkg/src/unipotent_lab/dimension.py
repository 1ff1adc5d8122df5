"""Discretized-dimension toolkit: energies, dyadic regularization, cones.

Point clouds are finite subsets of a ball in the transversal algebra r
(coordinates (w11, w12, w21)), indexed by dyadic cubes at levels k0..k1 with
block exponent M.  The truncated Riesz energy eng_{Theta,R} certifies
discretized dimension; regularize() decomposes a cloud into parts whose
per-cube counts lie in a single dyadic band at every level.

Cone sets are finite unions of local box-orbits E . exp(w) y carrying an
admissible measure; the transversal return sets I(h, z), the localized
Margulis functions f and psi, and the single-step dimension-improvement
experiment all live here.  Everything transversal is closed form in the
product model because r is a subalgebra there.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np
from scipy.spatial import cKDTree

from . import algebra, quotient
from .algebra import PRODUCT, BoxSpec, GroupElement, LieVector
from .errors import CannotRegularize, InjectivityViolation
from .rng import stream
from .quotient import CosetPoint

MIN_SEPARATION = 1e-14


# ---------------------------------------------------------------------------
# Point clouds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointCloud:
    """Finite subset of B_r(0, b0) with a dyadic-cube index.

    points: (n, 3) coordinates; shift: the dyadic anchor offset found by the
    regularizer's boundary-avoiding search (zero by default).
    """

    points: np.ndarray
    b0: float
    M: int
    k0: int
    k1: int
    shift: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("points must be (n, 3)")
        if len(pts) and float(np.max(np.abs(pts))) > self.b0 + 1e-12:
            raise ValueError("points must lie in the max-norm ball of radius b0")
        if len(pts) > 1:
            tree = cKDTree(pts)
            pairs = tree.query_pairs(MIN_SEPARATION)
            if pairs:
                raise ValueError(f"duplicate points at separation <= {MIN_SEPARATION}")

    def __len__(self) -> int:
        return len(self.points)

    def cube_ids(self, k: int) -> np.ndarray:
        """Integer cube corners at level k (cube side 2^-(M k)); k >= k0 only."""
        if k < self.k0:
            raise ValueError("cube ids are materialized for k >= k0 only")
        scale = 2.0 ** (self.M * k)
        return np.floor((self.points - self.shift) * scale).astype(np.int64)

    def cube_counts(self, k: int) -> dict:
        """Nonempty-cube occupancy at level k.

        For k < k0 the dyadic hierarchy is anchored (via the free coarse
        digits of the nested grid) so that the entire cloud lies interior to
        a single cube; those levels therefore report one cube.
        """
        if k < self.k0:
            return {(0, 0, 0): len(self.points)}
        ids = self.cube_ids(k)
        uniq, counts = np.unique(ids, axis=0, return_counts=True)
        return {tuple(u): int(c) for u, c in zip(uniq, counts)}

    def to_json(self) -> str:
        return json.dumps({"b0": self.b0, "M": self.M, "k0": self.k0,
                           "k1": self.k1, "shift": self.shift.tolist(),
                           "points": self.points.tolist()})

    @staticmethod
    def from_json(text: str) -> "PointCloud":
        d = json.loads(text)
        return PointCloud(np.array(d["points"], dtype=float), d["b0"], d["M"],
                          d["k0"], d["k1"], np.array(d["shift"], dtype=float))


def max_norm_dists(points: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.max(np.abs(points - w[None, :]), axis=1)


def energy(cloud: PointCloud, R: int, alpha: float, w_index: int) -> float:
    """Truncated Riesz alpha-energy eng_{Theta,R} at the w_index-th point.

    The self term is always excluded and the removal budget R applies to the
    remaining points; removing the R nearest of them is the exact minimizer.
    Returns b0^-alpha when the cloud has at most R points.
    """
    n = len(cloud)
    if n <= R:
        return cloud.b0 ** (-alpha)
    d = max_norm_dists(cloud.points, cloud.points[w_index])
    d = np.delete(d, w_index)
    if R > 0:
        d = np.sort(d)[R:]
    return float(np.sum(d ** (-alpha))) if len(d) else 0.0


def energy_max(cloud: PointCloud, R: int, alpha: float,
               sample: int | None = None) -> float:
    """max over (a sample of) cloud points of eng_{Theta,R}."""
    n = len(cloud)
    idx = range(n)
    if sample is not None and n > sample:
        idx = np.linspace(0, n - 1, sample).astype(int)
    return max(energy(cloud, R, alpha, int(i)) for i in idx)


def energy_set(points: np.ndarray, R: int, alpha: float, b0: float,
               w_index: int) -> float:
    """eng on a bare coordinate array (used for 1-d projected sets too)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] <= R:
        return b0 ** (-alpha)
    if pts.shape[1] == 1:
        d = np.abs(pts[:, 0] - pts[w_index, 0])
    else:
        d = np.max(np.abs(pts - pts[w_index]), axis=1)
    d = np.delete(d, w_index)
    if R > 0:
        d = np.sort(d)[R:]
    return float(np.sum(d ** (-alpha))) if len(d) else 0.0


# ---------------------------------------------------------------------------
# Regularization (dyadic band decomposition)
# ---------------------------------------------------------------------------

def _halton(n: int, base: int) -> np.ndarray:
    out = np.zeros(n)
    for i in range(n):
        f, x, k = 1.0, 0.0, i + 1
        while k > 0:
            f /= base
            x += f * (k % base)
            k //= base
        out[i] = x
    return out


_N_SHIFTS = 4096


def _boundary_mask(points: np.ndarray, shift: np.ndarray, M: int,
                   k_lo: int, k_hi: int) -> np.ndarray:
    """True for points within 2^-(Mk+M) of the lower cube face at some level."""
    bad = np.zeros(len(points), dtype=bool)
    for k in range(k_lo, k_hi + 1):
        scale = 2.0 ** (M * k)
        frac = (points - shift) * scale
        frac = frac - np.floor(frac)
        bad |= np.any(frac < 2.0 ** (-M), axis=1)
    return bad


def _band_tau(counts: list[int], M: int) -> int | None:
    """Smallest tau with 2^(M(tau-2)) <= min <= max <= 2^(M tau), or None."""
    cmax, cmin = max(counts), min(counts)
    tau = 0
    while 2 ** (M * tau) < cmax:
        tau += 1
    if cmin >= 2 ** (M * (tau - 2)):
        return tau
    return None


@dataclass
class RegularPart:
    cloud: PointCloud
    tau: dict            # level k -> tau_k
    k0_min_fraction: float
    k0_floor_ok: bool | None


@dataclass
class RegularizeResult:
    discard: PointCloud
    parts: list[RegularPart]
    shift: np.ndarray


def regularize(cloud: PointCloud, M: int, k0: int, k1: int, beta: float,
               kappa: float | None = None, k0_floor: float | None = None) -> RegularizeResult:
    """Decompose cloud = discard  U  (U_i part_i) with dyadic-band regularity.

    Every part satisfies, at every level k0-10 <= k <= k1: all nonempty cubes
    hold between 2^(M(tau_k - 2)) and 2^(M tau_k) points.  The discard holds
    at most beta^(1/4) of the cloud and every part at least beta^2 of it.

    The dyadic anchor is chosen by a boundary-avoiding search over 4096
    Halton offsets; CannotRegularize signals adversarial alignment (caller
    retries with new jitter) or a blown discard budget.

    kappa, when given, checks the block-exponent condition
    2^-M (m0+1) < kappa/100 and warns if violated.  k0_floor, when given,
    grades each part against the level-k0 occupancy floor.
    """
    if len(cloud) == 0:
        raise ValueError("cloud must be nonempty")
    if k1 <= k0:
        raise ValueError("k1 > k0 required")
    if kappa is not None and 2.0 ** (-M) * 2.0 >= kappa / 100.0:
        import warnings
        warnings.warn(f"M = {M} violates the block-exponent condition for "
                      f"kappa = {kappa}", stacklevel=2)

    n = len(cloud)
    discard_budget = beta ** 0.25 * n
    min_part = beta * beta * n

    # Boundary-avoiding shift search over the materialized levels k0..k1
    # (levels below k0 are boundary-free by the coarse-digit anchoring, see
    # PointCloud.cube_counts).
    root = 2.0 ** (-M * k0)
    shifts = np.stack([_halton(_N_SHIFTS, 2), _halton(_N_SHIFTS, 3),
                       _halton(_N_SHIFTS, 5)], axis=1) * root
    best = None
    for i in range(_N_SHIFTS):
        bad = _boundary_mask(cloud.points, shifts[i], M, k0, k1)
        nbad = int(bad.sum())
        if best is None or nbad < best[0]:
            best = (nbad, i, bad)
        if nbad == 0:
            break
    nbad, i_best, bad = best
    if nbad > discard_budget:
        raise CannotRegularize(
            f"no boundary-avoiding shift: best discards {nbad} > budget "
            f"{discard_budget:.1f}")
    shift = shifts[i_best]
    discard_idx = [np.nonzero(bad)[0]]
    work = [np.nonzero(~bad)[0]]
    parts = []

    def cube_labels(idx, k):
        scale = 2.0 ** (M * k)
        return np.floor((cloud.points[idx] - shift) * scale).astype(np.int64)

    while work:
        idx = work.pop()
        if len(idx) < max(1.0, min_part):
            discard_idx.append(idx)
            continue
        split_done = False
        # Levels below k0 hold a single cube and never violate the band.
        for k in range(k0, k1 + 1):
            labels = cube_labels(idx, k)
            uniq, inverse, counts = np.unique(labels, axis=0,
                                              return_inverse=True,
                                              return_counts=True)
            if _band_tau(list(counts), M) is not None:
                continue
            # Split by per-cube dyadic class at the first violating level.
            tau_of = np.ceil(np.log2(np.maximum(counts, 1)) / M).astype(int)
            for t in np.unique(tau_of):
                sel = np.isin(inverse, np.nonzero(tau_of == t)[0])
                work.append(idx[sel])
            split_done = True
            break
        if not split_done:
            parts.append(idx)

    discard_all = (np.concatenate(discard_idx) if discard_idx else
                   np.zeros(0, dtype=int))
    if len(discard_all) > discard_budget:
        raise CannotRegularize(
            f"discard {len(discard_all)} exceeds budget {discard_budget:.1f}")

    def subcloud(idx):
        return PointCloud(cloud.points[idx], cloud.b0, M, k0, k1, shift)

    out_parts = []
    for idx in parts:
        pc = subcloud(idx)
        tau = {}
        for k in range(k0 - 10, k1 + 1):
            counts = list(pc.cube_counts(k).values())
            t = _band_tau(counts, M)
            assert t is not None, "internal: part fails its own band"
            tau[k] = t
        k0_counts = list(pc.cube_counts(k0).values())
        frac = min(k0_counts) / len(pc)
        ok = None if k0_floor is None else bool(frac >= k0_floor)
        out_parts.append(RegularPart(pc, tau, frac, ok))
    out_parts.sort(key=lambda p: (-len(p.cloud), p.cloud.points[0].tolist()))
    return RegularizeResult(subcloud(discard_all), out_parts, shift)


def verify_band(part: RegularPart) -> bool:
    """Exact replay of the band inequality over all cubes and levels."""
    pc = part.cloud
    for k in range(pc.k0 - 10, pc.k1 + 1):
        tau = part.tau[k]
        for c in pc.cube_counts(k).values():
            if not (2 ** (pc.M * (tau - 2)) <= c <= 2 ** (pc.M * tau)):
                return False
    return True


# ---------------------------------------------------------------------------
# Cone sets (E-sets with admissible measures)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeSet:
    """E-set: union over w in F of E . exp(w) y, E = B^{s,H}_beta U_eta.

    masses are the per-sheet weights of the admissible measure (total 1);
    aa is the admissibility constant (density pinching).
    """

    base: CosetPoint
    F: PointCloud
    beta: float
    eta: float
    masses: np.ndarray
    aa: float

    @property
    def box(self) -> BoxSpec:
        return BoxSpec("E", self.beta, eta=self.eta)

    def sheet_vector(self, i: int) -> LieVector:
        return algebra.LieVector(PRODUCT, np.zeros(3), self.F.points[i].copy())

    def sheet_point(self, i: int) -> CosetPoint:
        g = algebra.mul(algebra.exp_r(self.sheet_vector(i)), self.base.rep)
        return quotient.from_group(g)


def cone_build(y: CosetPoint, F: PointCloud, beta: float, eta: float,
               weights: np.ndarray | None = None) -> ConeSet:
    """Validated cone with admissibility certificate.

    Requires inj(y) >= 2 eta (the injectivity margin of the E-orbit maps),
    F inside B_r(0, beta), and the convention eta^2 = beta.
    """
    if not math.isclose(eta * eta, beta, rel_tol=1e-9, abs_tol=1e-15):
        raise ValueError(f"convention eta^2 = beta violated: {eta * eta} vs {beta}")
    if y.inj < 2.0 * eta:
        raise InjectivityViolation(
            f"inj(y) = {y.inj:.4g} < 2 eta = {2 * eta:.4g}")
    if len(F) and float(np.max(np.abs(F.points))) > beta + 1e-12:
        raise ValueError("F must lie in B_r(0, beta)")
    if weights is None:
        masses = np.full(len(F), 1.0 / len(F))
        aa = 1.0
    else:
        masses = np.asarray(weights, dtype=float)
        if np.any(masses <= 0):
            raise ValueError("weights must be positive")
        masses = masses / masses.sum()
        rho = masses * len(F)
        aa = float(max(np.max(rho), 1.0 / np.min(rho)))
    return ConeSet(y, F, beta, eta, masses, aa)


@dataclass(frozen=True)
class ConePoint:
    """z = h_box . exp(w_sheet) y, a point on the cone."""

    sheet: int
    h_box: GroupElement

    def realize(self, cone: ConeSet) -> CosetPoint:
        g = algebra.mul(self.h_box,
                        algebra.mul(algebra.exp_r(cone.sheet_vector(self.sheet)),
                                    cone.base.rep))
        return quotient.from_group(g)


def sheet_center(cone: ConeSet, i: int) -> ConePoint:
    return ConePoint(i, algebra.identity(PRODUCT))


def transversal_set(cone: ConeSet, h: GroupElement, z: ConePoint,
                    b: float) -> list[LieVector]:
    """I(h, z) = {v in r : ||v|| < b inj(hz), exp(v) h z in h Cone}.

    Product-model closed form: per sheet w', the unique candidate is
    v = Ad(h h_z) log(exp(w') exp(-w_z)), and membership reduces to the norm
    window (the box factor is inherited from z itself).  Always contains 0.
    """
    if b > 0.1 + 1e-12:
        raise ValueError("b <= 1/10 required")
    memb = algebra.box_contains(cone.box, z.h_box)
    if not memb.contains:
        raise ValueError("z does not lie on the cone")
    hz = quotient.from_group(
        algebra.mul(h, algebra.mul(z.h_box,
                    algebra.mul(algebra.exp_r(cone.sheet_vector(z.sheet)),
                                cone.base.rep))))
    window = b * hz.inj
    w_z = cone.F.points[z.sheet]
    conj = algebra.h_factor(algebra.mul(h, z.h_box))
    out = []
    E_wz = algebra.exp2(np.array([[w_z[0], w_z[1]], [w_z[2], -w_z[0]]]))
    E_wz_inv = np.array([[E_wz[1, 1], -E_wz[0, 1]], [-E_wz[1, 0], E_wz[0, 0]]])
    for i in range(len(cone.F)):
        wp = cone.F.points[i]
        W = algebra.log2(algebra.exp2(np.array([[wp[0], wp[1]], [wp[2], -wp[0]]]))
                         @ E_wz_inv)
        u = np.array([W[0, 0], W[0, 1], W[1, 0]])
        v = algebra.adjoint_r3(conj, u)
        if float(np.max(np.abs(v))) < window:
            out.append(algebra.LieVector(PRODUCT, np.zeros(3), v))
    return out


def margulis_fpsi(cone: ConeSet, h: GroupElement, z: ConePoint, b: float,
                  R: int, alpha: float) -> tuple[float, float]:
    """(f, psi) of the localized Margulis pair at (h, z).

    psi = (b inj(hz))^-alpha * max(1, #I).  f is (b inj(hz))^-alpha when
    #I <= max(R, 1); otherwise the truncated sum over I with the R
    smallest-norm nonzero vectors dropped (the exact minimizer under the
    self-term-exclusion convention).
    """
    I = transversal_set(cone, h, z, b)
    hz = quotient.from_group(algebra.mul(h, algebra.mul(
        z.h_box, algebra.mul(algebra.exp_r(cone.sheet_vector(z.sheet)),
                             cone.base.rep))))
    floor = (b * hz.inj) ** (-alpha)
    psi = floor * max(1, len(I))
    if len(I) <= max(R, 1):
        return floor, psi
    norms = np.sort(np.array([v.r_norm() for v in I if v.r_norm() > 1e-13]))
    kept = norms[R:] if R > 0 else norms
    f = float(np.sum(kept ** (-alpha))) if len(kept) else floor
    return max(f, floor), psi


# ---------------------------------------------------------------------------
# Dimension-improvement step
# ---------------------------------------------------------------------------

@dataclass
class DimensionStepReport:
    offspring: list[ConeSet]
    n_pieces: int
    n_dropped_inj: int
    n_dropped_small: int
    sup_f_before: float
    sup_psi_before: float
    sup_f_after: float
    sup_psi_after: float
    contraction: float
    energy_sup_before: float
    energy_sup_after: float
    piece_sheet_counts: list[int]

    def to_json(self) -> str:
        d = {k: v for k, v in self.__dict__.items() if k != "offspring"}
        d["n_offspring"] = len(self.offspring)
        return json.dumps(d)


def dimension_step(cone: ConeSet, ell: float, r: float, b: float, R: int,
                   alpha: float, N: int, seed: int,
                   chunk_lo: float | None = None,
                   chunk_hi: float | None = None) -> DimensionStepReport:
    """Push the cone by a_ell u_r and re-slice into offspring cones.

    The pushed cone is a union of leaves a_ell u_r E . exp(w) y, each
    stretched by e^ell along U.  Charts of E-size are anchored on the pushed
    reference leaf (sheet 0, ties broken by sheet index) at N seed-sampled
    U-offsets rho_j in [r - eta, r + eta]; the chart at rho_j collects every
    leaf passing within the transversal window beta of its base, with the
    exact relative offsets

        v(w) = Ad(a_ell u_{rho_j}) log(exp(w) exp(-w_ref))

    as the offspring sheet set (closed form: r is a subalgebra in the
    product model).  Since the chart grid is disjoint along U, the covering
    multiplicity cap is trivially satisfied.

    Offspring whose base violates inj >= beta^(1/2) (or the cone margin) are
    dropped and counted; InjectivityViolation is raised only when nothing
    survives.  chunk_lo/chunk_hi, as fractions of #F, replay the
    bounded-size chunking of offspring sheet sets.
    """
    beta, eta = cone.beta, cone.eta
    if math.exp(-ell) > beta * beta + 1e-15:
        raise ValueError("regime e^-ell <= beta^2 required")
    F = cone.F.points
    nF = len(F)
    if nF == 0:
        raise ValueError("empty cone")
    piece_width = 2.0 * eta * math.exp(-ell)
    n_grid = int(math.floor(2.0 * eta / piece_width))

    # before-statistics at the sheet centers
    samp = range(nF) if nF <= 64 else np.linspace(0, nF - 1, 64).astype(int)
    fb_pb = [margulis_fpsi(cone, algebra.identity(PRODUCT),
                           sheet_center(cone, int(i)), b, R, alpha) for i in samp]
    f_before = [t[0] for t in fb_pb]
    psi_before = [t[1] for t in fb_pb]
    e_before = energy_max(cone.F, R, alpha, sample=64)

    # relative log-offsets against the reference sheet (exact)
    w_ref = F[0]
    E_ref = algebra.exp2(np.array([[w_ref[0], w_ref[1]], [w_ref[2], -w_ref[0]]]))
    E_ref_inv = np.array([[E_ref[1, 1], -E_ref[0, 1]],
                          [-E_ref[1, 0], E_ref[0, 0]]])
    rel = np.empty((nF, 3))
    for i in range(nF):
        wp = F[i]
        W = algebra.log2(algebra.exp2(np.array([[wp[0], wp[1]], [wp[2], -wp[0]]]))
                         @ E_ref_inv)
        rel[i] = (W[0, 0], W[0, 1], W[1, 0])

    # seed-sampled chart anchors along the reference leaf
    gen = stream(seed, "dimension-step", r)
    js = np.unique(gen.integers(0, max(n_grid, 1), size=min(N, n_grid)))
    anchors = r - eta + (js + 0.5) * piece_width

    pieces: list[tuple[float, np.ndarray, np.ndarray]] = []
    for rho_j in anchors:
        Ad = _ad_matrix(ell, float(rho_j))
        v = rel @ Ad.T
        keep = np.max(np.abs(v), axis=1) <= beta * (1.0 - 1e-12)
        if np.any(keep):
            pieces.append((float(rho_j), np.nonzero(keep)[0], v[keep]))
    n_pieces = len(pieces)

    # chunking replay on the sheet counts
    chunks = []
    dropped_small = 0
    lo_n = chunk_lo * nF if chunk_lo is not None else 1.0
    hi_n = chunk_hi * nF if chunk_hi is not None else math.inf
    for rho_j, sheets, v in pieces:
        if len(sheets) < max(1.0, 0.5 * lo_n):
            dropped_small += 1
            continue
        if len(sheets) > hi_n:
            n_chunks = int(math.ceil(len(sheets) / hi_n))
            for sel in np.array_split(np.arange(len(sheets)), n_chunks):
                if len(sel) >= max(1.0, 0.5 * lo_n):
                    chunks.append((rho_j, sheets[sel], v[sel]))
                else:
                    dropped_small += 1
        else:
            chunks.append((rho_j, sheets, v))

    offspring = []
    energies_after = []
    dropped_inj = 0
    for rho_j, sheets, v in chunks:
        if len(v):
            eng = max(energy_set(v, R, alpha, beta, k)
                      for k in range(min(len(v), 32)))
            energies_after.append(eng)
        h_j = algebra.mul(algebra.mul(algebra.one_param(PRODUCT, "a", ell),
                                      algebra.one_param(PRODUCT, "u", rho_j)),
                          algebra.exp_r(algebra.LieVector(PRODUCT, np.zeros(3),
                                                          w_ref.copy())))
        y_j = quotient.from_group(algebra.mul(h_j, cone.base.rep))
        if y_j.inj < math.sqrt(beta):
            dropped_inj += 1
            continue
        # Deduplicate collisions at the minimum separation before rebuilding.
        vv = np.unique(np.round(v / MIN_SEPARATION).astype(np.int64),
                       axis=0) * MIN_SEPARATION
        masses = None if len(vv) != len(v) else cone.masses[sheets]
        try:
            offspring.append(cone_build(
                y_j, PointCloud(np.clip(vv, -beta, beta), beta, cone.F.M,
                                cone.F.k0, cone.F.k1), beta, eta,
                weights=masses))
        except (InjectivityViolation, ValueError):
            dropped_inj += 1
    if chunks and not offspring and dropped_inj:
        raise InjectivityViolation("every offspring base violates inj >= beta^(1/2)")

    f_after, psi_after = [], []
    for off in offspring:
        ns = len(off.F)
        s2 = range(ns) if ns <= 16 else np.linspace(0, ns - 1, 16).astype(int)
        for i in s2:
            fv, pv = margulis_fpsi(off, algebra.identity(PRODUCT),
                                   sheet_center(off, int(i)), b, R, alpha)
            f_after.append(fv)
            psi_after.append(pv)
    sup_fb, sup_fa = max(f_before), max(f_after) if f_after else 0.0
    return DimensionStepReport(
        offspring=offspring,
        n_pieces=n_pieces,
        n_dropped_inj=dropped_inj,
        n_dropped_small=dropped_small,
        sup_f_before=float(sup_fb),
        sup_psi_before=float(max(psi_before)),
        sup_f_after=float(sup_fa),
        sup_psi_after=float(max(psi_after)) if psi_after else 0.0,
        contraction=float(sup_fa / sup_fb) if sup_fb > 0 else math.nan,
        energy_sup_before=float(e_before),
        energy_sup_after=float(max(energies_after)) if energies_after else math.nan,
        piece_sheet_counts=[len(s) for _, s, _ in chunks])


def _ad_matrix(ell: float, rho: float) -> np.ndarray:
    """Ad(a_ell u_rho) on r-coordinates (w11, w12, w21)."""
    h = algebra.prd(0.0, 0.0, rho)
    A = algebra.one_param(PRODUCT, "a", ell).factors[0] @ h
    out = np.zeros((3, 3))
    for j, e in enumerate(np.eye(3)):
        out[:, j] = algebra.adjoint_r3(A, e)
    return out
