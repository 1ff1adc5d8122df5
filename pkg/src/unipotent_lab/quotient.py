"""The quotient space X = G/Gamma for Gamma = SL2(Z) x SL2(Z).

Points are carried as reduced representatives: per factor, the column lattice
g Z^2 gets a Gauss-reduced, sign-canonicalized basis, which makes reduction
idempotent and deterministic.  The injectivity radius is the surrogate
min(0.01, c * lambda_1) with lambda_1 the shortest nonzero vector over both
factor lattices and c a fixed chart constant; the 0.01 cap follows the
definition of inj used throughout.

The complex model (SL2(Z[i])) is feature-gated: reduction and injectivity
work via Hermitian Gauss reduction, but the periodic-orbit machinery is
product-model only.
"""

from dataclasses import dataclass
from functools import lru_cache
import json
import math

import numpy as np

from . import algebra
from .algebra import PRODUCT, GroupElement
from .errors import BudgetExceeded, NotInChart
from .rng import stream

INJ_CAP = 0.01
# Chart constant relating the shortest lattice vector to the injectivity
# surrogate; any fixed value in [0.01, 0.1] satisfies the contracts, the
# absolute normalization of the metric being a free choice.
INJ_CHART_CONST = 0.05

ENUM_BUDGET = 10 ** 6

_SWAP = np.array([[0, -1], [1, 0]], dtype=np.int64)  # det +1 column swap


def _gauss_reduce_factor(B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Lagrange reduction of the column lattice of B.

    Returns (B * U, U) with U in SL2(Z).  The loop enforces the Gauss
    condition |<b1,b2>| <= min(|b1|^2, |b2|^2)/2 (mu rounded half-up, so the
    Gram ratio exits in [-1/2, 1/2)); the representative is then the
    lexicographically-largest of the four order/sign variants, which keeps
    diagonal and identity lattices on their natural bases and makes the map
    idempotent.
    """
    Bm = np.asarray(B, dtype=float)
    # Unrolled scalar arithmetic: this is the package's hottest loop.
    a11, a12 = float(Bm[0, 0]), float(Bm[0, 1])
    a21, a22 = float(Bm[1, 0]), float(Bm[1, 1])
    u11, u12, u21, u22 = 1, 0, 0, 1
    for _ in range(256):
        n1 = a11 * a11 + a21 * a21
        n2 = a12 * a12 + a22 * a22
        if n1 > n2 * (1.0 + 1e-15):
            # right-multiply by S = [[0,-1],[1,0]]
            a11, a12, a21, a22 = a12, -a11, a22, -a21
            u11, u12, u21, u22 = u12, -u11, u22, -u21
            continue
        mu = math.floor((a11 * a12 + a21 * a22) / n1 + 0.5)
        if mu == 0:
            break
        a12 -= mu * a11
        a22 -= mu * a21
        u12 -= mu * u11
        u22 -= mu * u21
    else:  # pragma: no cover - loop bound is a safety net
        raise RuntimeError("Gauss reduction did not terminate")
    # Variant selection: {B, B S, -B, -B S} all satisfy the unordered Gauss
    # condition and share the same entry magnitudes.
    key = best = None
    for (c11, c12, c21, c22, v11, v12, v21, v22) in (
            (a11, a12, a21, a22, u11, u12, u21, u22),
            (a12, -a11, a22, -a21, u12, -u11, u22, -u21),
            (-a11, -a12, -a21, -a22, -u11, -u12, -u21, -u22),
            (-a12, a11, -a22, a21, -u12, u11, -u22, u21)):
        k = (c11, c12, c21, c22)
        if key is None or k > key:
            key = k
            best = (c11, c12, c21, c22, v11, v12, v21, v22)
    B = np.array([[best[0], best[1]], [best[2], best[3]]])
    U = np.array([[best[4], best[5]], [best[6], best[7]]], dtype=np.int64)
    return _max_norm_polish(B, U)


def _max_norm_polish(B: np.ndarray, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Strictly-improving max-entry-norm descent over a small SL2(Z) ball.

    The Gauss basis minimizes euclidean column lengths but can lose the
    max-entry norm by up to sqrt(2) to a sheared competitor; this pass makes
    the representative minimal in the norm the rest of the package uses.
    Ties keep the incumbent, so diagonal/identity lattices stay put.
    """
    ball = sl2z_ball(3)
    ballf = _sl2z_ball_float(3)
    while True:
        cand = np.einsum("ij,njk->nik", B, ballf)
        cn = np.max(np.abs(cand), axis=(1, 2))
        rn = float(np.max(np.abs(B)))
        mask = cn < rn * (1.0 - 1e-12)
        if not np.any(mask):
            return B, U
        best = None
        for j in np.nonzero(mask)[0]:
            key = (cn[j], tuple(-cand[j].ravel()))
            if best is None or key < best[0]:
                best = (key, j)
        j = best[1]
        B = cand[j]
        U = U @ ball[j]


def _gaussian_round(z: complex) -> complex:
    return complex(math.floor(z.real + 0.5), math.floor(z.imag + 0.5))


def _gauss_reduce_factor_complex(B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian Gauss reduction over Z[i] (complex model feature gate)."""
    B = np.asarray(B, dtype=complex).copy()
    U = np.eye(2, dtype=complex)
    for _ in range(256):
        b1, b2 = B[:, 0], B[:, 1]
        n1 = float(np.real(np.vdot(b1, b1)))
        n2 = float(np.real(np.vdot(b2, b2)))
        if n1 > n2 * (1.0 + 1e-15):
            B = B @ _SWAP
            U = U @ _SWAP
            continue
        mu = _gaussian_round(complex(np.vdot(b1, b2)) / n1)
        if mu == 0:
            break
        T = np.array([[1, -mu], [0, 1]], dtype=complex)
        B = B @ T
        U = U @ T
    else:  # pragma: no cover
        raise RuntimeError("Hermitian Gauss reduction did not terminate")
    # Canonicalize the unit phase of the leading entry of b1.
    idx = int(np.argmax(np.abs(B[:, 0])))
    z = B[idx, 0]
    for unit in (1, 1j, -1, -1j):
        if (z * unit).real > abs(z) * 0.5 and (z * unit).imag >= -abs(z) * 0.5:
            B = B * np.array([unit, np.conj(unit)])
            U = U * np.array([unit, np.conj(unit)])
            break
    return B, U


def reduce(g: GroupElement) -> tuple[GroupElement, GroupElement]:
    """Reduce g to its canonical representative: rep = g * gamma, gamma in Gamma."""
    reps, gammas = [], []
    for f in g.factors:
        if g.model == PRODUCT:
            R, U = _gauss_reduce_factor(f)
            gammas.append(U.astype(float))
        else:
            R, U = _gauss_reduce_factor_complex(f)
            gammas.append(U)
        reps.append(R)
    rep = GroupElement(g.model, tuple(reps))
    gamma = GroupElement(g.model, tuple(gammas))
    return rep, gamma


def shortest_vector_length(g: GroupElement) -> float:
    """lambda_1 over both factor lattices of the (reduced) representative.

    For an (unordered) Gauss-reduced basis the shortest lattice vector is the
    shorter of the two basis vectors.
    """
    best = math.inf
    for f in g.factors:
        for j in (0, 1):
            col = f[:, j]
            n = math.sqrt(float(np.real(np.vdot(col, col))))
            best = min(best, n)
    return best


@dataclass(frozen=True)
class CosetPoint:
    """A point of X: reduced representative plus cached injectivity radius.

    inj is capped at 0.01 by convention; inj_free is the uncapped chart
    surrogate c * lambda_1, which flow-regime thresholds use (the cap is a
    normalization, not a thinness measure).
    """

    rep: GroupElement
    inj: float
    inj_free: float = INJ_CAP

    @property
    def model(self) -> str:
        return self.rep.model

    def key(self) -> bytes:
        return b"".join(np.ascontiguousarray(f).tobytes() for f in self.rep.factors)


def from_group(g: GroupElement) -> CosetPoint:
    rep, _ = reduce(g)
    lam = INJ_CHART_CONST * shortest_vector_length(rep)
    return CosetPoint(rep, min(INJ_CAP, lam), lam)


def identity_coset(model: str = PRODUCT) -> CosetPoint:
    return from_group(algebra.identity(model))


def injectivity_radius(x: CosetPoint) -> float:
    return x.inj


# ---------------------------------------------------------------------------
# Haar sampling
# ---------------------------------------------------------------------------

_Y0 = math.sqrt(3.0) / 2.0


def _haar_factor(rng: np.random.Generator) -> np.ndarray:
    # Lattice shape z = x + iy in the modular fundamental domain with density
    # dx dy / y^2 (rejection from {|x| <= 1/2, y >= sqrt(3)/2}), basis
    # (1, z)/sqrt(y) realizing that shape with covolume one, and a uniform
    # rotation fiber acting on the left.
    while True:
        x = rng.uniform(-0.5, 0.5)
        y = _Y0 / (1.0 - rng.random())
        if x * x + y * y >= 1.0:
            break
    theta = rng.uniform(0.0, 2.0 * math.pi)
    sq = math.sqrt(y)
    basis = np.array([[1.0 / sq, x / sq], [0.0, sq]])
    k = np.array([[math.cos(theta), -math.sin(theta)],
                  [math.sin(theta), math.cos(theta)]])
    return k @ basis


def haar_sample(seed: int, index: int = 0, model: str = PRODUCT) -> CosetPoint:
    """A Haar-distributed point of X, deterministic under (seed, index)."""
    if model != PRODUCT:
        raise NotImplementedError("Haar sampling is product-model only")
    rng = stream(seed, "haar", index)
    f1 = _haar_factor(rng)
    f2 = _haar_factor(rng)
    return from_group(GroupElement(PRODUCT, (f1, f2)))


# ---------------------------------------------------------------------------
# Lattice enumeration helpers
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def sl2z_ball(n: int) -> np.ndarray:
    """All elements of SL2(Z) with max-norm <= n, as an (k, 2, 2) int array."""
    mats = []
    for a in range(-n, n + 1):
        for b in range(-n, n + 1):
            if math.gcd(a, b) != 1:
                continue
            # a*d - b*c = 1 via the extended gcd; solutions (c, d) + t (a, b).
            g, x, y = _egcd(a, b)
            d0, c0 = x, -y
            lo1, hi1 = _t_range(a, c0, n)
            lo2, hi2 = _t_range(b, d0, n)
            for t in range(max(lo1, lo2), min(hi1, hi2) + 1):
                c, d = c0 + t * a, d0 + t * b
                mats.append(((a, b), (c, d)))
    mats.sort()
    out = np.array(mats, dtype=np.int64)
    if len(out) > ENUM_BUDGET:
        raise BudgetExceeded(f"SL2(Z) ball of norm {n} has {len(out)} elements")
    return out


@lru_cache(maxsize=32)
def _sl2z_ball_float(n: int) -> np.ndarray:
    return sl2z_ball(n).astype(float)


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _t_range(step: int, base: int, n: int) -> tuple[int, int]:
    """Integer t with |base + t*step| <= n, as an inclusive (lo, hi) range."""
    if step == 0:
        return (-ENUM_BUDGET, ENUM_BUDGET) if abs(base) <= n else (1, 0)
    lo = math.ceil((-n - base) / step)
    hi = math.floor((n - base) / step)
    if step < 0:
        lo, hi = hi, lo
    return lo, hi


def lattice_points_in_ball(B: np.ndarray, radius: float) -> np.ndarray:
    """Nonzero vectors of the column lattice of B with euclidean norm <= radius.

    Expects a (near) reduced basis; enumeration runs over Gram-Schmidt
    coefficient ranges with pruning.
    """
    b1 = B[:, 0]
    b2 = B[:, 1]
    n1 = float(b1 @ b1)
    mu = float(b1 @ b2) / n1
    b2s = b2 - mu * b1
    n2s = float(b2s @ b2s)
    out = []
    n_max = int(math.floor(radius / math.sqrt(n2s))) if n2s > 0 else 0
    for n in range(-n_max, n_max + 1):
        rem = radius * radius - n * n * n2s
        if rem < 0:
            continue
        half = math.sqrt(rem / n1)
        m_lo = math.ceil(-half - mu * n)
        m_hi = math.floor(half - mu * n)
        for m in range(m_lo, m_hi + 1):
            if m == 0 and n == 0:
                continue
            v = m * b1 + n * b2
            if float(v @ v) <= radius * radius + 1e-12:
                out.append(v)
    if not out:
        return np.zeros((0, 2))
    return np.array(out)


# ---------------------------------------------------------------------------
# Periodic H-orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicOrbit:
    """A periodic H-orbit H . (q/sqrt(det q), 1) Gamma, q a coprime integer matrix.

    Two rational conjugators give the same orbit iff they lie in the same
    SL2(Z) x SL2(Z) double coset, and coprime integer matrices of determinant
    n form a single double coset represented by diag(1, n); the catalog
    therefore stores canonical conjugators.  vol_proxy = height^3 is a
    monotone placeholder for the true orbit volume.
    """

    q: tuple  # ((a, b), (c, d)) integers, det > 0, gcd 1
    height: int
    vol_proxy: float

    def q_matrix(self) -> np.ndarray:
        return np.array(self.q, dtype=float)

    def det(self) -> int:
        (a, b), (c, d) = self.q
        return a * d - b * c

    def q_hat(self) -> np.ndarray:
        """The determinant-one normalization q / sqrt(det q)."""
        return self.q_matrix() / math.sqrt(float(self.det()))

    def to_json_dict(self) -> dict:
        (a, b), (c, d) = self.q
        return {"q": [[int(a), 1], [int(b), 1], [int(c), 1], [int(d), 1]],
                "height": int(self.height), "vol_proxy": float(self.vol_proxy)}


def orbit_from_integer_matrix(M) -> PeriodicOrbit:
    M = np.asarray(M, dtype=np.int64)
    g = int(np.gcd.reduce(np.abs(M).ravel()))
    if g == 0:
        raise ValueError("zero conjugator")
    M = M // g
    det = int(round(float(np.linalg.det(M))))
    if det <= 0:
        raise ValueError("conjugator must have positive determinant")
    height = int(max(1, np.max(np.abs(M))))
    return PeriodicOrbit(((int(M[0, 0]), int(M[0, 1])), (int(M[1, 0]), int(M[1, 1]))),
                         height, float(height) ** 3)


def canonical_orbit(M) -> PeriodicOrbit:
    """Canonical (Smith-form) representative of the orbit of conjugator M."""
    orb = orbit_from_integer_matrix(M)
    return PeriodicOrbit(((1, 0), (0, orb.det())), max(1, orb.det()),
                         float(max(1, orb.det())) ** 3)


def periodic_catalog(max_height: int) -> list[PeriodicOrbit]:
    """All periodic orbits with canonical conjugator height <= max_height.

    The double-coset canonical form is diag(1, n), so the catalog is exactly
    one orbit per determinant n = 1..max_height (n = 1 is the diagonal orbit).
    """
    if max_height > 50:
        raise ValueError("enumeration budget: max_height <= 50")
    if max_height >= ENUM_BUDGET:  # pragma: no cover - unreachable under the cap
        raise BudgetExceeded("periodic catalog candidate count")
    return [canonical_orbit(np.array([[1, 0], [0, n]])) for n in range(1, max_height + 1)]


def catalog_to_json(orbits: list[PeriodicOrbit]) -> str:
    return json.dumps([o.to_json_dict() for o in orbits])


def catalog_from_json(text: str) -> list[PeriodicOrbit]:
    out = []
    for d in json.loads(text):
        (an, ad), (bn, bd), (cn, cd), (dn, dd) = d["q"]
        if not all(v == 1 for v in (ad, bd, cd, dd)):
            raise ValueError("catalog entries must be normalized to denominator 1")
        out.append(PeriodicOrbit(((an, bn), (cn, dn)), d["height"], d["vol_proxy"]))
    return out


# ---------------------------------------------------------------------------
# Distance to an orbit, transversal returns
# ---------------------------------------------------------------------------

def _require_product(x: CosetPoint) -> None:
    if x.model != PRODUCT:
        raise NotImplementedError("orbit machinery is product-model only")


def _candidate_pairs(x: CosetPoint, Y: PeriodicOrbit, search_norm: float):
    """Candidate (L, R) = (g2 gamma_2 q_hat, g1 gamma_1) over the pruned pair ball.

    For each gamma_1 in the norm ball, the equation
    exp(w) g1 gamma_1 = g2 gamma_2 q_hat pins gamma_2 ~ A gamma_1 q_hat^{-1}
    (A = g2^{-1} g1); rounding recovers the integer solution whenever the
    offset is small.  This is the pruned form of the norm-ball pair
    enumeration.  Returns (L, R, ok) with ok masking valid gamma_2.
    """
    g1 = np.asarray(x.rep.factors[0], dtype=float)
    g2 = np.asarray(x.rep.factors[1], dtype=float)
    qh = Y.q_hat()
    qh_inv = np.array([[qh[1, 1], -qh[0, 1]], [-qh[1, 0], qh[0, 0]]])
    gammas1 = _sl2z_ball_float(int(search_norm))
    A = np.linalg.solve(g2, g1)
    T = np.einsum("ij,njk,kl->nil", A, gammas1, qh_inv)
    gammas2 = np.floor(T + 0.5)
    dets = (gammas2[:, 0, 0] * gammas2[:, 1, 1] - gammas2[:, 0, 1] * gammas2[:, 1, 0])
    ok = (np.abs(dets - 1.0) < 0.5) & (np.max(np.abs(gammas2), axis=(1, 2)) <= search_norm)
    L = np.einsum("ij,njk,kl->nil", g2, gammas2[ok], qh)
    R = np.einsum("ij,njk->nik", g1, gammas1[ok])
    return L, R, ok


def _inv2_batch(M: np.ndarray) -> np.ndarray:
    out = np.empty_like(M)
    out[:, 0, 0] = M[:, 1, 1]
    out[:, 0, 1] = -M[:, 0, 1]
    out[:, 1, 0] = -M[:, 1, 0]
    out[:, 1, 1] = M[:, 0, 0]
    det = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
    return out / det[:, None, None]


def dist_to_orbit(x: CosetPoint, Y: PeriodicOrbit, search_norm: float = 6.0) -> float:
    """Upper bound on d_X(x, Y) by minimizing over enumerated lattice pairs.

    The surrogate distance of a candidate is the l2 norm of the log singular
    values of exp(w)-candidate M (the second factor is matched exactly, so it
    contributes zero).  Larger search_norm only tightens the bound.
    """
    _require_product(x)
    if search_norm < 1:
        raise ValueError("search_norm >= 1 required")
    L, R, ok = _candidate_pairs(x, Y, search_norm)
    if not np.any(ok):
        return math.inf
    # The surrogate of a candidate pair: d(e, (g2 gamma_2 q_hat)^{-1} g1 gamma_1).
    M = np.einsum("nij,njk->nik", _inv2_batch(L), R)
    fro2 = np.sum(M * M, axis=(1, 2))
    disc = np.maximum(fro2 * fro2 - 4.0, 0.0)
    s1 = np.sqrt((fro2 + np.sqrt(disc)) / 2.0)
    d = math.sqrt(2.0) * np.abs(np.log(np.maximum(s1, 1e-300)))
    return float(np.min(d))


def transversal_returns(x: CosetPoint, Y: PeriodicOrbit,
                        search_norm: float = 6.0) -> list[algebra.LieVector]:
    """The set I_Y(x) = {w in r : 0 < ||w|| < inj(x), exp(w) x in Y}.

    Vectors are exact logs of the closed-form membership candidates; the
    returned list is deduplicated and sorted by norm.  Discovery is limited
    to the gamma enumeration budget set by search_norm.
    """
    _require_product(x)
    L, R, ok = _candidate_pairs(x, Y, search_norm)
    if len(L) > ENUM_BUDGET:
        raise BudgetExceeded("transversal return enumeration")
    # exp(w) = g2 gamma_2 q_hat (g1 gamma_1)^{-1}; this order keeps w in the
    # transversal chart of x itself.
    M = np.einsum("nij,njk->nik", L, _inv2_batch(R))
    out = {}
    inj = x.inj
    for i in range(len(M)):
        Mi = M[i]
        if float(np.max(np.abs(Mi - np.eye(2)))) > 0.8:
            continue
        try:
            W = algebra.log2(Mi)
        except NotInChart:
            continue
        w = np.array([W[0, 0], W[0, 1], W[1, 0]])
        nrm = float(np.max(np.abs(w)))
        if nrm <= 1e-12 or nrm >= inj:
            continue
        # Exactness check: recompose and compare.
        if float(np.max(np.abs(algebra.exp2(W) - Mi))) > 1e-10:
            continue
        key = tuple(np.round(w / 1e-9).astype(np.int64))
        out[key] = w
    vecs = sorted(out.values(), key=lambda v: (float(np.max(np.abs(v))), tuple(v)))
    return [algebra.LieVector(PRODUCT, np.zeros(3), v) for v in vecs]


def point_distance(x: CosetPoint, y: CosetPoint, search_norm: float = 6.0) -> float:
    """d_X(x, y) upper bound; factors decouple, so gamma is minimized per factor."""
    _require_product(x)
    total = 0.0
    gammas = sl2z_ball(int(search_norm)).astype(float)
    for gx, gy in zip(x.rep.factors, y.rep.factors):
        T = np.einsum("ij,njk->nik", np.linalg.solve(np.asarray(gy, float), np.asarray(gx, float)), gammas)
        fro2 = np.sum(T * T, axis=(1, 2))
        disc = np.maximum(fro2 * fro2 - 4.0, 0.0)
        s1 = np.sqrt((fro2 + np.sqrt(disc)) / 2.0)
        d = np.sqrt(2.0) * np.abs(np.log(np.maximum(s1, 1e-300)))
        total += float(np.min(d))
    return total
