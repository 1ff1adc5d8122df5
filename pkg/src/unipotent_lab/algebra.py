"""Group and Lie-algebra kernels for G = SL2(R) x SL2(R) or SL2(C).

The ambient group G contains a distinguished copy H of SL2(R): the diagonal
{(g, g)} in the product model, the real points in the complex model.  The Lie
algebra splits as g = h (+) r with both summands Ad(H)-invariant; transversal
vectors live in r, which is sl2(R) x {0} in the product model and i*sl2(R) in
the complex model.

All matrices are 2x2 with determinant 1 (renormalized after long products).
Norms are max norms: on group elements the max absolute entry over factors,
on Lie vectors the max absolute coordinate in the fixed bases of h and r.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ChartSingular, NoConvergence, NotInChart

PRODUCT = "product"     # SL2(R) x SL2(R)
COMPLEX = "complex"     # SL2(C)

MODELS = (PRODUCT, COMPLEX)

# Factors are rescaled by det^(-1/2) after this many multiplications.
RENORM_EVERY = 64

_I2 = np.eye(2)


def _check_model(model: str) -> None:
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


# ---------------------------------------------------------------------------
# 2x2 exponential / logarithm
#
# A traceless 2x2 matrix X satisfies X^2 = q*I with q = -det(X), hence
# exp(X) = c1(q) I + c2(q) X for entire functions c1 = cosh(sqrt(q)) and
# c2 = sinh(sqrt(q))/sqrt(q).  The closed form avoids series truncation.
# ---------------------------------------------------------------------------

def _exp_coeffs(q: complex) -> tuple[complex, complex]:
    if abs(q) <= 1e-12:
        # Taylor branch keeps full accuracy through q = 0.
        c1 = 1.0 + q / 2.0 + q * q / 24.0
        c2 = 1.0 + q / 6.0 + q * q / 120.0
        return c1, c2
    s = np.sqrt(complex(q))
    return complex(np.cosh(s)), complex(np.sinh(s) / s)


def exp2(X: np.ndarray) -> np.ndarray:
    """Exponential of a traceless 2x2 matrix (real or complex)."""
    q = complex(X[0, 0] * X[0, 0] + X[0, 1] * X[1, 0])  # = -det(X)
    c1, c2 = _exp_coeffs(q)
    out = c1 * np.eye(2, dtype=complex) + c2 * X.astype(complex)
    if not np.iscomplexobj(X):
        return out.real.copy()
    return out


def log2(M: np.ndarray) -> np.ndarray:
    """Traceless logarithm of M in SL2 near the identity.

    Inverts exp2: writes M = c1*I + c2*W and solves for W.  Raises
    NotInChart when trace(M)/2 <= -1 (no traceless real logarithm) or the
    solve is degenerate.
    """
    c1 = complex(M[0, 0] + M[1, 1]) / 2.0
    real_input = not np.iscomplexobj(M)
    if real_input and c1.real <= -1.0 + 1e-12:
        raise NotInChart("matrix trace <= -2: no traceless logarithm")
    # s with cosh(s) = c1, principal branch.
    s = np.log(c1 + np.sqrt(complex(c1 * c1 - 1.0)))
    if abs(s) <= 1e-8:
        c2 = 1.0 + s * s / 6.0 + s ** 4 / 120.0
    else:
        c2 = np.sinh(s) / s
    if abs(c2) <= 1e-12:
        raise NotInChart("degenerate logarithm (c2 ~ 0)")
    W = (M.astype(complex) - c1 * np.eye(2)) / c2
    if real_input:
        return W.real.copy()
    return W


def _dexp(X: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Directional derivative of exp2 at X along traceless direction E."""
    q = complex(X[0, 0] * X[0, 0] + X[0, 1] * X[1, 0])
    c1, c2 = _exp_coeffs(q)
    if abs(q) <= 1e-12:
        dc1 = 0.5 + q / 12.0
        dc2 = 1.0 / 6.0 + q / 60.0
    else:
        dc1 = c2 / 2.0
        dc2 = (c1 - c2) / (2.0 * q)
    dq = 2.0 * X[0, 0] * E[0, 0] + X[0, 1] * E[1, 0] + X[1, 0] * E[0, 1]
    Xc = X.astype(complex)
    Ec = E.astype(complex)
    return (dc1 * np.eye(2) + dc2 * Xc) * dq + c2 * Ec


# ---------------------------------------------------------------------------
# Group elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    """An element of G: two real factors (product) or one complex factor."""

    model: str
    factors: tuple
    mults: int = 0

    def factor(self, i: int) -> np.ndarray:
        return self.factors[i]

    def norm(self) -> float:
        return max(float(np.max(np.abs(f))) for f in self.factors)

    def dist_to_identity_norm(self) -> float:
        return max(float(np.max(np.abs(f - _I2))) for f in self.factors)

    def det_drift(self) -> float:
        return max(abs(complex(np.linalg.det(f)) - 1.0) for f in self.factors)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return mul(self, other)


def identity(model: str) -> GroupElement:
    _check_model(model)
    if model == PRODUCT:
        return GroupElement(model, (np.eye(2), np.eye(2)))
    return GroupElement(model, (np.eye(2, dtype=complex),))


def from_factors(model: str, *factors) -> GroupElement:
    _check_model(model)
    return GroupElement(model, tuple(np.asarray(f) for f in factors))


def mul(a: GroupElement, b: GroupElement) -> GroupElement:
    if a.model != b.model:
        raise ValueError("model mismatch")
    factors = tuple(fa @ fb for fa, fb in zip(a.factors, b.factors))
    mults = a.mults + b.mults + 1
    g = GroupElement(a.model, factors, mults)
    if mults >= RENORM_EVERY:
        g = renormalize(g)
    return g


def inv(g: GroupElement) -> GroupElement:
    # Adjugate inverse; exact for det = 1 and cheap.
    out = []
    for f in g.factors:
        out.append(np.array([[f[1, 1], -f[0, 1]], [-f[1, 0], f[0, 0]]], dtype=f.dtype))
    return GroupElement(g.model, tuple(out), g.mults)


def renormalize(g: GroupElement) -> GroupElement:
    """Rescale each factor by det^(-1/2) to bound drift in long orbits."""
    factors = []
    for f in g.factors:
        d = complex(np.linalg.det(f))
        s = np.sqrt(d)
        fn = f / s
        if not np.iscomplexobj(f):
            fn = fn.real
        factors.append(fn)
    return GroupElement(g.model, tuple(factors), 0)


def group_distance(g: GroupElement) -> float:
    """Right-invariant distance surrogate d(g, e).

    The l2 norm of log singular values, summed over factors.  For 2x2
    determinant-one factors the singular values come from the Frobenius norm
    alone, no SVD needed.
    """
    total = 0.0
    for f in g.factors:
        fro2 = float(np.sum(np.abs(f) ** 2))
        det = abs(complex(np.linalg.det(f)))
        disc = max(fro2 * fro2 - 4.0 * det * det, 0.0)
        s1_sq = (fro2 + math.sqrt(disc)) / 2.0
        s1 = math.sqrt(max(s1_sq, 1e-300))
        s2 = det / s1 if s1 > 0 else 1e-300
        total += math.hypot(math.log(s1), math.log(max(s2, 1e-300)))
    return total


def h_factor(g: GroupElement, tol: float = 1e-9) -> np.ndarray:
    """The common SL2(R) matrix of an element of H; NotInChart otherwise."""
    if g.model == PRODUCT:
        f1, f2 = g.factors
        if float(np.max(np.abs(f1 - f2))) > tol * max(1.0, g.norm()):
            raise NotInChart("element is not in the diagonal subgroup H")
        return np.asarray(f1, dtype=float)
    f = g.factors[0]
    if float(np.max(np.abs(f.imag))) > tol * max(1.0, g.norm()):
        raise NotInChart("element is not in the real subgroup H")
    return f.real.copy()


def from_h(model: str, h: np.ndarray) -> GroupElement:
    """Embed an SL2(R) matrix into H < G."""
    _check_model(model)
    h = np.asarray(h, dtype=float)
    if model == PRODUCT:
        return GroupElement(model, (h.copy(), h.copy()))
    return GroupElement(model, (h.astype(complex),))


# ---------------------------------------------------------------------------
# Lie vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LieVector:
    """An element of g = h (+) r with the split stored explicitly.

    h coordinates (ha, hu, hl) give the matrix [[ha, hu], [hl, -ha]] in the
    basis Lie(A), Lie(U), Lie(U^-).  r coordinates (w11, w12, w21) give
    [[w11, w12], [w21, -w11]], placed in the first factor (product model) or
    multiplied by i (complex model).
    """

    model: str
    h: np.ndarray  # (3,) = (ha, hu, hl)
    r: np.ndarray  # (3,) = (w11, w12, w21)

    def h_matrix(self) -> np.ndarray:
        ha, hu, hl = self.h
        return np.array([[ha, hu], [hl, -ha]])

    def r_matrix(self) -> np.ndarray:
        w11, w12, w21 = self.r
        return np.array([[w11, w12], [w21, -w11]])

    def h_norm(self) -> float:
        return float(np.max(np.abs(self.h)))

    def r_norm(self) -> float:
        return float(np.max(np.abs(self.r)))

    def norm(self) -> float:
        return max(self.h_norm(), self.r_norm())

    def matrices(self) -> tuple:
        """The g-vector reassembled into per-factor matrices."""
        H = self.h_matrix()
        R = self.r_matrix()
        if self.model == PRODUCT:
            return (H + R, H.copy())
        return (H.astype(complex) + 1j * R,)


def lie_zero(model: str) -> LieVector:
    _check_model(model)
    return LieVector(model, np.zeros(3), np.zeros(3))


def r_vector(model: str, w11: float, w12: float, w21: float) -> LieVector:
    _check_model(model)
    return LieVector(model, np.zeros(3), np.array([float(w11), float(w12), float(w21)]))


def h_vector(model: str, ha: float, hu: float, hl: float) -> LieVector:
    _check_model(model)
    return LieVector(model, np.array([float(ha), float(hu), float(hl)]), np.zeros(3))


def split_matrices(model: str, mats: tuple) -> LieVector:
    """Split per-factor g-matrices back into h (+) r coordinates."""
    _check_model(model)
    if model == PRODUCT:
        m1, m2 = mats
        H = np.asarray(m2, dtype=float)
        R = np.asarray(m1, dtype=float) - H
    else:
        m = np.asarray(mats[0], dtype=complex)
        H = m.real
        R = m.imag
    h = np.array([H[0, 0], H[0, 1], H[1, 0]])
    r = np.array([R[0, 0], R[0, 1], R[1, 0]])
    return LieVector(model, h, r)


def exp_r(w: LieVector) -> GroupElement:
    """exp of a transversal vector (the h part must vanish)."""
    if w.h_norm() > 0:
        raise ValueError("exp_r expects a pure r-vector")
    R = w.r_matrix()
    if w.model == PRODUCT:
        return GroupElement(PRODUCT, (exp2(R), np.eye(2)))
    return GroupElement(COMPLEX, (exp2(1j * R.astype(complex)),))


def exp_h(model: str, v: LieVector) -> GroupElement:
    if v.r_norm() > 0:
        raise ValueError("exp_h expects a pure h-vector")
    return from_h(model, exp2(v.h_matrix()))


# ---------------------------------------------------------------------------
# One-parameter subgroups
# ---------------------------------------------------------------------------

def one_param(model: str, kind: str, t: float, s: float | None = None) -> GroupElement:
    """The elements a_t, u_r, u^-_s, v_s and n(r, s).

    a_t = diag(e^{t/2}, e^{-t/2}) embedded diagonally; u_r upper and u^-_s
    lower unipotent in H; v_s = n(0, s); n(r, s) fills the full horospherical
    group N (first factor gets r+s, second factor r in the product model;
    entry r+is in the complex model).
    """
    _check_model(model)
    if kind == "a":
        m = np.array([[math.exp(t / 2.0), 0.0], [0.0, math.exp(-t / 2.0)]])
        return from_h(model, m)
    if kind == "u":
        return from_h(model, np.array([[1.0, t], [0.0, 1.0]]))
    if kind == "u_minus":
        return from_h(model, np.array([[1.0, 0.0], [t, 1.0]]))
    if kind == "v":
        return one_param(model, "n", 0.0, t)
    if kind == "n":
        if s is None:
            raise ValueError("kind='n' requires both t=r and s")
        r_ = t
        if model == PRODUCT:
            f1 = np.array([[1.0, r_ + s], [0.0, 1.0]])
            f2 = np.array([[1.0, r_], [0.0, 1.0]])
            return GroupElement(PRODUCT, (f1, f2))
        f = np.array([[1.0, r_ + 1j * s], [0.0, 1.0]], dtype=complex)
        return GroupElement(COMPLEX, (f,))
    raise ValueError(f"unknown one-parameter kind {kind!r}")


# ---------------------------------------------------------------------------
# Adjoint action
# ---------------------------------------------------------------------------

def adjoint(g: GroupElement, w: LieVector) -> LieVector:
    """Ad(g) w = g w g^{-1}, split back into h (+) r.

    For g in H the split is preserved componentwise; for general g the
    components mix (the split is the real/imaginary or second/first-factor
    decomposition, which is always defined).
    """
    if g.model != w.model:
        raise ValueError("model mismatch")
    gi = inv(g)
    mats = tuple(f @ m @ fi for f, m, fi in zip(g.factors, w.matrices(), gi.factors))
    return split_matrices(g.model, mats)


def adjoint_r3(h_mat: np.ndarray, r_coords: np.ndarray) -> np.ndarray:
    """Vectorized Ad(h) on r-coordinate triples (w11, w12, w21), h in SL2(R).

    r_coords has shape (..., 3); h_mat is a single 2x2 real matrix.
    """
    a, b = h_mat[0, 0], h_mat[0, 1]
    c, d = h_mat[1, 0], h_mat[1, 1]
    w11, w12, w21 = r_coords[..., 0], r_coords[..., 1], r_coords[..., 2]
    # h W h^{-1} with h^{-1} = [[d, -b], [-c, a]]
    n11 = (a * d + b * c) * w11 - a * c * w12 + b * d * w21
    n12 = -2 * a * b * w11 + a * a * w12 - b * b * w21
    n21 = 2 * c * d * w11 - c * c * w12 + d * d * w21
    return np.stack([n11, n12, n21], axis=-1)


# ---------------------------------------------------------------------------
# BCH-type decomposition g = h * exp(w)
# ---------------------------------------------------------------------------

BCH_RESIDUAL = 1e-10
_NEWTON_RESIDUAL = 1e-12

# Basis of h and r as coordinate triples, used by the Newton chart.
_H_BASIS = [np.array([[1.0, 0], [0, -1.0]]), np.array([[0, 1.0], [0, 0]]),
            np.array([[0, 0], [1.0, 0]])]


def _bch_residual(g: GroupElement, h: GroupElement, w: LieVector) -> float:
    rec = mul(h, exp_r(w))
    return max(float(np.max(np.abs(a - b))) for a, b in zip(rec.factors, g.factors))


def bch_split(g: GroupElement) -> tuple[GroupElement, LieVector]:
    """Split g = h * exp(w) with h in H and w in r.

    Valid in the local chart near the identity (norm(g - I) <= 0.1).  In the
    product model the split is closed form: h is the second factor and
    w = log(h^{-1} * first factor).  In the complex model a damped Newton
    iteration on the 6-dimensional chart (h, w) -> h exp(w) is used, with the
    linear split of log(g) as the initial guess.

    Raises NoConvergence if no split with reconstruction residual <= 1e-10
    is found.
    """
    if g.model == PRODUCT:
        h0 = np.asarray(g.factors[1], dtype=float)
        try:
            W = log2(np.linalg.solve(h0, g.factors[0]))
        except (NotInChart, np.linalg.LinAlgError) as exc:
            raise NoConvergence(f"closed-form split failed: {exc}") from exc
        h = from_h(PRODUCT, h0)
        w = LieVector(PRODUCT, np.zeros(3), np.array([W[0, 0], W[0, 1], W[1, 0]]))
        if _bch_residual(g, h, w) > BCH_RESIDUAL * max(1.0, g.norm()):
            raise NoConvergence("closed-form split residual too large")
        return h, w
    return _bch_split_complex(g)


def _bch_split_complex(g: GroupElement) -> tuple[GroupElement, LieVector]:
    M = g.factors[0]
    try:
        X = log2(M)
    except NotInChart as exc:
        raise NoConvergence(f"no initial guess: {exc}") from exc
    p = np.array([X.real[0, 0], X.real[0, 1], X.real[1, 0]])
    wv = np.array([X.imag[0, 0], X.imag[0, 1], X.imag[1, 0]])

    def assemble(p, wv):
        Hm = p[0] * _H_BASIS[0] + p[1] * _H_BASIS[1] + p[2] * _H_BASIS[2]
        Rm = wv[0] * _H_BASIS[0] + wv[1] * _H_BASIS[1] + wv[2] * _H_BASIS[2]
        return Hm, 1j * Rm.astype(complex)

    def residual(p, wv):
        Hm, Rc = assemble(p, wv)
        R = exp2(Hm).astype(complex) @ exp2(Rc) - M
        return np.concatenate([R.real.ravel(), R.imag.ravel()])

    res = residual(p, wv)
    for _ in range(50):
        if float(np.max(np.abs(res))) <= _NEWTON_RESIDUAL:
            break
        Hm, Rc = assemble(p, wv)
        Eh = exp2(Hm).astype(complex)
        Er = exp2(Rc)
        cols = []
        for j in range(3):
            D = _dexp(Hm, _H_BASIS[j]).astype(complex) @ Er
            cols.append(np.concatenate([D.real.ravel(), D.imag.ravel()]))
        for j in range(3):
            D = Eh @ _dexp(Rc, 1j * _H_BASIS[j].astype(complex))
            cols.append(np.concatenate([D.real.ravel(), D.imag.ravel()]))
        J = np.stack(cols, axis=1)
        step, *_ = np.linalg.lstsq(J, -res, rcond=None)
        # Backtracking keeps the iteration inside the chart.
        scale = 1.0
        for _ in range(30):
            p_new = p + scale * step[:3]
            w_new = wv + scale * step[3:]
            res_new = residual(p_new, w_new)
            if np.linalg.norm(res_new) < np.linalg.norm(res):
                p, wv, res = p_new, w_new, res_new
                break
            scale /= 2.0
        else:
            raise NoConvergence("Newton line search stalled")
    if float(np.max(np.abs(res))) > _NEWTON_RESIDUAL:
        raise NoConvergence("Newton residual above 1e-12 after 50 steps")
    h = exp_h(COMPLEX, h_vector(COMPLEX, p[0], p[1], p[2]))
    w = r_vector(COMPLEX, wv[0], wv[1], wv[2])
    return h, w


# ---------------------------------------------------------------------------
# Projection families xi_r and zeta_r
# ---------------------------------------------------------------------------

def xi_project(r: float, w: LieVector) -> float:
    """Quadratic projection xi_r(w) = (Ad(u_r) w)_{12} on the r part."""
    w11, w12, w21 = w.r
    return float(-w21 * r * r - 2.0 * w11 * r + w12)


def xi_values(r: float, coords: np.ndarray) -> np.ndarray:
    """xi_r on an (..., 3) array of r-coordinates."""
    return -coords[..., 2] * r * r - 2.0 * coords[..., 0] * r + coords[..., 1]


ZETA_DENOM_MIN = 1e-6


def zeta_project(r: float, w: LieVector) -> float:
    """Nonlinear projection: the unipotent coordinate of u_r f(w) u_{-r}.

    f is the rational chart f(w) = [[1+w11, w12], [w21, (1+w12 w21)/(1+w11)]]
    and the factorization is (lower triangular) * (1 zeta; 0 1).  The value
    equals xi_r(w) to first order in w.

    Raises ChartSingular when |1 + w11 + w21 r| < 1e-6 (or 1 + w11 ~ 0).
    """
    return float(zeta_values(r, w.r[None, :])[0])


def zeta_values(r: float, coords: np.ndarray) -> np.ndarray:
    """zeta_r on an (..., 3) array of r-coordinates."""
    w11, w12, w21 = coords[..., 0], coords[..., 1], coords[..., 2]
    base = 1.0 + w11
    if np.any(np.abs(base) < ZETA_DENOM_MIN):
        raise ChartSingular("1 + w11 too small for the rational chart")
    denom = base + w21 * r
    if np.any(np.abs(denom) < ZETA_DENOM_MIN):
        raise ChartSingular("1 + w11 + w21 r too small")
    num = w12 + (w12 * w21 - 2.0 * w11 - w11 * w11) / base * r - w21 * r * r
    return num / denom


# ---------------------------------------------------------------------------
# prd coordinates and boxes
# ---------------------------------------------------------------------------

def prd(s: float, tau: float, r: float) -> np.ndarray:
    """prd(s, tau, r) = u^-_s a_tau u_r as a 2x2 matrix."""
    e = math.exp(tau / 2.0)
    return np.array([[e, e * r], [s * e, s * e * r + 1.0 / e]])


def prd_coords(h: np.ndarray) -> tuple[float, float, float]:
    """Unique (s, tau, r) with h = u^-_s a_tau u_r; NotInChart if none."""
    h11 = float(h[0, 0])
    if h11 <= 1e-12:
        raise NotInChart("prd chart requires a positive (1,1) entry")
    tau = 2.0 * math.log(h11)
    r = float(h[0, 1]) / h11
    s = float(h[1, 0]) / h11
    return s, tau, r


@dataclass(frozen=True)
class BoxSpec:
    """A coordinate box in H (or G for kind='BG').

    kinds and coordinate ranges, in prd coordinates (s, tau, r):
      BH(beta):        |s|,|tau|,|r| <= beta
      BsH(beta):       |s|,|tau| <= beta, r = 0
      E(beta, eta):    |s|,|tau| <= beta, |r| <= eta
      QH(eta,beta,m):  |s| <= beta e^{-m}, |tau| <= beta, |r| <= eta
      Et(beta, tau):   |s| <= beta, |tau' - tau| <= beta, r in [0, 1]
      BG(beta):        bch factor h in BH(beta) and ||w|| <= beta
    """

    kind: str
    beta: float
    eta: float = 0.0
    m: float = 0.0
    tau: float = 0.0

    def intervals(self) -> tuple[tuple[float, float], ...]:
        b = self.beta
        if self.kind == "BH":
            return ((-b, b), (-b, b), (-b, b))
        if self.kind == "BsH":
            return ((-b, b), (-b, b), (0.0, 0.0))
        if self.kind == "E":
            return ((-b, b), (-b, b), (-self.eta, self.eta))
        if self.kind == "QH":
            s = b * math.exp(-self.m)
            return ((-s, s), (-b, b), (-self.eta, self.eta))
        if self.kind == "Et":
            return ((-b, b), (self.tau - b, self.tau + b), (0.0, 1.0))
        if self.kind == "BG":
            return ((-b, b), (-b, b), (-b, b))
        raise ValueError(f"unknown box kind {self.kind!r}")

    def eta_scale(self) -> float:
        """The eta used for the boundary convention (sqrt(beta) when absent)."""
        if self.kind in ("E", "QH") and self.eta > 0:
            return self.eta
        return math.sqrt(self.beta)


@dataclass(frozen=True)
class BoxMembership:
    contains: bool
    s: float
    tau: float
    r: float
    on_boundary: bool


_COORD_TOL = 1e-12


def box_contains(spec: BoxSpec, g: GroupElement,
                 boundary_frac: float | None = None) -> BoxMembership:
    """Membership of g in the box, with prd coordinates and boundary flag.

    The boundary set shrinks each coordinate interval I by
    boundary_frac * |I| at both ends (default 100 * eta, the del_{100 eta |I|}
    convention); a member lying in the shaved region is flagged on_boundary.

    Raises NotInChart when g has no prd coordinates (or, for kind='BG', no
    bch split).
    """
    if spec.kind == "BG":
        h, w = bch_split(g)
        inner = box_contains(BoxSpec("BH", spec.beta), h, boundary_frac)
        ok = inner.contains and w.norm() <= spec.beta + _COORD_TOL
        return BoxMembership(ok, inner.s, inner.tau, inner.r, inner.on_boundary)
    hm = h_factor(g)
    s, tau, r = prd_coords(hm)
    coords = (s, tau, r)
    if boundary_frac is None:
        boundary_frac = 100.0 * spec.eta_scale()
    contains = True
    on_boundary = False
    for value, (lo, hi) in zip(coords, spec.intervals()):
        width = hi - lo
        tol = _COORD_TOL * max(1.0, abs(lo), abs(hi))
        if value < lo - tol or value > hi + tol:
            contains = False
            continue
        if width <= 2 * tol:
            on_boundary = True
            continue
        shave = boundary_frac * width
        if value < lo + shave or value > hi - shave:
            on_boundary = True
    return BoxMembership(contains, s, tau, r, on_boundary and contains)


def random_box_element(model: str, spec: BoxSpec, rng: np.random.Generator) -> GroupElement:
    """Uniform (in prd coordinates) sample from a box in H."""
    vals = []
    for lo, hi in spec.intervals():
        vals.append(float(rng.uniform(lo, hi)) if hi > lo else lo)
    s, tau, r = vals
    return from_h(model, prd(s, tau, r))

