"""Computable diagnostics from the closing lemma.

For each r on a grid the scan checks, at x2 = a_{8t} u_r x1:
  (a) inj(x2) >= beta^(1/2);
  (b) injectivity of h -> h x2 on the box E_t = B^{s,H}_beta a_t U_[0,1]
      (detected through short lattice elements, budget-limited);
  (c) f_t(z) <= e^{D t} at a fixed sample of z on E_t . x2, where
      f_t sums ||w||^-alpha over the nonzero transversal self-returns of the
      translated box.

In the product model the self-return set is closed form: a candidate lattice
pair (gamma_1, gamma_2) returns with box part pinned by the second factor,

    h' = h_z c2^{-1},   exp(w) = h_z c2^{-1} c1 h_z^{-1},   c_i = g_i gamma_i g_i^{-1},

so one gamma sweep serves both (b) and (c).  When the good fraction is low
the scan searches the periodic catalog and short stabilizer candidates and
reports the best (orbit, distance) found.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np

from . import algebra, quotient
from .algebra import PRODUCT, BoxSpec
from .errors import BudgetExceeded, NotInChart
from .quotient import CosetPoint, PeriodicOrbit

F_T_ALPHA = 1.0 / 3.0


@dataclass
class ClosingScanReport:
    r_grid: list
    inj_ok: list
    injective_on_Et: list
    f_t_value: list
    good: list
    good_fraction: float
    detected_orbit: PeriodicOrbit | None
    detected_distance: float | None
    stabilizer_candidates: int
    zariski_dense_candidates: bool
    meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        d = dict(self.__dict__)
        d["detected_orbit"] = (self.detected_orbit.to_json_dict()
                               if self.detected_orbit else None)
        return json.dumps(d)


def _self_returns(x2: CosetPoint, t: float, beta: float,
                  search_norm: float) -> tuple[list, int, list]:
    """Transversal self-returns of E_t . x2 at the sampled box elements.

    Returns (per-z lists of nonzero return norms, number of injectivity
    violations found, stabilizer candidates in H).
    """
    g1 = np.asarray(x2.rep.factors[0], float)
    g2 = np.asarray(x2.rep.factors[1], float)
    gammas = quotient.sl2z_ball(int(search_norm)).astype(float)
    if len(gammas) ** 2 > quotient.ENUM_BUDGET:
        raise BudgetExceeded("closing-scan gamma sweep")
    g1i = np.linalg.inv(g1)
    g2i = np.linalg.inv(g2)
    c1_all = np.einsum("ij,njk,kl->nil", g1, gammas, g1i)
    # candidate gamma_2 by rounding the H-matching closure
    T = np.einsum("ij,njk,kl->nil", g2i, c1_all, g2)
    gam2 = np.floor(T + 0.5)
    dets = gam2[:, 0, 0] * gam2[:, 1, 1] - gam2[:, 0, 1] * gam2[:, 1, 0]
    ok = np.abs(dets - 1.0) < 0.5
    c2_all = np.einsum("ij,njk,kl->nil", g2, gam2, g2i)

    box = BoxSpec("Et", beta, tau=t)
    stab_h = []
    # Stabilizer candidates: conjugated pairs that agree (lie in H).
    agree = np.max(np.abs(c1_all - c2_all), axis=(1, 2)) < 1e-8
    for i in np.nonzero(ok & agree)[0]:
        if np.max(np.abs(c1_all[i] - np.eye(2))) > 1e-8:
            stab_h.append(c1_all[i])

    per_z_norms = []
    inj_viol = 0
    n_z = 5
    z_boxes = [algebra.prd(0.0, t, r_) for r_ in (np.arange(n_z) + 0.5) / n_z]
    for hz in z_boxes:
        hzi = np.linalg.inv(hz)
        norms = []
        z_inj = quotient.from_group(algebra.from_factors(
            PRODUCT, hz @ g1, hz @ g2)).inj
        for i in np.nonzero(ok)[0]:
            # h' = h_z c2^{-1}; exp(w) = h_z c2^{-1} c1 h_z^{-1}
            c2 = c2_all[i]
            c2i = np.array([[c2[1, 1], -c2[0, 1]], [-c2[1, 0], c2[0, 0]]])
            hp = hz @ c2i
            M = hp @ c1_all[i] @ hzi
            if float(np.max(np.abs(M - np.eye(2)))) > 0.8:
                continue
            try:
                memb = algebra.box_contains(box, algebra.from_h(PRODUCT, hp))
            except NotInChart:
                continue
            if not memb.contains:
                continue
            try:
                W = algebra.log2(M)
            except NotInChart:
                continue
            nrm = float(np.max(np.abs([W[0, 0], W[0, 1], W[1, 0]])))
            if nrm < 1e-10:
                if float(np.max(np.abs(hp - hz))) > 1e-8:
                    inj_viol += 1
                continue
            if nrm < z_inj:
                norms.append(nrm)
        per_z_norms.append(sorted(set(np.round(np.array(norms), 12))))
    return per_z_norms, inj_viol, stab_h


def closing_scan(x1: CosetPoint, t: float, D: float, beta: float,
                 r_count: int, search_norm: float,
                 catalog_height: int = 5,
                 good_fraction_threshold: float | None = None) -> ClosingScanReport:
    """Closing-lemma diagnostic scan along {a_{8t} u_r x1 : r on grid}.

    t is capped small (lattice enumeration at e^{O(t)}); the scan reports raw
    quantities and the configured thresholds.  When the good fraction falls
    below 1 - c beta^(1/4) (c = 5 by default) a nearby-periodic search over
    the catalog runs and the best (orbit, distance) is reported.
    """
    if t > 6:
        raise ValueError("t <= 6 required (enumeration feasibility)")
    thr = math.sqrt(beta)
    f_cap = math.exp(D * t)
    rs = (np.arange(r_count) + 0.5) / r_count
    inj_ok, injective, fvals, good = [], [], [], []
    stab_count = 0
    zariski = False
    for r in rs:
        x2 = quotient.from_group(algebra.mul(algebra.mul(
            algebra.one_param(PRODUCT, "a", 8.0 * t),
            algebra.one_param(PRODUCT, "u", float(r))), x1.rep))
        a_ok = x2.inj >= thr
        per_z, inj_viol, stab = _self_returns(x2, t, beta, search_norm)
        b_ok = inj_viol == 0
        f_t = max((sum(n ** (-F_T_ALPHA) for n in norms) if norms
                   else x2.inj ** (-F_T_ALPHA)) for norms in per_z)
        c_ok = f_t <= f_cap
        inj_ok.append(bool(a_ok))
        injective.append(bool(b_ok))
        fvals.append(float(f_t))
        good.append(bool(a_ok and b_ok and c_ok))
        stab_count += len(stab)
        if len(stab) >= 2:
            # Two non-commuting short stabilizer candidates: the algebraic
            # branch of the dichotomy (no Zariski-density certificate).
            A, B = stab[0], stab[1]
            if float(np.max(np.abs(A @ B - B @ A))) > 1e-8:
                zariski = True
    frac = float(np.mean(good)) if r_count else 0.0
    if good_fraction_threshold is None:
        good_fraction_threshold = 1.0 - 5.0 * beta ** 0.25
    detected, dist = None, None
    if frac < good_fraction_threshold:
        best = math.inf
        for Y in quotient.periodic_catalog(catalog_height):
            d = quotient.dist_to_orbit(x1, Y, max(search_norm, 6.0))
            if d < best:
                best, detected = d, Y
        dist = best if detected is not None else None
    return ClosingScanReport(
        r_grid=[float(r) for r in rs], inj_ok=inj_ok,
        injective_on_Et=injective, f_t_value=fvals, good=good,
        good_fraction=frac, detected_orbit=detected, detected_distance=dist,
        stabilizer_candidates=stab_count, zariski_dense_candidates=zariski,
        meta={"t": t, "D": D, "beta": beta, "search_norm": search_norm,
              "threshold": good_fraction_threshold})
