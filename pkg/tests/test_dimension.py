import itertools
import math

import numpy as np
import pytest

from unipotent_lab import algebra as al, dimension as dm, quotient as qt
from unipotent_lab.errors import CannotRegularize, InjectivityViolation
from unipotent_lab.rng import stream

ETA = 0.002
BETA = ETA * ETA


def brute_energy(pts, R, alpha, b0, i):
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


def test_energy_small_cloud_branch():
    cl = dm.PointCloud(np.array([[0.1, 0, 0], [0, 0.1, 0]]), 0.5, 4, 1, 3)
    assert dm.energy(cl, 2, 0.7, 0) == 0.5 ** (-0.7)


def test_energy_two_term_example():
    d = 0.1
    cl = dm.PointCloud(np.array([[0, 0, 0], [0, d, 0], [0, 2 * d, 0]]),
                       0.5, 4, 1, 3)
    got = dm.energy(cl, 0, 0.7, 0)
    assert abs(got - d ** (-0.7) * (1 + 2.0 ** (-0.7))) < 1e-12


def test_energy_exhaustive_oracle():
    gen = stream(30, "energy")
    for _ in range(25):
        n = int(gen.integers(3, 12))
        pts = gen.uniform(-0.4, 0.4, (n, 3))
        cl = dm.PointCloud(pts, 0.5, 4, 1, 3)
        for R in (0, 1, 3):
            i = int(gen.integers(0, n))
            assert abs(dm.energy(cl, R, 0.7, i)
                       - brute_energy(pts, R, 0.7, 0.5, i)) < 1e-9


def test_energy_monotone_in_R_and_refinement():
    gen = stream(31, "energy-mono")
    pts = gen.uniform(-0.4, 0.4, (20, 3))
    cl = dm.PointCloud(pts, 0.5, 4, 1, 3)
    es = [dm.energy(cl, R, 0.7, 0) for R in range(5)]
    assert all(es[i + 1] <= es[i] + 1e-12 for i in range(4))
    bigger = dm.PointCloud(np.vstack([pts, [[0.05, 0.02, -0.3]]]), 0.5, 4, 1, 3)
    for R in (0, 2):
        assert dm.energy(bigger, R, 0.7, 0) >= dm.energy(cl, R, 0.7, 0) - 1e-12


def test_pointcloud_rejects_duplicates():
    with pytest.raises(ValueError):
        dm.PointCloud(np.array([[0.1, 0, 0], [0.1, 0, 0]]), 0.5, 4, 1, 3)


def test_pointcloud_json_roundtrip():
    gen = stream(32, "json")
    cl = dm.PointCloud(gen.uniform(-0.4, 0.4, (10, 3)), 0.5, 4, 1, 3)
    back = dm.PointCloud.from_json(cl.to_json())
    assert np.allclose(back.points, cl.points)
    assert (back.b0, back.M, back.k0, back.k1) == (0.5, 4, 1, 3)


def _uniform_grid_cloud(n=16, scale=0.9):
    g = (np.arange(n) + 0.5) / n * scale - scale / 2
    pts = np.stack(np.meshgrid(g, g, [0.0]), axis=-1).reshape(-1, 3)
    return dm.PointCloud(pts, 0.5, 4, 1, 2)


def test_regularize_uniform_grid_single_part():
    cl = _uniform_grid_cloud()
    res = dm.regularize(cl, M=4, k0=1, k1=2, beta=0.01)
    assert len(res.parts) == 1
    assert len(res.discard) == 0
    assert dm.verify_band(res.parts[0])
    # tau table equals the exact dyadic log of the uniform counts
    part = res.parts[0]
    for k in range(part.cloud.k0, part.cloud.k1 + 1):
        counts = set(part.cloud.cube_counts(k).values())
        tau = part.tau[k]
        assert all(2 ** (4 * (tau - 2)) <= c <= 2 ** (4 * tau) for c in counts)


def test_regularize_two_separated_grids():
    g = (np.arange(16) + 0.5) / 16 * 0.9 - 0.45
    G = np.stack(np.meshgrid(g, g, [0.0]), axis=-1).reshape(-1, 3)
    pts = np.concatenate([G * 0.08 + np.array([0.3, 0.3, 0]),
                          G * 0.08 - np.array([0.3, 0.3, 0])])
    cl = dm.PointCloud(pts, 0.5, 4, 1, 2)
    res = dm.regularize(cl, M=4, k0=1, k1=2, beta=0.01)
    assert 1 <= len(res.parts) <= 2
    assert all(dm.verify_band(p) for p in res.parts)


def test_regularize_postconditions_replayed():
    from unipotent_lab.harness import fractal_cloud
    for idx in range(4):
        cl = fractal_cloud(40, idx)
        res = dm.regularize(cl, M=5, k0=1, k1=3, beta=0.01)
        assert all(dm.verify_band(p) for p in res.parts)
        assert len(res.discard) <= 0.01 ** 0.25 * len(cl)
        assert all(len(p.cloud) >= 0.01 ** 2 * len(cl) for p in res.parts)
        total = sum(len(p.cloud) for p in res.parts) + len(res.discard)
        assert total == len(cl)


def _planted_cone(extra=None, masses=None):
    y = qt.identity_coset()
    rows = [np.zeros(3)]
    if extra is not None:
        rows += list(extra)
    F = dm.PointCloud(np.array(rows), BETA, 4, 1, 3)
    return dm.cone_build(y, F, BETA, ETA, weights=masses)


def test_cone_build_uniform_certificate():
    cone = _planted_cone([np.array([1e-6, -2e-6, 3e-6])])
    assert cone.aa == 1.0
    assert abs(cone.masses.sum() - 1.0) < 1e-12


def test_cone_build_eta_convention_enforced():
    y = qt.identity_coset()
    F = dm.PointCloud(np.zeros((1, 3)), BETA, 4, 1, 3)
    with pytest.raises(ValueError):
        dm.cone_build(y, F, BETA, ETA * 1.1)


def test_cone_build_injectivity_violation():
    x = qt.from_group(al.one_param(al.PRODUCT, "a", 14.0))
    assert x.inj < 2 * ETA
    F = dm.PointCloud(np.zeros((1, 3)), BETA, 4, 1, 3)
    with pytest.raises(InjectivityViolation):
        dm.cone_build(x, F, BETA, ETA)


def test_transversal_set_single_sheet():
    cone = _planted_cone()
    I = dm.transversal_set(cone, al.identity(al.PRODUCT),
                           dm.sheet_center(cone, 0), 0.05)
    assert len(I) == 1 and I[0].r_norm() < 1e-13


def test_transversal_set_two_sheets():
    w0 = np.array([0.8e-6, -1.2e-6, 0.9e-6])
    cone = _planted_cone([w0])
    I = dm.transversal_set(cone, al.identity(al.PRODUCT),
                           dm.sheet_center(cone, 0), 0.1)
    norms = sorted(v.r_norm() for v in I)
    assert len(I) == 2
    assert norms[1] <= 2.0 * float(np.max(np.abs(w0)))
    assert norms[1] >= 0.5 * float(np.max(np.abs(w0)))


def test_transversal_counts_sandwich():
    # #(F cap B(w_z, d/2)) <= #(I cap B(0, d)) <= #(F cap B(w_z, 2d))
    gen = stream(33, "sandwich")
    for trial in range(20):
        n = int(gen.integers(4, 12))
        F = gen.uniform(-BETA * 0.9, BETA * 0.9, (n, 3))
        F[0] = 0.0
        cone = _planted_cone(F[1:])
        z = dm.sheet_center(cone, 0)
        hz = z.realize(cone)
        delta = 0.05 * hz.inj
        I = dm.transversal_set(cone, al.identity(al.PRODUCT), z, 0.1)
        inorm = np.array([v.r_norm() for v in I])
        fdist = np.max(np.abs(cone.F.points - cone.F.points[0]), axis=1)
        lo = int(np.sum(fdist <= delta / 2))
        hi = int(np.sum(fdist <= 2 * delta))
        mid = int(np.sum(inorm <= delta))
        assert lo <= mid <= hi


def test_margulis_fpsi_floor_branch():
    cone = _planted_cone()
    f, psi = dm.margulis_fpsi(cone, al.identity(al.PRODUCT),
                              dm.sheet_center(cone, 0), 0.05, 3, 1 / 3)
    hz = dm.sheet_center(cone, 0).realize(cone)
    floor = (0.05 * hz.inj) ** (-1 / 3)
    assert abs(f - floor) < 1e-9 and abs(psi - floor) < 1e-9


def test_margulis_fpsi_brute_force():
    extra = [np.array([0.9e-6, -0.4e-6, 0.7e-6]),
             np.array([-1.1e-6, 0.8e-6, -0.2e-6])]
    cone = _planted_cone(extra)
    z = dm.sheet_center(cone, 0)
    I = dm.transversal_set(cone, al.identity(al.PRODUCT), z, 0.1)
    f, psi = dm.margulis_fpsi(cone, al.identity(al.PRODUCT), z, 0.1, 1, 1 / 3)
    norms = sorted(v.r_norm() for v in I if v.r_norm() > 1e-13)
    brute = min(sum(x ** (-1 / 3) for x in kept)
                for kept in itertools.combinations(norms, len(norms) - 1))
    assert abs(f - brute) < 1e-9 * brute


def test_psi_scaling_in_b():
    extra = [np.array([0.9e-6, -0.4e-6, 0.7e-6])]
    cone = _planted_cone(extra)
    z = dm.sheet_center(cone, 0)
    _, psi1 = dm.margulis_fpsi(cone, al.identity(al.PRODUCT), z, 0.04, 1, 1 / 3)
    _, psi2 = dm.margulis_fpsi(cone, al.identity(al.PRODUCT), z, 0.08, 1, 1 / 3)
    # count is b-stable here, so psi scales exactly by 2^(-alpha)
    assert abs(psi2 / psi1 - 2.0 ** (-1 / 3)) < 1e-9


def test_rfrak_invariance_comparison():
    # 4 psi_{2b}(e, exp(w)y) >= psi_b(e, h exp(w) y)
    gen = stream(34, "rfrak")
    for trial in range(10):
        n = int(gen.integers(3, 10))
        F = gen.uniform(-BETA * 0.9, BETA * 0.9, (n, 3))
        F[0] = 0.0
        cone = _planted_cone(F[1:])
        h_box = al.from_h(al.PRODUCT, al.prd(
            float(gen.uniform(-BETA / 2, BETA / 2)),
            float(gen.uniform(-BETA / 2, BETA / 2)),
            float(gen.uniform(-ETA / 2, ETA / 2))))
        b = 0.04
        z_moved = dm.ConePoint(0, h_box)
        _, psi_moved = dm.margulis_fpsi(cone, al.identity(al.PRODUCT),
                                        z_moved, b, 1, 1 / 3)
        _, psi_base2b = dm.margulis_fpsi(cone, al.identity(al.PRODUCT),
                                         dm.sheet_center(cone, 0), 2 * b, 1,
                                         1 / 3)
        assert 4.0 * psi_base2b >= psi_moved - 1e-9


def test_regular_band_psi_sandwich():
    # band-regular F: psi at interior points within C_M = 2^(6M+6) of the sup
    M = 2
    C_M = 2.0 ** (6 * M + 6)
    grid = (np.arange(8) + 0.5) / 8 * 1.6 * BETA - 0.8 * BETA
    F = np.stack(np.meshgrid(grid, grid, [0.0]), axis=-1).reshape(-1, 3)
    F[np.argmin(np.max(np.abs(F), axis=1))] = 0.0
    cone = _planted_cone([f for f in F if np.max(np.abs(f)) > 1e-13])
    b = 0.05
    psis = []
    for i in range(len(cone.F)):
        _, psi = dm.margulis_fpsi(cone, al.identity(al.PRODUCT),
                                  dm.sheet_center(cone, i), b, 1, 1 / 3)
        psis.append(psi)
    sup = max(psis)
    for p in psis:
        assert sup / C_M <= p <= C_M * sup


def test_localized_energy_bound_from_cone_bound():
    # eng_{F_w,R} <= (2 + 6 (4m)^4) Upsilon with Upsilon = sup f
    gen = stream(35, "local-eng")
    n = 10
    F = gen.uniform(-BETA * 0.9, BETA * 0.9, (n, 3))
    F[0] = 0.0
    cone = _planted_cone(F[1:])
    b = 0.05
    alpha = 1 / 3
    R = 1
    ups = max(dm.margulis_fpsi(cone, al.identity(al.PRODUCT),
                               dm.sheet_center(cone, i), b, R, alpha)[0]
              for i in range(n))
    m = 1
    y_inj = qt.identity_coset().inj
    for i in range(n):
        w = cone.F.points[i]
        mask = np.max(np.abs(cone.F.points - w), axis=1) <= m * b * y_inj
        sub = cone.F.points[mask]
        j = int(np.nonzero(mask)[0].tolist().index(i))
        e = dm.energy_set(sub, R, alpha, m * b * y_inj, j)
        assert e <= (2 + 6 * (4 * m) ** 4) * ups * (1 + 1e-9)


def test_dimension_step_single_sheet_floor():
    cone = _planted_cone()
    ell = 2 * abs(math.log(BETA)) + 0.1
    rep = dm.dimension_step(cone, ell, 0.5, 0.05, 1, 0.9, N=4, seed=2)
    assert all(len(o.F) == 1 for o in rep.offspring)
    assert abs(rep.sup_f_after - rep.sup_psi_after) < 1e-9


def test_dimension_step_regime_enforced():
    cone = _planted_cone()
    with pytest.raises(ValueError):
        dm.dimension_step(cone, 1.0, 0.5, 0.05, 1, 0.9, N=4, seed=2)


def test_dimension_step_chunk_band():
    # offspring sheet-count chunking obeys the configured band
    gen = stream(36, "chunk")
    n = 64
    F = gen.uniform(-BETA * 0.9, BETA * 0.9, (n, 3))
    F[0] = 0.0
    cone = _planted_cone(F[1:])
    ell = 2 * abs(math.log(BETA)) + 0.1
    lo, hi = 4 / n, 16 / n
    for trial in range(10):
        rep = dm.dimension_step(cone, ell, float(gen.random()), 0.05, 1, 0.9,
                                N=16, seed=trial, chunk_lo=lo, chunk_hi=hi)
        for c in rep.piece_sheet_counts:
            assert 0.5 * lo * n <= c <= hi * n + 1


def test_dimension_step_collinear_energy_decreases():
    direc = np.array([0.5, -0.8, 1.0])
    direc /= np.max(np.abs(direc))
    s = (np.arange(32) + 1.0) / 32 * BETA * 0.9
    F = dm.PointCloud(s[:, None] * direc[None, :], BETA, 4, 1, 3)
    cone = dm.cone_build(qt.identity_coset(), F, BETA, ETA)
    ell = 2 * abs(math.log(BETA)) + 0.1
    dec = 0
    for k, r in enumerate(np.linspace(0.05, 0.95, 10)):
        rep = dm.dimension_step(cone, ell, float(r), 0.05, 1, 0.9, N=8,
                                seed=50 + k)
        if (not math.isnan(rep.energy_sup_after)
                and rep.energy_sup_after < rep.energy_sup_before):
            dec += 1
    assert dec >= 8


def test_regularize_adversarial_alignment_raises():
    # M = 1 makes the boundary bands half of every axis: no shift can keep
    # the discard within budget, signalling adversarial alignment
    gen = stream(37, "adversarial")
    cl = dm.PointCloud(gen.uniform(-0.45, 0.45, (512, 3)), 0.5, 1, 1, 6)
    with pytest.raises(CannotRegularize):
        dm.regularize(cl, M=1, k0=1, k1=6, beta=0.01)
