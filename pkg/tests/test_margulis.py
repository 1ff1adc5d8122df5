import math

import numpy as np

from unipotent_lab import algebra as al, margulis as mg, quotient as qt
from unipotent_lab.rng import stream


def test_sigma_e12_exact():
    w = al.r_vector(al.PRODUCT, 0, 1, 0)
    for d in (2.0, 6.0, 10.0):
        res = mg.sigma_contraction(w, d)
        assert abs(res.value - math.exp(-d / 3.0)) <= 1e-6
        assert res.quad_error <= 1e-5


def test_sigma_homogeneity():
    w = al.r_vector(al.PRODUCT, 0.3, -0.7, 0.45)
    v1 = mg.sigma_contraction(w, 6.0).value
    v2 = mg.sigma_contraction(al.r_vector(al.PRODUCT, 0.6, -1.4, 0.9), 6.0).value
    assert abs(v2 - 2.0 ** (-1 / 3.0) * v1) < 1e-8


def test_sigma_e21_oracle():
    w = al.r_vector(al.PRODUCT, 0, 0, 1)
    res = mg.sigma_contraction(w, 6.0)
    rs = np.linspace(-1, 2, 400001)[:-1] + 7.5e-6 / 2
    oracle = float(np.mean(mg.ad_norm_values(6.0, w, rs) ** (-1 / 3.0)))
    assert abs(res.value - oracle) < 1e-5
    assert res.value <= 10.0 * math.exp(-2.0)


def test_sigma_ratio_over_doubling():
    gen = stream(50, "ratio")
    for _ in range(50):
        v = gen.normal(size=3)
        v /= np.max(np.abs(v))
        w = al.r_vector(al.PRODUCT, *v)
        r = mg.sigma_contraction(w, 8.0).value / mg.sigma_contraction(w, 4.0).value
        assert r <= math.exp(-4.0 / 3.0) * 1.2


def test_sigma_uniform_constant():
    gen = stream(51, "uniform")
    worst = 0.0
    for d in (2.0, 6.0, 10.0):
        for _ in range(60):
            v = gen.normal(size=3)
            v /= np.max(np.abs(v))
            val = mg.sigma_contraction(al.r_vector(al.PRODUCT, *v), d).value
            worst = max(worst, math.exp(d / 3.0) * val)
    assert worst <= 10.0


def test_f_Y_far_floor():
    Y = qt.periodic_catalog(1)[0]
    x = qt.haar_sample(123)
    if qt.dist_to_orbit(x, Y) > x.inj:
        assert abs(mg.f_Y_eval(x, Y) - x.inj ** (-1 / 3.0)) < 1e-12
    assert qt.INJ_CAP ** (-1 / 3.0) < 4.65


def test_f_Y_planted():
    Y = qt.periodic_catalog(1)[0]
    w0 = al.r_vector(al.PRODUCT, 4e-4, -6e-4, 1e-3)
    x = qt.from_group(al.exp_r(w0))
    assert mg.f_Y_eval(x, Y) >= 10.0


def test_f_Y_gamma_invariant():
    Y = qt.periodic_catalog(2)[1]
    w0 = al.r_vector(al.PRODUCT, 2e-4, 3e-4, -1e-4)
    g = al.mul(al.exp_r(w0), al.from_factors(
        al.PRODUCT, np.array(Y.q_hat()), np.eye(2)))
    gam = al.from_factors(al.PRODUCT, [[2, 1], [1, 1]], [[1, -3], [0, 1]])
    a = mg.f_Y_eval(qt.from_group(g), Y)
    b = mg.f_Y_eval(qt.from_group(al.mul(g, gam)), Y)
    assert abs(a - b) < 1e-6 * max(a, 1.0)


def test_f_Y_vs_inverse_distance_band():
    # psi(x) << f_Y << vol_proxy psi(x) with fitted constants
    Y = qt.periodic_catalog(1)[0]
    gen = stream(52, "band")
    ratios = []
    for _ in range(20):
        w0 = al.r_vector(al.PRODUCT, *(gen.uniform(0.2, 1.0, 3)
                                       * 10.0 ** -gen.integers(3, 6)))
        x = qt.from_group(al.exp_r(w0))
        psi = max(qt.dist_to_orbit(x, Y) ** (-1 / 3.0),
                  x.inj ** (-1 / 3.0))
        ratios.append(mg.f_Y_eval(x, Y) / psi)
    assert max(ratios) / min(ratios) < 50.0  # a single uniform fit exists


def test_contraction_sweep_halving():
    Y = qt.periodic_catalog(1)[0]
    w0 = al.r_vector(al.PRODUCT, 4e-7, -6e-7, 1e-6)
    x = qt.from_group(al.exp_r(w0))
    f0 = mg.f_Y_eval(x, Y)
    sweep = mg.contraction_sweep(x, Y, 6.0, 4, 100, 5)
    floor = 1.05 * qt.INJ_CAP ** (-1 / 3.0)
    means = [f0] + [s["mean_f"] for s in sweep]
    for a, b in zip(means[:-1], means[1:]):
        assert b <= 0.5 * a or b <= floor


def test_contraction_sweep_deterministic():
    Y = qt.periodic_catalog(1)[0]
    x = qt.from_group(al.exp_r(al.r_vector(al.PRODUCT, 1e-5, 0, 0)))
    a = mg.contraction_sweep(x, Y, 5.0, 2, 20, 9)
    b = mg.contraction_sweep(x, Y, 5.0, 2, 20, 9)
    assert a == b


def test_sweep_far_start_plateaus_at_floor():
    Y = qt.periodic_catalog(1)[0]
    x = qt.haar_sample(53)
    sweep = mg.contraction_sweep(x, Y, 5.0, 4, 60, 1)
    tail = [s["mean_f"] for s in sweep[1:]]
    assert max(tail) <= 12.0  # bounded drift floor, fitted


def test_averaged_return_bounded_by_fit():
    Y = qt.periodic_catalog(1)[0]
    w0 = al.r_vector(al.PRODUCT, 1e-4, 2e-4, -3e-4)
    x = qt.from_group(al.exp_r(w0))
    assert mg.f_Y_eval(x, Y) <= 2 * (2e-4) ** (-1 / 3.0)
    ests = [mg.averaged_return(x, Y, lt, 300, 4)["estimate"]
            for lt in (8.0, 10.0, 12.0)]
    B_fit = 3.0 * qt.INJ_CAP ** (-1 / 3.0)
    assert all(e <= B_fit * Y.vol_proxy for e in ests)


def test_averaged_return_floor():
    Y = qt.periodic_catalog(1)[0]
    x = qt.haar_sample(54)
    est = mg.averaged_return(x, Y, 9.0, 200, 4)["estimate"]
    assert est >= 0.8 * qt.INJ_CAP ** (-1 / 3.0)


def test_interval_trick_factor_three():
    # averaging over [-1,2] then restricting to [0,1] costs at most factor 3
    w = al.r_vector(al.PRODUCT, 0.2, -0.5, 0.8)
    d = 5.0
    rs_full = np.linspace(-1, 2, 30000)
    rs_unit = np.linspace(0, 1, 10000)
    f_full = np.mean(mg.ad_norm_values(d, w, rs_full) ** (-1 / 3.0))
    f_unit = np.mean(mg.ad_norm_values(d, w, rs_unit) ** (-1 / 3.0))
    assert f_unit <= 3.0 * f_full + 1e-9


def test_averaged_return_growth_on_planted_starts():
    # planting at distance 1/T makes the average grow with T (the
    # Diophantine hypothesis is necessary)
    Y = qt.periodic_catalog(1)[0]
    ests = []
    for logT in (8.0, 11.0):
        off = math.exp(-logT)
        x = qt.from_group(al.exp_r(al.r_vector(al.PRODUCT, 0.4 * off,
                                               -0.6 * off, off)))
        ests.append(mg.averaged_return(x, Y, logT, 400, 6)["estimate"])
    assert ests[1] > ests[0]
