"""Change-of-measure machinery: density ratios, the Radon-Nikodym process U,
drift compatibility, and importance-sampling weights."""

import numpy as np
import pytest
from scipy import stats as sps

from layerlab import (DensityRatio, LayeredQ, SphericalMeasure,
                      WeightedPathSample, draw_shot_noise,
                      drift_compatibility, layered_path_canonical, make_grid,
                      nu_gap, required_drift_difference,
                      reweighted_expectation, singularity_witness,
                      u_canonical, u_from_jumps, u_levy_tail, u_series)


@pytest.fixture
def ratio():
    return DensityRatio(LayeredQ.canonical(1.3, 1.9, 2.0))


def test_phi_canonical_closed_form(ratio):
    assert ratio.phi(np.array([0.5])) == 0.0
    assert ratio.phi(np.array([1.0])) == 0.0
    r = 3.0
    assert abs(ratio.phi(np.array([r])) - (1.3 - 1.9) * np.log(r)) < 1e-14


def test_psi_canonical_closed_form(ratio):
    assert ratio.psi(np.array([2.0])) == 0.0
    r = 0.1
    assert abs(ratio.psi(np.array([-r])) - (1.9 - 1.3) * np.log(r)) < 1e-14


def test_phi_undefined_at_origin(ratio):
    with pytest.raises(ValueError):
        ratio.phi(np.array([0.0]))


def test_required_drift_alpha_below_one():
    # canonical, alpha = 0.5, single atom +1 with weight 1:
    # required = int xi sigma * int_0^1 r^{-0.5} dr = 2
    sigma = SphericalMeasure.discrete(np.array([[1.0]]), np.array([1.0]))
    q = LayeredQ.canonical(0.5, 1.5, 1.0)
    np.testing.assert_allclose(required_drift_difference(q, sigma), [2.0])
    ok, req = drift_compatibility(q, sigma, np.array([2.0]), np.array([0.0]))
    assert ok
    ok, _ = drift_compatibility(q, sigma, np.array([2.1]), np.array([0.0]))
    assert not ok


def test_required_drift_alpha_above_one():
    # canonical correction integral vanishes; required = sigma1 moment/(a-1)
    sigma = SphericalMeasure.discrete(np.array([[1.0], [-1.0]]),
                                      np.array([2.0, 1.0]))
    q = LayeredQ.canonical(1.5, 1.9, 3.0)
    np.testing.assert_allclose(required_drift_difference(q, sigma), [2.0])


def test_required_drift_symmetric_vanishes(sym1):
    q = LayeredQ.canonical(1.3, 1.9, 2.0)
    np.testing.assert_allclose(required_drift_difference(q, sym1), [0.0])


def test_nu_gap_closed_forms(sym1):
    q = LayeredQ.canonical(1.3, 1.9, 2.0)
    m = 2.0
    for eps in (1.0, 2.0, 5.0):
        expect = m * (eps ** -1.9 / 1.9 - eps ** -1.3 / 1.3)
        assert abs(nu_gap(q, sym1, eps) - expect) < 1e-12
    # below 1 the gap is the constant m (1/beta - 1/alpha)
    const = m * (1.0 / 1.9 - 1.0 / 1.3)
    for eps in (0.5, 0.01, 1e-6):
        assert abs(nu_gap(q, sym1, eps) - const) < 1e-12
    # the canonical closed form against the quadrature path of the same q
    q_fn = lambda r, xi: r ** -2.3 if r <= 1.0 else r ** -2.9
    qc = LayeredQ.custom(1.3, 1.9, q_fn, lambda xi: 1.0, lambda xi: 1.0)
    for eps in (0.5, 2.0):
        assert abs(nu_gap(qc, sym1, eps) - nu_gap(q, sym1, eps)) < 1e-8


def test_u_from_jumps_matches_closed_form(ratio, sym1):
    grid = make_grid(1.0, 4)
    for seed in range(5):
        draw = draw_shot_noise(seed, 1.0, sym1, 500.0)
        path = layered_path_canonical(1.3, 1.9, sym1, draw, grid)
        u_ref = u_canonical(1.3, 1.9, 2.0, path.jumps, 1.0)
        u_num, cauchy = u_from_jumps(ratio, sym1, path.jumps, 1.0)
        assert abs(u_num - u_ref) < 1e-10
        assert cauchy < 1e-12


def test_u_series_spec_term(sym1):
    # single arrival Gamma_1 = 0.5, alpha = 1.3, beta = 1.9, mass 2, T = 1:
    # jump term -((a-b)/a) ln(a Gamma/(mT)) = -0.51866...; drift term
    # -(1/b - 1/a) m
    from layerlab import ShotNoiseDraw
    draw = ShotNoiseDraw(T=1.0, gammas=np.array([0.5]), times=np.array([0.3]),
                         directions=np.array([[1.0]]))
    got = u_series(draw, 1.3, 1.9, 2.0, 1.0, "prime")
    term = -(1.3 - 1.9) / 1.3 * np.log(1.3 * 0.5 / 2.0)
    drift = -(1.0 / 1.9 - 1.0 / 1.3) * 2.0
    assert abs(term - (-0.51874)) < 5e-5
    assert abs(got - (term + drift)) < 1e-12
    with pytest.raises(ValueError):
        u_series(draw, 1.3, 1.9, 2.0, 1.0, "wrong")


def test_u_prime_jump_terms_are_exponential(sym1):
    # ln-magnitude contributions of U' follow an exponential law; KS at 1e-3
    # only arrivals with Gamma <= mT/alpha contribute, about 1.5 per draw
    rate = 1.3 / abs(1.3 - 1.9)
    terms = []
    for seed in range(2000):
        draw = draw_shot_noise(seed, 1.0, sym1, 10.0)
        arg = 1.3 * draw.gammas / 2.0
        keep = arg <= 1.0
        terms.append(-(1.3 - 1.9) / 1.3 * np.log(arg[keep]))
    terms = np.concatenate(terms)
    assert len(terms) > 2000
    assert np.all(terms < 0.0)
    _, pval = sps.kstest(-terms, "expon", args=(0.0, 1.0 / rate))
    assert pval > 1e-3


def test_u_levy_tail():
    # alpha < beta: support on the negative axis, monotone increasing tail
    t1 = u_levy_tail(1.3, 1.9, 2.0, -0.6)
    t2 = u_levy_tail(1.3, 1.9, 2.0, -1.2)
    expect = 2.0 / 1.3 * np.exp(-1.3 / (1.3 - 1.9) * (-0.6))
    assert abs(t1 - expect) < 1e-12
    assert t1 > t2
    with pytest.raises(ValueError):
        u_levy_tail(1.3, 1.9, 2.0, 0.5)
    with pytest.raises(ValueError):
        u_levy_tail(1.9, 1.3, 2.0, -0.5)
    with pytest.raises(ValueError):
        u_levy_tail(1.5, 1.5, 2.0, 0.5)


def test_singularity_witness_directions():
    down = singularity_witness(DensityRatio(LayeredQ.canonical(1.3, 1.9, 2.0)))
    assert down["direction"] == "-inf"
    assert down["psi"][-1] < down["psi"][0]
    up = singularity_witness(DensityRatio(LayeredQ.canonical(1.9, 1.3, 2.0)))
    assert up["direction"] == "+inf"
    assert up["psi"][-1] > up["psi"][0]


def test_reweighted_expectation(sym1):
    grid = make_grid(1.0, 2)
    draw = draw_shot_noise(0, 1.0, sym1, 100.0)
    path = layered_path_canonical(1.3, 1.9, sym1, draw, grid)
    samples = [WeightedPathSample(path, 0.0, "P") for _ in range(4)]
    est, se, clipped = reweighted_expectation(samples, lambda p: 2.0)
    assert est == 2.0 and se == 0.0 and clipped == 0
    with pytest.raises(ValueError):
        reweighted_expectation([], lambda p: 1.0)
    mixed = samples + [WeightedPathSample(path, 0.0, "Q")]
    with pytest.raises(ValueError):
        reweighted_expectation(mixed, lambda p: 1.0)


def test_weighted_sample_validation(sym1):
    grid = make_grid(1.0, 2)
    draw = draw_shot_noise(0, 1.0, sym1, 50.0)
    path = layered_path_canonical(1.3, 1.9, sym1, draw, grid)
    with pytest.raises(ValueError):
        WeightedPathSample(path, np.inf, "P")
    with pytest.raises(ValueError):
        WeightedPathSample(path, 0.0, "R")


def test_rn_weights_normalize(sym1):
    # martingale property E[e^{U'_T}] = 1 within 4 standard errors
    n = 1500
    w = np.empty(n)
    wd = np.empty(n)
    for i in range(n):
        draw = draw_shot_noise(1000 + i, 1.0, sym1, 5000.0)
        w[i] = np.exp(u_series(draw, 1.3, 1.9, 2.0, 1.0, "prime"))
        wd[i] = np.exp(-u_series(draw, 1.3, 1.9, 2.0, 1.0, "doubleprime"))
    for v in (w, wd):
        se = np.std(v, ddof=1) / np.sqrt(n)
        assert abs(np.mean(v) - 1.0) < 4.0 * se
