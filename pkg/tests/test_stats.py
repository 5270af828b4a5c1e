"""Characteristic-function oracles and tail/variation diagnostics.

The quadrature CF is itself an oracle for the samplers, so it gets its own
independent cross-check here: an mpmath tanh-sinh / oscillatory quadrature
of the same Levy-Khintchine exponent at much higher precision.
"""

import mpmath
import numpy as np
import pytest

from layerlab import (GaussianCF, IsotropicStableCF, LayeredQ,
                      LayeredQuadratureCF, SamplePath, SphericalMeasure,
                      StableCF, cf_distance, default_y_grid, ecf,
                      empirical_moment, hill_ci, hill_tail_index, make_grid,
                      p_variation)


def test_stable_cf_cauchy(sym1):
    # alpha = 1, symmetric atoms of total mass 2: exp(-pi |y|)
    cf = StableCF(1.0, sym1)
    for y in (0.3, 1.0, 2.5):
        assert abs(cf(np.array([y])) - np.exp(-np.pi * y)) < 1e-12
    assert cf(np.array([0.0])) == 1.0


def test_stable_cf_symmetric_real(sym1):
    cf = StableCF(1.5, sym1)
    for y in (0.5, 1.7):
        val = cf(np.array([y]))
        assert abs(val.imag) < 1e-14
        assert 0.0 < val.real < 1.0


def test_stable_cf_invalid_alpha(sym1):
    for a in (0.0, 2.0, -0.5):
        with pytest.raises(ValueError):
            StableCF(a, sym1)


def test_stable_cf_series_marginal_eta(skew1):
    cf = StableCF.series_marginal(0.5, skew1)
    np.testing.assert_allclose(cf.eta, [2.0])
    cf1 = StableCF.series_marginal(1.0, skew1)
    np.testing.assert_allclose(cf1.eta, [0.0])


def test_isotropic_matches_uniform_stable():
    # the uniform spherical measure gives an isotropic stable law, so the
    # generic StableCF and the closed-form isotropic constant must agree
    d, beta, mass = 2, 1.5, 3.0
    iso = IsotropicStableCF(beta, d, mass)
    gen = StableCF(beta, SphericalMeasure.uniform(d, mass))
    for y in ([0.5, 0.0], [1.0, 2.0], [-0.7, 0.3]):
        y = np.array(y)
        assert abs(iso(y) - gen(y)) < 1e-6


def test_gaussian_cf():
    cf = GaussianCF([[2.0, 0.0], [0.0, 1.0]])
    y = np.array([1.0, 2.0])
    assert abs(cf(y) - np.exp(-0.5 * (2.0 + 4.0))) < 1e-14


def _mp_layered_exponent(alpha, beta, a):
    # int_0^oo (e^{iar} - 1 - iar 1(r<=1)) q(r) dr at 50 digits
    mpmath.mp.dps = 50
    al, be, aa = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(a)
    inner_re = mpmath.quad(
        lambda r: (mpmath.cos(aa * r) - 1) * r ** (-al - 1), [0, 1])
    inner_im = mpmath.quad(
        lambda r: (mpmath.sin(aa * r) - aa * r) * r ** (-al - 1), [0, 1])
    outer_re = mpmath.quadosc(
        lambda r: (mpmath.cos(aa * r)) * r ** (-be - 1), [1, mpmath.inf],
        omega=aa) - 1 / be
    outer_im = mpmath.quadosc(
        lambda r: mpmath.sin(aa * r) * r ** (-be - 1), [1, mpmath.inf],
        omega=aa)
    return complex(inner_re + outer_re, inner_im + outer_im)


def test_layered_cf_against_mpmath():
    sigma = SphericalMeasure.discrete(np.array([[1.0]]), np.array([1.0]))
    q = LayeredQ.canonical(1.3, 1.9, 1.0)
    cf = LayeredQuadratureCF(q, sigma)
    for a in (0.5, 2.0, 7.0):
        expect = np.exp(_mp_layered_exponent(1.3, 1.9, a))
        got = cf(np.array([a]))
        assert abs(got - expect) < 1e-6


def test_layered_cf_symmetric_real(sym1):
    q = LayeredQ.canonical(1.3, 1.9, 2.0)
    cf = LayeredQuadratureCF(q, sym1)
    val = cf(np.array([1.5]))
    assert abs(val.imag) < 1e-10
    assert 0.0 < val.real < 1.0
    assert cf(np.array([0.0])) == 1.0


def test_layered_cf_uniform_runs():
    q = LayeredQ.canonical(1.3, 1.9, 2.0)
    cf = LayeredQuadratureCF(q, SphericalMeasure.uniform(2, 2.0))
    val = cf(np.array([1.0, 0.5]))
    assert abs(val.imag) < 1e-10
    assert 0.0 < val.real < 1.0


def test_ecf_basics():
    samples = np.zeros((10, 1))
    assert ecf(samples, np.array([3.0])) == 1.0
    samples = np.array([[1.0], [-1.0]])
    assert abs(ecf(samples, np.array([2.0])) - np.cos(2.0)) < 1e-14
    with pytest.raises(ValueError):
        ecf(np.empty((0, 1)), np.array([1.0]))


def test_default_y_grid_shapes():
    g1 = default_y_grid(1)
    assert g1.shape == (21, 1)
    assert g1.min() == -5.0 and g1.max() == 5.0
    g2 = default_y_grid(2, half_width=3.0, n=5)
    assert g2.shape == (25, 2)
    assert np.max(np.abs(g2)) == 3.0


def test_cf_distance_gaussian_sanity():
    rng = np.random.default_rng(7)
    samples = rng.standard_normal((20000, 1))
    assert cf_distance(samples, GaussianCF([[1.0]])) < 0.05
    # a wrong target must be visibly far
    assert cf_distance(samples, GaussianCF([[4.0]])) > 0.2


def test_hill_on_exact_pareto():
    rng = np.random.default_rng(11)
    x = (1.0 - rng.random(100000)) ** (-1.0 / 2.0)
    est = hill_tail_index(x, k=1000)
    assert 1.8 < est < 2.2
    est2, lo, hi = hill_ci(x, k=1000, seed=3)
    assert est2 == est
    assert lo < 2.0 < hi


def test_hill_default_k_is_sqrt_n():
    rng = np.random.default_rng(2)
    x = (1.0 - rng.random(10000)) ** (-1.0 / 1.5)
    assert hill_tail_index(x) == hill_tail_index(x, k=100)


def test_hill_validation():
    with pytest.raises(ValueError):
        hill_tail_index([1.0])
    with pytest.raises(ValueError):
        hill_tail_index([1.0, -2.0, 3.0])
    with pytest.raises(ValueError):
        hill_tail_index([1.0, 2.0, 3.0], k=3)
    with pytest.raises(ValueError):
        hill_tail_index(np.ones(10), k=3)


def test_empirical_moment():
    samples = np.array([[3.0, 4.0], [0.0, 0.0]])
    assert empirical_moment(samples, 1.0) == 2.5
    assert empirical_moment(samples, 2.0) == 12.5
    with pytest.raises(ValueError):
        empirical_moment(samples, 0.0)


def test_p_variation():
    grid = make_grid(1.0, 4)
    values = np.array([[0.0], [1.0], [-1.0], [0.0], [2.0]])
    path = SamplePath(grid=grid, values=values,
                      jump_times=np.empty(0), jump_vectors=np.empty((0, 1)))
    assert p_variation(path, 1.0) == 1.0 + 2.0 + 1.0 + 2.0
    assert p_variation(path, 2.0) == 1.0 + 4.0 + 1.0 + 4.0
    with pytest.raises(ValueError):
        p_variation(path, 0.0)
