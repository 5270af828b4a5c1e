"""Spherical measures: construction, moments, symmetry, direction sampling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layerlab import SphericalMeasure, parse_spherical_spec


def test_symmetric_pair_defaults():
    s = SphericalMeasure.symmetric_pair()
    assert s.dimension == 1
    assert s.total_mass() == 2.0
    assert s.is_symmetric()
    np.testing.assert_allclose(s.first_moment(), [0.0])


def test_discrete_moments():
    s = SphericalMeasure.discrete(np.array([[1.0], [-1.0]]), np.array([2.0, 1.0]))
    assert s.total_mass() == 3.0
    np.testing.assert_allclose(s.first_moment(), [1.0])
    np.testing.assert_allclose(s.second_moment(), [[3.0]])
    assert not s.is_symmetric()


def test_second_moment_2d():
    atoms = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    s = SphericalMeasure.discrete(atoms, np.array([1.0, 4.0, 1.0, 4.0]))
    np.testing.assert_allclose(s.second_moment(), np.diag([2.0, 8.0]))
    assert s.is_symmetric()


def test_uniform_measure():
    s = SphericalMeasure.uniform(3, 5.0)
    assert s.is_uniform
    assert s.total_mass() == 5.0
    assert s.is_symmetric()
    np.testing.assert_allclose(s.first_moment(), np.zeros(3), atol=1e-15)


def test_atoms_are_normalized():
    s = SphericalMeasure.discrete(np.array([[3.0, 4.0]]), np.array([1.0]))
    np.testing.assert_allclose(s.atoms, [[0.6, 0.8]])
    with pytest.raises(ValueError):
        SphericalMeasure.discrete(np.array([[0.0, 0.0]]), np.array([1.0]))


def test_weights_must_be_positive():
    with pytest.raises(ValueError):
        SphericalMeasure.discrete(np.array([[1.0]]), np.array([-1.0]))


def test_direction_sampling_frequencies():
    # spec-style binomial bound: frequency of +1 in [0.5 +- 0.01] at 1e5 draws
    s = SphericalMeasure.symmetric_pair(2.0)
    rng = np.random.default_rng(7)
    dirs = s.sample_directions(rng, 100000)
    frac = np.mean(dirs[:, 0] > 0)
    assert abs(frac - 0.5) < 0.01


def test_direction_sampling_weighted():
    s = SphericalMeasure.discrete(np.array([[1.0], [-1.0]]), np.array([3.0, 1.0]))
    rng = np.random.default_rng(8)
    dirs = s.sample_directions(rng, 100000)
    assert abs(np.mean(dirs[:, 0] > 0) - 0.75) < 0.01


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.floats(0.1, 10.0), st.integers(0, 2 ** 31))
def test_uniform_samples_lie_on_sphere(d, mass, seed):
    s = SphericalMeasure.uniform(d, mass)
    dirs = s.sample_directions(np.random.default_rng(seed), 32)
    np.testing.assert_allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-12)


def test_scaled():
    s = SphericalMeasure.symmetric_pair(2.0).scaled(1.5)
    assert abs(s.total_mass() - 3.0) < 1e-15


def test_parse_discrete_spec():
    s = parse_spherical_spec("discrete:[(1):1,(-1):1]")
    assert s.dimension == 1
    assert s.total_mass() == 2.0
    s2 = parse_spherical_spec("discrete:[(1,0):2,(0,1):3]")
    assert s2.dimension == 2
    assert s2.total_mass() == 5.0


def test_parse_uniform_spec():
    s = parse_spherical_spec("uniform:2:4.0")
    assert s.is_uniform and s.dimension == 2 and s.total_mass() == 4.0


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_spherical_spec("nonsense:[1]")
