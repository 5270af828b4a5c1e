import numpy as np
import pytest

from layerlab import SphericalMeasure


@pytest.fixture
def sym1():
    """Symmetric two-atom measure on {-1, +1} with total mass 2."""
    return SphericalMeasure.symmetric_pair(2.0)


@pytest.fixture
def skew1():
    """Asymmetric d=1 measure: weight 2 at +1, weight 1 at -1."""
    return SphericalMeasure.discrete(np.array([[1.0], [-1.0]]),
                                     np.array([2.0, 1.0]))
