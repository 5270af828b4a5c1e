"""Constants and rescalings for the short- and long-time limit theorems.

Short time: h^{-1/alpha}(X_{ht} + ht*eta) - t*b converges to the stable law
with measure sigma1.  Long time: for beta < 2 the analogous beta-rescaling
converges to the stable law with sigma2 (with + t*b), and for beta > 2 the
sqrt(h) rescaling converges to a centered Brownian motion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .qfunc import LayeredQ, derive_sigma_pair
from .series import SamplePath
from .spherical import SphericalMeasure

SHORT_STABLE = "short"
LONG_STABLE = "long-stable"
LONG_GAUSSIAN = "long-gaussian"


@dataclass(frozen=True)
class LimitSpec:
    """One scaling-limit scenario, ready to apply to simulated paths."""

    mode: str
    h: float
    index: float
    eta: np.ndarray
    b: np.ndarray
    target: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.mode not in (SHORT_STABLE, LONG_STABLE, LONG_GAUSSIAN):
            raise ValueError(f"unknown limit mode {self.mode!r}")
        if self.h <= 0.0:
            raise ValueError("horizon factor h must be positive")
        if self.mode == LONG_GAUSSIAN:
            if self.index != 2.0:
                raise ValueError("Gaussian mode rescales with index 2")
        elif not 0.0 < self.index < 2.0:
            raise ValueError("stable modes need an index in (0,2)")


def _inner_r_integral(q: LayeredQ, xi) -> float:
    """int_0^1 r q(r, xi) dr."""
    if q.is_canonical:
        if q.alpha >= 1.0:
            raise ValueError("int_0^1 r q dr diverges for alpha >= 1")
        return 1.0 / (1.0 - q.alpha)
    val, err = integrate.quad(lambda r: r * q.eval_q(r, xi), 0.0, 1.0,
                              epsabs=1e-10, epsrel=1e-10, limit=200)
    if not np.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
        raise RuntimeError("inner radial quadrature did not converge")
    return val


def _outer_r_integral(q: LayeredQ, xi) -> float:
    """int_1^oo r q(r, xi) dr."""
    if q.beta <= 1.0:
        raise ValueError("int_1^oo r q dr diverges for beta <= 1")
    if q.is_canonical:
        return 1.0 / (q.beta - 1.0)
    val, err = integrate.quad(lambda r: r * q.eval_q(r, xi), 1.0, np.inf,
                              epsabs=1e-10, epsrel=1e-10, limit=200)
    if not np.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
        raise RuntimeError("outer radial quadrature did not converge")
    return val


def _weighted_direction_integral(sigma: SphericalMeasure, radial) -> np.ndarray:
    """int xi * radial(xi) sigma(dxi) for a scalar radial functional."""
    if sigma.is_uniform:
        return np.zeros(sigma.dimension)
    return np.sum([w * radial(xi) * xi
                   for xi, w in zip(sigma.atoms, sigma.weights)], axis=0)


def short_time_constants(q: LayeredQ, sigma: SphericalMeasure):
    """(eta, b) of the short-time theorem; limit law is stable(sigma1)."""
    a, b_idx = q.alpha, q.beta
    d = sigma.dimension
    if a < 1.0:
        eta = _weighted_direction_integral(sigma, lambda xi: _inner_r_integral(q, xi))
    elif a > 1.0 and b_idx > 1.0:
        eta = -_weighted_direction_integral(sigma, lambda xi: _outer_r_integral(q, xi))
    else:
        eta = np.zeros(d)
    if a > 1.0 and b_idx <= 1.0:
        sigma1 = derive_sigma_pair(q, sigma).sigma1
        b = sigma1.first_moment() / (a - 1.0)
    else:
        b = np.zeros(d)
    return eta, b


def long_time_constants(q: LayeredQ, sigma: SphericalMeasure):
    """(eta, b) of the long-time theorem.

    For beta in (0,2) the limit law is stable(sigma2); for beta > 2 it is the
    Gaussian of gaussian_covariance and b is zero.  beta = 2 has no limit.
    """
    a, bt = q.alpha, q.beta
    d = sigma.dimension
    if bt == 2.0:
        raise ValueError("beta = 2 admits no long-time limit")
    if bt > 2.0:
        eta = -_weighted_direction_integral(sigma, lambda xi: _outer_r_integral(q, xi))
        return eta, np.zeros(d)
    if a < 1.0 and bt < 1.0:
        eta = _weighted_direction_integral(sigma, lambda xi: _inner_r_integral(q, xi))
    elif bt > 1.0:
        eta = -_weighted_direction_integral(sigma, lambda xi: _outer_r_integral(q, xi))
    else:
        eta = np.zeros(d)
    if a >= 1.0 and bt < 1.0:
        sigma2 = derive_sigma_pair(q, sigma).sigma2
        b = sigma2.first_moment() / (1.0 - bt)
    else:
        b = np.zeros(d)
    return eta, b


def gaussian_covariance(q: LayeredQ, sigma: SphericalMeasure) -> np.ndarray:
    """Covariance of the beta > 2 Brownian limit: int zz' nu(dz)."""
    if q.beta <= 2.0:
        raise ValueError("second moment of the Levy measure diverges for beta <= 2")
    if q.is_canonical:
        radial = 1.0 / (2.0 - q.alpha) + 1.0 / (q.beta - 2.0)
        return sigma.second_moment() * radial
    if sigma.is_uniform:
        val, err = integrate.quad(lambda r: r * r * q.eval_q(r, None), 0.0, np.inf,
                                  epsabs=1e-10, epsrel=1e-10, limit=300)
        if err > 1e-8 * max(1.0, abs(val)):
            raise RuntimeError("radial quadrature did not converge")
        return (sigma.total_mass() / sigma.dimension) * val * np.eye(sigma.dimension)
    total = np.zeros((sigma.dimension, sigma.dimension))
    for xi, w in zip(sigma.atoms, sigma.weights):
        val, err = integrate.quad(lambda r: r * r * q.eval_q(r, xi), 0.0, np.inf,
                                  epsabs=1e-10, epsrel=1e-10, limit=300)
        if err > 1e-8 * max(1.0, abs(val)):
            raise RuntimeError("radial quadrature did not converge")
        total += w * val * np.outer(xi, xi)
    return total


def rescale_path(path: SamplePath, spec: LimitSpec) -> SamplePath:
    """Map a path on [0, hT] to the rescaled path on [0, T]."""
    h = spec.h
    grid = path.grid / h
    scale = h ** (-1.0 / spec.index)
    values = scale * (path.values + np.outer(path.grid, spec.eta))
    if spec.mode == SHORT_STABLE:
        values = values - np.outer(grid, spec.b)
    elif spec.mode == LONG_STABLE:
        values = values + np.outer(grid, spec.b)
    return SamplePath(grid=grid, values=values,
                      jump_times=path.jump_times / h,
                      jump_vectors=scale * path.jump_vectors)


def rescale_terminal(x, hT: float, spec: LimitSpec) -> np.ndarray:
    """Rescale terminal values X_{hT} directly (vectorized over paths)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    t = hT / spec.h
    scale = spec.h ** (-1.0 / spec.index)
    out = scale * (x + hT * spec.eta)
    if spec.mode == SHORT_STABLE:
        out = out - t * spec.b
    elif spec.mode == LONG_STABLE:
        out = out + t * spec.b
    return out
