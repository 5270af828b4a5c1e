"""The layered radial density q, its tail integral and generalized inverse.

The canonical two-layer density is

    q(r) = r^(-alpha-1) on (0, 1],   r^(-beta-1) on (1, oo),

independent of the direction, so its limit densities are c1 = c2 = 1 and the
derived spherical measures coincide with the base measure.  The inverse tail
is taken with respect to the *mass-scaled* tail  u -> sigma_mass * Q(r),
which is the mapping the shot-noise series inverts: with sigma_mass equal to
the total mass of the accompanying spherical measure, the expected number of
jumps of size > r on [0, T] is T * sigma_mass * Q(r).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize


class QuadratureError(RuntimeError):
    """Raised when an adaptive quadrature fails to reach its tolerance."""


_ASYMPTOTIC_TOL = 0.05


@dataclass(frozen=True)
class LayeredQ:
    """Radial jump density with inner index alpha and outer index beta."""

    alpha: float
    beta: float
    sigma_mass: float | None = None              # canonical variant
    q_fn: Callable | None = None                 # custom variant: q(r, xi)
    c1_fn: Callable | None = None                # xi -> limit density at 0
    c2_fn: Callable | None = None                # xi -> limit density at oo

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"inner index alpha must lie in (0,2), got {self.alpha}")
        if self.beta <= 0.0:
            raise ValueError(f"outer index beta must be positive, got {self.beta}")
        if self.is_canonical:
            if self.sigma_mass <= 0:
                raise ValueError("canonical q needs a positive sigma_mass")
        else:
            if self.q_fn is None or self.c1_fn is None or self.c2_fn is None:
                raise ValueError("custom q needs q_fn, c1_fn and c2_fn")
            self._check_asymptotics()

    # -- constructors -------------------------------------------------

    @classmethod
    def canonical(cls, alpha: float, beta: float, sigma_mass: float) -> "LayeredQ":
        return cls(alpha=alpha, beta=beta, sigma_mass=float(sigma_mass))

    @classmethod
    def custom(cls, alpha, beta, q_fn, c1_fn, c2_fn) -> "LayeredQ":
        return cls(alpha=alpha, beta=beta, q_fn=q_fn, c1_fn=c1_fn, c2_fn=c2_fn)

    @property
    def is_canonical(self) -> bool:
        return self.sigma_mass is not None

    @property
    def tail_scale(self) -> float:
        """Mass factor between the plain tail integral and the inverted tail."""
        return self.sigma_mass if self.is_canonical else 1.0

    def _check_asymptotics(self):
        # construction-time spot check of the two power-law limits
        xi = None
        for r, exponent, limit in ((1e-6, self.alpha, self.c1_fn),
                                   (1e6, self.beta, self.c2_fn)):
            target = limit(xi)
            if target == 0.0:
                continue
            got = self.q_fn(r, xi) * r ** (exponent + 1.0)
            if abs(got / target - 1.0) > _ASYMPTOTIC_TOL:
                raise ValueError(
                    f"custom q violates its power-law limit at r={r:g}: "
                    f"q*r^(idx+1)={got:g}, expected ~{target:g}")

    # -- pointwise evaluation -----------------------------------------

    def eval_q(self, r: float, xi=None) -> float:
        """Density value q(r, xi); r must be positive."""
        if r <= 0.0:
            raise ValueError(f"q is defined for r > 0, got {r}")
        if self.is_canonical:
            return r ** (-self.alpha - 1.0) if r <= 1.0 else r ** (-self.beta - 1.0)
        return float(self.q_fn(r, xi))

    def c1(self, xi=None) -> float:
        return 1.0 if self.is_canonical else float(self.c1_fn(xi))

    def c2(self, xi=None) -> float:
        return 1.0 if self.is_canonical else float(self.c2_fn(xi))

    # -- tail integral and inverse ------------------------------------

    def tail_integral(self, r: float, xi=None) -> float:
        """Q(r, xi) = integral of q(s, xi) ds over (r, oo)."""
        if r <= 0.0:
            raise ValueError(f"tail integral needs r > 0, got {r}")
        a, b = self.alpha, self.beta
        if self.is_canonical:
            if r <= 1.0:
                return (r ** (-a) - 1.0) / a + 1.0 / b
            return r ** (-b) / b
        # Substitute v = s^(-alpha) on the inner piece and v = s^(-beta) on
        # the outer one: the transformed integrands tend to the constants
        # c1/alpha and c2/beta at the power-law ends, so the quadrature sees
        # a bounded integrand instead of a near-singular one.
        total = 0.0
        if r < 1.0:
            # Peel off the limiting constant c1/alpha analytically and
            # integrate only the decaying remainder; otherwise the long
            # near-constant stretch drives the extrapolation into roundoff.
            head = self.c1(xi) / a

            def inner(v):
                return self.q_fn(v ** (-1.0 / a), xi) * v ** (-1.0 / a - 1.0) / a - head

            top = r ** -a
            main = head * (top - 1.0)
            # Integrate the remainder over log-spaced segments; on one long
            # interval QUADPACK's error estimate is unreliable here.
            cuts = [1.0]
            while cuts[-1] * 100.0 < top:
                cuts.append(cuts[-1] * 100.0)
            cuts.append(top)
            val = err = 0.0
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                piece, piece_err = integrate.quad(
                    inner, lo, hi, epsabs=1e-12 * max(main, 1.0),
                    epsrel=1e-10, limit=200)
                val += piece
                err += piece_err
            if not np.isfinite(val) or err > 1e-8 * max(main + val, 1e-300):
                raise QuadratureError(f"tail integral did not converge on [{r},1]")
            total += main + val

        big = max(r, 1.0)

        def outer(v):
            return self.q_fn(v ** (-1.0 / b), xi) * v ** (-1.0 / b - 1.0) / b

        val, err = integrate.quad(outer, 0.0, big ** -b,
                                  epsabs=0.0, epsrel=1e-11, limit=200)
        if not np.isfinite(val) or err > 1e-8 * max(abs(val), 1e-300):
            raise QuadratureError(f"tail integral did not converge on [{big},oo)")
        return total + val

    def inverse_tail(self, u: float, xi=None) -> float:
        """Generalized inverse of r -> tail_scale * Q(r, xi) at level u."""
        if u <= 0.0:
            raise ValueError(f"inverse tail needs u > 0, got {u}")
        a, b = self.alpha, self.beta
        if self.is_canonical:
            m = self.sigma_mass
            if u <= m / b:
                return (b * u / m) ** (-1.0 / b)
            return (a * u / m + 1.0 - a / b) ** (-1.0 / a)
        return self._bisect_inverse(u, xi)

    def _bisect_inverse(self, u: float, xi) -> float:
        # Q is strictly decreasing; start from the power-law asymptote of the
        # relevant branch, expand the bracket until it straddles the root, and
        # solve with Brent's method on log r (relative tolerance ~1e-13).
        a, b = self.alpha, self.beta
        q1 = self.tail_integral(1.0, xi)
        if u <= q1:
            guess = (b * u / self.c2(xi)) ** (-1.0 / b)
        else:
            guess = (1.0 + a * (u - q1) / self.c1(xi)) ** (-1.0 / a)
        lo, hi = guess / 4.0, guess * 4.0
        while self.tail_integral(lo, xi) < u:
            lo /= 16.0
            if lo < 1e-300:
                return 0.0
        while self.tail_integral(hi, xi) >= u:
            hi *= 16.0
            if hi > 1e300:
                return hi
        root = optimize.brentq(
            lambda t: self.tail_integral(np.exp(t), xi) - u,
            np.log(lo), np.log(hi), xtol=1e-13, rtol=4.0 * np.finfo(float).eps)
        return float(np.exp(root))

    def series_magnitude(self, gamma_over_t: float, sigma_total_mass: float, xi=None) -> float:
        """Jump magnitude assigned to a Poisson arrival at level gamma/T.

        Inverts the total jump-rate tail sigma(S^{d-1}) * Q; for the canonical
        variant with sigma_mass equal to the measure's mass this is exactly
        inverse_tail(gamma/T).
        """
        return self.inverse_tail(gamma_over_t * self.tail_scale / sigma_total_mass, xi)


@dataclass(frozen=True)
class DerivedSphericalPair:
    """The measures weighted by the inner and outer limit densities."""

    sigma1: "SphericalMeasure"
    sigma2: "SphericalMeasure"


def derive_sigma_pair(q: LayeredQ, sigma) -> DerivedSphericalPair:
    """sigma1(B) = int_B c1 d(sigma), sigma2(B) = int_B c2 d(sigma)."""
    if q.is_canonical:
        return DerivedSphericalPair(sigma, sigma)
    if sigma.is_uniform:
        c1 = _constant_on_sphere(q.c1_fn, sigma.dimension)
        c2 = _constant_on_sphere(q.c2_fn, sigma.dimension)
        return DerivedSphericalPair(_scaled_or_null(sigma, c1), _scaled_or_null(sigma, c2))
    w1 = np.array([q.c1(a) for a in sigma.atoms])
    w2 = np.array([q.c2(a) for a in sigma.atoms])
    return DerivedSphericalPair(_reweighted(sigma, w1), _reweighted(sigma, w2))


def _reweighted(sigma, factors):
    keep = factors > 0
    if not np.any(keep):
        return None
    return type(sigma).discrete(sigma.atoms[keep], sigma.weights[keep] * factors[keep])


def _scaled_or_null(sigma, c):
    return sigma.scaled(c) if c > 0 else None


def _constant_on_sphere(fn, d, n_probe: int = 8, tol: float = 1e-9) -> float:
    rng = np.random.default_rng(0)
    g = rng.standard_normal((n_probe, d))
    probes = g / np.linalg.norm(g, axis=1, keepdims=True)
    vals = np.array([fn(p) for p in probes])
    if np.max(vals) - np.min(vals) > tol * max(1.0, np.max(np.abs(vals))):
        raise ValueError("uniform base measure requires a constant limit density")
    return float(vals[0])


def levy_tail_mass(q: LayeredQ, sigma, x: float) -> float:
    """nu({z : ||z|| > x}) for the Levy measure with density q over sigma."""
    if x <= 0.0:
        raise ValueError("radius must be positive")
    if sigma.is_uniform:
        return sigma.total_mass() * q.tail_integral(x, None)
    return float(sum(w * q.tail_integral(x, a) for a, w in zip(sigma.atoms, sigma.weights)))


def blend_q(alpha: float, beta: float) -> LayeredQ:
    """Built-in smooth custom family q(r) = r^(-a-1) (1+r)^(a-b).

    Behaves like r^(-alpha-1) near 0 and r^(-beta-1) at infinity with
    c1 = c2 = 1, interpolating smoothly in between.
    """
    def q_fn(r, xi):
        return r ** (-alpha - 1.0) * (1.0 + r) ** (alpha - beta)

    return LayeredQ.custom(alpha, beta, q_fn, lambda xi: 1.0, lambda xi: 1.0)


def parse_q_spec(text: str, sigma_mass: float) -> LayeredQ:
    """Parse ``canonical:alpha=..,beta=..`` or ``blend:alpha=..,beta=..``."""
    kind, _, body = text.strip().partition(":")
    params = {}
    for item in body.split(","):
        if not item:
            continue
        k, _, v = item.partition("=")
        params[k.strip()] = float(v)
    if "alpha" not in params or "beta" not in params:
        raise ValueError(f"q spec needs alpha and beta: {text!r}")
    if kind == "canonical":
        return LayeredQ.canonical(params["alpha"], params["beta"], sigma_mass)
    if kind == "blend":
        return blend_q(params["alpha"], params["beta"])
    raise ValueError(f"unknown q family {kind!r}")
