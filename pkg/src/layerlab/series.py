"""Shot-noise series generators for stable, layered and mixed jump paths.

All generators consume a ShotNoiseDraw, so different processes can be coupled
by sharing the same Poisson arrivals {Gamma_i}, jump times {T_i} and
directions {V_i}; only the magnitude map differs.  The series is truncated at
the first arrival beyond gamma_cap * T, which bounds the largest discarded
jump by the inverse tail evaluated at gamma_cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._special import EULER_GAMMA, zeta
from .qfunc import LayeredQ
from .spherical import SphericalMeasure

_MAG_FLOOR = 1e-300     # drop denormal magnitudes outright


@dataclass(frozen=True)
class ShotNoiseDraw:
    """One realization of the shared random sequences on [0, T].

    gammas are the unit-rate Poisson arrivals kept below gamma_cap * T,
    times are iid uniform on [0, T], directions are iid from the normalized
    spherical measure.  rejects (uniform [0,1]) and alphas (mixing indices)
    are populated on request.
    """

    T: float
    gammas: np.ndarray
    times: np.ndarray
    directions: np.ndarray
    rejects: np.ndarray | None = None
    alphas: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.gammas)
        if n:
            if self.gammas[0] <= 0.0 or np.any(np.diff(self.gammas) <= 0.0):
                raise ValueError("gammas must be strictly increasing and positive")
        if len(self.times) != n or len(self.directions) != n:
            raise ValueError("sequence length mismatch")
        if np.any(self.times < 0.0) or np.any(self.times > self.T):
            raise ValueError("jump times must lie in [0, T]")
        for opt in (self.rejects, self.alphas):
            if opt is not None and len(opt) != n:
                raise ValueError("sequence length mismatch")

    @property
    def cutoff_index(self) -> int:
        return len(self.gammas)


@dataclass(frozen=True)
class MixDistribution:
    """Discrete mixing law for the stability index of a mixed stable process."""

    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if np.any(atoms <= 0.0) or np.any(atoms >= 2.0):
            raise ValueError("mixing indices must lie in the open interval (0,2)")
        if np.any(probs <= 0.0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must be positive and sum to 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point_mass(cls, alpha: float) -> "MixDistribution":
        return cls(np.array([alpha]), np.array([1.0]))

    @classmethod
    def uniform_on(cls, values) -> "MixDistribution":
        values = np.asarray(values, dtype=float)
        return cls(values, np.full(len(values), 1.0 / len(values)))

    def admissibility_cost(self) -> float:
        """The integral of 1/(alpha(2-alpha)); finite for any discrete mix."""
        return float(np.sum(self.probs / (self.atoms * (2.0 - self.atoms))))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        idx = rng.choice(len(self.atoms), size=n, p=self.probs)
        return self.atoms[idx]


@dataclass
class SamplePath:
    """A path on a grid over [0, T] with its retained jump list."""

    grid: np.ndarray
    values: np.ndarray                # (len(grid), d)
    jump_times: np.ndarray
    jump_vectors: np.ndarray          # (n_jumps, d)

    @property
    def jumps(self):
        return list(zip(self.jump_times, self.jump_vectors))

    @property
    def terminal(self) -> np.ndarray:
        return self.values[-1]

    @property
    def dimension(self) -> int:
        return self.values.shape[1]


def make_grid(T: float, n: int) -> np.ndarray:
    """Uniform grid 0 = t_0 < ... < t_n = T."""
    if n < 1 or T <= 0.0:
        raise ValueError("need n >= 1 grid steps and T > 0")
    return np.linspace(0.0, T, n + 1)


def draw_shot_noise(seed, T: float, sigma: SphericalMeasure, gamma_cap: float,
                    with_rejects: bool = False,
                    mix: MixDistribution | None = None) -> ShotNoiseDraw:
    """Generate the shared sequences; deterministic for a fixed seed.

    seed may be an integer or a numpy SeedSequence (for parallel substreams).
    """
    if gamma_cap <= 0.0 or T <= 0.0:
        raise ValueError("gamma_cap and T must be positive")
    rng = np.random.default_rng(seed)
    cap = gamma_cap * T
    # draw exponential increments in blocks until the cumulative sum passes cap
    chunks = []
    total = 0.0
    remaining = cap
    while True:
        size = int(remaining + 6.0 * np.sqrt(remaining + 1.0)) + 16
        inc = rng.standard_exponential(size)
        chunks.append(inc)
        total += float(inc.sum())
        if total > cap:
            break
        remaining = cap - total
    gammas = np.cumsum(np.concatenate(chunks))
    gammas = gammas[gammas <= cap]
    n = len(gammas)
    times = rng.uniform(0.0, T, n)
    directions = sigma.sample_directions(rng, n)
    rejects = rng.random(n) if with_rejects else None
    alphas = mix.sample(rng, n) if mix is not None else None
    return ShotNoiseDraw(T=float(T), gammas=gammas, times=times,
                         directions=directions, rejects=rejects, alphas=alphas)


def _check_grid(grid: np.ndarray, T: float) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2:
        raise ValueError("grid must be a 1-d array with at least two points")
    if grid[0] != 0.0 or grid[-1] > T + 1e-12 or np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must increase from 0 and stay within [0, T]")
    return grid


def _assemble(grid, times, vectors, drift_per_t) -> SamplePath:
    # evaluate the truncated series on the grid: jumps are accumulated in
    # increasing T_i (fixed summation order), drift is linear in t
    d = vectors.shape[1] if len(vectors) else drift_per_t.shape[0]
    order = np.argsort(times, kind="stable")
    st = times[order]
    sv = vectors[order]
    csum = np.vstack([np.zeros((1, d)), np.cumsum(sv, axis=0)])
    idx = np.searchsorted(st, grid, side="right")
    values = csum[idx] + np.outer(grid, drift_per_t)
    return SamplePath(grid=grid, values=values, jump_times=st, jump_vectors=sv)


def stable_drift_constant(alpha: float, sigma_mass: float, T: float) -> float:
    """The scalar b_T multiplying z0 t/T in the stable series."""
    m = sigma_mass * T
    if alpha < 1.0:
        return 0.0
    if alpha == 1.0:
        return m * (EULER_GAMMA + np.log(m))
    return (alpha / m) ** (-1.0 / alpha) * zeta(1.0 / alpha)


def stable_path(alpha: float, sigma: SphericalMeasure, draw: ShotNoiseDraw,
                grid) -> SamplePath:
    """Truncated shot-noise series of an alpha-stable path on [0, T]."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"stable index must lie in (0,2), got {alpha}")
    grid = _check_grid(grid, draw.T)
    m = sigma.total_mass()
    mT = m * draw.T
    mags = (alpha * draw.gammas / mT) ** (-1.0 / alpha)
    keep = mags >= _MAG_FLOOR
    vectors = mags[keep, None] * draw.directions[keep]
    drift = np.zeros(sigma.dimension)
    if alpha >= 1.0:
        z0 = sigma.mean_direction()
        if np.any(z0 != 0.0):
            n = draw.cutoff_index
            comp = np.sum((alpha * np.arange(1, n + 1) / mT) ** (-1.0 / alpha))
            drift = (stable_drift_constant(alpha, m, draw.T) - comp) * z0 / draw.T
    return _assemble(grid, draw.times[keep], vectors, drift)


def canonical_magnitudes(alpha: float, beta: float, gammas: np.ndarray,
                         sigma_mass: float, T: float) -> np.ndarray:
    """Vectorized inverse tail for the canonical two-layer q."""
    mT = sigma_mass * T
    out = np.empty_like(gammas)
    big = gammas <= mT / beta            # the beta branch carries the large jumps
    out[big] = (beta * gammas[big] / mT) ** (-1.0 / beta)
    out[~big] = (alpha * gammas[~big] / mT + 1.0 - alpha / beta) ** (-1.0 / alpha)
    return out


def canonical_centering_b(i: int, beta: float, sigma_mass: float, T: float) -> float:
    """The mean of the i-th beta-branch magnitude (a reference constant).

    This is the expected contribution of the i-th arrival restricted to the
    large-jump branch.  It is exposed as a diagnostic; the path generators
    center on the small-jump branch instead (canonical_centering_sum), which
    is the convention under which the compensated series converges to the
    layered law with zero shift.  For beta = 1 the formula has a removable
    singularity handled by a log ratio; b_1 diverges for beta <= 1.
    """
    mT = sigma_mass * T
    hi = min(float(i), mT / beta)
    lo = min(float(i - 1), mT / beta)
    if beta == 1.0:
        if lo == 0.0:
            raise ValueError("centering b_1 diverges at beta = 1")
        return mT * np.log(hi / lo)
    e = 1.0 - 1.0 / beta
    if beta < 1.0 and lo == 0.0:
        raise ValueError("centering b_1 diverges for beta < 1")
    return (beta / mT) ** (-1.0 / beta) * (hi ** e - lo ** e) / e


def canonical_centering_sum(alpha: float, beta: float, sigma_mass: float,
                            T: float, n: float) -> float:
    """Closed-form sum of the small-jump centering integrals up to n.

    Equals the integral over s in (0, n] of the series magnitude restricted
    to magnitudes <= 1 (the alpha branch, s >= mass*T/beta); this is the
    centering that makes the compensated series converge to the layered law
    with zero shift parameter.
    """
    mT = sigma_mass * T
    if n <= mT / beta:
        return 0.0
    w_n = alpha * n / mT + 1.0 - alpha / beta
    if alpha == 1.0:
        return mT * np.log(w_n)
    e = 1.0 - 1.0 / alpha
    return (mT / alpha) * (w_n ** e - 1.0) / e


def layered_path_canonical(alpha: float, beta: float, sigma: SphericalMeasure,
                           draw: ShotNoiseDraw, grid) -> SamplePath:
    """Series path of the canonical two-layer process."""
    if not 0.0 < alpha < 2.0 or beta <= 0.0:
        raise ValueError("need alpha in (0,2) and beta > 0")
    grid = _check_grid(grid, draw.T)
    m = sigma.total_mass()
    mags = canonical_magnitudes(alpha, beta, draw.gammas, m, draw.T)
    keep = mags >= _MAG_FLOOR
    vectors = mags[keep, None] * draw.directions[keep]
    drift = np.zeros(sigma.dimension)
    z0 = sigma.mean_direction()
    if np.any(np.abs(z0) > 1e-15):
        b_sum = canonical_centering_sum(alpha, beta, m, draw.T,
                                        float(draw.cutoff_index))
        drift = -b_sum * z0 / draw.T
    return _assemble(grid, draw.times[keep], vectors, drift)


def _general_centering_sum(q: LayeredQ, sigma: SphericalMeasure, n: int,
                           T: float) -> np.ndarray:
    # sum over i <= n of b_i = int_{i-1}^i E[ q_inv(s/T, V) V 1(q_inv <= 1) ] ds,
    # computed atom by atom; the indicator switches on at s* = T * m * Q(1, xi)
    m = sigma.total_mass()
    total = np.zeros(sigma.dimension)
    for atom, w in zip(sigma.atoms, sigma.weights):
        s_star = T * m * q.tail_integral(1.0, atom)
        lo = min(s_star, float(n))
        if lo >= n:
            continue
        val, err = integrate.quad(
            lambda s: q.series_magnitude(s / T, m, atom), lo, float(n),
            epsabs=1e-8, epsrel=1e-10, limit=400)
        if err > 1e-6 * max(1.0, abs(val)):
            raise RuntimeError("centering quadrature did not converge")
        total += (w / m) * val * atom
    return total


def layered_path_general(q: LayeredQ, sigma: SphericalMeasure,
                         draw: ShotNoiseDraw, grid) -> SamplePath:
    """Series path for a general layered q (canonical or custom)."""
    grid = _check_grid(grid, draw.T)
    m = sigma.total_mass()
    if q.is_canonical:
        mags = canonical_magnitudes(q.alpha, q.beta, draw.gammas, m, draw.T)
    else:
        mags = np.array([q.series_magnitude(g / draw.T, m, v)
                         for g, v in zip(draw.gammas, draw.directions)])
    keep = mags >= _MAG_FLOOR
    vectors = mags[keep, None] * draw.directions[keep]
    drift = np.zeros(sigma.dimension)
    if not sigma.is_symmetric():
        b_sum = _general_centering_sum(q, sigma, draw.cutoff_index, draw.T)
        drift = -b_sum / draw.T
    return _assemble(grid, draw.times[keep], vectors, drift)


def layered_path_rejection(alpha: float, beta: float, sigma: SphericalMeasure,
                           draw: ShotNoiseDraw, base: str, grid) -> SamplePath:
    """Layered path by thinning a stable series (inner or outer base)."""
    if alpha >= beta:
        raise ValueError("rejection construction needs alpha < beta")
    if draw.rejects is None:
        raise ValueError("draw carries no rejection uniforms")
    if not sigma.is_symmetric():
        raise ValueError("rejection construction implemented for symmetric measures only")
    grid = _check_grid(grid, draw.T)
    mT = sigma.total_mass() * draw.T
    if base == "inner":
        cand = (alpha * draw.gammas / mT) ** (-1.0 / alpha)
        ratio = np.where(cand <= 1.0, 1.0, cand ** (alpha - beta))
    elif base == "outer":
        if beta >= 2.0:
            raise ValueError("outer base needs a beta-stable series, beta < 2")
        cand = (beta * draw.gammas / mT) ** (-1.0 / beta)
        ratio = np.where(cand <= 1.0, cand ** (beta - alpha), 1.0)
    else:
        raise ValueError(f"base must be 'inner' or 'outer', got {base!r}")
    keep = (draw.rejects <= ratio) & (cand >= _MAG_FLOOR)
    vectors = cand[keep, None] * draw.directions[keep]
    return _assemble(grid, draw.times[keep], vectors, np.zeros(sigma.dimension))


def mixed_path(mix: MixDistribution, sigma: SphericalMeasure,
               draw: ShotNoiseDraw, grid) -> SamplePath:
    """Series path whose i-th jump obeys the random stability index alpha_i."""
    if draw.alphas is None:
        raise ValueError("draw carries no mixing indices")
    if not sigma.is_symmetric():
        raise ValueError("mixed stable series requires a symmetric measure")
    grid = _check_grid(grid, draw.T)
    mT = sigma.total_mass() * draw.T
    a = draw.alphas
    mags = (a * draw.gammas / mT) ** (-1.0 / a)
    keep = mags >= _MAG_FLOOR
    vectors = mags[keep, None] * draw.directions[keep]
    return _assemble(grid, draw.times[keep], vectors, np.zeros(sigma.dimension))


def truncation_bound(q: LayeredQ, sigma: SphericalMeasure, gamma_cap: float) -> float:
    """Upper bound on the magnitude of any discarded series term."""
    return q.series_magnitude(gamma_cap, sigma.total_mass())


def stable_truncation_bound(alpha: float, sigma: SphericalMeasure,
                            gamma_cap: float) -> float:
    return (alpha * gamma_cap / sigma.total_mass()) ** (-1.0 / alpha)
