"""Finite positive measures on the unit sphere S^{d-1}.

These act as the spectral (direction) measures of all the jump processes:
they are sampled for the jump directions V_i and their first/second moments
enter every drift and covariance constant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class SphericalMeasure:
    """Finite positive measure on S^{d-1}.

    Either a discrete measure (atoms with positive weights) or the
    rotation-invariant measure with a given total mass.  Immutable and
    thread-safe; sampling takes an external rng.
    """

    dimension: int
    atoms: np.ndarray | None = None      # (n, d) unit vectors
    weights: np.ndarray | None = None    # (n,) positive
    uniform_mass: float | None = None
    _cum: np.ndarray = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.uniform_mass is not None:
            if self.uniform_mass <= 0:
                raise ValueError("uniform measure needs positive total mass")
            if self.atoms is not None:
                raise ValueError("measure is either discrete or uniform, not both")
        else:
            if self.atoms is None or self.weights is None:
                raise ValueError("discrete measure needs atoms and weights")
            atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
            weights = np.asarray(self.weights, dtype=float)
            if atoms.shape[0] != weights.shape[0]:
                raise ValueError("atoms and weights length mismatch")
            if atoms.shape[1] != self.dimension:
                raise ValueError("atom dimension mismatch")
            if np.any(weights <= 0):
                raise ValueError("all weights must be strictly positive")
            norms = np.linalg.norm(atoms, axis=1)
            if np.any(norms == 0):
                raise ValueError("zero vector is not a direction")
            atoms = atoms / norms[:, None]
            if self.dimension == 1 and not np.all(np.isin(atoms.ravel(), (-1.0, 1.0))):
                raise ValueError("for d=1 the only directions are +1 and -1")
            if np.any(np.abs(np.linalg.norm(atoms, axis=1) - 1.0) > _NORM_TOL):
                raise ValueError("atom directions must be unit vectors")
            object.__setattr__(self, "atoms", atoms)
            object.__setattr__(self, "weights", weights)
            object.__setattr__(self, "_cum", np.cumsum(weights))

    # -- constructors -------------------------------------------------

    @classmethod
    def discrete(cls, atoms, weights) -> "SphericalMeasure":
        atoms = np.atleast_2d(np.asarray(atoms, dtype=float))
        return cls(dimension=atoms.shape[1], atoms=atoms, weights=np.asarray(weights, float))

    @classmethod
    def uniform(cls, dimension: int, mass: float) -> "SphericalMeasure":
        if dimension == 1:
            # S^0 is the two-point set; equal mass on +1 and -1.
            return cls.discrete([[1.0], [-1.0]], [mass / 2.0, mass / 2.0])
        return cls(dimension=dimension, uniform_mass=float(mass))

    @classmethod
    def symmetric_pair(cls, mass: float = 2.0) -> "SphericalMeasure":
        """The workhorse d=1 measure with equal atoms at +1 and -1."""
        return cls.discrete([[1.0], [-1.0]], [mass / 2.0, mass / 2.0])

    # -- basic functionals --------------------------------------------

    @property
    def is_uniform(self) -> bool:
        return self.uniform_mass is not None

    def total_mass(self) -> float:
        if self.is_uniform:
            return float(self.uniform_mass)
        return float(np.sum(self.weights))

    def first_moment(self) -> np.ndarray:
        """Unnormalized integral of xi over the measure."""
        if self.is_uniform:
            return np.zeros(self.dimension)
        return self.weights @ self.atoms

    def second_moment(self) -> np.ndarray:
        """Integral of the outer product xi xi' over the measure."""
        if self.is_uniform:
            return (self.uniform_mass / self.dimension) * np.eye(self.dimension)
        return (self.atoms * self.weights[:, None]).T @ self.atoms

    def mean_direction(self) -> np.ndarray:
        """first_moment / total_mass; the z0 of the stable series centering."""
        return self.first_moment() / self.total_mass()

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        """True when the measure is invariant under xi -> -xi."""
        if self.is_uniform:
            return True
        # match every atom to its antipode with equal weight
        for a, w in zip(self.atoms, self.weights):
            dots = self.atoms @ (-a)
            j = int(np.argmax(dots))
            if dots[j] < 1.0 - 1e-10 or abs(self.weights[j] - w) > tol:
                return False
        return True

    # -- sampling -----------------------------------------------------

    def sample_directions(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw n iid directions from the normalized measure; shape (n, d)."""
        if self.is_uniform:
            g = rng.standard_normal((n, self.dimension))
            return g / np.linalg.norm(g, axis=1, keepdims=True)
        u = rng.random(n) * self._cum[-1]
        idx = np.searchsorted(self._cum, u, side="right")
        return self.atoms[idx]

    def sample_direction(self, rng: np.random.Generator) -> np.ndarray:
        return self.sample_directions(rng, 1)[0]

    def scaled(self, factor) -> "SphericalMeasure":
        """New measure with weights multiplied by factor (scalar or per-atom)."""
        if self.is_uniform:
            return SphericalMeasure.uniform(self.dimension, self.uniform_mass * float(factor))
        return SphericalMeasure.discrete(self.atoms, self.weights * np.asarray(factor, float))


def parse_spherical_spec(text: str) -> SphericalMeasure:
    """Parse the CLI/config measure syntax.

    ``discrete:[(x1,...,xd):w, ...]`` or ``uniform:d:mass``.
    """
    text = text.strip()
    if text.startswith("uniform:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad uniform spec: {text!r}")
        return SphericalMeasure.uniform(int(parts[1]), float(parts[2]))
    if text.startswith("discrete:"):
        body = text[len("discrete:"):].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"bad discrete spec: {text!r}")
        atoms, weights = [], []
        for chunk in _split_atoms(body[1:-1]):
            vec, _, w = chunk.rpartition(":")
            vec = vec.strip()
            if not (vec.startswith("(") and vec.endswith(")")):
                raise ValueError(f"bad atom {chunk!r} in {text!r}")
            atoms.append([float(x) for x in vec[1:-1].split(",")])
            weights.append(float(w))
        return SphericalMeasure.discrete(atoms, weights)
    raise ValueError(f"unknown spherical measure spec: {text!r}")


def _split_atoms(body: str):
    depth = 0
    start = 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            yield body[start:i].strip()
            start = i + 1
    tail = body[start:].strip()
    if tail:
        yield tail
