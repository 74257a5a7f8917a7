"""Numerical charts for products of tropical polytopes.

Max-plus coordinates are sent through ``exp`` (with ``exp(-inf) = 0``). Under
this chart the metric ``rho`` becomes the ordinary sup metric, -inf becomes
the ordinary point 0, and max-plus combinations become max-times ones, so the
probe only ever handles nonnegative floats.

Every factor is parameterized by normalized generator weights: ``lam`` in
[0,1]^n with ``max lam = 1``, split into faces ``lam_k = 1``. Points are
``comb(lam) = max_i lam_i * g_i``, which is monotone in ``lam``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from ..convexity import TropicalPolytope, hull_member
from ..measures import MAX_PLUS
from ..semiring import LOG_FLOOR, NEG_INF, exp_or_zero

__all__ = ["ChartFactor", "ChartDomain", "ChartMap"]


def _to_chart_coords(point, flavor) -> np.ndarray:
    if flavor == MAX_PLUS:
        return np.array([exp_or_zero(v) for v in point], dtype=float)
    return np.array([float(v) for v in point], dtype=float)


def _from_chart_coords(arr, flavor) -> tuple:
    if flavor == MAX_PLUS:
        return tuple(NEG_INF if v < LOG_FLOOR else float(np.log(v)) for v in arr)
    return tuple(float(v) for v in arr)


class ChartFactor:
    def __init__(self, polytope: TropicalPolytope):
        self.polytope = polytope
        self.flavor = polytope.flavor
        self.gens = np.array([_to_chart_coords(g, self.flavor) for g in polytope.generators])

    @property
    def n(self) -> int:
        return self.gens.shape[0]

    @property
    def dim(self) -> int:
        return self.gens.shape[1]

    def comb(self, lam: np.ndarray) -> np.ndarray:
        """``max_i lam_i * g_i`` for weight rows ``lam`` of shape ``(m, n)``."""
        return np.max(lam[:, :, None] * self.gens[None, :, :], axis=1)

    def representation(self, z: np.ndarray) -> np.ndarray:
        """Projection weights of a chart point (the max-times projection)."""
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(self.gens > 0, z[None, :] / np.where(self.gens > 0, self.gens, 1.0), np.inf)
        return np.minimum(1.0, ratio.min(axis=1))


class ChartDomain:
    """A product of polytope factors in chart coordinates."""

    def __init__(self, factors: Sequence[TropicalPolytope]):
        self.factors = [ChartFactor(p) for p in factors]
        self.flavor = self.factors[0].flavor
        self.dim = sum(f.dim for f in self.factors)
        self.free_dim = sum(f.n - 1 for f in self.factors)
        self.faces = np.array(list(itertools.product(*(range(f.n) for f in self.factors))), dtype=int)
        self.upper = np.concatenate([f.gens.max(axis=0) for f in self.factors])
        self.comb_lipschitz = max(float(f.gens.max()) for f in self.factors)
        self._coord_slices = []
        self._free_slices = []
        c = k = 0
        for f in self.factors:
            self._coord_slices.append(slice(c, c + f.dim))
            self._free_slices.append(slice(k, k + f.n - 1))
            c += f.dim
            k += f.n - 1

    def split(self, point) -> list:
        if len(point) != self.dim:
            raise ValueError(f"expected a point of dimension {self.dim}, got {len(point)}")
        return [tuple(point[s]) for s in self._coord_slices]

    def contains(self, point, tol: float = 1e-9) -> bool:
        try:
            return all(hull_member(part, f.polytope, tol) for part, f in zip(self.split(point), self.factors))
        except ValueError:  # coordinates outside the flavor's range
            return False

    def to_chart(self, point) -> np.ndarray:
        return np.concatenate([_to_chart_coords(part, self.flavor) for part in self.split(tuple(point))])

    def from_chart(self, z: np.ndarray) -> tuple:
        return _from_chart_coords(z, self.flavor)

    def lambdas(self, faces: np.ndarray, free: np.ndarray) -> list:
        """Full weight arrays per factor from face indices and free coordinates."""
        m = free.shape[0]
        out = []
        for i, (f, s) in enumerate(zip(self.factors, self._free_slices)):
            lam = np.ones((m, f.n))
            sub = free[:, s]
            for k in range(f.n):
                rows = faces[:, i] == k
                if rows.any():
                    cols = [j for j in range(f.n) if j != k]
                    lam[np.ix_(rows, cols)] = sub[rows]
            out.append(lam)
        return out

    def points(self, faces: np.ndarray, free: np.ndarray) -> np.ndarray:
        lams = self.lambdas(faces, free)
        return np.concatenate([f.comb(lam) for f, lam in zip(self.factors, lams)], axis=1)

    def sample_points(self, count: int, seed: int) -> np.ndarray:
        """Stratified low-discrepancy points: faces in rotation, Halton free coordinates."""
        if count <= 0:
            return np.zeros((0, self.dim))
        faces = self.faces[np.arange(count) % len(self.faces)]
        if self.free_dim:
            free = qmc.Halton(d=self.free_dim, scramble=True, seed=seed).random(count)
        else:
            free = np.zeros((count, 0))
        return self.points(faces, free)

    def local_samples(self, center: np.ndarray, radius: float, count: int,
                      rng: np.random.Generator, max_rounds: int = 50) -> np.ndarray:
        """Domain points within ``radius`` (sup metric) of a domain point ``center``.

        Each factor's projection weights are perturbed, either all at once or
        on a random subset, and renormalized; this reaches every stratum of the
        weight simplex around the center. Candidates outside the ball are
        discarded.
        """
        reps = [f.representation(center[s]) for f, s in zip(self.factors, self._coord_slices)]
        found = []
        total = 0
        batch = max(4 * count, 64)
        for _ in range(max_rounds):
            parts = []
            for f, lam0 in zip(self.factors, reps):
                scale = radius * rng.uniform(0.05, 1.5, size=(batch, 1))
                noise = rng.uniform(-1.0, 1.0, size=(batch, f.n)) * scale
                subset = rng.random((batch, f.n)) < 0.5
                whole = rng.random((batch, 1)) < 0.5
                noise = np.where(whole | subset, noise, 0.0)
                lam = np.clip(lam0[None, :] + noise, 0.0, 1.0)
                top = lam.max(axis=1, keepdims=True)
                lam = np.where(top > 0, lam / np.where(top > 0, top, 1.0), lam0[None, :])
                parts.append(f.comb(lam))
            z = np.concatenate(parts, axis=1)
            dist = np.abs(z - center[None, :]).max(axis=1)
            keep = z[(dist <= radius) & (dist > 0)]
            found.append(keep)
            total += len(keep)
            if total >= count:
                break
        z = np.concatenate(found, axis=0) if found else np.zeros((0, self.dim))
        return z[:count]


@dataclass
class ChartMap:
    """A monotone map between chart domains, vectorized over rows."""

    name: str
    flavor: str
    source: ChartDomain
    target: ChartDomain
    func: Callable[[np.ndarray], np.ndarray]
    lipschitz: float

    @property
    def parameter_lipschitz(self) -> float:
        """Lipschitz bound of ``F o comb`` in the sup metric on generator weights."""
        return self.lipschitz * self.source.comb_lipschitz

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        return self.func(z)
