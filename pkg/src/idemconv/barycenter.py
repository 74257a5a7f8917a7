"""Idempotent barycenter maps and their structural checks.

``bary_mp`` and ``bary_mt`` evaluate a finitely supported measure on the
coordinate projections: the t-th coordinate of the barycenter is
``mu(pr_t)``. Measures of measures are :class:`EmbeddedMeasure` objects whose
atoms are the weight vectors of inner measures.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .convexity import (
    AffineEmbedding,
    DimensionError,
    TropicalPolytope,
    embedding_for,
    hull_member,
    mt_combination,
)
from .measures import (
    MAX_PLUS,
    MAX_TIMES,
    FiniteSpace,
    FunctionOnSpace,
    MaxPlusMeasure,
    MaxTimesMeasure,
    eval_mp,
    eval_mt,
    measure_class,
    pushforward,
    transport_lh,
)
from .semiring import NEG_INF, decode_scalar, encode_scalar, mp_join

__all__ = [
    "EmbeddedMeasure",
    "CheckReport",
    "bary_mp",
    "bary_mt",
    "barycenter",
    "bary_mt_batch",
    "measure_point",
    "point_measure",
    "lift_dirac",
    "push_measures",
    "check_monad_identity",
    "check_naturality",
    "check_hombar_square",
    "random_measure",
    "embedded_to_json",
    "embedded_from_json",
]


@dataclass(frozen=True)
class EmbeddedMeasure:
    """A finitely supported measure whose atoms are coordinate vectors.

    Atoms may repeat; the weights obey the same normalization as
    :class:`~idemconv.measures.MaxPlusMeasure` / ``MaxTimesMeasure``.
    """

    model: str
    atoms: tuple
    weights: tuple
    polytope: Optional[TropicalPolytope] = field(default=None, compare=False)

    def __post_init__(self):
        cls = measure_class(self.model)
        atoms = tuple(tuple(a) for a in self.atoms)
        if not atoms:
            raise ValueError("a measure needs at least one atom")
        if len({len(a) for a in atoms}) != 1:
            raise DimensionError("atoms have inconsistent dimensions")
        # normalization and weight ranges are delegated to the measure class
        inner = cls(FiniteSpace(tuple(range(len(atoms)))), tuple(self.weights))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", inner.weights)
        if self.polytope is not None:
            for a in atoms:
                if not hull_member(a, self.polytope):
                    raise ValueError(f"atom {a!r} is not in the attached polytope")

    @property
    def dim(self) -> int:
        return len(self.atoms[0])

    def indexed(self):
        """The weights as a measure on the atom indices."""
        return measure_class(self.model)(FiniteSpace(tuple(range(len(self.atoms)))), self.weights)

    def to_measure(self):
        """The measure on distinct atoms (repeated atoms have their weights joined)."""
        return pushforward(lambda i: self.atoms[i], self.indexed())

    @classmethod
    def from_measure(cls, m) -> "EmbeddedMeasure":
        return cls(m.model, tuple(tuple(x) for x in m.space), m.weights)


def _projection(mu: EmbeddedMeasure, t: int) -> FunctionOnSpace:
    return FunctionOnSpace(FiniteSpace(tuple(range(len(mu.atoms)))), tuple(a[t] for a in mu.atoms))


def bary_mp(mu: EmbeddedMeasure) -> tuple:
    """Max-plus barycenter; coordinate ``t`` is ``mu(pr_t)``."""
    if mu.model != MAX_PLUS:
        raise ValueError("bary_mp needs a max-plus measure")
    m = mu.indexed()
    return tuple(eval_mp(m, _projection(mu, t)) for t in range(mu.dim))


def bary_mt(nu: EmbeddedMeasure) -> tuple:
    """Max-times barycenter; coordinate ``t`` is ``nu(pr_t)``."""
    if nu.model != MAX_TIMES:
        raise ValueError("bary_mt needs a max-times measure")
    m = nu.indexed()
    return tuple(eval_mt(m, _projection(nu, t)) for t in range(nu.dim))


def barycenter(m: EmbeddedMeasure) -> tuple:
    return bary_mp(m) if m.model == MAX_PLUS else bary_mt(m)


def bary_mt_batch(atoms: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Vectorized max-times barycenter.

    ``atoms`` has shape ``(..., n, d)`` and ``weights`` shape ``(..., n)``;
    normalization is the caller's responsibility.
    """
    return np.max(weights[..., :, None] * atoms, axis=-2)


def measure_point(m) -> tuple:
    """A measure on a finite space as a point: its weight vector."""
    return tuple(m.weights)


def point_measure(space, coords, model: str):
    return measure_class(model)(space, tuple(coords))


def lift_dirac(m) -> EmbeddedMeasure:
    """``I(delta_X)(m)``: atoms are the Dirac vectors ``delta_x`` with the weights of ``m``."""
    cls = type(m)
    atoms = []
    for i in range(len(m.space)):
        atoms.append(tuple(cls.unit if j == i else cls.bottom for j in range(len(m.space))))
    return EmbeddedMeasure(m.model, tuple(atoms), m.weights)


def push_measures(big: EmbeddedMeasure, f, source: FiniteSpace, target: FiniteSpace) -> EmbeddedMeasure:
    """``I^2 f``: push every inner measure along ``f`` and join coinciding atoms."""
    raw: dict = {}
    join = mp_join if big.model == MAX_PLUS else max
    for atom, w in zip(big.atoms, big.weights):
        inner = point_measure(source, atom, big.model)
        image = measure_point(pushforward(f, inner, target))
        raw[image] = join(raw[image], w) if image in raw else w
    return EmbeddedMeasure(big.model, tuple(raw), tuple(raw.values()))


@dataclass
class CheckReport:
    name: str
    trials: int = 0
    failures: int = 0
    max_discrepancy: float = 0.0
    worst_case: Optional[dict] = None
    tol: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def record(self, gap: float, case: Callable[[], dict]):
        self.trials += 1
        if gap > self.max_discrepancy:
            self.max_discrepancy = gap
            self.worst_case = case()
        if gap > self.tol:
            self.failures += 1

    def as_dict(self) -> dict:
        return {"name": self.name, "trials": self.trials, "failures": self.failures,
                "max_discrepancy": self.max_discrepancy, "tol": self.tol, "passed": self.ok}


def _gap(a: Sequence, b: Sequence) -> float:
    """Sup of coordinate differences; a bottom/finite mismatch counts as infinite."""
    if len(a) != len(b):
        return math.inf
    worst = 0.0
    for x, y in zip(a, b):
        if x is NEG_INF or y is NEG_INF:
            if x is not y:
                return math.inf
            continue
        worst = max(worst, abs(x - y))
    return worst


MP_GRID = (0.0, -0.5, -1.0, NEG_INF)
MT_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


def random_measure(space: FiniteSpace, model: str, rng: np.random.Generator,
                   dyadic: bool = False, p_bottom: float = 0.2):
    """Random normalized measure; ``dyadic`` keeps max-plus weights on a 1/8 grid."""
    n = len(space)
    if model == MAX_PLUS:
        if dyadic:
            raw = (-rng.integers(0, 41, size=n) / 8.0).tolist()
        else:
            raw = (-5.0 * rng.random(n)).tolist()
        ws = [NEG_INF if rng.random() < p_bottom else w for w in raw]
        finite = [w for w in ws if w is not NEG_INF]
        if not finite:
            ws[int(rng.integers(n))] = 0.0
            finite = [0.0]
        top = max(finite)
        ws = [w if w is NEG_INF else w - top for w in ws]
        return MaxPlusMeasure(space, tuple(ws))
    raw = rng.random(n)
    raw[rng.random(n) < p_bottom] = 0.0
    if raw.max() == 0.0:
        raw[int(rng.integers(n))] = 1.0
    return MaxTimesMeasure(space, tuple((raw / raw.max()).tolist()))


def _grid_measures(space: FiniteSpace, model: str):
    grid = MP_GRID if model == MAX_PLUS else MT_GRID
    cls = measure_class(model)
    for ws in itertools.product(grid, repeat=len(space)):
        if max(ws) == cls.unit:
            yield cls(space, ws)


def check_monad_identity(space, model: str = MAX_PLUS, trials: int = 1000, seed: int = 0,
                         exhaustive: bool = True) -> CheckReport:
    """``beta_{IX} o I(delta_X) = id`` on random (and, optionally, all grid) measures."""
    space = space if isinstance(space, FiniteSpace) else FiniteSpace(tuple(space))
    report = CheckReport(f"monad-identity[{model}]")
    rng = np.random.default_rng(seed)

    def one(m):
        got = barycenter(lift_dirac(m))
        report.record(_gap(got, m.weights), lambda: {"measure": m.weights, "result": got})

    if exhaustive:
        for m in _grid_measures(space, model):
            one(m)
    for _ in range(trials):
        one(random_measure(space, model, rng))
    return report


def _random_big(space: FiniteSpace, model: str, rng, max_atoms: int = 3) -> EmbeddedMeasure:
    k = int(rng.integers(1, max_atoms + 1))
    atoms = [measure_point(random_measure(space, model, rng)) for _ in range(k)]
    outer = random_measure(FiniteSpace(tuple(range(k))), model, rng)
    return EmbeddedMeasure(model, tuple(atoms), outer.weights)


def check_naturality(f, source, target, model: str = MAX_PLUS, trials: int = 1000,
                     seed: int = 0, exhaustive: bool = True) -> CheckReport:
    """``beta_{IY} o I^2 f = If o beta_{IX}`` on random measures of measures.

    With ``exhaustive`` and a two-point source, every two-atom measure of grid
    measures with grid outer weights is checked as well.
    """
    source = source if isinstance(source, FiniteSpace) else FiniteSpace(tuple(source))
    target = target if isinstance(target, FiniteSpace) else FiniteSpace(tuple(target))
    fn = f.__getitem__ if isinstance(f, Mapping) else f
    report = CheckReport(f"naturality[{model}]")
    rng = np.random.default_rng(seed)

    def one(big: EmbeddedMeasure):
        lhs = barycenter(push_measures(big, fn, source, target))
        rhs = measure_point(pushforward(fn, point_measure(source, barycenter(big), model), target))
        report.record(_gap(lhs, rhs), lambda: {"atoms": big.atoms, "weights": big.weights,
                                               "lhs": lhs, "rhs": rhs})

    if exhaustive and len(source) <= 2:
        inner = [measure_point(m) for m in _grid_measures(source, model)]
        outer = list(_grid_measures(FiniteSpace((0, 1)), model))
        for a, b in itertools.product(inner, repeat=2):
            for w in outer:
                one(EmbeddedMeasure(model, (a, b), w.weights))
    for _ in range(trials):
        one(_random_big(source, model, rng))
    return report


def _random_polytope_point(poly: TropicalPolytope, rng) -> tuple:
    lam = rng.random(len(poly))
    lam[rng.random(len(poly)) < 0.3] = 0.0
    lam[int(rng.integers(len(poly)))] = 1.0
    lam = lam / lam.max()
    return mt_combination(poly.generators, lam.tolist())


def check_hombar_square(K: Optional[TropicalPolytope] = None, depth: Optional[int] = None,
                        trials: int = 1000, seed: int = 0, tol: float = 1e-9,
                        max_dim: int = 4, max_atoms: int = 5) -> CheckReport:
    """``h(bary_mt(nu)) = bary_mp(l_h(nu))`` for random finite ``nu`` supported in ``K``.

    Without ``K`` each trial draws a fresh max-times polytope of dimension
    ``<= max_dim``; without ``depth`` the lossless depth for the data is used.
    """
    rng = np.random.default_rng(seed)
    report = CheckReport("hombar-square", tol=tol)
    for _ in range(trials):
        poly = K
        if poly is None:
            d = int(rng.integers(1, max_dim + 1))
            gens = rng.random((int(rng.integers(1, 5)), d))
            gens[rng.random(gens.shape) < 0.15] = 0.0
            poly = TropicalPolytope(MAX_TIMES, tuple(map(tuple, gens.tolist())))
        n = int(rng.integers(1, max_atoms + 1))
        atoms = tuple(_random_polytope_point(poly, rng) for _ in range(n))
        lam = rng.random(n)
        lam[rng.random(n) < 0.2] = 0.0
        lam[int(rng.integers(n))] = 1.0
        nu = EmbeddedMeasure(MAX_TIMES, atoms, tuple((lam / lam.max()).tolist()))
        h = embedding_for(atoms) if depth is None else AffineEmbedding(poly.dim, depth)
        lhs = h(bary_mt(nu))
        rhs = bary_mp(EmbeddedMeasure.from_measure(transport_lh(nu.to_measure(), h)))
        report.record(_gap(lhs, rhs), lambda: {"atoms": atoms, "weights": nu.weights,
                                               "depth": h.depth, "lhs": lhs, "rhs": rhs})
    return report


def embedded_to_json(m: EmbeddedMeasure) -> dict:
    return {"model": m.model,
            "atoms": [[encode_scalar(v) for v in a] for a in m.atoms],
            "weights": [encode_scalar(w) for w in m.weights]}


def embedded_from_json(obj) -> EmbeddedMeasure:
    if not isinstance(obj, dict):
        raise ValueError("measure JSON must be an object")
    try:
        model, atoms, weights = obj["model"], obj["atoms"], obj["weights"]
    except KeyError as exc:
        raise ValueError(f"measure JSON is missing {exc.args[0]!r}") from None
    measure_class(model)
    if not isinstance(atoms, list) or not all(isinstance(a, list) for a in atoms):
        raise ValueError("'atoms' must be a list of coordinate lists")
    if not isinstance(weights, list):
        raise ValueError("'weights' must be a list")
    if len(atoms) != len(weights):
        raise ValueError("need one weight per atom")
    allow = model == MAX_PLUS
    return EmbeddedMeasure(model,
                           tuple(tuple(decode_scalar(v, allow) for v in a) for a in atoms),
                           tuple(decode_scalar(w, allow) for w in weights))
