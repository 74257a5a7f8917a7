"""Finitely supported idempotent measures in the max-plus and max-times models.

A measure on a finite space is its weight vector. Max-plus measures carry
weights in [-inf, 0] with maximum exactly 0; max-times measures carry weights
in [0, 1] with maximum exactly 1. Evaluation on a function is the
corresponding idempotent integral:

    mu(phi) = max_x (w(x) + phi(x))        nu(phi) = max_x (w(x) * phi(x))
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar, Mapping, Union

from .semiring import (
    NEG_INF,
    decode_scalar,
    encode_scalar,
    exp_or_zero,
    mp_join,
    mp_mul,
    to_maxplus,
)

__all__ = [
    "MAX_PLUS",
    "MAX_TIMES",
    "NORMALIZATION_TOL",
    "NormalizationError",
    "SpaceMismatchError",
    "FiniteSpace",
    "FunctionOnSpace",
    "MaxPlusMeasure",
    "MaxTimesMeasure",
    "measure_class",
    "eval_mp",
    "eval_mt",
    "evaluate",
    "dirac",
    "normalize",
    "pushforward",
    "density_mp",
    "density_oracle",
    "iso_gX",
    "iso_gX_inv",
    "transport_lh",
    "measure_to_json",
    "measure_from_json",
]

MAX_PLUS = "max-plus"
MAX_TIMES = "max-times"

NORMALIZATION_TOL = 1e-12


class NormalizationError(ValueError):
    """A weight family does not attain the unit of its model."""


class SpaceMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteSpace:
    """A finite ordered set of distinct hashable labels."""

    points: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise ValueError("a finite space needs at least one point")
        index = {}
        for i, p in enumerate(pts):
            if p in index:
                raise ValueError(f"duplicate point label {p!r}")
            index[p] = i
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_index", index)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, x):
        try:
            return x in self._index
        except TypeError:
            return False

    def index(self, x) -> int:
        try:
            return self._index[x]
        except (KeyError, TypeError):
            raise KeyError(f"unknown point {x!r}") from None


def _as_space(space) -> FiniteSpace:
    return space if isinstance(space, FiniteSpace) else FiniteSpace(tuple(space))


@dataclass(frozen=True)
class FunctionOnSpace:
    """A real function on a finite space, stored as values aligned with the points."""

    space: FiniteSpace
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "space", _as_space(self.space))
        vals = tuple(self.values)
        if len(vals) != len(self.space):
            raise ValueError(f"{len(vals)} values for a space of {len(self.space)} points")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, space, mapping: Mapping) -> "FunctionOnSpace":
        space = _as_space(space)
        try:
            return cls(space, tuple(mapping[x] for x in space))
        except KeyError as exc:
            raise ValueError(f"function has no value at {exc.args[0]!r}") from None

    @classmethod
    def constant(cls, space, c) -> "FunctionOnSpace":
        space = _as_space(space)
        return cls(space, (c,) * len(space))

    def __call__(self, x):
        return self.values[self.space.index(x)]


class _FiniteMeasure:
    """Shared validation for the two measure models."""

    model: ClassVar[str]
    unit: ClassVar
    bottom: ClassVar

    space: FiniteSpace
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "space", _as_space(self.space))
        ws = tuple(self._coerce(w) for w in self.weights)
        if len(ws) != len(self.space):
            raise ValueError(f"{len(ws)} weights for a space of {len(self.space)} points")
        top = max(ws)
        if top is NEG_INF or abs(top - self.unit) > NORMALIZATION_TOL:
            raise NormalizationError(
                f"{self.model} weights must attain {self.unit} exactly, max is {top}"
            )
        ws = tuple(self.unit if (w is not NEG_INF and (w > self.unit or w == top)) else w
                   for w in ws)
        object.__setattr__(self, "weights", ws)

    def weight(self, x):
        return self.weights[self.space.index(x)]

    def as_dict(self) -> dict:
        return dict(zip(self.space.points, self.weights))

    def support(self) -> tuple:
        return tuple(x for x, w in zip(self.space.points, self.weights) if w != self.bottom)

    def prune(self):
        """Drop atoms of bottom weight."""
        keep = [(x, w) for x, w in zip(self.space.points, self.weights) if w != self.bottom]
        return type(self)(FiniteSpace(tuple(x for x, _ in keep)), tuple(w for _, w in keep))


@dataclass(frozen=True)
class MaxPlusMeasure(_FiniteMeasure):
    space: FiniteSpace
    weights: tuple

    model: ClassVar[str] = MAX_PLUS
    unit: ClassVar = 0.0
    bottom: ClassVar = NEG_INF

    @staticmethod
    def _coerce(w):
        if w is NEG_INF:
            return w
        w = float(w)
        if math.isnan(w) or w == -math.inf:
            raise ValueError(f"max-plus weight {w!r} is not a number of R_max")
        if w > NORMALIZATION_TOL:
            raise NormalizationError(f"max-plus weight {w!r} exceeds the unit 0")
        return w


@dataclass(frozen=True)
class MaxTimesMeasure(_FiniteMeasure):
    space: FiniteSpace
    weights: tuple

    model: ClassVar[str] = MAX_TIMES
    unit: ClassVar = 1.0
    bottom: ClassVar = 0.0

    @staticmethod
    def _coerce(w):
        if w is NEG_INF:
            raise ValueError("max-times weights cannot be -inf")
        w = float(w)
        if not 0.0 <= w:
            raise ValueError(f"max-times weight {w!r} is negative")
        if w > 1.0 + NORMALIZATION_TOL:
            raise NormalizationError(f"max-times weight {w!r} exceeds the unit 1")
        return w


Measure = Union[MaxPlusMeasure, MaxTimesMeasure]


def measure_class(model: str):
    if model == MAX_PLUS:
        return MaxPlusMeasure
    if model == MAX_TIMES:
        return MaxTimesMeasure
    raise ValueError(f"unknown model {model!r}")


def _same_space(m, phi: FunctionOnSpace):
    if m.space != phi.space:
        raise SpaceMismatchError("measure and function live on different spaces")


def eval_mp(mu: MaxPlusMeasure, phi: FunctionOnSpace):
    """``max_x (w(x) + phi(x))``."""
    _same_space(mu, phi)
    out = NEG_INF
    for w, v in zip(mu.weights, phi.values):
        out = mp_join(out, mp_mul(w, v))
    return out


def eval_mt(nu: MaxTimesMeasure, phi: FunctionOnSpace) -> float:
    """``max_x (w(x) * phi(x))`` for ``phi`` with values in [0, 1]."""
    _same_space(nu, phi)
    out = 0.0
    for w, v in zip(nu.weights, phi.values):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"function value {v!r} outside [0, 1]")
        out = max(out, w * v)
    return out


def evaluate(m: Measure, phi: FunctionOnSpace):
    return eval_mp(m, phi) if m.model == MAX_PLUS else eval_mt(m, phi)


def dirac(x, space, model: str = MAX_PLUS) -> Measure:
    cls = measure_class(model)
    space = _as_space(space)
    i = space.index(x)
    return cls(space, tuple(cls.unit if j == i else cls.bottom for j in range(len(space))))


def normalize(raw: Mapping, model: str = MAX_PLUS, space=None) -> Measure:
    """Rescale a weight map so its maximum is the unit.

    Max-plus subtracts the maximum, max-times divides by it. Points of
    ``space`` absent from ``raw`` get bottom weight.
    """
    cls = measure_class(model)
    space = _as_space(space if space is not None else tuple(raw))
    for key in raw:
        space.index(key)
    if model == MAX_PLUS:
        ws = [raw.get(x, NEG_INF) for x in space]
        ws = [w if w is NEG_INF else float(w) for w in ws]
        top = max(ws)
        if top is NEG_INF:
            raise NormalizationError("all weights are -inf")
        ws = [w if w is NEG_INF else w - top for w in ws]
    else:
        ws = [float(raw.get(x, 0.0)) for x in space]
        if any(w < 0 for w in ws):
            raise ValueError("max-times weights must be nonnegative")
        top = max(ws)
        if top <= 0:
            raise NormalizationError("all weights are 0")
        ws = [w / top for w in ws]
    return cls(space, tuple(ws))


def pushforward(f: Union[Mapping, Callable], m: Measure, target=None) -> Measure:
    """Image measure: the weight at ``y`` is the join of weights over ``f^-1(y)``."""
    fn = f.__getitem__ if isinstance(f, Mapping) else f
    images = [fn(x) for x in m.space]
    if target is None:
        target = FiniteSpace(tuple(dict.fromkeys(images)))
    target = _as_space(target)
    cls = type(m)
    ws = [cls.bottom] * len(target)
    for y, w in zip(images, m.weights):
        j = target.index(y)
        ws[j] = mp_join(ws[j], w) if cls is MaxPlusMeasure else max(ws[j], w)
    return cls(target, tuple(ws))


def density_mp(mu: MaxPlusMeasure, x):
    """Density of ``mu`` at ``x``; on a finite space this is the stored weight."""
    return mu.weight(x)


def density_oracle(m: Measure, x, depth: int = 40):
    """Density at ``x`` in log scale via the infimum over bump functions.

    The bumps equal the model's unit at ``x`` and ``-k`` (max-plus) or
    ``e^-k`` (max-times) elsewhere, for ``k = 0..depth``. Returns an R_max
    value; for max-times this is ``inf_k ln nu(phi_k)``.
    """
    i = m.space.index(x)
    best = None
    for k in range(depth + 1):
        if m.model == MAX_PLUS:
            phi = FunctionOnSpace(m.space, tuple(0.0 if j == i else -float(k)
                                                 for j in range(len(m.space))))
            val = eval_mp(m, phi)
        else:
            floor = math.exp(-k)
            phi = FunctionOnSpace(m.space, tuple(1.0 if j == i else floor
                                                 for j in range(len(m.space))))
            val = to_maxplus(eval_mt(m, phi))
        if best is None or val < best:
            best = val
    return best


def iso_gX(nu: MaxTimesMeasure) -> MaxPlusMeasure:
    """Componentwise ``ln`` of the weights (the homeomorphism A.X -> IX)."""
    return MaxPlusMeasure(nu.space, tuple(to_maxplus(w) for w in nu.weights))


def iso_gX_inv(mu: MaxPlusMeasure) -> MaxTimesMeasure:
    return MaxTimesMeasure(mu.space, tuple(exp_or_zero(w) for w in mu.weights))


def transport_lh(nu: MaxTimesMeasure, h) -> MaxPlusMeasure:
    """Send ``V l_i . delta_{x_i}`` to ``V (ln l_i + delta_{h(x_i)})``.

    ``h`` is an :class:`~idemconv.convexity.AffineEmbedding` (or any object
    with ``contains`` and ``__call__``); atoms are coordinate tuples. Atoms with
    a common image have their weights joined.
    """
    raw = {}
    for x, w in zip(nu.space, nu.weights):
        if not h.contains(x):
            raise ValueError(f"atom {x!r} lies outside the domain of the embedding")
        y = tuple(h(x))
        raw[y] = mp_join(raw.get(y, NEG_INF), to_maxplus(w))
    return MaxPlusMeasure(FiniteSpace(tuple(raw)), tuple(raw.values()))


def _label_to_json(x):
    if isinstance(x, tuple):
        return [encode_scalar(v) for v in x]
    return x


def _label_from_json(x):
    if isinstance(x, list):
        return tuple(decode_scalar(v) for v in x)
    if isinstance(x, (str, int)) and not isinstance(x, bool):
        return x
    raise ValueError(f"unsupported point label {x!r}")


def measure_to_json(m: Measure) -> dict:
    labels = [_label_to_json(x) for x in m.space]
    weights = [encode_scalar(w) for w in m.weights]
    if all(isinstance(x, str) for x in m.space):
        weights = dict(zip(labels, weights))
    return {"model": m.model, "space": labels, "weights": weights}


def measure_from_json(obj: Mapping) -> Measure:
    """Inverse of :func:`measure_to_json`.

    ``weights`` is either an object keyed by (string) labels or a list aligned
    with ``space``.
    """
    if not isinstance(obj, Mapping):
        raise ValueError("measure JSON must be an object")
    try:
        model, labels, weights = obj["model"], obj["space"], obj["weights"]
    except KeyError as exc:
        raise ValueError(f"measure JSON is missing {exc.args[0]!r}") from None
    cls = measure_class(model)
    if not isinstance(labels, list):
        raise ValueError("'space' must be a list of labels")
    space = FiniteSpace(tuple(_label_from_json(x) for x in labels))
    if isinstance(weights, Mapping):
        if set(weights) != {str(x) for x in labels} or not all(isinstance(x, str) for x in labels):
            raise ValueError("weights object must be keyed by exactly the (string) labels")
        raw = [weights[x] for x in space]
    elif isinstance(weights, list):
        raw = weights
    else:
        raise ValueError("'weights' must be an object or a list")
    allow_bottom = cls is MaxPlusMeasure
    return cls(space, tuple(decode_scalar(w, allow_bottom=allow_bottom) for w in raw))
