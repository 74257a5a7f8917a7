"""Max-plus and max-times convex combinations and tropical polytopes.

Points are tuples of coordinates: R_max values for max-plus, floats in
[0, 1] for max-times. A :class:`TropicalPolytope` is the set of all
normalized combinations of its generators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .measures import MAX_PLUS, MAX_TIMES, NormalizationError
from .semiring import (
    ATOL,
    NEG_INF,
    check_unit,
    decode_scalar,
    default_depth,
    embed_g,
    encode_scalar,
    mp_join,
    mp_mul,
    mp_sub,
    rho_metric,
    to_maxplus,
)

__all__ = [
    "DimensionError",
    "TropicalPolytope",
    "ComboWeights",
    "AffineEmbedding",
    "AffineReport",
    "ID",
    "AD",
    "box",
    "product",
    "mp_combination",
    "mt_combination",
    "combination",
    "s_map",
    "p_map",
    "weights_ln",
    "distance",
    "projection_weights",
    "hull_project",
    "hull_member",
    "hull_witness",
    "build_embedding",
    "embedding_for",
    "check_affine",
    "polytope_to_json",
    "polytope_from_json",
]


class DimensionError(ValueError):
    pass


def _unit(flavor):
    if flavor == MAX_PLUS:
        return 0.0
    if flavor == MAX_TIMES:
        return 1.0
    raise ValueError(f"unknown flavor {flavor!r}")


def _coerce_point(p, flavor) -> tuple:
    if flavor == MAX_PLUS:
        return tuple(v if v is NEG_INF else float(v) for v in p)
    out = []
    for v in p:
        if v is NEG_INF:
            raise ValueError("max-times coordinates cannot be -inf")
        out.append(check_unit(v))
    return tuple(out)


@dataclass(frozen=True)
class TropicalPolytope:
    flavor: str
    generators: tuple

    def __post_init__(self):
        _unit(self.flavor)
        gens = tuple(_coerce_point(g, self.flavor) for g in self.generators)
        if not gens:
            raise ValueError("a polytope needs at least one generator")
        dims = {len(g) for g in gens}
        if len(dims) != 1 or 0 in dims:
            raise DimensionError(f"generators have inconsistent dimensions {sorted(dims)}")
        object.__setattr__(self, "generators", gens)

    @property
    def dim(self) -> int:
        return len(self.generators[0])

    def __len__(self):
        return len(self.generators)


def ID() -> TropicalPolytope:
    """The max-plus compactum I(D) of the two-point space, as a subset of [-inf, 0]^2."""
    return TropicalPolytope(MAX_PLUS, ((0.0, NEG_INF), (NEG_INF, 0.0)))


def AD() -> TropicalPolytope:
    """The max-times compactum A.(D) = {(t, p) in [0,1]^2 : t v p = 1}."""
    return TropicalPolytope(MAX_TIMES, ((1.0, 0.0), (0.0, 1.0)))


def box(lo: float, hi: float, d: int, flavor: str = MAX_TIMES) -> TropicalPolytope:
    """The cube ``[lo, hi]^d`` presented by ``d + 1`` generators."""
    if not lo <= hi:
        raise ValueError("box needs lo <= hi")
    gens = [(lo,) * d]
    for k in range(d):
        gens.append(tuple(hi if j == k else lo for j in range(d)))
    return TropicalPolytope(flavor, tuple(gens))


def product(*polys: TropicalPolytope) -> TropicalPolytope:
    """Coordinatewise product; its generators are all tuples of factor generators."""
    flavors = {p.flavor for p in polys}
    if len(flavors) != 1:
        raise ValueError("cannot take a product of mixed flavors")
    gens = tuple(sum(choice, ()) for choice in itertools.product(*(p.generators for p in polys)))
    return TropicalPolytope(flavors.pop(), gens)


def _check_dims(points) -> int:
    dims = {len(p) for p in points}
    if len(dims) != 1:
        raise DimensionError(f"points have inconsistent dimensions {sorted(dims)}")
    return dims.pop()


def mp_combination(points: Sequence, lambdas: Sequence):
    """``V_i (l_i + x_i)`` for max-plus weights with ``V l_i = 0``."""
    if len(points) != len(lambdas) or not points:
        raise ValueError("need one weight per point and at least one point")
    lambdas = [lam if lam is NEG_INF else float(lam) for lam in lambdas]
    if any(lam is not NEG_INF and lam > 0 for lam in lambdas) or max(lambdas) != 0.0:
        raise NormalizationError(f"max-plus weights must lie in [-inf, 0] with max 0: {lambdas}")
    d = _check_dims(points)
    out = [NEG_INF] * d
    for lam, x in zip(lambdas, points):
        if lam is NEG_INF:
            continue
        for j in range(d):
            out[j] = mp_join(out[j], mp_mul(lam, x[j]))
    return tuple(out)


def mt_combination(points: Sequence, lambdas: Sequence):
    """``V_i l_i * x_i`` for max-times weights with ``V l_i = 1``."""
    if len(points) != len(lambdas) or not points:
        raise ValueError("need one weight per point and at least one point")
    lambdas = [check_unit(lam) for lam in lambdas]
    if max(lambdas) != 1.0:
        raise NormalizationError(f"max-times weights must have max 1: {lambdas}")
    d = _check_dims(points)
    out = [0.0] * d
    for lam, x in zip(lambdas, points):
        for j in range(d):
            out[j] = max(out[j], lam * x[j])
    return tuple(out)


def combination(points, lambdas, flavor):
    return mp_combination(points, lambdas) if flavor == MAX_PLUS else mt_combination(points, lambdas)


@dataclass(frozen=True)
class ComboWeights:
    """A pair ``(t, p)`` in J (max-times, ``t v p = 1``) or J_0 (max-plus, ``t v p = 0``)."""

    flavor: str
    t: object
    p: object

    def __post_init__(self):
        unit = _unit(self.flavor)
        t, p = _coerce_point((self.t, self.p), self.flavor)
        if self.flavor == MAX_PLUS and any(v is not NEG_INF and v > 0 for v in (t, p)):
            raise ValueError("J_0 weights must lie in [-inf, 0]")
        if mp_join(t, p) != unit:
            raise NormalizationError(f"({t}, {p}) is not in {'J_0' if unit == 0 else 'J'}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "p", p)


def _weights(w, flavor):
    if not isinstance(w, ComboWeights):
        w = ComboWeights(flavor, *w)
    if w.flavor != flavor:
        raise ValueError(f"expected {flavor} weights, got {w.flavor}")
    return w


def s_map(x, y, w) -> tuple:
    """Binary max-times combination ``t.x v p.y`` for ``(t, p)`` in J."""
    w = _weights(w, MAX_TIMES)
    return mt_combination([x, y], [w.t, w.p])


def p_map(x, y, w) -> tuple:
    """Binary max-plus combination ``(t + x) v (p + y)`` for ``(t, p)`` in J_0."""
    w = _weights(w, MAX_PLUS)
    return mp_combination([x, y], [w.t, w.p])


def weights_ln(w) -> ComboWeights:
    """``l(t, p) = (ln t, ln p)``: J -> J_0."""
    w = _weights(w, MAX_TIMES)
    return ComboWeights(MAX_PLUS, to_maxplus(w.t), to_maxplus(w.p))


def distance(p, q, flavor: str) -> float:
    """Sup distance; per-coordinate ``rho`` for max-plus, ``|.|`` for max-times."""
    if len(p) != len(q):
        raise DimensionError("points of different dimension")
    if flavor == MAX_PLUS:
        return max((rho_metric(a, b) for a, b in zip(p, q)), default=0.0)
    return max((abs(a - b) for a, b in zip(p, q)), default=0.0)


def projection_weights(p, poly: TropicalPolytope) -> tuple:
    """Largest weights ``l_i <= unit`` with ``l_i . v_i <= p`` for every generator.

    A generator coordinate at the bottom (-inf or 0) imposes no constraint.
    """
    p = _coerce_point(p, poly.flavor)
    if len(p) != poly.dim:
        raise DimensionError(f"point of dimension {len(p)} for a polytope of dimension {poly.dim}")
    lams = []
    if poly.flavor == MAX_PLUS:
        for v in poly.generators:
            lam = 0.0
            for pj, vj in zip(p, v):
                r = mp_sub(pj, vj)
                if r < lam:
                    lam = r
            lams.append(lam)
    else:
        for v in poly.generators:
            lam = 1.0
            for pj, vj in zip(p, v):
                if vj > 0.0:
                    lam = min(lam, pj / vj)
            lams.append(lam)
    return tuple(lams)


def _raw_combination(gens, lams, flavor):
    d = len(gens[0])
    if flavor == MAX_PLUS:
        out = [NEG_INF] * d
        for lam, v in zip(lams, gens):
            for j in range(d):
                out[j] = mp_join(out[j], mp_mul(lam, v[j]))
    else:
        out = [0.0] * d
        for lam, v in zip(lams, gens):
            for j in range(d):
                out[j] = max(out[j], lam * v[j])
    return tuple(out)


def hull_project(p, poly: TropicalPolytope) -> tuple:
    """Tropical projection: ``V_i l_i . v_i`` with the weights of :func:`projection_weights`.

    This is the largest point of the hull below ``p`` whenever some generator
    lies below ``p`` (the weights then attain the unit); otherwise it is the
    largest point of the generated cone below ``p`` and not a hull element.
    """
    lams = projection_weights(p, poly)
    return _raw_combination(poly.generators, lams, poly.flavor)


def hull_witness(p, poly: TropicalPolytope, tol: float = ATOL):
    """Return normalized weights expressing ``p`` (within ``tol``), or ``None``."""
    lams = projection_weights(p, poly)
    top = max(lams)
    if poly.flavor == MAX_PLUS:
        if top is NEG_INF or rho_metric(top, 0.0) > tol:
            return None
        lams = tuple(lam if lam is NEG_INF else lam - top for lam in lams)
    else:
        if top <= 0.0 or 1.0 - top > tol:
            return None
        lams = tuple(lam / top for lam in lams)
    z = combination(poly.generators, lams, poly.flavor)
    if distance(z, _coerce_point(p, poly.flavor), poly.flavor) > tol:
        return None
    return lams


def hull_member(p, poly: TropicalPolytope, tol: float = ATOL) -> bool:
    return hull_witness(p, poly, tol) is not None


@dataclass(frozen=True)
class AffineEmbedding:
    """Coordinatewise ``embed_g``: [0,1]^d -> R^(depth*d), (.,+)-affine.

    The output lists the ``depth`` truncations of ``ln u_1``, then of
    ``ln u_2``, and so on.
    """

    dim: int
    depth: int
    domain: Optional[TropicalPolytope] = field(default=None, compare=False)

    def __post_init__(self):
        if self.dim < 1 or self.depth < 1:
            raise ValueError("embedding needs positive dimension and depth")
        if self.domain is not None and (self.domain.flavor != MAX_TIMES or self.domain.dim != self.dim):
            raise ValueError("embedding domain must be a max-times polytope of matching dimension")

    @property
    def output_dim(self) -> int:
        return self.dim * self.depth

    def contains(self, u) -> bool:
        try:
            u = _coerce_point(u, MAX_TIMES)
        except (TypeError, ValueError):
            return False
        if len(u) != self.dim:
            return False
        return self.domain is None or hull_member(u, self.domain)

    def __call__(self, u) -> tuple:
        if len(u) != self.dim:
            raise DimensionError(f"expected a point of dimension {self.dim}")
        out = ()
        for uj in u:
            out += embed_g(uj, self.depth)
        return out

    def image_polytope(self, poly: TropicalPolytope) -> TropicalPolytope:
        """``h(K)``, generated by the images of the generators of ``K``."""
        return TropicalPolytope(MAX_PLUS, tuple(self(g) for g in poly.generators))


def build_embedding(d: int, depth: int, domain: Optional[TropicalPolytope] = None) -> AffineEmbedding:
    return AffineEmbedding(d, depth, domain)


def embedding_for(points, domain: Optional[TropicalPolytope] = None) -> AffineEmbedding:
    """Embedding whose depth makes it lossless on the given max-times points."""
    points = list(points)
    if domain is not None:
        points += list(domain.generators)
    d = _check_dims(points)
    logs = [to_maxplus(u) for p in points for u in p]
    return AffineEmbedding(d, default_depth(logs), domain)


@dataclass
class AffineReport:
    trials: int
    max_discrepancy: float
    counterexample: Optional[dict]
    tol: float

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def _gap(a, b) -> float:
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


def check_affine(h: Callable, dim: int, model: str = "(.,+)", trials: int = 1000,
                 seed: int = 0, tol: float = 1e-12, sampler: Optional[Callable] = None) -> AffineReport:
    """Compare both sides of the affinity identity on random ``(l, s, k)``.

    ``(.,+)``: ``h(l.s v k) = (ln l + h(s)) v h(k)`` for max-times inputs.
    ``(+,.)``: ``h((l + s) v k) = e^l . h(s) v h(k)`` for max-plus inputs in
    [-inf, 0]^dim.
    """
    rng = np.random.default_rng(seed)
    if model not in ("(.,+)", "(+,.)"):
        raise ValueError(f"unknown affinity model {model!r}")
    if sampler is None:
        if model == "(.,+)":
            def sampler(r):
                return tuple(r.random(dim).tolist())
        else:
            def sampler(r):
                return tuple(NEG_INF if r.random() < 0.1 else -5.0 * v for v in r.random(dim).tolist())
    worst, counter = 0.0, None
    for _ in range(trials):
        s, k = sampler(rng), sampler(rng)
        u = float(rng.random())
        if model == "(.,+)":
            lhs = h(mt_combination([s, k], [u, 1.0]))
            rhs = mp_combination([h(s), h(k)], [to_maxplus(u), 0.0])
        else:
            lam = -5.0 * u
            lhs = h(mp_combination([s, k], [lam, 0.0]))
            rhs = mt_combination([h(s), h(k)], [math.exp(lam), 1.0])
        gap = _gap(tuple(lhs), tuple(rhs))
        if gap > worst:
            worst = gap
        if gap > tol and counter is None:
            counter = {"lambda": u if model == "(.,+)" else -5.0 * u, "s": s, "k": k,
                       "lhs": tuple(lhs), "rhs": tuple(rhs), "discrepancy": gap}
    return AffineReport(trials, worst, counter, tol)


def polytope_to_json(poly: TropicalPolytope) -> dict:
    return {"flavor": poly.flavor,
            "generators": [[encode_scalar(v) for v in g] for g in poly.generators]}


def polytope_from_json(obj) -> TropicalPolytope:
    if not isinstance(obj, dict):
        raise ValueError("polytope JSON must be an object")
    try:
        flavor, gens = obj["flavor"], obj["generators"]
    except KeyError as exc:
        raise ValueError(f"polytope JSON is missing {exc.args[0]!r}") from None
    _unit(flavor)
    if not isinstance(gens, list) or not all(isinstance(g, list) for g in gens):
        raise ValueError("'generators' must be a list of coordinate lists")
    allow = flavor == MAX_PLUS
    return TropicalPolytope(flavor, tuple(tuple(decode_scalar(v, allow) for v in g) for g in gens))
