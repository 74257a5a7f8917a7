"""Expression trees for piecewise tropical-linear maps.

A map is a list of trees, one per output coordinate, in prefix form::

    ["max", ["mul", ["coord", 4], ["coord", 0]], ["mul", ["coord", 5], ["coord", 2]]]

Max-plus maps use ``max``, ``add``, ``coord``, ``const``; max-times maps use
``max``, ``mul``, ``coord``, ``const``. Both kinds are monotone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..convexity import TropicalPolytope, polytope_from_json, polytope_to_json
from ..measures import MAX_PLUS, MAX_TIMES
from ..semiring import NEG_INF, decode_scalar, encode_scalar, exp_or_zero, mp_join, mp_mul
from .chart import ChartDomain, ChartMap

__all__ = ["MapSpecError", "PiecewiseMapSpec", "parse_expr", "expr_to_json"]

ALLOWED = {
    MAX_PLUS: {"max", "add", "coord", "const"},
    MAX_TIMES: {"max", "mul", "coord", "const"},
}


class MapSpecError(ValueError):
    pass


def parse_expr(obj, flavor: str, n_inputs: int) -> tuple:
    """Validate a JSON-style tree and return it as nested tuples."""
    if not isinstance(obj, (list, tuple)) or not obj:
        raise MapSpecError(f"expression node must be a non-empty list, got {obj!r}")
    op, args = obj[0], list(obj[1:])
    if op not in ALLOWED.get(flavor, ()):
        raise MapSpecError(f"operator {op!r} is not allowed in a {flavor} map")
    if op == "coord":
        if len(args) != 1 or isinstance(args[0], bool) or not isinstance(args[0], int):
            raise MapSpecError(f"coord takes one integer index, got {args!r}")
        if not 0 <= args[0] < n_inputs:
            raise MapSpecError(f"coord index {args[0]} out of range for {n_inputs} inputs")
        return ("coord", args[0])
    if op == "const":
        if len(args) != 1:
            raise MapSpecError("const takes one value")
        try:
            c = decode_scalar(args[0], allow_bottom=flavor == MAX_PLUS)
        except ValueError as exc:
            raise MapSpecError(str(exc)) from None
        if flavor == MAX_TIMES and not 0.0 <= c <= 1.0:
            raise MapSpecError(f"max-times constant {c} outside [0, 1]")
        return ("const", c)
    if len(args) < 2:
        raise MapSpecError(f"{op} needs at least two arguments")
    return (op,) + tuple(parse_expr(a, flavor, n_inputs) for a in args)


def expr_to_json(expr):
    if expr[0] == "coord":
        return ["coord", expr[1]]
    if expr[0] == "const":
        return ["const", encode_scalar(expr[1])]
    return [expr[0]] + [expr_to_json(a) for a in expr[1:]]


def _eval_native(expr, point):
    op = expr[0]
    if op == "coord":
        return point[expr[1]]
    if op == "const":
        return expr[1]
    vals = [_eval_native(a, point) for a in expr[1:]]
    out = vals[0]
    for v in vals[1:]:
        if op == "max":
            out = mp_join(out, v) if (out is NEG_INF or v is NEG_INF) else max(out, v)
        elif op == "add":
            out = mp_mul(out, v)
        else:
            out = out * v
    return out


def _compile(expr) -> Callable[[np.ndarray], np.ndarray]:
    """Chart evaluator: ``add`` becomes a product, constants are exponentiated."""
    op = expr[0]
    if op == "coord":
        i = expr[1]
        return lambda z: z[:, i]
    if op == "const":
        c = expr[1]
        return lambda z: np.full(z.shape[0], c)
    subs = [_compile(a) for a in expr[1:]]
    red = np.maximum if op == "max" else np.multiply

    def f(z):
        out = subs[0](z)
        for s in subs[1:]:
            out = red(out, s(z))
        return out

    return f


def _chart_consts(expr, flavor):
    if expr[0] == "const":
        return ("const", exp_or_zero(expr[1]) if flavor == MAX_PLUS else expr[1])
    if expr[0] == "coord":
        return expr
    return (expr[0],) + tuple(_chart_consts(a, flavor) for a in expr[1:])


def _lipschitz(expr, bounds):
    """(Lipschitz constant, upper bound) of a chart expression in the sup metric."""
    op = expr[0]
    if op == "coord":
        return 1.0, float(bounds[expr[1]])
    if op == "const":
        return 0.0, float(expr[1])
    parts = [_lipschitz(a, bounds) for a in expr[1:]]
    if op == "max":
        return max(p[0] for p in parts), max(p[1] for p in parts)
    lip, sup = parts[0]
    for l2, s2 in parts[1:]:
        lip, sup = lip * s2 + l2 * sup, sup * s2
    return lip, sup


@dataclass(frozen=True)
class PiecewiseMapSpec:
    """A monotone map between products of tropical polytopes.

    ``source`` and ``target`` are tuples of polytope factors; a source point is
    the concatenation of one point per factor.
    """

    flavor: str
    source: tuple
    target: tuple
    exprs: tuple
    name: str = ""
    pins: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.flavor not in ALLOWED:
            raise MapSpecError(f"unknown flavor {self.flavor!r}")
        src = tuple(self.source) if not isinstance(self.source, TropicalPolytope) else (self.source,)
        tgt = tuple(self.target) if not isinstance(self.target, TropicalPolytope) else (self.target,)
        for poly in src + tgt:
            if poly.flavor != self.flavor:
                raise MapSpecError("every domain factor must have the map's flavor")
        n_in = sum(p.dim for p in src)
        n_out = sum(p.dim for p in tgt)
        exprs = tuple(parse_expr(e, self.flavor, n_in) for e in self.exprs)
        if len(exprs) != n_out:
            raise MapSpecError(f"{len(exprs)} output expressions for a target of dimension {n_out}")
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "exprs", exprs)
        object.__setattr__(self, "pins", tuple(tuple(p) for p in self.pins))

    @property
    def source_dim(self) -> int:
        return sum(p.dim for p in self.source)

    def __call__(self, point) -> tuple:
        if len(point) != self.source_dim:
            raise MapSpecError(f"expected a source point of dimension {self.source_dim}")
        return tuple(_eval_native(e, tuple(point)) for e in self.exprs)

    def chart_map(self) -> ChartMap:
        src = ChartDomain(self.source)
        tgt = ChartDomain(self.target)
        chart_exprs = [_chart_consts(e, self.flavor) for e in self.exprs]
        fns = [_compile(e) for e in chart_exprs]
        lip = max(_lipschitz(e, src.upper)[0] for e in chart_exprs)

        def func(z):
            return np.stack([f(z) for f in fns], axis=1)

        return ChartMap(self.name or "map", self.flavor, src, tgt, func, lip)

    def to_json(self) -> dict:
        out = {"name": self.name, "flavor": self.flavor,
               "source": [polytope_to_json(p) for p in self.source],
               "target": [polytope_to_json(p) for p in self.target],
               "expr": [expr_to_json(e) for e in self.exprs]}
        if self.pins:
            out["pins"] = [[encode_scalar(v) for v in p] for p in self.pins]
        return out

    @classmethod
    def from_json(cls, obj) -> "PiecewiseMapSpec":
        if not isinstance(obj, dict):
            raise MapSpecError("map spec JSON must be an object")
        try:
            flavor, source, target, exprs = obj["flavor"], obj["source"], obj["target"], obj["expr"]
        except KeyError as exc:
            raise MapSpecError(f"map spec is missing {exc.args[0]!r}") from None

        def factors(v):
            v = [v] if isinstance(v, dict) else v
            if not isinstance(v, list) or not v:
                raise MapSpecError("source/target must be a polytope or a list of polytopes")
            return tuple(polytope_from_json(p) for p in v)

        if not isinstance(exprs, list):
            raise MapSpecError("'expr' must be a list of per-coordinate trees")
        pins = obj.get("pins", [])
        if not isinstance(pins, list):
            raise MapSpecError("'pins' must be a list of points")
        allow = flavor == MAX_PLUS
        pins = tuple(tuple(decode_scalar(v, allow) for v in p) for p in pins)
        return cls(flavor, factors(source), factors(target), tuple(exprs),
                   name=str(obj.get("name", "")), pins=pins)
