"""Map builders and the bundled probe fixtures."""

from __future__ import annotations

from typing import Sequence, Union

from ..convexity import AD, ID, TropicalPolytope, box
from ..measures import MAX_PLUS, MAX_TIMES
from .expr import PiecewiseMapSpec

__all__ = ["s_map_spec", "p_map_spec", "vee_spec", "identity_spec", "FIXTURES", "fixture", "fixture_names"]

Factors = Union[TropicalPolytope, Sequence[TropicalPolytope]]


def _factors(X: Factors) -> tuple:
    return (X,) if isinstance(X, TropicalPolytope) else tuple(X)


def _binary_combination(X: Factors, flavor: str, name: str, pins=()) -> PiecewiseMapSpec:
    factors = _factors(X)
    d = sum(f.dim for f in factors)
    op = "mul" if flavor == MAX_TIMES else "add"
    t, p = ["coord", 2 * d], ["coord", 2 * d + 1]
    exprs = [["max", [op, t, ["coord", j]], [op, p, ["coord", d + j]]] for j in range(d)]
    weights = AD() if flavor == MAX_TIMES else ID()
    return PiecewiseMapSpec(flavor, factors + factors + (weights,), factors, tuple(exprs), name, pins)


def s_map_spec(X: Factors, name: str = "s_map", pins=()) -> PiecewiseMapSpec:
    """``(x, y, t, p) -> t.x v p.y`` on ``X x X x J``; J is presented as A.D."""
    return _binary_combination(X, MAX_TIMES, name, pins)


def p_map_spec(Y: Factors, name: str = "p_map", pins=()) -> PiecewiseMapSpec:
    """``(x, y, t, p) -> (t+x) v (p+y)`` on ``Y x Y x J_0``; J_0 is presented as ID."""
    return _binary_combination(Y, MAX_PLUS, name, pins)


def vee_spec(X: Factors, name: str = "vee", pins=()) -> PiecewiseMapSpec:
    """``(x, y) -> x v y`` on ``X x X``."""
    factors = _factors(X)
    d = sum(f.dim for f in factors)
    exprs = [["max", ["coord", j], ["coord", d + j]] for j in range(d)]
    return PiecewiseMapSpec(factors[0].flavor, factors + factors, factors, tuple(exprs), name, pins)


def identity_spec(X: Factors, name: str = "identity") -> PiecewiseMapSpec:
    factors = _factors(X)
    d = sum(f.dim for f in factors)
    # max(x, x) keeps every tree a proper operator node
    exprs = [["max", ["coord", j], ["coord", j]] for j in range(d)]
    return PiecewiseMapSpec(factors[0].flavor, factors, factors, tuple(exprs), name)


# points where the local image of the eps-ball collapses onto a lower-dimensional set
VEE_PIN = (0.0, -1.0, -1.0, 0.0)
AD2_PIN = (1.0, 0.5, 0.5, 1.0, 0.5, 1.0, 1.0, 0.5, 1.0, 1.0)


def _fixtures() -> dict:
    return {
        "vee-on-ID": lambda: vee_spec(ID(), "vee-on-ID", pins=(VEE_PIN,)),
        "s-on-[0.25,1]^2": lambda: s_map_spec(box(0.25, 1.0, 2), "s-on-[0.25,1]^2"),
        "s-on-AD": lambda: s_map_spec(AD(), "s-on-AD"),
        "s-on-AD-x-AD": lambda: s_map_spec((AD(), AD()), "s-on-AD-x-AD", pins=(AD2_PIN,)),
        # exploratory only: the corresponding openness question is not settled
        "s-on-[0,1]^2": lambda: s_map_spec(box(0.0, 1.0, 2), "s-on-[0,1]^2"),
        "p-on-ID": lambda: p_map_spec(ID(), "p-on-ID"),
        "identity-on-[0,1]^2": lambda: identity_spec(box(0.0, 1.0, 2), "identity-on-[0,1]^2"),
    }


FIXTURES = _fixtures()


def fixture_names() -> list:
    return sorted(FIXTURES)


def fixture(name: str) -> PiecewiseMapSpec:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}") from None
