"""Scalar arithmetic for the max-plus and max-times models.

Max-plus scalars live in R_max = R u {-inf}; the bottom element is the
singleton :data:`NEG_INF`, never a float infinity. Max-times scalars are plain
floats in [0, 1]. The two models are bridged by ``ln``/``exp`` with
``ln 0 = -inf`` and ``exp(-inf) = 0``.
"""

from __future__ import annotations

import math
import numbers
from typing import Iterable, Union

__all__ = [
    "NEG_INF",
    "NegInf",
    "ExtendedReal",
    "ATOL",
    "LOG_FLOOR",
    "is_bottom",
    "mp_join",
    "mp_mul",
    "mp_sub",
    "to_maxplus",
    "to_maxtimes",
    "exp_or_zero",
    "truncate_n",
    "embed_f",
    "embed_g",
    "rho_metric",
    "default_depth",
    "close",
    "check_unit",
    "encode_scalar",
    "decode_scalar",
]

ATOL = 1e-9
# ln of anything below this is taken to be -inf (avoids subnormal noise).
LOG_FLOOR = 1e-300


class NegInf:
    """The bottom element of R_max.

    Absorbing for ``+`` and neutral for ``max``; compares below every real.
    """

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __reduce__(self):
        return "NEG_INF"

    def __repr__(self):
        return "NEG_INF"

    def __str__(self):
        return "-inf"

    def __float__(self):
        return float("-inf")

    def __hash__(self):
        return hash("idemconv.NEG_INF")

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __lt__(self, other):
        if other is self:
            return False
        if isinstance(other, numbers.Real):
            return True
        return NotImplemented

    def __le__(self, other):
        if other is self or isinstance(other, numbers.Real):
            return True
        return NotImplemented

    def __gt__(self, other):
        if other is self or isinstance(other, numbers.Real):
            return False
        return NotImplemented

    def __ge__(self, other):
        if other is self:
            return True
        if isinstance(other, numbers.Real):
            return False
        return NotImplemented

    def __add__(self, other):
        if other is self or isinstance(other, numbers.Real):
            return self
        return NotImplemented

    __radd__ = __add__


NEG_INF = NegInf()

ExtendedReal = Union[float, NegInf]


def is_bottom(a) -> bool:
    return a is NEG_INF


def mp_join(a: ExtendedReal, b: ExtendedReal) -> ExtendedReal:
    """Max-plus addition: ``a v b``."""
    if a is NEG_INF:
        return b
    if b is NEG_INF:
        return a
    return a if a >= b else b


def mp_mul(a: ExtendedReal, b: ExtendedReal) -> ExtendedReal:
    """Max-plus multiplication: ordinary ``+`` with -inf absorbing."""
    if a is NEG_INF or b is NEG_INF:
        return NEG_INF
    return a + b


def mp_sub(a: ExtendedReal, b: ExtendedReal):
    """Residual ``a - b``; returns ``math.inf`` when ``b`` is bottom.

    The result is an ordinary comparison key, not an R_max value: it is only
    used to take minima in tropical projections.
    """
    if b is NEG_INF:
        return math.inf
    if a is NEG_INF:
        return NEG_INF
    return a - b


def check_unit(w: float) -> float:
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"weight {w!r} outside [0, 1]")
    return w


def to_maxplus(w: float, floor: float = LOG_FLOOR) -> ExtendedReal:
    """``ln w`` for ``w`` in [0, 1], with values below ``floor`` sent to -inf."""
    w = check_unit(w)
    if w < floor:
        return NEG_INF
    if w == 1.0:
        return 0.0
    return math.log(w)


def exp_or_zero(a: ExtendedReal) -> float:
    if a is NEG_INF:
        return 0.0
    return math.exp(a)


def to_maxtimes(a: ExtendedReal) -> float:
    """``exp a`` for ``a`` in [-inf, 0]."""
    if a is not NEG_INF and a > 0:
        raise ValueError(f"{a!r} is positive; max-times scalars need a <= 0")
    return exp_or_zero(a)


def truncate_n(t: ExtendedReal, n: int) -> float:
    """The truncation ``f_n(t) = max(t, -n)`` on [-inf, 0]."""
    if n < 1:
        raise ValueError(f"truncation depth must be positive, got {n}")
    if t is NEG_INF:
        return float(-n)
    if t > 0:
        raise ValueError(f"{t!r} is positive; truncation is defined on [-inf, 0]")
    return float(t) if t > -n else float(-n)


def embed_f(t: ExtendedReal, depth: int) -> tuple:
    """``(f_1(t), ..., f_depth(t))``."""
    if depth < 1:
        raise ValueError(f"embedding depth must be positive, got {depth}")
    return tuple(truncate_n(t, n) for n in range(1, depth + 1))


def embed_g(u: float, depth: int) -> tuple:
    """``embed_f(ln u)``: the (.,+)-affine embedding of [0, 1] into R^depth."""
    return embed_f(to_maxplus(u), depth)


def rho_metric(a: ExtendedReal, b: ExtendedReal) -> float:
    """``|e^a - e^b|``, the metric on R_max."""
    return abs(exp_or_zero(a) - exp_or_zero(b))


def default_depth(values: Iterable[ExtendedReal]) -> int:
    """Truncation depth ``ceil(M) + 1`` for the largest finite magnitude ``M``.

    Every ``f_n`` with ``n`` at least this depth fixes all the finite values,
    so the diagonal embedding is lossless on the data.
    """
    m = 0.0
    for v in values:
        if v is not NEG_INF:
            m = max(m, abs(float(v)))
    return int(math.ceil(m)) + 1


def close(a: ExtendedReal, b: ExtendedReal, tol: float = ATOL) -> bool:
    """Absolute comparison; bottom only matches bottom."""
    if a is NEG_INF or b is NEG_INF:
        return a is b
    return abs(a - b) <= tol


def encode_scalar(a: ExtendedReal):
    if a is NEG_INF:
        return "-inf"
    return float(a)


def decode_scalar(v, allow_bottom: bool = True) -> ExtendedReal:
    if isinstance(v, str):
        if v == "-inf" and allow_bottom:
            return NEG_INF
        raise ValueError(f"unexpected scalar token {v!r}")
    if isinstance(v, bool) or not isinstance(v, numbers.Real):
        raise ValueError(f"expected a number, got {v!r}")
    x = float(v)
    if not math.isfinite(x):
        raise ValueError(f"non-finite number {v!r}; use the token \"-inf\"")
    return x
