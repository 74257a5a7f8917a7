"""SVG rendering of planar hulls and probe witnesses.

Everything is drawn in chart coordinates (max-plus values through ``exp``),
so -inf sits on the axis and the picture is always inside the unit square.
The output is presentation only.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional, Sequence

import numpy as np

from .convexity import TropicalPolytope
from .measures import MAX_PLUS
from .semiring import exp_or_zero

__all__ = ["hull_svg", "witness_svg", "write_svg"]

SIZE = 400
PAD = 30


def _chart(p, flavor) -> tuple:
    if flavor == MAX_PLUS:
        return tuple(exp_or_zero(v) for v in p)
    return tuple(float(v) for v in p)


class _Canvas:
    def __init__(self, lo=(0.0, 0.0), hi=(1.0, 1.0), title: str = ""):
        self.lo, self.hi = np.asarray(lo, float), np.asarray(hi, float)
        span = self.hi - self.lo
        span[span <= 0] = 1.0
        self.span = span
        self.root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                               width=str(SIZE + 2 * PAD), height=str(SIZE + 2 * PAD))
        if title:
            ET.SubElement(self.root, "title").text = title
        frame = self.xy(self.lo) + self.xy(self.hi)
        ET.SubElement(self.root, "rect", x=_f(frame[0]), y=_f(frame[3]), width=_f(frame[2] - frame[0]),
                      height=_f(frame[1] - frame[3]), fill="none", stroke="#999")

    def xy(self, p) -> tuple:
        u = (np.asarray(p, float) - self.lo) / self.span
        return (PAD + SIZE * u[0], PAD + SIZE * (1.0 - u[1]))

    def dot(self, p, r=2.0, fill="#555", **extra):
        x, y = self.xy(p)
        return ET.SubElement(self.root, "circle", cx=_f(x), cy=_f(y), r=_f(r), fill=fill, **extra)

    def polyline(self, pts, stroke="#36c", width=1.5):
        s = " ".join(f"{_f(x)},{_f(y)}" for x, y in (self.xy(p) for p in pts))
        return ET.SubElement(self.root, "polyline", points=s, fill="none", stroke=stroke,
                             **{"stroke-width": _f(width)})

    def square(self, center, half, stroke="#c63"):
        a = self.xy(np.asarray(center) - half)
        b = self.xy(np.asarray(center) + half)
        return ET.SubElement(self.root, "rect", x=_f(a[0]), y=_f(b[1]), width=_f(b[0] - a[0]),
                             height=_f(a[1] - b[1]), fill="none", stroke=stroke,
                             **{"stroke-dasharray": "4 3"})

    def label(self, p, text, dy=-6):
        x, y = self.xy(p)
        t = ET.SubElement(self.root, "text", x=_f(x + 4), y=_f(y + dy),
                          **{"font-size": "11", "font-family": "sans-serif"})
        t.text = text

    def tostring(self) -> str:
        ET.indent(self.root)
        return ET.tostring(self.root, encoding="unicode") + "\n"


def _f(v) -> str:
    return f"{float(v):.3f}"


def _segment(a, b, steps=64) -> list:
    lam = np.linspace(0.0, 1.0, steps)
    a, b = np.asarray(a), np.asarray(b)
    first = [np.maximum(a, t * b) for t in lam]
    second = [np.maximum(t * a, b) for t in lam[::-1]]
    return first + second


def hull_svg(poly: TropicalPolytope, queries: Sequence = (), members: Sequence[bool] = (),
             samples: int = 400, seed: int = 0) -> str:
    """Generators, pairwise tropical segments, a sampled fill and the queries."""
    if poly.dim != 2:
        raise ValueError("hull drawing needs a planar polytope")
    gens = np.array([_chart(g, poly.flavor) for g in poly.generators])
    canvas = _Canvas(title=f"{poly.flavor} hull")
    rng = np.random.default_rng(seed)
    lam = rng.random((samples, len(gens)))
    lam[np.arange(samples), rng.integers(len(gens), size=samples)] = 1.0
    for p in np.max(lam[:, :, None] * gens[None], axis=1):
        canvas.dot(p, r=1.0, fill="#9bd")
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            canvas.polyline(_segment(gens[i], gens[j]))
    for k, g in enumerate(gens):
        canvas.dot(g, r=4.0, fill="#036")
        canvas.label(g, f"g{k}")
    for q, inside in zip(queries, members):
        canvas.dot(_chart(q, poly.flavor), r=4.0, fill="#2a2" if inside else "#c22")
    return canvas.tostring()


def witness_svg(fx, y, delta: float, images: Optional[np.ndarray] = None, title: str = "") -> str:
    """A witness in the (chart) target plane.

    Draws ``F(x)``, the delta-square around it, sampled images of the
    eps-ball and the uncovered target ``y``. All inputs are chart coordinates.
    """
    fx, y = np.asarray(fx, float), np.asarray(y, float)
    if fx.shape != (2,):
        raise ValueError("witness drawing needs a planar target")
    half = 2.0 * delta
    canvas = _Canvas(fx - half, fx + half, title=title)
    if images is not None:
        seen = set()
        for p in np.asarray(images, float):
            if not np.all(np.abs(p - fx) <= half):
                continue
            key = tuple(round(v) for v in canvas.xy(p))  # one dot per pixel
            if key not in seen:
                seen.add(key)
                canvas.dot(p, r=1.2, fill="#9bd")
    canvas.square(fx, delta)
    canvas.dot(fx, r=4.0, fill="#036")
    canvas.label(fx, "F(x)")
    canvas.dot(y, r=4.0, fill="#c22")
    canvas.label(y, "y", dy=14)
    return canvas.tostring()


def write_svg(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
