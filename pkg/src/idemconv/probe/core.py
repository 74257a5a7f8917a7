"""Epsilon-delta openness probing and witness certification.

The probe is a semi-decision procedure. ``open-evidence`` means every
sampled target near ``F(x)`` was reached from the eps-ball around ``x``; it is
evidence, not proof. ``witness`` records carry a certificate: a branch and
bound over the whole eps-ball showed that no source point maps within the
tolerance of the recorded target.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence, Union

import mpmath
import numpy as np

from ..barycenter import bary_mt_batch
from ..convexity import AD, ID, TropicalPolytope
from ..measures import MAX_TIMES
from ..semiring import encode_scalar
from .chart import ChartDomain, ChartMap
from .expr import PiecewiseMapSpec
from .search import CERTIFIED, COVERED, UNDECIDED, preimage_search

__all__ = [
    "NOTE",
    "ProbeConfig",
    "Witness",
    "WitnessCheck",
    "PointVerdict",
    "ProbeVerdict",
    "as_chart_map",
    "bary_parameterization",
    "probe_open_at",
    "probe_map",
    "witness_search",
    "verify_witness",
    "equivalence_check_main",
    "no_affine_embedding_check",
]

NOTE = ("open-evidence is evidence only (sampled targets were all reached); "
        "witness records are certificates (no point of the eps-ball maps within "
        "tolerance of the target, checked by exhaustive box refinement).")

OPEN = "open-evidence"
WITNESS = "witness"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ProbeConfig:
    epsilon: float = 0.05
    deltas: tuple = (0.04, 0.02, 0.01, 0.005)
    target_samples: int = 64
    grid_resolution: float = 1e-3
    tolerance: float = 1e-6
    point_samples: int = 100
    seed: int = 0
    batch: int = 32
    box_budget: int = 200_000

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        for name in ("epsilon", "grid_resolution", "tolerance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.deltas or any(d <= 0 for d in self.deltas):
            raise ValueError("the delta ladder must be nonempty and positive")
        if any(a <= b for a, b in zip(self.deltas, self.deltas[1:])):
            raise ValueError("the delta ladder must be strictly decreasing")
        for name in ("target_samples", "batch", "box_budget"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.point_samples < 0:
            raise ValueError("point_samples must be nonnegative")

    @classmethod
    def from_json(cls, obj) -> "ProbeConfig":
        if not isinstance(obj, dict):
            raise ValueError("probe config JSON must be an object")
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown probe config keys {sorted(unknown)}")
        return cls(**obj)

    def to_json(self) -> dict:
        out = asdict(self)
        out["deltas"] = list(self.deltas)
        return out


def _native(v):
    return [encode_scalar(a) for a in v]


@dataclass
class Witness:
    """A non-openness certificate candidate, in native coordinates."""

    x: tuple
    y: tuple
    epsilon: float
    delta: float
    distance: float = math.nan
    resolution: float = math.nan
    tolerance: float = math.nan
    lipschitz: float = math.nan
    boxes: int = 0
    score: float = math.nan

    def to_json(self) -> dict:
        return {"x": _native(self.x), "y": _native(self.y), "epsilon": self.epsilon,
                "delta": self.delta, "distance": self.distance, "resolution": self.resolution,
                "tolerance": self.tolerance, "lipschitz": self.lipschitz, "boxes": self.boxes}


@dataclass
class WitnessCheck:
    status: str  # "certified" | "refuted" | "inconclusive"
    resolution: float
    boxes: int
    residual: float
    reason: str = ""

    @property
    def certified(self) -> bool:
        return self.status == "certified"


@dataclass
class PointVerdict:
    kind: str
    x: tuple
    fx: tuple
    delta_star: Optional[float]
    coverage: list
    witness: Optional[Witness] = None

    def to_json(self) -> dict:
        return {"kind": self.kind, "x": _native(self.x), "fx": _native(self.fx),
                "delta_star": self.delta_star, "coverage": self.coverage,
                "witness": self.witness.to_json() if self.witness else None}


@dataclass
class ProbeVerdict:
    map_name: str
    config: ProbeConfig
    points: list = field(default_factory=list)

    @property
    def witnesses(self) -> list:
        return [p for p in self.points if p.kind == WITNESS]

    def counts(self) -> dict:
        out = {OPEN: 0, WITNESS: 0, INCONCLUSIVE: 0}
        for p in self.points:
            out[p.kind] += 1
        return out

    def to_json(self) -> dict:
        return {"map": self.map_name, "note": NOTE, "config": self.config.to_json(),
                "summary": self.counts(), "points": [p.to_json() for p in self.points]}


MapLike = Union[PiecewiseMapSpec, ChartMap]


def as_chart_map(F: MapLike) -> ChartMap:
    return F if isinstance(F, ChartMap) else F.chart_map()


def bary_parameterization(X) -> ChartMap:
    """``(x, y, t, p) -> bary(t.delta_x v p.delta_y)`` on ``X x X x J``.

    ``X`` is a polytope or a sequence of factors whose product is ``X``. For
    max-plus ``X`` the weights range over J_0 and the barycenter is the
    max-plus one; in the exp chart both are the same weighted maximum.
    """
    factors = (X,) if isinstance(X, TropicalPolytope) else tuple(X)
    flavor = factors[0].flavor
    if any(f.flavor != flavor for f in factors):
        raise ValueError("all factors must share one flavor")
    weights = AD() if flavor == MAX_TIMES else ID()
    src = ChartDomain(factors + factors + (weights,))
    tgt = ChartDomain(factors)
    d = tgt.dim

    def func(z):
        atoms = np.stack([z[:, :d], z[:, d:2 * d]], axis=1)
        return bary_mt_batch(atoms, z[:, 2 * d:2 * d + 2])

    return ChartMap("bary2", flavor, src, tgt, func, 2.0 * float(tgt.upper.max()))


def _chart_point(cmap: ChartMap, x) -> np.ndarray:
    if isinstance(x, np.ndarray) and x.dtype.kind == "f":
        return x.astype(float)
    x = tuple(x)
    if not cmap.source.contains(x):
        raise ValueError(f"point {x!r} is not in the source domain")
    return cmap.source.to_chart(x)


def _point_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _classify(cmap: ChartMap, xc: np.ndarray, targets: np.ndarray, cfg: ProbeConfig):
    """Quick pass with a small budget, then the full budget for what is left.

    The second pass is skipped once some target is certified: the delta is
    then already known to be uncovered.
    """
    res = preimage_search(cmap, xc, cfg.epsilon, targets, cfg.tolerance, cfg.grid_resolution,
                          batch=cfg.batch, budget=min(cfg.box_budget, 4000))
    status = list(res.status)
    boxes = res.boxes.copy()
    todo = [i for i, s in enumerate(status) if s == UNDECIDED]
    if todo and CERTIFIED not in status and cfg.box_budget > 4000:
        again = preimage_search(cmap, xc, cfg.epsilon, targets[todo], cfg.tolerance,
                                cfg.grid_resolution, batch=cfg.batch, budget=cfg.box_budget)
        for j, i in enumerate(todo):
            status[i] = again.status[j]
            boxes[i] += again.boxes[j]
    return status, boxes, res.residual


def probe_open_at(F: MapLike, x, cfg: ProbeConfig = ProbeConfig(), index: int = 0) -> PointVerdict:
    """Probe openness of ``F`` at ``x`` for the radius ``cfg.epsilon``.

    For each delta of the ladder, from largest to smallest, targets are sampled
    in the delta-ball around ``F(x)`` inside the target domain and searched for
    preimages in the eps-ball. The first delta whose targets are all covered
    gives ``open-evidence``. If none is, the first certified uncovered target
    at the smallest delta that has one becomes the ``witness``.
    """
    cmap = as_chart_map(F)
    xc = _chart_point(cmap, x)
    fx = cmap(xc)[0]
    rng = _point_rng(cfg.seed, index)
    coverage, witness, delta_star = [], None, None
    for delta in cfg.deltas:
        targets = cmap.target.local_samples(fx, delta, cfg.target_samples, rng)
        status, boxes, _ = _classify(cmap, xc, targets, cfg)
        n_cert = status.count(CERTIFIED)
        n_und = status.count(UNDECIDED)
        coverage.append({"delta": delta, "sampled": len(targets), "covered": status.count(COVERED),
                         "certified": n_cert, "unresolved": n_und})
        if n_cert:
            i = status.index(CERTIFIED)
            yi = targets[i]
            witness = Witness(cmap.source.from_chart(xc), cmap.target.from_chart(yi), cfg.epsilon,
                              delta, float(np.abs(yi - fx).max()), cfg.grid_resolution,
                              cfg.tolerance, cmap.parameter_lipschitz, int(boxes[i]))
        if len(targets) and not n_cert and not n_und:
            delta_star = delta
            break
    if delta_star is not None:
        kind, witness = OPEN, None
    elif witness is not None:
        kind = WITNESS
    else:
        kind = INCONCLUSIVE
    return PointVerdict(kind, cmap.source.from_chart(xc), cmap.target.from_chart(fx),
                        delta_star, coverage, witness)


def _pins(F, pins):
    pins = list(pins or ())
    if isinstance(F, PiecewiseMapSpec):
        pins = list(F.pins) + [p for p in pins if tuple(p) not in F.pins]
    return pins


def probe_map(F: MapLike, cfg: ProbeConfig = ProbeConfig(), pins: Sequence = ()) -> ProbeVerdict:
    """Probe every pinned point and ``cfg.point_samples`` sampled domain points."""
    cmap = as_chart_map(F)
    points = [_chart_point(cmap, p) for p in _pins(F, pins)]
    points += list(cmap.source.sample_points(cfg.point_samples, cfg.seed))
    verdict = ProbeVerdict(cmap.name, cfg)
    for i, xc in enumerate(points):
        verdict.points.append(probe_open_at(cmap, xc, cfg, index=i))
    return verdict


def verify_witness(F: MapLike, w: Witness, resolution: Optional[float] = None,
                   tolerance: Optional[float] = None, budget: int = 1_000_000) -> WitnessCheck:
    """Re-check a witness by exhaustive box refinement at ``resolution``.

    ``certified``: no point of the eps-ball maps within tolerance of ``w.y``.
    ``refuted``: a point mapping within tolerance was found. ``inconclusive``:
    at this resolution some box survives but its points only come within the
    Lipschitz slack, or the budget ran out.
    """
    cmap = as_chart_map(F)
    r = w.resolution if resolution is None and not math.isnan(w.resolution) else (resolution or 1e-3)
    tol = w.tolerance if tolerance is None and not math.isnan(w.tolerance) else (tolerance or 1e-6)
    xc = _chart_point(cmap, w.x)
    if not cmap.target.contains(tuple(w.y)):
        return WitnessCheck("refuted", r, 0, math.nan, "target outside the target domain")
    yc = cmap.target.to_chart(tuple(w.y))
    fx = cmap(xc)[0]
    if np.abs(yc - fx).max() > w.delta + 1e-12:
        return WitnessCheck("refuted", r, 0, math.nan, "target farther than delta from F(x)")
    res = preimage_search(cmap, xc, w.epsilon, yc[None, :], tol, r, budget=budget)
    status, boxes = res.status[0], int(res.boxes[0])
    if status == CERTIFIED:
        return WitnessCheck("certified", r, boxes, float(res.residual[0]))
    if status == UNDECIDED:
        return WitnessCheck("inconclusive", r, boxes, float(res.residual[0]), "box budget exhausted")
    z = res.hit[0]
    if np.abs(cmap(z)[0] - yc).max() <= tol and np.abs(z - xc).max() <= w.epsilon:
        return WitnessCheck("refuted", r, boxes, float(res.residual[0]))
    # a surviving box: refine around the hit until the residual drops below tol
    slack = cmap.parameter_lipschitz * r
    # hits of this search come within tol/2 + L * fine < tol
    fine = tol / (4.0 * max(cmap.parameter_lipschitz, 1.0))
    deep = preimage_search(cmap, z, 2.0 * slack + r, yc[None, :], tol / 2, fine,
                           budget=budget, presample=0)
    if deep.status[0] == COVERED:
        z = deep.hit[0]
        if np.abs(cmap(z)[0] - yc).max() <= tol and np.abs(z - xc).max() <= w.epsilon:
            return WitnessCheck("refuted", r, boxes + int(deep.boxes[0]), float(deep.residual[0]))
    return WitnessCheck("inconclusive", r, boxes, float(res.residual[0]),
                        "grid too coarse for the Lipschitz slack")


def witness_search(F: MapLike, cfg: ProbeConfig = ProbeConfig(), pins: Sequence = (),
                   refine_top: int = 8, max_verify: int = 16) -> list:
    """Search for certified non-openness witnesses at the smallest delta of the ladder.

    Coarse stage: every pinned and sampled source point is scored by how far
    its sampled targets stay from the image of its eps-ball. Fine stage: new
    source points are drawn around the best ``refine_top`` points. The best
    candidates are then certified with :func:`verify_witness`; only certified
    witnesses are returned.
    """
    cmap = as_chart_map(F)
    delta = cfg.deltas[-1]
    sources = [_chart_point(cmap, p) for p in _pins(F, pins)]
    sources += list(cmap.source.sample_points(cfg.point_samples, cfg.seed))
    candidates = []

    def scan(points, offset):
        for i, xc in enumerate(points):
            rng = _point_rng(cfg.seed, offset + i)
            fx = cmap(xc)[0]
            targets = cmap.target.local_samples(fx, delta, cfg.target_samples, rng)
            if not len(targets):
                continue
            res = preimage_search(cmap, xc, cfg.epsilon, targets, cfg.tolerance,
                                  cfg.grid_resolution, batch=cfg.batch, budget=2000)
            for j, s in enumerate(res.status):
                if s == COVERED:
                    continue
                score = float(np.abs(targets[j] - fx).max()) if s == CERTIFIED else float(res.residual[j])
                candidates.append((-(score if np.isfinite(score) else delta), tuple(xc), tuple(targets[j])))

    scan(sources, 0)
    ranked = sorted(candidates)
    seeds, seen = [], set()
    for _, xc, _ in ranked:
        if xc not in seen:
            seen.add(xc)
            seeds.append(np.array(xc))
        if len(seeds) >= refine_top:
            break
    rng = np.random.default_rng([cfg.seed, 10**6])
    fine = []
    for xc in seeds:
        fine += list(cmap.source.local_samples(xc, cfg.epsilon / 2, 4, rng))
    scan(fine, len(sources))

    out, tried = [], set()
    for score, xc, yc in sorted(candidates):
        if len(tried) >= max_verify:
            break
        if (xc, yc) in tried:
            continue
        tried.add((xc, yc))
        xa, ya = np.array(xc), np.array(yc)
        w = Witness(cmap.source.from_chart(xa), cmap.target.from_chart(ya), cfg.epsilon, delta,
                    float(np.abs(ya - cmap(xa)[0]).max()), cfg.grid_resolution, cfg.tolerance,
                    cmap.parameter_lipschitz, score=-score)
        check = verify_witness(cmap, w)
        if check.certified:
            w.boxes = check.boxes
            out.append(w)
    return out


def equivalence_check_main(X, cfg: ProbeConfig = ProbeConfig(), pins: Sequence = ()) -> dict:
    """Probe the binary combination map and the two-atom barycenter map at the
    same points and compare verdict classes.

    For max-times ``X`` the combination map is ``s_X``; for max-plus ``X`` it
    is ``p_X``.
    """
    from .fixtures import p_map_spec, s_map_spec

    flavor = X.flavor if isinstance(X, TropicalPolytope) else X[0].flavor
    s_spec = s_map_spec(X) if flavor == MAX_TIMES else p_map_spec(X)
    bary = bary_parameterization(X)
    vs = probe_map(s_spec, cfg, pins)
    vb = probe_map(bary, cfg, pins)
    rows = []
    for a, b in zip(vs.points, vb.points):
        rows.append({"x": _native(a.x), "combination": a.kind, "barycenter": b.kind,
                     "agree": a.kind == b.kind})
    return {"agree": all(r["agree"] for r in rows), "points": rows,
            "combination": vs.counts(), "barycenter": vb.counts()}


def no_affine_embedding_check(candidate: Callable, grid=None) -> dict:
    """Falsify (.,+)-affinity of an injective map ``s: [0,1] -> R``.

    With ``a = s(0)``, ``b = s(1)`` and ``lam`` chosen so that
    ``ln lam < a - b``, affinity would force ``s(lam) = s(lam.1 v 0) =
    (ln lam + b) v a = a``; injectivity makes ``s(lam) != a``. The reported
    ``violation`` is ``|s(lam) - a|``.

    ``lam`` can be far below double precision when ``b - a`` is large, so
    ``s(0)`` and ``s(lam)`` are evaluated on mpmath numbers with enough
    digits. Candidates built from arithmetic and mpmath functions keep that
    precision; ones that go through ``math`` fall back to floats.
    """
    grid = np.linspace(0.0, 1.0, 1001) if grid is None else np.asarray(grid, dtype=float)
    vals = np.array([float(candidate(float(u))) for u in grid])
    steps = np.diff(vals)
    if not ((steps > 0).all() or (steps < 0).all()):
        raise ValueError("candidate is not injective on the grid")
    a, b = float(candidate(0.0)), float(candidate(1.0))
    log_lam = min(a - b, 0.0) - 1.0
    dps = 30 + int(abs(log_lam) / math.log(10.0))
    with mpmath.workdps(dps):
        lam = mpmath.exp(log_lam)
        a_hi = candidate(mpmath.mpf(0))
        lhs = candidate(lam)
        rhs = max(log_lam + b, a_hi)
        gap = float(abs(lhs - rhs))
        lhs = float(lhs)
    return {"a": a, "b": b, "lambda": float(lam), "lhs": lhs, "rhs": max(log_lam + b, a),
            "violation": gap, "violated": gap > 0.0}
