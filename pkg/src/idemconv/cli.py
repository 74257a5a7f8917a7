"""Command-line front end.

Every subcommand reads JSON files and writes one JSON document to stdout (or
``-o``). Output is deterministic: keys are emitted in a fixed order, floats
are rounded to 12 significant digits and the bottom element is the string
``"-inf"``.

Exit codes: 0 success, 1 failed check suite, 2 schema error, 3 dimension
mismatch, 4 normalization failure; ``probe`` also uses 10 (certified witness
found) and 11 (a witness could not be certified).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .barycenter import barycenter, embedded_from_json
from .checks import run_suite, suite_names
from .convexity import (
    AffineEmbedding,
    DimensionError,
    embedding_for,
    hull_project,
    hull_witness,
    polytope_from_json,
)
from .measures import (
    MAX_PLUS,
    MAX_TIMES,
    NormalizationError,
    iso_gX,
    iso_gX_inv,
    measure_from_json,
    measure_to_json,
    transport_lh,
)
from .semiring import NEG_INF, decode_scalar, rho_metric
from .svg import hull_svg, witness_svg, write_svg

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_SCHEMA = 2
EXIT_DIMENSION = 3
EXIT_NORMALIZATION = 4
EXIT_WITNESS = 10
EXIT_INCONCLUSIVE = 11


class SchemaError(ValueError):
    pass


def canonical(obj):
    """JSON-ready copy with rounded floats and ``"-inf"`` tokens."""
    if obj is NEG_INF:
        return "-inf"
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        x = float(f"{x:.12g}")
        return 0.0 if x == 0 else x
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [canonical(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(canonical(obj), indent=2, allow_nan=False) + "\n"


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror}") from None


def _points(obj, flavor: str, key: str) -> list:
    if isinstance(obj, dict):
        obj = obj.get(key)
    if not isinstance(obj, list) or not all(isinstance(p, list) for p in obj):
        raise SchemaError(f"expected a list of points under {key!r}")
    return [tuple(decode_scalar(v, allow_bottom=flavor == MAX_PLUS) for v in p) for p in obj]


def cmd_hull(args) -> tuple:
    poly = polytope_from_json(_load(args.polytope))
    queries = _points(_load(args.queries), poly.flavor, "queries")
    rows = []
    for q in queries:
        lam = hull_witness(q, poly)
        rows.append({"query": q, "member": lam is not None, "projection": hull_project(q, poly),
                     "weights": lam})
    if args.svg:
        write_svg(args.svg, hull_svg(poly, queries, [r["member"] for r in rows]))
    return {"flavor": poly.flavor, "results": rows}, EXIT_OK


def cmd_bary(args) -> tuple:
    m = embedded_from_json(_load(args.measure))
    return {"model": m.model, "barycenter": barycenter(m)}, EXIT_OK


def _same(a, b, tol: float = 1e-12) -> bool:
    if a.space != b.space:
        return False
    return all(rho_metric(x, y) <= tol if a.model == MAX_PLUS else abs(x - y) <= tol
               for x, y in zip(a.weights, b.weights))


def cmd_iso(args) -> tuple:
    m = measure_from_json(_load(args.measure))
    out = {"direction": args.direction}
    if args.direction == "gx":
        if m.model != MAX_TIMES:
            raise SchemaError("direction gx needs a max-times measure")
        res = iso_gX(m)
        back = iso_gX_inv(res)
    elif args.direction == "gx-inv":
        if m.model != MAX_PLUS:
            raise SchemaError("direction gx-inv needs a max-plus measure")
        res = iso_gX_inv(m)
        back = iso_gX(res)
    else:
        if m.model != MAX_TIMES:
            raise SchemaError("direction lh needs a max-times measure")
        atoms = list(m.space)
        if not all(isinstance(x, tuple) for x in atoms):
            raise SchemaError("direction lh needs coordinate-vector atoms")
        if len({len(x) for x in atoms}) != 1:
            raise DimensionError("atoms have inconsistent dimensions")
        h = (embedding_for(atoms) if args.embedding_depth is None
             else AffineEmbedding(len(atoms[0]), args.embedding_depth))
        res = transport_lh(m, h)
        back = None
        out["embedding_depth"] = h.depth
    out["result"] = measure_to_json(res)
    if args.round_trip:
        if back is None:
            raise SchemaError("round trip is only defined for gx and gx-inv")
        ok = _same(back, m)
        out["round_trip"] = ok
        if not ok:
            raise NormalizationError("round trip does not reproduce the input")
    return out, EXIT_OK


def _probe_config(path: Optional[str]):
    from .probe import ProbeConfig

    if path is None:
        return ProbeConfig()
    try:
        return ProbeConfig.from_json(_load(path))
    except TypeError as exc:
        raise SchemaError(str(exc)) from None


def cmd_probe(args) -> tuple:
    from .probe import MapSpecError, PiecewiseMapSpec, fixture, probe_map, verify_witness

    if args.fixture:
        try:
            spec = fixture(args.fixture)
        except KeyError as exc:
            raise SchemaError(exc.args[0]) from None
    else:
        try:
            spec = PiecewiseMapSpec.from_json(_load(args.map))
        except MapSpecError as exc:
            raise SchemaError(str(exc)) from None
    cfg = _probe_config(args.config)
    pins = _points(_load(args.pin), spec.flavor, "pins") if args.pin else []
    for p in pins:
        if len(p) != spec.source_dim:
            raise DimensionError(f"pin of dimension {len(p)} for a source of dimension {spec.source_dim}")
    verdict = probe_map(spec, cfg, pins)
    cmap = spec.chart_map()
    out = verdict.to_json()
    checks = []
    for rec in out["points"]:
        rec["certification"] = None
    for i, p in enumerate(verdict.points):
        if p.witness is None:
            continue
        check = verify_witness(cmap, p.witness)
        checks.append(check.status)
        out["points"][i]["certification"] = {"status": check.status, "resolution": check.resolution,
                                             "boxes": check.boxes, "reason": check.reason}
    if args.svg:
        _probe_svg(args.svg, cmap, verdict, cfg)
    if "certified" in checks:
        return out, EXIT_WITNESS
    if checks:
        return out, EXIT_INCONCLUSIVE
    return out, EXIT_OK


def _probe_svg(path, cmap, verdict, cfg) -> None:
    if cmap.target.dim != 2:
        return
    rec = next((p for p in verdict.points if p.witness is not None), None)
    rec = rec or (verdict.points[0] if verdict.points else None)
    if rec is None:
        return
    xc = cmap.source.to_chart(rec.x)
    fx = cmap(xc)[0]
    rng = np.random.default_rng(cfg.seed)
    images = cmap(cmap.source.local_samples(xc, cfg.epsilon, 2000, rng))
    delta = rec.witness.delta if rec.witness else cfg.deltas[0]
    y = cmap.target.to_chart(rec.witness.y) if rec.witness else fx
    write_svg(path, witness_svg(fx, y, delta, images, title=f"{verdict.map_name} ({rec.kind})"))


def cmd_check(args) -> tuple:
    reports = run_suite(args.suite, trials=args.trials, seed=args.seed)
    rows = [r.as_dict() for r in reports]
    passed = all(r.ok for r in reports)
    out = {"suite": args.suite, "seed": args.seed, "passed": passed, "reports": rows}
    return out, EXIT_OK if passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="idemconv", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-o", "--output", help="write JSON here instead of stdout")
        p.set_defaults(func=func)
        return p

    p = add("hull", cmd_hull, "hull membership and projection of query points")
    p.add_argument("--polytope", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--svg")

    p = add("bary", cmd_bary, "barycenter of a finitely supported measure")
    p.add_argument("--measure", required=True)

    p = add("iso", cmd_iso, "change of model for a measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--direction", choices=("gx", "gx-inv", "lh"), required=True)
    p.add_argument("--embedding-depth", type=int)
    p.add_argument("--round-trip", action="store_true")

    p = add("transport", cmd_iso, "shorthand for iso --direction lh")
    p.add_argument("--measure", required=True)
    p.add_argument("--embedding-depth", type=int)
    p.set_defaults(direction="lh", round_trip=False)

    p = add("probe", cmd_probe, "epsilon-delta openness probe of a map")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--map")
    src.add_argument("--fixture", help="a bundled fixture name instead of --map")
    p.add_argument("--config")
    p.add_argument("--pin")
    p.add_argument("--svg")

    p = add("check", cmd_check, "run an invariant suite")
    p.add_argument("--suite", required=True, help=f"one of {', '.join(suite_names())}")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "embedding_depth", None) is not None and args.embedding_depth < 1:
        parser.error("--embedding-depth must be positive")
    if getattr(args, "trials", None) is not None and args.trials < 0:
        parser.error("--trials must be nonnegative")
    if args.command == "check" and args.suite not in suite_names():
        print(f"error: unknown suite {args.suite!r}; known: {', '.join(suite_names())}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        out, code = args.func(args)
    except NormalizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NORMALIZATION
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    text = dumps(out)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
