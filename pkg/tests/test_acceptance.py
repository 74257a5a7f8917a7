"""Full-size acceptance runs, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line; the lines are
repeated in the pytest terminal summary.
"""

import math
import time

import mpmath
import numpy as np
import pytest

from idemconv.checks import (
    check_measure_axioms,
    check_embed_g_affinity,
    check_transport_oracles,
    check_truncation_affinity,
    run_suite,
)
from idemconv.cli import main
from idemconv.convexity import AD, ID, box
from idemconv.probe import (
    ProbeConfig,
    equivalence_check_main,
    fixture,
    no_affine_embedding_check,
    probe_map,
    verify_witness,
    witness_search,
)
from idemconv.probe.fixtures import AD2_PIN, VEE_PIN

_probe_seconds = {}


def _summary(reports):
    trials = sum(r.trials for r in reports)
    worst = max(r.max_discrepancy for r in reports)
    return all(r.ok for r in reports), f"{trials} cases, worst gap {worst:.3g}"


def test_c1_truncation_affinity(criterion):
    t0 = time.perf_counter()
    reports = check_truncation_affinity(trials=100_000, seed=0)
    dt = time.perf_counter() - t0
    ok, info = _summary(reports)
    exact = all(r.max_discrepancy == 0.0 for r in reports)
    assert criterion(1, ok and exact and dt < 5.0, f"{info}, {dt:.2f}s")


def test_c2_embed_g_affinity(criterion):
    reports = check_embed_g_affinity(trials=100_000, seed=0, tol=1e-12)
    ok, info = _summary(reports)
    assert criterion(2, ok, info)


def test_c3_measure_axioms(criterion):
    mp, mt = check_measure_axioms(trials=10_000, seed=0, functions=10)
    ok = mp.ok and mt.ok and mp.max_discrepancy == 0.0 and mt.max_discrepancy <= 1e-12
    detail = f"max-plus gap {mp.max_discrepancy:.3g}, max-times gap {mt.max_discrepancy:.3g}"
    assert criterion(3, ok, f"{mp.trials + mt.trials} checks, {detail}")


def test_c4_transport_oracles(criterion):
    reports = check_transport_oracles(trials=10_000, seed=0)
    ok, info = _summary(reports)
    assert criterion(4, ok, info)


def test_c5_commuting_square(criterion):
    t0 = time.perf_counter()
    reports = run_suite("hombar", trials=10_000, seed=0)
    dt = time.perf_counter() - t0
    ok, info = _summary(reports)
    assert criterion(5, ok and dt < 30.0, f"{info}, {dt:.2f}s")


def test_c6_monad_and_naturality(criterion):
    reports = run_suite("monad", trials=10_000, seed=0) + run_suite("naturality", trials=10_000, seed=0)
    ok, info = _summary(reports)
    exact = all(r.max_discrepancy == 0.0 for r in reports if "max-plus" in r.name or "grid" in r.name)
    assert criterion(6, ok and exact, info)


def test_c7a_box_away_from_zero_is_open(criterion):
    t0 = time.perf_counter()
    v = probe_map(fixture("s-on-[0.25,1]^2"), ProbeConfig(point_samples=100))
    _probe_seconds["a"] = time.perf_counter() - t0
    c = v.counts()
    ok = c["open-evidence"] == len(v.points) >= 100 and c["witness"] == 0
    assert criterion("7a", ok, f"{c}, {_probe_seconds['a']:.1f}s")


def test_c7b_vee_pinned_witness(criterion):
    t0 = time.perf_counter()
    spec = fixture("vee-on-ID")
    v = probe_map(spec, ProbeConfig(point_samples=0))
    rec = v.points[0]
    ok = rec.x == VEE_PIN and rec.kind == "witness"
    check = verify_witness(spec, rec.witness, resolution=1e-3) if ok else None
    _probe_seconds["b"] = time.perf_counter() - t0
    ok = ok and check.certified
    detail = (f"y={rec.witness.y}, delta={rec.witness.delta}, resolution 1e-3, {check.boxes} boxes"
              if rec.witness else rec.kind)
    assert criterion("7b", ok, detail)


def test_c7c_product_witness_search(criterion):
    t0 = time.perf_counter()
    spec = fixture("s-on-AD-x-AD")
    found = witness_search(spec, ProbeConfig(point_samples=20), pins=())
    certified = [w for w in found if verify_witness(spec, w).certified]
    _probe_seconds["c"] = time.perf_counter() - t0
    assert criterion("7c", len(certified) >= 1,
                     f"{len(certified)} certified witnesses, {_probe_seconds['c']:.1f}s")


def test_c7d_free_simplex_open(criterion):
    t0 = time.perf_counter()
    v = probe_map(fixture("s-on-AD"), ProbeConfig(point_samples=100))
    _probe_seconds["d"] = time.perf_counter() - t0
    c = v.counts()
    total = sum(_probe_seconds.values())
    ok = c["open-evidence"] == len(v.points) and c["witness"] == 0
    ok = ok and len(_probe_seconds) == 4 and total < 180.0
    assert criterion("7d", ok, f"{c}, fixtures 7a-7d took {total:.1f}s")


@pytest.mark.parametrize("label,X,pins,points", [
    ("7a box", box(0.25, 1.0, 2), (), 20),
    ("7b ID", ID(), (), 10),
    ("7c AD x AD", (AD(), AD()), (AD2_PIN,), 4),
    ("7d AD", AD(), (), 20),
])
def test_c8_combination_vs_barycenter(criterion, label, X, pins, points):
    rep = equivalence_check_main(X, ProbeConfig(point_samples=points), pins)
    detail = f"{label}: combination {rep['combination']}, barycenter {rep['barycenter']}"
    assert criterion(8, rep["agree"], detail)


def _candidates():
    # mpmath functions keep precision when the check evaluates at tiny lambda
    rng = np.random.default_rng(2024)
    out = []
    for i in range(20):
        c = float(rng.uniform(0.2, 5.0)) * (1 if i % 2 else -1)
        d = float(rng.uniform(-3.0, 3.0))
        k = float(rng.uniform(0.3, 4.0))
        kind = i % 5
        if kind == 0:
            f = lambda u, c=c, d=d: c * u + d
        elif kind == 1:
            f = lambda u, c=c, d=d, k=k: c * u ** k + d
        elif kind == 2:
            f = lambda u, c=c, d=d, k=k: c * mpmath.expm1(k * u) + d
        elif kind == 3:
            f = lambda u, c=c, d=d, k=k: c * mpmath.log1p(k * u) + d
        else:
            f = lambda u, c=c, d=d, k=k: c * mpmath.tanh(k * (u - 0.3)) + d
        out.append(f)
    return out


def test_c9_no_affine_embedding(criterion):
    false_passes, margins = 0, []
    for s in _candidates():
        r = no_affine_embedding_check(s)
        # monotonicity gives |s(lam) - s(0)| >= |s(lam/2) - s(0)| > 0
        with mpmath.workdps(80):
            bound = float(abs(s(mpmath.mpf(r["lambda"]) / 2) - s(mpmath.mpf(0))))
        if not (r["violated"] and math.log(r["lambda"]) < r["a"] - r["b"]
                and r["violation"] >= bound > 0.0):
            false_passes += 1
        margins.append(r["violation"])
    assert criterion(9, false_passes == 0,
                     f"20 candidates, {false_passes} false passes, smallest margin {min(margins):.3g}")


def test_c10_check_all_is_deterministic(criterion, tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"all{i}.json"
        code = main(["check", "--suite", "all", "--seed", "7", "-o", str(p)])
        outs.append((code, p.read_bytes()))
    ok = outs[0][0] == outs[1][0] == 0 and outs[0][1] == outs[1][1]
    assert criterion(10, ok, f"{len(outs[0][1])} bytes, exit {outs[0][0]}")
