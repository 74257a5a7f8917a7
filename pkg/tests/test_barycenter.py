import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from idemconv.barycenter import (
    EmbeddedMeasure,
    bary_mp,
    bary_mt,
    bary_mt_batch,
    check_hombar_square,
    check_monad_identity,
    check_naturality,
    embedded_from_json,
    embedded_to_json,
    lift_dirac,
    measure_point,
)
from idemconv.convexity import TropicalPolytope, box, build_embedding, hull_member, mt_combination
from idemconv.measures import MAX_PLUS, MAX_TIMES, FiniteSpace, MaxTimesMeasure, NormalizationError, dirac
from idemconv.semiring import NEG_INF


def test_bary_examples():
    assert bary_mp(EmbeddedMeasure(MAX_PLUS, ((0.0, -3.0), (-2.0, 0.0)), (0.0, -1.0))) == (0.0, -1.0)
    assert bary_mt(EmbeddedMeasure(MAX_TIMES, ((1.0, 0.2), (0.4, 1.0)), (1.0, 0.5))) == (1.0, 0.5)
    assert bary_mt(EmbeddedMeasure(MAX_TIMES, ((1.0, 0.2), (0.4, 1.0)), (1.0, 0.0))) == (1.0, 0.2)
    x = (-0.5, NEG_INF)
    assert bary_mp(EmbeddedMeasure(MAX_PLUS, (x,), (0.0,))) == x
    assert bary_mp(EmbeddedMeasure(MAX_PLUS, (x, x, x), (0.0, -1.0, NEG_INF))) == x


def test_embedded_validation():
    with pytest.raises(NormalizationError):
        EmbeddedMeasure(MAX_TIMES, ((1.0,), (0.5,)), (0.5, 0.5))
    with pytest.raises(ValueError):
        EmbeddedMeasure(MAX_TIMES, ((0.1, 0.1),), (1.0,), polytope=box(0.25, 1.0, 2))
    m = EmbeddedMeasure(MAX_TIMES, ((0.5, 0.5), (0.5, 0.5)), (1.0, 0.25))
    assert m.to_measure().weights == (1.0,)


def test_json_roundtrip():
    m = EmbeddedMeasure(MAX_PLUS, ((0.0, NEG_INF), (-1.0, 0.0)), (0.0, NEG_INF))
    obj = embedded_to_json(m)
    assert obj["atoms"][0] == [0.0, "-inf"]
    assert embedded_from_json(obj) == m
    with pytest.raises(ValueError):
        embedded_from_json({"model": "max-times", "atoms": [[1]], "weights": [1, 0]})


@settings(max_examples=80)
@given(st.integers(0, 2**31 - 1))
def test_bary_is_the_weighted_combination(seed):
    rng = np.random.default_rng(seed)
    n, d = int(rng.integers(1, 6)), int(rng.integers(1, 5))
    atoms = tuple(map(tuple, rng.random((n, d)).tolist()))
    lam = rng.random(n)
    lam[int(rng.integers(n))] = 1.0
    lam = tuple((lam / lam.max()).tolist())
    nu = EmbeddedMeasure(MAX_TIMES, atoms, lam)
    got = bary_mt(nu)
    assert got == mt_combination(atoms, lam)
    assert hull_member(got, TropicalPolytope(MAX_TIMES, atoms))
    batch = bary_mt_batch(np.array([atoms]), np.array([lam]))[0]
    assert np.allclose(batch, got, atol=0, rtol=0)
    perm = rng.permutation(d)
    permuted = EmbeddedMeasure(MAX_TIMES, tuple(tuple(a[j] for j in perm) for a in atoms), lam)
    assert bary_mt(permuted) == tuple(got[j] for j in perm)


def test_lift_dirac_is_identity_on_examples():
    space = FiniteSpace(("a", "b", "c"))
    m = MaxTimesMeasure(space, (1.0, 0.5, 0.0))
    assert bary_mt(lift_dirac(m)) == m.weights
    d = dirac("b", space, MAX_PLUS)
    assert bary_mp(lift_dirac(d)) == d.weights


@pytest.mark.parametrize("model", [MAX_PLUS, MAX_TIMES])
def test_monad_identity(model):
    assert check_monad_identity((0, 1), model, trials=200, seed=3).max_discrepancy == 0.0
    rep = check_monad_identity((0, 1, 2), model, trials=300, seed=4)
    assert rep.ok and rep.max_discrepancy == 0.0


@pytest.mark.parametrize("model", [MAX_PLUS, MAX_TIMES])
def test_naturality_examples(model):
    ident = check_naturality({0: 0, 1: 1}, (0, 1), (0, 1), model, trials=100)
    assert ident.ok and ident.max_discrepancy == 0.0
    const = check_naturality(lambda x: "*", (0, 1, 2), ("*",), model, trials=100)
    assert const.ok
    rep = check_naturality({0: 1, 1: 0, 2: 1}, (0, 1, 2), (0, 1), model, trials=200, seed=9)
    assert rep.max_discrepancy <= 1e-12


def test_naturality_detects_a_broken_barycenter(monkeypatch):
    import sys

    bc = sys.modules["idemconv.barycenter"]
    real = bc.barycenter
    # reversing the coordinates keeps normalization but is not natural
    monkeypatch.setattr(bc, "barycenter", lambda m: tuple(reversed(real(m))))
    rep = check_naturality({0: 1, 1: 1, 2: 0}, (0, 1, 2), (0, 1), MAX_TIMES, trials=50)
    assert not rep.ok


def test_hombar_square_examples():
    K = box(0.0, 1.0, 2)
    rep = check_hombar_square(K, depth=6, trials=300, seed=2)
    assert rep.ok and rep.max_discrepancy <= 1e-9
    x, y = (1.0, 0.2), (0.3, 0.9)
    h = build_embedding(2, 4)
    nu = EmbeddedMeasure(MAX_TIMES, (x, y), (1.0, 0.5))
    from idemconv.measures import transport_lh

    lhs = h(bary_mt(nu))
    rhs = bary_mp(EmbeddedMeasure.from_measure(transport_lh(nu.to_measure(), h)))
    assert max(abs(a - b) for a, b in zip(lhs, rhs)) <= 1e-9
    nu0 = EmbeddedMeasure(MAX_TIMES, (x, y), (1.0, 0.0))
    rhs0 = bary_mp(EmbeddedMeasure.from_measure(transport_lh(nu0.to_measure(), h)))
    assert rhs0 == h(x)


def test_hombar_square_random_polytopes():
    rep = check_hombar_square(trials=500, seed=11)
    assert rep.ok, rep.worst_case


def test_measure_point_orders_by_space():
    m = MaxTimesMeasure(FiniteSpace(("u", "v")), (0.25, 1.0))
    assert measure_point(m) == (0.25, 1.0)
