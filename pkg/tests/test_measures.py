import math

import pytest
from hypothesis import given, settings, strategies as st

from idemconv.convexity import build_embedding
from idemconv.measures import (
    MAX_PLUS,
    MAX_TIMES,
    FiniteSpace,
    FunctionOnSpace,
    MaxPlusMeasure,
    MaxTimesMeasure,
    NormalizationError,
    SpaceMismatchError,
    density_mp,
    density_oracle,
    dirac,
    eval_mp,
    eval_mt,
    iso_gX,
    iso_gX_inv,
    measure_from_json,
    measure_to_json,
    normalize,
    pushforward,
    transport_lh,
)
from idemconv.semiring import NEG_INF, rho_metric, to_maxplus

AB = FiniteSpace(("a", "b"))


def mp_measures(n):
    w = st.one_of(st.just(NEG_INF), st.integers(-40, 0).map(lambda k: k / 8.0))
    # force one unit weight at a drawn position
    return st.tuples(st.lists(w, min_size=n, max_size=n), st.integers(0, n - 1)).map(
        lambda p: p[0][:p[1]] + [0.0] + p[0][p[1] + 1:])


def mt_weights(n):
    return st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n).map(
        lambda ws: ws if max(ws) > 0 else [1.0] + ws[1:]).map(lambda ws: [w / max(ws) for w in ws])


def test_space_validation():
    with pytest.raises(ValueError):
        FiniteSpace(("a", "a"))
    with pytest.raises(ValueError):
        FiniteSpace(())
    with pytest.raises(KeyError):
        AB.index("z")


def test_eval_examples():
    mu = MaxPlusMeasure(AB, (0.0, -2.0))
    assert eval_mp(mu, FunctionOnSpace(AB, (1.0, 5.0))) == 3.0
    nu = MaxTimesMeasure(AB, (1.0, 0.5))
    assert eval_mt(nu, FunctionOnSpace(AB, (0.2, 0.8))) == 0.4
    assert eval_mt(nu, FunctionOnSpace.constant(AB, 1.0)) == 1.0
    assert eval_mp(mu, FunctionOnSpace.constant(AB, -7.25)) == -7.25
    phi = FunctionOnSpace(AB, (0.3, 0.9))
    assert eval_mt(dirac("b", AB, MAX_TIMES), phi) == 0.9
    assert eval_mp(dirac("a", AB, MAX_PLUS), FunctionOnSpace(AB, (4.0, 9.0))) == 4.0


def test_eval_errors():
    nu = MaxTimesMeasure(AB, (1.0, 0.5))
    with pytest.raises(ValueError):
        eval_mt(nu, FunctionOnSpace(AB, (0.2, 1.5)))
    other = FiniteSpace(("a", "c"))
    with pytest.raises(SpaceMismatchError):
        eval_mt(nu, FunctionOnSpace(other, (0.2, 0.3)))


def test_dirac_weights():
    assert dirac("a", AB, MAX_PLUS).weights == (0.0, NEG_INF)
    assert dirac("b", AB, MAX_TIMES).weights == (0.0, 1.0)
    with pytest.raises(KeyError):
        dirac("z", AB)


def test_normalization():
    assert normalize({"a": -1.0, "b": -3.0}, MAX_PLUS).weights == (0.0, -2.0)
    assert normalize({"a": 0.5, "b": 0.25}, MAX_TIMES).weights == (1.0, 0.5)
    assert normalize({"a": 0.0, "b": -2.0}, MAX_PLUS).weights == (0.0, -2.0)
    with pytest.raises(NormalizationError):
        normalize({"a": NEG_INF}, MAX_PLUS)
    with pytest.raises(NormalizationError):
        MaxTimesMeasure(AB, (0.5, 0.3))
    with pytest.raises(NormalizationError):
        MaxPlusMeasure(AB, (-1.0, -2.0))
    with pytest.raises(NormalizationError):
        MaxPlusMeasure(AB, (1.0, 0.0))
    snapped = MaxTimesMeasure(AB, (1.0 - 1e-13, 0.5))
    assert snapped.weights[0] == 1.0


def test_pushforward_examples():
    abc = FiniteSpace(("a", "b", "c"))
    mu = MaxPlusMeasure(abc, (0.0, -1.0, -2.0))
    image = pushforward({"a": "u", "b": "u", "c": "v"}, mu, FiniteSpace(("u", "v")))
    assert image.weights == (0.0, -2.0)
    assert pushforward(lambda x: "*", mu).weights == (0.0,)
    relabeled = pushforward({"a": 1, "b": 2, "c": 3}, mu)
    assert relabeled.as_dict() == {1: 0.0, 2: -1.0, 3: -2.0}


@given(mp_measures(4), st.lists(st.integers(0, 2), min_size=4, max_size=4),
       st.lists(st.integers(0, 1), min_size=3, max_size=3))
def test_pushforward_functorial(ws, f, g):
    space = FiniteSpace((0, 1, 2, 3))
    mid, end = FiniteSpace((0, 1, 2)), FiniteSpace((0, 1))
    mu = MaxPlusMeasure(space, tuple(ws))
    two_step = pushforward(lambda y: g[y], pushforward(lambda x: f[x], mu, mid), end)
    one_step = pushforward(lambda x: g[f[x]], mu, end)
    assert two_step == one_step
    assert pushforward(lambda x: x, mu, space) == mu


def test_density_examples():
    d = dirac("a", AB, MAX_PLUS)
    assert density_mp(d, "a") == 0.0
    assert density_mp(d, "b") is NEG_INF
    mu = MaxPlusMeasure(AB, (0.0, -2.0))
    assert density_mp(mu, "b") == -2.0
    assert density_oracle(mu, "b") == -2.0
    # beyond the bump depth the oracle saturates at -depth
    assert density_oracle(d, "b") == -40.0


@settings(max_examples=60)
@given(mt_weights(4))
def test_density_oracle_max_times(ws):
    nu = MaxTimesMeasure(FiniteSpace(tuple("wxyz")), tuple(ws))
    for x, w in zip(nu.space, nu.weights):
        assert rho_metric(density_oracle(nu, x), to_maxplus(w)) <= 1e-9


@settings(max_examples=60)
@given(mp_measures(4))
def test_density_oracle_max_plus(ws):
    mu = MaxPlusMeasure(FiniteSpace(tuple("wxyz")), tuple(ws))
    for x in mu.space:
        assert rho_metric(density_oracle(mu, x), density_mp(mu, x)) <= 1e-9


def test_iso_examples():
    nu = MaxTimesMeasure(AB, (1.0, 0.5))
    assert iso_gX(nu).weights == (0.0, math.log(0.5))
    assert iso_gX(MaxTimesMeasure(AB, (1.0, 0.0))).weights == (0.0, NEG_INF)
    assert iso_gX_inv(MaxPlusMeasure(AB, (0.0, NEG_INF))).weights == (1.0, 0.0)
    assert iso_gX_inv(MaxPlusMeasure(AB, (0.0, -1.0))).weights == (1.0, math.exp(-1.0))
    assert iso_gX(dirac("a", AB, MAX_TIMES)) == dirac("a", AB, MAX_PLUS)


@given(mt_weights(3), st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3))
def test_iso_functional_form(ws, phi):
    space = FiniteSpace(("p", "q", "r"))
    nu = MaxTimesMeasure(space, tuple(ws))
    back = iso_gX_inv(iso_gX(nu))
    assert all(abs(a - b) <= 1e-12 for a, b in zip(back.weights, nu.weights))
    logs = [to_maxplus(v) for v in phi]
    # max-plus functions are real valued; evaluate the log side by hand
    direct = max((w + v for w, v in zip(iso_gX(nu).weights, logs)
                  if w is not NEG_INF and v is not NEG_INF), default=NEG_INF)
    lhs = to_maxplus(eval_mt(nu, FunctionOnSpace(space, tuple(phi))))
    assert rho_metric(lhs, direct) <= 1e-9
    if all(v is not NEG_INF for v in logs):
        rhs = eval_mp(iso_gX(nu), FunctionOnSpace(space, tuple(logs)))
        assert rho_metric(lhs, rhs) <= 1e-9


def test_transport_examples():
    x, y = (1.0, 0.5), (0.25, 1.0)
    h = build_embedding(2, 3)
    space = FiniteSpace((x, y))
    got = transport_lh(dirac(x, space, MAX_TIMES), h)
    assert got.weight(h(x)) == 0.0 and got.weight(h(y)) is NEG_INF
    got = transport_lh(MaxTimesMeasure(space, (1.0, 0.5)), h)
    assert got.weight(h(x)) == 0.0 and got.weight(h(y)) == math.log(0.5)
    got = transport_lh(MaxTimesMeasure(space, (1.0, 0.0)), h)
    assert got.weight(h(y)) is NEG_INF
    direct = pushforward(lambda p: h(p), iso_gX(MaxTimesMeasure(space, (1.0, 0.5))))
    assert direct == transport_lh(MaxTimesMeasure(space, (1.0, 0.5)), h)


def test_transport_rejects_outside_atoms():
    h = build_embedding(1, 2)
    with pytest.raises(ValueError):
        transport_lh(dirac((1.0, 1.0), FiniteSpace(((1.0, 1.0),)), MAX_TIMES), h)


def test_json_roundtrip():
    mu = MaxPlusMeasure(AB, (0.0, NEG_INF))
    obj = measure_to_json(mu)
    assert obj == {"model": "max-plus", "space": ["a", "b"], "weights": {"a": 0.0, "b": "-inf"}}
    assert measure_from_json(obj) == mu
    tup = MaxTimesMeasure(FiniteSpace(((1.0, 0.0), (0.0, 1.0))), (1.0, 0.25))
    assert measure_from_json(measure_to_json(tup)) == tup
    with pytest.raises(ValueError):
        measure_from_json({"model": "max-times", "space": ["a", "b"], "weights": {"a": 1, "b": "-inf"}})
    with pytest.raises(ValueError):
        measure_from_json({"model": "tropical", "space": ["a"], "weights": [0]})
    with pytest.raises(ValueError):
        measure_from_json({"model": "max-plus", "space": ["a"]})


def test_prune_keeps_normalization():
    mu = MaxPlusMeasure(AB, (0.0, NEG_INF))
    assert mu.prune().space.points == ("a",)
    assert mu.support() == ("a",)
