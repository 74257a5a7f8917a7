"""Invariant suites: seeded randomized and exhaustive checks of the library's identities.

Each suite returns a list of :class:`~idemconv.barycenter.CheckReport`. The
``trials`` argument sets the number of random instances; exhaustive grids
always run in full.
"""

from __future__ import annotations

import itertools
import math
from typing import Optional

import numpy as np

from .barycenter import CheckReport, check_hombar_square, check_monad_identity, check_naturality
from .convexity import embedding_for
from .measures import (
    MAX_PLUS,
    MAX_TIMES,
    FiniteSpace,
    FunctionOnSpace,
    MaxPlusMeasure,
    MaxTimesMeasure,
    density_mp,
    density_oracle,
    eval_mp,
    eval_mt,
    iso_gX,
    pushforward,
    transport_lh,
)
from .semiring import NEG_INF, embed_g, mp_join, mp_mul, rho_metric, to_maxplus, truncate_n

__all__ = ["SUITES", "DEFAULT_TRIALS", "run_suite", "suite_names",
           "check_measure_axioms", "check_truncation_affinity", "check_embed_g_affinity", "check_transport_oracles"]


def _scalar_gap(a, b) -> float:
    if a is NEG_INF or b is NEG_INF:
        return 0.0 if a is b else math.inf
    return abs(a - b)


TRUNCATION_GRID = tuple(-0.25 * i for i in range(21)) + (NEG_INF,)


def _af_sides(lam, s, k, n):
    lhs = truncate_n(mp_join(mp_mul(lam, s), k), n)
    rhs = mp_join(mp_mul(lam, truncate_n(s, n)), truncate_n(k, n))
    return lhs, rhs


def check_truncation_affinity(trials: int = 100_000, seed: int = 0, exhaustive: bool = True) -> list:
    """Truncations are (+,+)-affine: ``f_n((l + s) v k) = (l + f_n(s)) v f_n(k)``.

    Exact comparison on the quarter-step grid for ``n = 1..6`` and on random
    triples in [-6, 0] with a tenth of the entries at -inf.
    """
    grid = CheckReport("prop-af[grid]")
    if exhaustive:
        for lam, s, k in itertools.product(TRUNCATION_GRID, repeat=3):
            for n in range(1, 7):
                lhs, rhs = _af_sides(lam, s, k, n)
                grid.record(_scalar_gap(lhs, rhs), lambda: {"l": lam, "s": s, "k": k, "n": n})
    rnd = CheckReport("prop-af[random]")
    rng = np.random.default_rng(seed)
    vals = -6.0 * rng.random((trials, 3))
    bottom = rng.random((trials, 3)) < 0.1
    ns = rng.integers(1, 7, size=trials)
    for row, bot, n in zip(vals.tolist(), bottom.tolist(), ns.tolist()):
        lam, s, k = (NEG_INF if b else v for v, b in zip(row, bot))
        lhs, rhs = _af_sides(lam, s, k, n)
        rnd.record(_scalar_gap(lhs, rhs), lambda: {"l": lam, "s": s, "k": k, "n": n})
    return [grid, rnd] if exhaustive else [rnd]


def check_embed_g_affinity(trials: int = 100_000, seed: int = 0, tol: float = 1e-12) -> list:
    """``embed_g`` is (.,+)-affine: ``g(l.s v k) = (ln l + g(s)) v g(k)`` componentwise."""
    report = CheckReport("embed-affinity", tol=tol)
    rng = np.random.default_rng(seed)
    triples = rng.random((trials, 3))
    # exact zeros exercise the bottom branch of ln
    triples[rng.random((trials, 3)) < 0.02] = 0.0
    depths = rng.integers(1, 9, size=trials)
    for (lam, s, k), n in zip(triples.tolist(), depths.tolist()):
        lhs = embed_g(max(lam * s, k), n)
        ll = to_maxplus(lam)
        rhs = tuple(mp_join(mp_mul(ll, a), b) for a, b in zip(embed_g(s, n), embed_g(k, n)))
        gap = max(_scalar_gap(a, b) for a, b in zip(lhs, rhs))
        report.record(gap, lambda: {"l": lam, "s": s, "k": k, "depth": n})
    return [report]


def _dyadic(rng, size, lo: float, hi: float) -> list:
    steps = int(round((hi - lo) * 8))
    return (lo + rng.integers(0, steps + 1, size=size) / 8.0).tolist()


def _mp_measure(rng, n) -> MaxPlusMeasure:
    ws = [NEG_INF if rng.random() < 0.2 else w for w in _dyadic(rng, n, -5.0, 0.0)]
    ws[int(rng.integers(n))] = 0.0
    return MaxPlusMeasure(FiniteSpace(tuple(range(n))), tuple(ws))


def _mt_measure(rng, n) -> MaxTimesMeasure:
    ws = rng.random(n)
    ws[rng.random(n) < 0.2] = 0.0
    ws[int(rng.integers(n))] = 1.0
    return MaxTimesMeasure(FiniteSpace(tuple(range(n))), tuple(ws.tolist()))


def check_measure_axioms(trials: int = 10_000, seed: int = 0, functions: int = 10,
               mt_tol: float = 1e-12) -> list:
    """Measure axioms of evaluation on random measures and functions.

    Max-plus (dyadic data, exact): ``mu(c) = c``, ``mu(c + phi) = c + mu(phi)``,
    ``mu(phi v psi) = mu(phi) v mu(psi)``. Max-times: ``nu(c) = c``,
    ``nu(c.phi) = c.nu(phi)``, ``nu(phi v psi) = nu(phi) v nu(psi)``.
    """
    rng = np.random.default_rng(seed)
    mp = CheckReport("measure-axioms[max-plus]")
    mt = CheckReport("measure-axioms[max-times]", tol=mt_tol)
    for _ in range(trials):
        n = int(rng.integers(1, 6))
        mu, nu = _mp_measure(rng, n), _mt_measure(rng, n)
        space = mu.space
        for _ in range(functions):
            c = _dyadic(rng, 1, -4.0, 4.0)[0]
            phi = FunctionOnSpace(space, tuple(_dyadic(rng, n, -5.0, 5.0)))
            psi = FunctionOnSpace(space, tuple(_dyadic(rng, n, -5.0, 5.0)))
            shifted = FunctionOnSpace(space, tuple(c + v for v in phi.values))
            joined = FunctionOnSpace(space, tuple(max(a, b) for a, b in zip(phi.values, psi.values)))
            gaps = (_scalar_gap(eval_mp(mu, FunctionOnSpace.constant(space, c)), c),
                    _scalar_gap(eval_mp(mu, shifted), c + eval_mp(mu, phi)),
                    _scalar_gap(eval_mp(mu, joined), max(eval_mp(mu, phi), eval_mp(mu, psi))))
            mp.record(max(gaps), lambda: {"weights": mu.weights, "phi": phi.values,
                                          "psi": psi.values, "c": c})

            c = float(rng.random())
            phi = FunctionOnSpace(space, tuple(rng.random(n).tolist()))
            psi = FunctionOnSpace(space, tuple(rng.random(n).tolist()))
            scaled = FunctionOnSpace(space, tuple(c * v for v in phi.values))
            joined = FunctionOnSpace(space, tuple(max(a, b) for a, b in zip(phi.values, psi.values)))
            gaps = (abs(eval_mt(nu, FunctionOnSpace.constant(space, c)) - c),
                    abs(eval_mt(nu, scaled) - c * eval_mt(nu, phi)),
                    abs(eval_mt(nu, joined) - max(eval_mt(nu, phi), eval_mt(nu, psi))))
            mt.record(max(gaps), lambda: {"weights": nu.weights, "phi": phi.values,
                                          "psi": psi.values, "c": c})
    return [mp, mt]


def check_transport_oracles(trials: int = 10_000, seed: int = 0, tol: float = 1e-9) -> list:
    """``l_h`` against its two descriptions.

    Atoms: ``transport_lh(nu, h)`` must equal ``pushforward(h, iso_gX(nu))``
    exactly. Densities: at each image atom the bump-function infimum must
    match ``ln`` of the original weight within ``tol`` in the metric rho.
    """
    rng = np.random.default_rng(seed)
    atoms_rep = CheckReport("transport[atoms]")
    dens_rep = CheckReport("transport[density]", tol=tol)
    for _ in range(trials):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(1, 6))
        pts = rng.random((n, d))
        pts[rng.random((n, d)) < 0.1] = 0.0
        pts[rng.random((n, d)) < 0.1] = 1.0
        labels = tuple(dict.fromkeys(map(tuple, pts.tolist())))
        nu = _mt_measure(rng, len(labels))
        nu = MaxTimesMeasure(FiniteSpace(labels), nu.weights)
        h = embedding_for(labels)
        moved = transport_lh(nu, h)
        direct = pushforward(lambda x: tuple(h(x)), iso_gX(nu))
        same = moved.as_dict() == direct.as_dict()
        atoms_rep.record(0.0 if same else math.inf,
                         lambda: {"atoms": labels, "weights": nu.weights})
        for x, w in zip(labels, nu.weights):
            y = tuple(h(x))
            oracle = density_oracle(moved, y)
            gap = max(rho_metric(oracle, to_maxplus(w)), rho_metric(density_mp(moved, y), to_maxplus(w)))
            dens_rep.record(gap, lambda: {"atom": x, "weight": w, "oracle": oracle})
    return [atoms_rep, dens_rep]


def _hombar(trials: int, seed: int) -> list:
    return [check_hombar_square(trials=trials, seed=seed)]


def _monad(trials: int, seed: int) -> list:
    out = []
    for model in (MAX_PLUS, MAX_TIMES):
        grid = check_monad_identity((0, 1), model, trials=0, seed=seed)
        grid.name += "[grid]"
        rnd = CheckReport(f"monad-identity[{model}][random]")
        rng = np.random.default_rng([seed, 1])
        for size in (1, 2, 3):
            per = trials // 3 + (1 if size <= trials % 3 else 0)
            r = check_monad_identity(tuple(range(size)), model, trials=per,
                                     seed=int(rng.integers(2**31)), exhaustive=False)
            rnd.trials += r.trials
            rnd.failures += r.failures
            if r.max_discrepancy > rnd.max_discrepancy:
                rnd.max_discrepancy, rnd.worst_case = r.max_discrepancy, r.worst_case
        out += [grid, rnd]
    return out


def _all_maps(n_src: int, n_tgt: int):
    return list(itertools.product(range(n_tgt), repeat=n_src))


def _naturality(trials: int, seed: int) -> list:
    out = []
    rng = np.random.default_rng([seed, 2])
    for model in (MAX_PLUS, MAX_TIMES):
        grid = CheckReport(f"naturality[{model}][grid]")
        for table in _all_maps(2, 2):
            r = check_naturality(dict(enumerate(table)), (0, 1), (0, 1), model, trials=0)
            grid.trials += r.trials
            grid.failures += r.failures
            grid.max_discrepancy = max(grid.max_discrepancy, r.max_discrepancy)
        rnd = CheckReport(f"naturality[{model}][random]")
        for _ in range(trials):
            ns, nt = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            table = tuple(int(v) for v in rng.integers(0, nt, size=ns))
            r = check_naturality(dict(enumerate(table)), tuple(range(ns)), tuple(range(nt)),
                                 model, trials=1, seed=int(rng.integers(2**31)), exhaustive=False)
            rnd.trials += r.trials
            rnd.failures += r.failures
            if r.max_discrepancy > rnd.max_discrepancy:
                rnd.max_discrepancy, rnd.worst_case = r.max_discrepancy, r.worst_case
        out += [grid, rnd]
    return out


SUITES: dict = {
    "measure-axioms": lambda trials, seed: check_measure_axioms(trials, seed),
    "prop-af": lambda trials, seed: check_truncation_affinity(trials, seed),
    "embed-affinity": lambda trials, seed: check_embed_g_affinity(trials, seed),
    "transport": lambda trials, seed: check_transport_oracles(trials, seed),
    "hombar": _hombar,
    "monad": _monad,
    "naturality": _naturality,
}

# full-size instance counts of the acceptance runs
DEFAULT_TRIALS = {"measure-axioms": 10_000, "prop-af": 100_000, "embed-affinity": 100_000,
                  "transport": 10_000, "hombar": 10_000, "monad": 10_000, "naturality": 10_000}


def suite_names() -> list:
    return sorted(SUITES) + ["all"]


def run_suite(name: str, trials: Optional[int] = None, seed: int = 0) -> list:
    """Run one suite (or ``all``) and return its reports in a fixed order."""
    if name == "all":
        names = sorted(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(suite_names())}")
    reports = []
    for n in names:
        reports += SUITES[n](DEFAULT_TRIALS[n] if trials is None else trials, seed)
    return reports
