"""Numerical epsilon-delta openness probing for piecewise tropical-linear maps."""

from .chart import ChartDomain, ChartFactor, ChartMap
from .core import (NOTE, PointVerdict, ProbeConfig, ProbeVerdict, Witness, WitnessCheck,
                   as_chart_map, bary_parameterization, equivalence_check_main,
                   no_affine_embedding_check, probe_map, probe_open_at, verify_witness,
                   witness_search)
from .expr import MapSpecError, PiecewiseMapSpec, expr_to_json, parse_expr
from .fixtures import (FIXTURES, fixture, fixture_names, identity_spec, p_map_spec,
                       s_map_spec, vee_spec)
from .search import CERTIFIED, COVERED, UNDECIDED, SearchResult, preimage_search

__all__ = [
    "ChartDomain", "ChartFactor", "ChartMap", "NOTE", "PointVerdict", "ProbeConfig",
    "ProbeVerdict", "Witness", "WitnessCheck", "as_chart_map", "bary_parameterization",
    "equivalence_check_main", "no_affine_embedding_check", "probe_map", "probe_open_at",
    "verify_witness", "witness_search", "MapSpecError", "PiecewiseMapSpec", "expr_to_json",
    "parse_expr", "FIXTURES", "fixture", "fixture_names", "identity_spec", "p_map_spec",
    "s_map_spec", "vee_spec", "CERTIFIED", "COVERED", "UNDECIDED", "SearchResult",
    "preimage_search",
]
