"""Idempotent measures, tropical convexity and barycenter maps.

Max-plus values live in R_max with the bottom element :data:`NEG_INF`;
max-times values are floats in [0, 1]. The :mod:`idemconv.probe` subpackage
tests openness of piecewise tropical-linear maps numerically.
"""

__version__ = "0.1.0"

from .semiring import NEG_INF, embed_f, embed_g, rho_metric, truncate_n  # noqa: E402
from .measures import (  # noqa: E402
    MAX_PLUS,
    MAX_TIMES,
    FiniteSpace,
    FunctionOnSpace,
    MaxPlusMeasure,
    MaxTimesMeasure,
    NormalizationError,
    dirac,
    eval_mp,
    eval_mt,
    iso_gX,
    iso_gX_inv,
    pushforward,
    transport_lh,
)
from .convexity import (  # noqa: E402
    AD,
    ID,
    ComboWeights,
    DimensionError,
    TropicalPolytope,
    box,
    build_embedding,
    hull_member,
    hull_project,
    mp_combination,
    mt_combination,
    p_map,
    s_map,
)
from .barycenter import EmbeddedMeasure, bary_mp, bary_mt, barycenter  # noqa: E402

__all__ = [
    "NEG_INF", "embed_f", "embed_g", "rho_metric", "truncate_n",
    "MAX_PLUS", "MAX_TIMES", "FiniteSpace", "FunctionOnSpace", "MaxPlusMeasure",
    "MaxTimesMeasure", "NormalizationError", "dirac", "eval_mp", "eval_mt", "iso_gX",
    "iso_gX_inv", "pushforward", "transport_lh",
    "AD", "ID", "ComboWeights", "DimensionError", "TropicalPolytope", "box", "build_embedding",
    "hull_member", "hull_project", "mp_combination", "mt_combination", "p_map", "s_map",
    "EmbeddedMeasure", "bary_mp", "bary_mt", "barycenter",
]
