"""Set-valued and indeterminacy-bearing precalculus and calculus.

Core pieces: canonical real sets with exact endpoint-openness arithmetic
(`realset`), the a + b*I algebra (`neutronum`), function descriptors and
evaluation (`funcmodel`), a text DSL (`textparse`), and numeric engines
for limits (`limits`), continuity (`contin`) and calculus (`calc`).
"""

from . import errors
from .calc import (
    AntiderivativeResult,
    DerivClass,
    IntegralConfig,
    Interpretations,
    antiderivative_nn,
    derivative_classify,
    derivative_nn,
    derivative_thick,
    integral_interpretations,
    integrate_setbounds,
    integrate_thick,
    nn_polynomial,
)
from .contin import ContinuityClass, check_closure, classify_at, ivt_cover, ivt_find
from .funcmodel import (
    Alternatives,
    Combine,
    Composed,
    Crisp,
    Domain,
    FuncSpec,
    NeutroValue,
    NNExpr,
    PairTag,
    Piece,
    Piecewise,
    RelationKind,
    Table,
    TablePair,
    Thick,
    Parity,
    as_value,
    classify_relation,
    compose,
    evaluate,
    identity_spec,
    invert,
    parity,
    zeros,
)
from .limits import (
    LimitConfig,
    LimitOutcome,
    Side,
    directional_limit,
    full_limit,
    interval_param_limit,
    mereo_limit,
)
from .neutronum import I, NeutroNumber, nn_arith, nn_eval_rational
from .realset import (
    Interval,
    MembershipTriple,
    RealSet,
    endpoint_metric,
    intersect,
    membership,
    neutro_subset,
    normalize,
    set_arith,
    sup_norm,
)
from .textparse import (
    parse_defs,
    parse_expr,
    parse_funcdef,
    parse_set,
    parse_value,
    render,
    render_set,
)

__version__ = "0.1.0"
