import math

import pytest

from neutrocalc import funcmodel as fm
from neutrocalc.errors import DivisionBySetContainingZero, NonMonotoneParameter
from neutrocalc.funcmodel import Crisp, Param, Sqrt, Var, evaluate, value_union
from neutrocalc.limits import (
    LimitConfig,
    Side,
    directional_limit,
    full_limit,
    interval_param_limit,
    mereo_limit,
    snap_set,
)
from neutrocalc.realset import RealSet, endpoint_metric, scale, sets_close
from neutrocalc.textparse import parse_defs, parse_funcdef

from conftest import iv, pts

X, A = Var(), Param()


def spec(text):
    return parse_funcdef("f(x) = " + text)[1]


@pytest.fixture(scope="module")
def graphical():
    return spec("{ [-x^2+6*x+3, x^3-114] on (-inf,5]; [x+1, 3*x-6] on (5, inf) }")


# -- directional / mereo / full -------------------------------------------------


def test_left_and_right_limits(graphical):
    left = directional_limit(graphical, 5, Side.LEFT)
    right = directional_limit(graphical, 5, Side.RIGHT)
    assert left.is_finite and endpoint_metric(left.value, iv(8, 11)) <= 1e-6
    assert right.is_finite and endpoint_metric(right.value, iv(6, 9)) <= 1e-6


def test_mereo_is_intersection(graphical):
    got = mereo_limit(graphical, 5)
    assert got.is_finite and endpoint_metric(got.value, iv(8, 9)) <= 1e-6


def test_full_limit_does_not_exist(graphical):
    assert full_limit(graphical, 5).kind == "dne"


def test_classical_crisp_limit():
    got = full_limit(spec("x^2"), 1)
    assert got.is_finite and got.value == pts(1)
    mer = mereo_limit(spec("x^2"), 1)
    assert mer.is_finite and mer.value == pts(1)


def test_thick_limit_by_substitution():
    # direct-substitution oracle: envelopes are continuous, so L = [6, 7]
    got = full_limit(spec("[2*x, 2*x+1]"), 3)
    assert got.is_finite and got.value == iv(6, 7)


def test_empty_intersection_means_no_mereo_limit():
    f = spec("{ [0,1] on (-inf,0]; [2,3] on (0,inf) }")
    assert mereo_limit(f, 0).kind == "dne"


def test_infinite_limits_of_reciprocal():
    f = spec("[2,5]/(x-1)")
    assert directional_limit(f, 1, Side.LEFT).kind == "-inf"
    assert directional_limit(f, 1, Side.RIGHT).kind == "+inf"
    assert full_limit(f, 1).kind == "dne"


def test_two_sided_infinite_limit():
    g = spec("4/((1,3)*x^2)")
    assert directional_limit(g, 0, Side.LEFT).kind == "+inf"
    assert directional_limit(g, 0, Side.RIGHT).kind == "+inf"
    assert full_limit(g, 0).kind == "+inf"
    assert mereo_limit(g, 0).kind == "+inf"


def test_oscillation_does_not_converge():
    assert directional_limit(spec("sin(1/x)"), 0, Side.RIGHT).kind == "dne"


def test_branchwise_limits_must_agree():
    f = spec("x or x+1")
    got = full_limit(f, 2)
    assert got.kind == "dne" and "disagree" in got.reason
    same = spec("x or x")  # alternatives that coincide in the limit
    got = full_limit(same, 2)
    assert got.is_finite and got.value == pts(2)


def test_asymptote_alternatives_reported_per_branch():
    h = spec("(x^2+7)/(x - (2 or 3))")
    got = directional_limit(h, 2, Side.LEFT)
    assert got.kind == "dne" and "-inf" in got.reason


def test_scaling_commutes_with_limits(rng):
    for _ in range(25):
        c0, c1 = rng.uniform(-3, 3), rng.uniform(-3, 3)
        alpha = rng.choice([-3.0, -0.5, 2.0, 4.0])
        c = rng.uniform(-2, 2)
        f = spec(f"[{c0} + {c1}*x, {c0} + {c1}*x + 1]")
        scaled = spec(f"{alpha}*[{c0} + {c1}*x, {c0} + {c1}*x + 1]")
        base = full_limit(f, c)
        got = full_limit(scaled, c)
        assert base.is_finite and got.is_finite
        assert endpoint_metric(got.value, scale(alpha, base.value)) <= 1e-5


def test_classical_agreement_on_polynomials(rng):
    for _ in range(40):
        coeffs = [rng.uniform(-3, 3) for _ in range(4)]
        c = rng.uniform(-2, 2)
        text = f"{coeffs[0]} + {coeffs[1]}*x + {coeffs[2]}*x^2 + {coeffs[3]}*x^3"
        got = full_limit(spec(text), c)
        direct = evaluate(spec(text), c).single().single_value
        assert got.is_finite
        assert abs(got.value.single_value - direct) <= 2e-6


# -- epsilon-delta closed forms ----------------------------------------------------


@pytest.mark.parametrize("eps", [0.1, 0.01, 0.001])
def test_left_epsilon_delta_bound(graphical, eps):
    # closed-form delta = eps/75 for the left limit [8, 11]
    delta = eps / 75
    target = iv(8, 11)
    for i in range(1, 60):
        x = 5 - delta * i / 60.0
        val = value_union(evaluate(graphical, x))
        assert endpoint_metric(val, target) < eps


@pytest.mark.parametrize("eps", [0.1, 0.01, 0.001])
def test_right_epsilon_delta_bound(graphical, eps):
    # closed-form delta = eps/3 for the right limit [6, 9]
    delta = eps / 3
    target = iv(6, 9)
    for i in range(1, 60):
        x = 5 + delta * i / 60.0
        val = value_union(evaluate(graphical, x))
        assert endpoint_metric(val, target) < eps


# -- parameterized interval limits ---------------------------------------------------


def test_factoring_example_with_interval_coefficients():
    t = (X * X + 3 * X - A * X - 3 * A) / (X + 3)
    got = interval_param_limit(t, 1, 2, -3)
    assert got.is_finite
    assert endpoint_metric(got.value, iv(-5, -4)) <= 1e-6
    # crisp cross-checks land inside the hull
    for alpha, want in ((1.0, -4.0), (2.0, -5.0), (1.5, -4.5)):
        crisp = full_limit(Crisp(fm.substitute_param(t, alpha)), -3)
        assert crisp.is_finite
        v = crisp.value.single_value
        assert abs(v - want) <= 1e-6
        assert got.value.inf - 1e-9 <= v <= got.value.sup + 1e-9


def test_rationalizing_example_with_interval_coefficient():
    t = (Sqrt(A * X + 1) - 1) / X
    got = interval_param_limit(t, 4, 5, 0)
    assert got.is_finite
    assert endpoint_metric(got.value, iv(2, 2.5)) <= 1e-6


def test_degenerate_parameter_interval_is_classical():
    t = (X * X + 3 * X - A * X - 3 * A) / (X + 3)
    got = interval_param_limit(t, 1, 1, -3)
    assert got.is_finite and got.value == pts(-4)


def test_non_monotone_parameter_detected():
    # limit value (alpha - 1.5)^2: endpoints give 0.25, midpoint gives 0
    t = (A - 1.5) * (A - 1.5) + 0 * X
    with pytest.raises(NonMonotoneParameter):
        interval_param_limit(t, 1, 2, 0)


def test_direct_substitution_raises_then_numeric_converges():
    f = spec("(sqrt([4,5]*x+1)-1)/x")
    with pytest.raises(DivisionBySetContainingZero):
        evaluate(f, 0)
    got = full_limit(f, 0)
    assert got.is_finite and endpoint_metric(got.value, iv(2, 2.5)) <= 1e-6


# -- config and snapping ------------------------------------------------------------


def test_snap_cleans_drift():
    drifted = RealSet.interval(8 + 3e-7, 11 - 4e-7)
    assert snap_set(drifted, 1e-6) == iv(8, 11)


def test_config_validation():
    with pytest.raises(ValueError):
        LimitConfig(ratio=1.5)
    with pytest.raises(ValueError):
        LimitConfig(h0=-1)


def test_full_finite_implies_mereo_same_set():
    for text, c in (("[2*x, 2*x+1]", 3.0), ("x^2", 1.0), ("[x, x+2]", 0.0)):
        f = spec(text)
        full = full_limit(f, c)
        mereo = mereo_limit(f, c)
        assert full.is_finite and mereo.is_finite
        assert endpoint_metric(full.value, mereo.value) <= 1e-6
