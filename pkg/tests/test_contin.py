import pytest

from neutrocalc import funcmodel as fm
from neutrocalc.contin import (
    check_closure,
    classify_at,
    ivt_cover,
    ivt_find,
)
from neutrocalc.errors import NotFound, OutOfRange, PreconditionError
from neutrocalc.funcmodel import evaluate, value_union
from neutrocalc.realset import RealSet, endpoint_metric
from neutrocalc.textparse import parse_defs, parse_funcdef

from conftest import iv, pts


def spec(text):
    return parse_funcdef("f(x) = " + text)[1]


@pytest.fixture(scope="module")
def graphical():
    return spec("{ [-x^2+6*x+3, x^3-114] on (-inf,5]; [x+1, 3*x-6] on (5, inf) }")


# -- continuity classification -----------------------------------------------


def test_mereo_continuous_at_junction(graphical):
    got = classify_at(graphical, 5)
    assert got.kind == "mereo-continuous"
    assert endpoint_metric(got.witness, iv(8, 9)) <= 1e-6


def test_thick_linear_is_continuous():
    # substitution oracle: both envelopes polynomial, L = R = f(3) = [6, 7]
    assert classify_at(spec("[2*x, 2*x+1]"), 3).kind == "continuous"


def test_step_function_is_discontinuous():
    f = spec("{ 0 on (-inf,0]; 1 on (0,inf) }")
    got = classify_at(f, 0)
    assert got.kind == "discontinuous"


def test_continuous_implies_mereo_limit_is_value():
    from neutrocalc.limits import mereo_limit

    f = spec("[2*x, 2*x+1]")
    got = classify_at(f, 3)
    assert got.is_continuous
    lim = mereo_limit(f, 3)
    fc = value_union(evaluate(f, 3))
    assert lim.is_finite and endpoint_metric(lim.value, fc) <= 2e-6


# -- intermediate value search ---------------------------------------------------


def test_band_witness_leftmost():
    # 3 in [c, c+2] exactly for c in [1, 3]; leftmost witness is 1
    f = spec("[x, x+2]")
    c = ivt_find(f, 0, 4, 3, grid=256)
    assert c == pytest.approx(1.0, abs=1e-6)
    val = value_union(evaluate(f, c))
    assert val.inf - 1e-9 <= 3 <= val.sup + 1e-9


def test_crisp_witness_classical():
    c = ivt_find(spec("x"), 0, 2, 1, grid=64)
    assert c == pytest.approx(1.0, abs=1e-6)


def test_out_of_range_rejected():
    with pytest.raises(OutOfRange):
        ivt_find(spec("[x, x+2]"), 0, 4, 99, grid=32)


def test_degenerate_range_rejected():
    with pytest.raises(PreconditionError):
        ivt_find(spec("[0,0] + 0*x"), 0, 1, 0, grid=8)


def test_gap_target_not_found():
    t = spec("table { {1}->[0,1]; {2}->[3,4] }")
    with pytest.raises(NotFound):
        ivt_find(t, 1, 2, 2.0, grid=16)


def test_witness_survives_grid_refinement():
    f = spec("[x, x+2]")
    coarse = ivt_find(f, 0, 4, 3, grid=128)
    fine = ivt_find(f, 0, 4, 3, grid=2048)
    assert abs(coarse - fine) <= 1e-6


def test_cover_table_from_sampled_graph():
    h = spec("table { {3}->[6,8]; {8}->[6.5,11]; {10}->[9.5,12]; {12}->[10,12.5] }")
    got = ivt_cover(h, 3, 12, 6.5, 12)
    assert got == [8.0, 10.0]
    union = RealSet.union(value_union(evaluate(h, 8)), value_union(evaluate(h, 10)))
    assert union == iv(6.5, 12)


def test_cover_single_point_band():
    # [0, 2] at c=0 already covers [1, 2] (hand oracle)
    got = ivt_cover(spec("[x, x+2]"), 0, 4, 1, 2, grid=64)
    assert got == [0.0]


def test_cover_degenerate_target():
    got = ivt_cover(spec("x"), 0, 2, 0.5, 0.5, grid=64)
    assert got == [0.5]


def test_cover_actually_covers(rng):
    f = spec("[x, x+1.5]")
    got = ivt_cover(f, 0, 6, 1, 6, grid=256)
    union = RealSet.union(*(value_union(evaluate(f, c)) for c in got))
    for i in range(101):
        t = 1 + 5 * i / 100
        assert any(p.lo <= t <= p.hi for p in union.pieces())


# -- closure under pointwise operations -----------------------------------------


def test_closure_at_mereo_junction(graphical):
    assert check_closure(graphical, graphical, 5, "add")
    assert check_closure(graphical, graphical, 5, "sub")
    assert check_closure(graphical, graphical, 5, "mul")
    assert check_closure(graphical, graphical, 5, "div")
    assert check_closure(graphical, graphical, 5, "scale", alpha=-2)


def test_closure_classical_product():
    assert check_closure(spec("x^2"), spec("x"), 2, "mul")


def test_closure_preconditions():
    step = spec("{ [0,1] on (-inf,0]; [5,6] on (0,inf) }")
    with pytest.raises(PreconditionError):
        check_closure(step, spec("x"), 0, "add")
    crossing = spec("x")  # value set touches 0 at c=0
    with pytest.raises(PreconditionError):
        check_closure(spec("x+1"), crossing, 0, "div")


def test_closure_randomized_thick_pairs(rng):
    ops = ["add", "sub", "mul", "div"]
    for k in range(60):
        a0, a1, a2 = (rng.uniform(-1, 1) for _ in range(3))
        b0, b1, b2 = (rng.uniform(-1, 1) for _ in range(3))
        w1, w2 = rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5)
        c = rng.uniform(-1, 1)
        f = spec(f"[{a0} + {a1}*x + {a2}*x^2, {a0} + {a1}*x + {a2}*x^2 + {w1}]")
        g = spec(f"[5 + {b0} + {b1}*x + {b2}*x^2, 5 + {b0} + {b1}*x + {b2}*x^2 + {w2}]")
        assert check_closure(f, g, c, ops[k % 4])
