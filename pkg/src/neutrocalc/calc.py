"""Derivatives and integrals of set-valued and indeterminacy-valued functions.

Differentiation is symbolic on the expression AST (envelope-wise for
thick functions, termwise for indeterminacy-coefficient polynomials);
definite integrals are Riemann sums of value sets, split at piecewise
boundaries, with a vectorized fast path for plain envelopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import funcmodel as fm
from .errors import (
    IntegrationError,
    InvalidBounds,
    NeutroError,
    NotSupported,
    PreconditionError,
)
from .funcmodel import (
    Abs, Add, Between, Const, ConstNN, ConstSet, Cos, Div, Exp, Expr, Ln, Log,
    Mul, Param, Pow, Sin, Sqrt, Sub, Var,
)
from .neutronum import NeutroNumber
from .realset import RealSet, endpoint_metric, scale, set_add

__all__ = [
    "diff_expr", "simplify", "derivative_thick", "DerivClass",
    "derivative_classify", "nn_polynomial", "derivative_nn",
    "AntiderivativeResult", "antiderivative_nn",
    "IntegralConfig", "integrate_thick", "integral_interpretations",
    "integrate_setbounds", "Interpretations",
]


# ---------------------------------------------------------------------------
# Symbolic differentiation
# ---------------------------------------------------------------------------


def diff_expr(e: Expr) -> Expr:
    """Symbolic derivative; supported primitives: polynomial, exp, ln,
    log (constant base), sqrt, sin, cos."""
    if isinstance(e, (Const, ConstSet, ConstNN, Param)):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0)
    if isinstance(e, Add):
        return Add(diff_expr(e.left), diff_expr(e.right))
    if isinstance(e, Sub):
        return Sub(diff_expr(e.left), diff_expr(e.right))
    if isinstance(e, Mul):
        return Add(Mul(diff_expr(e.left), e.right), Mul(e.left, diff_expr(e.right)))
    if isinstance(e, Div):
        num = Sub(Mul(diff_expr(e.left), e.right), Mul(e.left, diff_expr(e.right)))
        return Div(num, Pow(e.right, 2))
    if isinstance(e, Pow):
        return Mul(Mul(Const(float(e.n)), Pow(e.base, e.n - 1)), diff_expr(e.base))
    if isinstance(e, Exp):
        return Mul(Exp(e.arg), diff_expr(e.arg))
    if isinstance(e, Ln):
        return Div(diff_expr(e.arg), e.arg)
    if isinstance(e, Log):
        if fm.contains_var(e.base):
            raise NotSupported("cannot differentiate a variable logarithm base")
        return Div(diff_expr(e.arg), Mul(e.arg, Ln(e.base)))
    if isinstance(e, Sqrt):
        return Div(diff_expr(e.arg), Mul(Const(2.0), Sqrt(e.arg)))
    if isinstance(e, Sin):
        return Mul(Cos(e.arg), diff_expr(e.arg))
    if isinstance(e, Cos):
        return Mul(Const(-1.0), Mul(Sin(e.arg), diff_expr(e.arg)))
    if isinstance(e, Between):
        return Between(diff_expr(e.lo), diff_expr(e.hi), e.lo_open, e.hi_open)
    raise NotSupported(f"cannot differentiate {type(e).__name__}")


def simplify(e: Expr) -> Expr:
    """Constant folding and identity elimination (keeps term order)."""
    if isinstance(e, Add):
        l, r = simplify(e.left), simplify(e.right)
        if isinstance(l, Const) and isinstance(r, Const):
            return Const(l.value + r.value)
        if isinstance(l, Const) and l.value == 0:
            return r
        if isinstance(r, Const) and r.value == 0:
            return l
        return Add(l, r)
    if isinstance(e, Sub):
        l, r = simplify(e.left), simplify(e.right)
        if isinstance(l, Const) and isinstance(r, Const):
            return Const(l.value - r.value)
        if isinstance(r, Const) and r.value == 0:
            return l
        if isinstance(l, Const) and l.value == 0:
            return simplify(Mul(Const(-1.0), r))
        return Sub(l, r)
    if isinstance(e, Mul):
        l, r = simplify(e.left), simplify(e.right)
        if isinstance(r, Const) and not isinstance(l, Const):
            l, r = r, l
        if isinstance(l, Const):
            if l.value == 0:
                return Const(0.0)
            if l.value == 1:
                return r
            if isinstance(r, Const):
                return Const(l.value * r.value)
            if isinstance(r, Mul) and isinstance(r.left, Const):
                return Mul(Const(l.value * r.left.value), r.right)
        return Mul(l, r)
    if isinstance(e, Div):
        l, r = simplify(e.left), simplify(e.right)
        if isinstance(l, Const) and l.value == 0:
            return Const(0.0)
        if isinstance(r, Const) and r.value == 1:
            return l
        if isinstance(l, Const) and isinstance(r, Const) and r.value != 0:
            return Const(l.value / r.value)
        return Div(l, r)
    if isinstance(e, Pow):
        b = simplify(e.base)
        if e.n == 0:
            return Const(1.0)
        if e.n == 1:
            return b
        if isinstance(b, Const):
            return Const(b.value ** e.n)
        return Pow(b, e.n)
    if isinstance(e, (Exp, Ln, Sqrt, Sin, Cos, Abs)):
        return type(e)(simplify(e.arg))
    if isinstance(e, Log):
        return Log(simplify(e.base), simplify(e.arg))
    if isinstance(e, Between):
        return Between(simplify(e.lo), simplify(e.hi), e.lo_open, e.hi_open)
    return e


def derivative_thick(f: fm.FuncSpec) -> fm.FuncSpec:
    """Envelope-wise symbolic derivative of crisp / thick / piecewise specs.

    For a thick function the result's envelopes are the derivatives of
    the input envelopes; evaluation sorts them pointwise, so crossing
    derivative envelopes are fine.
    """
    if isinstance(f, fm.Crisp):
        return fm.Crisp(simplify(diff_expr(f.expr)))
    if isinstance(f, fm.Thick):
        return fm.Thick(simplify(diff_expr(f.lower)), simplify(diff_expr(f.upper)),
                        f.lo_open, f.hi_open)
    if isinstance(f, fm.Alternatives):
        return fm.Alternatives(tuple(derivative_thick(b) for b in f.branches))
    if isinstance(f, fm.Piecewise):
        pieces = []
        for p in f.pieces:
            if p.set_key is not None:
                raise NotSupported("cannot differentiate a set-argument piece")
            pieces.append(fm.Piece(derivative_thick(p.spec), domain=p.domain))
        return fm.Piecewise(tuple(pieces))
    raise NotSupported(f"cannot differentiate spec {type(f).__name__}")


@dataclass(frozen=True)
class DerivClass:
    """differentiable | mereo-derivative (both with a set) | not-differentiable."""

    kind: str
    value: RealSet | None = None

    def __repr__(self):
        if self.value is None:
            return f"DerivClass({self.kind})"
        from . import textparse

        return f"DerivClass({self.kind}, {textparse.render_set(self.value)})"


def derivative_classify(f: fm.Piecewise, c: float, tol: float = 1e-9) -> DerivClass:
    """Compare one-sided derivative sets where two pieces meet at c."""
    if not isinstance(f, fm.Piecewise):
        raise NotSupported("junction classification needs a piecewise spec")
    delta = max(1e-9, abs(c) * 1e-12)
    left_piece = right_piece = None
    for p in f.pieces:
        if p.domain is None:
            continue
        if p.domain.contains(c - delta):
            left_piece = p
        if p.domain.contains(c + delta):
            right_piece = p
    if left_piece is None or right_piece is None:
        raise NotSupported(f"no pieces meeting at {c}")
    try:
        left = fm.value_union(fm.evaluate(derivative_thick(left_piece.spec), c))
        right = fm.value_union(fm.evaluate(derivative_thick(right_piece.spec), c))
    except NeutroError as err:
        raise NotSupported(f"derivative not evaluable at {c}: {err}") from err
    if endpoint_metric(left, right) <= tol:
        return DerivClass("differentiable", left)
    both = fm.intersect(left, right)
    if not both.is_empty():
        return DerivClass("mereo-derivative", both)
    return DerivClass("not-differentiable")


# ---------------------------------------------------------------------------
# Indeterminacy-coefficient polynomials
# ---------------------------------------------------------------------------


def nn_polynomial(f) -> dict[int, NeutroNumber]:
    """Extract {degree: coefficient} from a polynomial spec or expression."""
    e = f.expr if isinstance(f, (fm.NNExpr, fm.Crisp)) else f
    if not isinstance(e, Expr):
        raise NotSupported("need a formula spec")
    poly = _poly(e)
    return {d: c for d, c in sorted(poly.items())
            if not (c.is_crisp and c.a == 0.0)}


def _poly_add(a, b, sign=1.0):
    out = dict(a)
    for d, c in b.items():
        cur = out.get(d, NeutroNumber(0.0))
        out[d] = cur + c * NeutroNumber(sign) if sign != 1.0 else cur + c
    return out


def _poly_mul(a, b):
    out: dict[int, NeutroNumber] = {}
    for da, ca in a.items():
        for db, cb in b.items():
            cur = out.get(da + db, NeutroNumber(0.0))
            out[da + db] = cur + ca * cb
    return out


def _poly(e: Expr) -> dict[int, NeutroNumber]:
    if isinstance(e, Const):
        return {0: NeutroNumber(e.value)}
    if isinstance(e, ConstNN):
        return {0: e.value}
    if isinstance(e, Var):
        return {1: NeutroNumber(1.0)}
    if isinstance(e, Add):
        return _poly_add(_poly(e.left), _poly(e.right))
    if isinstance(e, Sub):
        return _poly_add(_poly(e.left), _poly(e.right), sign=-1.0)
    if isinstance(e, Mul):
        return _poly_mul(_poly(e.left), _poly(e.right))
    if isinstance(e, Pow):
        if e.n < 0:
            raise NotSupported("negative power is not polynomial")
        out = {0: NeutroNumber(1.0)}
        base = _poly(e.base)
        for _ in range(e.n):
            out = _poly_mul(out, base)
        return out
    if isinstance(e, Div):
        den = _poly(e.right)
        if set(den) - {0}:
            raise NotSupported("polynomial division by a non-constant")
        c = den.get(0, NeutroNumber(0.0))
        if not c.is_crisp or c.a == 0:
            raise NotSupported("division needs a crisp nonzero constant")
        return {d: coeff.div_crisp(c.a) for d, coeff in _poly(e.left).items()}
    raise NotSupported(f"{type(e).__name__} is not polynomial")


def _poly_to_expr(poly: dict[int, NeutroNumber]) -> Expr:
    terms = []
    for d in sorted(poly):
        c = poly[d]
        if c.is_crisp and c.a == 0.0:
            continue
        coeff: Expr = Const(c.a) if c.is_crisp else ConstNN(c)
        if d == 0:
            terms.append(coeff)
        else:
            xpow = Var() if d == 1 else Pow(Var(), d)
            if c.is_crisp and c.a == 1.0:
                terms.append(xpow)
            else:
                terms.append(Mul(coeff, xpow))
    if not terms:
        return Const(0.0)
    out = terms[0]
    for t in terms[1:]:
        out = Add(out, t)
    return out


def derivative_nn(f) -> fm.NNExpr:
    """Termwise power-rule derivative of an indeterminacy polynomial."""
    poly = nn_polynomial(f)
    dpoly = {d - 1: c * NeutroNumber(float(d)) for d, c in poly.items() if d >= 1}
    return fm.NNExpr(_poly_to_expr(dpoly))


@dataclass(frozen=True)
class AntiderivativeResult:
    """Antiderivative spec plus the indeterminate integration constant."""

    spec: fm.NNExpr
    constant: str = "a + b*I"


def antiderivative_nn(f) -> AntiderivativeResult:
    """Termwise antiderivative; the constant is indeterminate (a + b*I)."""
    poly = nn_polynomial(f)
    ipoly = {d + 1: c.div_crisp(float(d + 1)) for d, c in poly.items()}
    return AntiderivativeResult(fm.NNExpr(_poly_to_expr(ipoly)))


# ---------------------------------------------------------------------------
# Definite integration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegralConfig:
    n: int = 4096
    rule: str = "midpoint"  # midpoint | left

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.rule not in ("midpoint", "left"):
            raise ValueError("rule must be 'midpoint' or 'left'")


def _split_points(f: fm.FuncSpec, a: float, b: float) -> list[float]:
    cuts: set[float] = set()
    if isinstance(f, fm.Piecewise):
        for p in f.pieces:
            if p.domain is None:
                continue
            for iv in p.domain.intervals:
                for v in (iv.lo, iv.hi):
                    if math.isfinite(v) and a < v < b:
                        cuts.add(v)
            for v in p.domain.points:
                if a < v < b:
                    cuts.add(v)
    elif isinstance(f, (fm.Composed, fm.Combine)):
        for child in (getattr(f, "outer", None), getattr(f, "inner", None),
                      getattr(f, "left", None), getattr(f, "right", None)):
            if child is not None:
                cuts.update(_split_points(child, a, b))
    return sorted(cuts)


def _resolve_envelopes(f: fm.FuncSpec, probe: float):
    """Plain envelope pair for the piece active at `probe`, or None."""
    if isinstance(f, fm.Crisp) and fm.is_set_free(f.expr):
        return f.expr, f.expr, False, False
    if isinstance(f, fm.Thick) and fm.is_set_free(f.lower) and fm.is_set_free(f.upper):
        return f.lower, f.upper, f.lo_open, f.hi_open
    if isinstance(f, fm.Piecewise):
        for p in f.pieces:
            if p.domain is not None and p.domain.contains(probe):
                return _resolve_envelopes(p.spec, probe)
    return None


def _eval_numpy(e: Expr, xs):
    if isinstance(e, Const):
        return np.full_like(xs, e.value)
    if isinstance(e, Var):
        return xs
    if isinstance(e, Add):
        return _eval_numpy(e.left, xs) + _eval_numpy(e.right, xs)
    if isinstance(e, Sub):
        return _eval_numpy(e.left, xs) - _eval_numpy(e.right, xs)
    if isinstance(e, Mul):
        return _eval_numpy(e.left, xs) * _eval_numpy(e.right, xs)
    if isinstance(e, Div):
        return _eval_numpy(e.left, xs) / _eval_numpy(e.right, xs)
    if isinstance(e, Pow):
        return _eval_numpy(e.base, xs) ** float(e.n)
    if isinstance(e, Exp):
        return np.exp(_eval_numpy(e.arg, xs))
    if isinstance(e, Ln):
        return np.log(_eval_numpy(e.arg, xs))
    if isinstance(e, Log):
        return np.log(_eval_numpy(e.arg, xs)) / np.log(_eval_numpy(e.base, xs))
    if isinstance(e, Sqrt):
        return np.sqrt(_eval_numpy(e.arg, xs))
    if isinstance(e, Sin):
        return np.sin(_eval_numpy(e.arg, xs))
    if isinstance(e, Cos):
        return np.cos(_eval_numpy(e.arg, xs))
    if isinstance(e, Abs):
        return np.abs(_eval_numpy(e.arg, xs))
    raise NotSupported(f"{type(e).__name__} has no vectorized form")


def _segment_sum(f: fm.FuncSpec, a: float, b: float, n: int, rule: str) -> RealSet:
    """Riemann sum of value sets over one smooth segment."""
    width = (b - a) / n
    offset = 0.5 if rule == "midpoint" else 0.0
    resolved = _resolve_envelopes(f, a + width * (offset or 0.5))
    if resolved is not None:
        lo_e, hi_e, lo_open, hi_open = resolved
        with np.errstate(all="ignore"):
            xs = a + (np.arange(n, dtype=float) + offset) * width
            try:
                lo_v = np.broadcast_to(_eval_numpy(lo_e, xs), xs.shape)
                hi_v = np.broadcast_to(_eval_numpy(hi_e, xs), xs.shape)
            except NotSupported:
                lo_v = hi_v = np.array([math.nan])
        if np.isfinite(lo_v).all() and np.isfinite(hi_v).all():
            lo = float(np.minimum(lo_v, hi_v).sum() * width)
            hi = float(np.maximum(lo_v, hi_v).sum() * width)
            if lo == hi:
                return RealSet.point(lo)
            return RealSet.interval(lo, hi, lo_open, hi_open)

    total = RealSet.point(0.0)
    for i in range(n):
        x = a + (i + offset) * width
        try:
            v = fm.evaluate(f, x)
        except NeutroError as err:
            raise IntegrationError(f"evaluation failed at {x}: {err}") from err
        if len(v.branches) != 1 or not isinstance(v.branches[0], RealSet):
            raise IntegrationError(
                "integrand has discrete alternatives; integrate each branch"
            )
        total = set_add(total, scale(width, v.branches[0]))
    return total


def integrate_thick(f: fm.FuncSpec, a: float, b: float,
                    cfg: IntegralConfig = IntegralConfig()) -> RealSet:
    """Riemann-sum definite integral of the value sets over [a, b].

    The domain splits at piecewise boundaries; for thick specs this
    converges to the interval of the two envelope integrals with
    envelope crossings honored pointwise.
    """
    if not a < b:
        raise PreconditionError("need a < b")
    cuts = [a] + _split_points(f, a, b) + [b]
    total = RealSet.point(0.0)
    for s, t in zip(cuts, cuts[1:]):
        n = max(1, int(round(cfg.n * (t - s) / (b - a))))
        total = set_add(total, _segment_sum(f, s, t, n, cfg.rule))
    return total


@dataclass(frozen=True)
class Interpretations:
    """The three canonical readings of a set-valued integral."""

    min: float
    mid: float
    max: float


def integral_interpretations(lower: float, upper: float) -> Interpretations:
    """Lower bound, average, and upper bound of an integral interval."""
    if lower > upper:
        raise PreconditionError("need lower <= upper")
    return Interpretations(lower, 0.5 * (lower + upper), upper)


def integrate_setbounds(f: fm.FuncSpec, a_set: RealSet, b_set: RealSet,
                        cfg: IntegralConfig = IntegralConfig()) -> RealSet:
    """Integral between set-valued bounds.

    The sample arguments sweep intervals whose inf and sup interpolate
    between the bounds' inf/sup chains; each value set is weighted by
    endpoint_metric(B, A)/n.  Non-interval bounds reduce to their hulls.
    """
    if a_set.is_empty() or b_set.is_empty():
        raise InvalidBounds("bounds must be non-empty")
    if a_set.inf > b_set.inf or a_set.sup > b_set.sup:
        raise InvalidBounds("need inf A <= inf B and sup A <= sup B")
    weight = endpoint_metric(b_set, a_set) / cfg.n
    offset = 0.5 if cfg.rule == "midpoint" else 0.0
    total = RealSet.point(0.0)
    for i in range(cfg.n):
        t = (i + offset) / cfg.n
        lo = a_set.inf + (b_set.inf - a_set.inf) * t
        hi = a_set.sup + (b_set.sup - a_set.sup) * t
        arg = RealSet.point(lo) if lo == hi else RealSet.closed(lo, hi)
        try:
            v = fm.evaluate(f, arg)
        except NeutroError as err:
            raise IntegrationError(f"evaluation failed at {arg!r}: {err}") from err
        if len(v.branches) != 1 or not isinstance(v.branches[0], RealSet):
            raise IntegrationError(
                "integrand has discrete alternatives; integrate each branch"
            )
        total = set_add(total, scale(weight, v.branches[0]))
    return total
