"""Expression AST, function descriptors, and their evaluation.

Functions are described by FuncSpec variants:

  Crisp(expr)              a single formula
  Thick(lower, upper)      interval between two envelope formulas
  Piecewise(pieces)        domain-dispatched sub-specs
  Alternatives(branches)   discrete "or" indeterminacy (>= 2 branches)
  Table(pairs)             finite set-argument / set-value pairs
  NNExpr(expr)             formula with indeterminacy-number coefficients
  Composed / Combine       closures produced by compose() and pointwise ops

Evaluation maps a NeutroValue (non-empty branches of real sets or
indeterminacy numbers) through a spec to a new NeutroValue; alternatives
fan out multiplicatively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from . import realset
from .errors import DivisionBySetContainingZero, DomainError, NotSupported, OverlapError
from .neutronum import NeutroNumber
from .realset import Interval, RealSet, intersect

__all__ = [
    "Expr", "Const", "ConstSet", "ConstNN", "Var", "Param",
    "Add", "Sub", "Mul", "Div", "Pow", "Exp", "Ln", "Log",
    "Sqrt", "Sin", "Cos", "Abs", "Between",
    "FuncSpec", "Crisp", "Thick", "Piece", "Piecewise", "Alternatives",
    "PairTag", "TablePair", "Table", "NNExpr", "Composed", "Combine",
    "Domain", "DomainInterval", "NeutroValue",
    "as_value", "evaluate", "eval_expr_set", "eval_expr_nn", "eval_expr_scalar",
    "is_set_free", "substitute_param",
    "compose", "identity_spec", "invert", "invert_expr",
    "RelationKind", "classify_relation", "Parity", "parity", "zeros",
    "values_equal", "negate_value", "value_union",
]


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


class Expr:
    """Base expression node; arithmetic operators build larger trees."""

    def _c(self, v):
        if isinstance(v, Expr):
            return v
        if isinstance(v, (int, float)):
            return Const(float(v))
        if isinstance(v, RealSet):
            return ConstSet(v)
        if isinstance(v, NeutroNumber):
            return ConstNN(v)
        return NotImplemented

    def __add__(self, o):
        return Add(self, self._c(o))

    def __radd__(self, o):
        return Add(self._c(o), self)

    def __sub__(self, o):
        return Sub(self, self._c(o))

    def __rsub__(self, o):
        return Sub(self._c(o), self)

    def __mul__(self, o):
        return Mul(self, self._c(o))

    def __rmul__(self, o):
        return Mul(self._c(o), self)

    def __truediv__(self, o):
        return Div(self, self._c(o))

    def __rtruediv__(self, o):
        return Div(self._c(o), self)

    def __pow__(self, n):
        if isinstance(n, int):
            return Pow(self, n)
        return NotImplemented

    def __neg__(self):
        return Mul(Const(-1.0), self)


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class ConstSet(Expr):
    value: RealSet


@dataclass(frozen=True)
class ConstNN(Expr):
    value: NeutroNumber


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Param(Expr):
    """Free scalar parameter used by parameterized limit templates."""


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    n: int


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


@dataclass(frozen=True)
class Ln(Expr):
    arg: Expr


@dataclass(frozen=True)
class Log(Expr):
    base: Expr
    arg: Expr


@dataclass(frozen=True)
class Sqrt(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sin(Expr):
    arg: Expr


@dataclass(frozen=True)
class Cos(Expr):
    arg: Expr


@dataclass(frozen=True)
class Abs(Expr):
    arg: Expr


@dataclass(frozen=True)
class Between(Expr):
    """Pointwise interval spanned by two envelope expressions.

    At each argument the value is the interval between the two envelope
    values (sorted; crossing envelopes are fine), with the given
    endpoint openness.
    """

    lo: Expr
    hi: Expr
    lo_open: bool = False
    hi_open: bool = False


def children(e: Expr):
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, (Exp, Ln, Sqrt, Sin, Cos, Abs)):
        return (e.arg,)
    if isinstance(e, Log):
        return (e.base, e.arg)
    if isinstance(e, Between):
        return (e.lo, e.hi)
    return ()


@lru_cache(maxsize=4096)
def _has_node(e: Expr, kinds) -> bool:
    if isinstance(e, kinds):
        return True
    return any(_has_node(c, kinds) for c in children(e))


def has_nn(e: Expr) -> bool:
    return _has_node(e, ConstNN)


def is_set_free(e: Expr) -> bool:
    """True if the expression can be evaluated on plain floats."""
    return not _has_node(e, (ConstSet, ConstNN, Between, Param))


def contains_var(e: Expr) -> bool:
    return _has_node(e, Var)


def substitute_param(e: Expr, alpha: float) -> Expr:
    """Replace every Param leaf with the scalar `alpha`."""
    if isinstance(e, Param):
        return Const(float(alpha))
    if isinstance(e, (Add, Sub, Mul, Div)):
        return type(e)(substitute_param(e.left, alpha), substitute_param(e.right, alpha))
    if isinstance(e, Pow):
        return Pow(substitute_param(e.base, alpha), e.n)
    if isinstance(e, (Exp, Ln, Sqrt, Sin, Cos, Abs)):
        return type(e)(substitute_param(e.arg, alpha))
    if isinstance(e, Log):
        return Log(substitute_param(e.base, alpha), substitute_param(e.arg, alpha))
    if isinstance(e, Between):
        return Between(
            substitute_param(e.lo, alpha), substitute_param(e.hi, alpha),
            e.lo_open, e.hi_open,
        )
    return e


# ---------------------------------------------------------------------------
# Scalar evaluation (fast path for set-free expressions)
# ---------------------------------------------------------------------------


def eval_expr_scalar(e: Expr, x: float) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Add):
        return eval_expr_scalar(e.left, x) + eval_expr_scalar(e.right, x)
    if isinstance(e, Sub):
        return eval_expr_scalar(e.left, x) - eval_expr_scalar(e.right, x)
    if isinstance(e, Mul):
        return eval_expr_scalar(e.left, x) * eval_expr_scalar(e.right, x)
    if isinstance(e, Div):
        d = eval_expr_scalar(e.right, x)
        if d == 0:
            raise DivisionBySetContainingZero("division by zero")
        return eval_expr_scalar(e.left, x) / d
    if isinstance(e, Pow):
        b = eval_expr_scalar(e.base, x)
        if e.n < 0 and b == 0:
            raise DivisionBySetContainingZero("0 to a negative power")
        return b ** e.n
    if isinstance(e, Exp):
        return math.exp(eval_expr_scalar(e.arg, x))
    if isinstance(e, Ln):
        v = eval_expr_scalar(e.arg, x)
        if v <= 0:
            raise DomainError(f"ln of non-positive value {v}")
        return math.log(v)
    if isinstance(e, Log):
        b = eval_expr_scalar(e.base, x)
        v = eval_expr_scalar(e.arg, x)
        if v <= 0 or b <= 0 or b == 1:
            raise DomainError("log with non-positive argument or bad base")
        return math.log(v) / math.log(b)
    if isinstance(e, Sqrt):
        v = eval_expr_scalar(e.arg, x)
        if v < 0:
            raise DomainError(f"sqrt of negative value {v}")
        return math.sqrt(v)
    if isinstance(e, Sin):
        return math.sin(eval_expr_scalar(e.arg, x))
    if isinstance(e, Cos):
        return math.cos(eval_expr_scalar(e.arg, x))
    if isinstance(e, Abs):
        return abs(eval_expr_scalar(e.arg, x))
    raise NotSupported(f"cannot evaluate {type(e).__name__} on a scalar")


# ---------------------------------------------------------------------------
# Set evaluation
# ---------------------------------------------------------------------------


def _map_increasing(s: RealSet, fn) -> RealSet:
    ivs, pts = [], []
    for iv in s.pieces():
        if iv.is_degenerate():
            pts.append(fn(iv.lo))
        else:
            ivs.append(Interval(fn(iv.lo), fn(iv.hi), iv.lo_open, iv.hi_open))
    return RealSet(ivs, pts)


def _set_exp(s: RealSet) -> RealSet:
    return _map_increasing(s, math.exp)


def _set_ln(s: RealSet) -> RealSet:
    if s.inf < 0 or s.contains(0.0):
        raise DomainError("ln needs a strictly positive set")
    if s.inf == 0.0:
        raise DomainError("ln image unbounded: set reaches down to 0")
    return _map_increasing(s, math.log)


def _set_sqrt(s: RealSet) -> RealSet:
    if s.inf < 0:
        raise DomainError("sqrt of a set with negative values")
    return _map_increasing(s, math.sqrt)


def _set_abs(s: RealSet) -> RealSet:
    ivs, pts = [], []
    for iv in s.pieces():
        if iv.is_degenerate():
            pts.append(abs(iv.lo))
        elif iv.lo >= 0:
            ivs.append(iv)
        elif iv.hi <= 0:
            ivs.append(Interval(-iv.hi, -iv.lo, iv.hi_open, iv.lo_open))
        else:
            hi, hi_open = max(
                (abs(iv.lo), iv.lo_open), (abs(iv.hi), iv.hi_open),
                key=lambda t: (t[0], not t[1]),
            )
            # tie between |lo| and |hi|: closed wins
            if abs(iv.lo) == abs(iv.hi):
                hi_open = iv.lo_open and iv.hi_open
            ivs.append(Interval(0.0, hi, False, hi_open))
    return RealSet(ivs, pts)


def _set_pow(s: RealSet, n: int) -> RealSet:
    if n == 0:
        return RealSet.point(1.0)
    if n < 0:
        return realset.set_div(RealSet.point(1.0), _set_pow(s, -n))
    ivs, pts = [], []
    for iv in s.pieces():
        if iv.is_degenerate():
            pts.append(iv.lo ** n)
            continue
        if n % 2 == 1 or iv.lo >= 0:
            ivs.append(Interval(iv.lo ** n, iv.hi ** n, iv.lo_open, iv.hi_open))
        elif iv.hi <= 0:
            ivs.append(Interval(iv.hi ** n, iv.lo ** n, iv.hi_open, iv.lo_open))
        else:
            lo_n, hi_n = iv.lo ** n, iv.hi ** n
            if lo_n > hi_n:
                hi, hi_open = lo_n, iv.lo_open
            elif hi_n > lo_n:
                hi, hi_open = hi_n, iv.hi_open
            else:
                hi, hi_open = hi_n, iv.lo_open and iv.hi_open
            ivs.append(Interval(0.0, hi, False, hi_open))
    return RealSet(ivs, pts)


_TWO_PI = 2.0 * math.pi


def _trig_piece(iv: Interval, fn, max_at: float, min_at: float):
    """Exact image of sin/cos on one interval via critical-point scan."""
    if iv.is_degenerate():
        return [(fn(iv.lo), False)]
    cands = [(fn(iv.lo), iv.lo_open), (fn(iv.hi), iv.hi_open)]
    if iv.hi - iv.lo >= _TWO_PI:
        return [(1.0, False), (-1.0, False)]
    for target, value in ((max_at, 1.0), (min_at, -1.0)):
        k = math.ceil((iv.lo - target) / _TWO_PI)
        crit = target + _TWO_PI * k
        if iv.lo < crit < iv.hi:
            cands.append((value, False))
    return cands


def _set_trig(s: RealSet, fn, max_at, min_at) -> RealSet:
    ivs, pts = [], []
    for iv in s.pieces():
        cands = _trig_piece(iv, fn, max_at, min_at)
        lo = min(v for v, _ in cands)
        hi = max(v for v, _ in cands)
        lo_open = all(o for v, o in cands if v == lo)
        hi_open = all(o for v, o in cands if v == hi)
        if lo == hi:
            if not (lo_open and hi_open):
                pts.append(lo)
        else:
            ivs.append(Interval(lo, hi, lo_open, hi_open))
    return RealSet(ivs, pts)


def _between_eval(lo_e: Expr, hi_e: Expr, lo_open: bool, hi_open: bool,
                  x: RealSet) -> RealSet:
    """Interval spanned pointwise by two envelopes, per component of x."""
    out = []
    for comp in x.components():
        a = eval_expr_set(lo_e, comp)
        b = eval_expr_set(hi_e, comp)
        lo, hi = min(a.inf, b.inf), max(a.sup, b.sup)
        if lo == hi:
            out.append(RealSet.point(lo))
            continue
        lo_attained = a.contains(lo) or b.contains(lo)
        hi_attained = a.contains(hi) or b.contains(hi)
        out.append(RealSet.interval(
            lo, hi, lo_open or not lo_attained, hi_open or not hi_attained,
        ))
    if not out:
        raise DomainError("empty argument set")
    return RealSet.union(*out)


def eval_expr_set(e: Expr, x: RealSet) -> RealSet:
    """Interval-extension evaluation of an expression at a set argument.

    Exact for single-occurrence variables; repeated occurrences use the
    usual interval enclosure (dependency not refined).
    """
    if is_set_free(e) and x.is_singleton():
        return RealSet.point(eval_expr_scalar(e, x.single_value))
    if isinstance(e, Const):
        return RealSet.point(e.value)
    if isinstance(e, ConstSet):
        return e.value
    if isinstance(e, ConstNN):
        raise NotSupported("indeterminacy constant in set-valued context")
    if isinstance(e, Var):
        return x
    if isinstance(e, Param):
        raise NotSupported("unbound parameter in expression")
    if isinstance(e, Add):
        return realset.set_add(eval_expr_set(e.left, x), eval_expr_set(e.right, x))
    if isinstance(e, Sub):
        return realset.set_sub(eval_expr_set(e.left, x), eval_expr_set(e.right, x))
    if isinstance(e, Mul):
        return realset.set_mul(eval_expr_set(e.left, x), eval_expr_set(e.right, x))
    if isinstance(e, Div):
        return realset.set_div(eval_expr_set(e.left, x), eval_expr_set(e.right, x))
    if isinstance(e, Pow):
        return _set_pow(eval_expr_set(e.base, x), e.n)
    if isinstance(e, Exp):
        return _set_exp(eval_expr_set(e.arg, x))
    if isinstance(e, Ln):
        return _set_ln(eval_expr_set(e.arg, x))
    if isinstance(e, Log):
        num = _set_ln(eval_expr_set(e.arg, x))
        den = _set_ln(eval_expr_set(e.base, x))
        return realset.set_div(num, den)
    if isinstance(e, Sqrt):
        return _set_sqrt(eval_expr_set(e.arg, x))
    if isinstance(e, Sin):
        return _set_trig(eval_expr_set(e.arg, x), math.sin, math.pi / 2, -math.pi / 2)
    if isinstance(e, Cos):
        return _set_trig(eval_expr_set(e.arg, x), math.cos, 0.0, math.pi)
    if isinstance(e, Abs):
        return _set_abs(eval_expr_set(e.arg, x))
    if isinstance(e, Between):
        return _between_eval(e.lo, e.hi, e.lo_open, e.hi_open, x)
    raise NotSupported(f"cannot evaluate {type(e).__name__} on a set")


# ---------------------------------------------------------------------------
# Indeterminacy-number evaluation
# ---------------------------------------------------------------------------


def eval_expr_nn(e: Expr, v: NeutroNumber) -> NeutroNumber:
    """Evaluate a (rational) expression over the a + b*I algebra."""
    if isinstance(e, Const):
        return NeutroNumber(e.value)
    if isinstance(e, ConstNN):
        return e.value
    if isinstance(e, Var):
        return v
    if isinstance(e, Add):
        return eval_expr_nn(e.left, v) + eval_expr_nn(e.right, v)
    if isinstance(e, Sub):
        return eval_expr_nn(e.left, v) - eval_expr_nn(e.right, v)
    if isinstance(e, Mul):
        return eval_expr_nn(e.left, v) * eval_expr_nn(e.right, v)
    if isinstance(e, Div):
        return eval_expr_nn(e.left, v) / eval_expr_nn(e.right, v)
    if isinstance(e, Pow):
        if e.n < 0:
            return eval_expr_nn(e.base, v).__pow__(-e.n).inverse()
        return eval_expr_nn(e.base, v) ** e.n
    raise NotSupported(
        f"{type(e).__name__} is not defined over indeterminacy numbers"
    )


# ---------------------------------------------------------------------------
# Domains (piece dispatch; endpoints may be infinite)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DomainInterval:
    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def contains(self, x: float) -> bool:
        if self.lo < x < self.hi:
            return True
        if x == self.lo and not self.lo_open:
            return True
        if x == self.hi and not self.hi_open:
            return True
        return False


@dataclass(frozen=True)
class Domain:
    """Union of (possibly unbounded) intervals and points, for piece dispatch."""

    intervals: tuple[DomainInterval, ...] = ()
    points: tuple[float, ...] = ()

    @staticmethod
    def full_line() -> "Domain":
        return Domain((DomainInterval(-math.inf, math.inf, True, True),))

    @staticmethod
    def from_set(s: RealSet) -> "Domain":
        return Domain(
            tuple(DomainInterval(iv.lo, iv.hi, iv.lo_open, iv.hi_open)
                  for iv in s.intervals),
            s.points,
        )

    @staticmethod
    def full_minus_points(pts) -> "Domain":
        pts = sorted(set(pts))
        if not pts:
            return Domain.full_line()
        ivs = [DomainInterval(-math.inf, pts[0], True, True)]
        for a, b in zip(pts, pts[1:]):
            ivs.append(DomainInterval(a, b, True, True))
        ivs.append(DomainInterval(pts[-1], math.inf, True, True))
        return Domain(tuple(ivs))

    def contains(self, x: float) -> bool:
        return x in self.points or any(iv.contains(x) for iv in self.intervals)

    def contains_set(self, s: RealSet) -> bool:
        for iv in s.pieces():
            if iv.is_degenerate():
                if not self.contains(iv.lo):
                    return False
                continue
            ok = False
            for d in self.intervals:
                lo_ok = d.lo < iv.lo or (d.lo == iv.lo and (iv.lo_open or not d.lo_open))
                hi_ok = d.hi > iv.hi or (d.hi == iv.hi and (iv.hi_open or not d.hi_open))
                if lo_ok and hi_ok:
                    ok = True
                    break
            if not ok:
                return False
        return True

    def excluded_points(self):
        """Points missing from an otherwise full line, or None if not cofinite."""
        if self.points:
            return None
        ivs = sorted(self.intervals, key=lambda d: d.lo)
        if not ivs or ivs[0].lo != -math.inf or ivs[-1].hi != math.inf:
            return None
        holes = []
        for a, b in zip(ivs, ivs[1:]):
            if a.hi != b.lo or not (a.hi_open and b.lo_open):
                return None
            holes.append(a.hi)
        return holes

    def overlaps(self, other: "Domain") -> bool:
        for p in self.points:
            if other.contains(p):
                return True
        for p in other.points:
            if self.contains(p):
                return True
        for a in self.intervals:
            for b in other.intervals:
                lo = max(a.lo, b.lo)
                hi = min(a.hi, b.hi)
                if lo < hi:
                    return True
                if lo == hi and a.contains(lo) and b.contains(lo):
                    return True
        return False


# ---------------------------------------------------------------------------
# Function specs
# ---------------------------------------------------------------------------


class FuncSpec:
    """Base class for function descriptors."""


@dataclass(frozen=True)
class Crisp(FuncSpec):
    expr: Expr


@dataclass(frozen=True)
class Thick(FuncSpec):
    lower: Expr
    upper: Expr
    lo_open: bool = False
    hi_open: bool = False


@dataclass(frozen=True)
class PairTag:
    """Sure / Partial(t,i,f) / Potential membership of a table pair."""

    kind: str = "sure"
    triple: realset.MembershipTriple | None = None

    def __post_init__(self):
        if self.kind not in ("sure", "partial", "potential"):
            raise ValueError(f"bad tag kind {self.kind!r}")
        if (self.kind == "partial") != (self.triple is not None):
            raise ValueError("partial tags carry a triple; others do not")


SURE = PairTag()


@dataclass(frozen=True)
class TablePair:
    arg: RealSet
    val: RealSet
    tag: PairTag = SURE


@dataclass(frozen=True)
class Table(FuncSpec):
    pairs: tuple[TablePair, ...]


@dataclass(frozen=True)
class Piece:
    """One piecewise branch: containment dispatch on `domain`, or exact
    set-argument match on `set_key` (at most one of the two)."""

    spec: FuncSpec
    domain: Domain | None = None
    set_key: RealSet | None = None

    def __post_init__(self):
        if (self.domain is None) == (self.set_key is None):
            raise ValueError("piece needs exactly one of domain / set_key")


@dataclass(frozen=True)
class Piecewise(FuncSpec):
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        doms = [p.domain for p in self.pieces if p.domain is not None]
        for i in range(len(doms)):
            for j in range(i + 1, len(doms)):
                if doms[i].overlaps(doms[j]):
                    raise OverlapError("piece domains overlap")


@dataclass(frozen=True)
class Alternatives(FuncSpec):
    branches: tuple[FuncSpec, ...]

    def __post_init__(self):
        if len(self.branches) < 2:
            raise ValueError("alternatives need at least two branches")


@dataclass(frozen=True)
class NNExpr(FuncSpec):
    expr: Expr


@dataclass(frozen=True)
class Composed(FuncSpec):
    outer: FuncSpec
    inner: FuncSpec


@dataclass(frozen=True)
class Combine(FuncSpec):
    """Pointwise arithmetic combination of two specs."""

    op: str
    left: FuncSpec
    right: FuncSpec

    def __post_init__(self):
        if self.op not in ("add", "sub", "mul", "div"):
            raise ValueError(f"bad combine op {self.op!r}")


def identity_spec() -> Crisp:
    return Crisp(Var())


def compose(f: FuncSpec, g: FuncSpec) -> FuncSpec:
    """Spec computing f after g; indeterminacy branches multiply."""
    return Composed(f, g)


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NeutroValue:
    """Non-empty branches, each a RealSet or a NeutroNumber.

    A single branch is a determinate value; several branches mean
    discrete "or" indeterminacy.  Branch order is stable.
    """

    branches: tuple

    def __post_init__(self):
        if not self.branches:
            raise ValueError("a value needs at least one branch")
        for b in self.branches:
            if not isinstance(b, (RealSet, NeutroNumber)):
                raise TypeError(f"bad branch {b!r}")
            if isinstance(b, RealSet) and b.is_empty():
                raise ValueError("empty set branch")

    @property
    def is_determinate(self) -> bool:
        return len(self.branches) == 1

    def single(self):
        if not self.is_determinate:
            raise ValueError("value has several branches")
        return self.branches[0]

    def __repr__(self):
        from . import textparse

        return f"NeutroValue({textparse.render(self)!r})"


def as_value(x) -> NeutroValue:
    if isinstance(x, NeutroValue):
        return x
    if isinstance(x, (int, float)):
        return NeutroValue((RealSet.point(float(x)),))
    if isinstance(x, (RealSet, NeutroNumber)):
        return NeutroValue((x,))
    raise TypeError(f"cannot treat {x!r} as a value")


def value_union(v: NeutroValue) -> RealSet:
    """Union of all set branches (indeterminacy numbers rejected)."""
    sets = []
    for b in v.branches:
        if not isinstance(b, RealSet):
            raise NotSupported("value has indeterminacy-number branches")
        sets.append(b)
    return RealSet.union(*sets)


def negate_value(v: NeutroValue) -> NeutroValue:
    out = []
    for b in v.branches:
        out.append(-b if isinstance(b, NeutroNumber) else realset.scale(-1.0, b))
    return NeutroValue(tuple(out))


def _canon_branch(b):
    """Crisp indeterminacy numbers are the same value as singleton sets."""
    if isinstance(b, NeutroNumber) and b.is_crisp:
        return RealSet.point(b.a)
    return b


def values_equal(a: NeutroValue, b: NeutroValue, tol: float = 1e-9) -> bool:
    """Branch multisets compared unordered, endpointwise within tol."""
    if len(a.branches) != len(b.branches):
        return False
    unmatched = [_canon_branch(y) for y in b.branches]
    for x in a.branches:
        x = _canon_branch(x)
        for i, y in enumerate(unmatched):
            if isinstance(x, RealSet) and isinstance(y, RealSet):
                if realset.sets_close(x, y, tol):
                    del unmatched[i]
                    break
            elif isinstance(x, NeutroNumber) and isinstance(y, NeutroNumber):
                if x.close_to(y, tol):
                    del unmatched[i]
                    break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Evaluation engine
# ---------------------------------------------------------------------------


def _to_nn(branch) -> NeutroNumber:
    if isinstance(branch, NeutroNumber):
        return branch
    if branch.is_singleton():
        return NeutroNumber(branch.single_value)
    raise NotSupported(
        "indeterminacy-number formula needs a crisp or a + b*I argument"
    )


def _eval_spec(f: FuncSpec, branch) -> list:
    if isinstance(f, Crisp):
        if isinstance(branch, NeutroNumber) or has_nn(f.expr):
            return [eval_expr_nn(f.expr, _to_nn(branch))]
        return [eval_expr_set(f.expr, branch)]

    if isinstance(f, NNExpr):
        return [eval_expr_nn(f.expr, _to_nn(branch))]

    if isinstance(f, Thick):
        if isinstance(branch, NeutroNumber):
            raise NotSupported("thick function at an indeterminacy-number argument")
        return [_between_eval(f.lower, f.upper, f.lo_open, f.hi_open, branch)]

    if isinstance(f, Piecewise):
        if isinstance(branch, NeutroNumber):
            raise DomainError("piecewise dispatch on an indeterminate argument")
        for p in f.pieces:
            if p.set_key is not None and branch == p.set_key:
                return _eval_spec(p.spec, branch)
        for p in f.pieces:
            if p.domain is not None and p.domain.contains_set(branch):
                return _eval_spec(p.spec, branch)
        from . import textparse

        raise DomainError(f"{textparse.render_set(branch)} outside every piece domain")

    if isinstance(f, Alternatives):
        out = []
        for sub in f.branches:
            out.extend(_eval_spec(sub, branch))
        return out

    if isinstance(f, Table):
        if isinstance(branch, NeutroNumber):
            raise DomainError("table lookup on an indeterminate argument")
        for pair in f.pairs:
            if pair.arg == branch:
                return [pair.val]
        from . import textparse

        raise DomainError(f"no table row for {textparse.render_set(branch)}")

    if isinstance(f, Composed):
        out = []
        for mid in _eval_spec(f.inner, branch):
            out.extend(_eval_spec(f.outer, mid))
        return out

    if isinstance(f, Combine):
        left = _eval_spec(f.left, branch)
        right = _eval_spec(f.right, branch)
        out = []
        for a in left:
            for b in right:
                if isinstance(a, NeutroNumber) or isinstance(b, NeutroNumber):
                    x, y = _to_nn(a), _to_nn(b)
                    got = {
                        "add": x + y, "sub": x - y,
                        "mul": x * y, "div": x / y,
                    }[f.op]
                else:
                    got = realset.set_arith(f.op, a, b)
                out.append(got)
        return out

    raise NotSupported(f"cannot evaluate spec {type(f).__name__}")


def evaluate(f: FuncSpec, at) -> NeutroValue:
    """Evaluate a spec at a value; result branches are input-order stable."""
    v = as_value(at)
    out = []
    for branch in v.branches:
        out.extend(_eval_spec(f, branch))
    return NeutroValue(tuple(out))


# ---------------------------------------------------------------------------
# Relation classification
# ---------------------------------------------------------------------------


class RelationKind(Enum):
    CRISP_FUNCTION = "crisp-function"
    SUBSET_FUNCTION = "subset-function"
    GENERAL_RELATION = "general-relation"


def classify_relation(f: Table) -> RelationKind:
    """Vertical-line test extended to set values.

    A table is a crisp function when all pairs are singleton-to-singleton
    with no repeated argument; a subset function when each argument set
    maps to exactly one value set; a general relation otherwise.
    """
    if not isinstance(f, Table):
        raise NotSupported("classification works on table specs")
    seen: dict[RealSet, RealSet] = {}
    general = False
    for pair in f.pairs:
        if pair.arg in seen and seen[pair.arg] != pair.val:
            general = True
        seen.setdefault(pair.arg, pair.val)
    if general:
        return RelationKind.GENERAL_RELATION
    if all(p.arg.is_singleton() and p.val.is_singleton() for p in f.pairs):
        return RelationKind.CRISP_FUNCTION
    return RelationKind.SUBSET_FUNCTION


# ---------------------------------------------------------------------------
# Inversion
# ---------------------------------------------------------------------------


def invert_expr(e: Expr) -> Expr:
    """Symbolic inverse of a chain of affine / exp / log primitives."""
    return _solve(e, Var())


def _solve(e: Expr, acc: Expr) -> Expr:
    if isinstance(e, Var):
        return acc
    if isinstance(e, (Add, Sub, Mul, Div)):
        lv, rv = contains_var(e.left), contains_var(e.right)
        if lv and rv:
            raise NotSupported("variable on both sides of an operator")
        if isinstance(e, Add):
            return _solve(e.left if lv else e.right,
                          Sub(acc, e.right if lv else e.left))
        if isinstance(e, Sub):
            if lv:
                return _solve(e.left, Add(acc, e.right))
            return _solve(e.right, Sub(e.left, acc))
        if isinstance(e, Mul):
            return _solve(e.left if lv else e.right,
                          Div(acc, e.right if lv else e.left))
        if lv:
            return _solve(e.left, Mul(acc, e.right))
        return _solve(e.right, Div(e.left, acc))
    if isinstance(e, Exp):
        return _solve(e.arg, Ln(acc))
    if isinstance(e, Ln):
        return _solve(e.arg, Exp(acc))
    if isinstance(e, Log):
        if contains_var(e.base):
            raise NotSupported("variable logarithm base")
        return _solve(e.arg, Exp(Mul(acc, Ln(e.base))))
    if isinstance(e, Pow) and e.n == 1:
        return _solve(e.base, acc)
    if isinstance(e, Sqrt):
        return _solve(e.arg, Pow(acc, 2))
    raise NotSupported(f"{type(e).__name__} is not an invertible primitive")


def _combine_tags(tags) -> PairTag:
    if any(t.kind == "potential" for t in tags):
        return PairTag("potential")
    partials = [t for t in tags if t.kind == "partial"]
    if partials:
        return PairTag("partial", realset.MembershipTriple(
            min(t.triple.t for t in partials),
            max(t.triple.i for t in partials),
            max(t.triple.f for t in partials),
        ))
    return SURE


def _flatten_formula_branches(spec: FuncSpec) -> list[Expr]:
    if isinstance(spec, Crisp):
        return [spec.expr]
    if isinstance(spec, Alternatives):
        out = []
        for b in spec.branches:
            out.extend(_flatten_formula_branches(b))
        return out
    raise NotSupported(f"cannot invert piece of type {type(spec).__name__}")


def invert(f: FuncSpec) -> FuncSpec:
    """Inverse spec: tables group by value, formulas invert symbolically.

    The reflection law holds: (C, D) lies on the graph of f exactly when
    (D, C) lies on the graph of the result.
    """
    if isinstance(f, Table):
        order: list[RealSet] = []
        grouped: dict[RealSet, list[TablePair]] = {}
        for pair in f.pairs:
            if pair.val not in grouped:
                grouped[pair.val] = []
                order.append(pair.val)
            grouped[pair.val].append(pair)
        pairs = []
        for val in order:
            group = grouped[val]
            args = RealSet.union(*(p.arg for p in group))
            pairs.append(TablePair(val, args, _combine_tags([p.tag for p in group])))
        return Table(tuple(pairs))

    if isinstance(f, Crisp):
        return Crisp(invert_expr(f.expr))

    if isinstance(f, Thick):
        return Thick(invert_expr(f.upper), invert_expr(f.lower),
                     f.hi_open, f.lo_open)

    if isinstance(f, Alternatives):
        return Alternatives(tuple(invert(b) for b in f.branches))

    if isinstance(f, Piecewise):
        set_pieces: list[Piece] = []
        formula_exprs: list[Expr] = []
        excluded: list[float] = []
        for p in f.pieces:
            if p.set_key is not None:
                raise NotSupported("cannot invert a set-argument piece")
            holes = p.domain.excluded_points()
            if holes is not None:
                branches = _flatten_formula_branches(p.spec)
                formula_exprs.extend(branches)
                for x0 in holes:
                    for g in branches:
                        excluded.append(eval_expr_scalar(g, x0))
            elif not p.domain.intervals and p.domain.points:
                # constant piece on finitely many points -> set-argument pair
                val = evaluate(p.spec, RealSet.of_points(*p.domain.points))
                set_pieces.append(Piece(
                    spec=Crisp(ConstSet(RealSet.of_points(*p.domain.points))),
                    set_key=value_union(val),
                ))
            else:
                raise NotSupported("piece domain shape not invertible")
        pieces: list[Piece] = []
        if formula_exprs:
            inv = [Crisp(invert_expr(g)) for g in formula_exprs]
            spec = inv[0] if len(inv) == 1 else Alternatives(tuple(inv))
            pieces.append(Piece(spec=spec,
                                domain=Domain.full_minus_points(excluded)))
        pieces.extend(set_pieces)
        return Piecewise(tuple(pieces))

    raise NotSupported(f"cannot invert spec of type {type(f).__name__}")


# ---------------------------------------------------------------------------
# Parity
# ---------------------------------------------------------------------------


class Parity(Enum):
    EVEN = "even"
    ODD = "odd"
    NEITHER = "neither"


def _special_points(f: FuncSpec) -> set[float]:
    out: set[float] = set()
    if isinstance(f, Piecewise):
        for p in f.pieces:
            if p.domain is not None and not p.domain.intervals:
                out.update(p.domain.points)
            if p.set_key is not None:
                out.update(p.set_key.points)
            out |= _special_points(p.spec)
    elif isinstance(f, Alternatives):
        for b in f.branches:
            out |= _special_points(b)
    elif isinstance(f, Table):
        for pair in f.pairs:
            out.update(pair.arg.points)
    elif isinstance(f, (Composed, Combine)):
        for child in (getattr(f, "outer", None), getattr(f, "inner", None),
                      getattr(f, "left", None), getattr(f, "right", None)):
            if child is not None:
                out |= _special_points(child)
    return out


def parity(f: FuncSpec, domain: RealSet, samples: int = 1024,
           tol: float = 1e-9) -> Parity:
    """Sampled even/odd classification over a symmetric domain.

    Branch sets are compared unordered; discrete-alternative points of
    the spec are always included among the samples.  The verdict is
    evidence from sampling, not a proof.
    """
    if domain != realset.scale(-1.0, domain):
        raise DomainError("parity needs a domain symmetric about 0")
    hi = max(abs(domain.inf), abs(domain.sup))
    xs = {hi * (i + 1) / samples for i in range(samples)}
    xs |= {abs(p) for p in _special_points(f)}
    if domain.contains(0.0):
        xs.add(0.0)
    even_ok = odd_ok = True
    for x in sorted(xs):
        if not (domain.contains(x) and domain.contains(-x)):
            continue
        plus = evaluate(f, x)
        minus = evaluate(f, -x)
        if even_ok and not values_equal(minus, plus, tol):
            even_ok = False
        if odd_ok and not values_equal(minus, negate_value(plus), tol):
            odd_ok = False
        if not even_ok and not odd_ok:
            return Parity.NEITHER
    if even_ok and odd_ok:
        return Parity.EVEN  # constant-zero style functions are both; report even
    return Parity.EVEN if even_ok else Parity.ODD


# ---------------------------------------------------------------------------
# Zeros
# ---------------------------------------------------------------------------


def _contains_zero(f: FuncSpec, x: float) -> bool:
    try:
        v = evaluate(f, x)
    except DomainError:
        return False
    return any(isinstance(b, RealSet) and b.contains(0.0) for b in v.branches)


def _branch_bounds(f: FuncSpec, x: float):
    try:
        v = evaluate(f, x)
    except DomainError:
        return []
    return [(b.inf, b.sup) for b in v.branches if isinstance(b, RealSet)]


def _bisect_flip(f: FuncSpec, lo: float, hi: float, want: bool, tol: float):
    """Smallest x in (lo, hi] with containment == want (predicate bisection)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _contains_zero(f, mid) == want:
            hi = mid
        else:
            lo = mid
    return hi


def _set_argument_zeros(f: FuncSpec, search: RealSet) -> list[RealSet]:
    out = []
    if isinstance(f, Table):
        for pair in f.pairs:
            if pair.val.contains(0.0):
                out.append(intersect(pair.arg, search))
    elif isinstance(f, Piecewise):
        for p in f.pieces:
            if p.set_key is not None:
                val = evaluate(p.spec, p.set_key)
                if any(isinstance(b, RealSet) and b.contains(0.0)
                       for b in val.branches):
                    out.append(intersect(p.set_key, search))
            else:
                out.extend(_set_argument_zeros(p.spec, search))
    elif isinstance(f, Alternatives):
        for b in f.branches:
            out.extend(_set_argument_zeros(b, search))
    return out


def zeros(f: FuncSpec, search: RealSet, grid: int = 1024,
          tol: float = 1e-9) -> RealSet:
    """All x in `search` whose value set (any branch) contains 0.

    Grid scan with bisection refinement of run boundaries, plus
    sign-change root capture for isolated crisp zeros; set-argument rows
    (tables, exact-match pieces) contribute their whole argument set.
    """
    pieces_out: list[Interval] = []
    points_out: list[float] = []
    for part in _set_argument_zeros(f, search):
        pieces_out.extend(part.intervals)
        points_out.extend(part.points)

    total = sum(iv.hi - iv.lo for iv in search.intervals) or 1.0
    for comp in search.pieces():
        if comp.is_degenerate():
            if _contains_zero(f, comp.lo):
                points_out.append(comp.lo)
            continue
        n = max(2, int(round(grid * (comp.hi - comp.lo) / total)))
        xs = [comp.lo + (comp.hi - comp.lo) * i / n for i in range(n + 1)]
        flags = [_contains_zero(f, x) for x in xs]
        bounds = [_branch_bounds(f, x) for x in xs]

        i = 0
        while i <= n:
            if flags[i]:
                run_start = i
                while i + 1 <= n and flags[i + 1]:
                    i += 1
                run_end = i
                lo = xs[run_start]
                if run_start > 0:
                    lo = _bisect_flip(f, xs[run_start - 1], xs[run_start], True, tol)
                hi = xs[run_end]
                if run_end < n:
                    # mirrored search: largest x with containment
                    a, b = xs[run_end], xs[run_end + 1]
                    while b - a > tol:
                        mid = 0.5 * (a + b)
                        if _contains_zero(f, mid):
                            a = mid
                        else:
                            b = mid
                    hi = a
                if hi - lo <= tol:
                    points_out.append(0.5 * (lo + hi))
                else:
                    pieces_out.append(Interval(lo, hi))
            i += 1

        # isolated crossings between grid points where containment never fires
        for j in range(n):
            if flags[j] or flags[j + 1]:
                continue
            if len(bounds[j]) != 1 or len(bounds[j + 1]) != 1:
                continue
            (lo1, hi1), (lo2, hi2) = bounds[j][0], bounds[j + 1][0]
            for side, g1, g2 in (("inf", lo1, lo2), ("sup", hi1, hi2)):
                if g1 == 0.0 or g1 * g2 >= 0:
                    continue
                a, b, fa = xs[j], xs[j + 1], g1
                while b - a > tol:
                    mid = 0.5 * (a + b)
                    got = _branch_bounds(f, mid)
                    if len(got) != 1:
                        break
                    gm = got[0][0] if side == "inf" else got[0][1]
                    if gm == 0.0:
                        a = b = mid
                        break
                    if gm * fa < 0:
                        b = mid
                    else:
                        a = mid
                points_out.append(0.5 * (a + b))

    snapped_pts = [round(p / tol) * tol if p != 0 else 0.0 for p in points_out]
    snapped_ivs = [
        Interval(round(iv.lo / tol) * tol, round(iv.hi / tol) * tol,
                 iv.lo_open, iv.hi_open)
        for iv in pieces_out
    ]
    return RealSet(snapped_ivs, snapped_pts)
