"""Canonical bounded subsets of the reals and their exact arithmetic.

A RealSet is a finite union of intervals (each endpoint open or closed)
plus isolated points, kept in a canonical sorted, disjoint, non-adjacent
form.  Endpoints may optionally carry a (t, i, f) membership triple for
partially-belonging boundary values; those triples participate in
membership and subset queries only, never in arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DivisionBySetContainingZero,
    EmptySetError,
    InvalidEndpoint,
)

__all__ = [
    "MembershipTriple",
    "Interval",
    "RealSet",
    "normalize",
    "scale",
    "set_add",
    "set_sub",
    "set_mul",
    "set_div",
    "set_arith",
    "intersect",
    "sup_norm",
    "endpoint_metric",
    "membership",
    "neutro_subset",
    "is_subset",
    "sets_close",
]

FULL_MEMBER: "MembershipTriple"
NON_MEMBER: "MembershipTriple"


@dataclass(frozen=True)
class MembershipTriple:
    """Degrees of membership, indeterminacy and non-membership, each in [0, 1].

    The components come from independent sources, so t + i + f may exceed 1.
    """

    t: float
    i: float
    f: float

    def __post_init__(self):
        for name, v in (("t", self.t), ("i", self.i), ("f", self.f)):
            if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
                raise ValueError(f"membership component {name}={v!r} outside [0, 1]")

    def dominates(self, weaker: "MembershipTriple") -> bool:
        """True if this triple is at least as much 'in' as `weaker`."""
        return self.t >= weaker.t and self.i <= weaker.i and self.f <= weaker.f


FULL_MEMBER = MembershipTriple(1.0, 0.0, 0.0)
NON_MEMBER = MembershipTriple(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class Interval:
    """One interval piece; after normalization lo <= hi."""

    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def sorted(self) -> "Interval":
        if self.lo > self.hi:
            return Interval(self.hi, self.lo, self.hi_open, self.lo_open)
        return self

    def contains(self, x: float) -> bool:
        if self.lo < x < self.hi:
            return True
        if x == self.lo and not self.lo_open:
            return True
        if x == self.hi and not self.hi_open:
            return True
        return False

    def is_degenerate(self) -> bool:
        return self.lo == self.hi


def _check_finite(v: float, what: str = "endpoint") -> float:
    if not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InvalidEndpoint(f"non-finite {what}: {v!r}")
    return float(v)


def _merge_sorted(ivs: list[Interval]) -> list[Interval]:
    """Merge overlapping or touching (at least one side closed) intervals."""
    out: list[Interval] = []
    for iv in ivs:
        if not out:
            out.append(iv)
            continue
        cur = out[-1]
        touches = iv.lo < cur.hi or (
            iv.lo == cur.hi and not (iv.lo_open and cur.hi_open)
        )
        if not touches:
            out.append(iv)
            continue
        lo, lo_open = cur.lo, cur.lo_open
        if iv.lo == cur.lo:
            lo_open = lo_open and iv.lo_open
        if iv.hi > cur.hi:
            hi, hi_open = iv.hi, iv.hi_open
        elif iv.hi == cur.hi:
            hi, hi_open = cur.hi, cur.hi_open and iv.hi_open
        else:
            hi, hi_open = cur.hi, cur.hi_open
        out[-1] = Interval(lo, hi, lo_open, hi_open)
    return out


class RealSet:
    """Canonical finite union of intervals and isolated points.

    Construct through the factory helpers (`closed`, `open_interval`,
    `point`, ...) or `normalize`; the constructor itself canonicalizes.
    Instances are immutable values: all operations return new sets.
    """

    __slots__ = ("intervals", "points", "annotations")

    def __init__(self, intervals=(), points=(), annotations=()):
        ivs = []
        for iv in intervals:
            _check_finite(iv.lo)
            _check_finite(iv.hi)
            ivs.append(iv.sorted())
        pts = sorted({_check_finite(p, "point") for p in points})
        notes = dict(annotations)
        for key, triple in notes.items():
            _check_finite(key, "annotated endpoint")
            if not isinstance(triple, MembershipTriple):
                raise InvalidEndpoint(f"annotation for {key} is not a MembershipTriple")

        # Annotated values are only partially attained: force those endpoints open.
        if notes:
            fixed = []
            for iv in ivs:
                lo_open = iv.lo_open or iv.lo in notes
                hi_open = iv.hi_open or iv.hi in notes
                fixed.append(Interval(iv.lo, iv.hi, lo_open, hi_open))
            ivs = fixed
            pts = [p for p in pts if p not in notes]

        # Degenerate intervals become points (half-open degenerates are empty).
        proper = []
        for iv in ivs:
            if iv.is_degenerate():
                if not iv.lo_open and not iv.hi_open:
                    pts.append(iv.lo)
            else:
                proper.append(iv)
        proper.sort(key=lambda iv: (iv.lo, iv.lo_open))
        merged = _merge_sorted(proper)

        # Absorb points; a point sitting on an open endpoint closes it.
        for _ in range(2):
            keep = []
            changed = False
            for p in sorted(set(pts)):
                absorbed = False
                for idx, iv in enumerate(merged):
                    if iv.contains(p):
                        absorbed = True
                        break
                    if p == iv.lo and iv.lo_open:
                        merged[idx] = Interval(iv.lo, iv.hi, False, iv.hi_open)
                        absorbed = changed = True
                        break
                    if p == iv.hi and iv.hi_open:
                        merged[idx] = Interval(iv.lo, iv.hi, iv.lo_open, False)
                        absorbed = changed = True
                        break
                if not absorbed:
                    keep.append(p)
            pts = keep
            if not changed:
                break
            merged = _merge_sorted(sorted(merged, key=lambda iv: (iv.lo, iv.lo_open)))

        endpoints = set()
        for iv in merged:
            endpoints.add(iv.lo)
            endpoints.add(iv.hi)
        # Annotations swallowed by canonicalization (no longer an endpoint) drop out.
        notes = {k: v for k, v in notes.items() if k in endpoints}

        object.__setattr__(self, "intervals", tuple(merged))
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "annotations", tuple(sorted(notes.items())))

    def __setattr__(self, name, value):
        raise AttributeError("RealSet is immutable")

    # -- constructors -----------------------------------------------------

    @staticmethod
    def empty() -> "RealSet":
        return RealSet()

    @staticmethod
    def point(a: float) -> "RealSet":
        return RealSet(points=(a,))

    @staticmethod
    def of_points(*vals: float) -> "RealSet":
        return RealSet(points=vals)

    @staticmethod
    def interval(lo, hi, lo_open=False, hi_open=False) -> "RealSet":
        return RealSet(intervals=(Interval(lo, hi, lo_open, hi_open),))

    @staticmethod
    def closed(lo, hi) -> "RealSet":
        return RealSet.interval(lo, hi)

    @staticmethod
    def open_interval(lo, hi) -> "RealSet":
        return RealSet.interval(lo, hi, True, True)

    @staticmethod
    def union(*sets: "RealSet") -> "RealSet":
        ivs, pts, notes = [], [], []
        for s in sets:
            ivs.extend(s.intervals)
            pts.extend(s.points)
            notes.extend(s.annotations)
        return RealSet(ivs, pts, notes)

    # -- basic queries -----------------------------------------------------

    def is_empty(self) -> bool:
        return not self.intervals and not self.points and not self.annotations

    @property
    def inf(self) -> float:
        if self.is_empty():
            raise EmptySetError("inf of empty set")
        vals = []
        if self.intervals:
            vals.append(self.intervals[0].lo)
        if self.points:
            vals.append(self.points[0])
        vals.extend(k for k, _ in self.annotations)
        return min(vals)

    @property
    def sup(self) -> float:
        if self.is_empty():
            raise EmptySetError("sup of empty set")
        vals = []
        if self.intervals:
            vals.append(self.intervals[-1].hi)
        if self.points:
            vals.append(self.points[-1])
        vals.extend(k for k, _ in self.annotations)
        return max(vals)

    def contains(self, x: float) -> bool:
        """Crisp membership: interior or closed-endpoint values only."""
        return any(iv.contains(x) for iv in self.intervals) or x in self.points

    def is_singleton(self) -> bool:
        return not self.intervals and len(self.points) == 1 and not self.annotations

    @property
    def single_value(self) -> float:
        if not self.is_singleton():
            raise ValueError("set is not a singleton")
        return self.points[0]

    def hull(self) -> "RealSet":
        """Smallest single interval (or point) containing the set."""
        if self.is_empty():
            return RealSet.empty()
        lo, hi = self.inf, self.sup
        if lo == hi:
            return RealSet.point(lo)
        lo_open = not self.contains(lo)
        hi_open = not self.contains(hi)
        return RealSet.interval(lo, hi, lo_open, hi_open)

    def pieces(self):
        """All components as degenerate-or-proper Interval objects."""
        out = list(self.intervals)
        out.extend(Interval(p, p) for p in self.points)
        out.sort(key=lambda iv: iv.lo)
        return out

    def components(self):
        """Connected components, each as a RealSet."""
        return [
            RealSet.interval(iv.lo, iv.hi, iv.lo_open, iv.hi_open)
            if not iv.is_degenerate()
            else RealSet.point(iv.lo)
            for iv in self.pieces()
        ]

    # -- value semantics ----------------------------------------------------

    def _key(self):
        return (self.intervals, self.points, self.annotations)

    def __eq__(self, other):
        return isinstance(other, RealSet) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        from . import textparse

        return f"RealSet({textparse.render_set(self)!r})"

    # -- arithmetic ----------------------------------------------------------

    def scale(self, alpha: float) -> "RealSet":
        return scale(alpha, self)

    def __add__(self, other):
        return set_add(self, _coerce(other))

    def __radd__(self, other):
        return set_add(_coerce(other), self)

    def __sub__(self, other):
        return set_sub(self, _coerce(other))

    def __rsub__(self, other):
        return set_sub(_coerce(other), self)

    def __mul__(self, other):
        return set_mul(self, _coerce(other))

    def __rmul__(self, other):
        return set_mul(_coerce(other), self)

    def __truediv__(self, other):
        return set_div(self, _coerce(other))

    def __rtruediv__(self, other):
        return set_div(_coerce(other), self)

    def __neg__(self):
        return scale(-1.0, self)


def _coerce(v) -> RealSet:
    if isinstance(v, RealSet):
        return v
    if isinstance(v, (int, float)):
        return RealSet.point(float(v))
    return NotImplemented


def normalize(intervals=(), points=(), annotations=()) -> RealSet:
    """Canonicalize raw interval/point data into a RealSet.

    Idempotent: feeding a canonical set's own pieces back returns an
    equal set.  Raises InvalidEndpoint on NaN or infinite endpoints.
    """
    return RealSet(intervals, points, annotations)


# -- elementwise set arithmetic ----------------------------------------------


def scale(alpha: float, s: RealSet) -> RealSet:
    if s.is_empty():
        return RealSet.empty()
    if alpha == 0:
        return RealSet.point(0.0)
    ivs, pts = [], []
    for iv in s.pieces():
        if iv.is_degenerate():
            pts.append(alpha * iv.lo)
        elif alpha > 0:
            ivs.append(Interval(alpha * iv.lo, alpha * iv.hi, iv.lo_open, iv.hi_open))
        else:
            ivs.append(Interval(alpha * iv.hi, alpha * iv.lo, iv.hi_open, iv.lo_open))
    return RealSet(ivs, pts)


def set_add(s: RealSet, t: RealSet) -> RealSet:
    ivs, pts = [], []
    for a in s.pieces():
        for b in t.pieces():
            lo, hi = a.lo + b.lo, a.hi + b.hi
            if lo == hi and not (a.lo_open or b.lo_open):
                pts.append(lo)
            else:
                ivs.append(
                    Interval(lo, hi, a.lo_open or b.lo_open, a.hi_open or b.hi_open)
                )
    return RealSet(ivs, pts)


def set_sub(s: RealSet, t: RealSet) -> RealSet:
    return set_add(s, scale(-1.0, t))


def _attains_zero(iv: Interval) -> bool:
    return iv.contains(0.0)


def _corner_extremes(pairs):
    """Min/max over (value, open) corner candidates; a closed corner wins ties."""
    lo = min(v for v, _ in pairs)
    hi = max(v for v, _ in pairs)
    lo_open = all(o for v, o in pairs if v == lo)
    hi_open = all(o for v, o in pairs if v == hi)
    return lo, hi, lo_open, hi_open


def set_mul(s: RealSet, t: RealSet) -> RealSet:
    ivs, pts = [], []
    for a in s.pieces():
        for b in t.pieces():
            corners = [
                (a.lo * b.lo, a.lo_open or b.lo_open),
                (a.lo * b.hi, a.lo_open or b.hi_open),
                (a.hi * b.lo, a.hi_open or b.lo_open),
                (a.hi * b.hi, a.hi_open or b.hi_open),
            ]
            lo, hi, lo_open, hi_open = _corner_extremes(corners)
            # 0 is attained along a whole edge whenever either factor attains 0.
            if lo == 0.0 and (_attains_zero(a) or _attains_zero(b)):
                lo_open = False
            if hi == 0.0 and (_attains_zero(a) or _attains_zero(b)):
                hi_open = False
            lo, hi = min(lo, hi), max(lo, hi)
            if lo == hi:
                if not lo_open or not hi_open:
                    pts.append(lo)
            else:
                ivs.append(Interval(lo, hi, lo_open, hi_open))
    return RealSet(ivs, pts)


def set_div(s: RealSet, t: RealSet) -> RealSet:
    if t.is_empty():
        raise EmptySetError("division by the empty set")
    if t.inf <= 0.0 <= t.sup and any(iv.lo <= 0.0 <= iv.hi for iv in t.pieces()):
        raise DivisionBySetContainingZero(
            "division by a set whose closure contains 0"
        )
    ivs, pts = [], []
    for a in s.pieces():
        for b in t.pieces():
            corners = [
                (a.lo / b.lo, a.lo_open or b.lo_open),
                (a.lo / b.hi, a.lo_open or b.hi_open),
                (a.hi / b.lo, a.hi_open or b.lo_open),
                (a.hi / b.hi, a.hi_open or b.hi_open),
            ]
            lo, hi, lo_open, hi_open = _corner_extremes(corners)
            if lo == 0.0 and _attains_zero(a):
                lo_open = False
            if hi == 0.0 and _attains_zero(a):
                hi_open = False
            if lo == hi:
                if not lo_open or not hi_open:
                    pts.append(lo)
            else:
                ivs.append(Interval(lo, hi, lo_open, hi_open))
    return RealSet(ivs, pts)


_OPS = {
    "add": set_add,
    "sub": set_sub,
    "mul": set_mul,
    "div": set_div,
}


def set_arith(op: str, s: RealSet, t: RealSet = None, alpha: float = None) -> RealSet:
    """Dispatch elementwise arithmetic by name ('scale' uses `alpha`)."""
    if op == "scale":
        if alpha is None:
            raise ValueError("scale needs alpha")
        return scale(alpha, s)
    if op not in _OPS:
        raise ValueError(f"unknown set operation {op!r}")
    return _OPS[op](s, t)


# -- intersection --------------------------------------------------------------


def _intersect_pieces(a: Interval, b: Interval):
    if a.lo > b.lo or (a.lo == b.lo and a.lo_open and not b.lo_open):
        lo, lo_open = a.lo, a.lo_open
    elif a.lo == b.lo:
        lo, lo_open = a.lo, a.lo_open or b.lo_open
    else:
        lo, lo_open = b.lo, b.lo_open
    if a.hi < b.hi or (a.hi == b.hi and a.hi_open and not b.hi_open):
        hi, hi_open = a.hi, a.hi_open
    elif a.hi == b.hi:
        hi, hi_open = a.hi, a.hi_open or b.hi_open
    else:
        hi, hi_open = b.hi, b.hi_open
    if lo > hi:
        return None
    if lo == hi:
        if lo_open or hi_open:
            return None
        return Interval(lo, hi)
    return Interval(lo, hi, lo_open, hi_open)


def intersect(a: RealSet, b: RealSet) -> RealSet:
    """Exact set intersection; an open endpoint excludes the shared value."""
    ivs, pts = [], []
    for p in a.pieces():
        for q in b.pieces():
            got = _intersect_pieces(p, q)
            if got is None:
                continue
            if got.is_degenerate():
                pts.append(got.lo)
            else:
                ivs.append(got)
    return RealSet(ivs, pts)


# -- norm and partial-metric -----------------------------------------------------


def sup_norm(s: RealSet) -> float:
    """max(|inf S|, |sup S|): the largest magnitude in the set's closure."""
    if s.is_empty():
        raise EmptySetError("norm of empty set")
    return max(abs(s.inf), abs(s.sup))


def endpoint_metric(a: RealSet, b: RealSet) -> float:
    """max(|inf A - inf B|, |sup A - sup B|).

    A partial metric: all metric axioms hold except that distance zero
    does not force the two sets to be identical.
    """
    if a.is_empty() or b.is_empty():
        raise EmptySetError("metric needs non-empty sets")
    return max(abs(a.inf - b.inf), abs(a.sup - b.sup))


# -- membership and subset queries ---------------------------------------------


def membership(s: RealSet, x: float) -> MembershipTriple:
    """(1,0,0) for crisp members, the stored triple on annotated endpoints,
    (0,0,1) otherwise."""
    for key, triple in s.annotations:
        if key == x:
            return triple
    return FULL_MEMBER if s.contains(x) else NON_MEMBER


def _interval_inside(m: Interval, n: Interval) -> bool:
    lo_ok = n.lo < m.lo or (n.lo == m.lo and (m.lo_open or not n.lo_open))
    hi_ok = n.hi > m.hi or (n.hi == m.hi and (m.hi_open or not n.hi_open))
    return lo_ok and hi_ok


def is_subset(m: RealSet, n: RealSet) -> bool:
    """Crisp subset test on the attained parts (annotations ignored)."""
    for iv in m.intervals:
        if not any(_interval_inside(iv, cand) for cand in n.intervals):
            return False
    for p in m.points:
        if not n.contains(p):
            return False
    return True


def neutro_subset(m: RealSet, n: RealSet) -> bool:
    """Subset with annotated boundary points compared componentwise.

    Every crisp member of `m` must be a full member of `n`, and every
    annotated point of `m` must have a dominating membership in `n`
    (larger t, smaller i and f).
    """
    if not is_subset(m, n):
        return False
    for key, triple in m.annotations:
        if not membership(n, key).dominates(triple):
            return False
    return True


def sets_close(a: RealSet, b: RealSet, tol: float = 1e-9) -> bool:
    """Structural equality up to `tol` on endpoints and points."""
    if len(a.intervals) != len(b.intervals) or len(a.points) != len(b.points):
        return False
    for p, q in zip(a.intervals, b.intervals):
        if abs(p.lo - q.lo) > tol or abs(p.hi - q.hi) > tol:
            return False
        if p.lo_open != q.lo_open or p.hi_open != q.hi_open:
            return False
    return all(abs(p - q) <= tol for p, q in zip(a.points, b.points))
