"""Continuity classification and set-valued intermediate value search."""

from __future__ import annotations

from dataclasses import dataclass

from . import funcmodel as fm
from .errors import (
    DomainError,
    NeutroError,
    NotFound,
    NotSupported,
    OutOfRange,
    PreconditionError,
)
from .limits import LimitConfig, LimitOutcome, Side, directional_limit
from .realset import RealSet, endpoint_metric, intersect

__all__ = ["ContinuityClass", "classify_at", "ivt_find", "ivt_cover", "check_closure"]


@dataclass(frozen=True)
class ContinuityClass:
    """continuous | mereo-continuous (with witness) | discontinuous."""

    kind: str
    witness: RealSet | None = None
    reason: str = ""

    @property
    def is_continuous(self) -> bool:
        return self.kind == "continuous"

    @property
    def is_mereo(self) -> bool:
        return self.kind in ("continuous", "mereo-continuous")

    def __repr__(self):
        if self.kind == "mereo-continuous":
            from . import textparse

            return f"ContinuityClass(mereo-continuous, witness {textparse.render_set(self.witness)})"
        return f"ContinuityClass({self.kind}{': ' + self.reason if self.reason else ''})"


def classify_at(f: fm.FuncSpec, c: float,
                cfg: LimitConfig = LimitConfig()) -> ContinuityClass:
    """Continuous when left limit, right limit and f(c) agree as sets;
    mereo-continuous when their triple intersection is non-empty."""
    try:
        fc = fm.value_union(fm.evaluate(f, c))
    except NeutroError as err:
        raise DomainError(f"f undefined at {c}: {err}") from err
    left = directional_limit(f, c, Side.LEFT, cfg)
    right = directional_limit(f, c, Side.RIGHT, cfg)
    if not (left.is_finite and right.is_finite):
        return ContinuityClass(
            "discontinuous",
            reason=f"left limit {left.kind}, right limit {right.kind}",
        )
    slack = 2 * cfg.tol  # absorbs the one-sided estimates' snap quantization
    if (endpoint_metric(left.value, right.value) <= slack
            and endpoint_metric(left.value, fc) <= slack
            and endpoint_metric(right.value, fc) <= slack):
        return ContinuityClass("continuous")
    triple = intersect(intersect(left.value, right.value), fc)
    if not triple.is_empty():
        return ContinuityClass("mereo-continuous", witness=triple)
    return ContinuityClass("discontinuous", reason="empty triple intersection")


# ---------------------------------------------------------------------------
# Intermediate value search
# ---------------------------------------------------------------------------


def _value_set(f: fm.FuncSpec, x: float) -> RealSet | None:
    try:
        return fm.value_union(fm.evaluate(f, x))
    except (DomainError, NotSupported):
        return None


def _contains(f: fm.FuncSpec, x: float, k: float, slack: float = 0.0) -> bool:
    v = _value_set(f, x)
    if v is None:
        return False
    if slack:
        return any(iv.lo - slack <= k <= iv.hi + slack for iv in v.pieces())
    return v.contains(k)


def _candidates(f: fm.FuncSpec, a: float, b: float, grid: int) -> list[float]:
    """Grid points, or the stored argument points for table specs."""
    if isinstance(f, fm.Table):
        pts = set()
        for pair in f.pairs:
            pts.update(pair.arg.points)
            for iv in pair.arg.intervals:
                pts.update((iv.lo, iv.hi))
        return sorted(p for p in pts if a <= p <= b)
    return [a + (b - a) * i / grid for i in range(grid + 1)]


def _range_bounds(f: fm.FuncSpec, a: float, b: float):
    va, vb = _value_set(f, a), _value_set(f, b)
    if va is None or vb is None:
        raise PreconditionError("f must be evaluable at both interval ends")
    ends = [va.inf, va.sup, vb.inf, vb.sup]
    return min(ends), max(ends)


def ivt_find(f: fm.FuncSpec, a: float, b: float, k: float,
             grid: int = 1024, tol: float = 1e-9) -> float:
    """Leftmost c in [a, b] whose value set contains k.

    Needs k within [m, M], the extremes of the endpoint value sets, and
    m != M; the found witness is re-verified before returning.  NotFound
    means the grid was too coarse for this spec.
    """
    m, big = _range_bounds(f, a, b)
    if m == big:
        raise PreconditionError("endpoint values span a single point (m == M)")
    if not (m <= k <= big):
        raise OutOfRange(f"k={k} outside [{m}, {big}]")

    xs = _candidates(f, a, b, grid)
    prev = None
    for x in xs:
        if _contains(f, x, k):
            if prev is not None:
                lo, hi = prev, x
                while hi - lo > tol:
                    mid = 0.5 * (lo + hi)
                    if _contains(f, mid, k):
                        hi = mid
                    else:
                        lo = mid
                x = hi
            if _contains(f, x, k, slack=tol):
                return x
        prev = x

    # crisp-style witness: bracket a crossing of inf(f)-k or sup(f)-k
    vals = [(x, _value_set(f, x)) for x in xs]
    for (x1, v1), (x2, v2) in zip(vals, vals[1:]):
        if v1 is None or v2 is None:
            continue
        for side in ("inf", "sup"):
            g1 = (v1.inf if side == "inf" else v1.sup) - k
            g2 = (v2.inf if side == "inf" else v2.sup) - k
            if g1 == 0.0 and _contains(f, x1, k, slack=tol):
                return x1
            if g1 * g2 > 0:
                continue
            lo, hi, glo = x1, x2, g1
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                v = _value_set(f, mid)
                if v is None:
                    break
                gm = (v.inf if side == "inf" else v.sup) - k
                if gm == 0.0:
                    lo = hi = mid
                elif gm * glo < 0:
                    hi = mid
                else:
                    lo, glo = mid, gm
            c = 0.5 * (lo + hi)
            if _contains(f, c, k, slack=max(tol, 1e-7)):
                return c
    raise NotFound(f"no witness for k={k} at grid resolution {grid}")


def ivt_cover(f: fm.FuncSpec, a: float, b: float, k1: float, k2: float,
              grid: int = 1024) -> list[float]:
    """Greedy chain c_1 < ... < c_m whose value sets union-covers [k1, k2].

    Rule: repeatedly take the candidate reaching furthest up from the
    covered frontier (capped at k2), leftmost on ties; the returned
    points are re-verified to cover before returning.
    """
    if k1 > k2:
        k1, k2 = k2, k1
    m, big = _range_bounds(f, a, b)
    if m == big:
        raise PreconditionError("endpoint values span a single point (m == M)")
    if not (m <= k1 and k2 <= big):
        raise OutOfRange(f"[{k1}, {k2}] outside [{m}, {big}]")

    cands = []
    for x in _candidates(f, a, b, grid):
        v = _value_set(f, x)
        if v is None:
            continue
        cands.append((x, v))

    chosen: list[float] = []
    frontier = k1
    while True:
        best = None
        for x, v in cands:
            if x in chosen:
                continue
            reach = None
            for iv in v.pieces():
                if iv.lo <= frontier <= iv.hi:
                    top = min(iv.hi, k2)
                    reach = top if reach is None else max(reach, top)
            if reach is None or (reach <= frontier and reach < k2):
                continue
            if best is None or reach > best[1]:
                best = (x, reach)
        if best is None:
            raise NotFound(
                f"cannot extend coverage past {frontier} at grid resolution {grid}"
            )
        chosen.append(best[0])
        frontier = max(frontier, best[1])
        if frontier >= k2:
            break
    union = RealSet.union(*(v for x, v in cands if x in chosen))
    probe = [k1, k2] + [k1 + (k2 - k1) * i / 64 for i in range(65)]
    if not all(any(iv.lo <= t <= iv.hi for iv in union.pieces()) for t in probe):
        raise NotFound("greedy cover failed verification; refine the grid")
    return sorted(chosen)


def check_closure(f: fm.FuncSpec, g: fm.FuncSpec, c: float, op: str,
                  cfg: LimitConfig = LimitConfig(),
                  alpha: float | None = None) -> bool:
    """Empirically verify that combining two mereo-continuous specs stays
    mereo-continuous at c (op in add/sub/mul/div/scale)."""
    if op == "scale":
        if not alpha:
            raise PreconditionError("scale needs a nonzero alpha")
        combined = fm.Combine("mul", fm.Crisp(fm.Const(float(alpha))), f)
        first = classify_at(f, c, cfg)
        if not first.is_mereo:
            raise PreconditionError("f is not mereo-continuous at c")
        return classify_at(combined, c, cfg).is_mereo

    if op not in ("add", "sub", "mul", "div"):
        raise PreconditionError(f"unknown operation {op!r}")
    for name, spec in (("f", f), ("g", g)):
        got = classify_at(spec, c, cfg)
        if not got.is_mereo:
            raise PreconditionError(f"{name} is not mereo-continuous at {c}: {got}")
    if op == "div":
        gval = fm.value_union(fm.evaluate(g, c))
        if gval.inf <= 0.0 <= gval.sup:
            raise PreconditionError("divisor's value set touches 0 at c")
    combined = fm.Combine(op, f, g)
    return classify_at(combined, c, cfg).is_mereo
