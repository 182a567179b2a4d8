"""Numeric one-sided, two-sided, mereo and infinite limits.

The engine samples f along a geometric approach x_k = c -/+ h0*ratio^k and
watches the sequence of value sets: convergence is declared when
successive values are Cauchy in the endpoint metric for three steps,
divergence when the set's inf (resp. sup) escapes past the blow-up
threshold monotonically, and non-existence on oscillation or exhaustion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import funcmodel as fm
from . import realset
from .errors import NeutroError, NonMonotoneParameter
from .realset import Interval, RealSet, endpoint_metric, intersect

__all__ = [
    "Side", "LimitConfig", "LimitOutcome",
    "directional_limit", "mereo_limit", "full_limit", "interval_param_limit",
    "snap_set",
]


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class LimitConfig:
    """Numeric approach parameters; defaults converge for smooth envelopes."""

    h0: float = 0.1
    ratio: float = 0.5
    tol: float = 1e-6
    max_steps: int = 60
    blowup_threshold: float = 1e9

    def __post_init__(self):
        if self.h0 <= 0 or self.tol <= 0 or self.blowup_threshold <= 0:
            raise ValueError("h0, tol and blowup_threshold must be positive")
        if not (0 < self.ratio < 1):
            raise ValueError("ratio must lie in (0, 1)")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


@dataclass(frozen=True)
class LimitOutcome:
    """Finite set limit, an infinity, or does-not-exist with a reason."""

    kind: str  # finite | +inf | -inf | dne
    value: RealSet | None = None
    reason: str = ""

    @staticmethod
    def finite(value: RealSet) -> "LimitOutcome":
        if value.is_empty():
            raise ValueError("finite limit carries a non-empty set")
        return LimitOutcome("finite", value)

    @staticmethod
    def plus_infinity() -> "LimitOutcome":
        return LimitOutcome("+inf")

    @staticmethod
    def minus_infinity() -> "LimitOutcome":
        return LimitOutcome("-inf")

    @staticmethod
    def does_not_exist(reason: str) -> "LimitOutcome":
        return LimitOutcome("dne", reason=reason)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def exists(self) -> bool:
        return self.kind != "dne"

    def __repr__(self):
        if self.is_finite:
            from . import textparse

            return f"LimitOutcome({textparse.render_set(self.value)!r})"
        if self.kind == "dne":
            return f"LimitOutcome(does not exist: {self.reason})"
        return f"LimitOutcome({self.kind})"


def _snap(v: float, tol: float) -> float:
    digits = -math.log10(tol)
    if abs(digits - round(digits)) < 1e-9:
        out = round(v, int(round(digits)))
    else:
        out = round(v / tol) * tol
    return 0.0 if out == 0 else out


def snap_set(s: RealSet, tol: float) -> RealSet:
    """Round endpoints and points onto the tol grid (cleans float drift)."""
    ivs = [Interval(_snap(iv.lo, tol), _snap(iv.hi, tol), iv.lo_open, iv.hi_open)
           for iv in s.intervals]
    pts = [_snap(p, tol) for p in s.points]
    return RealSet(ivs, pts)


class _BranchDetector:
    """Incremental convergence/divergence detector for one value branch."""

    def __init__(self, cfg: LimitConfig):
        self.cfg = cfg
        self.prev: RealSet | None = None
        self.last_d: float | None = None
        self.cauchy = 0
        self.stall = 0
        self.inf_grow = 0
        self.sup_fall = 0
        self.outcome: LimitOutcome | None = None

    def feed(self, v: RealSet):
        cfg = self.cfg
        prev = self.prev
        if prev is not None:
            if v.inf > cfg.blowup_threshold and v.inf > prev.inf:
                self.inf_grow += 1
            else:
                self.inf_grow = 0
            if v.sup < -cfg.blowup_threshold and v.sup < prev.sup:
                self.sup_fall += 1
            else:
                self.sup_fall = 0
            if self.inf_grow >= 3:
                self.outcome = LimitOutcome.plus_infinity()
                return
            if self.sup_fall >= 3:
                self.outcome = LimitOutcome.minus_infinity()
                return

            d = endpoint_metric(v, prev)
            if d < cfg.tol:
                self.cauchy += 1
                if self.cauchy >= 3:
                    self.outcome = LimitOutcome.finite(snap_set(v, cfg.tol))
                    self.prev = v
                    return
            else:
                self.cauchy = 0
            # oscillation: differences stop shrinking while neither bound
            # is escaping monotonically toward an infinity
            escaping = v.inf > prev.inf or v.sup < prev.sup
            if self.last_d is not None and d >= self.last_d and not escaping:
                self.stall += 1
                if self.stall >= 10:
                    self.outcome = LimitOutcome.does_not_exist("oscillation")
            else:
                self.stall = 0
            self.last_d = d
        self.prev = v


def directional_limit(f: fm.FuncSpec, c: float, side: Side | str,
                      cfg: LimitConfig = LimitConfig()) -> LimitOutcome:
    """One-sided limit of f at c along a geometric approach."""
    side = Side(side) if not isinstance(side, Side) else side
    sign = -1.0 if side is Side.LEFT else 1.0
    detectors: list[_BranchDetector] | None = None
    seen_success = False
    last_error = None

    h = cfg.h0
    for _ in range(cfg.max_steps):
        x = c + sign * h
        h *= cfg.ratio
        if x == c:
            break
        try:
            value = fm.evaluate(f, x)
        except NeutroError as err:
            if seen_success:
                return LimitOutcome.does_not_exist(f"evaluation failed near {c}: {err}")
            last_error = err
            continue
        seen_success = True
        branches = value.branches
        if any(not isinstance(b, RealSet) for b in branches):
            return LimitOutcome.does_not_exist(
                "indeterminacy-number values; use rational evaluation"
            )
        if detectors is None:
            detectors = [_BranchDetector(cfg) for _ in branches]
        if len(branches) != len(detectors):
            return LimitOutcome.does_not_exist("branch structure varies along approach")
        done = True
        for det, b in zip(detectors, branches):
            if det.outcome is None:
                det.feed(b)
            if det.outcome is None:
                done = False
        if done:
            break

    if detectors is None:
        return LimitOutcome.does_not_exist(
            f"function not evaluable near {c}: {last_error}"
        )
    outcomes = []
    for det in detectors:
        outcomes.append(det.outcome
                        or LimitOutcome.does_not_exist("no convergence within step budget"))
    return _merge_branch_outcomes(outcomes, cfg)


def _merge_branch_outcomes(outcomes, cfg: LimitConfig) -> LimitOutcome:
    first = outcomes[0]
    if len(outcomes) == 1:
        return first
    for o in outcomes[1:]:
        if o.kind != first.kind:
            return LimitOutcome.does_not_exist(
                "branches disagree: " + "; ".join(_describe(o) for o in outcomes)
            )
        if first.is_finite and endpoint_metric(o.value, first.value) > 2 * cfg.tol:
            return LimitOutcome.does_not_exist(
                "branches disagree: " + "; ".join(_describe(o) for o in outcomes)
            )
    return first


def _describe(o: LimitOutcome) -> str:
    if o.is_finite:
        from . import textparse

        return textparse.render_set(o.value)
    return o.kind if o.exists else f"dne ({o.reason})"


def mereo_limit(f: fm.FuncSpec, c: float,
                cfg: LimitConfig = LimitConfig()) -> LimitOutcome:
    """Intersection of the left and right limits; empty means no limit."""
    left = directional_limit(f, c, Side.LEFT, cfg)
    right = directional_limit(f, c, Side.RIGHT, cfg)
    if left.is_finite and right.is_finite:
        both = intersect(left.value, right.value)
        if both.is_empty():
            return LimitOutcome.does_not_exist(
                "left and right limits do not intersect"
            )
        return LimitOutcome.finite(both)
    if left.kind == right.kind and left.exists:
        return LimitOutcome(left.kind)
    return LimitOutcome.does_not_exist(
        f"left: {_describe(left)}; right: {_describe(right)}"
    )


def full_limit(f: fm.FuncSpec, c: float,
               cfg: LimitConfig = LimitConfig()) -> LimitOutcome:
    """Two-sided limit: exists only when both sides agree as sets.

    Agreement allows twice the step tolerance, absorbing the snap-grid
    quantization of the two one-sided estimates.
    """
    left = directional_limit(f, c, Side.LEFT, cfg)
    right = directional_limit(f, c, Side.RIGHT, cfg)
    if left.is_finite and right.is_finite:
        if endpoint_metric(left.value, right.value) <= 2 * cfg.tol:
            return left
        return LimitOutcome.does_not_exist(
            f"left {_describe(left)} differs from right {_describe(right)}"
        )
    if left.kind == right.kind and left.exists:
        return LimitOutcome(left.kind)
    return LimitOutcome.does_not_exist(
        f"left: {_describe(left)}; right: {_describe(right)}"
    )


def interval_param_limit(template: fm.Expr, p: float, q: float, c: float,
                         cfg: LimitConfig = LimitConfig()) -> LimitOutcome:
    """Limit of a family with one interval parameter spanning [p, q].

    The template's Param leaves are set to p, q and the midpoint; the two
    endpoint limits span the returned hull, and the midpoint limit must
    fall inside it (monotone-parameter check), else NonMonotoneParameter.
    """
    if p > q:
        p, q = q, p
    mid = 0.5 * (p + q)
    results = []
    for alpha in (p, q, mid):
        spec = fm.Crisp(fm.substitute_param(template, alpha))
        results.append(full_limit(spec, c, cfg))
    lo_out, hi_out, mid_out = results
    kinds = {r.kind for r in results}
    if kinds == {"+inf"} or kinds == {"-inf"}:
        return results[0]
    if not all(r.is_finite for r in results):
        return LimitOutcome.does_not_exist(
            "; ".join(_describe(r) for r in results)
        )

    def center(s: RealSet) -> float:
        return 0.5 * (s.inf + s.sup)

    a, b, m = center(lo_out.value), center(hi_out.value), center(mid_out.value)
    lo, hi = min(a, b), max(a, b)
    if not (lo - cfg.tol <= m <= hi + cfg.tol):
        raise NonMonotoneParameter(
            f"midpoint limit {m} escapes the endpoint hull [{lo}, {hi}]"
        )
    if lo == hi:
        return LimitOutcome.finite(RealSet.point(lo))
    return LimitOutcome.finite(RealSet.closed(lo, hi))
