"""Indeterminacy numbers a + b*I and refined forms a + b1*I1 + b2*I2 + ...

The symbol I is idempotent (I*I = I) and absorbs zero (0*I = 0).
Distinct subindeterminacy symbols I_j, I_k are purely linear carriers:
they can be added, scaled, differentiated and integrated, but a product
mixing two distinct indices has no defined value and raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DivisionByZero,
    IndeterminateDenominator,
    NotInvertible,
    UndefinedSubindeterminacyProduct,
)

__all__ = ["NeutroNumber", "I", "nn_arith", "nn_eval_rational"]


def _clean(parts: dict[int, float]) -> tuple[tuple[int, float], ...]:
    items = []
    for k, v in sorted(parts.items()):
        if not isinstance(k, int) or k < 1:
            raise ValueError(f"indeterminacy index must be an integer >= 1, got {k!r}")
        if v != 0.0:
            items.append((k, float(v)))
    return tuple(items)


@dataclass(frozen=True)
class NeutroNumber:
    """Determinate part `a` plus sparse indeterminate coefficients.

    `parts` maps index k (1 is the plain I) to the coefficient of I_k;
    zero coefficients are never stored, so crisp numbers have an empty map.
    """

    a: float = 0.0
    parts: tuple[tuple[int, float], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "parts", _clean(dict(self.parts)))

    # -- construction helpers ---------------------------------------------

    @staticmethod
    def crisp(a: float) -> "NeutroNumber":
        return NeutroNumber(a)

    @staticmethod
    def of(a: float, b: float, index: int = 1) -> "NeutroNumber":
        return NeutroNumber(a, ((index, b),))

    @staticmethod
    def indeterminacy(index: int = 1) -> "NeutroNumber":
        return NeutroNumber(0.0, ((index, 1.0),))

    # -- queries --------------------------------------------------------------

    def coeff(self, index: int) -> float:
        for k, v in self.parts:
            if k == index:
                return v
        return 0.0

    @property
    def is_crisp(self) -> bool:
        return not self.parts

    def indices(self) -> set[int]:
        return {k for k, _ in self.parts}

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        parts = dict(self.parts)
        for k, v in other.parts:
            parts[k] = parts.get(k, 0.0) + v
        return NeutroNumber(self.a + other.a, tuple(parts.items()))

    __radd__ = __add__

    def __neg__(self):
        return NeutroNumber(-self.a, tuple((k, -v) for k, v in self.parts))

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        mixed = self.indices() | other.indices()
        if len(mixed) > 1:
            raise UndefinedSubindeterminacyProduct(
                f"product mixes indeterminacies {sorted(mixed)}"
            )
        if not mixed:
            return NeutroNumber(self.a * other.a)
        k = mixed.pop()
        b, d = self.coeff(k), other.coeff(k)
        # (a + b I)(c + d I) = ac + (ad + bc + bd) I, using I*I = I.
        return NeutroNumber.of(
            self.a * other.a,
            self.a * d + b * other.a + b * d,
            k,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.is_crisp:
            return self.div_crisp(other.a)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def div_crisp(self, c: float) -> "NeutroNumber":
        if c == 0:
            raise DivisionByZero("division of indeterminacy number by 0")
        return NeutroNumber(self.a / c, tuple((k, v / c) for k, v in self.parts))

    def inverse(self) -> "NeutroNumber":
        """Multiplicative inverse of a + b*I when it exists.

        Solving (a + b I)(a' + b' I) = 1 under I*I = I forces
        a' = 1/a and b' = -b / (a (a + b)), so both a and a + b must be
        nonzero; otherwise NotInvertible.
        """
        if self.is_crisp:
            if self.a == 0:
                raise NotInvertible("0 has no inverse")
            return NeutroNumber(1.0 / self.a)
        if len(self.parts) > 1:
            raise NotInvertible("inverse undefined for mixed subindeterminacies")
        (k, b), = self.parts
        a = self.a
        if a == 0 or a + b == 0:
            raise NotInvertible(f"{self} has no inverse (needs a != 0 and a + b != 0)")
        return NeutroNumber.of(1.0 / a, -b / (a * (a + b)), k)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are defined")
        out = NeutroNumber(1.0)
        for _ in range(n):
            out = out * self
        return out

    def close_to(self, other: "NeutroNumber", tol: float = 1e-12) -> bool:
        keys = self.indices() | other.indices()
        if abs(self.a - other.a) > tol:
            return False
        return all(abs(self.coeff(k) - other.coeff(k)) <= tol for k in keys)

    def __repr__(self):
        from . import textparse

        return f"NeutroNumber({textparse.render_nn(self)!r})"


I = NeutroNumber.indeterminacy()


def _coerce(v) -> NeutroNumber:
    if isinstance(v, NeutroNumber):
        return v
    if isinstance(v, (int, float)):
        return NeutroNumber(float(v))
    return NotImplemented


def nn_arith(op: str, x: NeutroNumber, y=None, c: float = None) -> NeutroNumber:
    """Named dispatch: add | sub | mul | div_by_crisp."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div_by_crisp":
        return x.div_crisp(c if c is not None else y.a)
    raise ValueError(f"unknown operation {op!r}")


def nn_eval_rational(num, den, at: NeutroNumber) -> NeutroNumber:
    """Evaluate expression `num`/`den` at an indeterminacy number.

    Both expressions are substituted and reduced with I*I = I and
    0*I = 0; the denominator must come out crisp and nonzero, otherwise
    IndeterminateDenominator.
    """
    from .funcmodel import eval_expr_nn

    top = eval_expr_nn(num, at)
    bottom = eval_expr_nn(den, at)
    if not bottom.is_crisp or bottom.a == 0:
        raise IndeterminateDenominator(
            f"denominator evaluates to {bottom!r}; need a crisp nonzero number"
        )
    return top.div_crisp(bottom.a)
