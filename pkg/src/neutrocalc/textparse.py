"""Text syntax for sets, values, expressions and function definitions.

Grammar (whitespace-insensitive, `#` starts a comment):

    expr    := orexpr
    orexpr  := sum ("or" sum)*
    sum     := term (("+" | "-") term)*
    term    := factor (("*" | "/") factor)*
    factor  := "-" factor | power
    power   := atom ("^" factor)?
    atom    := number | "I" digits? | "x" | set | "[" expr "," expr "]"
             | "(" expr ")" | func "(" expr ")"
    func    := exp | ln | log_<set> | sqrt | sin | cos | abs

Sets: `[a,b]  (a,b)  [a,b)  (a,b]  {p1,p2}  {}`, joined with `u` (or the
union sign); an endpoint may carry a membership triple, `5<0.6,0.1,0.3>`.
`or` has the lowest precedence, so `a+b or c` reads `(a+b) or c`;
alternatives fan out multiplicatively through enclosing operators.

Function definitions: `name(x) = body` where body is an expression, a
piecewise block `{ expr on <set>; expr on <set> }` (piece domains may use
inf/-inf), or `table { {1}->{5}; {2,3,4}->{6} }`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import funcmodel as fm
from .errors import ParseError
from .neutronum import NeutroNumber
from .realset import Interval, MembershipTriple, RealSet

__all__ = [
    "parse_expr", "parse_set", "parse_value", "parse_funcdef", "parse_defs",
    "render", "render_set", "render_nn", "render_number", "render_expr",
    "render_spec",
]

_SYMBOLS = ("->", "+", "-", "*", "/", "^", "(", ")", "[", "]", "{", "}",
            ",", ";", "<", ">", "=", "?", "_")
_FUNCS = ("exp", "ln", "sqrt", "sin", "cos", "abs")


@dataclass(frozen=True)
class Token:
    kind: str  # num | ident | sym | end
    text: str
    line: int
    col: int

    @property
    def span(self):
        return (self.line, self.col, len(self.text))


def _tokenize(text: str) -> list[Token]:
    toks = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "∪":  # union sign, alias of `u`
            toks.append(Token("ident", "u", line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            toks.append(Token("num", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and (text[j].isalnum()):
                j += 1
            toks.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        two = text[i:i + 2]
        if two == "->":
            toks.append(Token("sym", "->", line, col))
            i += 2
            col += 2
            continue
        if ch in "".join(_SYMBOLS):
            toks.append(Token("sym", ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError((line, col, 1), "a token", repr(ch))
    toks.append(Token("end", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None):
        if self.at(kind, text):
            return self.next()
        return None

    def expect(self, kind: str, text: str | None = None, what: str | None = None):
        if self.at(kind, text):
            return self.next()
        tok = self.peek()
        wanted = what or (text if text is not None else kind)
        raise ParseError(tok.span, wanted, tok.text or "end of input")

    def fail(self, expected: str):
        tok = self.peek()
        raise ParseError(tok.span, expected, tok.text or "end of input")

    # -- expressions (every rule returns a list of alternative branches) ----

    def orexpr(self) -> list[fm.Expr]:
        out = self.sum()
        while self.accept("ident", "or"):
            out = out + self.sum()
        return out

    def sum(self) -> list[fm.Expr]:
        out = self.term()
        while self.at("sym", "+") or self.at("sym", "-"):
            op = self.next().text
            rhs = self.term()
            node = fm.Add if op == "+" else fm.Sub
            out = [node(a, b) for a in out for b in rhs]
        return out

    def term(self) -> list[fm.Expr]:
        out = self.factor()
        while self.at("sym", "*") or self.at("sym", "/"):
            op = self.next().text
            rhs = self.factor()
            node = fm.Mul if op == "*" else fm.Div
            out = [node(a, b) for a in out for b in rhs]
        return out

    def factor(self) -> list[fm.Expr]:
        if self.accept("sym", "-"):
            inner = self.factor()
            return [self._negate(e) for e in inner]
        return self.power()

    @staticmethod
    def _negate(e: fm.Expr) -> fm.Expr:
        if isinstance(e, fm.Const):
            return fm.Const(-e.value)
        return fm.Mul(fm.Const(-1.0), e)

    def power(self) -> list[fm.Expr]:
        base = self.atom()
        if not self.accept("sym", "^"):
            return base
        expo = self.factor()
        out = []
        for b in base:
            for e in expo:
                out.append(self._make_pow(b, e))
        return out

    @staticmethod
    def _make_pow(base: fm.Expr, expo: fm.Expr) -> fm.Expr:
        if isinstance(expo, fm.Const) and float(expo.value).is_integer():
            return fm.Pow(base, int(expo.value))
        # general power via exp/ln; interval arithmetic orders the envelope
        return fm.Exp(fm.Mul(expo, fm.Ln(base)))

    def atom(self) -> list[fm.Expr]:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return [fm.Const(float(tok.text))]
        if tok.kind == "ident":
            if tok.text == "x":
                self.next()
                return [fm.Var()]
            if tok.text == "I" or (tok.text.startswith("I") and tok.text[1:].isdigit()):
                self.next()
                idx = int(tok.text[1:]) if len(tok.text) > 1 else 1
                if idx < 1:
                    raise ParseError(tok.span, "indeterminacy index >= 1", tok.text)
                return [fm.ConstNN(NeutroNumber.indeterminacy(idx))]
            if tok.text in _FUNCS:
                self.next()
                self.expect("sym", "(")
                args = self.orexpr()
                self.expect("sym", ")")
                node = {
                    "exp": fm.Exp, "ln": fm.Ln, "sqrt": fm.Sqrt,
                    "sin": fm.Sin, "cos": fm.Cos, "abs": fm.Abs,
                }[tok.text]
                return [node(a) for a in args]
            if tok.text == "log":
                self.next()
                self.expect("sym", "_")
                base = self._log_base()
                self.expect("sym", "(")
                args = self.orexpr()
                self.expect("sym", ")")
                return [fm.Log(base, a) for a in args]
            if tok.text == "inf":
                raise ParseError(tok.span, "a finite value", "inf")
            self.fail("a number, x, I, a set, or a function")
        if tok.kind == "sym" and tok.text in "([":
            return self._bracket()
        if tok.kind == "sym" and tok.text == "{":
            return [self._point_set()]
        self.fail("a number, x, I, a set, or a function")

    def _log_base(self) -> fm.Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return fm.Const(float(tok.text))
        if tok.kind == "sym" and tok.text in "([{":
            got = self.atom()
            if len(got) == 1 and isinstance(got[0], fm.ConstSet):
                return got[0]
        raise ParseError(tok.span, "a number or set literal as log base", tok.text)

    def _annotation(self) -> MembershipTriple:
        self.expect("sym", "<")
        vals = []
        for i in range(3):
            if i:
                self.expect("sym", ",")
            vals.append(float(self.expect("num", what="a membership component").text))
        self.expect("sym", ">")
        return MembershipTriple(*vals)

    def _bracket(self) -> list[fm.Expr]:
        opener = self.next().text
        lo_open = opener == "("
        first = self.orexpr()
        note1 = self._annotation() if self.at("sym", "<") else None
        if not self.accept("sym", ","):
            if opener == "(":
                if note1 is not None:
                    self.fail("',' after annotated endpoint")
                self.expect("sym", ")")
                return self._maybe_union(first)
            self.fail("',' in interval")
        second = self.orexpr()
        note2 = self._annotation() if self.at("sym", "<") else None
        closer = self.expect("sym", None, "')' or ']'")
        if closer.text not in ")]":
            raise ParseError(closer.span, "')' or ']'", closer.text)
        hi_open = closer.text == ")"
        out = []
        for a in first:
            for b in second:
                if isinstance(a, fm.Const) and isinstance(b, fm.Const):
                    notes = {}
                    if note1 is not None:
                        notes[a.value] = note1
                    if note2 is not None:
                        notes[b.value] = note2
                    s = RealSet(
                        (Interval(a.value, b.value, lo_open, hi_open),),
                        annotations=tuple(notes.items()),
                    )
                    out.append(fm.ConstSet(s))
                elif note1 is not None or note2 is not None:
                    self.fail("annotations only on constant endpoints")
                else:
                    out.append(fm.Between(a, b, lo_open, hi_open))
        return self._maybe_union(out)

    def _point_set(self) -> fm.Expr:
        self.expect("sym", "{")
        pts = []
        if not self.at("sym", "}"):
            while True:
                got = self.orexpr()
                if len(got) != 1 or not isinstance(got[0], fm.Const):
                    self.fail("a number in point set")
                pts.append(got[0].value)
                if not self.accept("sym", ","):
                    break
        self.expect("sym", "}")
        merged = self._maybe_union([fm.ConstSet(RealSet(points=pts))])
        return merged[0]

    def _maybe_union(self, branches: list[fm.Expr]) -> list[fm.Expr]:
        while self.at("ident", "u"):
            if len(branches) != 1 or not isinstance(branches[0], fm.ConstSet):
                self.fail("set literals on both sides of a union")
            self.next()
            nxt = self.atom()
            if len(nxt) != 1 or not isinstance(nxt[0], fm.ConstSet):
                self.fail("a set literal after union")
            branches = [fm.ConstSet(RealSet.union(branches[0].value, nxt[0].value))]
        return branches

    # -- domains (piece dispatch; inf allowed) ------------------------------

    def _domain_endpoint(self) -> float:
        neg = bool(self.accept("sym", "-"))
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "inf":
            self.next()
            v = math.inf
        elif tok.kind == "num":
            self.next()
            v = float(tok.text)
        else:
            self.fail("a number or inf")
        return -v if neg else v

    def domain(self) -> fm.Domain:
        intervals, points = [], []
        while True:
            tok = self.peek()
            if tok.kind == "sym" and tok.text in "([":
                lo_open = self.next().text == "("
                lo = self._domain_endpoint()
                self.expect("sym", ",")
                hi = self._domain_endpoint()
                closer = self.next()
                if closer.text not in ")]":
                    raise ParseError(closer.span, "')' or ']'", closer.text)
                hi_open = closer.text == ")"
                if math.isinf(lo):
                    lo_open = True
                if math.isinf(hi):
                    hi_open = True
                intervals.append(fm.DomainInterval(lo, hi, lo_open, hi_open))
            elif tok.kind == "sym" and tok.text == "{":
                self.next()
                if not self.at("sym", "}"):
                    while True:
                        points.append(self._domain_endpoint())
                        if not self.accept("sym", ","):
                            break
                self.expect("sym", "}")
            else:
                self.fail("a domain interval or point set")
            if not self.accept("ident", "u"):
                break
        return fm.Domain(tuple(intervals), tuple(points))

    # -- function bodies ------------------------------------------------------

    def funcdef(self):
        name = self.expect("ident", what="a function name").text
        self.expect("sym", "(")
        self.expect("ident", "x")
        self.expect("sym", ")")
        self.expect("sym", "=")
        if self.at("ident", "table"):
            spec = self._table()
        else:
            spec = self._body()
        self.expect("end", what="end of definition")
        return name, spec

    def _table(self) -> fm.Table:
        self.expect("ident", "table")
        self.expect("sym", "{")
        pairs = []
        while True:
            arg = self._set_atom()
            self.expect("sym", "->")
            val = self._set_atom()
            tag = fm.SURE
            if self.at("sym", "<"):
                tag = fm.PairTag("partial", self._annotation())
            elif self.accept("sym", "?"):
                tag = fm.PairTag("potential")
            pairs.append(fm.TablePair(arg, val, tag))
            if not self.accept("sym", ";"):
                break
        self.expect("sym", "}")
        return fm.Table(tuple(pairs))

    def _set_atom(self) -> RealSet:
        tok = self.peek()
        if tok.kind == "num" or (tok.kind == "sym" and tok.text == "-"):
            got = self.factor()
            if len(got) == 1 and isinstance(got[0], fm.Const):
                return RealSet.point(got[0].value)
            self.fail("a set literal")
        got = self.atom()
        if len(got) == 1 and isinstance(got[0], fm.ConstSet):
            return got[0].value
        self.fail("a set literal")

    def _body(self) -> fm.FuncSpec:
        if self.at("sym", "{"):
            save = self.pos
            self.next()
            try:
                first = self.orexpr()
                is_piecewise = self.at("ident", "on")
            except ParseError:
                is_piecewise = False
            if is_piecewise:
                return self._piecewise(first)
            self.pos = save
        branches = self.orexpr()
        return _spec_from_branches(branches)

    def _piecewise(self, first_branches) -> fm.Piecewise:
        pieces = []
        branches = first_branches
        while True:
            self.expect("ident", "on")
            dom = self.domain()
            pieces.append(fm.Piece(_spec_from_branches(branches), domain=dom))
            if not self.accept("sym", ";"):
                break
            branches = self.orexpr()
        self.expect("sym", "}")
        return fm.Piecewise(tuple(pieces))


def _spec_from_expr(e: fm.Expr) -> fm.FuncSpec:
    if isinstance(e, fm.Between):
        return fm.Thick(e.lo, e.hi, e.lo_open, e.hi_open)
    if fm.has_nn(e):
        return fm.NNExpr(e)
    return fm.Crisp(e)


def _spec_from_branches(branches) -> fm.FuncSpec:
    specs = [_spec_from_expr(e) for e in branches]
    if len(specs) == 1:
        return specs[0]
    return fm.Alternatives(tuple(specs))


# ---------------------------------------------------------------------------
# Public parse entry points
# ---------------------------------------------------------------------------


def parse_expr(text: str):
    """Parse an expression; `or` alternatives yield an Alternatives spec."""
    p = _Parser(text)
    branches = p.orexpr()
    p.expect("end", what="end of expression")
    if len(branches) == 1:
        return branches[0]
    return fm.Alternatives(tuple(_spec_from_expr(e) for e in branches))


def parse_set(text: str) -> RealSet:
    """Parse a set literal (interval/point syntax with unions)."""
    p = _Parser(text)
    got = p._set_atom()
    p.expect("end", what="end of set")
    return got


def parse_value(text: str) -> fm.NeutroValue:
    """Parse a constant value: sets, numbers and a + b*I forms, or-joined."""
    p = _Parser(text)
    branches = p.orexpr()
    p.expect("end", what="end of value")
    out = []
    for e in branches:
        if fm.contains_var(e):
            raise ParseError((1, 1, 0), "a constant value", "a formula in x")
        if fm.has_nn(e):
            out.append(fm.eval_expr_nn(e, NeutroNumber(0.0)))
        else:
            out.append(fm.eval_expr_set(e, RealSet.point(0.0)))
    return fm.NeutroValue(tuple(out))


def parse_funcdef(text: str):
    """Parse `name(x) = body`; returns (name, FuncSpec)."""
    return _Parser(text).funcdef()


def parse_defs(text: str) -> dict:
    """Parse a definitions file: one definition per line, `#` comments.

    A definition may span lines while brackets remain unbalanced.
    """
    defs: dict[str, fm.FuncSpec] = {}
    buf, depth = [], 0
    for raw in text.splitlines():
        line = raw.split("#", 1)[0]
        if not line.strip() and not buf:
            continue
        buf.append(line)
        depth += sum(line.count(c) for c in "([{") - sum(line.count(c) for c in ")]}")
        if depth > 0:
            continue
        stmt = "\n".join(buf).strip()
        buf, depth = [], 0
        if not stmt:
            continue
        name, spec = parse_funcdef(stmt)
        if name in defs:
            raise ParseError((1, 1, len(name)), "a fresh name", f"duplicate {name!r}")
        defs[name] = spec
    if buf and "".join(buf).strip():
        raise ParseError((1, 1, 0), "balanced brackets", "end of file")
    return defs


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def render_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def render_set(s: RealSet) -> str:
    if s.is_empty():
        return "{}"
    notes = dict(s.annotations)

    def endpoint(v: float) -> str:
        text = render_number(v)
        if v in notes:
            t = notes[v]
            text += f"<{render_number(t.t)},{render_number(t.i)},{render_number(t.f)}>"
        return text

    parts = []
    for iv in s.intervals:
        parts.append(
            ("(" if iv.lo_open else "[") + endpoint(iv.lo) + ","
            + endpoint(iv.hi) + (")" if iv.hi_open else "]")
        )
    if s.points:
        parts.append("{" + ",".join(render_number(p) for p in s.points) + "}")
    return " u ".join(parts)


def render_nn(x: NeutroNumber) -> str:
    terms: list[tuple[float, str]] = []
    if x.a != 0 or not x.parts:
        terms.append((x.a, ""))
    for k, v in x.parts:
        sym = "I" if k == 1 else f"I{k}"
        terms.append((v, sym))
    out = ""
    for i, (coeff, sym) in enumerate(terms):
        mag = abs(coeff)
        if sym and mag == 1:
            body = sym
        elif sym:
            body = f"{render_number(mag)}*{sym}"
        else:
            body = render_number(mag)
        if i == 0:
            out = ("-" if coeff < 0 else "") + body
        else:
            out += (" - " if coeff < 0 else " + ") + body
    return out


def render(v) -> str:
    """Canonical text of a value: branches joined with `or`, singleton
    sets written as bare numbers."""
    v = fm.as_value(v)
    parts = []
    for b in v.branches:
        if isinstance(b, NeutroNumber):
            parts.append(render_nn(b))
        elif b.is_singleton():
            parts.append(render_number(b.single_value))
        else:
            parts.append(render_set(b))
    return " or ".join(parts)


_PREC_OR, _PREC_SUM, _PREC_TERM, _PREC_UNARY, _PREC_POW, _PREC_ATOM = range(6)


def render_expr(e: fm.Expr, prec: int = 0) -> str:
    def wrap(text: str, level: int) -> str:
        return f"({text})" if level < prec else text

    if isinstance(e, fm.Const):
        if e.value < 0:
            return wrap(render_number(e.value), _PREC_UNARY)
        return render_number(e.value)
    if isinstance(e, fm.ConstSet):
        return render_set(e.value)
    if isinstance(e, fm.ConstNN):
        body = render_nn(e.value)
        return f"({body})" if (" " in body and prec > _PREC_SUM) else body
    if isinstance(e, fm.Var):
        return "x"
    if isinstance(e, fm.Param):
        return "<param>"
    if isinstance(e, fm.Add):
        right = render_expr(e.right, _PREC_SUM + 1)
        joiner, body = (" - ", right[1:]) if right.startswith("-") else (" + ", right)
        return wrap(render_expr(e.left, _PREC_SUM) + joiner + body, _PREC_SUM)
    if isinstance(e, fm.Sub):
        return wrap(render_expr(e.left, _PREC_SUM) + " - "
                    + render_expr(e.right, _PREC_SUM + 1), _PREC_SUM)
    if isinstance(e, fm.Mul):
        if isinstance(e.left, fm.Const) and e.left.value == -1:
            return wrap("-" + render_expr(e.right, _PREC_UNARY), _PREC_UNARY)
        return wrap(render_expr(e.left, _PREC_TERM) + "*"
                    + render_expr(e.right, _PREC_TERM + 1), _PREC_TERM)
    if isinstance(e, fm.Div):
        return wrap(render_expr(e.left, _PREC_TERM) + "/"
                    + render_expr(e.right, _PREC_TERM + 1), _PREC_TERM)
    if isinstance(e, fm.Pow):
        return wrap(render_expr(e.base, _PREC_ATOM) + f"^{e.n}"
                    if e.n >= 0 else
                    render_expr(e.base, _PREC_ATOM) + f"^({e.n})", _PREC_POW)
    if isinstance(e, fm.Exp):
        return f"exp({render_expr(e.arg)})"
    if isinstance(e, fm.Ln):
        return f"ln({render_expr(e.arg)})"
    if isinstance(e, fm.Log):
        return f"log_{render_expr(e.base, _PREC_ATOM)}({render_expr(e.arg)})"
    if isinstance(e, fm.Sqrt):
        return f"sqrt({render_expr(e.arg)})"
    if isinstance(e, fm.Sin):
        return f"sin({render_expr(e.arg)})"
    if isinstance(e, fm.Cos):
        return f"cos({render_expr(e.arg)})"
    if isinstance(e, fm.Abs):
        return f"abs({render_expr(e.arg)})"
    if isinstance(e, fm.Between):
        return (("(" if e.lo_open else "[") + render_expr(e.lo) + ", "
                + render_expr(e.hi) + (")" if e.hi_open else "]"))
    return repr(e)


def render_domain(d: fm.Domain) -> str:
    parts = []
    for iv in d.intervals:
        lo = "-inf" if iv.lo == -math.inf else render_number(iv.lo)
        hi = "inf" if iv.hi == math.inf else render_number(iv.hi)
        parts.append(("(" if iv.lo_open else "[") + lo + "," + hi
                     + (")" if iv.hi_open else "]"))
    if d.points:
        parts.append("{" + ",".join(render_number(p) for p in d.points) + "}")
    return " u ".join(parts) if parts else "{}"


def render_spec(f: fm.FuncSpec) -> str:
    if isinstance(f, fm.Crisp):
        return render_expr(f.expr)
    if isinstance(f, fm.NNExpr):
        return render_expr(f.expr)
    if isinstance(f, fm.Thick):
        return (("(" if f.lo_open else "[") + render_expr(f.lower) + ", "
                + render_expr(f.upper) + (")" if f.hi_open else "]"))
    if isinstance(f, fm.Alternatives):
        return " or ".join(render_spec(b) for b in f.branches)
    if isinstance(f, fm.Piecewise):
        bits = []
        for p in f.pieces:
            if p.domain is not None:
                bits.append(f"{render_spec(p.spec)} on {render_domain(p.domain)}")
            else:
                bits.append(f"{render_spec(p.spec)} at {render_set(p.set_key)}")
        return "{ " + "; ".join(bits) + " }"
    if isinstance(f, fm.Table):
        bits = [f"{render_set(p.arg)}->{render_set(p.val)}" for p in f.pairs]
        return "table { " + "; ".join(bits) + " }"
    if isinstance(f, fm.Composed):
        return f"({render_spec(f.outer)}) after ({render_spec(f.inner)})"
    if isinstance(f, fm.Combine):
        sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[f.op]
        return f"({render_spec(f.left)}) {sym} ({render_spec(f.right)})"
    return repr(f)
