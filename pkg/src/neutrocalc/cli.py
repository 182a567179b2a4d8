"""Command-line front end.

One definitions file per invocation (`--defs`, plain text in the DSL
grammar, `#` comments); each subcommand runs one engine call and prints
a human-readable line, or a JSON record with `--json`.

Exit codes: 0 success, 1 domain/engine errors (rendered, not crashed),
2 parse or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import calc, contin, funcmodel as fm, limits, realset, textparse
from .errors import NeutroError, ParseError, UsageError
from .limits import LimitConfig, LimitOutcome
from .neutronum import NeutroNumber
from .realset import RealSet

__all__ = ["main", "run", "OutputRecord"]


@dataclass
class OutputRecord:
    kind: str
    input_echo: str
    result_text: str
    result_json: object
    diagnostics: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind,
            "result": self.result_json,
            "diagnostics": self.diagnostics,
        })


# -- JSON encodings ---------------------------------------------------------


def _set_json(s: RealSet):
    return {
        "intervals": [
            {"lo": iv.lo, "hi": iv.hi, "lo_open": iv.lo_open, "hi_open": iv.hi_open}
            for iv in s.intervals
        ],
        "points": list(s.points),
    }


def _nn_json(x: NeutroNumber):
    return {"a": x.a, "I": {str(k): v for k, v in x.parts}}


def _branch_json(b):
    return _nn_json(b) if isinstance(b, NeutroNumber) else _set_json(b)


def _value_json(v: fm.NeutroValue):
    return {"branches": [_branch_json(b) for b in v.branches]}


def _outcome_json(o: LimitOutcome):
    if o.is_finite:
        return _set_json(o.value)
    if o.kind == "+inf":
        return {"inf": "+"}
    if o.kind == "-inf":
        return {"inf": "-"}
    return {"dne": o.reason}


def _outcome_text(o: LimitOutcome) -> str:
    if o.is_finite:
        return textparse.render_set(o.value)
    if o.kind in ("+inf", "-inf"):
        return o.kind
    return f"does not exist ({o.reason})"


# -- argument plumbing -----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--defs", type=str, default=None, help="definitions file")
    common.add_argument("--json", action="store_true", help="emit JSON records")
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--h0", type=float, default=0.1)
    common.add_argument("--ratio", type=float, default=0.5)
    common.add_argument("--max-steps", type=int, default=60)
    common.add_argument("--blowup", type=float, default=1e9)
    common.add_argument("--n", type=int, default=4096)
    common.add_argument("--rule", choices=["left", "mid"], default="mid")
    common.add_argument("--grid", type=int, default=1024)

    top = argparse.ArgumentParser(prog="neutrocalc", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def cmd(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = cmd("eval", help="evaluate a function at a value")
    p.add_argument("--fn", required=True)
    p.add_argument("--at", required=True, help="value in the DSL grammar")

    for name in ("limit", "mereo-limit", "classify"):
        p = cmd(name)
        p.add_argument("--fn", required=True)
        p.add_argument("--at", required=True, type=float)
        if name == "limit":
            p.add_argument("--side", choices=["left", "right"], default=None)

    p = cmd("diff", help="envelope-wise symbolic derivative")
    p.add_argument("--fn", required=True)
    p.add_argument("--classify-at", type=float, default=None)

    for name in ("diff-nn", "antideriv"):
        p = cmd(name)
        p.add_argument("--fn", required=True)

    p = cmd("integrate")
    p.add_argument("--fn", required=True)
    p.add_argument("--a", required=True, type=float)
    p.add_argument("--b", required=True, type=float)

    p = cmd("integrate-set")
    p.add_argument("--fn", required=True)
    p.add_argument("--A", required=True, help="lower bound set")
    p.add_argument("--B", required=True, help="upper bound set")

    p = cmd("ivt", help="leftmost witness with k in the value set")
    p.add_argument("--fn", required=True)
    p.add_argument("--a", required=True, type=float)
    p.add_argument("--b", required=True, type=float)
    p.add_argument("--k", required=True, type=float)

    p = cmd("ivt-cover", help="greedy witness chain covering [k1,k2]")
    p.add_argument("--fn", required=True)
    p.add_argument("--a", required=True, type=float)
    p.add_argument("--b", required=True, type=float)
    p.add_argument("--k1", required=True, type=float)
    p.add_argument("--k2", required=True, type=float)

    p = cmd("metric")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)

    p = cmd("norm")
    p.add_argument("--A", required=True)

    cmd("parse-check", help="parse the definitions file and report")
    return top


def _limit_config(args) -> LimitConfig:
    return LimitConfig(h0=args.h0, ratio=args.ratio, tol=args.tol,
                       max_steps=args.max_steps, blowup_threshold=args.blowup)


def _integral_config(args) -> calc.IntegralConfig:
    return calc.IntegralConfig(
        n=args.n, rule="midpoint" if args.rule == "mid" else "left",
    )


def _load_defs(args) -> dict:
    if not args.defs:
        raise UsageError("this command needs --defs FILE")
    path = Path(args.defs)
    if not path.exists():
        raise UsageError(f"definitions file not found: {path}")
    return textparse.parse_defs(path.read_text())


def _lookup(defs: dict, name: str) -> fm.FuncSpec:
    if name not in defs:
        raise UsageError(
            f"unknown function {name!r}; defined: {', '.join(sorted(defs)) or 'none'}"
        )
    return defs[name]


# -- command implementations ----------------------------------------------------


def _run_command(args) -> OutputRecord:
    kind = args.command
    if kind == "parse-check":
        defs = _load_defs(args)
        names = list(defs)
        return OutputRecord(
            kind, "parse-check",
            "ok: " + ", ".join(names) if names else "ok: no definitions",
            {"defs": names},
            [f"{n}: {textparse.render_spec(defs[n])}" for n in names],
        )

    if kind == "metric":
        a = textparse.parse_set(args.A)
        b = textparse.parse_set(args.B)
        v = realset.endpoint_metric(a, b)
        return OutputRecord(kind, f"metric({args.A}, {args.B})",
                            textparse.render_number(v), {"value": v})

    if kind == "norm":
        a = textparse.parse_set(args.A)
        v = realset.sup_norm(a)
        return OutputRecord(kind, f"norm({args.A})",
                            textparse.render_number(v), {"value": v})

    defs = _load_defs(args)
    f = _lookup(defs, args.fn)

    if kind == "eval":
        at = textparse.parse_value(args.at)
        got = fm.evaluate(f, at)
        return OutputRecord(kind, f"{args.fn}({args.at})",
                            textparse.render(got), _value_json(got))

    if kind == "limit":
        cfg = _limit_config(args)
        if args.side:
            got = limits.directional_limit(f, args.at, args.side, cfg)
            echo = f"limit of {args.fn} at {args.at} from the {args.side}"
        else:
            got = limits.full_limit(f, args.at, cfg)
            echo = f"limit of {args.fn} at {args.at}"
        return OutputRecord(kind, echo, _outcome_text(got), _outcome_json(got))

    if kind == "mereo-limit":
        got = limits.mereo_limit(f, args.at, _limit_config(args))
        return OutputRecord(kind, f"mereo-limit of {args.fn} at {args.at}",
                            _outcome_text(got), _outcome_json(got))

    if kind == "classify":
        got = contin.classify_at(f, args.at, _limit_config(args))
        if got.kind == "mereo-continuous":
            text = f"mereo-continuous, witness {textparse.render_set(got.witness)}"
            payload = {"class": got.kind, "witness": _set_json(got.witness)}
        elif got.kind == "continuous":
            text, payload = "continuous", {"class": got.kind}
        else:
            text = f"discontinuous ({got.reason})"
            payload = {"class": got.kind, "reason": got.reason}
        return OutputRecord(kind, f"continuity of {args.fn} at {args.at}",
                            text, payload)

    if kind == "diff":
        d = calc.derivative_thick(f)
        text = textparse.render_spec(d)
        payload = {"spec": text}
        diagnostics = []
        if args.classify_at is not None:
            got = calc.derivative_classify(f, args.classify_at)
            at_text = textparse.render_number(args.classify_at)
            if got.value is not None:
                line = f"{got.kind} at {at_text}: {textparse.render_set(got.value)}"
                payload["junction"] = {"class": got.kind, "set": _set_json(got.value)}
            else:
                line = f"{got.kind} at {at_text}"
                payload["junction"] = {"class": got.kind}
            diagnostics.append(line)
        return OutputRecord(kind, f"derivative of {args.fn}", text, payload,
                            diagnostics)

    if kind == "diff-nn":
        d = calc.derivative_nn(f)
        text = textparse.render_spec(d)
        return OutputRecord(kind, f"derivative of {args.fn}", text, {"spec": text})

    if kind == "antideriv":
        got = calc.antiderivative_nn(f)
        body = textparse.render_spec(got.spec)
        text = f"{body} + C"
        return OutputRecord(kind, f"antiderivative of {args.fn}", text,
                            {"spec": body, "constant": got.constant},
                            [f"C = {got.constant} (indeterminate constant)"])

    if kind == "integrate":
        cfg = _integral_config(args)
        got = calc.integrate_thick(f, args.a, args.b, cfg)
        diagnostics = [_refinement_note(f, args.a, args.b, cfg)]
        interp = calc.integral_interpretations(got.inf, got.sup)
        diagnostics.append(
            "interpretations: min "
            + textparse.render_number(interp.min)
            + ", mid " + textparse.render_number(interp.mid)
            + ", max " + textparse.render_number(interp.max)
        )
        return OutputRecord(kind, f"integral of {args.fn} on [{args.a}, {args.b}]",
                            textparse.render_set(got), _set_json(got), diagnostics)

    if kind == "integrate-set":
        a = textparse.parse_set(args.A)
        b = textparse.parse_set(args.B)
        got = calc.integrate_setbounds(f, a, b, _integral_config(args))
        return OutputRecord(kind,
                            f"integral of {args.fn} from {args.A} to {args.B}",
                            textparse.render_set(got), _set_json(got))

    if kind == "ivt":
        c = contin.ivt_find(f, args.a, args.b, args.k, grid=args.grid)
        return OutputRecord(kind, f"ivt witness for {args.fn}, k={args.k}",
                            textparse.render_number(c), {"c": c})

    if kind == "ivt-cover":
        cs = contin.ivt_cover(f, args.a, args.b, args.k1, args.k2, grid=args.grid)
        text = textparse.render_set(RealSet.of_points(*cs))
        return OutputRecord(kind,
                            f"ivt cover for {args.fn}, [{args.k1}, {args.k2}]",
                            text, {"points": cs})

    raise UsageError(f"unknown command {kind!r}")


def _refinement_note(f, a, b, cfg: calc.IntegralConfig) -> str:
    if cfg.n < 4:
        return "refinement check skipped (n too small)"
    coarse = calc.integrate_thick(f, a, b, calc.IntegralConfig(cfg.n // 2, cfg.rule))
    fine = calc.integrate_thick(f, a, b, cfg)
    coarser = calc.integrate_thick(f, a, b, calc.IntegralConfig(cfg.n // 4, cfg.rule))
    d1 = realset.endpoint_metric(coarser, coarse)
    d2 = realset.endpoint_metric(coarse, fine)
    if d2 == 0.0:
        return "refinement check: converged exactly at n/2"
    return f"refinement ratio {(d1 / d2):.2f} between successive doublings"


def run(argv) -> tuple[int, list[OutputRecord]]:
    """Execute one command; returns (exit code, records)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return (int(ex.code or 0), [])
    try:
        record = _run_command(args)
        return 0, [record]
    except (ParseError, UsageError) as err:
        record = OutputRecord("error", " ".join(argv), f"error: {err}",
                              {"error": str(err)})
        return 2, [record]
    except NeutroError as err:
        name = type(err).__name__
        record = OutputRecord("error", " ".join(argv), f"error ({name}): {err}",
                              {"error": str(err), "type": name})
        return 1, [record]


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    js = "--json" in argv
    code, records = run(argv)
    for record in records:
        print(record.to_json() if js else record.result_text)
        if not js:
            for line in record.diagnostics:
                print(f"# {line}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
