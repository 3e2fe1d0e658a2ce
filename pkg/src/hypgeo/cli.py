"""hypgeo command line.

Exit status: 0 when the queried verdict or evidence is affirmative, 1 when
it is negative, 2 for usage and parse errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import report
from .analytic import (
    DEFAULT_GRID,
    DEFAULT_TOL,
    FUNCTIONALS,
    DegenerateGridError,
    TailBoundError,
    disk_minimum,
    eval_derivative,
    eval_series,
    ks_star_evidence,
    series_for,
)
from .criteria import PREDICATES, THEOREMS, proof_identity_audit
from .report import RationalParseError, format_rational, parse_rational
from .scanner import NAMES, TARGETS, Axis, ScanOptions, SliceSpec, SliceSpecError, find_satisfying, run_scan
from .series import InvalidParameters, Kind, ParameterSet, build_sequence

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except RationalParseError as exc:
        # argparse prefixes the offending option name
        raise argparse.ArgumentTypeError(str(exc)) from None


def _theorems(text: str) -> list[str]:
    t = text.strip().upper()
    if t == "ALL":
        return list(THEOREMS)
    if not t.startswith("T"):
        t = "T" + t
    if t not in THEOREMS:
        raise argparse.ArgumentTypeError(f"unknown theorem {text!r}; use 1-4 or all")
    return [t]


def _params(ns) -> ParameterSet:
    try:
        return ParameterSet(*ns.params)
    except InvalidParameters as exc:
        raise UsageError(f"--params: {exc}") from None


def _fmt(ns) -> str:
    if ns.json:
        return "json"
    if ns.csv:
        return "csv"
    return ns.format


def _grid(ns):
    return (ns.n_r, ns.n_theta, ns.r_max)


def _emit(text: str, ns) -> None:
    out = getattr(ns, "output", None)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _table(rows: list[Sequence[str]], header: Sequence[str]) -> str:
    rows = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _params_text(p: ParameterSet) -> str:
    return " ".join(f"{n}={format_rational(v)}" for n, v in zip(NAMES, p.as_tuple()))


def _yes(x: Optional[bool]) -> str:
    return "-" if x is None else ("yes" if x else "no")


# -- commands ----------------------------------------------------------------

def cmd_coeffs(ns) -> int:
    p = _params(ns)
    if ns.n < 2:
        raise UsageError("--n: need at least 2 terms")
    seq = build_sequence(p, ns.n, Kind(ns.kind))
    fmt = _fmt(ns)
    if fmt == "json":
        doc = {"command": "coeffs", "params": report.params_dict(p), "kind": seq.kind.value,
               "n": ns.n, "values": [format_rational(v) for v in seq.values]}
        _emit(report.dumps(doc), ns)
    elif fmt == "csv":
        lines = ["k,exponent,value"] + [
            f"{k},{seq.exponent(k)},{format_rational(v)}" for k, v in enumerate(seq.values, start=1)
        ]
        _emit("\n".join(lines) + "\n", ns)
    else:
        _emit(", ".join(format_rational(v) for v in seq.values) + "\n", ns)
    return EXIT_OK


def cmd_check(ns) -> int:
    p = _params(ns)
    verdicts = [PREDICATES[t](p) for t in ns.theorem]
    fmt = _fmt(ns)
    if fmt == "json":
        doc = {"command": "check", "params": report.params_dict(p),
               "overall": all(v.overall for v in verdicts),
               "verdicts": [report.verdict_dict(v) for v in verdicts]}
        _emit(report.dumps(doc), ns)
    elif fmt == "csv":
        rows = ["theorem,part,lhs,relation,rhs,satisfied"]
        for v in verdicts:
            for part in v.parts:
                rows.append(",".join([v.theorem, f'"{part.name}"', format_rational(part.lhs), part.relation,
                                      format_rational(part.rhs), report._b(part.satisfied)]))
        _emit("\n".join(rows) + "\n", ns)
    else:
        chunks = []
        for v in verdicts:
            head = f"{v.theorem}  {_params_text(p)}  overall: {'true' if v.overall else 'false'}\n"
            body = _table(
                [(part.name, format_rational(part.lhs), part.relation, format_rational(part.rhs),
                  _yes(part.satisfied)) for part in v.parts],
                ("part", "lhs", "rel", "rhs", "ok"),
            )
            flags = "".join(f"flag {k}: {'true' if val else 'false'}\n" for k, val in v.variant_flags.items())
            failing = "".join(f"failing: {part.name} (lhs {format_rational(part.lhs)}, "
                              f"rhs {format_rational(part.rhs)})\n" for part in v.failing())
            chunks.append(head + body + flags + failing)
        _emit("\n".join(chunks), ns)
    return EXIT_OK if all(v.overall for v in verdicts) else EXIT_NEGATIVE


def cmd_audit(ns) -> int:
    p = _params(ns)
    if ns.n < 1:
        raise UsageError("--n: need n >= 1")
    reports = [proof_identity_audit(t, p, ns.n) for t in ns.theorem]
    fmt = _fmt(ns)
    if fmt == "json":
        doc = {"command": "audit", "params": report.params_dict(p),
               "audits": [report.audit_dict(r) for r in reports]}
        _emit(report.dumps(doc), ns)
    elif fmt == "csv":
        rows = ["theorem,n,value,nonneg,identity"]
        for r in reports:
            rows += [f"{r.theorem},{row.n},{format_rational(row.value)},{report._b(row.nonneg)},"
                     f"{report._b(row.identity)}" for row in r.rows]
        _emit("\n".join(rows) + "\n", ns)
    else:
        chunks = []
        for r in reports:
            lo, hi = r.n_range
            negatives = [n for n, _, ok in r.nonnegativity if not ok]
            lines = [
                f"{r.theorem}  {_params_text(p)}  n = {lo}..{hi}",
                f"identity_ok: {'true' if r.identity_ok else 'false'}",
                f"all_nonneg: {'true' if r.all_nonneg else 'false'}",
            ]
            if r.printed_denominator_ok is not None:
                lines.append(f"printed_denominator_ok: {'true' if r.printed_denominator_ok else 'false'}")
            if negatives:
                lines.append("negative at n = " + ", ".join(map(str, negatives[:20]))
                             + (" ..." if len(negatives) > 20 else ""))
            shown = r.rows[: ns.show]
            body = _table([(row.n, format_rational(row.value), _yes(row.nonneg), _yes(row.identity))
                           for row in shown], ("n", "poly(n)", "nonneg", "identity"))
            chunks.append("\n".join(lines) + "\n" + body)
        _emit("\n".join(chunks), ns)
    return EXIT_OK if all(r.identity_ok for r in reports) else EXIT_NEGATIVE


def cmd_eval(ns) -> int:
    p = _params(ns)
    if len(ns.z) > 2:
        raise UsageError("--z: give RE or RE IM")
    z = (ns.z[0], ns.z[1] if len(ns.z) == 2 else Fraction(0))
    seq = series_for(p, Kind(ns.kind))
    try:
        fn = eval_derivative if ns.derivative else eval_series
        res = fn(seq, z, ns.tol)
    except ValueError as exc:
        raise UsageError(f"--z: {exc}") from None
    except TailBoundError as exc:
        sys.stderr.write(f"hypgeo: {exc}\n")
        return EXIT_NEGATIVE
    fmt = _fmt(ns)
    if fmt == "json":
        doc = {"command": "eval", "params": report.params_dict(p), "kind": seq.kind.value,
               "z": {"re": format_rational(z[0]), "im": format_rational(z[1])},
               "derivative": ns.derivative, "tol": ns.tol, **report.eval_dict(res)}
        _emit(report.dumps(doc), ns)
    elif fmt == "csv":
        d = report.eval_dict(res)
        _emit("re,im,truncation_bound,terms_used\n"
              f"{d['value_text']['re']},{d['value_text']['im']},{report.format_real(res.truncation_bound)},"
              f"{res.terms_used}\n", ns)
    else:
        d = report.eval_dict(res)
        what = "f'(z)" if ns.derivative else "f(z)"
        _emit(f"{what} = {d['value_text']['re']} + {d['value_text']['im']} i\n"
              f"truncation_bound = {report.format_real(res.truncation_bound)}\n"
              f"terms_used = {res.terms_used}\n", ns)
    return EXIT_OK


def cmd_evidence(ns) -> int:
    p = _params(ns)
    kind = Kind(ns.kind)
    try:
        if ns.functional:
            evs = [disk_minimum(series_for(p, kind), ns.functional, _grid(ns), ns.tol, ns.workers)]
        else:
            evs = list(ks_star_evidence(p, kind, _grid(ns), ns.tol, ns.workers))
    except (DegenerateGridError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    except TailBoundError as exc:
        sys.stderr.write(f"hypgeo: {exc}\n")
        return EXIT_NEGATIVE
    ok = all(ev.positive for ev in evs)
    fmt = _fmt(ns)
    if fmt == "json":
        doc = {"command": "evidence", "params": report.params_dict(p), "kind": kind.value,
               "positive": ok, "evidence": [report.evidence_dict(ev) for ev in evs]}
        _emit(report.dumps(doc), ns)
    else:
        rows = [(ev.functional, report.format_real(ev.min_value), report.format_real(ev.error_budget),
                 "true" if ev.positive else "false",
                 f"{complex(ev.argmin).real:.6f}{complex(ev.argmin).imag:+.6f}i",
                 f"({ev.argmin_index[0]},{ev.argmin_index[1]})", ev.skipped) for ev in evs]
        header = ("functional", "min_value", "error_budget", "positive", "argmin", "node", "skipped")
        if fmt == "csv":
            _emit("\n".join(",".join(map(str, r)) for r in [header] + rows) + "\n", ns)
        else:
            _emit(f"{_params_text(p)}  kind={kind.value}  grid={ns.n_r}x{ns.n_theta} "
                  f"r_max={format_rational(ns.r_max)}\n" + _table(rows, header), ns)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _slice(ns) -> SliceSpec:
    fixed = {}
    for item in ns.fixed or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--fixed: expected NAME=VALUE, got {item!r}")
        try:
            fixed[name.strip()] = parse_rational(value, f"--fixed {name.strip()}")
        except RationalParseError as exc:
            raise UsageError(str(exc)) from None
    axes = []
    for name, start, stop, steps in ns.axis or []:
        try:
            axes.append(Axis(name, parse_rational(start, f"--axis {name} START"),
                             parse_rational(stop, f"--axis {name} STOP"), int(steps)))
        except (RationalParseError, SliceSpecError) as exc:
            raise UsageError(str(exc)) from None
        except ValueError:
            raise UsageError(f"--axis {name}: STEPS must be an integer, got {steps!r}") from None
    options = ScanOptions(run_lemmas=ns.lemmas, lemma_length=ns.lemma_n, run_disk=ns.disk,
                          grid=_grid(ns), tol=ns.tol)
    try:
        return SliceSpec(fixed, tuple(axes), options)
    except SliceSpecError as exc:
        raise UsageError(str(exc)) from None


def cmd_scan(ns) -> int:
    spec = _slice(ns)
    fmt = _fmt(ns)
    if ns.find:
        hit = find_satisfying(spec, ns.find)
        if fmt == "json":
            doc = {"command": "find", "target": ns.find, "spec": report.spec_dict(spec),
                   "found": None if hit is None else report.params_dict(hit)}
            _emit(report.dumps(doc), ns)
        elif fmt == "csv":
            _emit(",".join(NAMES) + "\n" + ("" if hit is None else
                  ",".join(format_rational(v) for v in hit.as_tuple()) + "\n"), ns)
        else:
            _emit(f"{ns.find}: " + ("none" if hit is None else _params_text(hit)) + "\n", ns)
        return EXIT_OK if hit is not None else EXIT_NEGATIVE

    result = run_scan(spec, ns.workers)
    if fmt == "csv":
        _emit(report.scan_csv(result), ns)
    elif fmt == "json":
        _emit(report.dumps(report.scan_dict(result)), ns)
    else:
        counts = {t: result.count(t) for t in TARGETS}
        lines = [f"{len(result.cells)} cells ({result.spec.shape[0]} x {result.spec.shape[1]})"]
        lines += [f"  {k}: {v}" for k, v in result.summary.items()]
        lines += [f"  {k} true in {v} cells" for k, v in counts.items()]
        _emit("\n".join(lines) + "\n", ns)
    return EXIT_OK if any(c.verdicts is not None for c in result.cells) else EXIT_NEGATIVE


# -- parser ------------------------------------------------------------------

def _add_format(sp) -> None:
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--format", choices=("table", "json", "csv"), default="table")
    g.add_argument("--json", action="store_true", help="same as --format json")
    g.add_argument("--csv", action="store_true", help="same as --format csv")
    sp.add_argument("-o", "--output", help="write the report to a file instead of stdout")


def _add_params(sp) -> None:
    sp.add_argument("--params", nargs=5, type=_rational, required=True, metavar=("A", "B", "C", "D", "E"),
                    help="a b c d e as p/q, integers or decimals")


def _add_grid(sp) -> None:
    n_r, n_theta, r_max = DEFAULT_GRID
    sp.add_argument("--n-r", type=int, default=n_r)
    sp.add_argument("--n-theta", type=int, default=n_theta)
    sp.add_argument("--r-max", type=_rational, default=r_max)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypgeo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    kinds = [k.value for k in Kind]

    sp = sub.add_parser("coeffs", help="exact coefficients A_1..A_N")
    _add_params(sp)
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--kind", choices=kinds, default=Kind.NORMALIZED.value)
    _add_format(sp)
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("check", help="theorem predicates with every part")
    _add_params(sp)
    sp.add_argument("--theorem", type=_theorems, default=list(THEOREMS), help="1, 2, 3, 4 or all")
    _add_format(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("audit", help="proof identity and polynomial sign audit")
    _add_params(sp)
    sp.add_argument("--theorem", type=_theorems, default=list(THEOREMS), help="1, 2, 3, 4 or all")
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--show", type=int, default=10, help="table rows to print")
    _add_format(sp)
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("eval", help="f(z) or f'(z) with a truncation bound")
    _add_params(sp)
    sp.add_argument("--z", nargs="+", type=_rational, required=True, metavar="RE [IM]")
    sp.add_argument("--kind", choices=kinds, default=Kind.NORMALIZED.value)
    sp.add_argument("--derivative", action="store_true")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_format(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("evidence", help="sampled KS* evidence on a polar grid")
    _add_params(sp)
    sp.add_argument("--kind", choices=[Kind.NORMALIZED.value, Kind.ALEXANDER.value], default=Kind.NORMALIZED.value)
    sp.add_argument("--functional", choices=FUNCTIONALS,
                    help="a single functional instead of the (ctc_log, starlike) pair")
    _add_grid(sp)
    _add_format(sp)
    sp.set_defaults(func=cmd_evidence)

    sp = sub.add_parser("scan", help="sweep a two-parameter slice")
    sp.add_argument("--fixed", nargs="+", metavar="NAME=VALUE", help="the three fixed parameters")
    sp.add_argument("--axis", nargs=4, action="append", metavar=("NAME", "START", "STOP", "STEPS"))
    sp.add_argument("--lemmas", action="store_true", help="run the lemma checks per cell")
    sp.add_argument("--lemma-n", type=int, default=200)
    sp.add_argument("--disk", action="store_true", help="run disk evidence per cell (slow)")
    sp.add_argument("--find", choices=sorted(TARGETS), help="report the first cell satisfying a condition")
    _add_grid(sp)
    _add_format(sp)
    sp.set_defaults(func=cmd_scan)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return ns.func(ns)
    except UsageError as exc:
        sys.stderr.write(f"hypgeo {ns.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
