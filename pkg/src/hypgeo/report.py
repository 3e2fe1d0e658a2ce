"""Serialization of verdicts, audits, evaluations and scans.

Rationals are always written as exact ``"p/q"`` (or ``"p"``) strings.
"""

from __future__ import annotations

import csv
import io
import json
import re
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any, Optional

from .analytic import ComplexPoint, DiskEvidence, EvalResult
from .criteria import LemmaVerdict, PredicateVerdict, ProofAuditReport, all_predicates
from .scanner import NAMES, CellRecord, ScanResult, SliceSpec
from .series import ParameterSet

_INT = re.compile(r"[+-]?\d+")
_RATIO = re.compile(r"([+-]?\d+)/(\d+)")
_DECIMAL = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?")


class RationalParseError(ValueError):
    pass


def parse_rational(text: str, name: Optional[str] = None) -> Fraction:
    """Parse 'p/q', an integer, or a finite decimal exactly."""
    where = f"{name}: " if name else ""
    s = text.strip() if isinstance(text, str) else text
    if not isinstance(s, str):
        raise RationalParseError(f"{where}expected text, got {type(text).__name__}")
    m = _RATIO.fullmatch(s)
    if m:
        if int(m.group(2)) == 0:
            raise RationalParseError(f"{where}zero denominator in {text!r}")
        return Fraction(int(m.group(1)), int(m.group(2)))
    if _INT.fullmatch(s) or _DECIMAL.fullmatch(s):
        # Fraction parses decimal strings exactly
        return Fraction(s)
    raise RationalParseError(f"{where}cannot parse {text!r} as a rational (use p/q, an integer or a decimal)")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_real(x: float) -> str:
    return f"{x:.17g}"


def params_dict(values) -> dict[str, str]:
    if isinstance(values, ParameterSet):
        values = values.as_tuple()
    return {n: format_rational(v) for n, v in zip(NAMES, values)}


def verdict_dict(v: PredicateVerdict) -> dict[str, Any]:
    return {
        "theorem": v.theorem,
        "params": params_dict(v.params),
        "overall": v.overall,
        "parts": [
            {
                "name": p.name,
                "lhs": format_rational(p.lhs),
                "rhs": format_rational(p.rhs),
                "relation": p.relation,
                "satisfied": p.satisfied,
            }
            for p in v.parts
        ],
        "variant_flags": dict(v.variant_flags),
    }


def lemma_dict(v: LemmaVerdict) -> dict[str, Any]:
    return {
        "lemma": v.lemma,
        "holds": v.holds,
        "branch": v.branch,
        "first_violation_index": v.first_violation_index,
        "checked_length": v.checked_length,
    }


def audit_dict(r: ProofAuditReport) -> dict[str, Any]:
    return {
        "theorem": r.theorem,
        "params": params_dict(r.params),
        "range": list(r.n_range),
        "identity_ok": r.identity_ok,
        "printed_denominator_ok": r.printed_denominator_ok,
        "all_nonneg": r.all_nonneg,
        "nonnegativity": [
            {"n": n, "value": format_rational(v), "nonneg": ok} for n, v, ok in r.nonnegativity
        ],
    }


def _real(x) -> float:
    return float(x)


def point_dict(p: ComplexPoint) -> dict[str, float]:
    z = complex(p)
    return {"re": z.real, "im": z.imag}


def eval_dict(res: EvalResult) -> dict[str, Any]:
    return {
        "value": {"re": _real(res.value.real), "im": _real(res.value.imag)},
        "value_text": {"re": res.value.real.str(35, radius=False), "im": res.value.imag.str(35, radius=False)},
        "truncation_bound": res.truncation_bound,
        "terms_used": res.terms_used,
    }


def evidence_dict(ev: DiskEvidence) -> dict[str, Any]:
    n_r, n_theta, r_max = ev.grid
    return {
        "functional": ev.functional,
        "grid": {"n_r": n_r, "n_theta": n_theta, "r_max": format_rational(r_max)},
        "min_value": ev.min_value,
        "argmin": {**point_dict(ev.argmin), "r_index": ev.argmin_index[0], "theta_index": ev.argmin_index[1]},
        "error_budget": ev.error_budget,
        "positive": ev.positive,
        "skipped": ev.skipped,
    }


def cell_dict(cell: CellRecord) -> dict[str, Any]:
    return {
        "params": params_dict(cell.values),
        "valid": cell.verdicts is not None,
        "error": cell.error,
        "verdicts": None if cell.verdicts is None else {k: verdict_dict(v) for k, v in cell.verdicts.items()},
        "lemma_results": None if cell.lemma_results is None
        else {k: lemma_dict(v) for k, v in cell.lemma_results.items()},
        "empirical": None if cell.empirical is None
        else {k: evidence_dict(v) for k, v in cell.empirical.items()},
        "classification": cell.classification,
    }


def spec_dict(spec: SliceSpec) -> dict[str, Any]:
    o = spec.options
    return {
        "fixed": {k: format_rational(v) for k, v in sorted(spec.fixed.items())},
        "axes": [
            {"name": ax.name, "start": format_rational(ax.start), "stop": format_rational(ax.stop), "steps": ax.steps}
            for ax in spec.axes
        ],
        "options": {
            "run_lemmas": o.run_lemmas,
            "lemma_length": o.lemma_length,
            "run_disk": o.run_disk,
            "grid": {"n_r": o.grid[0], "n_theta": o.grid[1], "r_max": format_rational(Fraction(o.grid[2]))},
            "tol": o.tol,
        },
    }


def scan_dict(result: ScanResult) -> dict[str, Any]:
    return {
        "command": "scan",
        "spec": spec_dict(result.spec),
        "columns": csv_columns(),
        "summary": result.summary,
        "cells": [cell_dict(c) for c in result.cells],
    }


# -- CSV -------------------------------------------------------------------

LEMMA_COLUMNS = ("fejer", "ozaki", "ozaki_odd", "fejer_alexander", "ozaki_alexander")
DISK_COLUMNS = ("ctc_log", "starlike")


@lru_cache(maxsize=None)
def _part_names() -> dict[str, tuple[str, ...]]:
    ref = all_predicates(ParameterSet.of(1, 1, 1, 1, 1))
    return {k: tuple(p.name for p in v.parts) for k, v in ref.items()}


@lru_cache(maxsize=None)
def _flag_names() -> dict[str, tuple[str, ...]]:
    ref = all_predicates(ParameterSet.of(1, 1, 1, 1, 1))
    return {k: tuple(v.variant_flags) for k, v in ref.items()}


def csv_columns() -> list[str]:
    cols = list(NAMES)
    for thm, parts in _part_names().items():
        cols += [f"{thm}[{p}]" for p in parts]
        cols.append(f"{thm}.overall")
        cols += [f"{thm}.{flag}" for flag in _flag_names()[thm]]
    cols += [f"lemma.{n}" for n in LEMMA_COLUMNS]
    cols += [f"disk.{n}" for n in DISK_COLUMNS]
    cols.append("classification")
    return cols


def _b(x: Optional[bool]) -> str:
    return "" if x is None else ("true" if x else "false")


def csv_row(cell: CellRecord) -> list[str]:
    row = [format_rational(v) for v in cell.values]
    for thm, parts in _part_names().items():
        v = cell.verdicts[thm] if cell.verdicts else None
        row += [_b(p.satisfied) for p in v.parts] if v else [""] * len(parts)
        row.append(_b(v.overall) if v else "")
        row += [_b(v.variant_flags[f]) if v else "" for f in _flag_names()[thm]]
    row += [_b(cell.lemma_results[n].holds) if cell.lemma_results else "" for n in LEMMA_COLUMNS]
    row += [_b(cell.empirical[n].positive) if cell.empirical else "" for n in DISK_COLUMNS]
    row.append(cell.classification)
    return row


def scan_csv(result: ScanResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_columns())
    for cell in result.cells:
        w.writerow(csv_row(cell))
    return buf.getvalue()


# -- JSON ------------------------------------------------------------------

def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("hypgeo").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc: dict, name: Optional[str] = None) -> None:
    import jsonschema

    jsonschema.validate(doc, load_schema(name or doc["command"]))
