"""Acceptance gate: one test per criterion, each reporting a single pass/fail line."""

from __future__ import annotations

import cmath
import itertools
import json
import math
import random
import time
from fractions import Fraction as F

import mpmath

from hypgeo import report
from hypgeo.analytic import ComplexPoint, disk_minimum, eval_series, ks_star_evidence, series_for
from hypgeo.cli import main
from hypgeo.criteria import (
    NON_INCREASING,
    THEOREMS,
    check_fejer,
    check_ozaki,
    check_ozaki_odd,
    proof_identity_audit,
    proof_poly,
    thm1_predicate,
    thm2_predicate,
    thm3_predicate,
    thm4_predicate,
)
from hypgeo.report import parse_rational
from hypgeo.scanner import Axis, ScanOptions, SliceSpec, run_scan
from hypgeo.series import CoefficientSequence, Kind, ParameterSet, build_sequence

from .oracles import mp_partial_sum, random_tuple

N_TUPLES = 1000
PREFIX = 200


def _satisfying(predicate, seed, count):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        p = random_tuple(rng)
        if predicate(p).overall:
            out.append(p)
    return out


def test_c1_theorem1_sufficiency(criterion):
    t0 = time.perf_counter()
    violations = 0
    for p in _satisfying(thm1_predicate, 101, N_TUPLES):
        v = check_ozaki(build_sequence(p, PREFIX))
        if not (v.holds and v.branch == NON_INCREASING):
            violations += 1
        violations += sum(1 for n in range(1, PREFIX + 1) if proof_poly("T1", p, n) < 0)
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 60
    assert criterion(1, ok, f"{N_TUPLES} tuples, {violations} violations, {elapsed:.1f}s (limit 60s)")


def test_c2_theorem2_sufficiency(criterion):
    t0 = time.perf_counter()
    violations = sum(
        1 for p in _satisfying(thm2_predicate, 202, N_TUPLES)
        if not check_ozaki_odd(build_sequence(p, PREFIX, Kind.ODD)).holds
    )
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 60
    assert criterion(2, ok, f"{N_TUPLES} tuples, {violations} violations, {elapsed:.1f}s")


def _quarter_box():
    abc = [F(k, 4) for k in range(1, 13)]
    de = [F(k, 4) for k in range(1, 13)]
    for a, b, c in itertools.combinations_with_replacement(abc, 3):
        for d, e in itertools.combinations_with_replacement(de, 2):
            yield ParameterSet(a, b, c, d, e)


def test_c3_conditional_sufficiency(criterion):
    """Quarter-step box a<=b<=c in (0,3], d<=e in (0,3]; both combined flags are nonempty there."""
    n3 = n4 = 0
    bad3, bad4 = [], []
    for p in _quarter_box():
        if thm3_predicate(p).variant_flags["with_thm1"]:
            n3 += 1
            s = build_sequence(p, PREFIX)
            if not (check_fejer(s).holds and check_ozaki(s).holds):
                bad3.append(p)
        v4 = thm4_predicate(p)
        if v4.overall and v4.variant_flags["proof_conditions"]:
            n4 += 1
            s = build_sequence(p, PREFIX, Kind.ALEXANDER)
            if not (check_fejer(s).holds and check_ozaki(s).holds):
                bad4.append(p)
    first = ", ".join("(" + ",".join(map(report.format_rational, p.as_tuple())) + ")" for p in bad4[:2])
    ok = n3 > 0 and n4 > 0 and not bad3 and not bad4
    assert criterion(3, ok, f"thm3 combined: {n3} tuples, {len(bad3)} lemma failures; "
                            f"thm4 combined: {n4} tuples, {len(bad4)} lemma failures"
                            + (f" e.g. {first}" if bad4 else ""))


def test_c4_proof_identity_audits(criterion):
    rng = random.Random(404)
    t0 = time.perf_counter()
    failures = 0
    for _ in range(100):
        p = random_tuple(rng)
        failures += sum(1 for t in THEOREMS if not proof_identity_audit(t, p, 100).identity_ok)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 30
    assert criterion(4, ok, f"100 tuples x 4 theorems, {failures} identity failures, {elapsed:.1f}s")


def test_c5_evaluation_oracles(criterion):
    li2 = mpmath.pi**2 / 12 - mpmath.log(2) ** 2 / 2
    r = eval_series(series_for(ParameterSet.of(1, 1, 1, 2, 2)), F(1, 2))
    err_li2 = float(abs(mpmath.mpf(r.value.real.str(40, radius=False)) - li2))
    r = eval_series(series_for(ParameterSet.of(F(3, 2), F(5, 2), 1, F(3, 2), F(5, 2))), F(3, 10))
    err_geo = float(abs(mpmath.mpf(r.value.real.str(40, radius=False)) - mpmath.mpf(3) / 7))

    rng = random.Random(505)
    dominated = 0
    for _ in range(100):
        p = random_tuple(rng)
        z = cmath.rect(rng.uniform(0, 0.95), rng.uniform(0, 2 * math.pi))
        res = eval_series(series_for(p), z)
        oracle = mp_partial_sum(build_sequence(p, 4 * max(res.terms_used, 2)).values, complex(ComplexPoint.of(z)))
        err = abs(mpmath.mpc(res.value.real.str(40, radius=False), res.value.imag.str(40, radius=False)) - oracle)
        dominated += err <= res.truncation_bound
    ok = err_li2 <= 1e-12 and err_geo <= 1e-12 and dominated == 100
    assert criterion(5, ok, f"Li2 err {err_li2:.2e}, 3/7 err {err_geo:.2e}, bound dominates {dominated}/100")


def test_c6_geometric_evidence(criterion):
    geo = series_for(ParameterSet.of(F(3, 2), F(5, 2), 1, F(3, 2), F(5, 2)))
    ev = disk_minimum(geo, "ctc_log")
    i, j = ev.argmin_index
    geo_ok = abs(ev.min_value - 1 / 1.95) <= 1e-9 and abs(i - 64) <= 1 and abs(j - 128) <= 1
    ident = disk_minimum(CoefficientSequence.from_values([1, 0]), "ctc_log")
    ident_ok = abs(ident.min_value - 0.05) <= max(ident.error_budget, 1e-15)
    ctc, star = ks_star_evidence(ParameterSet.of(1, 1, 1, 2, 2))
    ok = geo_ok and ident_ok and ctc.positive and star.positive
    assert criterion(6, ok, f"z/(1-z): {ev.min_value:.12f} at node {ev.argmin_index}; "
                            f"z: {ident.min_value:.15f}; KS*(1,1,1,2,2): {ctc.positive}/{star.positive}")


def test_c7_scanner(criterion):
    spec = SliceSpec({"a": 1, "b": 1, "c": 1}, (Axis("d", 1, 3, 2), Axis("e", 1, 3, 2)),
                     ScanOptions(run_lemmas=True, lemma_length=50))
    first = run_scan(spec)
    csvs = {report.scan_csv(first), report.scan_csv(run_scan(spec)), report.scan_csv(run_scan(spec, workers=3))}
    thm1, thm3c = first.count("thm1"), first.count("thm3_with_thm1")
    ok = thm1 == 8 and thm3c == 0 and len(csvs) == 1
    assert criterion(7, ok, f"thm1 true in {thm1} (want 8), thm3 combined true in {thm3c} (want 0), "
                            f"{len(csvs)} distinct CSV outputs over 3 runs")


def test_c8_cli_contract(criterion, capsys):
    checks = []
    code = main(["check", "--theorem", "1", "--params", "1", "1", "1", "2", "2"])
    out = capsys.readouterr().out
    checks.append(code == 0 and "overall: true" in out)
    code = main(["check", "--theorem", "3", "--params", "1", "1", "1", "2", "2", "--json"])
    doc = json.loads(capsys.readouterr().out)
    failing = [p for p in doc["verdicts"][0]["parts"] if not p["satisfied"]]
    checks.append(code == 1 and not doc["overall"] and
                  (failing[0]["name"], failing[0]["lhs"], failing[0]["rhs"]) == ("d+e >= T2", "4", "18"))
    code = main(["coeffs", "--params", "1", "1", "1", "2", "2", "--n", "4"])
    checks.append(code == 0 and capsys.readouterr().out == "1, 1/4, 1/9, 1/16\n")

    # every rational in a JSON report re-parses to the exact value it came from
    p = ParameterSet.of(F(7, 5), F(29, 20), F(1, 3), F(11, 7), F(13, 4))
    main(["check", "--params", "7/5", "1.45", "1/3", "11/7", "13/4", "--json"])
    doc = json.loads(capsys.readouterr().out)
    report.validate(doc)
    roundtrip = all(
        (parse_rational(part["lhs"]), parse_rational(part["rhs"])) == (ref.lhs, ref.rhs)
        for v, ref_v in zip(doc["verdicts"], [f(p) for f in (thm1_predicate, thm2_predicate,
                                                              thm3_predicate, thm4_predicate)])
        for part, ref in zip(v["parts"], ref_v.parts)
    ) and tuple(parse_rational(doc["params"][k]) for k in "abcde") == p.as_tuple()
    checks.append(roundtrip)
    assert criterion(8, all(checks), f"examples/roundtrip: {checks}")
