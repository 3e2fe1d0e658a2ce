"""Sufficient-condition predicates, lemma checkers and proof-polynomial audits.

The four theorem predicates evaluate the printed inequality systems exactly.
The lemma checkers test the monotonicity hypotheses of the Fejer and Ozaki
criteria on a finite exact prefix, and the audits compare each proof
polynomial against coefficient differences computed straight from the series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .series import (
    CoefficientSequence,
    Kind,
    ParameterSet,
    build_sequence,
)

THEOREMS = ("T1", "T2", "T3", "T4")

GE = ">="
LE = "<="


@dataclass(frozen=True)
class Part:
    name: str
    lhs: Fraction
    rhs: Fraction
    relation: str = GE

    @property
    def satisfied(self) -> bool:
        return self.lhs >= self.rhs if self.relation == GE else self.lhs <= self.rhs


@dataclass(frozen=True)
class PredicateVerdict:
    theorem: str
    params: ParameterSet
    parts: tuple[Part, ...]
    variant_flags: dict[str, bool] = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(p.satisfied for p in self.parts)

    def failing(self) -> list[Part]:
        return [p for p in self.parts if not p.satisfied]


@dataclass(frozen=True)
class LemmaVerdict:
    lemma: str
    holds: bool
    checked_length: int
    branch: Optional[str] = None
    first_violation_index: Optional[int] = None


@dataclass(frozen=True)
class AuditRow:
    n: int
    value: Fraction
    identity: bool

    @property
    def nonneg(self) -> bool:
        return self.value >= 0


@dataclass(frozen=True)
class ProofAuditReport:
    theorem: str
    params: ParameterSet
    n_range: tuple[int, int]
    rows: tuple[AuditRow, ...]
    # T4 only: whether the identity also holds with the denominator exactly as printed
    printed_denominator_ok: Optional[bool] = None

    @property
    def identity_ok(self) -> bool:
        return all(r.identity for r in self.rows)

    @property
    def nonnegativity(self) -> list[tuple[int, Fraction, bool]]:
        return [(r.n, r.value, r.nonneg) for r in self.rows]

    @property
    def all_nonneg(self) -> bool:
        return all(r.nonneg for r in self.rows)


# -- lemma checkers ---------------------------------------------------------

NON_INCREASING = "non-increasing"
NON_DECREASING = "non-decreasing-bounded-2"


def _first_chain_break(t: list[Fraction], decreasing: bool) -> Optional[int]:
    """1-based index of the first failing chain inequality, or None.

    Inequality n compares t_n with t_{n+1}; the end bounds (>= 0, or <= 2)
    on element n are also indexed n. ``t[0]`` is the leading 1 of the chain.
    """
    for i, v in enumerate(t):
        n = i + 1
        if decreasing and v < 0:
            return n
        if not decreasing and v > 2:
            return n
        if i + 1 < len(t):
            nxt = t[i + 1]
            if (decreasing and nxt > v) or (not decreasing and nxt < v):
                return n
    return None


def _ozaki_chains(lemma: str, t: list[Fraction]) -> LemmaVerdict:
    down = _first_chain_break(t, decreasing=True)
    if down is None:
        return LemmaVerdict(lemma, True, len(t), NON_INCREASING)
    up = _first_chain_break(t, decreasing=False)
    if up is None:
        return LemmaVerdict(lemma, True, len(t), NON_DECREASING)
    return LemmaVerdict(lemma, False, len(t), None, max(down, up))


def check_fejer(seq: CoefficientSequence) -> LemmaVerdict:
    """A_n >= 0 with {nA_n} and {nA_n - (n+1)A_{n+1}} both non-increasing."""
    if len(seq) < 3:
        raise ValueError("Fejer check needs at least three coefficients")
    t = seq.weighted()
    B = [t[i] - t[i + 1] for i in range(len(t) - 1)]
    first = None
    for i in range(len(t)):
        n = i + 1
        bad = seq.values[i] < 0
        if i < len(B):
            bad = bad or B[i] < 0
        if i + 1 < len(B):
            bad = bad or B[i] < B[i + 1]
        if bad:
            first = n
            break
    return LemmaVerdict("Fejer", first is None, len(seq), None, first)


def check_ozaki(seq: CoefficientSequence) -> LemmaVerdict:
    """Either 1 >= 2A_2 >= ... >= 0 or 1 <= 2A_2 <= ... <= 2 on the prefix."""
    if len(seq) < 2:
        raise ValueError("Ozaki check needs at least two coefficients")
    if seq.values[0] != 1:
        raise ValueError("Ozaki check expects A_1 = 1")
    return _ozaki_chains("Ozaki", seq.weighted())


def check_ozaki_odd(seq: CoefficientSequence) -> LemmaVerdict:
    """Odd-function variant: chains over (2n+1)A_{2n+1}."""
    if seq.kind is not Kind.ODD:
        raise ValueError(f"expected an odd-embedded sequence, got {seq.kind.value}")
    if len(seq) < 2:
        raise ValueError("Ozaki check needs at least two coefficients")
    if seq.values[0] != 1:
        raise ValueError("Ozaki check expects A_1 = 1")
    return _ozaki_chains("OzakiOdd", seq.weighted())


# -- theorem predicates -------------------------------------------------------

def _sym(params: ParameterSet):
    a, b, c, d, e = params.as_tuple()
    return a + b + c, a * b + b * c + a * c, a * b * c


def _checked(params: ParameterSet) -> ParameterSet:
    params.require_positive_denominators()
    return params


def thm1_predicate(params: ParameterSet) -> PredicateVerdict:
    a, b, c, d, e = _checked(params).as_tuple()
    s1, s2, p = _sym(params)
    return PredicateVerdict("T1", params, (
        Part("de >= 2abc", d * e, 2 * p),
        Part("d+e >= a+b+c", d + e, s1),
        Part("d+e >= (ab+bc+ca+2(a+b+c)-1-2abc)/2", d + e, (s2 + 2 * s1 - 1 - 2 * p) / 2),
        Part("d+e >= 2(ab+bc+ca)-3abc", d + e, 2 * s2 - 3 * p),
    ))


def alpha(a: Fraction, b: Fraction, c: Fraction) -> Fraction:
    s1, s2, p = a + b + c, a * b + b * c + a * c, a * b * c
    return (2 * s2 + 3 * s1 - 6 * p - 1) / 3


def thm2_predicate(params: ParameterSet) -> PredicateVerdict:
    a, b, c, d, e = _checked(params).as_tuple()
    s1, s2, p = _sym(params)
    return PredicateVerdict("T2", params, (
        Part("de >= 3abc", d * e, 3 * p),
        Part("d+e >= a+b+c", d + e, s1),
        Part("d+e >= alpha(a,b,c)", d + e, alpha(a, b, c)),
        Part("d+e >= 3(ab+bc+ca)-7abc", d + e, 3 * s2 - 7 * p),
    ))


# Polynomials below are transcribed term by term in the printed nesting so
# that they can be compared against the source line by line.

def thm3_T1(a, b, c, d, e):
    s = e + d - c - b - a
    return s * (s + 1)


def thm3_T2(a, b, c, d, e):
    s = e + d - c - b - a
    return (s + 1) * (2 * d * e + 5 * (e + d) - 2 * (a * b + b * c + a * c) - 5 * (c + b + a) + 2)


def thm3_T3(a, b, c, d, e):
    return (
        (d**2 + 9 * d + 9) * e**2
        + (9 * d**2
           + ((-2 * b - 2 * a - 8) * c + (-2 * a - 8) * b - 8 * a + 29) * d
           + ((-2 * a - 10) * b - 10 * a - 16) * c + (-10 * a - 16) * b - 16 * a + 15) * e
        + 9 * d**2
        + (((-2 * a - 10) * b - 10 * a - 16) * c + (-10 * a - 16) * b - 16 * a + 15) * d
        + (b**2 + (4 * a + 9) * b + a**2 + 9 * a + 7) * c**2
        + ((4 * a + 9) * b**2 + (4 * a**2 + 24 * a + 3) * b + 9 * a**2 + 3 * a - 11) * c
        + (a**2 + 9 * a + 7) * b**2 + (9 * a**2 + 3 * a - 11) * b + 7 * a**2 - 11 * a + 4
    )


def thm3_T4(a, b, c, d, e):
    return (
        (4 * d**2 + 14 * d + 7) * e**2
        + (14 * d**2
           + (((-2 * a - 8) * b - 8 * a - 8) * c + (-8 * a - 8) * b - 8 * a + 32) * d
           + ((-10 * a - 16) * b - 16 * a - 8) * c + (-16 * a - 8) * b - 8 * a + 11) * e
        + 7 * d**2
        + (((-10 * a - 16) * b - 16 * a - 8) * c + (-16 * a - 8) * b - 8 * a + 11) * d
        + ((2 * a + 4) * b**2 + (2 * a**2 + 16 * a + 10) * b + 4 * a**2 + 10 * a + 3) * c**2
        + ((2 * a**2 + 16 * a + 10) * b**2 + (16 * a**2 + 16 * a - 8) * b + 10 * a**2 - 8 * a - 5) * c
        + (4 * a**2 + 10 * a + 3) * b**2 + (10 * a**2 - 8 * a - 5) * b + 3 * a**2 - 5 * a + 2
    )


def thm3_T(a, b, c, d, e):
    p = a * b * c
    return (
        (2 * d**2 + 2 * d) * e**2 + (2 * d**2 + (2 - 8 * p) * d - 8 * p) * e - 8 * p * d
        + ((3 * a**2 + 3 * a) * b**2 + (3 * a**2 + 3 * a) * b) * c**2
        + ((3 * a**2 + 3 * a) * b**2 + (3 * a**2 - 5 * a) * b) * c
    )


def thm4_T1(a, b, c, d, e):
    s = e + d - c - b - a
    return (s + 1) * (s + 2)


def thm4_T2(a, b, c, d, e):
    s = e + d - c - b - a
    return 2 * (s + 2) * (d * e + 2 * e + 2 * d - b * c - a * c - c - a * b - b - a + 1)


def thm4_T3(a, b, c, d, e):
    return (
        (d**2 + 7 * d + 5) * e**2
        + (7 * d**2
           + ((-2 * b - 2 * a - 4) * c + (-2 * a - 4) * b - 4 * a + 21) * d
           + ((-2 * a - 6) * b - 6 * a - 4) * c + (-6 * a - 4) * b - 4 * a + 9) * e
        + 5 * d**2
        + (((-2 * a - 6) * b - 6 * a - 4) * c + (-6 * a - 4) * b - 4 * a + 9) * d
        + (b**2 + (4 * a + 3) * b + a**2 + 3 * a + 1) * c**2
        + ((4 * a + 3) * b**2 + (4 * a**2 + 4 * a - 5) * b + 3 * a**2 - 5 * a - 3) * c
        + (a**2 + 3 * a + 1) * b**2 + (3 * a**2 - 5 * a - 3) * b + a**2 - 3 * a + 2
    )


def thm4_T(a, b, c, d, e):
    p = a * b * c
    return (
        (2 * d**2 + 2 * d) * e**2 + (2 * d**2 + (2 - 4 * p) * d - 4 * p) * e - 4 * p * d
        + ((a**2 + a) * b**2 + (a**2 + a) * b) * c**2
        + ((a**2 + a) * b**2 + (a**2 - 3 * a) * b) * c
    )


def thm3_predicate(params: ParameterSet) -> PredicateVerdict:
    """Stated conditions; ``with_thm1`` adds the T1 conditions the proof relies on."""
    args = _checked(params).as_tuple()
    d, e = args[3], args[4]
    parts = tuple(
        Part(f"d+e >= T{i}", d + e, poly(*args))
        for i, poly in enumerate((thm3_T1, thm3_T2, thm3_T3, thm3_T4), start=1)
    ) + (Part("T >= 0", thm3_T(*args), Fraction(0)),)
    stated = all(p.satisfied for p in parts)
    flags = {"with_thm1": stated and thm1_predicate(params).overall}
    return PredicateVerdict("T3", params, parts, flags)


def thm4_predicate(params: ParameterSet) -> PredicateVerdict:
    """Stated conditions; ``proof_conditions`` are the extra hypotheses the proof uses."""
    args = _checked(params).as_tuple()
    d, e = args[3], args[4]
    s1, s2, p = _sym(params)
    parts = tuple(
        Part(f"d+e >= T{i}", d + e, poly(*args))
        for i, poly in enumerate((thm4_T1, thm4_T2, thm4_T3), start=1)
    ) + (Part("T >= 0", thm4_T(*args), Fraction(0)),)
    flags = {"proof_conditions": d * e >= p and d + e >= s2 - p}
    return PredicateVerdict("T4", params, parts, flags)


PREDICATES: dict[str, Callable[[ParameterSet], PredicateVerdict]] = {
    "T1": thm1_predicate,
    "T2": thm2_predicate,
    "T3": thm3_predicate,
    "T4": thm4_predicate,
}


def all_predicates(params: ParameterSet) -> dict[str, PredicateVerdict]:
    return {name: fn(params) for name, fn in PREDICATES.items()}


# -- proof polynomials --------------------------------------------------------

def _U1(a, b, c, d, e, n):
    return n * n * (e + n - 1) * (d + n - 1) - (n + 1) * (a + n - 1) * (b + n - 1) * (c + n - 1)


def _X(a, b, c, d, e, n):
    # numerator of (2n-1)A_{2n-1} - (2n+1)A_{2n+1} over A_{2n-1} / ((d+n-1)(e+n-1)n)
    return (2 * n - 1) * n * (d + n - 1) * (e + n - 1) - (2 * n + 1) * (a + n - 1) * (b + n - 1) * (c + n - 1)


def _P(a, b, c, d, e, n):
    return (
        n * n * (n + 1) * (d + n) * (d + n - 1) * (e + n) * (e + n - 1)
        - 2 * (n + 1) ** 2 * (d + n) * (e + n) * (a + n - 1) * (b + n - 1) * (c + n - 1)
        + (n + 2) * (a + n) * (a + n - 1) * (b + n) * (b + n - 1) * (c + n) * (c + n - 1)
    )


def _U4(a, b, c, d, e, n):
    return n * (d + n - 1) * (e + n - 1) - (a + n - 1) * (b + n - 1) * (c + n - 1)


def _C(a, b, c, d, e, n):
    return (
        _U4(a, b, c, d, e, n) * (d + n) * (e + n) * (n + 1)
        - _U4(a, b, c, d, e, n + 1) * (a + n - 1) * (b + n - 1) * (c + n - 1)
    )


_POLYS = {"T1": _U1, "T2": _X, "T3": _P, "T4": _C}


def _theorem(name) -> str:
    key = str(name).upper()
    if not key.startswith("T"):
        key = "T" + key
    if key not in _POLYS:
        raise ValueError(f"unknown theorem {name!r}")
    return key


def proof_poly(theorem, params: ParameterSet, n: int) -> Fraction:
    """U(n), X(n), P(n) or C(n) from the compact product forms."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Fraction(_POLYS[_theorem(theorem)](*params.as_tuple(), n))


def _denominator(theorem: str, params: ParameterSet, n: int, printed: bool = False) -> Fraction:
    a, b, c, d, e = params.as_tuple()
    if theorem in ("T1", "T2"):
        return (d + n - 1) * (e + n - 1) * n
    if theorem == "T3":
        return n * (n + 1) * (d + n) * (d + n - 1) * (e + n) * (e + n - 1)
    if printed:
        return (d + n - 1) * (c + n - 1) * (d + n) * (e + n) * (n + 1)
    return (d + n - 1) * (e + n - 1) * (d + n) * (e + n) * (n + 1)


def proof_identity_audit(theorem, params: ParameterSet, N: int) -> ProofAuditReport:
    """Check difference == A_n * poly(n) / denominator(n) exactly for n = 1..N."""
    if N < 2:
        raise ValueError("N must be >= 2")
    key = _theorem(theorem)
    params.require_positive_denominators()
    kind = {"T2": Kind.ODD, "T4": Kind.ALEXANDER}.get(key, Kind.NORMALIZED)
    second_order = key in ("T3", "T4")
    seq = build_sequence(params, N + (2 if second_order else 1), kind)
    t = seq.weighted()
    A = seq.values
    rows = []
    printed_ok = True if key == "T4" else None
    for n in range(1, N + 1):
        i = n - 1
        if second_order:
            diff = t[i] - 2 * t[i + 1] + t[i + 2]
        else:
            diff = t[i] - t[i + 1]
        value = proof_poly(key, params, n)
        rows.append(AuditRow(n, value, diff == A[i] * value / _denominator(key, params, n)))
        if key == "T4" and printed_ok:
            den = _denominator(key, params, n, printed=True)
            printed_ok = diff == A[i] * value / den
    return ProofAuditReport(key, params, (1, N), tuple(rows), printed_ok)
