"""Exact-rational sweeps over two-parameter slices of (a, b, c, d, e)."""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from .analytic import DEFAULT_GRID, DEFAULT_TOL, DiskEvidence, ks_star_evidence
from .criteria import (
    LemmaVerdict,
    PredicateVerdict,
    all_predicates,
    check_fejer,
    check_ozaki,
    check_ozaki_odd,
)
from .series import DEFAULT_LEMMA_LENGTH, InvalidParameters, Kind, ParameterSet, build_sequence

NAMES = ("a", "b", "c", "d", "e")

CLASSIFICATIONS = ("all-fail", "predicate-only", "predicate+empirical", "empirical-only", "invalid")

# condition name -> test on the four verdicts
TARGETS = {
    "thm1": lambda v: v["T1"].overall,
    "thm2": lambda v: v["T2"].overall,
    "thm3": lambda v: v["T3"].overall,
    "thm4": lambda v: v["T4"].overall,
    "thm3_with_thm1": lambda v: v["T3"].variant_flags["with_thm1"],
    "thm4_with_proof_conditions": lambda v: v["T4"].overall and v["T4"].variant_flags["proof_conditions"],
}


class SliceSpecError(ValueError):
    pass


@dataclass(frozen=True)
class Axis:
    name: str
    start: Fraction
    stop: Fraction
    steps: int

    def __post_init__(self):
        object.__setattr__(self, "start", Fraction(self.start))
        object.__setattr__(self, "stop", Fraction(self.stop))
        if self.name not in NAMES:
            raise SliceSpecError(f"unknown parameter {self.name!r}")
        if self.steps < 0:
            raise SliceSpecError("steps must be >= 0")
        # steps == 0 is the degenerate single-value axis and needs start == stop
        if self.steps == 0 and self.start != self.stop:
            raise SliceSpecError(f"axis {self.name}: steps=0 requires start == stop")
        if self.steps > 0 and not self.start < self.stop:
            raise SliceSpecError(f"axis {self.name}: start must be < stop")

    def values(self) -> list[Fraction]:
        if self.steps == 0:
            return [self.start]
        h = (self.stop - self.start) / self.steps
        return [self.start + k * h for k in range(self.steps + 1)]


@dataclass(frozen=True)
class ScanOptions:
    run_lemmas: bool = False
    lemma_length: int = DEFAULT_LEMMA_LENGTH
    run_disk: bool = False
    grid: tuple = DEFAULT_GRID
    tol: float = DEFAULT_TOL


@dataclass(frozen=True)
class SliceSpec:
    fixed: dict[str, Fraction]
    axes: tuple[Axis, Axis]
    options: ScanOptions = field(default_factory=ScanOptions)

    def __post_init__(self):
        object.__setattr__(self, "fixed", {k: Fraction(v) for k, v in self.fixed.items()})
        if len(self.axes) != 2:
            raise SliceSpecError("exactly two axes are required")
        names = list(self.fixed) + [ax.name for ax in self.axes]
        if sorted(names) != sorted(NAMES):
            raise SliceSpecError(f"fixed values and axes must cover a..e exactly once, got {names}")

    def points(self) -> Iterator[tuple[Fraction, ...]]:
        """Cells in row-major order: first axis outer, second axis inner."""
        ax1, ax2 = self.axes
        for x in ax1.values():
            for y in ax2.values():
                vals = dict(self.fixed)
                vals[ax1.name] = x
                vals[ax2.name] = y
                yield tuple(vals[n] for n in NAMES)

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(len(ax.values()) for ax in self.axes)


@dataclass(frozen=True)
class CellRecord:
    values: tuple[Fraction, ...]
    params: Optional[ParameterSet] = None
    verdicts: Optional[dict[str, PredicateVerdict]] = None
    lemma_results: Optional[dict[str, LemmaVerdict]] = None
    empirical: Optional[dict[str, DiskEvidence]] = None
    error: Optional[str] = None

    @property
    def predicate_pass(self) -> bool:
        return bool(self.verdicts) and any(v.overall for v in self.verdicts.values())

    @property
    def empirical_pass(self) -> Optional[bool]:
        """Disk evidence if it was run, otherwise the lemma checks, otherwise None."""
        if self.empirical:
            return all(ev.positive for ev in self.empirical.values())
        if self.lemma_results:
            return self.lemma_results["fejer"].holds and self.lemma_results["ozaki"].holds
        return None

    @property
    def classification(self) -> str:
        if self.verdicts is None:
            return "invalid"
        pred, emp = self.predicate_pass, bool(self.empirical_pass)
        if pred:
            return "predicate+empirical" if emp else "predicate-only"
        return "empirical-only" if emp else "all-fail"


@dataclass(frozen=True)
class ScanResult:
    spec: SliceSpec
    cells: tuple[CellRecord, ...]

    @property
    def summary(self) -> dict[str, int]:
        counts = Counter(c.classification for c in self.cells)
        return {k: counts.get(k, 0) for k in CLASSIFICATIONS}

    def count(self, target: str) -> int:
        test = TARGETS[target]
        return sum(1 for c in self.cells if c.verdicts is not None and test(c.verdicts))


def evaluate_cell(values: tuple[Fraction, ...], options: ScanOptions = ScanOptions()) -> CellRecord:
    try:
        params = ParameterSet(*values)
        verdicts = all_predicates(params)
    except InvalidParameters as exc:
        return CellRecord(values, error=str(exc))
    lemmas = None
    if options.run_lemmas:
        N = options.lemma_length
        seq = build_sequence(params, N)
        alex = build_sequence(params, N, Kind.ALEXANDER)
        lemmas = {
            "fejer": check_fejer(seq),
            "ozaki": check_ozaki(seq),
            "ozaki_odd": check_ozaki_odd(build_sequence(params, N, Kind.ODD)),
            "fejer_alexander": check_fejer(alex),
            "ozaki_alexander": check_ozaki(alex),
        }
    empirical = None
    if options.run_disk:
        ctc, star = ks_star_evidence(params, Kind.NORMALIZED, options.grid, options.tol)
        empirical = {"ctc_log": ctc, "starlike": star}
    return CellRecord(values, params, verdicts, lemmas, empirical)


def _evaluate_packed(args):
    return evaluate_cell(*args)


def run_scan(spec: SliceSpec, workers: int = 1) -> ScanResult:
    """Evaluate every cell; output order never depends on ``workers``."""
    points = list(spec.points())
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map() fills pre-indexed slots in submission order
            cells = list(pool.map(_evaluate_packed, [(p, spec.options) for p in points], chunksize=8))
    else:
        cells = [evaluate_cell(p, spec.options) for p in points]
    return ScanResult(spec, tuple(cells))


def find_satisfying(spec: SliceSpec, target: str) -> Optional[ParameterSet]:
    """First cell, in scan order, whose named condition holds."""
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}; choose from {sorted(TARGETS)}")
    test = TARGETS[target]
    for values in spec.points():
        try:
            params = ParameterSet(*values)
            verdicts = all_predicates(params)
        except InvalidParameters:
            continue
        if test(verdicts):
            return params
    return None
