"""Certified numerical evaluation of the series and disk-sampled functionals.

Coefficients enter as exact rationals and are carried as arb balls at
``WORKING_PREC`` bits from then on, so rounding error is tracked alongside
the truncation tail.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from flint import acb, acb_poly, arb, arb_poly, ctx, fmpq

from .series import CoefficientSequence, Kind, ParameterSet, build_sequence, ratio_factors

WORKING_PREC = 128  # about 38 significant digits
DEFAULT_TOL = 1e-12
DEFAULT_GRID = (64, 256, Fraction(95, 100))
MAX_RMAX = Fraction(99, 100)
STARLIKE_ORIGIN_RADIUS = Fraction(1, 10**8)
ROUNDING_UNIT = Fraction(1, 2 ** (WORKING_PREC - 1))

FUNCTIONALS = ("ctc_log", "ctc_atanh", "starlike")


class TailBoundError(ArithmeticError):
    """The geometric tail bound did not reach the tolerance within the term cap."""


class DegenerateGridError(ValueError):
    """Every grid node was skipped."""


def max_terms() -> int:
    return int(os.environ.get("HYPGEO_MAX_TERMS", "100000"))


def _fmpq(x) -> fmpq:
    x = Fraction(x)
    return fmpq(x.numerator, x.denominator)


def _exact(x: arb) -> Fraction:
    """Midpoint of a ball as an exact rational."""
    man, exp = x.mid().man_exp()
    man, exp = int(man), int(exp)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def _upper(x: arb) -> float:
    return math.nextafter(float(x.upper()), math.inf)


def _rational_upper(x: arb) -> Fraction:
    return _exact(x.upper()) + Fraction(1, 2 ** (WORKING_PREC + 8))


def as_rational(x) -> Fraction:
    """Exact rational for grid settings; floats go through their repr."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class ComplexPoint:
    """A point of the unit disk with arb coordinates."""

    re: arb
    im: arb

    @classmethod
    def of(cls, z) -> "ComplexPoint":
        if isinstance(z, ComplexPoint):
            return z
        with ctx.workprec(WORKING_PREC):
            if isinstance(z, acb):
                return cls(z.real, z.imag)
            if isinstance(z, complex):
                return cls(arb(z.real), arb(z.imag))
            if isinstance(z, tuple):
                re, im = z
                return cls(arb(_fmpq(as_rational(re))), arb(_fmpq(as_rational(im))))
            return cls(arb(_fmpq(as_rational(z))), arb(0))

    @classmethod
    def polar(cls, r: Fraction, j: int, n_theta: int) -> "ComplexPoint":
        """Midpoint of r * exp(2 pi i j / n_theta) at working precision."""
        with ctx.workprec(WORKING_PREC):
            s, c = arb(fmpq(2 * j, n_theta)).sin_cos_pi()
            R = arb(_fmpq(r))
            return cls((R * c).mid(), (R * s).mid())

    def to_acb(self) -> acb:
        return acb(self.re, self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re.mid()), float(self.im.mid()))


@dataclass(frozen=True)
class EvalResult:
    value: acb
    truncation_bound: float
    terms_used: int

    def __complex__(self) -> complex:
        return complex(float(self.value.real), float(self.value.imag))


@dataclass(frozen=True)
class DiskEvidence:
    functional: str
    grid: tuple[int, int, Fraction]
    min_value: float
    argmin: ComplexPoint
    argmin_index: tuple[int, int]  # (radius index 1..n_r, angle index 0..n_theta-1)
    error_budget: float
    skipped: int = 0

    @property
    def positive(self) -> bool:
        return self.min_value - self.error_budget > 0


class SeriesTerms:
    """Arb coefficients of one series, extended on demand by the ratio recurrence.

    Writes ``f(z) = z g(w)`` with ``w = z`` (``z**2`` for the odd embedding),
    ``g(w) = sum_k c_k w**(k-1)`` and ``f'(z) = sum_k m_k c_k w**(k-1)``,
    ``m_k`` being the power of z carried by term k. Sequences without
    parameters are treated as polynomials.
    """

    def __init__(self, seq: CoefficientSequence):
        self.odd = seq.kind is Kind.ODD
        self.finite = seq.params is None
        self._factors = [] if self.finite else ratio_factors(seq.params, seq.kind)
        with ctx.workprec(WORKING_PREC):
            self.coeffs = [arb(_fmpq(v)) for v in seq.values]
            self._shifts = [(arb(_fmpq(p)), arb(_fmpq(q))) for p, q in self._factors]

    def exponent(self, k: int) -> int:
        return 2 * k - 1 if self.odd else k

    def extend(self, K: int) -> None:
        if self.finite:
            return
        with ctx.workprec(WORKING_PREC):
            c = self.coeffs
            while len(c) < K:
                k = len(c)
                nxt = c[-1]
                for p, q in self._shifts:
                    nxt = nxt * (k + p) / (k + q)
                c.append(nxt)

    def rho(self, K: int, derivative: bool) -> Optional[Fraction]:
        """Exact bound on the term ratio |t_{k+1}/t_k| for every k >= K.

        Each factor (k+p)/(k+q) is monotone in k with limit 1, so its
        supremum over k >= K is max(value at K, 1) once k+p, k+q > 0.
        None means K is not yet past the sign changes.
        """
        factors = list(self._factors)
        if derivative:
            factors.append((Fraction(1, 2), Fraction(-1, 2)) if self.odd else (Fraction(1), Fraction(0)))
        rho = Fraction(1)
        for p, q in factors:
            if K + p <= 0 or K + q <= 0:
                return None
            rho *= max((K + p) / (K + q), Fraction(1))
        return rho

    def tail(self, K: int, w_abs: Fraction, derivative: bool) -> Optional[arb]:
        """Bound on sum_{k>K} |m_k c_k| |w|**(k-1), or None if not yet certifiable."""
        if self.finite:
            return arb(0) if K >= len(self.coeffs) else None
        if w_abs == 0:
            return arb(0)
        rho = self.rho(K, derivative)
        if rho is None or rho * w_abs >= 1:
            return None
        self.extend(K)
        with ctx.workprec(WORKING_PREC):
            last = self.coeffs[K - 1].abs_upper()
            if derivative:
                last = last * self.exponent(K)
            q = arb(_fmpq(rho * w_abs))
            return last * arb(_fmpq(w_abs)) ** (K - 1) * q / (1 - q)

    def terms_for(self, w_abs: Fraction, tol: float, derivative: bool) -> tuple[int, arb]:
        if self.finite:
            return len(self.coeffs), arb(0)
        cap = max_terms()
        lo, hi = 1, 1
        # doubling search for a certifying K, then bisect back down
        while True:
            t = self.tail(hi, w_abs, derivative)
            if t is not None and t.upper() < tol:
                break
            if hi >= cap:
                raise TailBoundError(
                    f"tail bound above {tol:g} after {cap} terms at |w| = {float(w_abs):.6g}; "
                    "radius too close to 1 for this tolerance"
                )
            lo, hi = hi, min(2 * hi, cap)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            t = self.tail(mid, w_abs, derivative)
            if t is not None and t.upper() < tol:
                hi = mid
            else:
                lo = mid
        return hi, self.tail(hi, w_abs, derivative)

    def poly(self, K: int, derivative: bool) -> acb_poly:
        self.extend(K)
        with ctx.workprec(WORKING_PREC):
            if derivative:
                return acb_poly([self.exponent(k) * c for k, c in enumerate(self.coeffs[:K], start=1)])
            return acb_poly(self.coeffs[:K])

    def rounding_allowance(self, K: int, w_abs: Fraction, derivative: bool) -> arb:
        """Bound on the rounding error of a K-term evaluation taken at ball midpoints.

        Complex ball multiplication inflates radii geometrically (the wrapping
        effect), so results are read at their midpoints and charged the
        classical forward bound c K u sum |m_k c_k| |w|**(k-1) with a generous
        c, plus the coefficient radii themselves. The same bound absorbs a
        relative perturbation of w of a few units in the last place.
        """
        self.extend(K)
        with ctx.workprec(WORKING_PREC):
            x = arb(_fmpq(w_abs))
            m = [self.exponent(k) if derivative else 1 for k in range(1, K + 1)]
            absolute = arb_poly([mk * c.abs_upper() for mk, c in zip(m, self.coeffs)])(x)
            radii = arb_poly([mk * c.rad() for mk, c in zip(m, self.coeffs)])(x)
            return (absolute * (16 * (K + 2)) * arb(_fmpq(ROUNDING_UNIT)) + radii).upper()

    def evaluator(self, w_abs: Fraction, tol: float, derivative: bool):
        """(polynomial, error bound) valid for every |w| <= w_abs."""
        K, tail = self.terms_for(w_abs, tol, derivative)
        with ctx.workprec(WORKING_PREC):
            return self.poly(K, derivative), tail + self.rounding_allowance(K, w_abs, derivative), K


def _node(z) -> acb:
    """Exact-midpoint complex node."""
    return ComplexPoint.of(z).to_acb().mid()


def _abs_bound(z: acb) -> Fraction:
    r = _rational_upper(z.abs_upper())
    if r >= 1:
        raise ValueError("point must lie inside the unit disk")
    return r


def _w(terms: SeriesTerms, z: acb, z_abs: Fraction):
    return ((z * z).mid(), z_abs * z_abs) if terms.odd else (z, z_abs)


def eval_series(seq: CoefficientSequence, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """f(z) by partial sums, with a bound covering truncation and rounding.

    The point is taken at its working-precision midpoint.
    """
    with ctx.workprec(WORKING_PREC):
        zc = _node(z)
        z_abs = _abs_bound(zc)
        if zc.is_zero():
            return EvalResult(acb(0), 0.0, 1)
        terms = SeriesTerms(seq)
        w, w_abs = _w(terms, zc, z_abs)
        G, err, K = terms.evaluator(w_abs, tol, derivative=False)
        value = (zc * G(w).mid()).mid()
        # |f - z G| <= |z| err, plus one rounding in the final product
        bound = err * arb(_fmpq(z_abs)) + value.abs_upper() * arb(_fmpq(ROUNDING_UNIT)) * 4
        return EvalResult(value, _upper(bound), K)


def eval_derivative(seq: CoefficientSequence, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """f'(z) by termwise differentiation, with the analogous bound."""
    with ctx.workprec(WORKING_PREC):
        zc = _node(z)
        z_abs = _abs_bound(zc)
        if zc.is_zero():
            # f'(0) is the leading coefficient, exactly
            return EvalResult(acb(_fmpq(seq.values[0])), 0.0, 1)
        terms = SeriesTerms(seq)
        w, w_abs = _w(terms, zc, z_abs)
        D, err, K = terms.evaluator(w_abs, tol, derivative=True)
        return EvalResult(D(w).mid(), _upper(err), K)


def _check_grid(grid, functional: str):
    n_r, n_theta, r_max = grid
    r_max = as_rational(r_max)
    if functional not in FUNCTIONALS:
        raise ValueError(f"unknown functional {functional!r}; choose from {FUNCTIONALS}")
    if n_r < 1 or n_theta < 1:
        raise ValueError("n_r and n_theta must be >= 1")
    if not 0 < r_max <= MAX_RMAX:
        raise ValueError(f"r_max must lie in (0, {MAX_RMAX}]")
    return int(n_r), int(n_theta), r_max


def _ring(seq: CoefficientSequence, functional: str, i: int, n_r: int, n_theta: int,
          r_max: Fraction, tol: float):
    """Scan one circle. Returns (best value, best j, max error, skipped count)."""
    r = r_max * i / n_r
    with ctx.workprec(WORKING_PREC):
        terms = SeriesTerms(seq)
        w_abs = r * r if terms.odd else r
        D, err_d, _ = terms.evaluator(w_abs, tol, derivative=True)
        if functional == "starlike":
            G, err_g, _ = terms.evaluator(w_abs, tol, derivative=False)
        u4 = arb(_fmpq(ROUNDING_UNIT)) * 4
        best, best_j, err_max, skipped = None, None, 0.0, 0
        for j in range(n_theta):
            z = ComplexPoint.polar(r, j, n_theta).to_acb()
            w = (z * z).mid() if terms.odd else z
            if functional == "starlike":
                if r < STARLIKE_ORIGIN_RADIUS:
                    value, err = Fraction(1), 0.0
                else:
                    g = G(w).mid()
                    g_abs = g.abs_lower()
                    # |f(z)| = r |g(w)|
                    if g.abs_upper() * arb(_fmpq(r)) < 10 * tol or not g_abs > err_g:
                        skipped += 1
                        continue
                    dv = D(w).mid()
                    q = (dv / g).real
                    pert = (err_d * g.abs_upper() + dv.abs_upper() * err_g) / (g_abs * (g_abs - err_g))
                    value, err = _exact(q), _upper(pert + q.rad() + q.abs_upper() * u4)
            else:
                weight = 1 - z if functional == "ctc_log" else 1 - z * z
                v = (weight * D(w).mid()).real
                value, err = _exact(v), _upper(weight.abs_upper() * err_d + v.rad() + v.abs_upper() * u4)
            err_max = max(err_max, err)
            if best is None or value < best:
                best, best_j = value, j
    return best, best_j, err_max, skipped


def disk_minimum(seq: CoefficientSequence, functional: str, grid=DEFAULT_GRID,
                 tol: float = DEFAULT_TOL, workers: int = 1) -> DiskEvidence:
    """Minimum of a real-part functional over a polar grid in the disk.

    Nodes are z = r_i exp(2 pi i j / n_theta) with r_i = r_max i / n_r,
    i = 1..n_r. Ties go to the lexicographically smallest (i, j), so the
    result does not depend on ``workers``.
    """
    n_r, n_theta, r_max = _check_grid(grid, functional)
    args = [(seq, functional, i, n_r, n_theta, r_max, tol) for i in range(1, n_r + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rings = list(pool.map(_ring, *zip(*args)))
    else:
        rings = [_ring(*a) for a in args]
    best = None
    err_max, skipped = 0.0, 0
    for i, (value, j, err, sk) in enumerate(rings, start=1):
        err_max = max(err_max, err)
        skipped += sk
        if value is not None and (best is None or value < best[0]):
            best = (value, i, j)
    if best is None:
        raise DegenerateGridError("every grid node was skipped")
    value, i, j = best
    return DiskEvidence(
        functional=functional,
        grid=(n_r, n_theta, r_max),
        min_value=float(value),
        argmin=ComplexPoint.polar(r_max * i / n_r, j, n_theta),
        argmin_index=(i, j),
        error_budget=err_max,
        skipped=skipped,
    )


def series_for(params: ParameterSet, kind: Kind = Kind.NORMALIZED) -> CoefficientSequence:
    """Parameter-backed sequence whose terms the evaluator extends as needed."""
    return build_sequence(params, 2, kind)


def ks_star_evidence(params: ParameterSet, kind: Kind = Kind.NORMALIZED, grid=DEFAULT_GRID,
                     tol: float = DEFAULT_TOL, workers: int = 1) -> tuple[DiskEvidence, DiskEvidence]:
    """(close-to-convexity w.r.t. -log(1-z), starlikeness) evidence."""
    kind = Kind(kind)
    if kind is Kind.ODD:
        raise ValueError("KS* evidence is defined for the normalized or alexander series")
    seq = series_for(params, kind)
    return (
        disk_minimum(seq, "ctc_log", grid, tol, workers),
        disk_minimum(seq, "starlike", grid, tol, workers),
    )
