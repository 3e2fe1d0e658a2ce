"""Exact coefficients of z*3F2(a,b,c;d,e;z) and related sequences.

Everything in this module works over :class:`fractions.Fraction`; nothing is
ever rounded.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

RationalLike = Union[Fraction, int, str]

DEFAULT_LEMMA_LENGTH = 200


class InvalidParameters(ValueError):
    """Raised when (a, b, c, d, e) fall outside the supported region."""


class Kind(str, enum.Enum):
    NORMALIZED = "normalized"
    ODD = "odd-embedded"
    ALEXANDER = "alexander"


def as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a Fraction, int or 'p/q' string")
    return Fraction(x)


def _is_pole(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


@dataclass(frozen=True)
class ParameterSet:
    """The five parameters of 3F2(a,b,c;d,e;z) as exact rationals.

    ``a, b, c`` must be positive and ``d, e`` may not be zero or a negative
    integer. The theorem predicates additionally require ``d, e > 0``; see
    :meth:`require_positive_denominators`.
    """

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction

    def __post_init__(self):
        for name in "abcde":
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        for name in "abc":
            if getattr(self, name) <= 0:
                raise InvalidParameters(f"{name} must be positive, got {getattr(self, name)}")
        for name in "de":
            if _is_pole(getattr(self, name)):
                raise InvalidParameters(
                    f"{name} may not be zero or a negative integer, got {getattr(self, name)}"
                )

    @classmethod
    def of(cls, *values: RationalLike) -> "ParameterSet":
        if len(values) != 5:
            raise InvalidParameters(f"expected 5 parameters, got {len(values)}")
        return cls(*values)

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d, self.e)

    def require_positive_denominators(self) -> None:
        if self.d <= 0 or self.e <= 0:
            raise InvalidParameters(f"theorem predicates need d, e > 0, got d={self.d}, e={self.e}")


def pochhammer(x: RationalLike, n: int) -> Fraction:
    """Rising factorial x(x+1)...(x+n-1); equal to 1 when n == 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = as_fraction(x)
    out = Fraction(1)
    for k in range(n):
        out *= x + k
    return out


def coefficient(params: ParameterSet, n: int) -> Fraction:
    """Taylor coefficient A_n of z*3F2 (A_1 = 1), from Pochhammer products."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b, c, d, e = params.as_tuple()
    m = n - 1
    num = pochhammer(a, m) * pochhammer(b, m) * pochhammer(c, m)
    den = pochhammer(d, m) * pochhammer(e, m) * pochhammer(1, m)
    return num / den


def coefficient_ratio(params: ParameterSet, n: int) -> Fraction:
    """A_{n+1} / A_n in closed form."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b, c, d, e = params.as_tuple()
    return (a + n - 1) * (b + n - 1) * (c + n - 1) / ((d + n - 1) * (e + n - 1) * n)


def ratio_factors(params: ParameterSet, kind: Kind) -> list[tuple[Fraction, Fraction]]:
    """Shifts (p, q) with values[k+1]/values[k] = prod (k+p)/(k+q), k >= 1.

    Index k counts stored values (so for the odd embedding it is the index of
    the coefficient of z^(2k-1)). Each factor is monotone in k, which is what
    the analytic tail bounds rely on.
    """
    a, b, c, d, e = params.as_tuple()
    factors = [(a - 1, d - 1), (b - 1, e - 1), (c - 1, Fraction(0))]
    if Kind(kind) is Kind.ALEXANDER:
        factors.append((Fraction(0), Fraction(1)))
    return factors


@dataclass(frozen=True)
class CoefficientSequence:
    """Prefix A_1..A_N of a normalized series.

    ``values[k-1]`` is the coefficient of z^k for the normalized and
    Alexander kinds and of z^(2k-1) for the odd embedding. ``params`` is
    ``None`` for hand-built sequences (treated as polynomials downstream).
    """

    values: tuple[Fraction, ...]
    kind: Kind = Kind.NORMALIZED
    params: Optional[ParameterSet] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_fraction(v) for v in self.values))
        object.__setattr__(self, "kind", Kind(self.kind))

    @classmethod
    def from_values(cls, values: Iterable[RationalLike], kind: Kind = Kind.NORMALIZED):
        return cls(tuple(values), kind)

    def __len__(self) -> int:
        return len(self.values)

    def exponent(self, k: int) -> int:
        """Power of z carried by the k-th stored value (1-based)."""
        return 2 * k - 1 if self.kind is Kind.ODD else k

    def weighted(self) -> list[Fraction]:
        """The chain {n A_n} (or {(2k-1) A_{2k-1}} for the odd embedding)."""
        return [self.exponent(k) * v for k, v in enumerate(self.values, start=1)]


@dataclass(frozen=True)
class DifferenceSequence:
    base: CoefficientSequence
    values: tuple[Fraction, ...]


def build_sequence(params: ParameterSet, N: int, kind: Kind = Kind.NORMALIZED) -> CoefficientSequence:
    """First N stored coefficients, one ratio multiplication per step."""
    if N < 2:
        raise ValueError("N must be >= 2")
    kind = Kind(kind)
    values = [Fraction(1)]
    for n in range(1, N):
        values.append(values[-1] * coefficient_ratio(params, n))
    if kind is Kind.ALEXANDER:
        values = [v / n for n, v in enumerate(values, start=1)]
    return CoefficientSequence(tuple(values), kind, params)


def hadamard(s1: Sequence[RationalLike], s2: Sequence[RationalLike]) -> list[Fraction]:
    """Entrywise (Hadamard) product of two coefficient lists."""
    if len(s1) != len(s2):
        raise ValueError(f"length mismatch: {len(s1)} != {len(s2)}")
    return [as_fraction(x) * as_fraction(y) for x, y in zip(s1, s2)]


def difference_sequence(seq: CoefficientSequence) -> DifferenceSequence:
    """B_n = n A_n - (n+1) A_{n+1} for 1 <= n <= N-1 (odd kind uses 2n-1 weights)."""
    if len(seq) < 2:
        raise ValueError("need at least two coefficients")
    w = seq.weighted()
    return DifferenceSequence(seq, tuple(w[i] - w[i + 1] for i in range(len(w) - 1)))
