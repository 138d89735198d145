"""Truncated generalized power series over the exact scalars.

A :class:`HahnSeries` is a finite sum ``sum_g a_g t^g`` with exponents in one
:class:`~hahnlog.valuegroup.ValueGroup` plus an optional truncation marker:
``precision = d`` means terms with exponent >= d (antilexicographically) are
unknown, ``precision = None`` means the finite sum is the whole element.

Every identity produced by a series expansion (inversion, rational powers,
the logarithmic / exponential / binomial series) holds *to the stated
precision*; this is the documented gap between these truncated elements and
a fully non-archimedean field.  Expansion length is governed by a term
budget derived from the valuation of the expanded part, because a single
exponent bound cannot cap a geometric series whose valuation sits in a lower
archimedean class.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .errors import (
    DomainError,
    NonPositiveLeading,
    NonRationalLeading,
    NotRepresentable,
    OutsideDomain,
    ParseError,
    ZeroToPrecision,
)
from .scalars import (
    Ordering,
    SymbolicReal,
    compare,
    evaluate,
    log_of_rational,
    lookup_constant,
    parse_scalar,
    rational_power,
)
from .valuegroup import GroupElement, ValueGroup

__all__ = [
    "HahnSeries",
    "LeadingDecomposition",
    "partial_log",
    "partial_exp",
    "compare_series",
    "parse_series",
    "DEFAULT_TRUNCATION",
]

#: Default expansion depth: series expansions run until the accumulated
#: exponent reaches about this many units of the leading coordinate.
DEFAULT_TRUNCATION = 8

ScalarLike = SymbolicReal | Fraction | int | str


def _scalar(value: ScalarLike) -> SymbolicReal:
    if isinstance(value, SymbolicReal):
        return value
    if isinstance(value, str):
        return parse_scalar(value)
    return SymbolicReal.from_fraction(value)


def _min_exp(a: GroupElement | None, b: GroupElement | None) -> GroupElement | None:
    """Minimum of two exponent bounds, with None acting as +infinity."""
    if a is None:
        return b
    if b is None:
        return a
    return a if a.compare(b) is not Ordering.GT else b


class HahnSeries:
    """Truncated series with scalar coefficients and group exponents."""

    __slots__ = ("group", "_terms", "_support", "precision")

    def __init__(
        self,
        group: ValueGroup,
        terms: dict[GroupElement, SymbolicReal] | None = None,
        precision: GroupElement | None = None,
    ):
        self.group = group
        self.precision = precision
        kept: dict[GroupElement, SymbolicReal] = {}
        for exp, coeff in (terms or {}).items():
            if coeff.is_zero():
                continue
            if precision is not None and exp.compare(precision) is not Ordering.LT:
                continue
            kept[exp] = coeff
        self._terms = kept
        self._support = tuple(sorted(kept, key=group.sort_key()))

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, group: ValueGroup) -> "HahnSeries":
        return cls(group)

    @classmethod
    def one(cls, group: ValueGroup) -> "HahnSeries":
        return cls.constant(group, 1)

    @classmethod
    def constant(cls, group: ValueGroup, value: ScalarLike) -> "HahnSeries":
        return cls(group, {group.zero(): _scalar(value)})

    @classmethod
    def monomial(
        cls, group: ValueGroup, exponent: GroupElement, coeff: ScalarLike = 1
    ) -> "HahnSeries":
        return cls(group, {exponent: _scalar(coeff)})

    @classmethod
    def generator_monomial(cls, group: ValueGroup, i: int) -> "HahnSeries":
        """The monomial ``t^(g_i)`` for the i-th group generator."""
        return cls.monomial(group, group.generator_element(i))

    # -- structure -----------------------------------------------------------

    @property
    def support(self) -> tuple[GroupElement, ...]:
        return self._support

    def coeff(self, exponent: GroupElement) -> SymbolicReal:
        return self._terms.get(exponent, SymbolicReal.zero())

    def items(self) -> Iterable[tuple[GroupElement, SymbolicReal]]:
        return ((e, self._terms[e]) for e in self._support)

    def is_exact(self) -> bool:
        return self.precision is None

    def is_exact_zero(self) -> bool:
        return not self._terms and self.precision is None

    def is_zero_to_precision(self) -> bool:
        return not self._terms and self.precision is not None

    def has_visible_terms(self) -> bool:
        return bool(self._terms)

    def as_scalar(self) -> SymbolicReal:
        """The scalar value of an exact series supported at exponent zero."""
        if self.precision is not None:
            raise ZeroToPrecision(f"{self} is truncated, not a scalar")
        if not self._terms:
            return SymbolicReal.zero()
        if len(self._terms) == 1 and self._support[0].is_zero():
            return self._terms[self._support[0]]
        raise NotRepresentable(f"{self} is not a scalar constant")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HahnSeries):
            return NotImplemented
        return (
            self.group == other.group
            and self._terms == other._terms
            and self.precision == other.precision
        )

    def __hash__(self) -> int:
        return hash((self.group.signature, frozenset(self._terms.items()), self.precision))

    # -- precision bookkeeping -------------------------------------------------

    def _vlow(self) -> GroupElement | None:
        """Lower bound on the valuation: min exponent, else the truncation
        bound, else None for the exact zero (treated as +infinity)."""
        if self._terms:
            return self._support[0]
        return self.precision

    def with_precision(self, bound: GroupElement | None) -> "HahnSeries":
        return HahnSeries(self.group, self._terms, _min_exp(self.precision, bound))

    # -- ring operations --------------------------------------------------------

    def _check_group(self, other: "HahnSeries") -> None:
        if self.group != other.group:
            raise ValueError("series over different value groups")

    def __add__(self, other: "HahnSeries") -> "HahnSeries":
        self._check_group(other)
        terms = dict(self._terms)
        for exp, coeff in other._terms.items():
            acc = terms.get(exp)
            terms[exp] = coeff if acc is None else acc + coeff
        return HahnSeries(self.group, terms, _min_exp(self.precision, other.precision))

    def __neg__(self) -> "HahnSeries":
        return HahnSeries(
            self.group, {e: -c for e, c in self._terms.items()}, self.precision
        )

    def __sub__(self, other: "HahnSeries") -> "HahnSeries":
        return self + (-other)

    def __mul__(self, other: "HahnSeries") -> "HahnSeries":
        self._check_group(other)
        if self.is_exact_zero() or other.is_exact_zero():
            return HahnSeries.zero(self.group)
        precision: GroupElement | None = None
        if self.precision is not None:
            low = other._vlow()
            precision = _min_exp(precision, self.precision + low if low is not None else None)
        if other.precision is not None:
            low = self._vlow()
            precision = _min_exp(precision, other.precision + low if low is not None else None)
        terms: dict[GroupElement, SymbolicReal] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exp = e1 + e2
                product = c1 * c2
                acc = terms.get(exp)
                terms[exp] = product if acc is None else acc + product
        return HahnSeries(self.group, terms, precision)

    def __pow__(self, n: int) -> "HahnSeries":
        if n < 0:
            return self.invert() ** (-n)
        result = HahnSeries.one(self.group)
        for _ in range(n):
            result = result * self
        return result

    def scale(self, value: ScalarLike) -> "HahnSeries":
        s = _scalar(value)
        if s.is_zero():
            return HahnSeries.zero(self.group)
        return HahnSeries(
            self.group, {e: c * s for e, c in self._terms.items()}, self.precision
        )

    def scale_div(self, value: ScalarLike) -> "HahnSeries":
        """Divide every coefficient by a scalar, exactly."""
        s = _scalar(value)
        if s.is_zero():
            raise ZeroDivisionError("division of a series by scalar zero")
        if s.is_rational():
            return self.scale(1 / s.rational_value())
        terms = {}
        for e, c in self._terms.items():
            q = c.divide_exact(s)
            if q is None:
                raise NotRepresentable(
                    f"coefficient {c} is not divisible by {s} in the scalar ring"
                )
            terms[e] = q
        return HahnSeries(self.group, terms, self.precision)

    def shift(self, exponent: GroupElement) -> "HahnSeries":
        """Multiply by the monomial ``t^exponent`` (exact)."""
        return HahnSeries(
            self.group,
            {e + exponent: c for e, c in self._terms.items()},
            None if self.precision is None else self.precision + exponent,
        )

    # -- valuation-side operations ----------------------------------------------

    def valuation(self) -> GroupElement:
        if self._terms:
            return self._support[0]
        if self.precision is not None:
            raise ZeroToPrecision(
                f"no visible terms below the truncation bound {self.precision.render()}"
            )
        raise DomainError("the exact zero series has no valuation")

    def leading(self) -> tuple[GroupElement, SymbolicReal]:
        exp = self.valuation()
        return exp, self._terms[exp]

    def sign(self) -> int:
        """Sign of the element: sign of the leading coefficient."""
        if self.is_exact_zero():
            return 0
        exp, coeff = self.leading()
        return compare(coeff, SymbolicReal.zero()).value

    def decompose(self) -> "LeadingDecomposition":
        """Write a positive element as ``a * t^gamma * (1 + h)`` with v(h) > 0."""
        exp, coeff = self.leading()
        if compare(coeff, SymbolicReal.zero()) is not Ordering.GT:
            raise NonPositiveLeading(f"leading coefficient {coeff} is not positive")
        unit = self.shift(-exp).scale_div(coeff)
        h = unit - HahnSeries.one(self.group)
        return LeadingDecomposition(coeff, exp, h)

    def invert(self, depth: int = DEFAULT_TRUNCATION) -> "HahnSeries":
        """Multiplicative inverse, exact for monomials, else via the
        geometric series truncated at the working depth."""
        exp, coeff = self.leading()
        h = self.shift(-exp).scale_div(coeff) - HahnSeries.one(self.group)
        geometric = _sum_series(h, lambda n: Fraction(-1) ** n, depth, self.group)
        return geometric.scale_div(coeff).shift(-exp)

    def power(self, r: Fraction | int, depth: int = DEFAULT_TRUNCATION) -> "HahnSeries":
        """Rational power of a positive element.

        Integer exponents reduce to products and inverses (and are exact on
        exact inputs); fractional exponents use the leading decomposition and
        the binomial series.  The leading coefficient must be rational, or a
        product of constants carrying declared logarithms, for ``a^r`` to be
        representable.
        """
        r = Fraction(r)
        if r.denominator == 1:
            return self ** r.numerator
        decomposition = self.decompose()
        lead = _scalar_fractional_power(decomposition.coefficient, r)
        binomial = _binomial_coefficients(r)
        unit = _sum_series(decomposition.unit_offset, binomial, depth, self.group)
        return unit.scale(lead).shift(decomposition.exponent.scale(r))

    # -- rendering ---------------------------------------------------------------

    def _exp_str(self, exponent: GroupElement) -> str:
        return "t^(" + ",".join(str(c) for c in exponent.coords) + ")"

    def render(self) -> str:
        pieces: list[tuple[int, str]] = []
        for exp in self._support:
            coeff = self._terms[exp]
            if exp.is_zero():
                text = coeff.render()
                if coeff.is_rational():
                    q = coeff.rational_value()
                    pieces.append((1 if q > 0 else -1, str(abs(q))))
                else:
                    pieces.append((1, f"({text})"))
            elif coeff.is_rational():
                q = coeff.rational_value()
                pieces.append((1 if q > 0 else -1, f"{abs(q)}*{self._exp_str(exp)}"))
            else:
                pieces.append((1, f"({coeff.render()})*{self._exp_str(exp)}"))
        if self.precision is not None:
            pieces.append((1, f"O({self._exp_str(self.precision)})"))
        if not pieces:
            return "0"
        out = []
        for i, (s, text) in enumerate(pieces):
            if i == 0:
                out.append(text if s > 0 else f"-{text}")
            else:
                out.append(f"+ {text}" if s > 0 else f"- {text}")
        return " ".join(out)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"HahnSeries({self.render()})"


@dataclass(frozen=True)
class LeadingDecomposition:
    """``x = coefficient * t^exponent * (1 + unit_offset)`` with positive
    coefficient and infinitesimal offset."""

    coefficient: SymbolicReal
    exponent: GroupElement
    unit_offset: HahnSeries

    def reconstruct(self) -> HahnSeries:
        group = self.unit_offset.group
        unit = HahnSeries.one(group) + self.unit_offset
        return unit.scale(self.coefficient).shift(self.exponent)


# ---------------------------------------------------------------------------
# Truncated elementary series.
# ---------------------------------------------------------------------------


def _expansion_budget(h: HahnSeries, depth: int) -> int:
    """Number of powers of ``h`` to accumulate so that the first omitted
    power has its leading coordinate at roughly ``depth``."""
    v = h.valuation()
    j = v.arch_index()
    lead = v.real_vector()[j - 1]
    if lead.is_rational():
        lower = lead.rational_value()
    else:
        width = Fraction(1, 16)
        while True:
            enclosure = evaluate(lead, width)
            if enclosure.lo > 0:
                lower = enclosure.lo
                break
            width /= 16
    ratio = Fraction(depth) / lower
    budget = ratio.numerator // ratio.denominator
    if ratio != budget:
        budget += 1
    return max(1, budget)


def _sum_series(
    h: HahnSeries,
    coefficient: Callable[[int], Fraction],
    depth: int,
    group: ValueGroup,
) -> HahnSeries:
    """``sum_n coefficient(n) h^n`` truncated after the working budget.

    Requires ``v(h) > 0`` (checked by the callers through decomposition);
    the result carries precision ``budget * v(h)`` unless the inputs force a
    tighter bound.
    """
    c0 = coefficient(0)
    head = HahnSeries.constant(group, c0) if c0 else HahnSeries.zero(group)
    if h.is_exact_zero():
        return head
    if h.is_zero_to_precision():
        return head.with_precision(h.precision)
    v = h.valuation()
    if v.compare(h.group.zero()) is not Ordering.GT:
        raise OutsideDomain(f"series argument is not infinitesimal: v = {v.render()}")
    budget = _expansion_budget(h, depth)
    total = head
    power = HahnSeries.one(group)
    for n in range(1, budget):
        power = power * h
        if not power.has_visible_terms():
            break
        c = coefficient(n)
        if c:
            total = total + power.scale(c)
    return total.with_precision(v.scale(budget))


def _log_coefficients(n: int) -> Fraction:
    if n == 0:
        return Fraction(0)
    return Fraction((-1) ** (n + 1), n)


def _exp_coefficients() -> Callable[[int], Fraction]:
    cache = [Fraction(1)]

    def coefficient(n: int) -> Fraction:
        while len(cache) <= n:
            cache.append(cache[-1] / len(cache))
        return cache[n]

    return coefficient


def _binomial_coefficients(r: Fraction) -> Callable[[int], Fraction]:
    cache = [Fraction(1)]

    def coefficient(n: int) -> Fraction:
        while len(cache) <= n:
            k = len(cache) - 1
            cache.append(cache[-1] * (r - k) / (k + 1))
        return cache[n]

    return coefficient


def _scalar_log(a: SymbolicReal) -> SymbolicReal:
    """Logarithm of a positive leading coefficient inside the scalar ring.

    Rationals factor through the primes; a single monomial works when every
    constant in it carries a declared logarithm (as the root constants do).
    """
    if a.is_rational():
        q = a.rational_value()
        if q <= 0:
            raise NonPositiveLeading(f"leading coefficient {q} is not positive")
        return log_of_rational(q)
    entries = list(a.items())
    if len(entries) == 1:
        mono, coeff = entries[0]
        if coeff > 0:
            total = log_of_rational(coeff)
            for name, power in mono:
                symbol = lookup_constant(name)
                if symbol.log_value is None or symbol.positive is not True:
                    raise NonRationalLeading(
                        f"constant {name} has no declared logarithm"
                    )
                total = total + symbol.log_value.scale(power)
            return total
    raise NonRationalLeading(f"no logarithm for leading coefficient {a}")


def _scalar_fractional_power(a: SymbolicReal, r: Fraction) -> SymbolicReal:
    if a.is_rational():
        return rational_power(a.rational_value(), r)
    raise NotRepresentable(f"({a})^{r} is not representable in the scalar ring")


def _scalar_exp(a: SymbolicReal) -> SymbolicReal:
    """Exponential of a scalar that is a rational combination of log-primes."""
    if a.is_zero():
        return SymbolicReal.one()
    result = SymbolicReal.one()
    for mono, coeff in a.items():
        if len(mono) != 1 or mono[0][1] != 1:
            raise OutsideDomain(f"no exponential representation for {a}")
        name = mono[0][0]
        m = re.fullmatch(r"log\((\d+)\)", name)
        if not m:
            raise OutsideDomain(f"no exponential representation for {a}")
        result = result * rational_power(Fraction(int(m.group(1))), coeff)
    return result


def partial_log(x: HahnSeries, depth: int = DEFAULT_TRUNCATION) -> HahnSeries:
    """Logarithm on the multiplicative group of units with valuation zero.

    ``x`` must have valuation 0 and a leading coefficient whose logarithm
    exists in the scalar ring; the result is ``log(a) + L(h)`` for
    ``x = a (1 + h)`` with the logarithmic series ``L`` truncated to the
    working depth.  Multiplicative on its domain, to precision.
    """
    v = x.valuation()
    if not v.is_zero():
        raise OutsideDomain(f"partial logarithm needs valuation 0, got {v.render()}")
    a = x.coeff(v)
    log_a = _scalar_log(a)
    h = x.scale_div(a) - HahnSeries.one(x.group)
    series = _sum_series(h, _log_coefficients, depth, x.group)
    return series + HahnSeries.constant(x.group, log_a)


def partial_exp(x: HahnSeries, depth: int = DEFAULT_TRUNCATION) -> HahnSeries:
    """Exponential on the bounded elements; inverse of :func:`partial_log`.

    The constant part must be zero or a rational combination of log-prime
    constants (so its exponential is an exact product of rational powers).
    """
    if x.is_exact_zero():
        return HahnSeries.one(x.group)
    zero = x.group.zero()
    if x.has_visible_terms():
        if x.valuation().compare(zero) is Ordering.LT:
            raise OutsideDomain("exponential requires a bounded element (v >= 0)")
    if x.precision is not None and x.precision.compare(zero) is not Ordering.GT:
        raise ZeroToPrecision("constant part hidden below the truncation bound")
    a = x.coeff(zero)
    exp_a = _scalar_exp(a)
    m = x - HahnSeries.constant(x.group, a)
    series = _sum_series(m, _exp_coefficients(), depth, x.group)
    return series.scale(exp_a)


# ---------------------------------------------------------------------------
# Comparison.
# ---------------------------------------------------------------------------


def compare_series(x: HahnSeries, y: HahnSeries) -> Ordering:
    """Sign of ``x - y``: EQ only for exactly equal elements; raises
    :class:`ZeroToPrecision` when the difference hides below a truncation."""
    d = x - y
    if d.is_exact_zero():
        return Ordering.EQ
    s = d.sign()  # raises ZeroToPrecision when invisible
    return Ordering.GT if s > 0 else Ordering.LT


def eq_to_precision(x: HahnSeries, y: HahnSeries) -> bool:
    """True when ``x - y`` has no visible terms (agreement on displayed terms)."""
    return not (x - y).has_visible_terms()


# ---------------------------------------------------------------------------
# Parsing of the canonical text form.
# ---------------------------------------------------------------------------


def _split_top_level(text: str) -> list[tuple[int, str, int]]:
    """Split on top-level +/- signs, returning (sign, piece, offset)."""
    pieces: list[tuple[int, str, int]] = []
    depth = 0
    sign = 1
    start = 0
    i = 0
    first = True
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0:
            if first and text[:i].strip() == "":
                sign = 1 if ch == "+" else -1
                start = i + 1
                first = False
                i += 1
                continue
            piece = text[start:i].strip()
            if piece:
                pieces.append((sign, piece, start))
            sign = 1 if ch == "+" else -1
            start = i + 1
        i += 1
        if ch not in " \t":
            first = False
    piece = text[start:].strip()
    if piece:
        pieces.append((sign, piece, start))
    return pieces


def parse_series(text: str, group: ValueGroup) -> HahnSeries:
    """Parse the canonical series text form (inverse of :meth:`HahnSeries.render`)."""
    text = text.strip()
    if text == "0":
        return HahnSeries.zero(group)
    terms: dict[GroupElement, SymbolicReal] = {}
    precision: GroupElement | None = None

    def parse_exponent(body: str, offset: int) -> GroupElement:
        try:
            coords = [Fraction(part) for part in body.split(",")] if body else []
        except ValueError:
            raise ParseError(f"bad exponent {body!r}", (offset, offset + len(body)))
        if len(coords) != group.num_generators:
            raise ParseError(
                f"exponent {body!r} needs {group.num_generators} coordinates",
                (offset, offset + len(body)),
            )
        return group.element(coords)

    for sign_value, piece, offset in _split_top_level(text):
        if piece.startswith("O(t^(") and piece.endswith("))"):
            precision = parse_exponent(piece[5:-2], offset + 5)
            continue
        marker = piece.find("t^(")
        if marker == -1:
            scalar = parse_scalar(piece[1:-1] if piece.startswith("(") else piece)
            exp = group.zero()
        else:
            if not piece.endswith(")"):
                raise ParseError(f"bad series term {piece!r}", (offset, offset + len(piece)))
            exp = parse_exponent(piece[marker + 3 : -1], offset + marker + 3)
            coeff_text = piece[:marker].rstrip()
            if coeff_text.endswith("*"):
                coeff_text = coeff_text[:-1].rstrip()
            if not coeff_text:
                scalar = SymbolicReal.one()
            elif coeff_text.startswith("(") and coeff_text.endswith(")"):
                scalar = parse_scalar(coeff_text[1:-1])
            else:
                scalar = parse_scalar(coeff_text)
        scalar = scalar.scale(sign_value) if sign_value < 0 else scalar
        acc = terms.get(exp)
        terms[exp] = scalar if acc is None else acc + scalar
    return HahnSeries(group, terms, precision)
