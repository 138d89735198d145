"""The ordered polynomial ring over a Hahn series field.

Elements are polynomials in ``X1 < ... < Xl`` (one variable per archimedean
class) with series coefficients.  Each variable stands for the logarithm of
an element that is infinitely large at its class, which forces the order:

* every variable exceeds all bounded series, yet every monomial in the
  variables stays below every infinitely large series — logarithms grow
  slower than any positive power;
* between two monomials the variable of the highest class wins, whatever
  the exponents, because the classes are separated multiplicatively:
  ``Xk^m < X(k+1)`` for every m.

Hence the sign of a nonzero element is read off in three steps: take the
minimal coefficient valuation (the most infinite series factor dominates
every polynomial in the variables), then among those coefficients the
antilexicographically largest monomial, then the sign of that coefficient's
leading term.  This is the unique ring order compatible with the generator
constraints above, and the inequalities are exercised directly by the test
suite (bounded < Xk, monomials < infinite elements, Xk^m < X(k+1)).
"""

from __future__ import annotations

import re
from typing import Iterable

from .errors import ParseError, ZeroToPrecision
from .hahnfield import HahnSeries, _split_top_level, parse_series
from .scalars import Ordering, SymbolicReal, compare
from .valuegroup import GroupElement, ValueGroup

__all__ = ["PolyElem", "InfinityMark", "INFINITY", "poly_compare", "parse_poly"]

Exponent = tuple[int, ...]


class InfinityMark:
    """Distinguished value larger than every polynomial; marks non-integrable
    measures and integrals."""

    _instance: "InfinityMark | None" = None

    def __new__(cls) -> "InfinityMark":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "infinity"

    def __str__(self) -> str:
        return "infinity"


INFINITY = InfinityMark()


def _anlex_key(exponent: Exponent) -> tuple[int, ...]:
    # antilex: the highest differing index decides, so reverse and compare lex
    return tuple(reversed(exponent))


class PolyElem:
    """Polynomial in the class variables with series coefficients."""

    __slots__ = ("group", "_coeffs")

    def __init__(self, group: ValueGroup, coeffs: dict[Exponent, HahnSeries] | None = None):
        self.group = group
        kept: dict[Exponent, HahnSeries] = {}
        for exponent, series in (coeffs or {}).items():
            if len(exponent) != group.rank:
                raise ValueError(
                    f"monomial {exponent} does not match rank {group.rank}"
                )
            if series.is_exact_zero():
                continue
            kept[exponent] = series
        self._coeffs = kept

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zero(cls, group: ValueGroup) -> "PolyElem":
        return cls(group)

    @classmethod
    def from_series(cls, series: HahnSeries) -> "PolyElem":
        return cls(series.group, {(0,) * series.group.rank: series})

    @classmethod
    def from_scalar(cls, group: ValueGroup, value) -> "PolyElem":
        return cls.from_series(HahnSeries.constant(group, value))

    @classmethod
    def variable(cls, group: ValueGroup, k: int, coeff: SymbolicReal | None = None) -> "PolyElem":
        """The variable ``Xk`` (1-based), optionally scaled by a scalar."""
        if not 1 <= k <= group.rank:
            raise ValueError(f"variable index {k} outside 1..{group.rank}")
        exponent = tuple(1 if i == k - 1 else 0 for i in range(group.rank))
        series = HahnSeries.constant(group, coeff if coeff is not None else 1)
        return cls(group, {exponent: series})

    @classmethod
    def linear(cls, group: ValueGroup, coefficients: Iterable[SymbolicReal]) -> "PolyElem":
        """``sum_k c_k Xk`` for scalar coefficients ``c_k``."""
        coeffs: dict[Exponent, HahnSeries] = {}
        for i, c in enumerate(coefficients):
            if not c.is_zero():
                exponent = tuple(1 if j == i else 0 for j in range(group.rank))
                coeffs[exponent] = HahnSeries.constant(group, c)
        return cls(group, coeffs)

    # -- structure ---------------------------------------------------------------

    def items(self) -> Iterable[tuple[Exponent, HahnSeries]]:
        return iter(self._coeffs.items())

    def monomials(self) -> list[Exponent]:
        return sorted(self._coeffs, key=_anlex_key)

    def coeff(self, exponent: Exponent) -> HahnSeries:
        return self._coeffs.get(exponent, HahnSeries.zero(self.group))

    def constant_part(self) -> HahnSeries:
        return self.coeff((0,) * self.group.rank)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_constant(self) -> bool:
        zero = (0,) * self.group.rank
        return all(e == zero for e in self._coeffs)

    def degree(self) -> int:
        return max((sum(e) for e in self._coeffs), default=0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyElem):
            return NotImplemented
        return self.group == other.group and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.group.signature, frozenset(self._coeffs.items())))

    # -- ring arithmetic -----------------------------------------------------------

    def _check_group(self, other: "PolyElem") -> None:
        if self.group != other.group:
            raise ValueError("polynomials over different value groups")

    def __add__(self, other: "PolyElem") -> "PolyElem":
        self._check_group(other)
        coeffs = dict(self._coeffs)
        for exponent, series in other._coeffs.items():
            acc = coeffs.get(exponent)
            coeffs[exponent] = series if acc is None else acc + series
        return PolyElem(self.group, coeffs)

    def __neg__(self) -> "PolyElem":
        return PolyElem(self.group, {e: -s for e, s in self._coeffs.items()})

    def __sub__(self, other: "PolyElem") -> "PolyElem":
        return self + (-other)

    def __mul__(self, other: "PolyElem") -> "PolyElem":
        self._check_group(other)
        coeffs: dict[Exponent, HahnSeries] = {}
        for e1, s1 in self._coeffs.items():
            for e2, s2 in other._coeffs.items():
                exponent = tuple(a + b for a, b in zip(e1, e2))
                product = s1 * s2
                acc = coeffs.get(exponent)
                coeffs[exponent] = product if acc is None else acc + product
        return PolyElem(self.group, coeffs)

    def __pow__(self, n: int) -> "PolyElem":
        if n < 0:
            raise ValueError("negative polynomial powers are undefined")
        result = PolyElem.from_scalar(self.group, 1)
        for _ in range(n):
            result = result * self
        return result

    def scale_series(self, series: HahnSeries) -> "PolyElem":
        if series.is_exact_zero():
            return PolyElem.zero(self.group)
        return PolyElem(self.group, {e: s * series for e, s in self._coeffs.items()})

    def substitute(self, images: list["PolyElem"]) -> "PolyElem":
        """Evaluate with each variable ``Xk`` replaced by ``images[k-1]``."""
        if len(images) != self.group.rank:
            raise ValueError("one image per variable required")
        total = PolyElem.zero(self.group)
        for exponent, series in self._coeffs.items():
            term = PolyElem.from_series(series)
            for k, power in enumerate(exponent):
                if power:
                    term = term * images[k] ** power
            total = total + term
        return total

    # -- order ---------------------------------------------------------------------

    def sign(self) -> int:
        """Sign under the class-variable order; 0 only for the exact zero.

        Minimal coefficient valuation dominates; among its monomials the
        antilexicographically largest wins; its leading coefficient decides.
        Truncated coefficients with no visible terms are tolerated only when
        their truncation bound provably exceeds the minimal valuation.
        """
        if not self._coeffs:
            return 0
        visible: dict[Exponent, GroupElement] = {}
        hidden: list[tuple[Exponent, GroupElement]] = []
        for exponent, series in self._coeffs.items():
            if series.has_visible_terms():
                visible[exponent] = series.valuation()
            else:
                hidden.append((exponent, series.precision))
        if not visible:
            raise ZeroToPrecision("no visible coefficient terms")
        minimum: GroupElement | None = None
        for valuation in visible.values():
            if minimum is None or valuation.compare(minimum) is Ordering.LT:
                minimum = valuation
        for exponent, bound in hidden:
            if bound.compare(minimum) is not Ordering.GT:
                raise ZeroToPrecision(
                    f"coefficient of X^{exponent} is hidden below the deciding "
                    f"valuation {minimum.render()}"
                )
        candidates = [e for e, v in visible.items() if v == minimum]
        leader = max(candidates, key=_anlex_key)
        _, coeff = self._coeffs[leader].leading()
        return compare(coeff, SymbolicReal.zero()).value

    def compare(self, other: "PolyElem | InfinityMark") -> Ordering:
        if isinstance(other, InfinityMark):
            return Ordering.LT
        self._check_group(other)
        s = (self - other).sign()
        return Ordering(s)

    def eq_to_precision(self, other: "PolyElem") -> bool:
        """Coefficientwise agreement on all displayed series terms."""
        difference = self - other
        return all(not s.has_visible_terms() for _, s in difference.items())

    # -- rendering -------------------------------------------------------------------

    @staticmethod
    def _mono_str(exponent: Exponent) -> str:
        parts = []
        for i, power in enumerate(exponent):
            if power == 1:
                parts.append(f"X{i + 1}")
            elif power > 1:
                parts.append(f"X{i + 1}^{power}")
        return "*".join(parts)

    def render(self) -> str:
        if not self._coeffs:
            return "0"
        pieces = []
        for exponent in sorted(self._coeffs, key=_anlex_key, reverse=True):
            series = self._coeffs[exponent]
            mono = self._mono_str(exponent)
            if not mono:
                text = series.render()
                simple = series.is_exact() and len(series.support) <= 1
                pieces.append(text if simple and "(" not in text else f"({text})")
            elif series == HahnSeries.one(self.group):
                pieces.append(mono)
            else:
                pieces.append(f"({series.render()})*{mono}")
        return " + ".join(pieces)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"PolyElem({self.render()})"


def poly_compare(p: "PolyElem | InfinityMark", q: "PolyElem | InfinityMark") -> Ordering:
    """Three-way comparison extended to the infinity marker."""
    if isinstance(p, InfinityMark):
        return Ordering.EQ if isinstance(q, InfinityMark) else Ordering.GT
    return p.compare(q)


_VARIABLE_RE = re.compile(r"X(\d+)(?:\^(\d+))?\Z")


def parse_poly(text: str, group: ValueGroup) -> PolyElem:
    """Parse the canonical polynomial text form (inverse of ``render``)."""
    text = text.strip()
    if text == "0":
        return PolyElem.zero(group)
    coeffs: dict[Exponent, HahnSeries] = {}
    for sign_value, piece, offset in _split_top_level(text):
        series_text, mono_text = _split_coeff_mono(piece, offset)
        exponent = [0] * group.rank
        if mono_text:
            for factor in mono_text.split("*"):
                m = _VARIABLE_RE.match(factor.strip())
                if not m:
                    raise ParseError(f"bad monomial {factor!r}", (offset, offset + len(piece)))
                index = int(m.group(1))
                if not 1 <= index <= group.rank:
                    raise ParseError(
                        f"variable X{index} outside rank {group.rank}",
                        (offset, offset + len(piece)),
                    )
                exponent[index - 1] += int(m.group(2) or 1)
        series = parse_series(series_text, group) if series_text else HahnSeries.one(group)
        if sign_value < 0:
            series = -series
        key = tuple(exponent)
        acc = coeffs.get(key)
        coeffs[key] = series if acc is None else acc + series
    return PolyElem(group, coeffs)


def _split_coeff_mono(piece: str, offset: int) -> tuple[str, str]:
    """Split one rendered term into series text and monomial text."""
    piece = piece.strip()
    if piece.startswith("("):
        depth = 0
        for i, ch in enumerate(piece):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    inner = piece[1:i]
                    rest = piece[i + 1 :].lstrip()
                    if not rest:
                        return inner, ""
                    if rest.startswith("*"):
                        return inner, rest[1:].strip()
                    raise ParseError(f"bad term {piece!r}", (offset, offset + len(piece)))
        raise ParseError(f"unbalanced parentheses in {piece!r}", (offset, offset + len(piece)))
    if piece.startswith("X"):
        return "", piece
    # bare scalar / series constant term
    return piece, ""
