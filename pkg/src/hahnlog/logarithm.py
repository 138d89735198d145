"""Sections, logarithmic data and the polynomial-valued logarithm.

A :class:`LogDatum` pairs a section (a multiplicative splitting of the
valuation, specified on the group generators) with an order-preserving
embedding of the value group into ``R^l``.  It induces a logarithm from the
positive series into the ordered polynomial ring:

    log(x) = -<embedding(v(x)), X> + partial_log(x / section(v(x)))

which extends the partial logarithm of units and turns multiplication into
addition, order-preservingly.

Two data are related by a *connection*: the unique affine ring endomorphism
``X -> M X + g`` fixing the series field that intertwines the two
logarithms.  :func:`connection` computes it by exact linear algebra on the
generators and re-verifies the defining identity; when the system is
inconsistent (possible only when the group has more rational than
archimedean rank) it returns :class:`NotEquivalent` with the violated
equation as witness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from ._linalg import SymFrac, rational_solve, sym_inverse
from .errors import (
    DegenerateGroup,
    DomainError,
    HahnlogError,
    NonPositiveLog,
    NotInImage,
    NotRepresentable,
    ZeroToPrecision,
)
from .hahnfield import (
    DEFAULT_TRUNCATION,
    HahnSeries,
    compare_series,
    eq_to_precision,
    partial_exp,
    partial_log,
)
from .polyring import PolyElem
from .scalars import Ordering, SymbolicReal, compare
from .valuegroup import EmbeddingMatrix, GroupElement, ValueGroup

__all__ = [
    "Section",
    "LogDatum",
    "AffineMap",
    "NotEquivalent",
    "ConnectionReport",
    "connection",
    "connection_with_report",
]


class Section:
    """Multiplicative splitting of the valuation, given on the generators.

    ``images[i]`` is the value on the i-th generator; values on the whole
    (divisible) group follow by rational powers.  Each image must be positive
    with valuation exactly the generator.
    """

    def __init__(self, group: ValueGroup, images: list[HahnSeries]):
        if len(images) != group.num_generators:
            raise ValueError("one image per generator required")
        for i, image in enumerate(images):
            if image.group != group:
                raise ValueError("section image over a different group")
            if image.sign() <= 0:
                raise NonPositiveLog(f"section image {i + 1} is not positive")
            if image.valuation() != group.generator_element(i):
                raise DomainError(
                    f"section image {i + 1} has valuation "
                    f"{image.valuation().render()}, expected generator "
                    f"{group.generator_element(i).render()}"
                )
        self.group = group
        self.images = tuple(images)

    @classmethod
    def canonical(cls, group: ValueGroup) -> "Section":
        """Monomial section: generator i maps to ``t^(g_i)``."""
        return cls(
            group,
            [HahnSeries.generator_monomial(group, i) for i in range(group.num_generators)],
        )

    def apply(self, element: GroupElement, depth: int = DEFAULT_TRUNCATION) -> HahnSeries:
        result = HahnSeries.one(self.group)
        for coord, image in zip(element.coords, self.images):
            if coord:
                result = result * image.power(coord, depth)
        return result

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Section)
            and self.group == other.group
            and self.images == other.images
        )

    def render(self) -> str:
        return "[" + "; ".join(s.render() for s in self.images) + "]"


class LogDatum:
    """A section together with a validated order-preserving embedding."""

    def __init__(self, section: Section, embedding: EmbeddingMatrix):
        report = embedding.validate(section.group)
        if not report.ok:
            raise DomainError(f"invalid embedding: {report!r}")
        self.section = section
        self.embedding = embedding
        self.group = section.group

    @classmethod
    def canonical(cls, group: ValueGroup) -> "LogDatum":
        return cls(Section.canonical(group), EmbeddingMatrix.identity(group.rank))

    def log(self, x: HahnSeries, depth: int = DEFAULT_TRUNCATION) -> PolyElem:
        """The induced logarithm of a positive series, in the polynomial ring."""
        if x.group != self.group:
            raise ValueError("argument over a different group")
        if x.sign() <= 0:
            raise NonPositiveLog("logarithm of a non-positive series")
        gamma = x.valuation()
        unit = x * self.section.apply(gamma, depth).invert(depth)
        linear = PolyElem.linear(
            self.group, [-c for c in self.embedding.apply(gamma)]
        )
        return linear + PolyElem.from_series(partial_log(unit, depth))

    def preimage(self, target: PolyElem, depth: int = DEFAULT_TRUNCATION) -> HahnSeries:
        """Inverse of :meth:`log` on its image ``<embedding(group), X> + O``.

        The linear coefficients must be scalar constants hit by the
        embedding, and the constant part must be bounded.
        """
        if target.group != self.group:
            raise ValueError("target over a different group")
        rank = self.group.rank
        for exponent, _ in target.items():
            if sum(exponent) > 1:
                raise NotInImage(f"monomial X^{exponent} of degree {sum(exponent)} in target")
        coefficients: list[SymbolicReal] = []
        for k in range(rank):
            unit = tuple(1 if i == k else 0 for i in range(rank))
            series = target.coeff(unit)
            if series.is_exact_zero():
                coefficients.append(SymbolicReal.zero())
                continue
            try:
                coefficients.append(series.as_scalar())
            except (NotRepresentable, ZeroToPrecision) as exc:
                raise NotInImage(f"non-constant X{k + 1}-coefficient: {exc}") from exc
        constant = target.constant_part()
        if constant.has_visible_terms() and constant.valuation().compare(
            self.group.zero()
        ) is Ordering.LT:
            raise NotInImage("constant part is unbounded (valuation < 0)")
        gamma = self._embedding_preimage(coefficients)
        return self.section.apply(-gamma, depth) * partial_exp(constant, depth)

    def _embedding_preimage(self, coefficients: list[SymbolicReal]) -> GroupElement:
        """Solve ``embedding(gamma) = coefficients`` for rational coordinates."""
        group = self.group
        images = [
            self.embedding.apply(group.generator_element(i))
            for i in range(group.num_generators)
        ]
        monomials = sorted(
            {m for img in images for v in img for m, _ in v.items()}
            | {m for v in coefficients for m, _ in v.items()}
        )
        rows = []
        rhs = []
        for k in range(group.rank):
            for mono in monomials:
                rows.append(
                    [
                        next((c for m, c in images[i][k].items() if m == mono), Fraction(0))
                        for i in range(group.num_generators)
                    ]
                )
                rhs.append(
                    next((c for m, c in coefficients[k].items() if m == mono), Fraction(0))
                )
        solution = rational_solve(rows, rhs)
        if solution is None:
            raise NotInImage(
                "linear part is not in the embedding image of the value group"
            )
        return group.element(solution)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LogDatum)
            and self.section == other.section
            and self.embedding == other.embedding
        )

    def render(self) -> str:
        return f"section={self.section.render()}; embedding={self.embedding.render()}"


class AffineMap:
    """Ring endomorphism of the polynomial ring fixing the series field:
    ``Xk -> sum_j M[k][j] Xj + offset[k]``.

    For connections the matrix is lower triangular with positive diagonal
    and the offsets are bounded series.
    """

    def __init__(
        self,
        group: ValueGroup,
        matrix: list[list[SymbolicReal]],
        offset: list[HahnSeries],
    ):
        rank = group.rank
        if len(matrix) != rank or any(len(row) != rank for row in matrix):
            raise ValueError("matrix shape must match the group rank")
        if len(offset) != rank:
            raise ValueError("one offset per variable required")
        self.group = group
        self.matrix = tuple(tuple(row) for row in matrix)
        self.offset = tuple(offset)

    @classmethod
    def identity(cls, group: ValueGroup) -> "AffineMap":
        one = SymbolicReal.one()
        zero = SymbolicReal.zero()
        return cls(
            group,
            [[one if i == j else zero for j in range(group.rank)] for i in range(group.rank)],
            [HahnSeries.zero(group) for _ in range(group.rank)],
        )

    def validate_shape(self) -> list[str]:
        """Connection normal form: lower triangular, positive diagonal,
        bounded offsets."""
        violations = []
        rank = self.group.rank
        for k in range(rank):
            for j in range(rank):
                if j > k and not self.matrix[k][j].is_zero():
                    violations.append(
                        f"matrix entry ({k + 1},{j + 1}) above the diagonal: "
                        f"{self.matrix[k][j]}"
                    )
        for k in range(rank):
            if compare(self.matrix[k][k], SymbolicReal.zero()) is not Ordering.GT:
                violations.append(f"diagonal entry {k + 1} not positive")
        for k, g in enumerate(self.offset):
            if g.has_visible_terms() and g.valuation().compare(
                self.group.zero()
            ) is Ordering.LT:
                violations.append(f"offset {k + 1} is unbounded")
        return violations

    def images(self) -> list[PolyElem]:
        result = []
        for k in range(self.group.rank):
            poly = PolyElem.linear(self.group, self.matrix[k])
            poly = poly + PolyElem.from_series(self.offset[k])
            result.append(poly)
        return result

    def is_identity(self) -> bool:
        for k in range(self.group.rank):
            for j in range(self.group.rank):
                expected = SymbolicReal.one() if j == k else SymbolicReal.zero()
                if self.matrix[k][j] != expected:
                    return False
        return all(g.is_exact_zero() for g in self.offset)

    def apply(self, p: PolyElem) -> PolyElem:
        """Substitute the images for the variables; the identity on series."""
        if self.is_identity():
            return p
        return p.substitute(self.images())

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """The map ``p -> self(inner(p))``."""
        if self.group != inner.group:
            raise ValueError("composition across groups")
        matrix: list[list[SymbolicReal]] = []
        offset: list[HahnSeries] = []
        for image in inner.images():
            composed = self.apply(image)
            row = []
            for j in range(self.group.rank):
                unit = tuple(1 if i == j else 0 for i in range(self.group.rank))
                row.append(composed.coeff(unit).as_scalar())
            matrix.append(row)
            offset.append(composed.constant_part())
        return AffineMap(self.group, matrix, offset)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AffineMap)
            and self.group == other.group
            and self.matrix == other.matrix
            and self.offset == other.offset
        )

    def render(self) -> str:
        rows = "; ".join(
            ",".join(v.render() for v in row) for row in self.matrix
        )
        offsets = "; ".join(g.render() for g in self.offset)
        return f"M=[{rows}] g=[{offsets}]"

    def __repr__(self) -> str:
        return f"AffineMap({self.render()})"


@dataclass(frozen=True)
class NotEquivalent:
    """Verdict that no connection exists, with the violated equation."""

    witness: str

    def __str__(self) -> str:
        return f"NOT EQUIVALENT: {self.witness}"


@dataclass(frozen=True)
class ConnectionReport:
    """Connection result plus the verification trail."""

    result: "AffineMap | NotEquivalent"
    seed: int
    pivot_rows: tuple[int, ...]
    checked_generators: int
    checked_units: int


def _select_pivot_rows(rows: list[tuple[SymbolicReal, ...]], rank: int) -> list[int]:
    """Greedy choice of rows forming an invertible square system.

    Elimination over the fraction field of the scalars; pivot candidates are
    confirmed nonzero by interval refinement.
    """
    work = [[SymFrac.of(v) for v in row] for row in rows]
    selected: list[int] = []
    for col in range(rank):
        pivot_index = None
        for i, row in enumerate(work):
            if i in selected:
                continue
            entry = row[col]
            if entry.is_zero():
                continue
            if compare(entry.num, SymbolicReal.zero()) is not Ordering.EQ:
                pivot_index = i
                break
        if pivot_index is None:
            raise DegenerateGroup(
                "embedding images of the generators do not span all classes"
            )
        selected.append(pivot_index)
        pivot = work[pivot_index][col]
        for i, row in enumerate(work):
            if i != pivot_index and not row[col].is_zero():
                factor = row[col] / pivot
                work[i] = [a - factor * b for a, b in zip(row, work[pivot_index])]
    return selected


def connection_with_report(
    mu: LogDatum,
    mu_prime: LogDatum,
    seed: int = 0,
    depth: int = DEFAULT_TRUNCATION,
    generator_order: list[int] | None = None,
) -> ConnectionReport:
    """Compute the connection between two data over the same group.

    Matches the logarithms on every generator: the linear parts give the
    matrix system ``A M = B`` with ``A``, ``B`` the embedding images of the
    generators, and the constant parts give ``A g = h`` with
    ``h_i = partial_log(s'(g_i) / s(g_i))``.  With more generators than
    classes the extra equations are consistency checks; a violated one is
    returned as a :class:`NotEquivalent` witness.  The solved map is
    re-verified on every generator and on seeded random units.
    """
    if mu.group != mu_prime.group:
        raise ValueError("logarithmic data over different groups")
    group = mu.group
    rank = group.rank
    m = group.num_generators
    order = list(generator_order) if generator_order is not None else list(range(m))
    if sorted(order) != list(range(m)):
        raise ValueError("generator_order must be a permutation")
    if m < rank:
        raise DegenerateGroup(
            f"{m} generators cannot populate {rank} archimedean classes"
        )

    gens = [group.generator_element(i) for i in order]
    a_rows = [mu.embedding.apply(g) for g in gens]
    b_rows = [mu_prime.embedding.apply(g) for g in gens]
    ratios = [
        mu_prime.section.apply(g, depth) * mu.section.apply(g, depth).invert(depth)
        for g in gens
    ]
    h = [partial_log(ratio, depth) for ratio in ratios]

    if rank == 0:
        result: AffineMap | NotEquivalent = AffineMap.identity(group)
        _verify_connection(result, mu, mu_prime, gens, seed, depth)
        return ConnectionReport(result, seed, (), m, 5)

    pivots = _select_pivot_rows(a_rows, rank)
    inverse = sym_inverse([list(a_rows[i]) for i in pivots])
    matrix: list[list[SymbolicReal]] = []
    offset: list[HahnSeries] = []
    for j in range(rank):
        row = []
        for k in range(rank):
            entry = SymFrac.of(0)
            for t in range(rank):
                entry = entry + inverse[j][t] * SymFrac.of(b_rows[pivots[t]][k])
            row.append(entry.to_scalar())
        matrix.append(row)
        g_j = HahnSeries.zero(group)
        for t in range(rank):
            piece = h[pivots[t]].scale(inverse[j][t].num).scale_div(inverse[j][t].den)
            g_j = g_j + piece
        offset.append(g_j)

    # consistency of the non-pivot generator equations
    for i in range(m):
        if i in pivots:
            continue
        for k in range(rank):
            lhs = SymbolicReal.zero()
            for j in range(rank):
                lhs = lhs + a_rows[i][j] * matrix[j][k]
            if lhs != b_rows[i][k]:
                witness = (
                    f"generator {order[i] + 1}: X{k + 1}-coefficient equation "
                    f"requires {b_rows[i][k]}, the solved map gives {lhs}"
                )
                return ConnectionReport(NotEquivalent(witness), seed, tuple(order[p] for p in pivots), m, 0)
        lhs_series = HahnSeries.zero(group)
        for j in range(rank):
            lhs_series = lhs_series + offset[j].scale(a_rows[i][j])
        if not eq_to_precision(lhs_series, h[i]):
            witness = (
                f"generator {order[i] + 1}: constant equation requires "
                f"log(s'(g)/s(g)) = {h[i].render()}, the solved map gives "
                f"{lhs_series.render()}"
            )
            return ConnectionReport(NotEquivalent(witness), seed, tuple(order[p] for p in pivots), m, 0)

    result = AffineMap(group, matrix, offset)
    shape = result.validate_shape()
    if shape:
        raise HahnlogError(
            "solved connection violates the affine normal form: " + "; ".join(shape)
        )
    _verify_connection(result, mu, mu_prime, gens, seed, depth)
    return ConnectionReport(result, seed, tuple(order[p] for p in pivots), m, 5)


def _verify_connection(
    phi: AffineMap,
    mu: LogDatum,
    mu_prime: LogDatum,
    gens: list[GroupElement],
    seed: int,
    depth: int,
) -> None:
    group = mu.group
    for g in gens:
        x = mu.section.apply(g, depth)
        lhs = phi.apply(mu.log(x, depth))
        rhs = mu_prime.log(x, depth)
        if not lhs.eq_to_precision(rhs):
            raise HahnlogError(
                f"connection fails the defining identity on generator {g.render()}"
            )
    rng = random.Random(seed)
    for _ in range(5):
        unit = _random_unit(group, rng)
        lhs = phi.apply(mu.log(unit, depth))
        rhs = mu_prime.log(unit, depth)
        if not lhs.eq_to_precision(rhs):
            raise HahnlogError("connection fails the defining identity on a unit")


def _random_unit(group: ValueGroup, rng: random.Random) -> HahnSeries:
    """A random positive series with valuation zero and rational leading term."""
    lead = Fraction(rng.randint(1, 9), rng.randint(1, 4))
    series = HahnSeries.constant(group, lead)
    for i in range(group.num_generators):
        if rng.random() < 0.6:
            exponent = group.generator_element(i)
            if exponent.compare(group.zero()) is Ordering.LT:
                exponent = -exponent
            exponent = exponent.scale(Fraction(rng.randint(1, 4), 2))
            coefficient = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
            if coefficient:
                series = series + HahnSeries.monomial(group, exponent, coefficient)
    return series


def connection(
    mu: LogDatum,
    mu_prime: LogDatum,
    seed: int = 0,
    depth: int = DEFAULT_TRUNCATION,
    generator_order: list[int] | None = None,
) -> "AffineMap | NotEquivalent":
    return connection_with_report(mu, mu_prime, seed, depth, generator_order).result
