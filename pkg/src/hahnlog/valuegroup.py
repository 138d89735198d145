"""Ordered value groups of finite archimedean rank.

A :class:`ValueGroup` is the divisible hull of a finitely generated subgroup
of ``R^l`` carrying the antilexicographic order (vectors compared at the
highest index where they differ).  Generators are vectors of exact scalars;
group elements store rational coordinates with respect to the generators, so
all group arithmetic is exact.

Order-preserving self-embeddings of the ambient ``R^l`` are exactly the
upper triangular matrices with positive diagonal; :class:`EmbeddingMatrix`
checks and applies them.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Sequence

from ._linalg import rational_rank
from .errors import DegenerateGroup, ParseError
from .scalars import Ordering, SymbolicReal, compare, parse_scalar

__all__ = ["ValueGroup", "GroupElement", "EmbeddingMatrix", "EmbeddingReport", "anlex_sign"]

ScalarLike = SymbolicReal | Fraction | int | str


def _scalar(value: ScalarLike) -> SymbolicReal:
    if isinstance(value, SymbolicReal):
        return value
    if isinstance(value, str):
        return parse_scalar(value)
    return SymbolicReal.from_fraction(value)


def anlex_sign(vector: Sequence[SymbolicReal]) -> int:
    """Sign of a scalar vector under the antilexicographic order.

    The highest symbolically nonzero coordinate decides; its sign is settled
    by interval refinement.
    """
    for entry in reversed(list(vector)):
        if not entry.is_zero():
            result = compare(entry, SymbolicReal.zero())
            return result.value
    return 0


class ValueGroup:
    """Divisible hull of the group generated by rationally independent vectors.

    ``rank`` is the ambient archimedean rank; generators live in
    ``SymbolicReal^rank``.  Rational independence is verified at construction
    by flattening each generator over its constant monomials and computing an
    exact rational rank — a rational relation between generators is the same
    as a relation between the flattened vectors, since the constants are
    independent symbols.
    """

    def __init__(self, rank: int, generators: Iterable[Sequence[ScalarLike]]):
        if rank < 0:
            raise ValueError("rank must be non-negative")
        self.rank = rank
        gens: list[tuple[SymbolicReal, ...]] = []
        for g in generators:
            row = tuple(_scalar(v) for v in g)
            if len(row) != rank:
                raise ValueError(f"generator {row} does not have {rank} coordinates")
            gens.append(row)
        self.generators: tuple[tuple[SymbolicReal, ...], ...] = tuple(gens)
        self._check_independence()
        self._generator_arch = tuple(
            self._raw_arch_index(g) for g in self.generators
        )
        if any(k == 0 for k in self._generator_arch):
            raise DegenerateGroup("a generator is the zero vector")
        self.populated_classes = frozenset(self._generator_arch)
        self.full_arch_rank = self.populated_classes == set(range(1, rank + 1))
        self._signature = "{};{}".format(
            rank, "|".join(",".join(v.render() for v in g) for g in self.generators)
        )

    # -- construction helpers ------------------------------------------------

    @classmethod
    def canonical(cls, rank: int) -> "ValueGroup":
        """Q^rank with unit-vector generators (the Puiseux value group)."""
        return cls(
            rank,
            [[1 if j == i else 0 for j in range(rank)] for i in range(rank)],
        )

    @property
    def num_generators(self) -> int:
        return len(self.generators)

    def _check_independence(self) -> None:
        if not self.generators:
            return
        monomials = sorted(
            {mono for g in self.generators for v in g for mono, _ in v.items()}
        )
        columns = [(k, mono) for k in range(self.rank) for mono in monomials]
        rows = []
        for g in self.generators:
            flat = {}
            for k, v in enumerate(g):
                for mono, coeff in v.items():
                    flat[(k, mono)] = coeff
            rows.append([flat.get(col, Fraction(0)) for col in columns])
        if rational_rank(rows) != len(self.generators):
            raise DegenerateGroup(
                "generators are rationally dependent; rational rank "
                f"< {len(self.generators)}"
            )

    def _raw_arch_index(self, vector: Sequence[SymbolicReal]) -> int:
        for k in range(self.rank, 0, -1):
            if not vector[k - 1].is_zero():
                return k
        return 0

    # -- elements -------------------------------------------------------------

    def zero(self) -> "GroupElement":
        return GroupElement(self, (Fraction(0),) * self.num_generators)

    def element(self, coords: Iterable[Fraction | int | str]) -> "GroupElement":
        tup = tuple(Fraction(c) for c in coords)
        if len(tup) != self.num_generators:
            raise ValueError(
                f"expected {self.num_generators} coordinates, got {len(tup)}"
            )
        return GroupElement(self, tup)

    def generator_element(self, i: int) -> "GroupElement":
        coords = [Fraction(0)] * self.num_generators
        coords[i] = Fraction(1)
        return GroupElement(self, tuple(coords))

    def real_vector(self, element: "GroupElement") -> tuple[SymbolicReal, ...]:
        """Image of the element in R^rank: generator matrix times coordinates."""
        vec = [SymbolicReal.zero() for _ in range(self.rank)]
        for coord, generator in zip(element.coords, self.generators):
            if coord:
                for k in range(self.rank):
                    vec[k] = vec[k] + generator[k].scale(coord)
        return tuple(vec)

    def compare(self, a: "GroupElement", b: "GroupElement") -> Ordering:
        if a.group is not self or b.group is not self:
            if a.group.signature != self.signature or b.group.signature != self.signature:
                raise ValueError("elements belong to a different group")
        if a.coords == b.coords:
            return Ordering.EQ
        s = anlex_sign(self.real_vector(a - b))
        return Ordering.GT if s > 0 else Ordering.LT

    def arch_index(self, element: "GroupElement") -> int:
        """0 for the zero element, else the index of its archimedean class."""
        return self._raw_arch_index(self.real_vector(element))

    def sort_key(self):
        """Key function ordering group elements ascending."""
        return cmp_to_key(lambda a, b: self.compare(a, b).value)

    # -- identity ---------------------------------------------------------------

    @property
    def signature(self) -> str:
        return self._signature

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ValueGroup) and self._signature == other._signature

    def __hash__(self) -> int:
        return hash(self._signature)

    def render(self) -> str:
        gens = "; ".join(",".join(v.render() for v in g) for g in self.generators)
        return f"rank={self.rank}; generators=[{gens}]"

    def __repr__(self) -> str:
        return f"ValueGroup({self.render()})"


class GroupElement:
    """Element of a value group: rational coordinates over the generators."""

    __slots__ = ("group", "coords")

    def __init__(self, group: ValueGroup, coords: tuple[Fraction, ...]):
        self.group = group
        self.coords = coords

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.group, tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.group, tuple(a - b for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.group, tuple(-c for c in self.coords))

    def scale(self, q: Fraction | int) -> "GroupElement":
        q = Fraction(q)
        return GroupElement(self.group, tuple(c * q for c in self.coords))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GroupElement)
            and self.group.signature == other.group.signature
            and self.coords == other.coords
        )

    def __hash__(self) -> int:
        return hash((self.group.signature, self.coords))

    def real_vector(self) -> tuple[SymbolicReal, ...]:
        return self.group.real_vector(self)

    def arch_index(self) -> int:
        return self.group.arch_index(self)

    def compare(self, other: "GroupElement") -> Ordering:
        return self.group.compare(self, other)

    def render(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"

    def __repr__(self) -> str:
        return f"GroupElement{self.render()}"


class EmbeddingReport:
    """Outcome of :meth:`EmbeddingMatrix.validate`."""

    def __init__(self, violations: list[str]):
        self.violations = violations

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self) -> str:
        return "ok" if self.ok else "violations: " + "; ".join(self.violations)


class EmbeddingMatrix:
    """Square scalar matrix applied to the real vector of a group element.

    Valid embeddings are upper triangular with positive diagonal: applied to
    a vector whose highest nonzero coordinate is k, such a matrix keeps the
    highest nonzero coordinate at k with the same sign, so both the
    antilexicographic order and the archimedean index are preserved.
    """

    def __init__(self, entries: Iterable[Sequence[ScalarLike]]):
        rows = [tuple(_scalar(v) for v in row) for row in entries]
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise ValueError("embedding matrix must be square")
        self.entries: tuple[tuple[SymbolicReal, ...], ...] = tuple(rows)
        self.size = n

    @classmethod
    def identity(cls, n: int) -> "EmbeddingMatrix":
        return cls([[1 if j == i else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def scaling(cls, diagonal: Sequence[ScalarLike]) -> "EmbeddingMatrix":
        n = len(diagonal)
        return cls(
            [[diagonal[i] if j == i else 0 for j in range(n)] for i in range(n)]
        )

    def validate(self, group: ValueGroup) -> EmbeddingReport:
        violations: list[str] = []
        if self.size != group.rank:
            return EmbeddingReport([f"matrix size {self.size} != group rank {group.rank}"])
        for i in range(self.size):
            for j in range(self.size):
                if i > j and not self.entries[i][j].is_zero():
                    violations.append(
                        f"entry ({i + 1},{j + 1}) below the diagonal is nonzero: "
                        f"{self.entries[i][j]}"
                    )
        for j in range(self.size):
            if compare(self.entries[j][j], SymbolicReal.zero()) is not Ordering.GT:
                violations.append(
                    f"diagonal entry ({j + 1},{j + 1}) is not positive: {self.entries[j][j]}"
                )
        if violations:
            return EmbeddingReport(violations)
        # injectivity on the group: flattened rational rank of generator images
        images = [self.apply_vector(g) for g in group.generators]
        if images:
            monomials = sorted({m for img in images for v in img for m, _ in v.items()})
            columns = [(k, mono) for k in range(self.size) for mono in monomials]
            rows = []
            for img in images:
                flat = {}
                for k, v in enumerate(img):
                    for mono, coeff in v.items():
                        flat[(k, mono)] = coeff
                rows.append([flat.get(col, Fraction(0)) for col in columns])
            if rational_rank(rows) != len(images):
                violations.append("generator images are rationally dependent")
        # spot checks: archimedean index and order on generators
        for i, g in enumerate(group.generators):
            elem = group.generator_element(i)
            if group._raw_arch_index(self.apply_vector(g)) != elem.arch_index():
                violations.append(f"archimedean index not preserved on generator {i + 1}")
        for i in range(group.num_generators):
            for j in range(i + 1, group.num_generators):
                d = group.generator_element(i) - group.generator_element(j)
                expected = anlex_sign(d.real_vector())
                got = anlex_sign(self.apply(d))
                if expected != got:
                    violations.append(
                        f"order not preserved on generator difference {i + 1}-{j + 1}"
                    )
        return EmbeddingReport(violations)

    def apply_vector(self, vector: Sequence[SymbolicReal]) -> tuple[SymbolicReal, ...]:
        result = []
        for i in range(self.size):
            total = SymbolicReal.zero()
            for j in range(self.size):
                entry = self.entries[i][j]
                if not entry.is_zero() and not vector[j].is_zero():
                    total = total + entry * vector[j]
            result.append(total)
        return tuple(result)

    def apply(self, element: GroupElement) -> tuple[SymbolicReal, ...]:
        """Image of a group element in R^rank."""
        return self.apply_vector(element.real_vector())

    def compose(self, inner: "EmbeddingMatrix") -> "EmbeddingMatrix":
        """Matrix of ``self`` after ``inner`` (the product self @ inner)."""
        if self.size != inner.size:
            raise ValueError("size mismatch in composition")
        n = self.size
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                total = SymbolicReal.zero()
                for k in range(n):
                    total = total + self.entries[i][k] * inner.entries[k][j]
                row.append(total)
            rows.append(row)
        return EmbeddingMatrix(rows)

    def render(self) -> str:
        return "[" + "; ".join(
            ",".join(v.render() for v in row) for row in self.entries
        ) + "]"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EmbeddingMatrix) and self.entries == other.entries

    def __repr__(self) -> str:
        return f"EmbeddingMatrix({self.render()})"
