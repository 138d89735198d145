"""Exact linear algebra used across the package.

Two layers:

* rational matrices (``Fraction`` entries) with Bareiss fraction-free
  elimination for ranks and solves — this is where rational-linear
  questions about symbolic data land after flattening each scalar over
  its constant monomials;
* Gaussian elimination over the fraction field of the scalar ring
  (:class:`SymFrac`), used when the coefficient matrix itself is symbolic.
  Final results must land back in the ring via exact division, otherwise
  :class:`~hahnlog.errors.NotRepresentable` is raised.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotRepresentable, UndecidedComparison
from .scalars import Ordering, SymbolicReal, compare

__all__ = [
    "rational_rank",
    "rational_solve",
    "SymFrac",
    "sym_inverse",
]


def rational_rank(rows: list[list[Fraction]]) -> int:
    """Rank of a rational matrix by fraction-free (Bareiss) elimination."""
    if not rows:
        return 0
    # clear denominators row-wise so all arithmetic stays integral
    m = []
    for row in rows:
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // _gcd(lcm, x.denominator)
        m.append([int(x * lcm) for x in row])
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = 1
    col = 0
    while rank < n_rows and col < n_cols:
        pivot_row = next((r for r in range(rank, n_rows) if m[r][col] != 0), None)
        if pivot_row is None:
            col += 1
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        for r in range(rank + 1, n_rows):
            for c in range(col + 1, n_cols):
                m[r][c] = (m[rank][col] * m[r][c] - m[r][col] * m[rank][c]) // prev
            m[r][col] = 0
        prev = m[rank][col]
        rank += 1
        col += 1
    return rank


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def rational_solve(
    rows: list[list[Fraction]], rhs: list[Fraction]
) -> list[Fraction] | None:
    """Solve ``rows x = rhs`` exactly when a solution exists, else None.

    Handles over- and under-determined systems; when the solution space has
    positive dimension the free variables are fixed to zero.
    """
    if not rows:
        return [] if all(v == 0 for v in rhs) else None
    n_rows, n_cols = len(rows), len(rows[0])
    aug = [list(rows[r]) + [rhs[r]] for r in range(n_rows)]
    pivots: list[tuple[int, int]] = []
    rank = 0
    for col in range(n_cols):
        pivot_row = next((r for r in range(rank, n_rows) if aug[r][col] != 0), None)
        if pivot_row is None:
            continue
        aug[rank], aug[pivot_row] = aug[pivot_row], aug[rank]
        pivot = aug[rank][col]
        aug[rank] = [v / pivot for v in aug[rank]]
        for r in range(n_rows):
            if r != rank and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[rank])]
        pivots.append((rank, col))
        rank += 1
    for r in range(rank, n_rows):
        if aug[r][n_cols] != 0:
            return None
    solution = [Fraction(0)] * n_cols
    for row, col in pivots:
        solution[col] = aug[row][n_cols]
    return solution


class SymFrac:
    """Element of the fraction field of the scalar ring.

    Simplified opportunistically: rational denominators fold into the
    numerator, and exact ring divisions collapse the pair.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: SymbolicReal, den: SymbolicReal | None = None):
        if den is None:
            den = SymbolicReal.one()
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if den.is_rational():
            num = num.scale(1 / den.rational_value())
            den = SymbolicReal.one()
        else:
            q = num.divide_exact(den)
            if q is not None:
                num, den = q, SymbolicReal.one()
        self.num = num
        self.den = den

    @classmethod
    def of(cls, value: SymbolicReal | Fraction | int) -> "SymFrac":
        if isinstance(value, SymbolicReal):
            return cls(value)
        return cls(SymbolicReal.from_fraction(value))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: "SymFrac") -> "SymFrac":
        return SymFrac(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "SymFrac") -> "SymFrac":
        return SymFrac(self.num * other.den - other.num * self.den, self.den * other.den)

    def __mul__(self, other: "SymFrac") -> "SymFrac":
        return SymFrac(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "SymFrac") -> "SymFrac":
        if other.is_zero():
            raise ZeroDivisionError("division by zero SymFrac")
        return SymFrac(self.num * other.den, self.den * other.num)

    def __neg__(self) -> "SymFrac":
        return SymFrac(-self.num, self.den)

    def to_scalar(self) -> SymbolicReal:
        """Collapse into the ring; raises when the value genuinely is a ratio."""
        if self.den.is_rational():
            return self.num.scale(1 / self.den.rational_value())
        q = self.num.divide_exact(self.den)
        if q is None:
            raise NotRepresentable(
                f"({self.num}) / ({self.den}) is not in the scalar ring"
            )
        return q

    def __repr__(self) -> str:
        if self.den == SymbolicReal.one():
            return f"SymFrac({self.num})"
        return f"SymFrac(({self.num})/({self.den}))"


def _confirmed_nonzero(value: SymbolicReal) -> bool:
    """Pivot test: symbolically nonzero and numerically sign-separated."""
    if value.is_zero():
        return False
    return compare(value, SymbolicReal.zero()) is not Ordering.EQ


def sym_inverse(matrix: list[list[SymbolicReal]]) -> list[list[SymFrac]]:
    """Inverse of a square symbolic matrix over the fraction field.

    Pivots are confirmed nonzero through interval refinement;
    :class:`UndecidedComparison` from a pivot query propagates with context.
    """
    n = len(matrix)
    aug: list[list[SymFrac]] = []
    for i, row in enumerate(matrix):
        if len(row) != n:
            raise ValueError("matrix is not square")
        aug.append(
            [SymFrac.of(v) for v in row]
            + [SymFrac.of(1 if j == i else 0) for j in range(n)]
        )
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            entry = aug[r][col]
            if not entry.is_zero():
                try:
                    if _confirmed_nonzero(entry.num):
                        pivot_row = r
                        break
                except UndecidedComparison as exc:
                    raise UndecidedComparison(
                        f"pivot sign query failed during exact solve: {exc}"
                    ) from exc
        if pivot_row is None:
            raise NotRepresentable("singular matrix in exact solve")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        aug[col] = [v / pivot for v in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]
