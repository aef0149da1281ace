"""Exact dense linear algebra over a scalar domain.

Solving and inversion use fraction-free (Bareiss-style) elimination: each
update divides by the previous pivot, which is exact and keeps intermediate
entries as minors of the input instead of letting rational-function degrees
blow up.  Pivoting is first-nonzero with lowest row index, so all outputs
are deterministic.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .scalars import Scalar, ScalarDomain

__all__ = [
    "DimensionMismatchError",
    "Matrix",
    "RankDeficiencyError",
    "SingularMatrixError",
    "dot",
    "solve_general",
]


class SingularMatrixError(ArithmeticError):
    """The matrix is not invertible."""


class RankDeficiencyError(ArithmeticError):
    """The matrix does not have the rank the operation requires."""


class DimensionMismatchError(ValueError):
    """Operand shapes are incompatible."""


def dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    if len(u) != len(v):
        raise DimensionMismatchError(f"dot of lengths {len(u)} and {len(v)}")
    acc = u[0] * v[0]
    for x, y in zip(u[1:], v[1:]):
        acc = acc + x * y
    return acc


class Matrix:
    """Immutable row-major matrix of Scalars with optional row/col labels."""

    __slots__ = ("domain", "rows", "cols", "entries", "row_labels", "col_labels")

    def __init__(self, domain: ScalarDomain, rows: int, cols: int,
                 entries: Sequence[Scalar], row_labels=None, col_labels=None):
        if len(entries) != rows * cols:
            raise DimensionMismatchError(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}")
        if row_labels is not None and len(set(row_labels)) != rows:
            raise ValueError("row labels must be distinct and match the row count")
        if col_labels is not None and len(set(col_labels)) != cols:
            raise ValueError("col labels must be distinct and match the column count")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", tuple(entries))
        object.__setattr__(self, "row_labels", None if row_labels is None else tuple(row_labels))
        object.__setattr__(self, "col_labels", None if col_labels is None else tuple(col_labels))

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- construction --------------------------------------------------------

    @classmethod
    def from_rows(cls, domain, rows, row_labels=None, col_labels=None):
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        entries = []
        for row in rows:
            if len(row) != ncols:
                raise DimensionMismatchError("ragged rows")
            entries.extend(domain.scalar(x) for x in row)
        return cls(domain, nrows, ncols, entries, row_labels, col_labels)

    @classmethod
    def from_columns(cls, domain, columns, row_labels=None, col_labels=None):
        ncols = len(columns)
        nrows = len(columns[0]) if ncols else 0
        rows = [[columns[j][i] for j in range(ncols)] for i in range(nrows)]
        return cls.from_rows(domain, rows, row_labels, col_labels)

    @classmethod
    def identity(cls, domain, n):
        one, zero = domain.one(), domain.zero()
        entries = [one if i == j else zero for i in range(n) for j in range(n)]
        return cls(domain, n, n, entries)

    # -- access ---------------------------------------------------------------

    def __getitem__(self, key):
        i, j = key
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j):
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and \
            self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(
            ", ".join(e.text() for e in self.row(i)) for i in range(self.rows))
        return f"Matrix[{body}]"

    def transpose(self):
        entries = [self.entries[i * self.cols + j]
                   for j in range(self.cols) for i in range(self.rows)]
        return Matrix(self.domain, self.cols, self.rows, entries,
                      self.col_labels, self.row_labels)

    # -- arithmetic -----------------------------------------------------------

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        zero = self.domain.zero()
        out = []
        for i in range(self.rows):
            row = self.row(i)
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    x = row[k]
                    if x.is_zero():
                        continue
                    acc = acc + x * other.entries[k * other.cols + j]
                out.append(acc)
        return Matrix(self.domain, self.rows, other.cols, out,
                      self.row_labels, other.col_labels)

    def apply(self, vector: Sequence[Scalar]):
        if len(vector) != self.cols:
            raise DimensionMismatchError("vector length does not match column count")
        return tuple(dot(self.row(i), vector) for i in range(self.rows))

    # -- elimination core -----------------------------------------------------

    def _eliminate(self, aug_cols=0, work=None):
        """Bareiss forward elimination on a working copy.

        Returns (work, pivot_cols) where work is a list of row lists covering
        all columns including any augmented ones, and pivot_cols indexes the
        pivot column of each eliminated row within the first self.cols columns.
        """
        if work is None:
            work = [list(self.row(i)) for i in range(self.rows)]
        total_cols = self.cols + aug_cols
        one = self.domain.one()
        prev = one
        pivot_cols = []
        r = 0
        for c in range(self.cols):
            pivot_row = None
            for i in range(r, self.rows):
                if not work[i][c].is_zero():
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            if pivot_row != r:
                work[r], work[pivot_row] = work[pivot_row], work[r]
            pivot = work[r][c]
            for i in range(r + 1, self.rows):
                factor = work[i][c]
                for j in range(c, total_cols):
                    work[i][j] = (pivot * work[i][j] - factor * work[r][j]) / prev
            prev = pivot
            pivot_cols.append(c)
            r += 1
        return work, pivot_cols

    def rank(self):
        return len(self._eliminate()[1])

    def det(self):
        if self.rows != self.cols:
            raise DimensionMismatchError("determinant of a non-square matrix")
        work = [list(self.row(i)) for i in range(self.rows)]
        sign = 1
        one = self.domain.one()
        prev = one
        for c in range(self.cols):
            pivot_row = None
            for i in range(c, self.rows):
                if not work[i][c].is_zero():
                    pivot_row = i
                    break
            if pivot_row is None:
                return self.domain.zero()
            if pivot_row != c:
                work[c], work[pivot_row] = work[pivot_row], work[c]
                sign = -sign
            pivot = work[c][c]
            for i in range(c + 1, self.rows):
                factor = work[i][c]
                for j in range(c, self.cols):
                    work[i][j] = (pivot * work[i][j] - factor * work[c][j]) / prev
            prev = pivot
        value = work[self.rows - 1][self.cols - 1]
        return value if sign > 0 else -value

    def _back_substitute(self, work, pivot_cols, aug_cols):
        """Solve the upper-triangular system for each augmented column."""
        n = len(pivot_cols)
        zero = self.domain.zero()
        solutions = [[zero] * self.cols for _ in range(aug_cols)]
        for t in range(n - 1, -1, -1):
            c = pivot_cols[t]
            pivot = work[t][c]
            for a in range(aug_cols):
                acc = work[t][self.cols + a]
                for j in range(c + 1, self.cols):
                    xj = solutions[a][j]
                    if not xj.is_zero():
                        acc = acc - work[t][j] * xj
                solutions[a][c] = acc / pivot
        return solutions

    def solve(self, rhs: Sequence[Scalar]):
        """Exact solution of A x = rhs for square A."""
        if self.rows != self.cols:
            raise DimensionMismatchError("solve requires a square matrix")
        if len(rhs) != self.rows:
            raise DimensionMismatchError("right-hand side has the wrong length")
        work = [list(self.row(i)) + [self.domain.scalar(b)]
                for i, b in zip(range(self.rows), rhs)]
        work, pivot_cols = self._eliminate(aug_cols=1, work=work)
        if len(pivot_cols) < self.rows:
            raise SingularMatrixError("matrix is singular")
        return tuple(self._back_substitute(work, pivot_cols, 1)[0])

    def inverse(self):
        """Exact inverse; raises SingularMatrixError when none exists."""
        if self.rows != self.cols:
            raise DimensionMismatchError("inverse requires a square matrix")
        n = self.rows
        one, zero = self.domain.one(), self.domain.zero()
        work = [list(self.row(i)) + [one if i == j else zero for j in range(n)]
                for i in range(n)]
        work, pivot_cols = self._eliminate(aug_cols=n, work=work)
        if len(pivot_cols) < n:
            raise SingularMatrixError("matrix is singular")
        columns = self._back_substitute(work, pivot_cols, n)
        entries = [columns[j][i] for i in range(n) for j in range(n)]
        return Matrix(self.domain, n, n, entries, self.col_labels, self.row_labels)

    def kernel_basis(self, basis_cols: Optional[Sequence[int]] = None):
        """Exact basis of the kernel of a full-row-rank wide matrix.

        When ``basis_cols`` names an independent column set of size
        ``rows``, the returned vectors are the distinguished basis: for each
        remaining column j the vector has entry 1 at j, the negated
        coordinates of column j over the chosen columns, and zeros elsewhere.
        """
        if self.rows > self.cols:
            raise RankDeficiencyError("kernel_basis expects rows <= cols")
        if basis_cols is None:
            basis_cols = self._eliminate()[1]
        else:
            basis_cols = list(basis_cols)
        if len(basis_cols) != self.rows:
            raise RankDeficiencyError(
                f"matrix rank {len(basis_cols)} is below the row count {self.rows}")
        square = Matrix.from_columns(self.domain, [self.column(c) for c in basis_cols])
        inverse = square.inverse()
        zero = self.domain.zero()
        one = self.domain.one()
        basis = []
        for j in range(self.cols):
            if j in basis_cols:
                continue
            coords = inverse.apply(self.column(j))
            vector = [zero] * self.cols
            vector[j] = one
            for t, c in enumerate(basis_cols):
                vector[c] = -coords[t]
            basis.append(tuple(vector))
        return basis


def solve_general(matrix: Matrix, rhs: Sequence[Scalar]):
    """Particular solution (free variables zero) plus kernel basis.

    Returns (particular, kernel) or None when the system is inconsistent.
    """
    if len(rhs) != matrix.rows:
        raise DimensionMismatchError("right-hand side has the wrong length")
    work = [list(matrix.row(i)) + [matrix.domain.scalar(b)]
            for i, b in zip(range(matrix.rows), rhs)]
    work, pivot_cols = matrix._eliminate(aug_cols=1, work=work)
    for i in range(len(pivot_cols), matrix.rows):
        if not work[i][matrix.cols].is_zero():
            return None
    zero = matrix.domain.zero()
    one = matrix.domain.one()
    particular = [zero] * matrix.cols
    solution = matrix._back_substitute(work[: len(pivot_cols)], pivot_cols, 1)[0]
    for c in pivot_cols:
        particular[c] = solution[c]
    free_cols = [c for c in range(matrix.cols) if c not in pivot_cols]
    kernel = []
    for f in free_cols:
        # express column f against the pivot columns
        coords = {}
        for t in range(len(pivot_cols) - 1, -1, -1):
            c = pivot_cols[t]
            acc = work[t][f]
            for j, xj in coords.items():
                entry = work[t][j]
                if not entry.is_zero() and not xj.is_zero():
                    acc = acc - entry * xj
            coords[c] = acc / work[t][c]
        vector = [zero] * matrix.cols
        vector[f] = one
        for c, xc in coords.items():
            vector[c] = -xc
        kernel.append(tuple(vector))
    return tuple(particular), kernel
