"""Exact linear algebra over Q[i]: echelon forms, kernels, affine solution
sets, and subspace set-algebra.

Conventions that make every result canonical (hence testable bit-for-bit):
pivots are leftmost, pivot entries are normalized to 1, elimination is full
(above and below), and basis rows are ordered by pivot column.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .scalars import GaussScalar, ONE, ZERO

Vector = tuple[GaussScalar, ...]


class LinAlgError(ValueError):
    pass


def vec(entries: Iterable) -> Vector:
    return tuple(GaussScalar.coerce(e) for e in entries)


def zero_vec(n: int) -> Vector:
    return (ZERO,) * n


def unit_vec(n: int, j: int) -> Vector:
    return tuple(ONE if k == j else ZERO for k in range(n))


def vec_add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vec_sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vec_scale(c: GaussScalar, a: Vector) -> Vector:
    return tuple(c * x for x in a)


def vec_is_zero(a: Vector) -> bool:
    return all(x.is_zero() for x in a)


@dataclass(frozen=True)
class ExactMatrix:
    """Dense matrix over Q[i], row-major."""

    rows: tuple[Vector, ...]
    cols: int

    def __post_init__(self):
        for r in self.rows:
            if len(r) != self.cols:
                raise LinAlgError("ragged rows")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @staticmethod
    def from_rows(rows: Sequence[Sequence], cols: int | None = None) -> "ExactMatrix":
        rs = tuple(vec(r) for r in rows)
        if cols is None:
            if not rs:
                raise LinAlgError("cannot infer width of an empty matrix")
            cols = len(rs[0])
        return ExactMatrix(rs, cols)

    @staticmethod
    def zero(nrows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix(tuple(zero_vec(cols) for _ in range(nrows)), cols)

    @staticmethod
    def identity(n: int) -> "ExactMatrix":
        return ExactMatrix(tuple(unit_vec(n, j) for j in range(n)), n)

    def mul_vec(self, v: Vector) -> Vector:
        if len(v) != self.cols:
            raise LinAlgError("dimension mismatch in mat*vec")
        out = []
        for row in self.rows:
            s = ZERO
            for a, x in zip(row, v):
                if a and x:
                    s = s + a * x
            out.append(s)
        return tuple(out)

    def stack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.cols:
            raise LinAlgError("dimension mismatch in stack")
        return ExactMatrix(self.rows + other.rows, self.cols)


def _rref_rows(rows: list[list[GaussScalar]], width: int) -> tuple[list[list[GaussScalar]], list[int]]:
    pivots: list[int] = []
    piv_r = 0
    nrows = len(rows)
    for col in range(width):
        sel = None
        for r in range(piv_r, nrows):
            if rows[r][col]:
                sel = r
                break
        if sel is None:
            continue
        rows[piv_r], rows[sel] = rows[sel], rows[piv_r]
        inv = ONE / rows[piv_r][col]
        if inv != ONE:
            rows[piv_r] = [inv * x for x in rows[piv_r]]
        prow = rows[piv_r]
        for r in range(nrows):
            if r == piv_r:
                continue
            f = rows[r][col]
            if not f:
                continue
            rows[r] = [x - f * y for x, y in zip(rows[r], prow)]
        pivots.append(col)
        piv_r += 1
        if piv_r == nrows:
            break
    return rows[:piv_r] + rows[piv_r:], pivots


def rref(m: ExactMatrix) -> tuple[ExactMatrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    rows = [list(r) for r in m.rows]
    rows, pivots = _rref_rows(rows, m.cols)
    return ExactMatrix(tuple(tuple(r) for r in rows), m.cols), tuple(pivots)


def rank(m: ExactMatrix) -> int:
    return len(rref(m)[1])


@dataclass(frozen=True)
class Subspace:
    """A linear subspace given by a reduced-echelon row basis."""

    ambient_dim: int
    basis: tuple[Vector, ...]

    @staticmethod
    def zero(n: int) -> "Subspace":
        return Subspace(n, ())

    @staticmethod
    def full(n: int) -> "Subspace":
        return Subspace(n, tuple(unit_vec(n, j) for j in range(n)))

    @staticmethod
    def from_vectors(vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        rows = [[GaussScalar.coerce(e) for e in v] for v in vectors]
        for r in rows:
            if len(r) != ambient_dim:
                raise LinAlgError("vector length != ambient dimension")
        rows, pivots = _rref_rows(rows, ambient_dim)
        return Subspace(ambient_dim, tuple(tuple(r) for r in rows[: len(pivots)]))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, v: Vector) -> Vector:
        """Eliminate the pivot coordinates of v against the echelon basis.

        Linear in v; the result is the canonical coset representative."""
        w = list(v)
        for row in self.basis:
            p = next(j for j, x in enumerate(row) if x)
            f = w[p]
            if f:
                w = [a - f * b for a, b in zip(w, row)]
        return tuple(w)

    def contains(self, v: Sequence) -> bool:
        v = vec(v)
        if len(v) != self.ambient_dim:
            raise LinAlgError("dimension mismatch in membership test")
        return vec_is_zero(self.reduce(v))

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def add(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise LinAlgError("dimension mismatch in subspace sum")
        return Subspace.from_vectors(self.basis + other.basis, self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise LinAlgError("dimension mismatch in subspace intersection")
        if not self.basis or not other.basis:
            return Subspace.zero(self.ambient_dim)
        # kernel of [A; B]^T gives the coefficient relations; the A-part of
        # each relation spans the intersection
        stacked = ExactMatrix(self.basis + other.basis, self.ambient_dim)
        cols = ExactMatrix.from_rows(
            [[stacked.rows[r][c] for r in range(stacked.nrows)] for c in range(self.ambient_dim)],
            stacked.nrows,
        )
        ker = kernel_basis(cols)
        a = self.dim
        out = []
        for rel in ker.basis:
            v = zero_vec(self.ambient_dim)
            for c, row in zip(rel[:a], self.basis):
                if c:
                    v = vec_add(v, vec_scale(c, row))
            out.append(v)
        return Subspace.from_vectors(out, self.ambient_dim)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis


def quotient_dim(big: Subspace, small: Subspace) -> int:
    """dim(big/small); requires small to be contained in big."""
    if big.ambient_dim != small.ambient_dim:
        raise LinAlgError("dimension mismatch in quotient")
    if not big.contains_space(small):
        raise LinAlgError("quotient by a subspace that is not contained")
    return big.dim - small.dim


@dataclass(frozen=True)
class AffineSet:
    """Solution set particular + direction, or the empty set."""

    particular: Vector | None
    direction: Subspace

    @staticmethod
    def empty(n: int) -> "AffineSet":
        return AffineSet(None, Subspace.zero(n))

    @property
    def is_empty(self) -> bool:
        return self.particular is None

    def contains(self, v: Sequence) -> bool:
        if self.is_empty:
            return False
        return self.direction.contains(vec_sub(vec(v), self.particular))


def kernel_basis(m: ExactMatrix) -> Subspace:
    """Canonical basis of the null space {v : m v = 0}."""
    r, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * m.cols
        v[fc] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -r.rows[i][fc]
        basis.append(v)
    return Subspace.from_vectors(basis, m.cols)


def row_space(m: ExactMatrix) -> Subspace:
    return Subspace.from_vectors(m.rows, m.cols)


def image(m: ExactMatrix) -> Subspace:
    """Column space of m, as a subspace of the target."""
    cols = [[m.rows[r][c] for r in range(m.nrows)] for c in range(m.cols)]
    return Subspace.from_vectors(cols, m.nrows)


def solve(m: ExactMatrix, b: Sequence) -> AffineSet:
    """All x with m x = b, as a particular solution plus kernel directions."""
    b = vec(b)
    if len(b) != m.nrows:
        raise LinAlgError("dimension mismatch in solve")
    rows = [list(r) + [bb] for r, bb in zip(m.rows, b)]
    rows, pivots = _rref_rows(rows, m.cols + 1)
    if m.cols in pivots:
        return AffineSet.empty(m.cols)
    x = [ZERO] * m.cols
    for i, pc in enumerate(pivots):
        x[pc] = rows[i][m.cols]
    return AffineSet(tuple(x), kernel_basis(m))
