"""Integer Smith normal form and abelian invariants of presentations.

All arithmetic is on Python ints, so entries never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import UnknownGenerator
from ..word import Word
from .core import FinitePresentation


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __init__(self, entries: Sequence[Sequence[int]], rows: int | None = None, cols: int | None = None):
        grid = tuple(tuple(int(x) for x in row) for row in entries)
        r = len(grid) if rows is None else rows
        c = (len(grid[0]) if grid else 0) if cols is None else cols
        if len(grid) != r or any(len(row) != c for row in grid):
            raise ValueError("entry grid does not match the stated dimensions")
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "cols", c)
        object.__setattr__(self, "entries", grid)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        cols_b = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in cols_b] for row in self.entries],
            self.rows,
            other.cols,
        )

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def diagonal(self) -> list[int]:
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]

    def det(self) -> int:
        """Fraction-free (Bareiss) determinant."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [list(row) for row in self.entries]
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k]:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SnfResult:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and a divisibility chain on ``D``."""

    D: IntMatrix
    U: IntMatrix
    V: IntMatrix

    @property
    def invariants(self) -> list[int]:
        return self.D.diagonal()

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariants if d)


def smith_normal_form(A: IntMatrix | Sequence[Sequence[int]]) -> SnfResult:
    """Deterministic Smith normal form.

    Pivot rule: the nonzero entry of least absolute value in the active
    submatrix, ties broken in row-major order. Row operations are mirrored in
    ``U``, column operations in ``V``.
    """
    if not isinstance(A, IntMatrix):
        A = IntMatrix(A)
    m, n = A.rows, A.cols
    a = A.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        ra, rs = a[dst], a[src]
        for j in range(n):
            ra[j] += q * rs[j]
        ua, us = U[dst], U[src]
        for j in range(m):
            ua[j] += q * us[j]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in a:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                row = a[i]
                for j in range(t, n):
                    x = row[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
            if any(a[i][t] for i in range(t + 1, m)) or any(a[t][j] for j in range(t + 1, n)):
                continue  # nonzero remainders are smaller than p; re-pivot
            bad = next(
                (i for i in range(t + 1, m) if any(a[i][j] % p for j in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if best is None:
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
    return SnfResult(IntMatrix(a, m, n), IntMatrix(U, m, m), IntMatrix(V, n, n))


@dataclass(frozen=True)
class AbelianInvariants:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"


def relation_matrix(p: FinitePresentation) -> IntMatrix:
    """Exponent sums: one row per relator, one column per generator."""
    idx = {g: i for i, g in enumerate(p.generators)}
    rows = []
    for r in p.relators:
        row = [0] * len(idx)
        for g, e in r.syllables:
            row[idx[g]] += e
        rows.append(row)
    return IntMatrix(rows, len(rows), len(idx))


def _invariants_from(snf: SnfResult, ngens: int) -> AbelianInvariants:
    diag = snf.invariants
    rank = snf.rank
    return AbelianInvariants(ngens - rank, tuple(d for d in diag if d > 1))


def abelianization(p: FinitePresentation) -> AbelianInvariants:
    snf = smith_normal_form(relation_matrix(p))
    return _invariants_from(snf, len(p.generators))


def image_in_abelianization(p: FinitePresentation, w: Word) -> tuple[int, ...]:
    """Coordinates of ``[w]`` in ``Z^free_rank + Z/d_1 + ... + Z/d_k``.

    Free coordinates come first, then one residue per torsion summand (in the
    order of :attr:`AbelianInvariants.torsion`).

    With ``U A V = D`` the change of basis ``x -> x V`` carries the relation
    lattice (row space of ``A``) onto the row space of ``D``.
    """
    p.alphabet.check(w, "word")
    snf = smith_normal_form(relation_matrix(p))
    n = len(p.generators)
    e = [w.exponent_sum(g) for g in p.generators]
    V = snf.V.entries
    y = [sum(e[i] * V[i][j] for i in range(n)) for j in range(n)]
    diag = snf.invariants
    rank = snf.rank
    free = [y[j] for j in range(rank, n)]
    torsion = [y[j] % diag[j] for j in range(rank) if diag[j] > 1]
    return tuple(free + torsion)


def has_infinite_abelian_image(p: FinitePresentation, w: Word) -> bool:
    free_rank = abelianization(p).free_rank
    coords = image_in_abelianization(p, w)
    return any(coords[:free_rank])
