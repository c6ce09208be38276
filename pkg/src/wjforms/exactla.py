"""Exact linear algebra over the integers.

Rank and nullspace are computed by fraction-free (Bareiss) elimination, so
every intermediate entry is a minor of the input and division is always
exact.  Pivots are chosen as the smallest nonzero entry in the current
column, which keeps minor growth down on the coefficient matrices produced
by Jacobi-form bases.  Nullspace vectors are returned as primitive integer
vectors with positive leading entry so downstream output is reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


class ExactMatrix:
    """Rectangular integer matrix; rows are lists of Python ints."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: list[list[int]]):
        self.entries = [list(r) for r in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        for r in self.entries:
            if len(r) != self.cols:
                raise ValueError("matrix rows must all have the same length")

    @classmethod
    def from_columns(cls, columns: list[list[int]]) -> "ExactMatrix":
        if not columns:
            return cls([])
        return cls([list(row) for row in zip(*columns)])

    def transpose(self) -> "ExactMatrix":
        if not self.entries:
            return ExactMatrix([])
        return ExactMatrix([list(r) for r in zip(*self.entries)])

    def mul_vector(self, v: list[int]) -> list[int]:
        if len(v) != self.cols:
            raise ValueError("vector length must match column count")
        return [sum(a * x for a, x in zip(row, v)) for row in self.entries]

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols})"


def _echelonize(entries: list[list[int]]) -> tuple[list[list[int]], list[tuple[int, int]]]:
    """Bareiss elimination in place; returns the matrix and (row, col) pivots.

    Columns are processed left to right, so the rank of any column prefix is
    the number of pivots falling inside that prefix.
    """
    if not entries:
        return entries, []
    nrows = len(entries)
    ncols = len(entries[0])
    pivots: list[tuple[int, int]] = []
    prev = 1
    pr = 0
    for pc in range(ncols):
        if pr >= nrows:
            break
        best = -1
        best_abs = 0
        for r in range(pr, nrows):
            v = entries[r][pc]
            if v:
                a = -v if v < 0 else v
                if best < 0 or a < best_abs:
                    best, best_abs = r, a
        if best < 0:
            continue
        if best != pr:
            entries[best], entries[pr] = entries[pr], entries[best]
        piv_row = entries[pr]
        p = piv_row[pc]
        for r in range(pr + 1, nrows):
            row = entries[r]
            f = row[pc]
            if f:
                row[pc:] = [
                    (p * x - f * y) // prev for x, y in zip(row[pc:], piv_row[pc:])
                ]
            elif prev != 1 or p != 1:
                row[pc + 1 :] = [p * x // prev for x in row[pc + 1 :]]
        pivots.append((pr, pc))
        prev = p
        pr += 1
    return entries, pivots


def rank(a: ExactMatrix) -> int:
    _, pivots = _echelonize([list(r) for r in a.entries])
    return len(pivots)


def rank_profile(a: ExactMatrix) -> list[int]:
    """Pivot column indices of the left-to-right elimination."""
    _, pivots = _echelonize([list(r) for r in a.entries])
    return [c for _, c in pivots]


def _primitive(v: list[Fraction]) -> list[int]:
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    for x in ints:
        if x:
            if x < 0:
                ints = [-y for y in ints]
            break
    return ints


def nullspace(a: ExactMatrix) -> list[list[int]]:
    """Basis of {x : Ax = 0}, one primitive integer vector per free column."""
    ech, pivots = _echelonize([list(r) for r in a.entries])
    ncols = a.cols
    pivot_cols = [c for _, c in pivots]
    pivot_set = set(pivot_cols)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis: list[list[int]] = []
    for fc in free_cols:
        x: list[Fraction] = [Fraction(0)] * ncols
        x[fc] = Fraction(1)
        for (pr, pc) in reversed(pivots):
            row = ech[pr]
            s = sum((Fraction(row[c]) * x[c] for c in range(pc + 1, ncols) if x[c]), Fraction(0))
            x[pc] = -s / row[pc]
        basis.append(_primitive(x))
    return basis


def functional_on_nullspace(a: ExactMatrix, f: list[int]) -> bool:
    """Whether the linear functional f is nonzero somewhere on ker(A)."""
    if len(f) != a.cols:
        raise ValueError("functional length must match column count")
    return any(
        sum(fi * vi for fi, vi in zip(f, v)) != 0 for v in nullspace(a)
    )
