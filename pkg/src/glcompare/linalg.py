"""Exact linear algebra over the rationals, on plain lists of Fractions."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[Fraction(0)] * c for _ in range(r)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        return [[Fraction(0)] * (len(b[0]) if b else 0) for _ in a]
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)] if a else []


def rank(rows: Sequence[Sequence]) -> int:
    """Rank over Q by Gaussian elimination on sparse row dictionaries."""
    work = []
    for row in rows:
        d = {j: Fraction(x) for j, x in enumerate(row) if x}
        if d:
            work.append(d)
    return _sparse_rank(work)


def sparse_rank(rows: list[dict[int, Fraction]]) -> int:
    return _sparse_rank([{j: Fraction(x) for j, x in r.items() if x} for r in rows])


def _sparse_rank(work: list[dict[int, Fraction]]) -> int:
    pivots: dict[int, dict[int, Fraction]] = {}
    for row in work:
        row = dict(row)
        while row:
            col = min(row)
            piv = pivots.get(col)
            if piv is None:
                pivots[col] = row
                break
            factor = row[col] / piv[col]
            for j, v in piv.items():
                nv = row.get(j, 0) - factor * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
    return len(pivots)


def inverse(a: Matrix) -> Matrix:
    """Inverse of a square matrix; raises ``ZeroDivisionError`` when singular."""
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]
