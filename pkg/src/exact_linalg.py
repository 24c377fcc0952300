"""
Exact linear algebra over the rationals, backed by sympy's DomainMatrix
"""
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

Rows = Sequence[Sequence[Fraction]]


def _domain_matrix(rows: Rows, n_cols: int) -> DomainMatrix:
    data = [[QQ(int(v.numerator), int(v.denominator)) for v in row] for row in rows]
    return DomainMatrix(data, (len(data), n_cols), QQ)


def rref(rows: Rows, n_cols: int) -> Tuple[List[List[Fraction]], Tuple[int, ...]]:
    """Reduced row echelon form and pivot columns"""
    if not rows:
        return [], ()
    reduced, pivots = _domain_matrix(rows, n_cols).rref()
    matrix = reduced.to_Matrix()
    out = [
        [Fraction(int(matrix[i, j].p), int(matrix[i, j].q)) for j in range(n_cols)]
        for i in range(matrix.rows)
    ]
    return out, tuple(pivots)


def rank(rows: Rows, n_cols: int) -> int:
    if not rows:
        return 0
    return len(rref(rows, n_cols)[1])


def independent_rows(rows: Rows, n_cols: int) -> List[int]:
    """Indices of a maximal linearly independent subset, earliest rows first"""
    if not rows:
        return []
    # pivots of the transposed matrix are the independent rows
    transposed = [[rows[i][j] for i in range(len(rows))] for j in range(n_cols)]
    if not transposed:
        return []
    return list(rref(transposed, len(rows))[1])


def solve_square(rows: Rows, rhs: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """Unique solution of a square system, or None when singular"""
    n = len(rows)
    augmented = [list(row) + [rhs[i]] for i, row in enumerate(rows)]
    reduced, pivots = rref(augmented, n + 1)
    if pivots != tuple(range(n)):
        return None
    return [reduced[i][n] for i in range(n)]
