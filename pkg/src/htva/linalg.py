"""Exact rational linear algebra on small dense and sparse matrices.

Sparse vectors are plain dicts ``{index: Fraction}`` with zero entries
absent.  Everything here is exact; there is no floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

SparseVec = Dict[Hashable, Fraction]


def frac_matrix(rows: Iterable[Iterable]) -> List[List[Fraction]]:
    return [[Fraction(v) for v in row] for row in rows]


def det(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant by Gaussian elimination over the rationals."""
    a = frac_matrix(matrix)
    n = len(a)
    if n == 0:
        return Fraction(1)
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            result = -result
        p = a[col][col]
        result *= p
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] / p
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return result


def rref(matrix: Sequence[Sequence]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    a = frac_matrix(matrix)
    if not a:
        return [], []
    ncols = len(a[0])
    pivots: List[int] = []
    row = 0
    for col in range(ncols):
        pivot = next((r for r in range(row, len(a)) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[row], a[pivot] = a[pivot], a[row]
        p = a[row][col]
        a[row] = [x / p for x in a[row]]
        for r in range(len(a)):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
        if row == len(a):
            break
    return a[:row], pivots


def rank(matrix: Sequence[Sequence]) -> int:
    return len(rref(matrix)[1])


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> Optional[List[Fraction]]:
    """One solution of ``matrix @ v = rhs`` or None when inconsistent."""
    a = frac_matrix(matrix)
    if not a:
        return None
    ncols = len(a[0])
    aug = [row + [Fraction(b)] for row, b in zip(a, rhs)]
    rows, pivots = rref(aug)
    if ncols in pivots:
        return None
    sol = [Fraction(0)] * ncols
    for r, p in zip(rows, pivots):
        sol[p] = r[ncols]
    return sol


def inverse(matrix: Sequence[Sequence]) -> List[List[Fraction]]:
    n = len(matrix)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(frac_matrix(matrix))]
    rows, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(rows) < n:
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in rows]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> List[List[Fraction]]:
    return [[sum((Fraction(x) * Fraction(b[k][j]) for k, x in enumerate(row)), Fraction(0))
             for j in range(len(b[0]))] for row in a]


def integer_kernel(matrix: Sequence[Sequence[int]]) -> List[List[int]]:
    """Basis of the integer kernel of an integer matrix.

    Column operations with unimodular integer matrices bring the matrix into
    lower echelon form; the transformation columns sitting over the zero
    columns form a basis of the kernel lattice, and that basis is saturated
    because the transformation is invertible over the integers.
    """
    a = [list(map(int, row)) for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(target: int, source: int, q: int) -> None:
        # column target -= q * column source
        for row in a:
            row[target] -= q * row[source]
        for row in u:
            row[target] -= q * row[source]

    def swap(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in u:
            row[i], row[j] = row[j], row[i]

    lead = 0
    for r in range(m):
        if lead >= n:
            break
        while True:
            nz = [c for c in range(lead, n) if a[r][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda c: abs(a[r][c]))
            swap(lead, piv)
            done = True
            for c in range(lead + 1, n):
                if a[r][c] != 0:
                    col_op(c, lead, a[r][c] // a[r][lead])
                    if a[r][c] != 0:
                        done = False
            if done:
                break
        if any(a[r][c] != 0 for c in range(lead, n)):
            lead += 1
    basis = [[u[i][c] for i in range(n)] for c in range(lead, n)]
    return basis


class Echelon:
    """Incrementally built echelon basis of a space of sparse vectors.

    ``add`` returns True when the vector was independent.  Each stored row
    also remembers how it was combined from the inserted vectors, so the
    same object computes kernels (dependencies) and membership certificates.
    """

    def __init__(self, track: bool = False):
        self.rows: Dict[Hashable, SparseVec] = {}
        self.track = track
        self.combos: Dict[Hashable, SparseVec] = {}
        self._count = 0

    def __len__(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: SparseVec, combo: Optional[SparseVec]):
        vec = dict(vec)
        while vec:
            hit = None
            for key in vec:
                if key in self.rows:
                    hit = key
                    break
            if hit is None:
                break
            f = vec[hit]
            for k, v in self.rows[hit].items():
                nv = vec.get(k, 0) - f * v
                if nv:
                    vec[k] = nv
                else:
                    vec.pop(k, None)
            if combo is not None:
                for k, v in self.combos[hit].items():
                    nv = combo.get(k, 0) - f * v
                    if nv:
                        combo[k] = nv
                    else:
                        combo.pop(k, None)
        return vec, combo

    def reduce(self, vec: SparseVec) -> SparseVec:
        """Remainder of ``vec`` after clearing every pivot of the basis."""
        return self._reduce(vec, None)[0]

    def contains(self, vec: SparseVec) -> bool:
        return not self.reduce(vec)

    def add(self, vec: SparseVec, label: Optional[Hashable] = None):
        """Insert ``vec``.  With tracking, returns the dependency combo when
        ``vec`` reduces to zero, otherwise None; without tracking, returns
        whether the vector was new."""
        if label is None:
            label = self._count
        self._count += 1
        combo = {label: Fraction(1)} if self.track else None
        rest, combo = self._reduce(vec, combo)
        if not rest:
            return combo if self.track else False
        pivot = min(rest, key=_sort_key)
        p = rest[pivot]
        row = {k: v / p for k, v in rest.items()}
        if combo is not None:
            combo = {k: v / p for k, v in combo.items()}
        # keep rows fully reduced at the new pivot
        for key, other in self.rows.items():
            f = other.get(pivot)
            if f:
                for k, v in row.items():
                    nv = other.get(k, 0) - f * v
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
                if self.track:
                    oc = self.combos[key]
                    for k, v in combo.items():
                        nv = oc.get(k, 0) - f * v
                        if nv:
                            oc[k] = nv
                        else:
                            oc.pop(k, None)
        self.rows[pivot] = row
        if combo is not None:
            self.combos[pivot] = combo
        return None if self.track else True


def _sort_key(k):
    return (str(type(k)), k) if not isinstance(k, int) else ("", k)


def sparse_kernel(columns: Sequence[SparseVec]) -> List[SparseVec]:
    """Kernel basis of the linear map whose i-th column image is ``columns[i]``.

    Kernel vectors are returned as sparse dicts over column indices.
    """
    ech = Echelon(track=True)
    kernel = []
    for i, col in enumerate(columns):
        dep = ech.add(col, label=i)
        if dep is not None:
            kernel.append(dep)
    return kernel


def sparse_rank(vectors: Iterable[SparseVec]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return len(ech)
