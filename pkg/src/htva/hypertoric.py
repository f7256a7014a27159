"""Lattice and polyhedral data attached to a hypertoric input (Delta, delta).

Column indices in public data are 1-based, matching the usual labelling of
the coordinates x_1..x_N, y_1..y_N.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg

WEYL_ENUMERATION_BOUND = 10


class HypertoricError(ValueError):
    """Invalid or unsupported hypertoric input."""


class NonUnimodularError(HypertoricError):
    pass


class NonGenericError(HypertoricError):
    def __init__(self, message: str, wall: "Wall"):
        super().__init__(message)
        self.wall = wall


@dataclass(frozen=True)
class HypertoricInput:
    delta: Tuple[Tuple[int, ...], ...]
    stability: Tuple[Fraction, ...]

    @classmethod
    def create(cls, delta: Sequence[Sequence[int]], stability: Optional[Sequence] = None) -> "HypertoricInput":
        rows = tuple(tuple(int(v) for v in row) for row in delta)
        if not rows or not rows[0]:
            raise HypertoricError("Delta must be a non-empty matrix")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise HypertoricError("Delta rows have different lengths")
        m = len(rows)
        if m >= n:
            raise HypertoricError(f"need M < N, got M={m}, N={n}")
        if stability is None:
            stability = [0] * m
        stab = tuple(Fraction(v) for v in stability)
        if len(stab) != m:
            raise HypertoricError(f"stability has length {len(stab)}, expected M={m}")
        return cls(rows, stab)

    @property
    def M(self) -> int:
        return len(self.delta)

    @property
    def N(self) -> int:
        return len(self.delta[0])

    def column(self, j: int) -> Tuple[int, ...]:
        """Column Delta_j, 1-based."""
        return tuple(row[j - 1] for row in self.delta)

    def minor(self, cols: Sequence[int]) -> int:
        return int(linalg.det([[row[j - 1] for j in cols] for row in self.delta]))


@dataclass(frozen=True)
class ValidationReport:
    rank_ok: bool
    gcd_ok: bool
    unimodular: bool

    @property
    def ok(self) -> bool:
        return self.rank_ok and self.gcd_ok


def validate(inp: HypertoricInput) -> ValidationReport:
    minors = [inp.minor(J) for J in combinations(range(1, inp.N + 1), inp.M)]
    g = 0
    for v in minors:
        g = gcd(g, abs(v))
    return ValidationReport(
        rank_ok=linalg.rank(inp.delta) == inp.M,
        gcd_ok=g == 1,
        unimodular=all(v in (-1, 0, 1) for v in minors),
    )


def require_unimodular(inp: HypertoricInput) -> None:
    rep = validate(inp)
    if not rep.rank_ok:
        raise HypertoricError("Delta does not have full rank M")
    if not rep.unimodular:
        bad = [J for J in combinations(range(1, inp.N + 1), inp.M) if abs(inp.minor(J)) > 1]
        raise NonUnimodularError(f"Delta is not unimodular: minor over columns {list(bad[0])} "
                                 f"is {inp.minor(bad[0])}")


def gram_matrix(inp: HypertoricInput) -> List[List[int]]:
    return [[sum(a * b for a, b in zip(r, s)) for s in inp.delta] for r in inp.delta]


@dataclass(frozen=True)
class Wall:
    """A GIT wall: the span of a set of columns, of dimension M-1.

    ``columns`` lists every column of Delta lying in the wall, ``basis`` is
    the reduced row-echelon basis of the subspace (canonical key), and
    ``normal`` is a primitive integer normal vector.
    """

    columns: Tuple[int, ...]
    basis: Tuple[Tuple[Fraction, ...], ...]
    normal: Tuple[int, ...]

    def contains(self, v: Sequence) -> bool:
        return sum(Fraction(a) * b for a, b in zip(self.normal, v)) == 0


def _primitive(vec: Sequence[Fraction]) -> Tuple[int, ...]:
    den = 1
    for v in vec:
        den = den * Fraction(v).denominator // gcd(den, Fraction(v).denominator)
    ints = [int(Fraction(v) * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    ints = [v // g for v in ints] if g else ints
    first = next((v for v in ints if v), 1)
    return tuple(-v for v in ints) if first < 0 else tuple(ints)


def git_walls(inp: HypertoricInput) -> List[Wall]:
    m = inp.M
    if m == 1:
        return [Wall(tuple(j for j in range(1, inp.N + 1) if inp.column(j) == (0,)), (), (1,))]
    seen: Dict[tuple, Wall] = {}
    for J in combinations(range(1, inp.N + 1), m - 1):
        vecs = [inp.column(j) for j in J]
        rows, piv = linalg.rref(vecs)
        if len(piv) != m - 1:
            continue
        key = tuple(tuple(r) for r in rows)
        if key in seen:
            continue
        # normal: kernel of the (M-1) x M basis matrix
        free = next(c for c in range(m) if c not in piv)
        normal = [Fraction(0)] * m
        normal[free] = Fraction(1)
        for r, p in zip(rows, piv):
            normal[p] = -r[free]
        normal_int = _primitive(normal)
        members = tuple(j for j in range(1, inp.N + 1)
                        if sum(a * b for a, b in zip(normal_int, inp.column(j))) == 0)
        seen[key] = Wall(members, key, normal_int)
    return sorted(seen.values(), key=lambda w: (w.columns, w.normal))


def walls_containing(inp: HypertoricInput, v: Sequence) -> List[Wall]:
    return [w for w in git_walls(inp) if w.contains(v)]


def is_generic(inp: HypertoricInput) -> bool:
    if all(v == 0 for v in inp.stability):
        return False
    return not walls_containing(inp, inp.stability)


def semistable(inp: HypertoricInput, J1: Sequence[int], J2: Sequence[int]) -> bool:
    """Whether delta lies in the cone spanned by Delta_j (j in J1) and -Delta_j (j in J2).

    By Caratheodory it suffices to look for a nonnegative solution on a
    linearly independent subset of the generators.
    """
    target = list(inp.stability)
    if all(v == 0 for v in target):
        return True
    gens = [tuple(inp.column(j)) for j in sorted(set(J1))]
    gens += [tuple(-v for v in inp.column(j)) for j in sorted(set(J2))]
    gens = list(dict.fromkeys(gens))
    for size in range(1, min(inp.M, len(gens)) + 1):
        for subset in combinations(gens, size):
            mat = [[g[i] for g in subset] for i in range(inp.M)]
            if linalg.rank(mat) != size:
                continue
            sol = linalg.solve(mat, target)
            if sol is not None and all(s >= 0 for s in sol):
                return True
    return False


@dataclass(frozen=True)
class Chart:
    """Chart data for an M-subset J with unit minor.

    ``lam[i][p]`` is lambda_{i, J[p]}.  ``t_exponents[i]`` maps
    ``('x', j)`` / ``('y', j)`` to the exponent of that coordinate in T_i.
    ``coord_exponents[j]`` for j not in J is a pair of such maps for
    (a*_j, a_j); they include the leading x_j resp. y_j.
    """

    J: Tuple[int, ...]
    alpha: Tuple[Fraction, ...]
    J1: Tuple[int, ...]
    J2: Tuple[int, ...]
    lam: Tuple[Tuple[int, ...], ...]
    t_exponents: Tuple[Tuple[Tuple[Tuple[str, int], int], ...], ...]
    coord_exponents: Tuple[Tuple[int, Tuple[Tuple[Tuple[str, int], int], ...], Tuple[Tuple[Tuple[str, int], int], ...]], ...]

    @property
    def complement(self) -> Tuple[int, ...]:
        return tuple(j for j, _, _ in self.coord_exponents)

    def inverted(self) -> Tuple[Tuple[str, int], ...]:
        """Coordinates that are invertible on the chart."""
        return tuple(("x", j) for j in self.J1) + tuple(("y", j) for j in self.J2)

    def label(self) -> str:
        return ",".join(str(j) for j in self.J)


def _add_exp(acc: Dict[Tuple[str, int], int], src, scale: int) -> None:
    for k, v in src:
        acc[k] = acc.get(k, 0) + scale * v
        if acc[k] == 0:
            del acc[k]


def build_chart(inp: HypertoricInput, J: Sequence[int]) -> Chart:
    J = tuple(sorted(J))
    m = inp.M
    minor = inp.minor(J)
    if abs(minor) != 1:
        raise NonUnimodularError(f"chart J={list(J)} has minor {minor}, not +-1")
    dj = [[inp.delta[i][j - 1] for j in J] for i in range(m)]
    alpha = linalg.solve(dj, inp.stability)
    for p, a in enumerate(alpha):
        if a == 0:
            rest = [J[q] for q in range(m) if q != p]
            wall = next(w for w in git_walls(inp) if all(w.contains(inp.column(j)) for j in rest))
            raise NonGenericError(f"stability lies on the wall spanned by columns {rest}", wall)
    inv = linalg.inverse(dj)
    lam = tuple(tuple(int(inv[p][i]) for p in range(m)) for i in range(m))
    J1 = tuple(j for j, a in zip(J, alpha) if a > 0)
    J2 = tuple(j for j, a in zip(J, alpha) if a < 0)
    t_exp = []
    for i in range(m):
        e = {}
        for p, j in enumerate(J):
            if lam[i][p] == 0:
                continue
            if j in J1:
                e[("x", j)] = lam[i][p]
            else:
                e[("y", j)] = -lam[i][p]
        t_exp.append(tuple(sorted(e.items())))
    coords = []
    for j in range(1, inp.N + 1):
        if j in J:
            continue
        astar = {("x", j): 1}
        a = {("y", j): 1}
        for i in range(m):
            _add_exp(astar, t_exp[i], -inp.delta[i][j - 1])
            _add_exp(a, t_exp[i], inp.delta[i][j - 1])
        coords.append((j, tuple(sorted(astar.items())), tuple(sorted(a.items()))))
    return Chart(J, tuple(alpha), J1, J2, lam, tuple(t_exp), tuple(coords))


def enumerate_charts(inp: HypertoricInput) -> List[Chart]:
    require_unimodular(inp)
    if all(v == 0 for v in inp.stability):
        raise NonGenericError("stability parameter is zero", git_walls(inp)[0])
    charts = []
    for J in combinations(range(1, inp.N + 1), inp.M):
        if inp.minor(J) == 0:
            continue
        charts.append(build_chart(inp, J))
    return charts


def chart_by_label(inp: HypertoricInput, J: Sequence[int]) -> Chart:
    J = tuple(sorted(int(j) for j in J))
    for ch in enumerate_charts(inp):
        if ch.J == J:
            return ch
    raise HypertoricError(f"no chart with J={list(J)}")


def _hermite_rows(basis: List[List[int]]) -> List[List[int]]:
    """Row Hermite normal form: canonical basis of the lattice spanned."""
    a = [list(r) for r in basis]
    if not a:
        return a
    n = len(a[0])
    row = 0
    for col in range(n):
        while True:
            nz = [r for r in range(row, len(a)) if a[r][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda r: abs(a[r][col]))
            a[row], a[piv] = a[piv], a[row]
            clean = True
            for r in range(row + 1, len(a)):
                if a[r][col]:
                    q = a[r][col] // a[row][col]
                    a[r] = [x - q * y for x, y in zip(a[r], a[row])]
                    if a[r][col]:
                        clean = False
            if clean:
                break
        if row < len(a) and a[row][col] != 0:
            if a[row][col] < 0:
                a[row] = [-x for x in a[row]]
            for r in range(row):
                q = a[r][col] // a[row][col]
                a[r] = [x - q * y for x, y in zip(a[r], a[row])]
            row += 1
            if row == len(a):
                break
    return a[:row]


def lattice_lambda0(inp: HypertoricInput) -> List[List[int]]:
    """Saturated basis of the integer kernel of Delta, in row Hermite form."""
    return _hermite_rows(linalg.integer_kernel(inp.delta))


def in_lambda0(inp: HypertoricInput, v: Sequence[int]) -> bool:
    return all(sum(a * b for a, b in zip(row, v)) == 0 for row in inp.delta)


def euler_beta(inp: HypertoricInput, k: int) -> List[Fraction]:
    """beta = G^-1 Delta e_k (k is 1-based)."""
    g = gram_matrix(inp)
    return linalg.solve(g, list(inp.column(k)))


@dataclass(frozen=True)
class SignedPermutation:
    """v -> (signs[k] * v[perm^-1(k)])_k; ``perm[j]`` is the image of j (0-based)."""

    perm: Tuple[int, ...]
    signs: Tuple[int, ...]

    @property
    def inverse_perm(self) -> Tuple[int, ...]:
        inv = [0] * len(self.perm)
        for j, k in enumerate(self.perm):
            inv[k] = j
        return tuple(inv)

    def act(self, v: Sequence) -> List:
        inv = self.inverse_perm
        return [self.signs[k] * v[inv[k]] for k in range(len(v))]

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """self after other."""
        n = len(self.perm)
        perm = tuple(self.perm[other.perm[j]] for j in range(n))
        signs = tuple(self.signs[k] * other.signs[self.inverse_perm[k]] for k in range(n))
        return SignedPermutation(perm, signs)

    def inverse(self) -> "SignedPermutation":
        inv = self.inverse_perm
        signs = tuple(self.signs[self.perm[j]] for j in range(len(self.perm)))
        return SignedPermutation(inv, signs)

    def is_identity(self) -> bool:
        return self.perm == tuple(range(len(self.perm))) and all(s == 1 for s in self.signs)

    def flipped(self) -> Tuple[int, ...]:
        """Target coordinates (0-based) carrying a sign flip."""
        return tuple(k for k, s in enumerate(self.signs) if s < 0)

    def to_json(self) -> dict:
        return {"perm": [p + 1 for p in self.perm], "signs": list(self.signs)}


def weyl_group(inp: HypertoricInput) -> List[SignedPermutation]:
    n = inp.N
    if n > WEYL_ENUMERATION_BOUND:
        raise HypertoricError(f"N={n} is too large for the signed-permutation search "
                              f"(bound {WEYL_ENUMERATION_BOUND})")
    basis = lattice_lambda0(inp)
    cols = [tuple(v[j] for v in basis) for j in range(n)]
    found: List[SignedPermutation] = []
    inv = [0] * n
    signs = [1] * n
    used = [False] * n

    def extend(k: int) -> None:
        if k == n:
            perm = [0] * n
            for t, src in enumerate(inv):
                perm[src] = t
            found.append(SignedPermutation(tuple(perm), tuple(signs)))
            return
        target = cols[k]
        for src in range(n):
            if used[src]:
                continue
            for s in (1, -1):
                if all(s * a == b for a, b in zip(cols[src], target)):
                    used[src] = True
                    inv[k] = src
                    signs[k] = s
                    extend(k + 1)
                    used[src] = False
    extend(0)
    found.sort(key=lambda g: (not g.is_identity(), g.perm, g.signs))
    return found


def check_group_closure(group: Sequence[SignedPermutation]) -> bool:
    members = set(group)
    return all(a.compose(b) in members for a in group for b in group) and \
        all(a.inverse() in members for a in group)
