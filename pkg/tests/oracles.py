"""Independent brute-force oracles, written against sympy and itertools only.

Nothing here imports the package's linear algebra; the point is to have a
second derivation of every combinatorial value the package computes.
"""

from fractions import Fraction
from itertools import combinations, permutations, product

import sympy


def gram(delta):
    d = sympy.Matrix(delta)
    return [[int(v) for v in row] for row in (d * d.T).tolist()]


def kernel_basis(delta):
    """A rational basis of ker(Delta) from sympy."""
    return [list(v) for v in sympy.Matrix(delta).nullspace()]


def in_kernel(delta, v):
    return all(sum(a * b for a, b in zip(row, v)) == 0 for row in delta)


def kernel_points(delta, box=2):
    n = len(delta[0])
    return [v for v in product(range(-box, box + 1), repeat=n) if any(v) and in_kernel(delta, v)]


def lattice_contains(basis, v):
    """Whether v is an integer combination of the given basis vectors."""
    mat = sympy.Matrix(basis).T
    sol, params = mat.gauss_jordan_solve(sympy.Matrix(v))
    if params.shape[0]:
        sol = sol.subs({p: 0 for p in params})
    return all(s.is_integer for s in sol)


def wall_count(delta):
    """Distinct hyperplanes of R^M spanned by columns of Delta."""
    m, n = len(delta), len(delta[0])
    if m == 1:
        return 1
    cols = [sympy.Matrix([delta[i][j] for i in range(m)]) for j in range(n)]
    normals = set()
    for subset in combinations(range(n), m - 1):
        mat = sympy.Matrix.hstack(*[cols[j] for j in subset])
        if mat.rank() != m - 1:
            continue
        nv = mat.T.nullspace()[0]
        den = sympy.ilcm(*[sympy.fraction(x)[1] for x in nv])
        ints = [int(x * den) for x in nv]
        g = 0
        for x in ints:
            g = sympy.igcd(g, abs(x))
        ints = [x // g for x in ints]
        if next(x for x in ints if x) < 0:
            ints = [-x for x in ints]
        normals.add(tuple(ints))
    return len(normals)


def chart_data(delta, stability):
    """{J: alpha} over column subsets with nonzero minor."""
    m, n = len(delta), len(delta[0])
    out = {}
    for J in combinations(range(1, n + 1), m):
        mat = sympy.Matrix([[delta[i][j - 1] for j in J] for i in range(m)])
        if mat.det() == 0:
            continue
        alpha = mat.LUsolve(sympy.Matrix([sympy.Rational(str(s)) for s in stability]))
        out[J] = [Fraction(int(sympy.fraction(a)[0]), int(sympy.fraction(a)[1])) for a in alpha]
    return out


def euler_beta(delta, k):
    d = sympy.Matrix(delta)
    b = (d * d.T).LUsolve(d[:, k - 1])
    return [Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in b]


def weyl_order(delta):
    """Signed permutations fixing ker(Delta) pointwise, by exhaustion."""
    n = len(delta[0])
    basis = kernel_basis(delta)
    count = 0
    for perm in permutations(range(n)):
        for signs in product((1, -1), repeat=n):
            ok = True
            for v in basis:
                img = [0] * n
                for j in range(n):
                    img[perm[j]] = signs[perm[j]] * v[j]
                if any(sympy.simplify(a - b) != 0 for a, b in zip(img, v)):
                    ok = False
                    break
            count += ok
    return count


def unimodular(delta):
    m, n = len(delta), len(delta[0])
    minors = set()
    for J in combinations(range(n), m):
        minors.add(abs(sympy.Matrix([[delta[i][j] for j in J] for i in range(m)]).det()))
    return minors <= {0, 1}


def golden(delta, stability):
    m, n = len(delta), len(delta[0])
    charts = chart_data(delta, stability)
    return {
        "delta": delta,
        "stability": [str(s) for s in stability],
        "unimodular": unimodular(delta),
        "gram": gram(delta),
        "walls": wall_count(delta),
        "charts": {",".join(map(str, J)): [str(a) for a in alpha] for J, alpha in charts.items()},
        "lambda0_rank": n - m,
        "kernel_points_box2": [list(v) for v in kernel_points(delta)],
        "beta": {str(k): [str(b) for b in euler_beta(delta, k)] for k in range(1, n + 1)},
        "weyl_order": weyl_order(delta),
    }
