"""Weyl-algebra quantization oracle, Zhu and C2 algebras of the BRST cohomology.

The Weyl side works in D(V) tensor Q[c_1..c_M] with normally ordered terms
x^a d^b c^e.  The vertex side works in the BRST complex with hbar set to 1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb, factorial
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy

from . import hypertoric as ht
from . import linalg
from .brst import (BRSTContext, basis_of_piece, cohomology, differential, h_tilde, p_tilde)
from .linalg import Echelon
from .vertex_engine import (C, PSI, PSISTAR, X, Y, FockState, conformal_weight, format_state,
                            nth_product, term_grading, translation, vacuum)

WeylKey = Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]


class NonInvariantError(ValueError):
    """A Weyl element has a torus weight outside the orthogonal lattice."""


class WeylElement:
    """Sum of coefficient * x^a d^b c^e with all x to the left of all d."""

    __slots__ = ("n", "m", "terms")

    def __init__(self, n: int, m: int, terms: Mapping[WeylKey, Fraction] = ()):
        self.n, self.m = n, m
        self.terms = {k: Fraction(v) for k, v in dict(terms).items() if v}

    @classmethod
    def const(cls, n: int, m: int, value=1) -> "WeylElement":
        return cls(n, m, {((0,) * n, (0,) * n, (0,) * m): Fraction(value)})

    @classmethod
    def x(cls, n: int, m: int, k: int) -> "WeylElement":
        a = [0] * n
        a[k - 1] = 1
        return cls(n, m, {(tuple(a), (0,) * n, (0,) * m): Fraction(1)})

    @classmethod
    def d(cls, n: int, m: int, k: int) -> "WeylElement":
        b = [0] * n
        b[k - 1] = 1
        return cls(n, m, {((0,) * n, tuple(b), (0,) * m): Fraction(1)})

    @classmethod
    def c(cls, n: int, m: int, i: int) -> "WeylElement":
        e = [0] * m
        e[i - 1] = 1
        return cls(n, m, {((0,) * n, (0,) * n, tuple(e)): Fraction(1)})

    def _like(self, terms) -> "WeylElement":
        return WeylElement(self.n, self.m, terms)

    def __add__(self, other: "WeylElement") -> "WeylElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return self._like(out)

    def __sub__(self, other: "WeylElement") -> "WeylElement":
        return self + other * -1

    def __neg__(self) -> "WeylElement":
        return self * -1

    def __mul__(self, other):
        if isinstance(other, WeylElement):
            return weyl_mul(self, other)
        s = Fraction(other)
        return self._like({k: v * s for k, v in self.terms.items()})

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int) -> "WeylElement":
        out = WeylElement.const(self.n, self.m)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, WeylElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "WeylElement(0)"
        parts = []
        for (a, b, e), v in sorted(self.terms.items()):
            f = [f"x{k + 1}^{p}" if p > 1 else f"x{k + 1}" for k, p in enumerate(a) if p]
            f += [f"d{k + 1}^{p}" if p > 1 else f"d{k + 1}" for k, p in enumerate(b) if p]
            f += [f"c{k + 1}^{p}" if p > 1 else f"c{k + 1}" for k, p in enumerate(e) if p]
            parts.append(f"{v}*" + "*".join(f) if f else str(v))
        return "WeylElement(" + " + ".join(parts) + ")"


def weyl_mul(u: WeylElement, v: WeylElement) -> WeylElement:
    """Normal-ordered product; d^b x^a' = sum_k C(b,k) C(a',k) k! x^(a'-k) d^(b-k)."""
    n = u.n
    out: Dict[WeylKey, Fraction] = {}
    for (a, b, e), cu in u.terms.items():
        for (a2, b2, e2), cv in v.terms.items():
            ranges = [range(min(b[l], a2[l]) + 1) for l in range(n)]
            ee = tuple(p + q for p, q in zip(e, e2))
            for ks in product(*ranges):
                coef = cu * cv
                for l, k in enumerate(ks):
                    if k:
                        coef *= comb(b[l], k) * comb(a2[l], k) * factorial(k)
                key = (tuple(a[l] + a2[l] - ks[l] for l in range(n)),
                       tuple(b[l] + b2[l] - ks[l] for l in range(n)), ee)
                out[key] = out.get(key, 0) + coef
    return WeylElement(n, u.m, out)


def weyl_commutator(u: WeylElement, v: WeylElement) -> WeylElement:
    return weyl_mul(u, v) - weyl_mul(v, u)


def p_zeta(inp: ht.HypertoricInput, zeta: Sequence[int]) -> WeylElement:
    if not ht.in_lambda0(inp, zeta):
        raise NonInvariantError(f"{list(zeta)} is not in the orthogonal lattice")
    a = tuple(max(z, 0) for z in zeta)
    b = tuple(max(-z, 0) for z in zeta)
    return WeylElement(inp.N, inp.M, {(a, b, (0,) * inp.M): Fraction(1)})


def h_k(inp: ht.HypertoricInput, k: int) -> WeylElement:
    n, m = inp.N, inp.M
    out = WeylElement.x(n, m, k) * WeylElement.d(n, m, k)
    for i, b in enumerate(ht.euler_beta(inp, k), start=1):
        out = out - WeylElement.c(n, m, i) * b
    return out


def mu_d(inp: ht.HypertoricInput, i: int) -> WeylElement:
    n, m = inp.N, inp.M
    out = WeylElement(n, m)
    for k in range(1, n + 1):
        if inp.delta[i - 1][k - 1]:
            out = out + WeylElement.x(n, m, k) * WeylElement.d(n, m, k) * inp.delta[i - 1][k - 1]
    return out


# ---------------------------------------------------------------------------
# reduction to p(H, c) P_zeta

class _Symbols:
    def __init__(self, inp: ht.HypertoricInput):
        self.theta = sympy.symbols(f"theta1:{inp.N + 1}")
        self.H = sympy.symbols(f"H1:{inp.N + 1}")
        self.c = sympy.symbols(f"c1:{inp.M + 1}")


def _falling(expr, k: int):
    out = sympy.Integer(1)
    for j in range(k):
        out *= (expr - j)
    return out


def pivot_columns(inp: ht.HypertoricInput) -> Tuple[int, ...]:
    """Lexicographically first M-subset of columns with minor +-1."""
    for J in combinations(range(1, inp.N + 1), inp.M):
        if abs(inp.minor(J)) == 1:
            return J
    raise ht.NonUnimodularError("no unit minor")


@dataclass
class ReducedElement:
    """sum_zeta p_zeta(H_free, c) P_zeta; H_k for pivot k are eliminated."""

    components: Dict[Tuple[int, ...], sympy.Poly]
    free: Tuple[int, ...]
    gens: tuple

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReducedElement):
            return NotImplemented
        keys = set(self.components) | set(other.components)
        for z in keys:
            a = self.components.get(z)
            b = other.components.get(z)
            if (a is None or a.is_zero) and (b is None or b.is_zero):
                continue
            if a is None or b is None or a != b:
                return False
        return True

    def is_zero(self) -> bool:
        return all(p.is_zero for p in self.components.values())

    def uses_c(self) -> bool:
        nfree = len(self.free)
        for p in self.components.values():
            for monom in p.monoms():
                if any(monom[nfree:]):
                    return True
        return False

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for z, p in sorted(self.components.items()):
            if p.is_zero:
                continue
            expr = p.as_expr()
            parts.append(f"({expr})" + ("" if not any(z) else f"*P{z}"))
        return " + ".join(parts)


def _reduction_data(inp: ht.HypertoricInput):
    sy = _Symbols(inp)
    K = pivot_columns(inp)
    free = tuple(k for k in range(1, inp.N + 1) if k not in K)
    dk = [[inp.delta[i][k - 1] for k in K] for i in range(inp.M)]
    dk_inv = linalg.inverse(dk)
    # H_K = -D_K^-1 sum_{k free} Delta_.k H_k
    h_sub = {}
    for p, k in enumerate(K):
        expr = sympy.Integer(0)
        for f in free:
            s = sum(dk_inv[p][i] * inp.delta[i][f - 1] for i in range(inp.M))
            if s:
                expr -= sympy.Rational(s.numerator, s.denominator) * sy.H[f - 1]
        h_sub[sy.H[k - 1]] = expr
    theta_sub = {}
    for k in range(1, inp.N + 1):
        beta = ht.euler_beta(inp, k)
        expr = sy.H[k - 1] + sum((sympy.Rational(b.numerator, b.denominator) * sy.c[i]
                                  for i, b in enumerate(beta)), sympy.Integer(0))
        theta_sub[sy.theta[k - 1]] = expr.subs(h_sub)
    gens = tuple(sy.H[f - 1] for f in free) + tuple(sy.c)
    return sy, free, theta_sub, gens


def theta_form(inp: ht.HypertoricInput, a: WeylElement) -> Dict[Tuple[int, ...], sympy.Expr]:
    """Rewrite a as sum_zeta p_zeta(theta, c) P_zeta with theta_k = x_k d_k on the left."""
    sy = _Symbols(inp)
    out: Dict[Tuple[int, ...], sympy.Expr] = {}
    for (xa, xb, e), coef in a.terms.items():
        zeta = tuple(p - q for p, q in zip(xa, xb))
        if not ht.in_lambda0(inp, zeta):
            raise NonInvariantError(f"term with torus weight {zeta} is not invariant")
        expr = sympy.Rational(coef.numerator, coef.denominator)
        for k in range(inp.N):
            p, q = xa[k], xb[k]
            if p >= q:
                expr *= _falling(sy.theta[k] - p + q, q)
            else:
                expr *= _falling(sy.theta[k], p)
        for i, ei in enumerate(e):
            expr *= sy.c[i] ** ei
        out[zeta] = out.get(zeta, sympy.Integer(0)) + expr
    return out


def reduce_mod_ideal(inp: ht.HypertoricInput, a: WeylElement) -> ReducedElement:
    sy, free, theta_sub, gens = _reduction_data(inp)
    comps = {}
    for zeta, expr in theta_form(inp, a).items():
        poly = sympy.Poly(sympy.expand(expr.subs(theta_sub, simultaneous=True)), *gens, domain="QQ")
        if not poly.is_zero:
            comps[zeta] = poly
    return ReducedElement(comps, free, gens)


# ---------------------------------------------------------------------------
# the group action on the Weyl algebra

def c_relabeling(inp: ht.HypertoricInput, sigma: ht.SignedPermutation):
    """(lam, shift) with sigma(c_i) = sum_l lam[i][l] c_l + shift[i].

    sigma(mu_D(A_i)) = sum_l lam_il mu_D(A_l) + shift_i because x d -> -(x d + 1)
    on flipped coordinates; the ideal is preserved exactly when c is relabelled
    the same way.
    """
    dt = [[inp.delta[l][k] for l in range(inp.M)] for k in range(inp.N)]
    lam, shift = [], []
    for i in range(inp.M):
        target = sigma.act(list(inp.delta[i]))
        sol = linalg.solve(dt, target)
        if sol is None:
            raise ValueError("signed permutation does not preserve the row space")
        lam.append([int(v) if v.denominator == 1 else v for v in sol])
        shift.append(-sum(inp.delta[i][j] for j in range(inp.N) if sigma.signs[sigma.perm[j]] < 0))
    return lam, shift


def weyl_act(inp: ht.HypertoricInput, sigma: ht.SignedPermutation, a: WeylElement) -> WeylElement:
    n, m = inp.N, inp.M
    lam, shift = c_relabeling(inp, sigma)
    img_x, img_d, img_c = [], [], []
    for j in range(n):
        k = sigma.perm[j]
        if sigma.signs[k] > 0:
            img_x.append(WeylElement.x(n, m, k + 1))
            img_d.append(WeylElement.d(n, m, k + 1))
        else:
            img_x.append(-WeylElement.d(n, m, k + 1))
            img_d.append(WeylElement.x(n, m, k + 1))
    for i in range(m):
        e = WeylElement.const(n, m, shift[i])
        for l in range(m):
            if lam[i][l]:
                e = e + WeylElement.c(n, m, l + 1) * lam[i][l]
        img_c.append(e)
    out = WeylElement(n, m)
    for (xa, xb, ce), coef in a.terms.items():
        t = WeylElement.const(n, m, coef)
        for j in range(n):
            if xa[j]:
                t = t * img_x[j] ** xa[j]
        for j in range(n):
            if xb[j]:
                t = t * img_d[j] ** xb[j]
        for i in range(m):
            if ce[i]:
                t = t * img_c[i] ** ce[i]
        out = out + t
    return out


def lambda0_window(inp: ht.HypertoricInput, radius: int = 1) -> List[Tuple[int, ...]]:
    """Nonzero integer combinations of the Lambda_0 basis with coefficients in [-radius, radius]."""
    basis = ht.lattice_lambda0(inp)
    out = set()
    for coeffs in product(range(-radius, radius + 1), repeat=len(basis)):
        if any(coeffs):
            out.add(tuple(sum(c * v[k] for c, v in zip(coeffs, basis)) for k in range(inp.N)))
    return sorted(out)


@dataclass
class InvariantsReport:
    actions: List[dict] = field(default_factory=list)
    subalgebra_dims: Dict[int, int] = field(default_factory=dict)
    invariant_dims: Dict[int, int] = field(default_factory=dict)

    @property
    def all_fixed(self) -> bool:
        return all(a["status"] == "fixed" for a in self.actions)

    @property
    def fixed_up_to_sign(self) -> bool:
        return all(a["status"] in ("fixed", "negated") for a in self.actions)

    @property
    def dims_match(self) -> bool:
        return self.subalgebra_dims == self.invariant_dims


def weyl_invariants_check(inp: ht.HypertoricInput, radius: int = 1, degree_bound: int = 4) -> InvariantsReport:
    rep = InvariantsReport()
    gens = {f"P{z}": p_zeta(inp, z) for z in lambda0_window(inp, radius)}
    gens.update({f"H{k}": h_k(inp, k) for k in range(1, inp.N + 1)})
    for sigma in ht.weyl_group(inp):
        for name, g in gens.items():
            before = reduce_mod_ideal(inp, g)
            after = reduce_mod_ideal(inp, weyl_act(inp, sigma, g))
            if after == before:
                status = "fixed"
            elif after == reduce_mod_ideal(inp, -g):
                status = "negated"
            else:
                status = "other"
            rep.actions.append({"sigma": sigma.to_json(), "generator": name, "status": status,
                                "image": str(after)})
    rep.subalgebra_dims = classical_generated_dims(inp, degree_bound)
    rep.invariant_dims = classical_invariant_dims(inp, degree_bound)
    return rep


# ---------------------------------------------------------------------------
# classical (commutative) side: polynomials in x, y as {(a, b): coeff}

Poly = Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Fraction]


def _pmul(f: Poly, g: Poly) -> Poly:
    out: Poly = {}
    for (a, b), u in f.items():
        for (a2, b2), v in g.items():
            k = (tuple(p + q for p, q in zip(a, a2)), tuple(p + q for p, q in zip(b, b2)))
            out[k] = out.get(k, 0) + u * v
    return {k: v for k, v in out.items() if v}


def _classical_generators(inp: ht.HypertoricInput, degree_bound: int) -> List[Poly]:
    n = inp.N
    gens: List[Poly] = []
    zero = (0,) * n
    mu = []
    for i in range(inp.M):
        f: Poly = {}
        for k in range(n):
            if inp.delta[i][k]:
                e = tuple(int(j == k) for j in range(n))
                f[(e, e)] = Fraction(inp.delta[i][k])
        mu.append(f)
    for k in range(n):
        e = tuple(int(j == k) for j in range(n))
        f: Poly = {(e, e): Fraction(1)}
        for i, b in enumerate(ht.euler_beta(inp, k + 1)):
            for key, v in mu[i].items():
                f[key] = f.get(key, 0) - b * v
        gens.append({k2: v for k2, v in f.items() if v})
    radius = degree_bound
    for z in lambda0_window(inp, radius):
        if sum(abs(v) for v in z) <= degree_bound:
            gens.append({(tuple(max(v, 0) for v in z), tuple(max(-v, 0) for v in z)): Fraction(1)})
    return gens


def _degree(f: Poly) -> int:
    return max(sum(a) + sum(b) for a, b in f)


def classical_generated_dims(inp: ht.HypertoricInput, degree_bound: int) -> Dict[int, int]:
    """Graded dimensions of the subalgebra of C[x, y] generated by H_k and P_zeta."""
    gens = [g for g in _classical_generators(inp, degree_bound) if g]
    layers: Dict[int, List[Poly]] = {0: [{((0,) * inp.N, (0,) * inp.N): Fraction(1)}]}
    span: Dict[int, Echelon] = {d: Echelon() for d in range(degree_bound + 1)}
    span[0].add({k: v for k, v in layers[0][0].items()})
    frontier = list(layers[0])
    while frontier:
        new = []
        for f in frontier:
            for g in gens:
                h = _pmul(f, g)
                if not h:
                    continue
                d = _degree(h)
                if d > degree_bound:
                    continue
                if span[d].add(dict(h)):
                    new.append(h)
        frontier = new
    return {d: len(e) for d, e in span.items() if d % 2 == 0 or len(e)}


def _sigma_monomial(inp, sigma: ht.SignedPermutation, a, b):
    """Image of x^a y^b under x_j -> -y_k (flipped) / x_k, y_j -> x_k / y_k."""
    n = inp.N
    na, nb = [0] * n, [0] * n
    sign = 1
    for j in range(n):
        k = sigma.perm[j]
        if sigma.signs[k] > 0:
            na[k] += a[j]
            nb[k] += b[j]
        else:
            nb[k] += a[j]
            na[k] += b[j]
            if a[j] % 2:
                sign = -sign
    return sign, (tuple(na), tuple(nb))


def classical_invariant_dims(inp: ht.HypertoricInput, degree_bound: int) -> Dict[int, int]:
    """dim of (C[x, y]^G)^W by degree, via the Reynolds operator on monomials."""
    n = inp.N
    group = ht.weyl_group(inp)
    out = {}
    for d in range(degree_bound + 1):
        monos = []
        for total in product(range(d + 1), repeat=2 * n):
            if sum(total) != d:
                continue
            a, b = total[:n], total[n:]
            if ht.in_lambda0(inp, [p - q for p, q in zip(a, b)]):
                monos.append((tuple(a), tuple(b)))
        ech = Echelon()
        for mono in monos:
            vec: Dict = {}
            for s in group:
                sign, img = _sigma_monomial(inp, s, *mono)
                vec[img] = vec.get(img, 0) + sign
            ech.add({k: Fraction(v) for k, v in vec.items() if v})
        if d % 2 == 0 or len(ech):
            out[d] = len(ech)
    return out


# ---------------------------------------------------------------------------
# vertex side at hbar = 1

def gbinom(top: Fraction, j: int) -> Fraction:
    out = Fraction(1)
    for t in range(j):
        out *= (Fraction(top) - t)
    return out / factorial(j)


def prod1(a: FockState, b: FockState, n: int) -> FockState:
    """n-th product with hbar specialized to 1."""
    return nth_product(a, b, n).specialize_hbar()


def degree(a: FockState) -> Fraction:
    return conformal_weight(a)


def weight_components(a: FockState) -> dict:
    """Split a state into its conformal-weight pieces."""
    parts: dict = {}
    for (mono, h), v in a.terms.items():
        w = term_grading(mono, h).conformal
        parts.setdefault(w, {})[(mono, h)] = v
    return {w: FockState(a.algebra, t, a.localized) for w, t in sorted(parts.items())}


def zhu_star_m(a: FockState, b: FockState, m: int) -> FockState:
    """a *_m b = sum_j binom(Deg a, j) a_(-m+j) b, at hbar = 1, extended linearly in a."""
    if a.is_zero() or b.is_zero():
        return FockState(a.algebra, {})
    comps = weight_components(a)
    if len(comps) > 1:
        out = FockState(a.algebra, {})
        for piece in comps.values():
            out = out + zhu_star_m(piece, b, m)
        return out
    deg = degree(a)
    out = FockState(a.algebra, {})
    j = 0
    # a_(n) b vanishes once n exceeds the largest pole order
    from .vertex_engine import products
    top = max(products(a, b).keys(), default=-1)
    while -m + j <= top:
        coef = gbinom(deg, j)
        if coef:
            out = out + prod1(a, b, -m + j) * coef
        j += 1
    return out


def zhu_mul(a: FockState, b: FockState) -> FockState:
    return zhu_star_m(a, b, 1)


def zhu_circ(a: FockState, b: FockState) -> FockState:
    return zhu_star_m(a, b, 2)


def _hbar_one(s: FockState) -> FockState:
    return s.specialize_hbar()


class ZhuSpace:
    """Cocycles, coboundaries and relation spans of the complex at hbar = 1.

    ``w2max`` is the doubled weight bound W_max.
    """

    def __init__(self, ctx: BRSTContext, w2max: int):
        self.ctx = ctx
        self.w2max = w2max
        self._reps: Dict[int, List[FockState]] = {}
        self._zhu_rel: Optional[Echelon] = None
        self._c2_rel: Dict[int, Echelon] = {}

    def reps(self, w2: int) -> List[FockState]:
        """Representatives of a basis of H^0 in doubled weight w2."""
        if w2 not in self._reps:
            self._reps[w2] = cohomology(self.ctx, Fraction(w2, 2), 0, 0, hbar_one=True).basis_of_H
        return self._reps[w2]

    def coboundaries(self, w2: int) -> List[Dict]:
        piece = basis_of_piece(self.ctx, Fraction(w2, 2), 0, -1, hbar_one=True)
        return piece.d_columns

    def zhu_relations(self) -> Echelon:
        """span{u o v : Deg u + Deg v + 1 <= W} + coboundaries of weight <= W."""
        if self._zhu_rel is None:
            ech = Echelon()
            for w2 in range(self.w2max + 1):
                for col in self.coboundaries(w2):
                    ech.add(dict(col))
            for wu in range(self.w2max - 1):
                for wv in range(self.w2max - 1 - wu):
                    if wu + wv + 2 > self.w2max:
                        continue
                    for u in self.reps(wu):
                        for v in self.reps(wv):
                            r = zhu_circ(u, v)
                            if not r.is_zero():
                                ech.add(dict(r.terms))
            self._zhu_rel = ech
        return self._zhu_rel

    def in_zhu_relations(self, s: FockState) -> bool:
        return self.zhu_relations().contains(dict(s.terms))

    def c2_relations(self, w2: int) -> Echelon:
        """B^0_w + span{u_(-2) v : Deg u + Deg v + 1 = w}, at hbar = 1."""
        if w2 not in self._c2_rel:
            ech = Echelon()
            for col in self.coboundaries(w2):
                ech.add(dict(col))
            for wu in range(w2 - 1):
                wv = w2 - 2 - wu
                for u in self.reps(wu):
                    for v in self.reps(wv):
                        r = prod1(u, v, -2)
                        if not r.is_zero():
                            ech.add(dict(r.terms))
            self._c2_rel[w2] = ech
        return self._c2_rel[w2]

    def c2_reduce(self, a: FockState) -> FockState:
        """Normal form of a modulo the C2 relations of its weight."""
        a = _hbar_one(a)
        if a.is_zero():
            return a
        w = conformal_weight(a)
        w2 = int(2 * w)
        if w2 > self.w2max:
            raise ValueError(f"weight {w} exceeds W_max {Fraction(self.w2max, 2)}")
        rem = self.c2_relations(w2).reduce(dict(a.terms))
        return FockState(a.algebra, rem, a.localized)

    def c2_basis(self, w2: int) -> List[FockState]:
        """Representatives of a basis of the C2 quotient in weight w2."""
        coh = cohomology(self.ctx, Fraction(w2, 2), 0, 0, hbar_one=True)
        rel = self.c2_relations(w2)
        quot = Echelon()
        for row in rel.rows.values():
            quot.add(row)
        out = []
        for k in coh.kernel:
            if quot.add(dict(k.terms)):
                out.append(k)
        return out


def c2_reduce(ctx: BRSTContext, a: FockState, w_max=2) -> FockState:
    return ZhuSpace(ctx, int(2 * Fraction(w_max))).c2_reduce(a)


# ---------------------------------------------------------------------------
# symbols and the Poisson bracket on C[x, y]

def symbol(ctx: BRSTContext, a: FockState) -> sympy.Expr:
    """Drop deep modes and ghosts, substitute c_i -> sum_k Delta_ik x_k y_k, set hbar = 1."""
    xs = sympy.symbols(f"x1:{ctx.N + 1}")
    ys = sympy.symbols(f"y1:{ctx.N + 1}")
    mus = [sum((ctx.input.delta[i][k] * xs[k] * ys[k] for k in range(ctx.N)), sympy.Integer(0))
           for i in range(ctx.M)]
    out = sympy.Integer(0)
    for (mono, _), coef in a.terms.items():
        if any(l[2] > 1 or l[0] in (PSI, PSISTAR) for l, _ in mono):
            continue
        t = sympy.Rational(coef.numerator, coef.denominator)
        for (kind, site, _), e in mono:
            base = xs[site - 1] if kind == X else ys[site - 1] if kind == Y else mus[site - 1]
            t *= base ** e
        out += t
    return sympy.expand(out)


def poisson_bracket(ctx: BRSTContext, f, g) -> sympy.Expr:
    """{f, g} = sum_k (d_yk f d_xk g - d_xk f d_yk g), so {x, y} = -1."""
    xs = sympy.symbols(f"x1:{ctx.N + 1}")
    ys = sympy.symbols(f"y1:{ctx.N + 1}")
    out = sympy.Integer(0)
    for x, y in zip(xs, ys):
        out += sympy.diff(f, y) * sympy.diff(g, x) - sympy.diff(f, x) * sympy.diff(g, y)
    return sympy.expand(out)


@dataclass
class PoissonReport:
    pairs: int = 0
    bracket_failures: List[str] = field(default_factory=list)
    ideal_failures: List[str] = field(default_factory=list)
    derivative_failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.bracket_failures or self.ideal_failures or self.derivative_failures)


def c2_poisson_check(ctx: BRSTContext, w_max=2, samples: int = 20, seed: int = 0) -> PoissonReport:
    """The 0-th product descends to the Poisson bracket on the C2 quotient."""
    w2max = int(2 * Fraction(w_max))
    space = ZhuSpace(ctx, w2max)
    rng = random.Random(seed)
    pool = []
    for w2 in range(1, w2max + 1):
        pool += space.reps(w2)
    rep = PoissonReport()
    for _ in range(samples):
        u, v = rng.choice(pool), rng.choice(pool)
        rep.pairs += 1
        lhs = symbol(ctx, prod1(u, v, 0))
        rhs = poisson_bracket(ctx, symbol(ctx, u), symbol(ctx, v))
        if sympy.expand(lhs - rhs) != 0:
            rep.bracket_failures.append(f"{format_state(u)} , {format_state(v)}")
    # relations r = u_(-2) v are a Poisson ideal: r_(0) t and t_(0) r stay in the relation span
    for w2 in range(2, w2max + 1):
        rels = []
        for wu in range(w2 - 1):
            for u in space.reps(wu):
                for v in space.reps(w2 - 2 - wu):
                    r = prod1(u, v, -2)
                    if not r.is_zero():
                        rels.append(r)
        for r in rels:
            for wt in range(0, w2max - w2 + 3):
                for t in space.reps(wt):
                    for s in (prod1(r, t, 0), prod1(t, r, 0)):
                        if s.is_zero():
                            continue
                        if int(2 * conformal_weight(s)) > w2max:
                            continue
                        if not space.c2_reduce(s).is_zero():
                            rep.ideal_failures.append(f"{format_state(r)} with {format_state(t)}")
    for w2 in range(0, w2max - 1):
        for a in space.reps(w2):
            if not space.c2_reduce(translation(a)).is_zero():
                rep.derivative_failures.append(format_state(a))
    return rep


# ---------------------------------------------------------------------------
# comparison harness

@dataclass
class ComparisonReport:
    w_max: Fraction
    commutators: List[dict] = field(default_factory=list)
    c2_dims: Dict[str, int] = field(default_factory=dict)
    classical_dims: Dict[str, int] = field(default_factory=dict)

    @property
    def all_match(self) -> bool:
        return all(c["status"] in ("match", "skipped", "not representable") for c in self.commutators) \
            and any(c["status"] == "match" for c in self.commutators)

    @property
    def dims_match(self) -> bool:
        return self.c2_dims == self.classical_dims

    @property
    def mismatches(self) -> List[dict]:
        return [c for c in self.commutators if c["status"] == "mismatch"]


def va_generators(ctx: BRSTContext) -> Dict[str, Tuple[FockState, WeylElement, Tuple]]:
    """name -> (VA state at hbar = 1, Weyl image, label) for H~_k and P~_(+-zeta)."""
    inp = ctx.input
    out = {}
    for k in range(1, ctx.N + 1):
        out[f"H{k}"] = (h_tilde(ctx, k), h_k(inp, k), ("H", k))
    for z in ht.lattice_lambda0(inp):
        for zz in (tuple(z), tuple(-v for v in z)):
            out[f"P{zz}"] = (p_tilde(ctx, zz), p_zeta(inp, zz), ("P", zz))
    return out


def phi(ctx: BRSTContext, red: ReducedElement) -> Optional[FockState]:
    """VA image of sum p_zeta(H) P_zeta: H -> H~ and P -> P~ with Zhu products."""
    if red.uses_c():
        return None
    out = FockState(ctx.algebra, {})
    htil = {k: h_tilde(ctx, k) for k in red.free}
    for zeta, poly in red.components.items():
        base = p_tilde(ctx, zeta) if any(zeta) else vacuum(ctx.algebra)
        for monom, coef in poly.terms():
            s = base
            for idx, e in enumerate(monom[:len(red.free)]):
                for _ in range(e):
                    s = zhu_mul(htil[red.free[idx]], s)
            c = Fraction(int(coef.p), int(coef.q))
            out = out + s * c
    return out


def compare_zhu_weyl(ctx: BRSTContext, w_max=2) -> ComparisonReport:
    inp = ctx.input
    w2max = int(2 * Fraction(w_max))
    space = ZhuSpace(ctx, w2max)
    report = ComparisonReport(Fraction(w2max, 2))
    gens = va_generators(ctx)
    names = list(gens)
    for i, na in enumerate(names):
        for nb in names[i + 1:]:
            a, wa, _ = gens[na]
            b, wb, _ = gens[nb]
            entry = {"pair": [na, nb]}
            total = conformal_weight(a) + conformal_weight(b)
            weyl = reduce_mod_ideal(inp, weyl_commutator(wa, wb))
            entry["weyl"] = str(weyl)
            if 2 * total > w2max:
                entry["status"] = "skipped"
                report.commutators.append(entry)
                continue
            image = phi(ctx, weyl)
            if image is None:
                entry["status"] = "not representable"
                report.commutators.append(entry)
                continue
            va = zhu_mul(a, b) - zhu_mul(b, a)
            diff = va - image.specialize_hbar()
            entry["va"] = format_state(va)
            entry["status"] = "match" if space.in_zhu_relations(diff) else "mismatch"
            report.commutators.append(entry)
    report.c2_dims = {str(Fraction(w2, 2)): d for w2, d in c2_generated_dims(ctx, space).items()}
    classical = classical_generated_dims(inp, w2max)
    report.classical_dims = {str(Fraction(d, 2)): classical.get(d, 0) for d in range(w2max + 1)}
    return report


def c2_generated_dims(ctx: BRSTContext, space: ZhuSpace) -> Dict[int, int]:
    """Graded dims of the C2 subalgebra generated by the classes of H~_k and P~_zeta."""
    gens = []
    for k in range(1, ctx.N + 1):
        gens.append(h_tilde(ctx, k))
    for z in lambda0_window(ctx.input, space.w2max):
        if sum(abs(v) for v in z) <= space.w2max:
            gens.append(p_tilde(ctx, z))
    span = {w2: Echelon() for w2 in range(space.w2max + 1)}
    one = vacuum(ctx.algebra)
    span[0].add(dict(one.terms))
    frontier = [one]
    while frontier:
        new = []
        for f in frontier:
            for g in gens:
                h = prod1(g, f, -1)
                if h.is_zero():
                    continue
                w2 = int(2 * conformal_weight(h))
                if w2 > space.w2max:
                    continue
                red = space.c2_reduce(h)
                if red.is_zero():
                    continue
                if span[w2].add(dict(red.terms)):
                    new.append(h)
        frontier = new
    return {w2: len(e) for w2, e in span.items()}
