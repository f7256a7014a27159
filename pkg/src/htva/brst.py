"""BRST charge, differentials and graded cohomology of the free-field complex."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import hypertoric as ht
from .linalg import Echelon, sparse_kernel
from .vertex_engine import (C, PSI, PSISTAR, X, Y, FockState, FreeFieldAlgebra, Key, Letter, Mono,
                            canonical, divided_translation, dlog, generator, hbar_divide,
                            letter_grading, mono_grading, monomial_state, nth_product, vacuum)


class VerificationError(AssertionError):
    """A state that must be BRST closed is not."""


@dataclass(frozen=True)
class BRSTContext:
    input: ht.HypertoricInput
    algebra: FreeFieldAlgebra
    comoments: Tuple[FockState, ...]
    Q: FockState
    chart: Optional[ht.Chart] = None
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def M(self) -> int:
        return self.input.M

    @property
    def N(self) -> int:
        return self.input.N

    def localized_letters(self, chart: Optional[ht.Chart] = None) -> frozenset:
        chart = chart or self.chart
        if chart is None:
            return frozenset()
        return frozenset(_coord_letter(c) for c in chart.inverted())


def _coord_letter(coord: Tuple[str, int]) -> Letter:
    name, j = coord
    return (X if name == "x" else Y, j, 1)


def make_context(inp: ht.HypertoricInput, chart: Optional[ht.Chart] = None,
                 gram: Optional[Sequence[Sequence]] = None) -> BRSTContext:
    """Build the complex for ``inp``.  ``gram`` overrides the Heisenberg pairing (test hook)."""
    g = ht.gram_matrix(inp) if gram is None else gram
    alg = FreeFieldAlgebra.create(inp.N, inp.M, g)
    moments = tuple(_comoment(alg, inp, i) for i in range(1, inp.M + 1))
    q = FockState(alg, {})
    for i, mu in enumerate(moments, start=1):
        q = q + mu.juxtapose(generator(alg, PSISTAR, i))
    return BRSTContext(inp, alg, moments, q, chart)


def _comoment(alg: FreeFieldAlgebra, inp: ht.HypertoricInput, i: int) -> FockState:
    terms: Dict[Key, Fraction] = {}
    for j in range(1, inp.N + 1):
        d = inp.delta[i - 1][j - 1]
        if d:
            terms[(canonical([((X, j, 1), 1), ((Y, j, 1), 1)])[1], 0)] = Fraction(d)
    terms[((((C, i, 1), 1),), 0)] = Fraction(-1)
    return FockState(alg, terms)


def chiral_comoment(ctx: BRSTContext, i: int) -> FockState:
    return ctx.comoments[i - 1]


def differential(ctx: BRSTContext, a: FockState) -> FockState:
    """d = hbar^-1 Q_(0)."""
    return hbar_divide(nth_product(ctx.Q, a, 0), 1)


def _max_ghost_depth(a: FockState, kind: int) -> int:
    return max((letter[2] for (m, _) in a.terms for letter, _ in m if letter[0] == kind), default=0)


def _max_depth(a: FockState) -> int:
    return max((letter[2] for (m, _) in a.terms for letter, _ in m), default=0)


def differential_split(ctx: BRSTContext, a: FockState) -> Tuple[FockState, FockState]:
    """(d+, d-) with d+ = hbar^-1 sum psi*_{i(-n-1)} mu_(n) and d- = hbar^-1 sum mu_(-n-1) psi*_{i(n)}."""
    alg = ctx.algebra
    plus = FockState(alg, {}, a.localized)
    minus = FockState(alg, {}, a.localized)
    top = 2 * _max_depth(a) + 2
    for i in range(1, ctx.M + 1):
        mu = ctx.comoments[i - 1]
        gstar = generator(alg, PSISTAR, i)
        for n in range(top + 1):
            inner = nth_product(mu, a, n)
            if not inner.is_zero():
                plus = plus + nth_product(gstar, inner, -n - 1)
        for n in range(_max_ghost_depth(a, PSI)):
            inner = nth_product(gstar, a, n)
            if not inner.is_zero():
                minus = minus + nth_product(mu, inner, -n - 1)
    return hbar_divide(plus, 1), hbar_divide(minus, 1)


# ---------------------------------------------------------------------------
# classical (vertex Poisson) differential, written directly on jet monomials

def _jet_derivation(ctx: BRSTContext, i: int, n: int, mono: Mono) -> Dict[Mono, Fraction]:
    """The hbar-linear part of mu_i(n) on an hbar-free monomial, n >= 0.

    x_{j(-p)} -> Delta_ij x_{j(-p+n)}, y_{j(-p)} -> -Delta_ij y_{j(-p+n)} for p > n.
    """
    out: Dict[Mono, Fraction] = {}
    row = ctx.input.delta[i - 1]
    for idx, (letter, e) in enumerate(mono):
        kind, site, depth = letter
        if kind not in (X, Y) or depth <= n or row[site - 1] == 0:
            continue
        coef = Fraction(row[site - 1] * e) * (1 if kind == X else -1)
        word = list(mono[:idx]) + [(letter, e - 1), ((kind, site, depth - n), 1)] + list(mono[idx + 1:])
        sign, m = canonical(word)
        if sign:
            out[m] = out.get(m, 0) + sign * coef
    return {k: v for k, v in out.items() if v}


def _contract_ghost(i: int, n: int, mono: Mono) -> Tuple[int, Mono]:
    """hbar^-1 psi*_{i(n)} on a monomial: removes psi_{i(-n-1)} with its Koszul sign."""
    target = (PSI, i, n + 1)
    odd_before = 0
    for idx, (letter, e) in enumerate(mono):
        if letter == target:
            return (-1) ** odd_before, mono[:idx] + mono[idx + 1:]
        if letter[0] in (PSI, PSISTAR):
            odd_before += 1
    return 0, ()


def classical_differential(ctx: BRSTContext, a: FockState) -> FockState:
    """The vertex Poisson BRST differential on an hbar-free state."""
    alg = ctx.algebra
    if any(h for (_, h) in a.terms):
        raise ValueError("classical differential takes hbar-free input")
    out: Dict[Key, Fraction] = {}

    def add(state: FockState, coef: Fraction) -> None:
        for k, v in state.terms.items():
            out[k] = out.get(k, 0) + coef * v

    classical_mu = [FockState(alg, {k: v for k, v in mu.terms.items()}) for mu in ctx.comoments]
    for (mono, _), coef in a.terms.items():
        top = max((letter[2] for letter, _ in mono), default=0)
        for i in range(1, ctx.M + 1):
            for n in range(top):
                for m2, c2 in _jet_derivation(ctx, i, n, mono).items():
                    sign, m3 = canonical([((PSISTAR, i, n + 1), 1)] + list(m2))
                    if sign:
                        k = (m3, 0)
                        out[k] = out.get(k, 0) + coef * c2 * sign
                sign, rest = _contract_ghost(i, n, mono)
                if sign:
                    dmu = divided_translation(classical_mu[i - 1], n)
                    add(dmu.juxtapose(FockState(alg, {(rest, 0): Fraction(1)}, a.localized)), coef * sign)
    return FockState(alg, out, a.localized)


# ---------------------------------------------------------------------------
# graded pieces

def _letters(ctx: BRSTContext, w2max: int) -> List[Letter]:
    out = []
    for kind, count in ((X, ctx.N), (Y, ctx.N), (C, ctx.M), (PSISTAR, ctx.M), (PSI, ctx.M)):
        for site in range(1, count + 1):
            depth = 1
            while letter_grading((kind, site, depth))[0] <= w2max:
                out.append((kind, site, depth))
                depth += 1
    return sorted(out)


def enumerate_monomials(ctx: BRSTContext, w2max: int, s2max: Optional[int] = None,
                        exact_weight: bool = False) -> List[Mono]:
    """All canonical monomials with doubled conformal weight <= w2max (or == if exact)
    and doubled intrinsic S-weight <= s2max."""
    key = ("monos", w2max, s2max, exact_weight)
    hit = ctx._cache.get(key)
    if hit is not None:
        return hit
    letters = _letters(ctx, w2max)
    grads = [letter_grading(l) for l in letters]
    out: List[Mono] = []
    s_cap = s2max if s2max is not None else 10 ** 9

    def rec(idx: int, w: int, s: int, acc: list) -> None:
        if idx == len(letters):
            if not exact_weight or w == w2max:
                out.append(tuple(acc))
            return
        letter = letters[idx]
        lw, ls, _ = grads[idx]
        rec(idx + 1, w, s, acc)
        odd = letter[0] in (PSI, PSISTAR)
        e = 1
        while w + e * lw <= w2max and s + e * ls <= s_cap:
            if lw == 0 and ls == 0 and not odd:
                break
            acc.append((letter, e))
            rec(idx + 1, w + e * lw, s + e * ls, acc)
            acc.pop()
            if odd:
                break
            e += 1

    rec(0, 0, 0, [])
    # canonical order already: letters sorted, odd letters after even ones
    out = [canonical(m)[1] for m in out]
    ctx._cache[key] = out
    return out


def _half2(v) -> int:
    d = Fraction(v) * 2
    if d.denominator != 1:
        raise ValueError(f"{v} is not a half-integer")
    return int(d)


@dataclass
class GradedPiece:
    """Monomial basis of a (conformal, S, ghost) component with the differential.

    ``w2`` and ``m2`` are doubled.  ``basis`` holds (monomial, hbar power)
    keys; ``d_columns[i]`` is the sparse image of basis element i, keyed by
    monomial keys of the target piece.
    """

    w2: int
    m2: Optional[int]
    ghost: int
    basis: List[Key]
    d_columns: List[Dict[Key, Fraction]] = field(default_factory=list)

    @property
    def weight(self) -> Fraction:
        return Fraction(self.w2, 2)

    @property
    def s_weight(self) -> Optional[Fraction]:
        return None if self.m2 is None else Fraction(self.m2, 2)

    def __len__(self) -> int:
        return len(self.basis)

    def state(self, ctx: BRSTContext, coeffs: Mapping[int, Fraction]) -> FockState:
        return FockState(ctx.algebra, {self.basis[i]: c for i, c in coeffs.items()})


def _piece_keys(ctx: BRSTContext, w2: int, m2: Optional[int], g: int) -> List[Key]:
    if m2 is None:
        monos = enumerate_monomials(ctx, w2, None, exact_weight=True)
        return [(m, 0) for m in monos if mono_grading(m)[2] == g]
    monos = enumerate_monomials(ctx, w2, m2, exact_weight=True)
    keys = []
    for m in monos:
        _, s2, gh = mono_grading(m)
        if gh != g or (m2 - s2) % 2:
            continue
        keys.append((m, (m2 - s2) // 2))
    return sorted(keys)


def basis_of_piece(ctx: BRSTContext, w, m, g: int, with_differential: bool = True,
                   hbar_one: bool = False) -> GradedPiece:
    """Trigraded piece (w, m, g); with ``hbar_one`` the piece is (w, g) at hbar = 1 and m is ignored."""
    if ctx.chart is not None:
        raise ValueError("localized complexes are not enumerated exhaustively")
    w2 = _half2(w)
    m2 = None if hbar_one else _half2(m)
    key = ("piece", w2, m2, g, with_differential)
    hit = ctx._cache.get(key)
    if hit is not None:
        return hit
    piece = GradedPiece(w2, m2, g, _piece_keys(ctx, w2, m2, g))
    if with_differential:
        for mono, hp in piece.basis:
            s = FockState(ctx.algebra, {(mono, hp): Fraction(1)})
            d = differential(ctx, s)
            if hbar_one:
                d = d.specialize_hbar()
            piece.d_columns.append(dict(d.terms))
    ctx._cache[key] = piece
    return piece


@dataclass
class CohomologyResult:
    dim_kernel: int
    dim_image_in: int
    dim_H: int
    basis_of_H: List[FockState]
    kernel: List[FockState] = field(default_factory=list)

    def to_json(self) -> dict:
        from .vertex_engine import format_state
        return {"dim_kernel": self.dim_kernel, "dim_image_in": self.dim_image_in,
                "dim_H": self.dim_H, "basis_of_H": [format_state(s) for s in self.basis_of_H]}


def cohomology(ctx: BRSTContext, w, m, g: int, hbar_one: bool = False) -> CohomologyResult:
    key = ("coh", _half2(w), None if hbar_one else _half2(m), g)
    hit = ctx._cache.get(key)
    if hit is not None:
        return hit
    here = basis_of_piece(ctx, w, m, g, hbar_one=hbar_one)
    below = basis_of_piece(ctx, w, m, g - 1, hbar_one=hbar_one)
    index = {k: i for i, k in enumerate(here.basis)}
    image = Echelon()
    for col in below.d_columns:
        image.add({index[k]: v for k, v in col.items()})
    kernel = sparse_kernel(here.d_columns)
    reps = []
    quotient = Echelon()
    for row in image.rows.values():
        quotient.add(row)
    for vec in kernel:
        if quotient.add(vec):
            reps.append(here.state(ctx, vec))
    res = CohomologyResult(len(kernel), len(image), len(kernel) - len(image), reps,
                           [here.state(ctx, v) for v in kernel])
    ctx._cache[key] = res
    return res


def ghost_range(ctx: BRSTContext, w) -> range:
    """Ghost numbers that occur in conformal weight w."""
    w2 = _half2(w)
    gs = {mono_grading(m)[2] for m in enumerate_monomials(ctx, w2, None, exact_weight=True)}
    return range(min(gs), max(gs) + 1) if gs else range(0)


def piece_labels(ctx: BRSTContext, w2max: int, m2max: int) -> List[Tuple[int, int, int]]:
    """All nonempty (w2, m2, g) with w2 <= w2max and m2 <= m2max."""
    labels = set()
    for mono in enumerate_monomials(ctx, w2max, m2max):
        w2, s2, g = mono_grading(mono)
        for m2 in range(s2, m2max + 1, 2):
            labels.add((w2, m2, g))
    return sorted(labels)


def check_d_squared(ctx: BRSTContext, w2max: int = 4, m2max: int = 6, classical: bool = False):
    """Apply d twice to every basis monomial of every piece; returns (ok, count, failures)."""
    failures = []
    count = 0
    for w2, m2, g in piece_labels(ctx, w2max, m2max):
        for mono, hp in _piece_keys(ctx, w2, m2, g):
            if classical and hp:
                continue
            s = FockState(ctx.algebra, {(mono, hp): Fraction(1)})
            if classical:
                dd = classical_differential(ctx, classical_differential(ctx, s))
            else:
                dd = differential(ctx, differential(ctx, s))
            count += 1
            if not dd.is_zero():
                failures.append((w2, m2, g, s))
    return not failures, count, failures


def check_classical_consistency(ctx: BRSTContext, w2max: int = 4, m2max: int = 6):
    """classical d equals the quantum d reduced mod hbar on every hbar-free basis monomial."""
    failures = []
    count = 0
    for mono in enumerate_monomials(ctx, w2max, m2max):
        s = FockState(ctx.algebra, {(mono, 0): Fraction(1)})
        count += 1
        if classical_differential(ctx, s) != differential(ctx, s).mod_hbar():
            failures.append(s)
    return not failures, count, failures


# ---------------------------------------------------------------------------
# distinguished closed elements

def chart_monomial(ctx: BRSTContext, exponents: Iterable[Tuple[Tuple[str, int], int]],
                   chart: ht.Chart) -> FockState:
    factors = {_coord_letter(c): e for c, e in exponents}
    return monomial_state(ctx.algebra, factors, localized=ctx.localized_letters(chart))


def p_tilde(ctx: BRSTContext, zeta: Sequence[int]) -> FockState:
    if not ht.in_lambda0(ctx.input, zeta):
        raise ValueError(f"{list(zeta)} is not in the lattice orthogonal to the rows of Delta")
    factors = {}
    for k, z in enumerate(zeta, start=1):
        if z > 0:
            factors[(X, k, 1)] = z
        elif z < 0:
            factors[(Y, k, 1)] = -z
    return monomial_state(ctx.algebra, factors)


def h_tilde(ctx: BRSTContext, k: int) -> FockState:
    beta = ht.euler_beta(ctx.input, k)
    s = monomial_state(ctx.algebra, {(X, k, 1): 1, (Y, k, 1): 1})
    for i, b in enumerate(beta, start=1):
        if b:
            s = s - generator(ctx.algebra, C, i) * b
    return s


def chart_generators(ctx: BRSTContext, chart: ht.Chart) -> Dict[str, FockState]:
    """The chart-local closed elements a*_j, a_j (j not in J) and b_i."""
    out: Dict[str, FockState] = {}
    for j, astar, a in chart.coord_exponents:
        out[f"a*{j}"] = chart_monomial(ctx, astar, chart)
        out[f"a{j}"] = chart_monomial(ctx, a, chart)
    g = ctx.algebra.gram
    loc = ctx.localized_letters(chart)
    logs = [dlog(ctx.algebra, {_coord_letter(c): e for c, e in t}) for t in chart.t_exponents]
    for i in range(1, ctx.M + 1):
        b = FockState(ctx.algebra, generator(ctx.algebra, C, i).terms, loc)
        for j in range(1, ctx.M + 1):
            if g[i - 1][j - 1]:
                b = b + logs[j - 1].times_hbar(1) * g[i - 1][j - 1]
        out[f"b{i}"] = b
    return out


def closed_generators(ctx: BRSTContext, chart: Optional[ht.Chart] = None,
                      local: bool = False) -> Dict[str, FockState]:
    """P~_zeta over the Lambda_0 basis and H~_k; with a chart also a*, a, b.

    Every returned element is checked to be BRST closed.
    """
    chart = chart or ctx.chart
    if local and chart is None:
        raise ValueError("a chart is required for the local generators a*, a, b")
    out: Dict[str, FockState] = {}
    for zeta in ht.lattice_lambda0(ctx.input):
        out[f"P~{tuple(zeta)}"] = p_tilde(ctx, zeta)
        out[f"P~{tuple(-z for z in zeta)}"] = p_tilde(ctx, [-z for z in zeta])
    for k in range(1, ctx.N + 1):
        out[f"H~{k}"] = h_tilde(ctx, k)
    if chart is not None:
        out.update(chart_generators(ctx, chart))
    for name, s in out.items():
        if not differential(ctx, s).is_zero():
            raise VerificationError(f"{name} is not closed")
    return out


def chart_embedding(ctx: BRSTContext, chart: ht.Chart, s: FockState) -> FockState:
    """Image of a chart-algebra state under x_j -> a*_j, y_j -> a_j, c_i -> b_i.

    ``s`` lives in the same free-field algebra but only uses sites outside J
    and no ghosts; each monomial is rebuilt from iterated creation modes.
    """
    gens = chart_generators(ctx, chart)
    loc = ctx.localized_letters(chart)
    images = {}
    for kind, prefix in ((X, "a*"), (Y, "a"), (C, "b")):
        for site in range(1, (ctx.M if kind == C else ctx.N) + 1):
            name = f"{prefix}{site}"
            if name in gens:
                images[(kind, site)] = gens[name]
    out = FockState(ctx.algebra, {}, loc)
    for (mono, hp), coef in s.terms.items():
        acc = FockState(ctx.algebra, vacuum(ctx.algebra).terms, loc)
        for letter, e in reversed(mono):
            kind, site, depth = letter
            if (kind, site) not in images:
                raise ValueError(f"letter {letter} is not a chart generator for J={list(chart.J)}")
            if e < 0:
                raise ValueError("chart states are polynomial in the chart generators")
            for _ in range(e):
                acc = nth_product(images[(kind, site)], acc, -depth)
        out = out + acc.times_hbar(hp) * coef
    return out


# ---------------------------------------------------------------------------
# independent classical count for the degree-zero cohomology

def classical_invariant_dimension(ctx: BRSTContext, w2: int, s2: int) -> int:
    """dim of jet-torus invariants in C[x, y jets] of weight (w2, s2) (doubled).

    Quotienting the ghost-free jet algebra by the jets of mu~_i eliminates
    every c jet, so the degree-zero classical cohomology is the space of
    polynomials in x, y jets killed by all the jet derivations D^i_n.
    """
    monos = [m for m in enumerate_monomials(ctx, w2, s2, exact_weight=True)
             if all(l[0] in (X, Y) for l, _ in m) and mono_grading(m)[1] == s2]
    if not monos:
        return 0
    columns = []
    top = max((l[2] for m in monos for l, _ in m), default=0)
    for m in monos:
        col = {}
        for i in range(1, ctx.M + 1):
            for n in range(top):
                for m2, c in _jet_derivation(ctx, i, n, m).items():
                    col[(i, n, m2)] = col.get((i, n, m2), 0) + c
        columns.append({k: v for k, v in col.items() if v})
    return len(sparse_kernel(columns))


def h0_oracle_prediction(ctx: BRSTContext, w2: int, m2: int) -> int:
    """Dimension of the (w, m) piece of (classical degree-zero cohomology) tensor C[hbar]."""
    total = 0
    k = 0
    while m2 - 2 * k >= 0:
        total += classical_invariant_dimension(ctx, w2, m2 - 2 * k)
        k += 1
    return total
