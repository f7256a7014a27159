"""Free-field vertex superalgebra engine.

States of the hbar-adic algebra generated by the beta-gamma pairs
``x_k, y_k``, the Heisenberg fields ``c_i`` and the ghosts ``psi_i, psi*_i``
are finite sums of normally ordered creation monomials with coefficients in
Q[hbar].  Products are computed with Wick's theorem: every contraction
pattern between the two monomials contributes a pole, and the leftover
factor of the left state is Taylor-expanded around the second point.

A letter is a triple ``(kind, site, depth)``; depth ``p >= 1`` stands for
the creation mode ``g_(-p)``.  Sites are 1-based.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

X, Y, C, PSISTAR, PSI = 0, 1, 2, 3, 4
KIND_NAMES = ("x", "y", "c", "psi*", "psi")
ODD_KINDS = frozenset((PSISTAR, PSI))
# doubled conformal weight of the (-1)-mode, doubled S-weight, ghost number
_CONF2 = (1, 1, 2, 0, 2)
_SWT2 = (1, 1, 2, 0, 2)
_GHOST = (0, 0, 0, 1, -1)

Letter = Tuple[int, int, int]
Mono = Tuple[Tuple[Letter, int], ...]
Key = Tuple[Mono, int]

ONE: Mono = ()


class LocalizationError(ValueError):
    """A negative exponent appeared on a letter that is not invertible."""


class HbarDivisionError(ArithmeticError):
    pass


def is_odd(letter: Letter) -> bool:
    return letter[0] in ODD_KINDS


def canonical(word: Iterable[Tuple[Letter, int]]) -> Tuple[int, Mono]:
    """Sort a word of letters into the canonical monomial.

    Returns ``(sign, mono)``; sign 0 means the word vanishes (a repeated odd
    letter).  Even letters commute and their exponents add.  Odd letters
    anticommute, so sorting them costs the sign of the permutation.
    """
    even: Dict[Letter, int] = {}
    odd: List[Letter] = []
    for letter, e in word:
        if e == 0:
            continue
        if letter[0] in ODD_KINDS:
            if e != 1:
                return 0, ONE
            odd.append(letter)
        else:
            even[letter] = even.get(letter, 0) + e
    sign = 1
    # insertion sort keeps count of transpositions
    for i in range(1, len(odd)):
        j = i
        while j > 0 and odd[j - 1] > odd[j]:
            odd[j - 1], odd[j] = odd[j], odd[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and odd[j - 1] == odd[j]:
            return 0, ONE
    mono = tuple(sorted((k, v) for k, v in even.items() if v)) + tuple((o, 1) for o in odd)
    return sign, mono


def mono_mul(a: Mono, b: Mono) -> Tuple[int, Mono]:
    if not a:
        return 1, b
    if not b:
        return 1, a
    return canonical(a + b)


@lru_cache(maxsize=None)
def mono_translate(a: Mono) -> Tuple[Tuple[Mono, Fraction], ...]:
    """The translation operator on one monomial, as a derivation.

    Uses d(g_(-p)) = p g_(-p-1), and for exponents e (possibly negative)
    d(u^e) = e u^(e-1) du.
    """
    out: Dict[Mono, Fraction] = {}
    for i, (letter, e) in enumerate(a):
        kind, site, depth = letter
        nxt = (kind, site, depth + 1)
        word = list(a[:i]) + [(letter, e - 1), (nxt, 1)] + list(a[i + 1:])
        if letter[0] in ODD_KINDS:
            word = list(a[:i]) + [(nxt, 1)] + list(a[i + 1:])
        sign, mono = canonical(word)
        if sign:
            coef = Fraction(sign * depth * e)
            out[mono] = out.get(mono, 0) + coef
    return tuple((m, c) for m, c in out.items() if c)


@lru_cache(maxsize=None)
def mono_divided_power(a: Mono, m: int) -> Tuple[Tuple[Mono, Fraction], ...]:
    """``d^m a / m!`` for a monomial ``a``."""
    if m == 0:
        return ((a, Fraction(1)),)
    prev = mono_divided_power(a, m - 1)
    out: Dict[Mono, Fraction] = {}
    for mono, coef in prev:
        for mono2, c2 in mono_translate(mono):
            out[mono2] = out.get(mono2, 0) + coef * c2
    return tuple((k, v / m) for k, v in out.items() if v)


def letter_grading(letter: Letter) -> Tuple[int, int, int]:
    kind, _, depth = letter
    return _CONF2[kind] + 2 * (depth - 1), _SWT2[kind], _GHOST[kind]


def mono_grading(a: Mono) -> Tuple[int, int, int]:
    """(2 * conformal weight, 2 * intrinsic S-weight, ghost number)."""
    w = s = g = 0
    for letter, e in a:
        lw, ls, lg = letter_grading(letter)
        w += e * lw
        s += e * ls
        g += e * lg
    return w, s, g


@dataclass(frozen=True)
class FreeFieldAlgebra:
    """The free-field algebra with N beta-gamma pairs and M Heisenberg/ghost pairs.

    ``gram`` is the M x M symmetric matrix of the Heisenberg pairing.
    """

    n_sites: int
    n_ghosts: int
    gram: Tuple[Tuple[Fraction, ...], ...]
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @classmethod
    def create(cls, n_sites: int, n_ghosts: int, gram: Sequence[Sequence]) -> "FreeFieldAlgebra":
        g = tuple(tuple(Fraction(v) for v in row) for row in gram)
        if len(g) != n_ghosts or any(len(row) != n_ghosts for row in g):
            raise ValueError("Gram matrix must be M x M")
        return cls(n_sites, n_ghosts, g)

    def check_letter(self, letter: Letter) -> None:
        kind, site, depth = letter
        bound = self.n_sites if kind in (X, Y) else self.n_ghosts
        if not 1 <= site <= bound:
            raise IndexError(f"{KIND_NAMES[kind]}{site} out of range (max {bound})")
        if depth < 1:
            raise ValueError("only creation modes may appear in a state")

    def basic(self, u: Tuple[int, int], v: Tuple[int, int]):
        """Singular part of g_u(z) g_v(w) as (constant, hbar power, pole order)."""
        (ku, su), (kv, sv) = u, v
        if ku == X and kv == Y and su == sv:
            return -1, 1, 1
        if ku == Y and kv == X and su == sv:
            return 1, 1, 1
        if su == sv and {ku, kv} == {PSI, PSISTAR}:
            return 1, 1, 1
        if ku == C and kv == C:
            g = self.gram[su - 1][sv - 1]
            if g:
                return g, 2, 2
        return None

    def contraction(self, u: Letter, v: Letter):
        """Contraction of the letters u (left) and v (right).

        For ``u = d^p g / p!`` and ``v = d^q h / q!`` with basic OPE
        ``K/(z-w)^r`` the result is ``(-1)^p (r+p+q-1)! / ((r-1)! p! q!)``
        over ``(z-w)^(r+p+q)``.
        """
        b = self.basic(u[:2], v[:2])
        if b is None:
            return None
        k, h, r = b
        p, q = u[2] - 1, v[2] - 1
        num = math.factorial(r + p + q - 1)
        den = math.factorial(r - 1) * math.factorial(p) * math.factorial(q)
        return Fraction(k) * (-1) ** p * Fraction(num, den), h, r + p + q

    def wick(self, a: Mono, b: Mono):
        """All contraction patterns between monomials a (left) and b (right).

        Returns a tuple of ``(a_rest, b_rest, pole, hbar_power, coefficient)``.
        Patterns are generated as exp(D) with D the single-contraction
        operator; level k carries the factor 1/k.
        """
        key = ("wick", a, b)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        level: Dict[Tuple[Mono, Mono, int, int], Fraction] = {(a, b, 0, 0): Fraction(1)}
        total: Dict[Tuple[Mono, Mono, int, int], Fraction] = dict(level)
        k = 0
        while level:
            k += 1
            nxt: Dict[Tuple[Mono, Mono, int, int], Fraction] = {}
            for (ar, br, pole, hp), coef in level.items():
                for i, (u, eu) in enumerate(ar):
                    for j, (v, ev) in enumerate(br):
                        con = self.contraction(u, v)
                        if con is None:
                            continue
                        if eu < 0 and ev < 0:
                            raise LocalizationError("two inverted letters contract")
                        cval, ch, cpole = con
                        sign = 1
                        if u[0] in ODD_KINDS:
                            after = sum(1 for (l2, _) in ar[i + 1:] if l2[0] in ODD_KINDS)
                            sign *= (-1) ** after
                            ar2 = ar[:i] + ar[i + 1:]
                            fa = 1
                        else:
                            fa = eu
                            ar2 = ar[:i] + (((u, eu - 1),) if eu != 1 else ()) + ar[i + 1:]
                        if v[0] in ODD_KINDS:
                            before = sum(1 for (l2, _) in br[:j] if l2[0] in ODD_KINDS)
                            sign *= (-1) ** before
                            br2 = br[:j] + br[j + 1:]
                            fb = 1
                        else:
                            fb = ev
                            br2 = br[:j] + (((v, ev - 1),) if ev != 1 else ()) + br[j + 1:]
                        kk = (ar2, br2, pole + cpole, hp + ch)
                        val = coef * cval * sign * fa * fb / k
                        nxt[kk] = nxt.get(kk, 0) + val
            level = {kk: v for kk, v in nxt.items() if v}
            for kk, v in level.items():
                total[kk] = total.get(kk, 0) + v
        result = tuple((ar, br, pole, hp, c) for (ar, br, pole, hp), c in total.items() if c)
        self._cache[key] = result
        return result

    def mono_products(self, a: Mono, b: Mono, n: int) -> Dict[Key, Fraction]:
        """``a_(n) b`` for monomials, keyed by (monomial, extra hbar power)."""
        key = ("prod", a, b, n)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out: Dict[Key, Fraction] = {}
        for ar, br, pole, hp, coef in self.wick(a, b):
            m = pole - n - 1
            if m < 0:
                continue
            for da, dc in mono_divided_power(ar, m):
                sign, mono = mono_mul(da, br)
                if sign:
                    k = (mono, hp)
                    out[k] = out.get(k, 0) + coef * dc * sign
        out = {k: v for k, v in out.items() if v}
        self._cache[key] = out
        return out

    def max_pole(self, a: Mono, b: Mono) -> int:
        return max((pole for _, _, pole, _, _ in self.wick(a, b)), default=0)


def _clean(terms: Mapping[Key, Fraction]) -> Dict[Key, Fraction]:
    return {k: Fraction(v) for k, v in terms.items() if v}


class FockState:
    """Finite Q[hbar]-combination of canonical creation monomials.

    ``terms`` maps ``(monomial, hbar_power)`` to a rational coefficient.
    ``localized`` lists the (-1)-mode letters that may carry negative
    exponents.  Instances are treated as immutable.
    """

    __slots__ = ("algebra", "terms", "localized", "_hash")

    def __init__(self, algebra: FreeFieldAlgebra, terms: Mapping[Key, Fraction] = (),
                 localized: Iterable[Letter] = ()):
        self.algebra = algebra
        self.terms = _clean(dict(terms))
        self.localized = frozenset(localized)
        self._hash = None
        for (mono, hp), _ in self.terms.items():
            if hp < 0:
                raise ValueError("negative hbar power")
            for letter, e in mono:
                if e < 0 and letter not in self.localized:
                    raise LocalizationError(f"negative exponent on non-localized letter {letter}")

    # construction helpers -------------------------------------------------
    @classmethod
    def from_mono(cls, algebra, mono: Mono, coef=1, hbar: int = 0, localized=()):
        sign, m = canonical(mono)
        return cls(algebra, {(m, hbar): Fraction(coef) * sign} if sign else {}, localized)

    def _new(self, terms, localized=None) -> "FockState":
        return FockState(self.algebra, terms, self.localized if localized is None else localized)

    # arithmetic ------------------------------------------------------------
    def __add__(self, other: "FockState") -> "FockState":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return self._new(out, self.localized | other.localized)

    def __sub__(self, other: "FockState") -> "FockState":
        return self + (-other)

    def __neg__(self) -> "FockState":
        return self._new({k: -v for k, v in self.terms.items()})

    def __mul__(self, scalar) -> "FockState":
        s = Fraction(scalar)
        return self._new({k: v * s for k, v in self.terms.items()})

    __rmul__ = __mul__

    def times_hbar(self, k: int = 1) -> "FockState":
        return self._new({(m, h + k): v for (m, h), v in self.terms.items()})

    def juxtapose(self, other: "FockState") -> "FockState":
        """Product of creation polynomials (creation modes supercommute)."""
        out: Dict[Key, Fraction] = {}
        for (ma, ha), va in self.terms.items():
            for (mb, hb), vb in other.terms.items():
                sign, m = mono_mul(ma, mb)
                if sign:
                    k = (m, ha + hb)
                    out[k] = out.get(k, 0) + sign * va * vb
        return self._new(out, self.localized | other.localized)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, FockState):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"FockState({format_state(self)})"

    def __str__(self) -> str:
        return format_state(self)

    # queries ----------------------------------------------------------------
    def max_hbar(self) -> int:
        return max((h for (_, h) in self.terms), default=0)

    def hbar_part(self, k: int) -> "FockState":
        return self._new({(m, 0): v for (m, h), v in self.terms.items() if h == k})

    def mod_hbar(self) -> "FockState":
        return self.hbar_part(0)

    def specialize_hbar(self) -> "FockState":
        """Set hbar = 1 (all terms collapse to hbar power 0)."""
        out: Dict[Key, Fraction] = {}
        for (m, h), v in self.terms.items():
            out[(m, 0)] = out.get((m, 0), 0) + v
        return self._new(out)

    def monomials(self):
        return sorted(self.terms.items())


def vacuum(algebra: FreeFieldAlgebra) -> FockState:
    return FockState(algebra, {(ONE, 0): Fraction(1)})


def generator(algebra: FreeFieldAlgebra, kind: int, site: int, depth: int = 1,
              localized: Iterable[Letter] = ()) -> FockState:
    """The state g_(-depth) 1."""
    letter = (kind, site, depth)
    algebra.check_letter(letter)
    return FockState(algebra, {(((letter, 1),), 0): Fraction(1)}, localized)


def nth_product(a: FockState, b: FockState, n: int) -> FockState:
    """The n-th product a_(n) b for any integer n."""
    alg = a.algebra
    out: Dict[Key, Fraction] = {}
    for (ma, ha), va in a.terms.items():
        for (mb, hb), vb in b.terms.items():
            for (m, hp), c in alg.mono_products(ma, mb, n).items():
                k = (m, ha + hb + hp)
                out[k] = out.get(k, 0) + va * vb * c
    return FockState(alg, out, a.localized | b.localized)


def products(a: FockState, b: FockState) -> Dict[int, FockState]:
    """All nonzero a_(n) b with n >= 0."""
    alg = a.algebra
    top = 0
    for ma, _ in a.terms:
        for mb, _ in b.terms:
            top = max(top, alg.max_pole(ma, mb))
    res = {}
    for n in range(top):
        p = nth_product(a, b, n)
        if not p.is_zero():
            res[n] = p
    return res


def ope(a: FockState, b: FockState) -> List[Tuple[int, FockState]]:
    """Singular part of a(z) b(w) as a list of (pole order, coefficient state)."""
    return [(n + 1, s) for n, s in sorted(products(a, b).items(), reverse=True)]


def apply_mode(kind: int, site: int, n: int, s: FockState) -> FockState:
    """Left action of the mode g_(n) on s."""
    g = generator(s.algebra, kind, site)
    return nth_product(g, s, n)


def translation(a: FockState) -> FockState:
    out: Dict[Key, Fraction] = {}
    for (m, h), v in a.terms.items():
        for m2, c in mono_translate(m):
            k = (m2, h)
            out[k] = out.get(k, 0) + v * c
    return a._new(out)


def divided_translation(a: FockState, m: int) -> FockState:
    out: Dict[Key, Fraction] = {}
    for (mono, h), v in a.terms.items():
        for m2, c in mono_divided_power(mono, m):
            k = (m2, h)
            out[k] = out.get(k, 0) + v * c
    return a._new(out)


def _binom(m: int, q: int) -> Fraction:
    out = Fraction(1)
    for t in range(q):
        out *= m - t
    return out / math.factorial(q)


def fock_action(a: FockState, n: int, lam: Sequence, v: FockState,
                sites: Optional[Iterable[int]] = None) -> FockState:
    """Mode a_(n) on the Wakimoto module F_bg (x) pi_lam, with hbar = 1.

    ``a`` is a polynomial in the chart generators written with letters
    x_j = a*_j, y_j = a_j (j in ``sites`` when given) and c_i = b_i.  Module
    vectors are states of the same algebra read as creation modes on the
    highest-weight vector, which is the vacuum.  c_i(0) acts by lam[i-1].
    The field of a monomial is the free-field normal ordered product, so
    a_(n) is a finite mode sum with annihilators moved to the right.
    """
    allowed = None if sites is None else set(sites)
    out = FockState(v.algebra, {})
    top = max((l[2] for (mono, _) in v.terms for l, _ in mono), default=0)
    for (mono, _), coef in a.terms.items():
        factors = []
        for (kind, site, depth), e in mono:
            if kind in (PSI, PSISTAR):
                raise ValueError("ghost letters are not chart generators")
            if kind in (X, Y) and allowed is not None and site not in allowed:
                raise ValueError(f"site {site} is not a chart coordinate")
            if e < 0:
                raise ValueError("chart states are polynomial in the chart generators")
            factors += [(kind, site, depth - 1)] * e
        out = out + _monomial_mode(factors, n, lam, v, top) * coef
    return out


def _monomial_mode(factors, n: int, lam, v: FockState, top: int) -> FockState:
    k = len(factors)
    if k == 0:
        return v if n == -1 else FockState(v.algebra, {})
    target = n + 1 - k - sum(q for _, _, q in factors)
    low = target - (k - 1) * top
    out = FockState(v.algebra, {})

    def assign(i: int, remaining: int, modes: List[int]):
        nonlocal out
        if i == k - 1:
            if low <= remaining <= top:
                out = out + _ordered_apply(factors, modes + [remaining], lam, v)
            return
        for m in range(low, top + 1):
            assign(i + 1, remaining - m, modes + [m])

    assign(0, target, [])
    return out


def _ordered_apply(factors, modes, lam, v: FockState) -> FockState:
    coef = Fraction(1)
    for (_, _, q), m in zip(factors, modes):
        if q:
            coef *= (-1) ** q * _binom(m + q, q)
    if not coef:
        return FockState(v.algebra, {})
    s = v
    ops = sorted(zip(factors, modes), key=lambda fm: fm[1] < 0)
    for (kind, site, _), m in ops:
        if s.is_zero():
            return s
        if kind == C and m == 0:
            s = s * Fraction(lam[site - 1])
        else:
            s = apply_mode(kind, site, m, s).specialize_hbar()
    return s * coef


@dataclass(frozen=True)
class GradingTriple:
    conformal: Fraction
    s_weight: Fraction
    ghost: int

    def doubled(self) -> Tuple[int, int, int]:
        return int(2 * self.conformal), int(2 * self.s_weight), self.ghost


def term_grading(mono: Mono, hbar: int) -> GradingTriple:
    w, s, g = mono_grading(mono)
    return GradingTriple(Fraction(w, 2), Fraction(s, 2) + hbar, g)


def gradings(a: FockState):
    """The grading triple of a homogeneous state, or the set of distinct triples."""
    found = {term_grading(m, h) for (m, h) in a.terms}
    if not found:
        return GradingTriple(Fraction(0), Fraction(0), 0)
    if len(found) == 1:
        return found.pop()
    return sorted(found, key=lambda t: (t.conformal, t.s_weight, t.ghost))


def conformal_weight(a: FockState) -> Fraction:
    found = {term_grading(m, h).conformal for (m, h) in a.terms}
    if len(found) > 1:
        raise ValueError("state is not homogeneous in conformal weight")
    return found.pop() if found else Fraction(0)


def hbar_divide(a: FockState, k: int) -> FockState:
    out = {}
    for (m, h), v in a.terms.items():
        if h < k:
            raise HbarDivisionError(f"coefficient of {format_mono(m)} not divisible by hbar^{k}")
        out[(m, h - k)] = v
    return a._new(out)


def dlog(algebra: FreeFieldAlgebra, factors: Mapping[Letter, int]) -> FockState:
    """Logarithmic derivative of an invertible monomial in (-1)-modes.

    ``factors`` maps letters ``(kind, site, 1)`` to integer exponents; all of
    them are declared invertible in the result.
    """
    loc = frozenset(factors)
    out: Dict[Key, Fraction] = {}
    for letter, e in factors.items():
        kind, site, depth = letter
        if depth != 1 or kind not in (X, Y):
            raise LocalizationError("only (-1)-modes of x and y can be inverted")
        if e == 0:
            continue
        mono = canonical([((kind, site, 2), 1), (letter, -1)])[1]
        k = (mono, 0)
        out[k] = out.get(k, 0) + e
    return FockState(algebra, out, loc)


def monomial_state(algebra: FreeFieldAlgebra, factors: Mapping[Letter, int], coef=1,
                   localized: Iterable[Letter] = ()) -> FockState:
    sign, mono = canonical(sorted(factors.items()))
    return FockState(algebra, {(mono, 0): Fraction(coef) * sign} if sign else {}, localized)


def commutator_on(a: FockState, m: int, b: FockState, n: int, s: FockState) -> FockState:
    """The supercommutator [a_(m), b_(n)] applied to s."""
    pa = parity(a)
    pb = parity(b)
    first = nth_product(a, nth_product(b, s, n), m)
    second = nth_product(b, nth_product(a, s, m), n)
    return first - second * ((-1) ** (pa * pb))


def parity(a: FockState) -> int:
    ps = {sum(e for (letter, e) in m if letter[0] in ODD_KINDS) % 2 for (m, _) in a.terms}
    if len(ps) > 1:
        raise ValueError("state has mixed parity")
    return ps.pop() if ps else 0


# ---------------------------------------------------------------------------
# text form

def format_letter(letter: Letter) -> str:
    kind, site, depth = letter
    return f"{KIND_NAMES[kind]}{site}[{-depth}]"


def format_mono(mono: Mono) -> str:
    parts = []
    for letter, e in mono:
        s = format_letter(letter)
        if e != 1:
            s += f"^{e}"
        parts.append(s)
    return "*".join(parts)


def format_state(a: FockState) -> str:
    if a.is_zero():
        return "0"
    out = []
    for (mono, h), v in sorted(a.terms.items()):
        sign = "-" if v < 0 else "+"
        mag = abs(v)
        factors = []
        if h:
            factors.append("h" if h == 1 else f"h^{h}")
        if mono:
            factors.append(format_mono(mono))
        coef = "" if (mag == 1 and factors) else str(mag)
        body = " ".join(x for x in [coef, "*".join(factors)] if x)
        out.append((sign, body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


_TOKEN = re.compile(r"\s*(?:(psi\*|psi|x|y|c)(\d+)|(h)|(\d+)|(\[)|(\])|(\^)|(\()|(\))|(\+)|(-)|(\*)|(/))")
_KIND_OF = {"x": X, "y": Y, "c": C, "psi": PSI, "psi*": PSISTAR}


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group(1):
            tokens.append(("gen", (m.group(1), int(m.group(2))), start))
        elif m.group(3):
            tokens.append(("h", None, start))
        elif m.group(4):
            tokens.append(("int", int(m.group(4)), start))
        else:
            tokens.append((m.group(0).strip(), None, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


def parse_element(text: str, algebra: FreeFieldAlgebra, localized: Iterable[Letter] = ()) -> FockState:
    """Parse the element grammar into a canonical state.

    ``x1[-1]*y2[-1] - 1/2 h^2 c1[-2]``; juxtaposition multiplies, ``h`` is
    hbar, the vacuum is implicit.  Inverse powers like ``x1[-1]^-1`` are
    allowed and declare the letter invertible.
    """
    tokens = _tokenize(text)
    pos = [0]
    loc = set(localized)

    def peek():
        return tokens[pos[0]]

    def take(kind):
        t = tokens[pos[0]]
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[0]!r}", t[2])
        pos[0] += 1
        return t

    def signed_int():
        neg = False
        if peek()[0] == "-":
            take("-")
            neg = True
        v = take("int")[1]
        return -v if neg else v

    def element():
        sign = 1
        if peek()[0] in "+-" and peek()[0] in ("+", "-"):
            sign = -1 if take(peek()[0])[0] == "-" else 1
        acc = term() * sign
        while peek()[0] in ("+", "-"):
            op = take(peek()[0])[0]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        coef = Fraction(1)
        if peek()[0] == "int":
            num = take("int")[1]
            den = 1
            if peek()[0] == "/":
                take("/")
                den = take("int")[1]
                if den == 0:
                    raise ParseError("zero denominator", tokens[pos[0] - 1][2])
            coef = Fraction(num, den)
            if peek()[0] not in ("gen", "h", "(", "*"):
                return vacuum(algebra) * coef
            if peek()[0] == "*":
                take("*")
        acc = factor()
        while peek()[0] in ("*", "gen", "h", "("):
            if peek()[0] == "*":
                take("*")
            acc = acc.juxtapose(factor())
        return acc * coef

    def factor():
        t = peek()
        if t[0] == "gen":
            take("gen")
            name, site = t[1]
            take("[")
            idx = signed_int()
            take("]")
            exp = 1
            if peek()[0] == "^":
                take("^")
                exp = signed_int()
            if idx >= 0:
                raise ParseError("only creation modes (negative index) may appear", t[2])
            letter = (_KIND_OF[name], site, -idx)
            try:
                algebra.check_letter(letter)
            except IndexError as err:
                raise ParseError(str(err), t[2]) from None
            if exp < 0:
                if letter[0] not in (X, Y) or letter[2] != 1:
                    raise ParseError("only x/y (-1)-modes can be inverted", t[2])
                loc.add(letter)
            sign, mono = canonical([(letter, exp)])
            return FockState(algebra, {(mono, 0): Fraction(sign)} if sign else {}, loc)
        if t[0] == "h":
            take("h")
            k = 1
            if peek()[0] == "^":
                take("^")
                k = take("int")[1]
            return vacuum(algebra).times_hbar(k)
        if t[0] == "(":
            take("(")
            e = element()
            take(")")
            return e
        raise ParseError(f"unexpected token {t[0]!r}", t[2])

    result = element()
    if peek()[0] != "end":
        raise ParseError("trailing input", peek()[2])
    return FockState(algebra, result.terms, loc | set(result.localized))
