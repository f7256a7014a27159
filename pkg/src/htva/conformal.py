"""Conformal vectors of the BRST complex and their Virasoro checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

from . import linalg
from .brst import (BRSTContext, VerificationError, cohomology, differential, enumerate_monomials)
from .vertex_engine import (C, PSI, PSISTAR, X, Y, FockState, commutator_on, generator,
                            monomial_state, nth_product, ope, translation, vacuum)

HEIS, BETAGAMMA, CLIFFORD = "HEIS", "BETAGAMMA", "CLIFFORD"


@dataclass(frozen=True)
class ConformalVector:
    state: FockState
    lam: tuple
    central_charge: Fraction


def omega_heisenberg(ctx: BRSTContext) -> FockState:
    """(1/2) sum_i c_i(-1) c^i with c^i the dual basis."""
    g = [list(r) for r in ctx.algebra.gram]
    if linalg.det(g) == 0:
        raise ValueError("the Heisenberg pairing is degenerate; no dual basis")
    ginv = linalg.inverse(g)
    alg = ctx.algebra
    out = FockState(alg, {})
    for i in range(ctx.M):
        for j in range(ctx.M):
            if ginv[i][j]:
                out = out + monomial_state(alg, {(C, i + 1, 1): 1}).juxtapose(
                    monomial_state(alg, {(C, j + 1, 1): 1})) * (ginv[i][j] / 2)
    return out


def omega_betagamma(ctx: BRSTContext, kappa, j: int) -> FockState:
    """kappa x_j(-2) y_j(-1) + (kappa - 1) x_j(-1) y_j(-2)."""
    k = Fraction(kappa)
    alg = ctx.algebra
    return (monomial_state(alg, {(X, j, 2): 1, (Y, j, 1): 1}) * k
            + monomial_state(alg, {(X, j, 1): 1, (Y, j, 2): 1}) * (k - 1))


def omega_clifford(ctx: BRSTContext) -> FockState:
    out = FockState(ctx.algebra, {})
    for i in range(1, ctx.M + 1):
        out = out + monomial_state(ctx.algebra, {(PSISTAR, i, 2): 1, (PSI, i, 1): 1})
    return out


def build_omega(ctx: BRSTContext, lam: Optional[Sequence] = None) -> ConformalVector:
    """hbar sum_k omega_{1/2 + lam_k, k} + omega_H + hbar omega_F, checked closed."""
    lam = tuple(Fraction(v) for v in (lam if lam is not None else [0] * ctx.N))
    if len(lam) != ctx.N:
        raise ValueError(f"shift vector must have length N={ctx.N}")
    for i, row in enumerate(ctx.input.delta, start=1):
        if sum(a * b for a, b in zip(row, lam)) != 0:
            raise ValueError(f"shift vector is not orthogonal to row {i} of Delta")
    state = omega_heisenberg(ctx) + omega_clifford(ctx).times_hbar(1)
    for k in range(1, ctx.N + 1):
        state = state + omega_betagamma(ctx, Fraction(1, 2) + lam[k - 1], k).times_hbar(1)
    if not differential(ctx, state).is_zero():
        raise VerificationError("conformal vector is not BRST closed")
    return ConformalVector(state, lam, 2 * expected_quartic(ctx, lam))


def expected_quartic(ctx: BRSTContext, lam: Optional[Sequence] = None) -> Fraction:
    """Sum of the summand quartics: M/2 - M + sum_k q(1/2 + lam_k).

    For lam = 0 this is -(M+N)/2; a shift adds 6 sum_k lam_k^2.
    """
    lam = lam if lam is not None else [0] * ctx.N
    return Fraction(ctx.M, 2) - ctx.M + sum(betagamma_quartic(Fraction(1, 2) + Fraction(v)) for v in lam)


@dataclass
class VirasoroReport:
    quartic: Optional[Fraction]
    expected_quartic: Fraction
    quartic_is_scalar: bool
    cubic_zero: bool
    quadratic_matches: bool
    linear_matches: bool
    higher_poles_zero: bool
    mismatches: List[str] = field(default_factory=list)

    @property
    def central_charge(self) -> Optional[Fraction]:
        return None if self.quartic is None else 2 * self.quartic

    @property
    def match(self) -> bool:
        return not self.mismatches


def _scalar_hbar4(state: FockState) -> Optional[Fraction]:
    if state.is_zero():
        return Fraction(0)
    if set(state.terms) == {((), 4)}:
        return state.terms[((), 4)]
    return None


def virasoro_ope_check(t: FockState, expected_quartic) -> VirasoroReport:
    """Compare t(z)t(w) with hbar^4 q/(z-w)^4 + 2 hbar^2 t/(z-w)^2 + hbar^2 dt/(z-w)."""
    poles = dict(ope(t, t))
    zero = FockState(t.algebra, {})
    p4 = poles.get(4, zero)
    quartic = _scalar_hbar4(p4)
    rep = VirasoroReport(
        quartic=quartic,
        expected_quartic=Fraction(expected_quartic),
        quartic_is_scalar=quartic is not None,
        cubic_zero=poles.get(3, zero).is_zero(),
        quadratic_matches=poles.get(2, zero) == (t * 2).times_hbar(2),
        linear_matches=poles.get(1, zero) == translation(t).times_hbar(2),
        higher_poles_zero=all(k <= 4 for k in poles),
    )
    if quartic is None:
        rep.mismatches.append("pole 4: not a multiple of hbar^4 vacuum")
    elif quartic != rep.expected_quartic:
        rep.mismatches.append(f"pole 4: {quartic} != {rep.expected_quartic}")
    if not rep.cubic_zero:
        rep.mismatches.append("pole 3: nonzero")
    if not rep.quadratic_matches:
        rep.mismatches.append("pole 2: not 2 hbar^2 omega")
    if not rep.linear_matches:
        rep.mismatches.append("pole 1: not hbar^2 d omega")
    if not rep.higher_poles_zero:
        rep.mismatches.append("poles above 4")
    return rep


def virasoro_check(ctx: BRSTContext, omega: ConformalVector) -> VirasoroReport:
    return virasoro_ope_check(omega.state, omega.central_charge / 2)


def component_virasoro(ctx: BRSTContext, kind: str, kappa=Fraction(1, 2), j: int = 1) -> VirasoroReport:
    """Virasoro OPE of one summand, normalized as it enters omega.

    The beta-gamma and ghost summands carry a factor hbar in omega, and the
    displayed OPEs (with hbar^4 quartic terms) hold for hbar*omega_kappa and
    hbar*omega_F.  Expected quartics are the stated ones: M/2, -1/2, -M.
    """
    if kind == HEIS:
        return virasoro_ope_check(omega_heisenberg(ctx), Fraction(ctx.M, 2))
    if kind == BETAGAMMA:
        return virasoro_ope_check(omega_betagamma(ctx, kappa, j).times_hbar(1), Fraction(-1, 2))
    if kind == CLIFFORD:
        return virasoro_ope_check(omega_clifford(ctx).times_hbar(1), Fraction(-2 * ctx.M, 2))
    raise ValueError(kind)


def betagamma_quartic(kappa) -> Fraction:
    """Quartic coefficient (over hbar^4) of hbar*omega_kappa with itself: 6k^2 - 6k + 1."""
    k = Fraction(kappa)
    return 6 * k * k - 6 * k + 1


# ---------------------------------------------------------------------------
# commutator lemmas

@dataclass
class CommutatorReport:
    kind: str
    form: str
    checked: int
    mismatches: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def spanning_states(ctx: BRSTContext, w2max: int = 4) -> List[FockState]:
    """hbar-free monomials of conformal weight <= w2max/2; they span every piece over Q[hbar]."""
    return [FockState(ctx.algebra, {(m, 0): Fraction(1)}) for m in enumerate_monomials(ctx, w2max, None)]


def _rhs_coefficient(kind: str, form: str, target: str, m: int, n: int, kappa: Fraction):
    """Scalar c with [omega(m+1), g(n)] = c * g(m+n) (hbar powers handled by caller)."""
    if kind == HEIS:
        return -n
    if kind == BETAGAMMA:
        if form == "printed":
            return -(n + kappa) if target == "x" else -(n - kappa + 1)
        return -(n + kappa * (m + 1)) if target == "x" else -(n + (1 - kappa) * (m + 1))
    if kind == CLIFFORD:
        if form == "printed":
            return n
        return -(m + n + 1) if target == "psi*" else -n
    raise ValueError(kind)


def commutator_lemma_check(ctx: BRSTContext, kind: str, m_range: Iterable[int], n_range: Iterable[int],
                           kappa=Fraction(1, 2), form: str = "printed", w2max: int = 4,
                           states: Optional[List[FockState]] = None, stop_after: Optional[int] = None
                           ) -> CommutatorReport:
    """Evaluate the mode commutators of a conformal summand on spanning states.

    ``form="printed"`` compares with the right-hand sides as printed;
    ``form="corrected"`` with the primary-field law
    [L(m+1), a(n)] = ((wt a - 1)(m+1) - n) a(m+n).
    """
    kappa = Fraction(kappa)
    states = states if states is not None else spanning_states(ctx, w2max)
    alg = ctx.algebra
    report = CommutatorReport(kind, form, 0)
    m_range, n_range = list(m_range), list(n_range)
    if kind == HEIS:
        cases = [(omega_heisenberg(ctx), generator(alg, C, i), generator(alg, C, i), "c", 2)
                 for i in range(1, ctx.M + 1)]
    elif kind == BETAGAMMA:
        cases = []
        for j in range(1, ctx.N + 1):
            om = omega_betagamma(ctx, kappa, j)
            for k in range(1, ctx.N + 1):
                for kd, name in ((X, "x"), (Y, "y")):
                    g = generator(alg, kd, k)
                    cases.append((om, g, g if j == k else None, name, 1))
    elif kind == CLIFFORD:
        om = omega_clifford(ctx)
        cases = []
        for i in range(1, ctx.M + 1):
            for kd, name in ((PSISTAR, "psi*"), (PSI, "psi")):
                g = generator(alg, kd, i)
                cases.append((om, g, g, name, 1))
    else:
        raise ValueError(kind)
    for om, g, target, name, hpow in cases:
        for m in m_range:
            for n in n_range:
                coef = _rhs_coefficient(kind, form, name, m, n, kappa)
                for s in states:
                    lhs = commutator_on(om, m + 1, g, n, s)
                    if target is None:
                        rhs = FockState(alg, {})
                    else:
                        rhs = nth_product(target, s, m + n).times_hbar(hpow) * coef
                    report.checked += 1
                    if lhs != rhs:
                        report.mismatches.append({"generator": f"{name}", "m": m, "n": n,
                                                  "state": str(s), "lhs": str(lhs), "rhs": str(rhs)})
                        if stop_after and len(report.mismatches) >= stop_after:
                            return report
    return report


def d_omega_clifford_check(ctx: BRSTContext) -> Dict[str, bool]:
    """Compare d(omega_F) with +- sum_i mu_i(-1) psi*_i(-2)."""
    d = differential(ctx, omega_clifford(ctx))
    target = FockState(ctx.algebra, {})
    for i in range(1, ctx.M + 1):
        target = target + nth_product(ctx.comoments[i - 1], generator(ctx.algebra, PSISTAR, i, 2), -1)
    return {"plus": d == target, "minus": d == -target}


def grading_check(ctx: BRSTContext, omega: ConformalVector, w2max: int = 4) -> List[str]:
    """omega_(1) acts on H^0 representatives by hbar^2 times the conformal weight."""
    bad = []
    for w2 in range(0, w2max + 1):
        for m2 in range(0, w2max + 1):
            for rep in cohomology(ctx, Fraction(w2, 2), Fraction(m2, 2), 0).basis_of_H:
                if nth_product(omega.state, rep, 1) != (rep * Fraction(w2, 2)).times_hbar(2):
                    bad.append(f"{rep} at weight {Fraction(w2, 2)}")
    return bad


def radical_center_check(ctx: BRSTContext, w2max: int = 4) -> Optional[FockState]:
    """A central element sum a_i c_i when the Heisenberg pairing is degenerate, else None."""
    g = [list(r) for r in ctx.algebra.gram]
    kernel = linalg.integer_kernel([[int(v) for v in row] for row in g]) \
        if all(Fraction(v).denominator == 1 for row in g for v in row) else None
    if kernel is None:
        rows, piv = linalg.rref(g)
        free = [c for c in range(ctx.M) if c not in piv]
        kernel = []
        for f in free:
            v = [Fraction(0)] * ctx.M
            v[f] = Fraction(1)
            for r, p in zip(rows, piv):
                v[p] = -r[f]
            kernel.append(v)
    if not kernel:
        return None
    coeffs = kernel[0]
    zeta = FockState(ctx.algebra, {})
    for i, a in enumerate(coeffs, start=1):
        if a:
            zeta = zeta + generator(ctx.algebra, C, i) * a
    if not differential(ctx, zeta).is_zero():
        raise VerificationError("radical element is not closed")
    for s in spanning_states(ctx, w2max):
        for n in range(0, w2max + 2):
            if not nth_product(zeta, s, n).is_zero():
                raise VerificationError(f"radical element acts on {s} at n={n}")
    return zeta
