"""Weyl-algebra reduction, the group action on P_zeta, and the Zhu comparison.

Run with ``python3 demos/weyl_and_zhu.py``.
"""

from fractions import Fraction

from htva import brst, hypertoric as ht, zhu_weyl as zw

for delta, stab in (([[1, 1]], [1]), ([[1, 0, 1], [0, 1, 1]], [2, 1])):
    inp = ht.HypertoricInput.create(delta, stab)
    print(f"=== Delta = {delta}")
    zeta = tuple(ht.lattice_lambda0(inp)[0])
    p = zw.p_zeta(inp, zeta)
    for k in range(1, inp.N + 1):
        red = zw.reduce_mod_ideal(inp, zw.weyl_commutator(zw.h_k(inp, k), p))
        print(f"[H{k}, P{zeta}] reduces to {red}")
    inv = zw.weyl_invariants_check(inp, degree_bound=4)
    print("group action on generators:", sorted({a["status"] for a in inv.actions}))
    print("generated subalgebra dims:", inv.subalgebra_dims)
    print("invariant dims:           ", inv.invariant_dims)
    ctx = brst.make_context(inp)
    # the H,P pairs of the second example have degree 5/2
    w = Fraction(2) if len(delta) == 1 else Fraction(5, 2)
    comp = zw.compare_zhu_weyl(ctx, w)
    print("Zhu vs Weyl commutators all match:", comp.all_match)
    print("C2 dims:", comp.c2_dims, " classical:", comp.classical_dims)
    print("C2 Poisson check:", zw.c2_poisson_check(ctx, 2).ok)
    print()
