"""A walk through the smallest example: Delta = [[1, 1]], stability 1 (T*P^1).

Run with ``python3 demos/tour_example_one.py``.
"""

from fractions import Fraction

from htva import brst, conformal as cf, hypertoric as ht, zhu_weyl as zw
from htva.vertex_engine import format_state, ope, parse_element

inp = ht.HypertoricInput.create([[1, 1]], [1])
rep = ht.validate(inp)
print("unimodular:", rep.unimodular, " generic:", ht.is_generic(inp))
print("Gram matrix:", ht.gram_matrix(inp))
print("charts:", [c.J for c in ht.enumerate_charts(inp)])
print("Lambda_0 basis:", ht.lattice_lambda0(inp))

ctx = brst.make_context(inp)
alg = ctx.algebra

# free-field OPEs
x, y = parse_element("x1[-1]", alg), parse_element("y1[-1]", alg)
print("\nx1(z) y1(w) ~", [(k, format_state(s)) for k, s in ope(x, y)])

# the BRST differential and its square
print("d(c1) =", format_state(brst.differential(ctx, parse_element("c1[-1]", alg))))
ok, count, _ = brst.check_d_squared(ctx, 4, 6)
print(f"d^2 = 0 on {count} basis monomials: {ok}")

# low-weight cohomology
for w, m in [(0, 0), (1, 1), (1, 2)]:
    r = brst.cohomology(ctx, Fraction(w), Fraction(m), 0)
    print(f"dim H^0 at w={w}, m={m}: {r.dim_H}")

# conformal vector
om = cf.build_omega(ctx)
v = cf.virasoro_check(ctx, om)
print("\ncentral charge:", om.central_charge, " Virasoro OPE holds:", v.match)

# Zhu algebra against the Weyl algebra
comp = zw.compare_zhu_weyl(ctx, 2)
for c in comp.commutators:
    a, b = c["pair"]
    print(f"[{a}, {b}]_* = {c['va']}   Weyl side: {c['weyl']}   ({c['status']})")
