"""Weak-order decomposition of constrained sums, with the counting oracle.

A sum over a domain mixing strict and non-strict inequalities splits into
totally ordered chains, one per compatible ordered set partition.  The
split is validated exactly: counting lattice points directly must equal
summing binomial chain counts over the weak orders.
"""

from cycliczeta import (
    EXTRA,
    Shape,
    VarId,
    build_constraints_S_i,
    build_constraints_S_ij,
    chain_count,
    count_lattice_points,
    decompose_to_mzv,
    weak_orders,
)

shape = Shape((2,))
cs = build_constraints_S_ij(shape, 1, 1)
print("domain:", cs)
print("weak orders:")
for osp in weak_orders(cs):
    print("  ", osp)

print("\ncounting oracle at a few cutoffs:")
for n in (5, 12, 30):
    direct = count_lattice_points(cs, n)
    split = sum(chain_count(len(p.levels), n) for p in weak_orders(cs))
    print(f"  N={n:2d}: direct {direct} = split {split}")

print("\ninteger exponents turn each weak order into one symbol:")
exps = {VarId.block(1, 1): 1, VarId.block(1, 2): 2, EXTRA: 2}
print("  exponents", {str(v): e for v, e in exps.items()})
print("  ->", decompose_to_mzv(cs, exps))

cs_i = build_constraints_S_i(Shape((1,)), 1)
print("\nforced equality merges exponents:", cs_i)
print("  ->", decompose_to_mzv(cs_i, {VarId.block(1, 1): 2, EXTRA: 1}))
