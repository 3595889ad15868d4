"""Exact relation generation and the independent-relation counts.

Specializing the identity at positive-integer exponents gives one exact
integer relation per block configuration.  Stacking one weight's relations
and computing the exact rank reproduces the reference counts.
"""

from cycliczeta import (
    Composition,
    IntArgs,
    Shape,
    combo_partial_sum,
    csf_relation,
    cyclic_relation,
    enumerate_family,
    generate_relations,
    rank_exact,
    relation_matrix,
    table1,
    zeta_star_expand,
)

print("the depth-one configuration gives the classical identity:")
rel = cyclic_relation(IntArgs(Shape((1,)), (2,)))
print("  ", rel.combo, "   (z(1,2) = z(3))")
print("   truncated value at N=1e6:", combo_partial_sum(rel.combo, 10**6))

print("\nstar symbols expand by merging adjacent parts:")
print("  z*(1,1,2) =", zeta_star_expand(Composition((1, 1, 2))))

print("\nall-singleton configurations reduce to the cyclic-sum identity;")
print("both construction routes agree exactly:")
k = IntArgs(Shape((1, 1)), (1, 2))
print("  ", csf_relation(k).combo)
assert csf_relation(k).combo == cyclic_relation(k).combo

print("\nweight-5 family sizes and ranks:")
for family in ("csf", "derivation", "cyclic"):
    rels = generate_relations(5, family)
    rank = rank_exact(relation_matrix(rels))
    print(f"  {family:10s}: {len(rels):2d} configurations, rank {rank}")

print("\nindependent-relation counts (weights 3..6):")
for w, row in table1(range(3, 7)).items():
    print(f"  weight {w}: csf {row['csf']}, derivation {row['derivation']}, "
          f"cyclic {row['cyclic']}, all-known (reference) {row['all_ref']}")
print("\nnote: the weight-6 cyclic count is 11 here; the two sub-families")
print("each span 10 at that weight, and one verified extra instance is")
print("independent of them (see tests/test_acceptance.py).")

print("\nconfigurations are enumerated deterministically, e.g. weight 4, csf:")
for shape, k in enumerate_family(4, "csf"):
    print(f"  shape {shape}, k = {k}")
