"""Block shapes, index-constraint systems, and convergence-domain checks.

A shape (d; r_1..r_d) groups summation indices into d blocks.  This script
builds the four constraint-system families attached to a shape and walks
through membership tests for the convergence domain W.
"""

from cycliczeta import (
    ComplexArgs,
    Shape,
    build_constraints_S,
    build_constraints_S_i,
    build_constraints_S_ij,
    build_constraints_T_i,
    in_domain_W,
    w_inequalities,
)

shape = Shape((2, 1))  # two blocks: depths 2 and 1
print(f"shape {shape}: d={shape.d}, total depth {shape.total_depth}")
print("positions:", shape.positions())

print("\nS   =", build_constraints_S(shape))
for i in (1, 2):
    print(f"S_{i} =", build_constraints_S_i(shape, i))
    print(f"T_{i} =", build_constraints_T_i(shape, i))
for (i, j) in shape.positions():
    print(f"S_{i}{j} =", build_constraints_S_ij(shape, i, j))

print("\nmembership in W:")
for values in [(1.2, 2.2, 1.5), (1.2, 2.2, 0.9), (0.5 + 1j, 1.2, 1.5)]:
    s = ComplexArgs(shape, values)
    verdict = "inside" if in_domain_W(s) else "outside"
    print(f"  s = {s}  ->  {verdict}")
    for q in w_inequalities(s):
        print("     ", ("ok  " if q.ok else "FAIL"), q.describe())
