"""The double-series example and the product (stuffle) identity.

For depth one the identity is equivalent to a statement about the
two-variable double series: MT(s-1, 1; 1) - z(1, s) = z(s+1).  This script
checks it numerically at s = 3 and exercises the product identity for two
single series.
"""

import math

from cycliczeta import (
    eval_mordell_tornheim,
    eval_mzf,
    harmonic_relation_check,
)

Z4 = math.pi**4 / 90

print("double-series identity at s = 3 (target z(4) = %.10f):" % Z4)
for n in (500, 1000, 2000, 4000):
    mt = eval_mordell_tornheim(2, 1, 1, n).value.real
    z13 = eval_mzf([1.0, 3.0], n).value.real
    print(f"  N={n:5d}  MT(2,1;1) - z(1,3) = {mt - z13:.8f}   defect {abs(mt - z13 - Z4):.2e}")

print("\nproduct identity z(s1) z(s2) = z(s1,s2) + z(s2,s1) + z(s1+s2):")
print("at one matched box truncation the four pieces tile the product box,")
print("so the residual is floating rounding at any cutoff:")
for s1, s2 in ((2.0, 2.0), (2.0, 3.0 + 1.0j)):
    r = harmonic_relation_check(s1, s2, 10**4)
    print(f"  s1={s1}, s2={s2}: residual {r:.2e}")

print("\na complex-argument single series with refinement diagnostics:")
rep = eval_mzf([2.0 + 1.0j], 100_000)
print(f"  value {rep.value:.10f}, residual estimate {rep.residual:.2e}")
