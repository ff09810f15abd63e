# %% The smooth delta symbol over a number field
import numpy as np

from nfdelta import ZERO, builtin_fields, enumerate_ideals
from nfdelta.delta import DeltaEvaluator, c_Q, field_invariants, h, poisson_ideal_check

K = builtin_fields()["Qsqrt-5"]
print(field_invariants(K))
for Q in (2, 3, 4, 8):
    print(f"c_Q at Q = {Q}: {c_Q(K, Q):.6f}")

# %% the identity delta(a) = [a = 0] on small ideals
ev = DeltaEvaluator(K, 3)
for a in [ZERO] + enumerate_ideals(K, 9):
    label = "(0)" if a is ZERO else a.numerator_repr()
    print(f"{label:10s} {ev(a).real: .3e}")

# %% the weight h(x, y): zero for x >= 1 and |y| <= x/2, constant in y near 0
x = np.array([0.05, 0.2, 0.8, 1.5])
for y in (0.0, 0.01, 0.3, 2.0):
    print(y, np.round(h(K, x, y), 6))

# %% counting ideals with a smooth weight
for R in (0.02, 0.01, 0.005):
    lhs, main, rel = poisson_ideal_check(K, R=R)
    print(f"R = {R}: sum {lhs:.4f} against {main:.4f}, relative {rel:.2e}")
