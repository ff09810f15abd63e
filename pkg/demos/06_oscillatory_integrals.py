# %% Oscillatory integrals: p_rho, I_b and the singular integral
from fractions import Fraction

import numpy as np

from nfdelta import builtin_fields
from nfdelta.checks import count_instance
from nfdelta.oscillatory import I_b, height, height_integral, p_rho, scaling_slope, singular_integral

fields = builtin_fields()
Q = fields["Q"]

# %% heights and the integral of H^-2 over height balls
print(height(fields["Qi"], np.array([3 + 0j])))
for A in (10, 100, 1000):
    print(A, [round(height_integral(fields[k], -2, A), 4) for k in ("Q", "Qi", "Qsqrt2")])

# %% p_rho decays once the height of v passes a multiple of 1/rho
for K in (Q, fields["Qi"]):
    p0 = abs(p_rho(K, 0.5, [0.0] * K.n_places))
    for f in (10, 40, 160):
        v = (f / 0.5) ** (1 / K.degree)
        print(K.name, f, f"{abs(p_rho(K, 0.5, [v] * K.n_places)) / p0:.2e}")

# %% I_b at frequency m and its mirror image
F, W = count_instance(6.0)
m = [Fraction(1, 2), Fraction(-1, 4), 1]
print(I_b(F, W, Q.ideal(2), m, 6 ** 1.5).value, I_b(F, W, Q.ideal(2), [-x for x in m], 6 ** 1.5).value)

# %% J(0) against (log P)^-4
Ps = (10, 20, 40)
J = [singular_integral(*count_instance(P)) for P in Ps]
print(np.round(J, 6), "slope", round(scaling_slope(J, Ps), 3))
