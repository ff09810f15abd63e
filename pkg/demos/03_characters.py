# %% Additive characters and their orthogonality
import numpy as np

from nfdelta import builtin_fields
from nfdelta.characters import (build_primitive_char, char_orthogonality_sum, primitive_char_sum_direct,
                                primitive_char_sum_mobius)

K = builtin_fields()["Qi"]
b = K.ideal(2)
sigma = build_primitive_char(b)
print("gamma =", sigma.gamma, "denominator ideal norm", sigma.certificate.norm, "primitive", sigma.is_primitive())

# %% values on the residues mod b: roots of unity taken from exact fractions
print(np.round(sigma.values(b.residues), 12))

# %% sum over all characters mod b
for alpha in (K(1), K([1, 1]), K(2)):
    print(alpha, np.round(char_orthogonality_sum(b, alpha, sigma), 12))

# %% primitive sums, direct against Moebius inversion
b = K.ideal(K([1, 1])) ** 3
for a in (K.unit_ideal, K.ideal(2), K.ideal(4)):
    print(a.numerator_repr(), np.round(primitive_char_sum_direct(b, a), 10), primitive_char_sum_mobius(b, a))
