# %% Number fields, embeddings and unit balancing
import numpy as np

from nfdelta import builtin_fields, unit_reduce, vnorm, vtrace

fields = builtin_fields()
for key, K in fields.items():
    print(f"{K.name:12s} d={K.degree} (r1, r2)=({K.r1}, {K.r2}) D={K.disc} h={K.class_number} w={K.roots_of_unity}")

# %% exact norm and trace against the embedding into V
Qi = fields["Qi"]
a = Qi([3, 4])  # 3 + 4i
print(a, a.embed(), a.norm(), a.trace())
print(vnorm(Qi, a.embed()), vtrace(Qi, a.embed()))

# %% a real quadratic field: the fundamental unit and unit balancing
K = fields["Qsqrt2"]
eps = K.fundamental_units[0]
print("unit", eps, "norm", eps.norm(), "embedding", eps.embed())
v = (eps ** 5 * K([3, 1])).embed()
u, w = unit_reduce(K, v)
print("unbalanced |v_l| =", np.abs(v), "-> balanced", np.abs(w), "with u =", u)
