# %% Ideal arithmetic in Hermite normal form
from nfdelta import builtin_fields, dual_ideal, enumerate_ideals, factor_ideal, ideal_counts
from nfdelta import alg1_principalize, alg1_uniformizer, squarefree_squarefull_split

K = builtin_fields()["Qsqrt-5"]
p2 = K.ideal(2, K([1, 1]))
print("p2 =", p2.numerator_repr(), "norm", p2.norm, "p2^2 == (2):", p2 * p2 == K.ideal(2))

# %% factorisation by Dedekind-Kummer
for n in (2, 3, 6, 7):
    print(n, [(P.ideal.numerator_repr(), P.norm, e) for P, e in factor_ideal(K.ideal(n))])

# %% the different, duals and a square-free / square-full split
print("different norm", K.different.norm, "dual of p2 has norm", dual_ideal(p2).norm)
b1, b2 = squarefree_squarefull_split(K.ideal(12))
print("(12) =", b1.numerator_repr(), "*", b2.numerator_repr())

# %% uniformizers and principalization in a field with class number 2
alpha = alg1_uniformizer(p2, p2)
gen, P = alg1_principalize(p2)
print("uniformizer at p2:", alpha, " p2 * P = (", gen, ") with P =", P.ideal.numerator_repr())

# %% ideal counts a_m against the residue of the zeta function
a = ideal_counts(K, 10000)
print("a_1..a_12 =", a[1:13].tolist())
print("sum a_m / X at X = 10^4:", a.sum() / 10000)
print("ideals of norm <= 10:", [I.numerator_repr() for I in enumerate_ideals(K, 10)])
