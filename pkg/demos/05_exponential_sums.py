# %% Complete cubic exponential sums
from fractions import Fraction

from nfdelta import builtin_fields
from nfdelta.expsums import S_b, S_tilde, deligne_sample, multiplicativity_check, relation_check
from nfdelta.forms import CubicForm
from nfdelta.ideals import primes_above

fields = builtin_fields()
Q, Qi = fields["Q"], fields["Qi"]
F = CubicForm.parse(Q, "x3+y3+z3")
print("S_7(0) =", S_b(F, Q.ideal(7), [0, 0, 0]).value)
print("S_7(1/7, 2/7, 0) =", S_b(F, Q.ideal(7), [Fraction(1, 7), Fraction(2, 7), 0]).value)

# %% the twisted sum, multiplicativity and the change of variables m -> alpha m over Q(i)
G = CubicForm.parse(Qi, "x3+2y3+3z3+xyz")
v = [Qi([1, 1]), Qi(2), Qi([0, 1])]
print(multiplicativity_check(G, Qi.ideal(Qi([1, 1])) ** 2, Qi.ideal(3), v))
print(relation_check(G, Qi.ideal(3), [Qi([Fraction(1, 6), 0]), Qi([0, Fraction(1, 2)]), Qi(0)]))
print("S~ at an inert prime:", S_tilde(G, Qi.ideal(3), v).value)

# %% square-root cancellation at primes
for p in (7, 13, 19, 31):
    kept, flagged = deligne_sample(F, primes_above(Q, p)[0], count=25)
    print(p, f"max |S|/p^2 = {max(r.ratio for r in kept):.3f}", f"excluded {len(flagged)}")
