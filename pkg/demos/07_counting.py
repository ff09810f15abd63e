# %% Counting zeros of x^3 + y^3 - 2z^3 two ways
import numpy as np

from nfdelta.checks import count_instance
from nfdelta.counting import count_decomposed, count_direct, singular_series
from nfdelta.forms import CubicForm
from nfdelta import builtin_fields

F, W = count_instance(6.0)
direct = count_direct(F, W)
print("direct weighted count", direct)

# %% the delta-method decomposition, tightening the m-cut
for tol in (1e-2, 1e-3):
    rep = count_decomposed(F, W, tol=tol, direct=direct)
    print(f"tol {tol:g}: {rep.decomposed:.8f}, relative gap {rep.relative_error:.2e}, moduli {len(rep.ledger)}")
print([(e.norm, e.cut, round(e.contribution, 6)) for e in rep.ledger[:6]])

# %% the singular series of a ten-variable diagonal cubic
Q = builtin_fields()["Q"]
norms, terms, partial = singular_series(CubicForm.diagonal(Q, [1] * 10), 30)
print(np.round(partial, 6))
