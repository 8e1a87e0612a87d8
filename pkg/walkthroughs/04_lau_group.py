# coding: utf-8

# # The dual of the Lau group scheme
#
# For a display datum U of type (d, d') over W_n(F_p) the dual is cut out by linear conditions on the
# adjoint representation. Its order should be p^(n d'(d-d')).

# In[1]:

import numpy as np

from wittdisp.exactalg import zoo
from wittdisp.laupipe import (analyze_lau, bp_sample, compare_routes, eliminate_to_g1,
                              equivariance_check, lau_dual_adjoint)
from wittdisp.semidisplay import DisplayDatum

D = DisplayDatum.random(4, 2, 2, 2, 1)
an = analyze_lau(D)
print("order exponent", an.report.order_exponent, "expected", an.expected["order_exponent"])
print("Lie dimension ", an.lie_dim, "expected", an.expected["lie_dim"])
print("2-cosmooth    ", an.report.n_cosmooth)


# # Ordinary and supersingular fibers
#
# With d = 2, d' = 1, n = 1 the upper-left entry of U decides: a unit gives an etale dual,
# zero gives alpha_p.

# In[2]:

for p in (2, 3):
    counts = {0: 0, 1: 0}
    for entries in np.ndindex(p, p, p, p):
        U = np.array(entries).reshape(2, 2)
        if (U[0, 0] * U[1, 1] - U[0, 1] * U[1, 0]) % p == 0:
            continue
        tangent = lau_dual_adjoint(DisplayDatum(p, 1, 2, 1, U)).group.lie_dim()
        counts[tangent] += 1
    print(f"p = {p}: etale {counts[0]}, infinitesimal {counts[1]}")


# # Three routes, one group
#
# The adjoint presentation, the zink presentation of the adjoint semidisplay, and the economic
# presentation pick out the same solution sets. Eliminating to g_1 coordinates keeps the order.

# In[3]:

D3 = DisplayDatum.random(1, 3, 1, 3, 2)
routes = compare_routes(D3)
print(routes["orders"], routes["agree"])
print(eliminate_to_g1(lau_dual_adjoint(D3)).elimination["eliminated"][:4], "...")


# # Equivariance under the display group
#
# For (g, h) in BP_n the map eta -> eta o Ad_h carries solutions for h U g^{-1} onto solutions for U.

# In[4]:

pair = bp_sample(7, 2, 2, 1, 2)
print(pair.g, pair.h, sep="\n")
res = equivariance_check(D, pair)
print(res["member"], res["equivariant"], sorted(res["algebras"]) == sorted(zoo(2)))
