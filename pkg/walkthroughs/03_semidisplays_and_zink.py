# coding: utf-8

# # Semidisplays in rigidified coordinates
#
# An n-truncated semidisplay of rank d over F_p is a d x d matrix X whose first d' columns live in
# W_n(F_p) = Z/p^n and the rest in W_{n-1}(F_p). Displays come from invertible U.

# In[1]:

from wittdisp.exactalg import zoo_algebra
from wittdisp.laupipe import (economic_presentation, lau_dual_zink, zink_complex_truncated,
                              zink_dual_grouplike_count)
from wittdisp.semidisplay import (DisplayDatum, Semidisplay, dual_display, random_semidisplay,
                                  semidisplay_of_display, tensor_semidisplays, unit_semidisplay)

D = DisplayDatum.random(3, 2, 2, 3, 1)
S = semidisplay_of_display(D)
print(D.U)
print(S.X)
print(S.check_axioms())
print("double dual is D:", dual_display(dual_display(D)) == D)


# # Tensor products
#
# The unit semidisplay is a unit for the tensor product, up to relabelling of the basis.

# In[2]:

S1 = random_semidisplay(0, 2, 2, 2, 1)
print(tensor_semidisplays(unit_semidisplay(2, 2), S1).X)
print(S1.X)


# # The dual of the Zink functor
#
# Two presentations of the same group scheme: one with conditions on all coordinates, a smaller
# economic one in T-coordinates only. The projection identifies their solution sets.

# In[3]:

S2 = random_semidisplay(11, 3, 2, 2, 1)
zk, eco = lau_dual_zink(S2), economic_presentation(S2)
print("orders", zk.order(), eco.order(), " rank of P/Q is", S2.dprime)
A = zoo_algebra(3, "eps2")
print(len(zk.points(A)), len(eco.points(A)))


# # Truncated Zink complex
#
# The cokernel of 1 - Phi on supports below M, for the unit and the alpha_p-type semidisplay over
# F_2[e]/(e^2). Both stabilise at 2, the number of points of the dual.

# In[4]:

B = zoo_algebra(2, "eps2")
for name, T in (("unit", unit_semidisplay(1, 2)), ("alpha", Semidisplay(2, 1, 1, 1, [[0]]))):
    r = zink_complex_truncated(T, B, 4)
    print(name, "ker", r.kernel_size, "coker", r.coker_size, "stable", r.stabilized,
          "dual points", zink_dual_grouplike_count(T, B))
