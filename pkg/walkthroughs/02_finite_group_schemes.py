# coding: utf-8

# # Finite group schemes inside Witt ambients
#
# A group scheme here is a system of equations in Witt coordinates; the group law comes from
# Witt addition. The order is the dimension of the coordinate ring, read from a Groebner basis.

# In[1]:

from wittdisp.exactalg import MPoly, prime_field, zoo
from wittdisp.grpscheme import (EqGroupPresentation, PLinearPair, a_group, b_tensor, grouplike_points,
                                primitive_dim, smoothness_report)

p = 3
alpha = a_group(PLinearPair(p, ((0,),)))
etale = a_group(PLinearPair(p, ((1,),)))
for name, G in (("alpha_p", alpha), ("Z/p", etale)):
    print(name, "order", G.order(), "tangent dim", G.lie_dim(),
          "points", [len(G.points(A)) for A in zoo(p).values()])


# # n-cosmoothness from the V-complex
#
# ker(F) on W_2 has order p^2 and is 2-cosmooth: its dual is ker(F^2) on the additive group.
# A product of two copies of alpha_p also has order p^2 but fails.

# In[2]:

Fp = prime_field(p)
y0, y1 = MPoly.gens(Fp, 2)
W2F = EqGroupPresentation(p, [2], [y0**p, y1**p])
a0, b0 = MPoly.gens(Fp, 2)
alpha2 = EqGroupPresentation(p, [1, 1], [a0**p, b0**p])
for name, G in (("W_2[F]", W2F), ("alpha_p^2", alpha2)):
    rep = smoothness_report(G, 2)
    print(name, "2-cosmooth:", rep.n_cosmooth, "  Hom(G, G_a) has dim", primitive_dim(G))


# # Cartier duals
#
# Points of the dual are grouplike elements of the coordinate ring after base change. For W_2[F]
# the counts match those of ker(F^2) on G_a.

# In[3]:

(t,) = MPoly.gens(Fp, 1)
alpha_p2 = EqGroupPresentation(p, [1], [t ** (p * p)])
for A in zoo(p).values():
    print(f"{A.name:22s}", len(grouplike_points(W2F, A)), len(alpha_p2.points(A)))


# # Tensor products of p-linear pairs
#
# The rank multiplies, and the group scheme of the tensor product has order p^(r r').

# In[4]:

P = PLinearPair(p, ((0, 1), (0, 0)))
Q = PLinearPair(p, ((1,),))
T = b_tensor(P, Q)
print(T.c, T.rank, a_group(T).order() == p ** (P.rank * Q.rank))
