# coding: utf-8

# # Truncated Witt vectors in characteristic p
#
# W_n(A) for a finite F_p-algebra A. Over A = F_p these are just the integers mod p^n,
# written in Teichmuller digits, so that is the first sanity check.

# In[1]:

from wittdisp.exactalg import prime_field, zoo_algebra
from wittdisp.wittcore import (HatWittElement, WittVec, cartier_pairing, int_to_witt,
                               pairing_teichmuller_expansion, witt_to_int)

F2 = prime_field(2)
x = int_to_witt(2, 3, 5)
y = int_to_witt(2, 3, 6)
print(x.entries, y.entries)
print(witt_to_int(x + y), (5 + 6) % 8)
print(witt_to_int(x * y), (5 * 6) % 8)


# Frobenius is the componentwise p-th power and Verschiebung the shift. Their composite is
# multiplication by p in either order.

# In[2]:

A = zoo_algebra(2, "eps2")
e = A.basis_element(1)
z = WittVec(2, A, [A.add(A.one, e), e, A.one])
print("z       ", [A.format(c) for c in z.entries])
print("F z     ", [A.format(c) for c in z.frobenius().entries])
print("V z     ", [A.format(c) for c in z.verschiebung().entries])
print("FV = VF =", z.frobenius().verschiebung() == z.verschiebung().frobenius() == z + z)


# The carry in W_2(F_2[e]/(e^2)): (1, 0) + (1, 0) is (0, 1), while e has no carry because e^2 = 0.

# In[3]:

one = WittVec.one(2, A, 2)
print([A.format(c) for c in (one + one).entries])
te = WittVec.teichmuller(2, A, 2, e)
print([A.format(c) for c in (te + te).entries])


# # The pairing with the formal Witt group
#
# Nilpotent vectors killed by F^n pair with W_n into the units of A. It is computed twice,
# through the Artin-Hasse exponential and through an expansion in Teichmuller digits;
# the two values must agree.

# In[4]:

B = zoo_algebra(2, "eps3")
u = WittVec(2, B, [B.one, B.basis_element(1)])
v = HatWittElement.from_entries(2, B, [B.basis_element(2), B.basis_element(1)], 2)
print(B.format(cartier_pairing(u, v)), B.format(pairing_teichmuller_expansion(u, v)))
print(cartier_pairing(u.frobenius(), v) == cartier_pairing(u, v.verschiebung()))
