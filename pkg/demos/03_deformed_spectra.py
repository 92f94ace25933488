# coding: utf-8

# # Twisting modules by Delta
#
# Precomposing the action of V on a module W with Delta(h, z) gives a new module. On the
# rank one lattice algebra with h = alpha/2 the lowest weight drops from 0 to 1/4.

# In[1]:

from fractions import Fraction

from vertexlab import (HeisenbergVertexAlgebra, LatticeVertexAlgebra, check_module_axioms, check_route_equality,
                       deform_action, delta_build, graded_spectrum)
from vertexlab.deform import PlainModule


# In[2]:

M = HeisenbergVertexAlgebra(kappa=1, cutoff=6)
W = deform_action(M, PlainModule(M), delta_build(M, M.alpha_vec(-1, M.vac())))
def show(spectrum):
    print(", ".join(f"{w} x{m}" for w, m in spectrum))


show(graded_spectrum(M, PlainModule(M), 3))
show(graded_spectrum(M, W, 3))


# The twisted M(1) looks like the Fock module of momentum 1: its weights are shifted by 1/2.

# In[3]:

show(graded_spectrum(M, PlainModule(M, Fraction(1)), 3))
print(check_module_axioms(M, W, (2, (-4, 4))).line())
print(check_route_equality(M, W, (2, (-4, 4))).line())


# # The lattice case
#
# Sectors e^{m alpha} have weight m^2. After the twist, sector m sits at (m + 1/2)^2, so
# m = 0 and m = -1 tie for the bottom.

# In[4]:

VL = LatticeVertexAlgebra(k=1, cutoff=6)
half = VL.alpha_vec(-1, VL.vac()) * Fraction(1, 2)
WL = deform_action(VL, PlainModule(VL), delta_build(VL, half))
for w, mult in graded_spectrum(VL, WL, 2):
    print(f"{str(w):>5}  x{mult}")


# In[5]:

print(check_module_axioms(VL, WL, (2, (-3, 3))).line())
