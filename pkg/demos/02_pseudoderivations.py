# coding: utf-8

# # Maps V -> C((z)) (x) V
#
# X_{f,v} = sum_n f^(n)(z)/n! v_n is built from a Laurent series f and a vector v. The
# checks compare both sides of the defining commutator identity block by block.

# In[1]:

from fractions import Fraction

from vertexlab import (HeisenbergVertexAlgebra, LaurentSeries, Vector, check_lie_hom, check_pseudo,
                       delta_build, delta_inverse_check, pd_commute_check, pd_exp, scalar_test_set, xfv_build)

M = HeisenbergVertexAlgebra(kappa=1, cutoff=6)
alpha = M.alpha_vec(-1, M.vac())
omega = Vector(M.conformal_vector)
z = LaurentSeries.monomial


# In[2]:

X = xfv_build(M, z(-1), alpha)
print(M.format_vector(X.apply(alpha)))
print(check_pseudo(M, X, "derivation", (2, (-3, 3))).line())


# The scalar test set mixes polynomials, poles and a truncated series.

# In[3]:

for name, f in scalar_test_set(8):
    print(f"{name:>12}  {f}")


# Brackets of such maps close up: [X_{f,u}, X_{g,v}] is again of the form X.

# In[4]:

rep = check_lie_hom(M, z(-1), alpha, LaurentSeries.constant(1), omega)
print(rep.line())


# # Exponentials
#
# exp is only defined once the commuting condition has been witnessed.

# In[5]:

com = pd_commute_check(M, X, (3, (0, 0)))
E = pd_exp(M, X, com)
print(M.format_vector(E.apply(alpha)))
print(check_pseudo(M, E, "endomorphism", (2, (-3, 3))).line())

# X_{z, omega} does not commute with its own shifts, so exp refuses it.
print(pd_commute_check(M, xfv_build(M, z(1), omega), (3, (0, 0))).line())


# # The shift operator Delta(h, z)
#
# For h = alpha, Delta moves the conformal vector by z^-1 h + <h,h>/2 z^-2 vac.

# In[6]:

D = delta_build(M, alpha)
print(M.format_vector(D.apply(omega)))
print(check_pseudo(M, D, "endomorphism", (2, (-3, 3))).line())
print(delta_inverse_check(M, D, (3, (0, 0))).line())
