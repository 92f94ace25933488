# coding: utf-8

# # The free boson, one mode at a time
#
# The Fock space M(1) is spanned by oscillator monomials a(-n1)...a(-nk)vac. Every
# coefficient below is an exact rational, so equality checks are exact.

# In[1]:

from fractions import Fraction

from vertexlab import HeisenbergVertexAlgebra, Vector, check_va_axioms, parse_vector_expr, y_mode

M = HeisenbergVertexAlgebra(kappa=1, cutoff=6)
print(M)


# The graded dimensions are partition counts.

# In[2]:

print([len([b for b in M.basis(n) if M.weight(b) == n]) for n in range(7)])


# Vectors can be typed in directly.

# In[3]:

alpha = parse_vector_expr("a(-1)*vac", M)
omega = parse_vector_expr("omega", M)
print(M.format_vector(omega))


# a(1) a(-1) vac = kappa vac, and the weight-two vector omega acts as L(0) through its mode 1.

# In[4]:

print(M.format_vector(y_mode(M, alpha, 1, alpha)))
for b in M.basis(3):
    v = M.basis_vector(b)
    assert y_mode(M, omega, 1, v) == v * M.weight(b)
print("omega_1 = L(0) on weights <= 3")


# Products of fields: the mode -1 of alpha on itself is the normal ordered square.

# In[5]:

print(M.format_vector(y_mode(M, alpha, -1, alpha)))
print(M.format_vector(y_mode(M, omega, 0, alpha)))   # D alpha = a(-2)vac


# # Checking the axioms
#
# Creation, skew symmetry, the D bracket and every Borcherds component identity in a window
# of weights and mode exponents. A cell whose inputs reach past the cutoff is counted as
# skipped rather than checked.

# In[6]:

rep = check_va_axioms(M, window=(2, (-3, 3)))
print(rep.line())
for sub in rep.subchecks:
    print("  ", sub.line())


# A mutated structure constant is caught, with the offending cell named.

# In[7]:

bad = HeisenbergVertexAlgebra(kappa=1, cutoff=6, mutation="heisenberg_commutator")
rep = check_va_axioms(bad, ["borcherds"], (2, (-3, 3)))
print(rep.line())
print(rep.counterexample)
