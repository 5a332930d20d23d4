# # Building the full model
#
# Three five-level atoms (levels 0, 1, e, r, p) share one cavity mode. The
# basis is atom1 x atom2 x atom3 x cavity, with the photon number truncated
# at n_c levels, so the default space has 5**3 * 2 = 250 states.

# In[1]:

import numpy as np

from rydberg_w import SystemParams, build_full_model, liouvillian
from rydberg_w.model import excitation_charge

params = SystemParams()
model = build_full_model(params)
print(params)
print("Hilbert dimension:", model.dim, " collapse operators:", len(model.collapse))

# Basis labels carry the atomic levels and the photon number.

# In[2]:

print(model.basis[:4])
print("index of |100>|0>:", model.index("100"))

# The Hamiltonian is Hermitian and the collapse set holds cavity loss,
# spontaneous emission from e, and decay of both Rydberg levels.

# In[3]:

h = model.h
print("Hermitian:", abs(h - h.conj().T).max() == 0, " nonzeros:", h.nnz)

# The Liouvillian of the 250-state model is a 62,500 x 62,500 sparse matrix.

# In[4]:

L = liouvillian(model.h, model.collapse)
print("Liouvillian shape:", L.matrix.shape, " nonzeros:", L.matrix.nnz)

# A conserved excitation charge makes the Liouvillian block diagonal; the
# solvers use this together with the atom-exchange symmetry.

# In[5]:

q = excitation_charge(model.basis)
print("charge values:", np.unique(q))
