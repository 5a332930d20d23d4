# # Zeno decomposition and effective operators
#
# Strong atom-cavity coupling splits the single-excitation sector into
# dressed eigenspaces. Weak driving then acts only within the zero-energy
# subspace, which holds the ground states and five dark states D1..D5.

# In[1]:

import numpy as np

from rydberg_w import (
    NAMED_STATES,
    SystemParams,
    zeno_decompose,
    zeno_effective_hamiltonian,
    zeno_effective_lindblads,
    zeno_projection_rates,
)

params = SystemParams()
dec = zeno_decompose(params)
print("sector size:", len(dec.labels))
print("eigenvalues (units of g):", np.round(dec.eigenvalues, 6))
print("zero-subspace dimension:", dec.zero_subspace.shape[1])

# The effective Hamiltonian couples each ground state to the dark states.

# In[2]:

h = zeno_effective_hamiltonian(params).toarray()
for i, j in zip(*np.nonzero(np.triu(h))):
    print(f"<{NAMED_STATES[i]}|H|{NAMED_STATES[j]}> = {h[i, j] / params.omega:+.4f} Omega")

# Spontaneous emission returns each dark state to the ground manifold. The
# branching ratios from the full collapse operators can be compared with the
# tabulated effective jump operators.

# In[3]:

ops = zeno_effective_lindblads(params)
print(len(ops), "effective jump operators")
for (ground, dark), rate in sorted(zeno_projection_rates(params).items(),
                                   key=lambda kv: (kv[0][1], kv[0][0])):
    print(f"{dark} -> {ground}: {rate / params.gamma_e:.4f} gamma_e")
