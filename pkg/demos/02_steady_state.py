# # Steady state and uniqueness
#
# The W state is the unique steady state of the full model. Two independent
# routes find it: a direct null-space solve and pseudo-transient relaxation.

# In[1]:

import time

from rydberg_w import SystemParams, build_full_model, fidelity, purity, steady_state, w_state
from rydberg_w.observables import basis_state
from rydberg_w.solvers import trace_distance

model = build_full_model(SystemParams())
W = w_state(model)

t0 = time.perf_counter()
direct = steady_state(model)
print(f"null-space solve: {time.perf_counter() - t0:.1f} s, residual {direct.residual:.1e}")
print(f"F = {fidelity(direct.rho_ss, W):.5f}, purity = {purity(direct.rho_ss):.5f}")

# Relaxing from a different initial state lands on the same density matrix.

# In[2]:

relaxed = steady_state(model, "longtime", rho0=basis_state(model, "111"))
print("trace distance between routes:", trace_distance(direct.rho_ss, relaxed.rho_ss))

# `null_space_probe` sweeps every symmetry block of the Liouvillian for its
# smallest singular values; it takes a couple of minutes, so it is left as a
# suggestion here:
#
#     probe = null_space_probe(model)
#     probe.null_dim, probe.gap_ratio
