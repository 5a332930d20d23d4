# # Time evolution: full versus effective model
#
# Starting from |000>|0>, the fidelity with W grows on the slow time scale
# set by the effective pumping rates. The 48-state effective model tracks
# the 250-state full model and reaches much longer times cheaply.

# In[1]:

import numpy as np

from rydberg_w import SystemParams, build_effective_model, build_full_model, evolve, fidelity, w_state
from rydberg_w.observables import basis_state

params = SystemParams()
eff = build_effective_model(params)
W_eff = w_state(eff)
traj_eff = evolve(eff, basis_state(eff, "000"), 5e4, 21,
                  observables={"fidelity": lambda r: fidelity(r, W_eff)})
for t, f in zip(traj_eff.times[::4], traj_eff.observables["fidelity"][::4]):
    print(f"gt = {t:8.0f}   F_eff = {f:.4f}")

# A short full-model run for comparison (the full horizon takes minutes).

# In[2]:

full = build_full_model(params)
W_full = w_state(full)
traj_full = evolve(full, basis_state(full, "000"), 500.0, 3,
                   observables={"fidelity": lambda r: fidelity(r, W_full)})
short = evolve(eff, basis_state(eff, "000"), 500.0, 3,
               observables={"fidelity": lambda r: fidelity(r, W_eff)})
print("F_full:", np.round(traj_full.observables["fidelity"], 4))
print("F_eff: ", np.round(short.observables["fidelity"], 4))
print("max trace drift:", traj_full.trace_drift.max())
