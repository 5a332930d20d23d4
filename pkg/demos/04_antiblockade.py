# # Rydberg antiblockade couplings
#
# With U_rr = 2 Delta, multi-photon transitions into doubly and triply
# excited Rydberg states become resonant. Second- and third-order
# perturbation theory predicts their effective strengths; the oracle checks
# them by fitting exact Rabi oscillations of the atomic Hamiltonian.

# In[1]:

from rydberg_w import NAMED_STATES, SystemParams, antiblockade_oracle, rydberg_effective_hamiltonian

params = SystemParams(omega_r=1.0, delta=50.0)
h = rydberg_effective_hamiltonian(params)
fitted = antiblockade_oracle(params)
ix = {n: k for k, n in enumerate(NAMED_STATES)}
for (a, b), j in fitted.items():
    predicted = abs(h[ix[a], ix[b]])
    print(f"{a} <-> {b}: predicted {predicted:.6f}, fitted {j:.6f}, "
          f"relative error {j / predicted - 1:+.4f}")

# A cross interaction U_rp = 1.5 Delta opens a further resonance into prr-type
# states, which explains the fidelity dip at that value.

# In[2]:

j = antiblockade_oracle(params.replace(u_rp=75.0), pairs=[("100", "prr")])[("100", "prr")]
print(f"100 <-> prr: fitted {j:.6f}")
