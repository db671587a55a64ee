# %% [markdown]
# # Excitation dynamics on an XY chain
#
# One spin flipped at site 1 of an open chain hops towards the far end (Bob).
# In the one-excitation sector the dynamics is an N x N problem.

# %%
import numpy as np

from conclusive_qst import ChainSpec, chain_spectrum, propagator_amplitude, uniform_end_amplitude

# %% [markdown]
# Two and three sites transfer perfectly: at t = pi/2 and t = pi/sqrt(2) the
# whole amplitude sits on the last site.

# %%
for N, t in [(2, np.pi / 2), (3, np.pi / np.sqrt(2))]:
    sd = chain_spectrum(ChainSpec.uniform(N))
    print(N, abs(propagator_amplitude(sd, N, 1, t)) ** 2)

# %% [markdown]
# Longer chains disperse. The arrival probability at Bob peaks near t ~ N/2 and
# the peak shrinks with N.

# %%
t = np.linspace(0, 30, 3001)
for N in (4, 10, 20):
    p = np.abs(uniform_end_amplitude(N, t)) ** 2
    k = int(np.argmax(p[t < 2 * N]))
    print(f"N={N:2d}  first-peak time {t[k]:6.2f}  probability {p[k]:.4f}")

# %% [markdown]
# Random couplings break the mirror symmetry, but the propagator stays unitary.

# %%
rng = np.random.default_rng(0)
spec = ChainSpec(rng.uniform(0.8, 1.2, 9))
U = chain_spectrum(spec).propagator(7.5)
print("max |U U^dag - 1| =", np.max(np.abs(U @ U.conj().T - np.eye(10))))
