# %% [markdown]
# # Checking the reduced engine against a dense simulator
#
# The engine never leaves the one-excitation sector. The oracle runs the same
# gates on all 2^(1+N+k) basis states, including the two-excitation transient the
# decode CNOT creates, and a reset channel for cooling.

# %%
import numpy as np

from conclusive_qst import ChainSpec, QubitState, Schedule
from conclusive_qst.oracle import ProtocolOracle, cross_check

rng = np.random.default_rng(3)
worst = 0.0
for _ in range(30):
    N, k = rng.integers(2, 5), rng.integers(1, 4)
    spec = ChainSpec(rng.uniform(0.5, 1.5, N - 1), rng.normal(scale=0.3, size=N))
    res = cross_check(QubitState.random(rng), spec, Schedule(tuple(rng.uniform(0.1, 5, k))))
    worst = max(worst, res.max_deviation)
print("max deviation engine vs oracle:", worst)

# %%
trace = ProtocolOracle(ChainSpec.uniform(3), 2).full_run(QubitState(0.6, 0.8), Schedule((1.3, 2.1)))
print("two-excitation weight right after a decode CNOT:", trace.max_two_excitation_weight)
print("success probabilities:", trace.eta)
