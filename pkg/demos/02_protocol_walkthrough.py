# %% [markdown]
# # One run of the protocol, step by step
#
# Alice's qubit alpha|1> + beta|0> is copied into an entangled pair (A1, A2).
# The A2 branch is pushed through the chain and parked in memories by swapping
# Bob into M_1, M_2, ... The chain is then cooled, A1 is connected instead, and
# the same intervals are replayed. At each step a CNOT from Bob onto M_i and a
# measurement of M_i either certifies that Bob holds the input or sends us on.

# %%
from conclusive_qst import (ChainSpec, QubitState, Schedule, Switch, Topology, chain_spectrum,
                            cool_chain, decode_step, encode_cnot, init_state, set_switch,
                            transfer_run)

spec = ChainSpec([1.0, 0.9, 1.1, 1.05, 0.95])
sd = chain_spectrum(spec)
schedule = Schedule((3.1, 2.4, 4.0))
psi = QubitState(0.6, 0.8j)

# %%
state = init_state(psi, Topology(spec.N, len(schedule)))
state = set_switch(encode_cnot(state), Switch.A2)
print("after encoding  A1 =", state.a1, " A2 =", state.a2)

state, records = transfer_run(state, sd, schedule)
for r in records:
    print(f"swap {r.step}: weight stored in memory {r.probability:.4f}")

# %%
p_loss, state = cool_chain(state)
print(f"residual excitation removed by cooling: {p_loss:.4f}")
state = set_switch(state, Switch.A1)

# %%
reach = 1.0
for i, tau in enumerate(schedule.taus, start=1):
    out = decode_step(state, sd, i, tau)
    print(f"decode {i}: success {reach * out.p_success:.4f}  fidelity {out.fidelity_on_success:.12f}")
    reach *= 1 - out.p_success
    state = out.failure_state
print(f"still undecided: {reach:.4f}")
