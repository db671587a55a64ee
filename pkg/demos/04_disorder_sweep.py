# %% [markdown]
# # Randomly coupled chains
#
# Couplings drawn from [J0 (1 - delta), J0 (1 + delta)]. Conclusiveness does not
# depend on the couplings: whenever the decode measurement succeeds, Bob holds
# the input exactly.

# %%
from conclusive_qst.experiments import RunConfig, cmd_disorder_sweep

config = RunConfig("sweep", n=[10], delta=0.1, seeds=20, seed=1).validate()
tables, summary, seeds = cmd_disorder_sweep(config)
runs = tables[0]
print("memories per seed:", runs["memories"])
print("min success-conditioned fidelity:", min(runs["fidelity_min"]))
print(summary["10"])
