# %% [markdown]
# # Memory budget and average decoding time, N = 10
#
# Each interval is chosen greedily to maximise that step's success probability.
# The decode sequence stops at the first success, so its mean duration is far
# shorter than replaying the whole transfer.

# %%
from conclusive_qst import (ChainSpec, average_decoding_time, eta_profile, greedy_optimize_schedule,
                            memories_for_target)

spec = ChainSpec.uniform(10)
j = memories_for_target(spec, 0.99)
schedule = greedy_optimize_schedule(spec, j)
profile = eta_profile(spec, schedule)
print("memories needed:", j)
for i, (tau, e, c) in enumerate(zip(schedule.taus, profile.eta, profile.cumulative), 1):
    print(f"{i:2d}  tau={tau:7.3f}  eta={e:.4f}  cumulative={c:.4f}")

# %% [markdown]
# With J = 20 K the times come out in nanoseconds. Reading the coupling as a
# frequency J/h (time unit h/(k_B J)) gives the commonly quoted scale; the hbar
# unit is 2 pi times shorter.

# %%
for unit in ("h", "hbar"):
    r = average_decoding_time(profile, schedule, J_kelvin=20.0, time_unit=unit)
    print(f"{unit:>4}: t_j = {r.full_time_s * 1e9:.3f} ns  T_bar = {r.mean_time_s * 1e9:.4f} ns"
          f"  ratio = 1/{1 / r.ratio:.1f}")
