"""Exit criteria. Each test records one PASS/FAIL line shown in the terminal summary."""
import itertools
import time

import numpy as np

from conclusive_qst.chain import (ChainSpec, DisorderModel, build_single_excitation_hamiltonian,
                                  chain_spectrum, sample_random_chain)
from conclusive_qst.cli import main
from conclusive_qst.engine import QubitState, prepare_transfer, run_protocol
from conclusive_qst.oracle import cross_check, nested_sum_amplitudes
from conclusive_qst.scheduler import (eta_profile, greedy_optimize_schedule, greedy_steps,
                                      max_eta1_curve, memories_for_target)
from conclusive_qst.timing import Schedule, average_decoding_time

from conftest import ACCEPTANCE_LINES


def record(name, ok, detail):
    ACCEPTANCE_LINES.append((name, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_c1_perfect_short_chains():
    t0 = time.perf_counter()
    etas = [next(greedy_steps(ChainSpec.uniform(N))).eta for N in (2, 3)]
    dt = time.perf_counter() - t0
    ok = all(abs(e - 1.0) <= 1e-6 for e in etas) and dt < 1.0
    record("C1 perfect transfer N=2,3", ok, f"max eta1 = {etas[0]:.9f}, {etas[1]:.9f}; {dt:.2f}s")


def test_c2_memory_budget_n10():
    t0 = time.perf_counter()
    j = memories_for_target(ChainSpec.uniform(10), 0.99)
    dt = time.perf_counter() - t0
    ok = j is not None and 13 <= j <= 17 and dt < 5.0
    record("C2 memories for eta>=0.99 at N=10", ok, f"j = {j} (bracket [13, 17]); {dt:.2f}s")


def test_c3_timing_n10():
    spec = ChainSpec.uniform(10)
    sch = greedy_optimize_schedule(spec, memories_for_target(spec, 0.99))
    prof = eta_profile(spec, sch)
    rep = average_decoding_time(prof, sch, J_kelvin=20.0, time_unit="h")
    hb = average_decoding_time(prof, sch, J_kelvin=20.0, time_unit="hbar")
    t_ns, T_ns = rep.full_time_s * 1e9, rep.mean_time_s * 1e9
    ok = 0.30 <= t_ns <= 0.45 and 0.020 <= T_ns <= 0.045 and 1 / 18 <= rep.ratio <= 1 / 8
    record("C3 timing at J=20 K", ok,
           f"t_j = {t_ns:.4f} ns, T_bar = {T_ns:.4e} ns, ratio = 1/{1 / rep.ratio:.2f} "
           f"[h/(k_B J) unit; hbar unit would give {hb.full_time_s * 1e9:.4f} ns, "
           f"{hb.mean_time_s * 1e9:.4e} ns]")


def test_c4_fig2_properties():
    t0 = time.perf_counter()
    rows = {N: eta for N, eta, _ in max_eta1_curve(list(range(2, 25)) + [30])}
    dt = time.perf_counter() - t0
    low = min(rows[N] for N in range(2, 25))
    ok = low > 0.5 and rows[30] < rows[5] and dt < 30
    record("C4 max eta1 curve", ok,
           f"min eta1 over N=2..24 = {low:.4f}; eta1(30) = {rows[30]:.4f} < eta1(5) = {rows[5]:.4f}; {dt:.2f}s")


def test_c5_fig3_properties():
    t0 = time.perf_counter()
    finals = {}
    mono = True
    for N in (5, 10, 20, 30):
        steps = [s.eta for s, _ in zip(greedy_steps(ChainSpec.uniform(N)), range(40))]
        cum = np.cumsum(steps)
        mono &= bool(np.all(np.diff(cum) >= 0))
        finals[N] = cum[-1]
    dt = time.perf_counter() - t0
    ok = mono and min(finals.values()) >= 0.95 and dt < 60
    record("C5 cumulative eta within 40 steps", ok,
           "monotone={}; ".format(mono) + ", ".join(f"N={N}: {v:.4f}" for N, v in finals.items())
           + f"; {dt:.2f}s")


def test_c6_oracle_equivalence():
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for N, k in itertools.product((2, 3, 4), (1, 2, 3)):
        for _ in range(50):
            spec = ChainSpec(rng.uniform(0.5, 1.5, N - 1), rng.normal(scale=0.3, size=N))
            sch = Schedule(tuple(rng.uniform(0.05, 6.0, k)))
            res = cross_check(QubitState.random(rng), spec, sch)
            worst = max(worst, res.max_deviation)
            count += 1
    dt = time.perf_counter() - t0
    ok = worst < 1e-10 and dt < 120
    record("C6 engine vs dense oracle", ok, f"{count} trials, max deviation {worst:.2e}; {dt:.2f}s")


def test_c7_conclusiveness():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    spread = fid_dev = 0.0
    for c in range(20):
        spec = sample_random_chain(DisorderModel(1.0, 0.1, 1000 + c), 10)
        sd = chain_spectrum(spec)
        sch = greedy_optimize_schedule(spec, 15)
        etas = []
        for _ in range(100):
            _, rep = run_protocol(QubitState.random(rng), sd, sch)
            etas.append(rep.eta)
            fid_dev = max(fid_dev, float(np.nanmax(np.abs(rep.fidelities - 1.0))))
        etas = np.array(etas)
        spread = max(spread, float(np.max(etas.max(axis=0) - etas.min(axis=0))))
    dt = time.perf_counter() - t0
    ok = spread < 1e-12 and fid_dev < 1e-9 and dt < 120
    record("C7 conclusiveness on disordered chains", ok,
           f"probability spread {spread:.2e}, fidelity deviation {fid_dev:.2e}; {dt:.2f}s")


def test_c8_nested_sum_equivalence():
    rng = np.random.default_rng(8)
    worst = 0.0
    for N, j in itertools.product((2, 3, 4), (1, 2, 3)):
        for _ in range(10):
            spec = ChainSpec(rng.uniform(0.5, 1.5, N - 1), rng.normal(scale=0.3, size=N))
            taus = tuple(rng.uniform(0.1, 5.0, j))
            state, _ = prepare_transfer(QubitState(0, 1), chain_spectrum(spec), Schedule(taus))
            ref = nested_sum_amplitudes(build_single_excitation_hamiltonian(spec), taus)
            worst = max(worst, float(np.max(np.abs(state.memories - ref))))
    record("C8 memory amplitudes vs nested sum", worst <= 1e-12, f"max deviation {worst:.2e}")


COMMANDS = {
    "fig2": ["fig2", "--n-range", "2:12"],
    "fig3": ["fig3", "--n", "5,10", "--steps", "12"],
    "example5": ["example5"],
    "sweep": ["sweep", "--n", "8", "--delta", "0.1", "--seeds", "5", "--seed", "3"],
    "verify": ["verify", "--seed", "2"],
}


def test_c9_determinism(tmp_path):
    differing = []
    for name, args in COMMANDS.items():
        runs = []
        for rep in ("a", "b"):
            out = tmp_path / name / rep
            assert main(args + ["--out", str(out)]) == 0
            runs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
        if runs[0] != runs[1] or not runs[0]:
            differing.append(name)
    record("C9 byte-identical reruns", not differing,
           f"{len(COMMANDS)} commands; differing: {differing or 'none'}")
