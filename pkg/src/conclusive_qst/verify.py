"""Cross-checks run by ``conclusive-qst verify``.

Each check returns ``(name, max_deviation, tolerance)``; a check passes when the
deviation does not exceed its tolerance.
"""
from __future__ import annotations

import numpy as np

from .chain import (ChainSpec, DisorderModel, build_single_excitation_hamiltonian, chain_spectrum,
                    sample_random_chain, uniform_end_amplitude)
from .engine import QubitState, prepare_transfer, run_protocol
from .oracle import (ProtocolOracle, cross_check, many_body_hamiltonian, nested_sum_amplitudes,
                     total_sz)
from .scheduler import greedy_optimize_schedule
from .timing import Schedule


def random_chain(rng: np.random.Generator, N: int, delta: float = 0.5,
                 with_fields: bool = True) -> ChainSpec:
    J = rng.uniform(1 - delta, 1 + delta, N - 1)
    B = rng.normal(scale=0.3, size=N) if with_fields else None
    return ChainSpec(J, B)


def check_unitarity(rng, trials: int = 20):
    worst = 0.0
    for _ in range(trials):
        sd = chain_spectrum(random_chain(rng, int(rng.integers(2, 12))))
        t = rng.uniform(-20, 20)
        U = sd.propagator(t)
        worst = max(worst, np.max(np.abs(U @ U.conj().T - np.eye(sd.N))),
                    np.max(np.abs(sd.propagator(-t) - U.conj().T)))
    return "propagator unitarity and time reversal", worst, 1e-10


def check_uniform_closed_form():
    worst = 0.0
    t = np.linspace(0, 50, 101)
    for N in range(2, 21):
        sd = chain_spectrum(ChainSpec.uniform(N))
        direct = np.array([sd.propagator(x)[N - 1, 0] for x in t])
        worst = max(worst, np.max(np.abs(direct - uniform_end_amplitude(N, t))))
    return "uniform chain end-to-end sine sum", worst, 1e-10


def check_nested_sum(rng, trials: int = 10):
    worst = 0.0
    for _ in range(trials):
        for N in (2, 3, 4):
            spec = random_chain(rng, N)
            taus = tuple(rng.uniform(0.1, 4.0, 3))
            sd = chain_spectrum(spec)
            state, _ = prepare_transfer(QubitState(0, 1), sd, Schedule(taus))
            ref = nested_sum_amplitudes(build_single_excitation_hamiltonian(spec), taus)
            worst = max(worst, np.max(np.abs(state.memories - ref)))
    return "memory amplitudes vs nested-sum enumeration", worst, 1e-12


def check_oracle(rng, trials: int = 50):
    worst = 0.0
    for i in range(trials):
        N = 3 if i == 0 else int(rng.integers(2, 5))
        k = 2 if i == 0 else int(rng.integers(1, 4))
        spec = random_chain(rng, N)
        sch = Schedule(tuple(rng.uniform(0.05, 5.0, k)))
        res = cross_check(QubitState.random(rng), spec, sch)
        worst = max(worst, res.max_deviation)
    return "engine vs dense oracle (N<=4, k<=3)", worst, 1e-10


def check_sz_conservation(rng):
    worst = 0.0
    for N in (2, 3, 4, 5):
        H = many_body_hamiltonian(random_chain(rng, N))
        S = total_sz(N)
        worst = max(worst, np.max(np.abs(H @ S - S @ H)))
    return "total Sz commutes with the many-body Hamiltonian", worst, 1e-12


def check_decode_cnot_transient(rng):
    """The decode CNOT transiently creates a two-excitation component (it must exist)."""
    spec = ChainSpec.uniform(3)
    oracle = ProtocolOracle(spec, 2)
    tr = oracle.full_run(QubitState(1 / np.sqrt(2), 1 / np.sqrt(2)), Schedule((1.3, 2.1)))
    return "two-excitation transient present in oracle", float(tr.max_two_excitation_weight <= 1e-6), 0.0


def check_conclusiveness(rng, n_inputs: int = 100, n_chains: int = 20, N: int = 6,
                         delta: float = 0.1, steps: int = 5):
    fid_dev = 0.0
    spread = 0.0
    for c in range(n_chains):
        spec = sample_random_chain(DisorderModel(1.0, delta, int(rng.integers(2**31))), N)
        sd = chain_spectrum(spec)
        sch = greedy_optimize_schedule(spec, steps, resolution=400)
        etas = []
        for _ in range(n_inputs):
            _, rep = run_protocol(QubitState.random(rng), sd, sch)
            etas.append(rep.eta)
            fid_dev = max(fid_dev, np.nanmax(np.abs(rep.fidelities - 1.0)))
        etas = np.array(etas)
        spread = max(spread, np.max(etas.max(axis=0) - etas.min(axis=0)))
    return [("decode probabilities independent of input", spread, 1e-12),
            ("success-conditioned fidelity equals 1", fid_dev, 1e-9)]


def check_perfect_short_chains():
    worst = 0.0
    for N in (2, 3):
        sch = greedy_optimize_schedule(ChainSpec.uniform(N), 1)
        sd = chain_spectrum(ChainSpec.uniform(N))
        _, rep = run_protocol(QubitState(0, 1), sd, sch)
        worst = max(worst, abs(1.0 - rep.eta[0]))
    return "perfect first-step transfer for N=2,3", worst, 1e-6


def run_all(seed: int = 0) -> list[tuple[str, float, float]]:
    rng = np.random.default_rng(seed)
    results = [
        check_unitarity(rng),
        check_uniform_closed_form(),
        check_sz_conservation(rng),
        check_nested_sum(rng),
        check_oracle(rng),
        check_decode_cnot_transient(rng),
        check_perfect_short_chains(),
    ]
    results += check_conclusiveness(rng)
    return results
