import numpy as np
import pytest

from conclusive_qst.chain import ChainSpec, build_single_excitation_hamiltonian, chain_spectrum
from conclusive_qst.engine import QubitState, run_protocol
from conclusive_qst.oracle import (CNOT, SWAP, FullState, OracleSizeError, OracleTrace,
                                   ProtocolOracle, cross_check, engine_trace, equivalence_check,
                                   full_run, many_body_hamiltonian, nested_sum_amplitudes, total_sz)
from conclusive_qst.timing import Schedule


def random_spec(rng, N):
    return ChainSpec(rng.uniform(0.5, 1.5, N - 1), rng.normal(scale=0.3, size=N))


def test_gates_are_unitary():
    for U in (SWAP, CNOT):
        np.testing.assert_allclose(U @ U.conj().T, np.eye(4))


def test_apply_gate_ordering():
    st = FullState(3)
    st.apply(np.array([[0, 1], [1, 0]]), [2])  # X on last qubit -> |001>
    assert st.amps[1] == 1
    st.apply(SWAP, [0, 2])  # -> |100>
    assert st.amps[4] == 1
    st.apply(CNOT, [0, 1])  # -> |110>
    assert st.amps[6] == 1


def test_single_excitation_block_matches_reduced_hamiltonian(rng):
    spec = random_spec(rng, 4)
    H = many_body_hamiltonian(spec)
    N = spec.N
    # |n> has qubit n-1 up; qubit 0 is the most significant bit
    idx = [1 << (N - n) for n in range(1, N + 1)]
    np.testing.assert_allclose(H[np.ix_(idx, idx)], build_single_excitation_hamiltonian(spec), atol=1e-12)
    assert H[0, 0] == 0


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_total_sz_conserved(rng, N):
    H = many_body_hamiltonian(random_spec(rng, N))
    S = total_sz(N)
    assert np.max(np.abs(H @ S - S @ H)) < 1e-12


def test_two_site_perfect_decode():
    tr = full_run(QubitState(0, 1), ChainSpec.uniform(2), Schedule((np.pi / 2,)))
    assert tr.eta[0] == pytest.approx(1.0, abs=1e-12)


def test_frozen_dynamics_never_succeed():
    tr = full_run(QubitState(1, 0), ChainSpec.uniform(3), Schedule((0.0, 0.0)))
    np.testing.assert_allclose(tr.eta, 0.0, atol=1e-20)


def test_norms_stay_one(rng):
    oracle = ProtocolOracle(random_spec(rng, 4), 3)
    tr = oracle.full_run(QubitState.random(rng), Schedule((0.7, 1.9, 2.4)))
    np.testing.assert_allclose(tr.transfer_norms, 1.0, atol=1e-12)


def test_decode_cnot_creates_transient_double_excitation():
    oracle = ProtocolOracle(ChainSpec.uniform(3), 2)
    tr = oracle.full_run(QubitState(1 / np.sqrt(2), 1 / np.sqrt(2)), Schedule((1.3, 2.1)))
    assert tr.max_two_excitation_weight > 1e-3
    # and yet the reduced engine agrees: the measurement resolves it
    assert cross_check(QubitState(1 / np.sqrt(2), 1 / np.sqrt(2)), ChainSpec.uniform(3),
                       Schedule((1.3, 2.1)))


def test_n3_k2_random_trials(rng):
    for _ in range(20):
        res = cross_check(QubitState.random(rng), random_spec(rng, 3),
                          Schedule(tuple(rng.uniform(0.05, 5, 2))))
        assert res.passed and res.max_deviation < 1e-10


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("cooling", ["reset", "none"])
def test_engine_matches_oracle_grid(rng, N, k, cooling):
    for _ in range(3):
        res = cross_check(QubitState.random(rng), random_spec(rng, N),
                          Schedule(tuple(rng.uniform(0.05, 5, k))), cooling=cooling)
        assert res.max_deviation < 1e-10, res


def test_oracle_detects_unconditional_probabilities(rng):
    spec = random_spec(rng, 4)
    sch = Schedule((1.1, 2.2, 0.9))
    a = full_run(QubitState(1, 0), spec, sch).eta
    b = full_run(QubitState(0, 1), spec, sch).eta
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_equivalence_identical_traces(rng):
    spec = random_spec(rng, 3)
    tr = full_run(QubitState.random(rng), spec, Schedule((1.0, 2.0)))
    res = equivalence_check(tr, tr)
    assert res.passed and res.max_deviation == 0


def test_equivalence_detects_corruption(rng):
    spec = random_spec(rng, 3)
    sch = Schedule((1.0, 2.0))
    psi = QubitState.random(rng)
    _, rep = run_protocol(psi, chain_spectrum(spec), sch)
    eng = engine_trace(rep)
    eng.bob[1] = eng.bob[1] + 1e-6 * np.array([[0, 1], [1, 0]])
    res = equivalence_check(eng, full_run(psi, spec, sch))
    assert not res.passed
    assert res.location == "step 2 Bob state"
    eng = engine_trace(rep)
    eng.eta[0] += 1e-8
    res = equivalence_check(eng, full_run(psi, spec, sch))
    assert not res.passed and res.location == "step 1 probability"


def test_equivalence_length_mismatch():
    res = equivalence_check(OracleTrace(eta=[0.5]), OracleTrace(eta=[0.5, 0.1]))
    assert not res


def test_size_cap():
    with pytest.raises(OracleSizeError):
        ProtocolOracle(ChainSpec.uniform(10), 4)
    with pytest.raises(OracleSizeError):
        FullState(15)


def test_nested_sum_single_step_is_propagator(rng):
    spec = random_spec(rng, 4)
    H = build_single_excitation_hamiltonian(spec)
    f = nested_sum_amplitudes(H, (1.7,))
    assert f[0] == pytest.approx(chain_spectrum(spec).propagator(1.7)[3, 0], abs=1e-12)
