"""Dense state-vector oracle for the transfer/decode protocol.

Every step is executed literally on the ``2**m`` computational basis:
matrix exponentials of the many-body XY Hamiltonian, explicit SWAP and CNOT
gates, a reset channel for cooling and Born-rule measurements.

Qubit order is ``(A1, chain 1..N, M_1..M_k)``; chain site 1 is A2. During the
decode portion the connected chain is ``(A1, chain 2..N)``. Qubit ``q`` is tensor
axis ``q`` of the state reshaped to ``(2,) * m``, so qubit 0 is the most
significant bit of the flat index; bit value 1 is spin up.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .chain import ChainSpec
from .engine import QubitState
from .timing import Schedule

MAX_QUBITS = 14

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[-1, 0], [0, 1]], dtype=complex)  # basis (|0>=down, |1>=up)
P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
#: X on the second qubit when the first is |1>
CNOT = np.kron(P0, I2) + np.kron(P1, SX)
#: X on the second qubit when the first is |0>
ANTI_CNOT = np.kron(P0, SX) + np.kron(P1, I2)


class OracleSizeError(ValueError):
    pass


def _op_on(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for q in range(n):
        out = np.kron(out, ops.get(q, I2))
    return out


def many_body_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """``sum_n h_n/2 (sx sx + sy sy) + sum_n B_n sz_n`` on ``N`` qubits, ground energy shifted to 0."""
    N = spec.N
    H = np.zeros((2**N, 2**N), dtype=complex)
    for n, h in enumerate(spec.couplings):
        H += 0.5 * h * (_op_on({n: SX, n + 1: SX}, N) + _op_on({n: SY, n + 1: SY}, N))
    for n, b in enumerate(spec.fields):
        if b:
            H += b * _op_on({n: SZ}, N)
    H -= H[0, 0] * np.eye(2**N)
    return H


def total_sz(N: int) -> np.ndarray:
    return sum(_op_on({n: SZ}, N) for n in range(N))


class FullState:
    """Amplitudes over all ``2**m`` basis states of ``m`` qubits."""

    def __init__(self, m: int, amps: np.ndarray | None = None):
        if m > MAX_QUBITS:
            raise OracleSizeError(f"{m} qubits exceeds the oracle cap of {MAX_QUBITS}")
        self.m = m
        if amps is None:
            amps = np.zeros(2**m, dtype=complex)
            amps[0] = 1.0
        self.amps = np.asarray(amps, dtype=complex).reshape(2**m)

    def copy(self) -> "FullState":
        return FullState(self.m, self.amps.copy())

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def apply(self, U: np.ndarray, qubits) -> "FullState":
        """Apply ``U`` (acting on ``qubits`` in the given order) in place."""
        qubits = list(qubits)
        r = len(qubits)
        psi = self.amps.reshape((2,) * self.m)
        psi = np.moveaxis(psi, qubits, range(r))
        shape = psi.shape
        psi = (U @ psi.reshape(2**r, -1)).reshape(shape)
        self.amps = np.moveaxis(psi, range(r), qubits).reshape(-1)
        return self

    def project(self, q: int, bit: int) -> float:
        """Project qubit ``q`` onto ``bit`` (unnormalised); return the Born probability."""
        psi = self.amps.reshape((2,) * self.m).copy()
        idx = [slice(None)] * self.m
        idx[q] = 1 - bit
        psi[tuple(idx)] = 0
        self.amps = psi.reshape(-1)
        return self.norm()

    def reduced(self, q: int) -> np.ndarray:
        """Reduced density matrix of qubit ``q`` in the (|0>, |1>) basis."""
        psi = np.moveaxis(self.amps.reshape((2,) * self.m), q, 0).reshape(2, -1)
        return psi @ psi.conj().T


@dataclass
class OracleTrace:
    """Per decode step: unconditional success probability and Bob's conditional state."""

    eta: list[float] = field(default_factory=list)
    bob: list = field(default_factory=list)  # 2x2 density matrices or None
    transfer_norms: list[float] = field(default_factory=list)
    max_two_excitation_weight: float = 0.0


class ProtocolOracle:
    def __init__(self, spec: ChainSpec, k: int):
        self.spec = spec
        self.N = spec.N
        self.k = k
        self.m = 1 + self.N + k
        if self.m > MAX_QUBITS:
            raise OracleSizeError(f"{self.m} qubits exceeds the oracle cap of {MAX_QUBITS}")
        E, V = np.linalg.eigh(many_body_hamiltonian(spec))
        self._E, self._V = E, V

    # qubit indices
    A1 = 0

    def chain_qubit(self, n: int) -> int:
        return n

    def memory_qubit(self, l: int) -> int:
        return self.N + l

    @property
    def bob(self) -> int:
        return self.N

    def connected(self, a_spin: str) -> list[int]:
        first = self.A1 if a_spin == "A1" else self.chain_qubit(1)
        return [first] + [self.chain_qubit(n) for n in range(2, self.N + 1)]

    def unitary(self, tau: float) -> np.ndarray:
        return (self._V * np.exp(-1j * self._E * tau)) @ self._V.conj().T

    def initial(self, psi: QubitState) -> FullState:
        st = FullState(self.m)
        st.apply(np.array([[psi.beta, 0], [psi.alpha, 0]]), [self.A1])
        return st

    def cool(self, st: FullState) -> list[tuple[float, FullState]]:
        """Reset channel on the A2-connected chain as an ensemble of pure branches.

        Kraus operators ``|0..0><s|`` over chain configurations ``s``.
        """
        chain = self.connected("A2")
        psi = np.moveaxis(st.amps.reshape((2,) * self.m), chain, range(self.N))
        psi = psi.reshape(2**self.N, -1)
        out = []
        for s in range(2**self.N):
            row = psi[s]
            w = float(np.vdot(row, row).real)
            if w < 1e-30:
                continue
            branch = np.zeros_like(psi)
            branch[0] = row / np.sqrt(w)
            full = np.moveaxis(branch.reshape((2,) * self.m), range(self.N), chain)
            out.append((w, FullState(self.m, full.reshape(-1))))
        return out

    def excitation_weights(self, st: FullState) -> np.ndarray:
        """Probability weight per total excitation number."""
        counts = np.array([bin(i).count("1") for i in range(2**self.m)])
        p = np.abs(st.amps) ** 2
        return np.bincount(counts, weights=p, minlength=self.m + 1)

    def full_run(self, psi: QubitState, schedule: Schedule, decode_steps: int | None = None,
                 cooling: str = "reset") -> OracleTrace:
        if len(schedule) > self.k:
            raise ValueError("schedule longer than memory count")
        decode_steps = len(schedule) if decode_steps is None else decode_steps
        trace = OracleTrace()
        st = self.initial(psi)
        st.apply(ANTI_CNOT, [self.A1, self.chain_qubit(1)])
        chain = self.connected("A2")
        for i, tau in enumerate(schedule.taus, start=1):
            st.apply(self.unitary(tau), chain)
            st.apply(SWAP, [self.bob, self.memory_qubit(i)])
            trace.transfer_norms.append(st.norm())
        if cooling == "reset":
            ensemble = self.cool(st)
        elif cooling == "none":
            ensemble = [(1.0, st)]
        else:
            raise ValueError(f"unsupported cooling mode {cooling!r}")
        chain = self.connected("A1")
        for i, tau in enumerate(schedule.taus[:decode_steps], start=1):
            p_total = 0.0
            rho = np.zeros((2, 2), dtype=complex)
            survivors = []
            for w, br in ensemble:
                br = br.copy().apply(self.unitary(tau), chain)
                br.apply(CNOT, [self.bob, self.memory_qubit(i)])
                two = self.excitation_weights(br)[2:].sum()
                trace.max_two_excitation_weight = max(trace.max_two_excitation_weight, two)
                ok = br.copy()
                p1 = ok.project(self.memory_qubit(i), 1)
                if p1 > 0:
                    p_total += w * p1
                    rho += w * ok.reduced(self.bob)
                p0 = br.project(self.memory_qubit(i), 0)
                if p0 > 1e-30:
                    br.amps /= np.sqrt(p0)
                    survivors.append((w * p0, br))
            trace.eta.append(p_total)
            trace.bob.append(rho / p_total if p_total > 0 else None)
            ensemble = survivors
        return trace


def full_run(psi: QubitState, spec: ChainSpec, schedule: Schedule,
             decode_steps: int | None = None, k: int | None = None,
             cooling: str = "reset") -> OracleTrace:
    k = len(schedule) if k is None else k
    return ProtocolOracle(spec, max(k, 1)).full_run(psi, schedule, decode_steps, cooling)


@dataclass
class EquivalenceResult:
    passed: bool
    max_deviation: float
    location: str | None

    def __bool__(self) -> bool:
        return self.passed


def engine_trace(report) -> OracleTrace:
    """Convert an engine :class:`~conclusive_qst.engine.DecodeReport` to oracle form."""
    tr = OracleTrace()
    for eta, bob in zip(report.eta, report.bob_states):
        tr.eta.append(float(eta))
        if bob is None:
            tr.bob.append(None)
        else:
            v = bob.ket()
            tr.bob.append(np.outer(v, v.conj()))
    return tr


def equivalence_check(engine: OracleTrace, oracle: OracleTrace, tol: float = 1e-10) -> EquivalenceResult:
    """Compare branch probabilities and conditional Bob states step by step."""
    if len(engine.eta) != len(oracle.eta):
        return EquivalenceResult(False, np.inf, "trace length")
    worst, where = 0.0, None
    for i, (pe, po) in enumerate(zip(engine.eta, oracle.eta), start=1):
        d = abs(pe - po)
        if d > worst:
            worst, where = d, f"step {i} probability"
        be, bo = engine.bob[i - 1], oracle.bob[i - 1]
        # conditional states are only meaningful on branches that can occur
        if max(pe, po) <= tol:
            continue
        if be is None or bo is None:
            return EquivalenceResult(False, np.inf, f"step {i} conditional state missing")
        d = float(np.max(np.abs(be - bo)))
        if d > worst:
            worst, where = d, f"step {i} Bob state"
    return EquivalenceResult(worst <= tol, worst, where if worst > tol else None)


def cross_check(psi: QubitState, spec: ChainSpec, schedule: Schedule, tol: float = 1e-10,
                cooling: str = "reset") -> EquivalenceResult:
    from .chain import chain_spectrum
    from .engine import run_protocol

    _, report = run_protocol(psi, chain_spectrum(spec), schedule, cooling=cooling)
    return equivalence_check(engine_trace(report), full_run(psi, spec, schedule, cooling=cooling), tol)


def nested_sum_amplitudes(H1: np.ndarray, taus) -> np.ndarray:
    """Memory amplitudes ``f_N^(l)`` by explicit enumeration of intermediate sites.

    ``f_N^(l) = sum over m_1..m_{l-1} in 1..N-1`` of the product of single-step
    amplitudes, with each step's propagator from ``scipy.linalg.expm``.
    """
    from scipy.linalg import expm

    N = H1.shape[0]
    U = [expm(-1j * H1 * t) for t in taus]
    out = []
    for l in range(1, len(taus) + 1):
        total = 0j
        for path in itertools.product(range(N - 1), repeat=l - 1):
            sites = (0,) + path + (N - 1,)
            amp = 1.0 + 0j
            for step in range(l):
                amp *= U[step][sites[step + 1], sites[step]]
            total += amp
        out.append(total)
    return np.array(out)
