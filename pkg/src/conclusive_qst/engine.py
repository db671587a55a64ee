"""Conclusive transfer protocol in the excitation-location basis.

The whole register (A1, A2, chain interior C, Bob, memories M_1..M_k) never holds
more than one excitation, so a state is a list of complex amplitudes for "where
the excitation is" plus a vacuum amplitude. The only two-excitation moment, the
decode CNOT from Bob onto a memory, is immediately followed by a measurement of
that memory and is folded into :func:`decode_step`.

Site labelling: the chain seen by the Hamiltonian has sites ``1..N``. Site 1 is
whichever A-spin the switch connects; sites ``2..N`` (C and Bob) are stored in
``tail``. While the switch is open, the chain view uses the A2 labelling.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .chain import SpectralData
from .timing import EtaProfile, Schedule, average_decoding_time

NORM_TOL = 1e-12
INPUT_TOL = 1e-9


class ProtocolError(RuntimeError):
    """An operation was applied out of protocol order."""


class Switch(enum.Enum):
    DISCONNECTED = "disconnected"
    A1 = "A1-connected"
    A2 = "A2-connected"


class Cooling(enum.Enum):
    #: residual chain excitation is reset to the ground state; its weight moves to the vacuum slot
    RESET = "reset"
    #: residual is projected out and the rest renormalized (conditioned on a cold chain)
    PROJECT = "project"
    #: residual stays in the chain
    NONE = "none"


@dataclass(frozen=True)
class QubitState:
    """``alpha |1> + beta |0>``."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))

    @property
    def norm(self) -> float:
        return abs(self.alpha) ** 2 + abs(self.beta) ** 2

    def ket(self) -> np.ndarray:
        """Vector in the computational order ``(|0>, |1>)``."""
        return np.array([self.beta, self.alpha])

    def fidelity(self, other: "QubitState") -> float:
        return float(abs(np.vdot(self.ket(), other.ket())) ** 2)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "QubitState":
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        return cls(v[0], v[1])


@dataclass(frozen=True)
class Topology:
    N: int
    k: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("chain length must be at least 2")
        if self.k < 1:
            raise ValueError("need at least one memory")


@dataclass
class SystemState:
    vac: complex
    a1: complex
    a2: complex
    tail: np.ndarray
    memories: np.ndarray
    switch: Switch
    consumed: np.ndarray
    psi: QubitState

    @property
    def N(self) -> int:
        return self.tail.size + 1

    @property
    def k(self) -> int:
        return self.memories.size

    @property
    def chain(self) -> np.ndarray:
        """Amplitudes on chain sites ``1..N`` (index 0 is site 1, index -1 is Bob)."""
        first = self.a1 if self.switch is Switch.A1 else self.a2
        return np.concatenate(([first], self.tail))

    @property
    def c_A(self) -> complex:
        """Amplitude on the A-spin that is not part of the chain."""
        return self.a2 if self.switch is Switch.A1 else self.a1

    @property
    def bob(self) -> complex:
        return complex(self.tail[-1])

    def norm(self) -> float:
        return float(abs(self.vac) ** 2 + abs(self.a1) ** 2 + abs(self.a2) ** 2
                     + np.sum(np.abs(self.tail) ** 2) + np.sum(np.abs(self.memories) ** 2))

    def copy(self) -> "SystemState":
        return replace(self, tail=self.tail.copy(), memories=self.memories.copy(),
                       consumed=self.consumed.copy())

    def with_chain(self, c: np.ndarray) -> "SystemState":
        s = self.copy()
        if s.switch is Switch.A1:
            s.a1 = complex(c[0])
        else:
            s.a2 = complex(c[0])
        s.tail = np.array(c[1:], dtype=complex)
        return s

    def scaled(self, factor: float) -> "SystemState":
        s = self.copy()
        s.vac *= factor
        s.a1 *= factor
        s.a2 *= factor
        s.tail *= factor
        s.memories *= factor
        return s

    def amplitudes(self) -> np.ndarray:
        """Flat vector ``(vac, A1, A2, chain 2..N, M_1..M_k)``."""
        return np.concatenate(([self.vac, self.a1, self.a2], self.tail, self.memories))


@dataclass(frozen=True)
class StepRecord:
    step: int
    tau: float
    kind: str
    probability: float


@dataclass
class DecodeOutcome:
    p_success: float
    bob_on_success: QubitState | None
    failure_state: SystemState
    fidelity_on_success: float | None

    @property
    def degenerate(self) -> bool:
        return self.bob_on_success is None


@dataclass
class DecodeReport:
    """Result of the decode sequence.

    ``eta[i]`` is the unconditional probability that the protocol stops with a
    success at step ``i + 1``; ``conditional[i]`` the probability of success at that
    step given that all earlier steps failed.
    """

    eta: np.ndarray
    conditional: np.ndarray
    bob_states: list
    fidelities: np.ndarray
    records: list
    mean_time: float
    full_time: float
    stop_step: int | None = None
    success: bool | None = None
    bob_state: QubitState | None = None
    final_state: SystemState | None = field(default=None, repr=False)

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.eta)

    @property
    def total(self) -> float:
        return float(self.eta.sum())


def init_state(psi: QubitState, topo: Topology) -> SystemState:
    if abs(psi.norm - 1.0) > INPUT_TOL:
        raise ValueError(f"input qubit is not normalized (|psi|^2 = {psi.norm})")
    return SystemState(
        vac=psi.beta, a1=psi.alpha, a2=0j,
        tail=np.zeros(topo.N - 1, dtype=complex),
        memories=np.zeros(topo.k, dtype=complex),
        switch=Switch.DISCONNECTED,
        consumed=np.zeros(topo.k, dtype=bool),
        psi=psi,
    )


def encode_cnot(state: SystemState) -> SystemState:
    """Flip A2 when A1 is down: ``alpha|10> + beta|01>`` on (A1, A2)."""
    if state.switch is not Switch.DISCONNECTED:
        raise ProtocolError("encode CNOT requires both A-spins disconnected")
    if state.a2 != 0 or np.any(state.tail != 0) or np.any(state.memories != 0):
        raise ProtocolError("encode CNOT expects the freshly initialised register")
    s = state.copy()
    s.a2, s.vac = s.vac, 0j
    return s


def set_switch(state: SystemState, config: Switch) -> SystemState:
    s = state.copy()
    s.switch = Switch(config)
    return s


def evolve(state: SystemState, sd: SpectralData, tau: float) -> SystemState:
    if state.switch is Switch.DISCONNECTED:
        raise ProtocolError("cannot evolve with no A-spin connected")
    if sd.N != state.N:
        raise ValueError(f"spectrum is for N={sd.N}, state has N={state.N}")
    if tau == 0:
        return state.copy()
    return state.with_chain(sd.evolve(state.chain, tau))


def swap_bob_memory(state: SystemState, l: int) -> SystemState:
    """Exchange Bob and memory ``l`` (1-based)."""
    i = _memory_index(state, l)
    s = state.copy()
    s.tail[-1], s.memories[i] = state.memories[i], state.tail[-1]
    return s


def transfer_run(state: SystemState, sd: SpectralData, schedule: Schedule):
    """Evolve for ``tau_i`` then swap Bob into memory ``i``, for each step."""
    if state.switch is not Switch.A2:
        raise ProtocolError("transfer expects A2 connected after encoding")
    if len(schedule) > state.k:
        raise ProtocolError(f"schedule has {len(schedule)} steps but only {state.k} memories")
    records = []
    for i, tau in enumerate(schedule.taus, start=1):
        state = swap_bob_memory(evolve(state, sd, tau), i)
        records.append(StepRecord(i, tau, "swap", float(abs(state.memories[i - 1]) ** 2)))
    return state, records


def cool_chain(state: SystemState, mode: Cooling | str = Cooling.RESET):
    """Return ``(p_loss, state)`` after resetting the connected chain to the ground state.

    ``p_loss`` is the weight of excitation left in the chain. In ``RESET`` mode that
    weight is carried by the vacuum slot: the reset branch is the all-down state,
    which no later operation couples to, so its phase is immaterial and the
    unconditional decode probabilities stay independent of the input qubit.
    ``PROJECT`` drops the branch and renormalizes. Both keep the ratio of the A1
    amplitude to every stored memory amplitude unchanged.
    """
    mode = Cooling(mode)
    if state.switch is Switch.DISCONNECTED:
        raise ProtocolError("no chain is connected")
    c = state.chain
    p_loss = float(np.sum(np.abs(c) ** 2))
    if mode is Cooling.NONE or p_loss == 0.0:
        return p_loss, state.copy()
    s = state.with_chain(np.zeros_like(c))
    if mode is Cooling.RESET:
        s.vac = np.sqrt(abs(s.vac) ** 2 + p_loss) + 0j
    else:
        if p_loss >= 1.0 - NORM_TOL:
            raise ProtocolError("no amplitude survives the projection")
        s = s.scaled(1.0 / np.sqrt(1.0 - p_loss))
    return p_loss, s


def decode_step(state: SystemState, sd: SpectralData, l: int, tau: float) -> DecodeOutcome:
    """Evolve, CNOT Bob -> M_l, then measure M_l.

    After the evolution Bob carries ``x`` (alpha branch) and M_l carries ``y``
    (beta branch). The CNOT sends ``x|Bob=1, M_l=0>`` to ``x|1, 1>`` while ``y|0, 1>``
    is untouched, so reading M_l = 1 leaves Bob in ``x|1> + y|0>``.
    """
    if state.switch is not Switch.A1:
        raise ProtocolError("decoding expects A1 connected")
    i = _memory_index(state, l)
    s = evolve(state, sd, tau)
    x, y = s.bob, complex(s.memories[i])
    p = abs(x) ** 2 + abs(y) ** 2
    fail = s.copy()
    fail.tail[-1] = 0
    fail.memories[i] = 0
    fail.consumed[i] = True
    if p < 1.0 - NORM_TOL:
        fail = fail.scaled(1.0 / np.sqrt(1.0 - p))
    if p <= 0.0:
        return DecodeOutcome(0.0, None, fail, None)
    bob = QubitState(x / np.sqrt(p), y / np.sqrt(p))
    return DecodeOutcome(float(p), bob, fail, bob.fidelity(state.psi))


def decode_run(state: SystemState, sd: SpectralData, schedule: Schedule,
               rng: np.random.Generator | None = None) -> DecodeReport:
    """Run decode steps over memories ``1..j``.

    Branch probabilities are exact: the failure branch is followed through every
    step. With ``rng`` a single measurement trajectory is also sampled and the
    report records where it stopped.
    """
    if len(schedule) > state.k:
        raise ProtocolError(f"schedule has {len(schedule)} steps but only {state.k} memories")
    j = len(schedule)
    eta = np.zeros(j)
    cond = np.zeros(j)
    fid = np.full(j, np.nan)
    bobs = []
    records = []
    reach = 1.0
    stop = None
    for i, tau in enumerate(schedule.taus, start=1):
        out = decode_step(state, sd, i, tau)
        cond[i - 1] = out.p_success
        eta[i - 1] = reach * out.p_success
        bobs.append(out.bob_on_success)
        if out.fidelity_on_success is not None:
            fid[i - 1] = out.fidelity_on_success
        records.append(StepRecord(i, tau, "decode-success", float(eta[i - 1])))
        if rng is not None and stop is None and rng.random() < out.p_success:
            stop = i
        reach *= 1.0 - out.p_success
        state = out.failure_state
    timing = average_decoding_time(EtaProfile(np.clip(eta, 0.0, 1.0)), schedule)
    report = DecodeReport(eta, cond, bobs, fid, records, timing.mean_time,
                          timing.full_time, final_state=state)
    if rng is not None:
        report.stop_step = stop
        report.success = stop is not None
        report.bob_state = bobs[stop - 1] if stop is not None else None
    return report


def prepare_transfer(psi: QubitState, sd: SpectralData, schedule: Schedule,
                     k: int | None = None):
    """Initialise, encode, connect A2 and run the transfer portion."""
    k = len(schedule) if k is None else k
    s = init_state(psi, Topology(sd.N, max(k, 1)))
    s = set_switch(encode_cnot(s), Switch.A2)
    return transfer_run(s, sd, schedule)


def run_protocol(psi: QubitState, sd: SpectralData, schedule: Schedule,
                 cooling: Cooling | str = Cooling.RESET,
                 rng: np.random.Generator | None = None) -> tuple[float, DecodeReport]:
    """Full pipeline with identical replay of ``schedule`` in the decode portion."""
    s, _ = prepare_transfer(psi, sd, schedule)
    p_loss, s = cool_chain(s, cooling)
    s = set_switch(s, Switch.A1)
    return p_loss, decode_run(s, sd, schedule, rng)


def _memory_index(state: SystemState, l: int) -> int:
    if not 1 <= l <= state.k:
        raise IndexError(f"memory index must lie in 1..{state.k}, got {l}")
    if state.consumed[l - 1]:
        raise ProtocolError(f"memory {l} has already been measured")
    return l - 1
