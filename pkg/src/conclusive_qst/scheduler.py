"""Greedy choice of evolution intervals and memory budgets."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .chain import ChainSpec, SpectralData, chain_spectrum
from .engine import QubitState, prepare_transfer
from .timing import EtaProfile, Schedule

#: default search window is WINDOW_FACTOR * N / J_mean
WINDOW_FACTOR = 2.0
DEFAULT_RESOLUTION = 2000
REFINE_RTOL = 1e-6
PEAK_FLOOR = 1e-20


@dataclass(frozen=True)
class GreedyStep:
    tau: float
    eta: float


def default_window(spec: ChainSpec) -> float:
    return WINDOW_FACTOR * spec.N / float(np.mean(spec.couplings))


def _best_arrival(sd: SpectralData, residual: np.ndarray, window: float, resolution: int):
    """Grid search plus bounded Brent refinement of ``|<N| U(tau) |residual>|^2``."""
    V = sd.vectors
    w = V[-1] * (V.T @ residual)
    grid = np.linspace(window / resolution, window, resolution)
    probs = np.abs(np.exp(-1j * np.outer(grid, sd.energies)) @ w) ** 2
    k = int(np.argmax(probs))
    if np.vdot(residual, residual).real < PEAK_FLOOR:
        # chain is already empty
        return float(grid[k]), float(probs[k])
    # peaks below the floor are round-off ripples
    floor = max(PEAK_FLOOR, 1e-6 * probs[k])
    interior = (probs[1:-1] > probs[:-2]) & (probs[1:-1] >= probs[2:]) & (probs[1:-1] > floor)
    if not interior.any():
        warnings.warn(f"no arrival peak inside the search window ({window:.4g}); "
                      "returning the best grid point", RuntimeWarning, stacklevel=3)
        return float(grid[k]), float(probs[k])

    def loss(tau):
        return -abs(np.dot(np.exp(-1j * sd.energies * tau), w)) ** 2

    lo = grid[k - 1] if k > 0 else grid[0] * 1e-3
    hi = grid[min(k + 1, resolution - 1)]
    res = minimize_scalar(loss, bounds=(lo, hi), method="bounded",
                          options={"xatol": REFINE_RTOL * 1e-3 * grid[k]})
    if -res.fun >= probs[k]:
        return float(res.x), float(-res.fun)
    return float(grid[k]), float(probs[k])


def greedy_steps(spec: ChainSpec, window: float | None = None,
                 resolution: int = DEFAULT_RESOLUTION, sd: SpectralData | None = None):
    """Yield :class:`GreedyStep` items forever, each maximising that step's arrival.

    Earlier choices are held fixed; after each step Bob's amplitude is swapped away,
    which is the residual the next step starts from.
    """
    if resolution < 100:
        raise ValueError("resolution must be at least 100")
    window = default_window(spec) if window is None else float(window)
    if window <= 0:
        raise ValueError("window must be positive")
    sd = chain_spectrum(spec) if sd is None else sd
    residual = np.zeros(spec.N, dtype=complex)
    residual[0] = 1.0
    while True:
        tau, eta = _best_arrival(sd, residual, window, resolution)
        residual = sd.evolve(residual, tau)
        residual[-1] = 0.0
        yield GreedyStep(tau, eta)


def greedy_optimize_schedule(spec: ChainSpec, j_max: int, window: float | None = None,
                             resolution: int = DEFAULT_RESOLUTION) -> Schedule:
    if j_max < 1:
        raise ValueError("j_max must be at least 1")
    gen = greedy_steps(spec, window, resolution)
    return Schedule(tuple(next(gen).tau for _ in range(j_max)))


def eta_profile(spec: ChainSpec, schedule: Schedule, sd: SpectralData | None = None) -> EtaProfile:
    """Per-step success probabilities ``|f_N^(i)|^2`` read off the memories.

    The transfer is run with the basis input ``|0>``, whose whole amplitude enters
    the chain, so memory ``i`` ends up holding ``f_N^(i)``.
    """
    sd = chain_spectrum(spec) if sd is None else sd
    state, _ = prepare_transfer(QubitState(0, 1), sd, schedule)
    return EtaProfile(np.abs(state.memories) ** 2)


def memories_for_target(spec: ChainSpec, eta_target: float, j_cap: int = 200,
                        window: float | None = None,
                        resolution: int = DEFAULT_RESOLUTION) -> int | None:
    """Smallest greedy ``j`` with cumulative success ``>= eta_target``; ``None`` if not reached by ``j_cap``."""
    if not 0.0 < eta_target < 1.0:
        raise ValueError("eta_target must lie in (0, 1)")
    total = 0.0
    for j, step in enumerate(greedy_steps(spec, window, resolution), start=1):
        total += step.eta
        if total >= eta_target:
            return j
        if j >= j_cap:
            return None


def max_eta1_curve(N_range, J: float = 1.0, window_factor: float = WINDOW_FACTOR,
                   resolution: int = DEFAULT_RESOLUTION) -> list[tuple[int, float, float]]:
    """Rows ``(N, max eta_1, optimal tau)`` for uniform chains."""
    rows = []
    for N in N_range:
        spec = ChainSpec.uniform(int(N), J)
        step = next(greedy_steps(spec, window_factor * N / J, resolution))
        rows.append((int(N), step.eta, step.tau))
    return rows
