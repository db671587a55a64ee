"""Schedules, success-probability profiles and decoding-time analytics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants

#: time unit conventions for converting natural times to seconds
TIME_UNITS = ("hbar", "h")


@dataclass(frozen=True)
class Schedule:
    """Evolution intervals ``tau_1..tau_j`` (natural units) and their running sums."""

    taus: tuple[float, ...]

    def __post_init__(self):
        taus = tuple(float(x) for x in self.taus)
        if any(not np.isfinite(x) or x < 0 for x in taus):
            raise ValueError(f"intervals must be finite and non-negative, got {taus}")
        object.__setattr__(self, "taus", taus)

    def __len__(self) -> int:
        return len(self.taus)

    @property
    def times(self) -> np.ndarray:
        return np.cumsum(self.taus)

    @property
    def total_time(self) -> float:
        return float(sum(self.taus))

    def truncated(self, j: int) -> "Schedule":
        return Schedule(self.taus[:j])

    def is_strict(self) -> bool:
        """True when every interval is positive (cumulative times strictly increase)."""
        return all(x > 0 for x in self.taus)


@dataclass(frozen=True)
class EtaProfile:
    eta: np.ndarray

    def __post_init__(self):
        eta = np.array(self.eta, dtype=float)
        if np.any(eta < -1e-12) or np.any(eta > 1 + 1e-12):
            raise ValueError("per-step probabilities must lie in [0, 1]")
        if eta.sum() > 1 + 1e-9:
            raise ValueError(f"cumulative probability exceeds 1: {eta.sum()}")
        eta.setflags(write=False)
        object.__setattr__(self, "eta", eta)

    def __len__(self) -> int:
        return self.eta.size

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.eta)

    @property
    def total(self) -> float:
        return float(self.eta.sum())


@dataclass(frozen=True)
class TimingReport:
    mean_time: float
    full_time: float
    mean_time_s: float | None = None
    full_time_s: float | None = None

    @property
    def ratio(self) -> float:
        return self.mean_time / self.full_time


def average_decoding_time(profile: EtaProfile, schedule: Schedule,
                          J_kelvin: float | None = None,
                          time_unit: str = "hbar") -> TimingReport:
    """Mean stopping time of the decode sequence.

    Step ``i < j`` ends the protocol with probability ``eta_i`` at ``t_i``; with the
    remaining probability every step up to ``j`` is run. ``full_time`` is ``t_j``,
    the cost of a decoder that always replays the whole transfer.
    """
    if len(profile) != len(schedule):
        raise ValueError("profile and schedule lengths differ")
    if len(schedule) == 0:
        raise ValueError("empty schedule")
    t = schedule.times
    eta = profile.eta[:-1]
    mean = float(np.dot(eta, t[:-1]) + (1.0 - eta.sum()) * t[-1])
    full = float(t[-1])
    if J_kelvin is None:
        return TimingReport(mean, full)
    return TimingReport(mean, full,
                        to_physical_units(mean, J_kelvin, time_unit),
                        to_physical_units(full, J_kelvin, time_unit))


def natural_time_unit(J_kelvin: float, time_unit: str = "hbar") -> float:
    """Seconds per natural time unit for a coupling ``J = J_kelvin * k_B``.

    ``"hbar"`` gives ``hbar / (k_B J)``. ``"h"`` gives ``h / (k_B J)``, the unit
    obtained when the coupling is read as a frequency ``J / h``.
    """
    if J_kelvin <= 0:
        raise ValueError("J_kelvin must be positive")
    if time_unit == "hbar":
        action = constants.hbar
    elif time_unit == "h":
        action = constants.h
    else:
        raise ValueError(f"time_unit must be one of {TIME_UNITS}, got {time_unit!r}")
    return action / (constants.k * J_kelvin)


def to_physical_units(t_natural, J_kelvin: float, time_unit: str = "hbar"):
    return t_natural * natural_time_unit(J_kelvin, time_unit)
