"""Single-excitation XY chains: Hamiltonians, spectra and propagator amplitudes.

Natural units throughout: hbar = 1, energies in units of the coupling scale.

Coupling convention
-------------------
:class:`ChainSpec` stores the *hopping element*, i.e. the number that appears
off the diagonal of the one-excitation Hamiltonian. Conversions:

* ``H = sum J_ij (sx sx + sy sy)``        -> hopping ``2 * J_ij``
* ``H = (J/2) sum (sx sx + sy sy)``       -> hopping ``J``

A static field term ``B_n sz_n`` shifts the energy of an excitation on site ``n``
by ``2 B_n`` relative to the all-down state, whose energy is set to zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: tolerance used for orthogonality / reconstruction checks on spectra
SPECTRAL_TOL = 1e-10


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ChainSpec:
    """Couplings and fields of one open chain of ``N`` sites.

    Site 1 is the A-spin currently connected, site ``N`` is Bob.
    """

    couplings: np.ndarray
    fields: np.ndarray | None = None

    def __post_init__(self):
        J = _frozen(self.couplings)
        if J.ndim != 1 or J.size < 1:
            raise ValueError("a chain needs at least 2 sites (1 coupling)")
        if not np.all(np.isfinite(J)) or np.any(J <= 0):
            raise ValueError(f"couplings must be strictly positive, got {J}")
        n = J.size + 1
        B = np.zeros(n) if self.fields is None else self.fields
        B = _frozen(B)
        if B.shape != (n,):
            raise ValueError(f"expected {n} fields, got shape {B.shape}")
        object.__setattr__(self, "couplings", J)
        object.__setattr__(self, "fields", B)

    @property
    def N(self) -> int:
        return self.couplings.size + 1

    @classmethod
    def uniform(cls, N: int, J: float = 1.0) -> "ChainSpec":
        if N < 2:
            raise ValueError("a chain needs at least 2 sites")
        return cls(np.full(N - 1, float(J)))

    def scaled(self, s: float) -> "ChainSpec":
        return ChainSpec(self.couplings * s, self.fields * s)


@dataclass(frozen=True)
class SpectralData:
    """Eigenpairs of a one-excitation Hamiltonian (eigenvectors in columns)."""

    energies: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "energies", _frozen(self.energies))
        object.__setattr__(self, "vectors", _frozen(self.vectors))

    @property
    def N(self) -> int:
        return self.energies.size

    def propagator(self, t: float) -> np.ndarray:
        """Full matrix ``exp(-i H t)``."""
        V = self.vectors
        return (V * np.exp(-1j * self.energies * t)) @ V.T

    def evolve(self, c: np.ndarray, t: float) -> np.ndarray:
        V = self.vectors
        return V @ (np.exp(-1j * self.energies * t) * (V.T @ c))


@dataclass(frozen=True)
class DisorderModel:
    """Couplings drawn uniformly from ``[J0 (1 - delta), J0 (1 + delta)]``."""

    J0: float = 1.0
    delta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.J0 <= 0:
            raise ValueError("J0 must be positive")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")


def build_single_excitation_hamiltonian(spec: ChainSpec) -> np.ndarray:
    N = spec.N
    H = np.diag(2.0 * spec.fields)
    idx = np.arange(N - 1)
    H[idx, idx + 1] = spec.couplings
    H[idx + 1, idx] = spec.couplings
    return H


def spectral_decompose(H1) -> SpectralData:
    H1 = np.asarray(H1, dtype=float)
    if H1.ndim != 2 or H1.shape[0] != H1.shape[1]:
        raise ValueError("Hamiltonian must be a square matrix")
    if not np.allclose(H1, H1.T, rtol=0, atol=1e-12):
        raise ValueError("Hamiltonian must be real symmetric")
    try:
        E, V = np.linalg.eigh(H1)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise RuntimeError(f"eigensolver did not converge: {exc}") from exc
    if not (np.all(np.isfinite(E)) and np.all(np.isfinite(V))):
        raise RuntimeError("eigensolver returned non-finite values")
    return SpectralData(E, V)


def chain_spectrum(spec: ChainSpec) -> SpectralData:
    return spectral_decompose(build_single_excitation_hamiltonian(spec))


def propagator_amplitude(sd: SpectralData, m: int, n: int, t: float) -> complex:
    """Amplitude ``<m| exp(-i H t) |n>`` for 1-based sites ``m`` and ``n``."""
    N = sd.N
    if not (1 <= m <= N and 1 <= n <= N):
        raise IndexError(f"sites must lie in 1..{N}, got m={m}, n={n}")
    V = sd.vectors
    return complex(np.sum(V[m - 1] * V[n - 1] * np.exp(-1j * sd.energies * t)))


def uniform_spectrum(N: int, J: float = 1.0) -> SpectralData:
    """Closed-form eigenpairs of the uniform zero-field chain.

    ``E_k = 2 J cos(k pi / (N + 1))`` with eigenvector components
    ``sqrt(2 / (N + 1)) sin(pi k n / (N + 1))``.
    """
    k = np.arange(1, N + 1)
    n = np.arange(1, N + 1)
    E = 2.0 * J * np.cos(k * np.pi / (N + 1))
    V = np.sqrt(2.0 / (N + 1)) * np.sin(np.pi * np.outer(n, k) / (N + 1))
    return SpectralData(E, V)


def uniform_end_amplitude(N: int, t, J: float = 1.0):
    """End-to-end amplitude ``f_{N,1}(t)`` of the uniform chain from the sine sum."""
    t = np.asarray(t, dtype=float)
    k = np.arange(1, N + 1)
    w = (2.0 / (N + 1)) * np.sin(np.pi * k / (N + 1)) * np.sin(np.pi * k * N / (N + 1))
    E = 2.0 * J * np.cos(k * np.pi / (N + 1))
    return np.exp(-1j * np.multiply.outer(t, E)) @ w


def sample_random_chain(dm: DisorderModel, N: int) -> ChainSpec:
    if N < 2:
        raise ValueError("a chain needs at least 2 sites")
    rng = np.random.default_rng(dm.seed)
    J = dm.J0 * (1.0 + dm.delta * rng.uniform(-1.0, 1.0, size=N - 1))
    return ChainSpec(J)
