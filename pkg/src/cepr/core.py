"""Simulation parameters and wave-function containers for the kicked pair.

Momentum-space arrays use the native transform ordering: the integer
momentum p in [-N/2, N/2) lives at array index (p + N) % N, so index
arithmetic never needs a permutation in the evolution loop.  The angle
grid is theta_j = 2*pi*j/N starting at 0.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import scipy.fft as _fft

__all__ = [
    "ContractError",
    "NumericsError",
    "Representation",
    "SimParams",
    "OneParticleState",
    "TwoParticleState",
    "momentum_values",
    "angle_values",
    "to_angle",
    "to_momentum",
    "fft_workers",
]


class ContractError(ValueError):
    """An operation was called outside its contract (wrong representation,
    out-of-range momentum, inconsistent parameters)."""


class NumericsError(ArithmeticError):
    """Numerical failure: non-finite amplitudes, vanished norms, overflow."""


def fft_workers() -> int:
    """Worker count passed to scipy.fft; override with CEPR_FFT_WORKERS."""
    env = os.environ.get("CEPR_FFT_WORKERS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1, 2 * (os.cpu_count() or 1))


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def momentum_values(N: int) -> np.ndarray:
    """Integer momenta in storage order: [0, 1, ..., N/2-1, -N/2, ..., -1]."""
    p = np.arange(N, dtype=np.int64)
    p[N // 2:] -= N
    return p


def angle_values(N: int) -> np.ndarray:
    """Angle grid theta_j = 2*pi*j/N, j = 0..N-1."""
    return 2.0 * np.pi * np.arange(N) / N


@dataclass(frozen=True)
class SimParams:
    """Constants of one map configuration.

    N        lattice size (momentum states per particle, power of two)
    K        classical chaos parameter, K = k * hbar_eff
    hbar_eff effective Planck constant (the kick period T)
    k        quantum kick strength, k = K / hbar_eff
    U        interaction phase per step for coinciding momenta
    U_r      interaction range in momentum units (0 or 1 here)
    """

    N: int
    K: float
    hbar_eff: float
    k: float
    U: float = 0.0
    U_r: int = 0

    def __post_init__(self):
        if not _is_power_of_two(self.N) or self.N < 8:
            raise ContractError(f"N must be a power of two >= 8, got {self.N}")
        scale = max(1.0, abs(self.K))
        if abs(self.k * self.hbar_eff - self.K) > 1e-12 * scale:
            raise ContractError(
                f"inconsistent parameters: k*hbar_eff = {self.k * self.hbar_eff!r} "
                f"but K = {self.K!r}"
            )
        if not (0 <= int(self.U_r) < self.N // 2):
            raise ContractError(f"U_r must satisfy 0 <= U_r < N/2, got {self.U_r}")

    @property
    def eps(self) -> float:
        """Alias for hbar_eff (the T = epsilon convention)."""
        return self.hbar_eff

    @classmethod
    def from_hbar(cls, N: int, K: float, hbar_eff: float, U: float = 0.0,
                  U_r: int = 0) -> "SimParams":
        return cls(N=N, K=K, hbar_eff=hbar_eff, k=K / hbar_eff, U=U, U_r=U_r)

    @classmethod
    def from_kick(cls, N: int, K: float, k: float, U: float = 0.0,
                  U_r: int = 0) -> "SimParams":
        return cls(N=N, K=K, hbar_eff=K / k, k=k, U=U, U_r=U_r)

    def with_interaction(self, U: float, U_r: int | None = None) -> "SimParams":
        return replace(self, U=U, U_r=self.U_r if U_r is None else U_r)

    def with_kick(self, k: float) -> "SimParams":
        """Same lattice and hbar_eff, different kick (K follows)."""
        return replace(self, k=k, K=k * self.hbar_eff)


class Representation(Enum):
    MOMENTUM = "momentum"
    ANGLE = "angle"


@dataclass
class OneParticleState:
    """Length-N complex amplitude vector for a single rotator."""

    amplitudes: np.ndarray
    representation: Representation = Representation.MOMENTUM

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.ndim != 1:
            raise ContractError("one-particle amplitudes must be 1-d")

    @property
    def N(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "OneParticleState":
        return OneParticleState(self.amplitudes.copy(), self.representation)

    def require(self, rep: Representation) -> None:
        if self.representation is not rep:
            raise ContractError(
                f"state is in {self.representation.value} representation, "
                f"operation requires {rep.value}"
            )


@dataclass
class TwoParticleState:
    """N x N complex amplitude grid psi(p1, p2), row index = particle 1."""

    amplitudes: np.ndarray
    representation: Representation = Representation.MOMENTUM
    norm_cache: float | None = field(default=None, compare=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.ndim != 2 or self.amplitudes.shape[0] != self.amplitudes.shape[1]:
            raise ContractError("two-particle amplitudes must be a square matrix")

    @property
    def N(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        n = float(np.linalg.norm(self.amplitudes))
        self.norm_cache = n
        return n

    def copy(self) -> "TwoParticleState":
        return TwoParticleState(self.amplitudes.copy(), self.representation)

    def require(self, rep: Representation) -> None:
        if self.representation is not rep:
            raise ContractError(
                f"state is in {self.representation.value} representation, "
                f"operation requires {rep.value}"
            )


def _ifft_unitary(a: np.ndarray) -> np.ndarray:
    axes = tuple(range(a.ndim))
    return _fft.ifftn(a, axes=axes, norm="ortho", workers=fft_workers())


def _fft_unitary(a: np.ndarray) -> np.ndarray:
    axes = tuple(range(a.ndim))
    return _fft.fftn(a, axes=axes, norm="ortho", workers=fft_workers())


def to_angle(state):
    """Momentum -> angle representation (unitary inverse DFT per particle axis).

    psi(theta) = N^(-d/2) * sum_p psi(p) exp(+i p . theta) with d particle axes.
    """
    state.require(Representation.MOMENTUM)
    out = state.copy()
    out.amplitudes = _ifft_unitary(state.amplitudes)
    out.representation = Representation.ANGLE
    if isinstance(out, TwoParticleState):
        out.norm_cache = None
    return out


def to_momentum(state):
    """Angle -> momentum representation; exact inverse of :func:`to_angle`."""
    state.require(Representation.ANGLE)
    out = state.copy()
    out.amplitudes = _fft_unitary(state.amplitudes)
    out.representation = Representation.MOMENTUM
    if isinstance(out, TwoParticleState):
        out.norm_cache = None
    return out
