"""One- and two-particle quantum Chirikov map with interaction.

One map step is the symmetrized split-step product

    exp(-i T (p1^2+p2^2)/4 + i U_hat/2) .  kick  .  exp(-i T (p1^2+p2^2)/4 + i U_hat/2)

applied as: diagonal kinetic/interaction phase in momentum space, inverse
2d FFT to the angle grid, diagonal kick phase exp(-i k (cos th1 + cos th2)),
forward 2d FFT back, second kinetic/interaction phase.  The backward step
is the exact operator adjoint (conjugated diagonals, transforms swapped by
the palindromic structure).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.fft as _fft

from .core import (
    ContractError,
    NumericsError,
    OneParticleState,
    Representation,
    SimParams,
    TwoParticleState,
    angle_values,
    fft_workers,
    momentum_values,
)

__all__ = [
    "interaction_diag",
    "interaction_matrix",
    "half_rotation",
    "kick",
    "forward_step",
    "backward_step",
    "physical_reversal_step",
    "one_particle_step",
    "absorption_mask",
]

_DIRECTIONS = ("forward", "adjoint")


def _check_direction(direction: str) -> bool:
    if direction not in _DIRECTIONS:
        raise ContractError(f"direction must be one of {_DIRECTIONS}, got {direction!r}")
    return direction == "adjoint"


def interaction_diag(params: SimParams, p1, p2):
    """Interaction phase for a momentum pair.

    U for p1 == p2, U/2 for 0 < d <= U_r with d the periodic distance
    min(|p1-p2|, N - |p1-p2|), 0 otherwise.  Accepts scalars or arrays.
    """
    p1 = np.asarray(p1)
    p2 = np.asarray(p2)
    half = params.N // 2
    if np.any(p1 < -half) or np.any(p1 >= half) or np.any(p2 < -half) or np.any(p2 >= half):
        raise ContractError(f"momenta must lie in [-{half}, {half})")
    diff = np.abs(p1 - p2)
    d = np.minimum(diff, params.N - diff)
    out = np.where(d == 0, params.U, np.where(d <= params.U_r, params.U / 2.0, 0.0))
    if out.ndim == 0:
        return float(out)
    return out


@lru_cache(maxsize=32)
def _interaction_matrix_cached(N: int, U: float, U_r: int) -> np.ndarray:
    # circulant in storage indices: (i - j) mod N equals (p1 - p2) mod N
    idx = np.arange(N)
    diff = (idx[:, None] - idx[None, :]) % N
    d = np.minimum(diff, N - diff)
    out = np.where(d == 0, U, np.where(d <= U_r, U / 2.0, 0.0))
    out.flags.writeable = False
    return out


def interaction_matrix(params: SimParams) -> np.ndarray:
    """N x N interaction phases in storage order (read-only, cached)."""
    return _interaction_matrix_cached(params.N, params.U, params.U_r)


@lru_cache(maxsize=64)
def _kin_half_1d(N: int, t_kin: float) -> np.ndarray:
    """exp(-i * t_kin * p^2 / 4) over the storage-ordered momentum grid."""
    p = momentum_values(N).astype(np.float64)
    out = np.exp(-0.25j * t_kin * p * p)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=64)
def _kick_1d(N: int, k: float) -> np.ndarray:
    """exp(-i * k * cos(theta_j)) on the angle grid."""
    out = np.exp(-1j * k * np.cos(angle_values(N)))
    out.flags.writeable = False
    return out


@lru_cache(maxsize=16)
def _half_table_2d(N: int, t_kin: float, U: float, U_r: int) -> np.ndarray:
    """Full N x N diagonal of one half step, exp(-i t_kin (p1^2+p2^2)/4 + i U/2)."""
    kin = _kin_half_1d(N, t_kin)
    out = np.outer(kin, kin)
    if U != 0.0:
        out = out * np.exp(0.5j * _interaction_matrix_cached(N, U, U_r))
    out.flags.writeable = False
    return out


def _ifft2(a: np.ndarray) -> np.ndarray:
    return _fft.ifft2(a, norm="ortho", workers=fft_workers())


def _fft2(a: np.ndarray) -> np.ndarray:
    return _fft.fft2(a, norm="ortho", workers=fft_workers())


def _step2_raw(a: np.ndarray, params: SimParams, adjoint: bool = False,
               t_kin: float | None = None) -> np.ndarray:
    """One two-particle step on a raw momentum grid; no contract checks."""
    N = params.N
    t = params.hbar_eff if t_kin is None else t_kin
    kick1d = _kick_1d(N, params.k)
    if adjoint:
        kick1d = kick1d.conj()
    if params.U != 0.0:
        half = _half_table_2d(N, t, params.U, params.U_r)
        if adjoint:
            half = half.conj()
        a = a * half
        a = _ifft2(a)
        a = a * kick1d[:, None]
        a *= kick1d[None, :]
        a = _fft2(a)
        a *= half
    else:
        kin = _kin_half_1d(N, t)
        if adjoint:
            kin = kin.conj()
        a = a * kin[:, None]
        a *= kin[None, :]
        a = _ifft2(a)
        a = a * kick1d[:, None]
        a *= kick1d[None, :]
        a = _fft2(a)
        a *= kin[:, None]
        a *= kin[None, :]
    return a


def _step1_raw(vecs: np.ndarray, params: SimParams, adjoint: bool = False,
               window_mask: np.ndarray | None = None) -> np.ndarray:
    """Symmetrized one-particle step on (..., N) momentum vectors.

    Optionally projects onto an absorption window after the step.
    """
    N = params.N
    kin = _kin_half_1d(N, params.hbar_eff)
    kick1d = _kick_1d(N, params.k)
    if adjoint:
        kin = kin.conj()
        kick1d = kick1d.conj()
    a = vecs * kin
    a = _fft.ifft(a, axis=-1, norm="ortho", workers=fft_workers())
    a *= kick1d
    a = _fft.fft(a, axis=-1, norm="ortho", workers=fft_workers())
    a *= kin
    if window_mask is not None:
        a *= window_mask
    return a


def absorption_mask(N: int, half_window: int) -> np.ndarray:
    """Boolean mask (storage order) of momenta with -half_window <= p < half_window."""
    if not (0 < half_window <= N // 2):
        raise ContractError(f"half_window must satisfy 0 < half_window <= N/2, got {half_window}")
    p = momentum_values(N)
    return (p >= -half_window) & (p < half_window)


def half_rotation(state: TwoParticleState, params: SimParams,
                  direction: str = "forward") -> TwoParticleState:
    """Half free rotation plus interaction phase, diagonal in momentum.

    Multiplies each amplitude by exp(-/+ i [T (p1^2+p2^2)/4 - U(p1,p2)/2]).
    """
    adjoint = _check_direction(direction)
    state.require(Representation.MOMENTUM)
    half = _half_table_2d(params.N, params.hbar_eff, params.U, params.U_r)
    if adjoint:
        half = half.conj()
    out = state.copy()
    out.amplitudes *= half
    out.norm_cache = None
    return out


def kick(state, kick_strength: float, direction: str = "forward"):
    """Kick phase exp(-/+ i k sum_j cos theta_j) on the angle grid."""
    adjoint = _check_direction(direction)
    state.require(Representation.ANGLE)
    kick1d = _kick_1d(state.amplitudes.shape[-1], kick_strength)
    if adjoint:
        kick1d = kick1d.conj()
    out = state.copy()
    if out.amplitudes.ndim == 2:
        out.amplitudes *= kick1d[:, None]
        out.amplitudes *= kick1d[None, :]
        out.norm_cache = None
    else:
        out.amplitudes *= kick1d
    return out


def _require_finite(state) -> None:
    if not np.isfinite(state.amplitudes).all():
        raise NumericsError("state contains non-finite amplitudes")


def forward_step(state: TwoParticleState, params: SimParams) -> TwoParticleState:
    """One forward step of the symmetrized two-particle map (unitary)."""
    state.require(Representation.MOMENTUM)
    _require_finite(state)
    if state.N != params.N:
        raise ContractError(f"state size {state.N} does not match params.N = {params.N}")
    return TwoParticleState(_step2_raw(state.amplitudes, params, adjoint=False))


def backward_step(state: TwoParticleState, params_backward: SimParams) -> TwoParticleState:
    """Exact adjoint of :func:`forward_step` built with the backward parameters.

    With params_backward equal to the forward parameters this inverts
    forward_step to machine precision.
    """
    state.require(Representation.MOMENTUM)
    _require_finite(state)
    if state.N != params_backward.N:
        raise ContractError(f"state size {state.N} does not match params.N = {params_backward.N}")
    return TwoParticleState(_step2_raw(state.amplitudes, params_backward, adjoint=True))


def physical_reversal_step(state: TwoParticleState, params_backward: SimParams) -> TwoParticleState:
    """Backward step via the kinetic-phase substitution T -> 4*pi - T.

    For integer momenta exp(-i*pi*p^2) = (-1)^p, which shifts the angle by pi
    and conjugates the kick, so for U = 0 this equals the exact adjoint.  The
    interaction phase keeps its forward sign here, hence for U != 0 this step
    equals the adjoint of the map built with interaction -U.
    """
    state.require(Representation.MOMENTUM)
    _require_finite(state)
    t_rev = 4.0 * np.pi - params_backward.hbar_eff
    return TwoParticleState(
        _step2_raw(state.amplitudes, params_backward, adjoint=False, t_kin=t_rev)
    )


def one_particle_step(state: OneParticleState, params: SimParams,
                      absorb_window: int | None = None) -> OneParticleState:
    """Symmetrized one-particle step (no interaction), optional absorption.

    This is exactly one tensor factor of the U = 0 two-particle step; with
    absorb_window set, amplitudes outside [-w, w) are zeroed after the step.
    """
    state.require(Representation.MOMENTUM)
    _require_finite(state)
    if state.N != params.N:
        raise ContractError(f"state size {state.N} does not match params.N = {params.N}")
    mask = None
    if absorb_window is not None:
        mask = absorption_mask(params.N, absorb_window)
    return OneParticleState(_step1_raw(state.amplitudes, params, window_mask=mask))
