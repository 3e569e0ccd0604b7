"""State constructors: spin coherent states, rotated and generalized singlets,
and GHZ states.

Amplitude vectors are indexed by magnetic quantum numbers in descending order
(m = j..-j) along every subsystem axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angular import HalfInt, check_spin, ln_factorial
from .errors import DimensionTooLarge

__all__ = [
    "Direction",
    "StateVector",
    "coherent_state",
    "coherent_amplitudes",
    "rotated_singlet",
    "generalized_singlet",
    "ghz_state",
]

_NORM_TOL = 1e-12
_GHZ_MAX_PARTIES = 12


@dataclass(frozen=True)
class Direction:
    """Measurement/frame axis (polar, azimuth) in radians.

    phi is normalized into [0, 2*pi); theta outside [0, pi] is rejected.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        object.__setattr__(self, "phi", self.phi % (2.0 * math.pi))


@dataclass(frozen=True)
class StateVector:
    """Normalized amplitudes over a product of descending-m bases."""

    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self) -> None:
        if self.amps.shape != self.dims:
            raise ValueError(f"amplitude shape {self.amps.shape} != dims {self.dims}")
        norm2 = float(np.sum(np.abs(self.amps) ** 2))
        if abs(norm2 - 1.0) > _NORM_TOL:
            raise ValueError(f"state not normalized: |psi|^2 = {norm2}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def coherent_amplitudes(j_rf: HalfInt, direction: Direction) -> np.ndarray:
    """Amplitudes <j,m|alpha> of the spin coherent state, m = j..-j.

    The m-th amplitude is binom(2j, j+m)^(1/2) cos^(j+m)(theta/2)
    sin^(j-m)(theta/2) e^(-i m phi), evaluated in log space.
    """
    check_spin(j_rf, "j_rf")
    tj = j_rf.twice
    dim = tj + 1
    half = 0.5 * direction.theta
    c, s = math.cos(half), math.sin(half)
    amps = np.zeros(dim, dtype=complex)
    ln_tj = ln_factorial(tj)
    for i in range(dim):
        kp = tj - i          # j + m
        km = i               # j - m
        if (c == 0.0 and kp > 0) or (s == 0.0 and km > 0):
            continue
        ln = (
            0.5 * (ln_tj - ln_factorial(kp) - ln_factorial(km))
            + (kp * math.log(c) if kp else 0.0)
            + (km * math.log(s) if km else 0.0)
        )
        m = (tj - 2 * i) / 2.0
        amps[i] = math.exp(ln) * complex(math.cos(m * direction.phi),
                                         -math.sin(m * direction.phi))
    amps /= np.linalg.norm(amps)
    return amps


def coherent_state(j_rf: HalfInt, direction: Direction) -> StateVector:
    """Spin-j coherent state pointing along the given direction."""
    amps = coherent_amplitudes(j_rf, direction)
    return StateVector(dims=(j_rf.twice + 1,), amps=amps)


def rotated_singlet(theta: float) -> StateVector:
    """Two-qubit singlet with the second particle rotated by theta about y.

    Amplitudes over (++, +-, -+, --):
    (sin(t/2), cos(t/2), -cos(t/2), sin(t/2)) / sqrt(2).
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    s, c = math.sin(0.5 * theta), math.cos(0.5 * theta)
    amps = np.array([[s, c], [-c, s]], dtype=complex) / math.sqrt(2.0)
    return StateVector(dims=(2, 2), amps=amps)


def generalized_singlet(j_s: HalfInt) -> StateVector:
    """Rotationally invariant two-spin-j singlet.

    Amplitude (-1)^(j-m) / sqrt(2j+1) on index pairs (m, -m); the exponent is
    evaluated as the integer j - m, fixing the global sign convention so that
    the j = 1/2 case coincides with rotated_singlet(0).
    """
    check_spin(j_s, "j_s")
    tj = j_s.twice
    dim = tj + 1
    amps = np.zeros((dim, dim), dtype=complex)
    inv_norm = 1.0 / math.sqrt(dim)
    for i in range(dim):
        # row index i has m = j - i; the partner -m sits at index 2j - (j - m) = tj - i
        amps[i, tj - i] = (-1.0 if i % 2 else 1.0) * inv_norm
    return StateVector(dims=(dim, dim), amps=amps)


def ghz_state(n: int) -> StateVector:
    """N-party GHZ state over the full 2^N product basis (oracle-scale only)."""
    if n < 1:
        raise ValueError(f"need at least one party, got {n}")
    if n > _GHZ_MAX_PARTIES:
        raise DimensionTooLarge(f"dense GHZ capped at {_GHZ_MAX_PARTIES} parties, got {n}")
    dims = (2,) * n
    amps = np.zeros(dims, dtype=complex)
    amps[(0,) * n] = 1.0 / math.sqrt(2.0)
    amps[(1,) * n] = 1.0 / math.sqrt(2.0)
    return StateVector(dims=dims, amps=amps)
