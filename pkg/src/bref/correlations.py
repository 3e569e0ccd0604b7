"""Correlation functions: two-qubit pair correlations with bounded or
unbounded frames, N-party GHZ correlations, and parity correlations for
generalized singlets.

Production paths use the relative-angle reduction: the state is rotated
instead of the frames, which is operationally equivalent for rotationally
invariant states.  ``UNBOUNDED`` marks a classical frame; those parties
measure ideal projectors and the analytic limits are exact.
"""

from __future__ import annotations

import cmath
import math
from typing import Sequence, Union

import numpy as np

from .angular import HalfInt, check_spin
from .errors import MismatchedLengths
from .measurements import Povm, bounded_povm, bounded_povm_z, ideal_projectors, parity_observable
from .states import Direction, generalized_singlet, rotated_singlet

__all__ = [
    "UNBOUNDED",
    "FrameSize",
    "pair_correlation_numeric",
    "pair_correlation_analytic",
    "mermin_correlation_numeric",
    "mermin_correlation_analytic",
    "parity_correlation",
]

_HALF = HalfInt(1)


class _Unbounded:
    """Singleton marker for a classical (infinitely large) reference frame."""

    _instance = None

    def __new__(cls) -> "_Unbounded":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNBOUNDED"


UNBOUNDED = _Unbounded()

FrameSize = Union[HalfInt, _Unbounded]


def _spin_half_outcomes(frame: FrameSize) -> list[tuple[float, float, float]]:
    """Per-outcome (sign, u, v) for a spin-1/2 measurement under the frame,
    where diag(u, v) is the z-aligned POVM element and sign is +-1 by label."""
    if frame is UNBOUNDED:
        return [(1.0, 1.0, 0.0), (-1.0, 0.0, 1.0)]
    povm = bounded_povm_z(frame, _HALF)
    out = []
    for m, op in povm.outcomes:
        sign = 1.0 if m.twice > 0 else -1.0
        out.append((sign, float(op[0, 0].real), float(op[1, 1].real)))
    return out


def pair_correlation_numeric(frame1: FrameSize, frame2: FrameSize, theta: float) -> float:
    """Two-qubit correlation of the rotated singlet under frame-limited
    measurements, E = sum_{m,n} sign(m) sign(n) p_mn."""
    probs = np.abs(rotated_singlet(theta).amps) ** 2
    weights = []
    for frame in (frame1, frame2):
        w = np.zeros(2)
        for sign, u, v in _spin_half_outcomes(frame):
            w += sign * np.array([u, v])
        weights.append(w)
    return float(weights[0] @ probs @ weights[1])


def pair_correlation_analytic(j1: HalfInt, j2: HalfInt, theta: float) -> float:
    """Closed form (1 - 4 j1 j2 cos(theta)) / ((2 j1 + 1)(2 j2 + 1))."""
    check_spin(j1, "j1")
    check_spin(j2, "j2")
    v1, v2 = j1.value, j2.value
    return (1.0 - 4.0 * v1 * v2 * math.cos(theta)) / ((2 * v1 + 1) * (2 * v2 + 1))


def _party_factors(direction: Direction, frame: FrameSize) -> tuple[float, float, complex]:
    """Outcome-sign-weighted two-branch factors (A, D, C) for one party.

    With |a+> and |a-> the inverse-rotated basis states and P_m the party's
    z-aligned POVM elements:
      A = sum_m sign(m) <a+|P_m|a+>,  D likewise on |a->,
      C = sum_m sign(m) <a+|P_m|a->.
    """
    half = 0.5 * direction.theta
    c2, s2 = math.cos(half) ** 2, math.sin(half) ** 2
    cross = 0.5 * math.sin(direction.theta)
    phase = cmath.exp(-1j * direction.phi)
    a = d = 0.0
    c: complex = 0.0
    for sign, u, v in _spin_half_outcomes(frame):
        a += sign * (u * c2 + v * s2)
        d += sign * (u * s2 + v * c2)
        c += sign * (phase * cross * (u - v))
    return a, d, c


def mermin_correlation_numeric(settings: Sequence[Direction],
                               frames: Sequence[FrameSize]) -> float:
    """N-party GHZ correlation E = sum_mu prod_k mu_k p(mu; settings).

    Evaluated through the two-branch decomposition of the GHZ state;
    the outcome sum factorizes party by party, so the cost is linear in N.
    """
    if len(settings) != len(frames):
        raise MismatchedLengths(
            f"{len(settings)} settings vs {len(frames)} frames")
    if not settings:
        raise MismatchedLengths("need at least one party")
    pa = pd_ = 1.0
    pc: complex = 1.0
    for direction, frame in zip(settings, frames):
        a, d, c = _party_factors(direction, frame)
        pa *= a
        pd_ *= d
        pc *= c
    return 0.5 * (pa + pd_) + float(pc.real)


def mermin_correlation_analytic(settings: Sequence[Direction],
                                frames: Sequence[HalfInt]) -> float:
    """Closed-form N-party correlation for finite frames:
    (1/prod d_k) { [prod(1+2 j_k cos t_k) + prod(1-2 j_k cos t_k)]/2
                   + cos(sum phi_k) prod 2 j_k sin t_k },  d_k = 2 j_k + 1.
    """
    if len(settings) != len(frames):
        raise MismatchedLengths(
            f"{len(settings)} settings vs {len(frames)} frames")
    if not settings:
        raise MismatchedLengths("need at least one party")
    plus = minus = cross = 1.0
    denom = 1.0
    phi_sum = 0.0
    for direction, j in zip(settings, frames):
        check_spin(j)
        tj = 2.0 * j.value
        plus *= 1.0 + tj * math.cos(direction.theta)
        minus *= 1.0 - tj * math.cos(direction.theta)
        cross *= tj * math.sin(direction.theta)
        denom *= tj + 1.0
        phi_sum += direction.phi
    return (0.5 * (plus + minus) + math.cos(phi_sum) * cross) / denom


def _parity_for(j_s: HalfInt, frame: FrameSize, direction: Direction) -> np.ndarray:
    povm: Povm
    if frame is UNBOUNDED:
        povm = ideal_projectors(j_s, direction.theta)
    else:
        povm = bounded_povm(frame, j_s, direction)
    return parity_observable(povm)


def parity_correlation(j_s: HalfInt, j_rf: FrameSize, delta_theta: float) -> float:
    """Parity-parity correlation of the generalized singlet with one party
    along z and the other tilted by delta_theta (relative-angle reduction)."""
    check_spin(j_s, "j_s")
    if j_rf is UNBOUNDED:
        a = _parity_for(j_s, UNBOUNDED, Direction(0.0))
        b = _parity_for(j_s, UNBOUNDED, Direction(delta_theta))
    else:
        a = parity_observable(bounded_povm_z(j_rf, j_s))
        b = _parity_for(j_s, j_rf, Direction(delta_theta))
    psi = generalized_singlet(j_s).amps
    return float(np.real(np.sum(psi.conj() * (a @ psi @ b.T))))
