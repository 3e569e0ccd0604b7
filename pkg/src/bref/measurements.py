"""Measurement constructors: relational POVMs built from a spin coherent
frame state, ideal projective measurements, and parity observables.

A relational measurement projects system + frame onto total-spin subspaces
and reads total spin j_frame + m as system projection m along the frame axis.
With the frame pointing along z only the top frame weight contributes and the
POVM is diagonal; for a general axis the elements are assembled from the
coherent-state amplitudes and a band of Clebsch-Gordan coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .angular import CgArgs, HalfInt, cg_family, check_spin, clebsch_gordan, wigner_small_d_matrix
from .states import Direction, coherent_amplitudes

__all__ = [
    "Povm",
    "bounded_povm_z",
    "bounded_povm",
    "ideal_projectors",
    "parity_observable",
    "completeness_defect",
    "min_outcome_eigenvalue",
]


@dataclass(frozen=True)
class Povm:
    """Ordered positive operators labeled by the outcome m, summing to identity.

    Operators act on the system space with basis m = j_s..-j_s.  A frame of
    spin j_rf yields 2*min(j_rf, j_s)+1 outcomes: total spin runs over
    |j_rf-j_s| .. j_rf+j_s and the label is m = j_total - j_rf.
    """

    j_s: HalfInt
    outcomes: tuple[tuple[HalfInt, np.ndarray], ...]

    @property
    def dim(self) -> int:
        return self.j_s.twice + 1


def _outcome_range(tjrf: int, tjs: int) -> list[int]:
    """Twice the total spins, descending from tjrf+tjs to |tjrf-tjs|."""
    return list(range(tjrf + tjs, abs(tjrf - tjs) - 2, -2))


def bounded_povm_z(j_rf: HalfInt, j_s: HalfInt) -> Povm:
    """Relational POVM for a frame coherent state aligned with z (diagonal)."""
    check_spin(j_rf, "j_rf")
    check_spin(j_s, "j_s")
    tjrf, tjs = j_rf.twice, j_s.twice
    dim = tjs + 1
    outcomes = []
    for tj in _outcome_range(tjrf, tjs):
        diag = np.zeros(dim)
        for a in range(dim):
            tms = tjs - 2 * a
            c = clebsch_gordan(CgArgs(
                j1=HalfInt(tjrf), m1=HalfInt(tjrf),
                j2=HalfInt(tjs), m2=HalfInt(tms),
                j=HalfInt(tj), m=HalfInt(tjrf + tms),
            ))
            diag[a] = c * c
        outcomes.append((HalfInt(tj - tjrf), np.diag(diag).astype(complex)))
    return Povm(j_s=j_s, outcomes=tuple(outcomes))


@lru_cache(maxsize=None)
def _cg_band(tjrf: int, tjs: int, tj: int) -> np.ndarray:
    """Coupling band G[iM, a] = <j, M | j_rf, M-m_s; j_s, m_s> with
    M = j..-j over rows and m_s = j_s..-j_s over columns (0 outside range)."""
    nm = tj + 1
    dim = tjs + 1
    g = np.zeros((nm, dim))
    for im in range(nm):
        tm_tot = tj - 2 * im
        tlo, vals = cg_family(tjrf, tjs, tj, tm_tot)
        for a in range(dim):
            tmu = tm_tot - (tjs - 2 * a)
            idx = (tmu - tlo) // 2
            if abs(tmu) <= tjrf and 0 <= idx < vals.size:
                g[im, a] = vals[idx]
    g.setflags(write=False)
    return g


def bounded_povm(j_rf: HalfInt, j_s: HalfInt, direction: Direction) -> Povm:
    """Relational POVM for a frame coherent state along an arbitrary axis.

    Built from the coherent-state amplitudes c_mu:
    [P_m]_{ab} = sum_M conj(c_{M-m_a}) c_{M-m_b} G(M, m_a) G(M, m_b),
    assembled as U^dagger U with U[M, a] = c_{M-m_a} G(M, a), which makes
    every element positive semidefinite by construction.  At direction (0, 0)
    only mu = j_rf survives and this reduces exactly to bounded_povm_z.
    """
    check_spin(j_rf, "j_rf")
    check_spin(j_s, "j_s")
    tjrf, tjs = j_rf.twice, j_s.twice
    dim = tjs + 1
    amps = coherent_amplitudes(j_rf, direction)   # amps[i] belongs to mu = j_rf - i
    outcomes = []
    for tj in _outcome_range(tjrf, tjs):
        g = _cg_band(tjrf, tjs, tj)
        tm_tot = tj - 2 * np.arange(tj + 1)
        u = np.zeros((tj + 1, dim), dtype=complex)
        for a in range(dim):
            tmu = tm_tot - (tjs - 2 * a)
            ok = np.abs(tmu) <= tjrf
            u[ok, a] = amps[(tjrf - tmu[ok]) // 2]
        u *= g
        outcomes.append((HalfInt(tj - tjrf), u.conj().T @ u))
    return Povm(j_s=j_s, outcomes=tuple(outcomes))


def ideal_projectors(j_s: HalfInt, delta_theta: float) -> Povm:
    """Rank-one projective measurement of the spin component along the axis
    tilted by delta_theta from z (in the phi = 0 plane)."""
    check_spin(j_s, "j_s")
    tjs = j_s.twice
    rot = wigner_small_d_matrix(j_s, delta_theta)
    outcomes = []
    for idx in range(tjs + 1):
        col = rot[:, idx]
        outcomes.append((HalfInt(tjs - 2 * idx), np.outer(col, col).astype(complex)))
    return Povm(j_s=j_s, outcomes=tuple(outcomes))


def parity_observable(povm: Povm) -> np.ndarray:
    """Dichotomic observable sum_m (-1)^(j_s - m) P_m."""
    tjs = povm.j_s.twice
    out = np.zeros((povm.dim, povm.dim), dtype=complex)
    for m, op in povm.outcomes:
        sign = -1.0 if ((tjs - m.twice) // 2) % 2 else 1.0
        out += sign * op
    return out


def completeness_defect(povm: Povm) -> float:
    """Max-norm distance of sum_m P_m from the identity."""
    total = sum(op for _, op in povm.outcomes)
    return float(np.max(np.abs(total - np.eye(povm.dim))))


def min_outcome_eigenvalue(povm: Povm) -> float:
    """Smallest eigenvalue over all outcome operators (PSD check)."""
    return min(
        float(np.min(np.linalg.eigvalsh((op + op.conj().T) / 2.0)))
        for _, op in povm.outcomes
    )
