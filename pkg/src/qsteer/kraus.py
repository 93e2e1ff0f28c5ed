"""Operator-sum (Kraus) maps: application, audits, all-to-one construction.

A map is stored as its operator list {K_i}; the superoperator matrix and
the Choi matrix are derived on demand.  The Choi matrix here is
C = sum_ij |i><j| (x) Phi(|i><j|), which is positive semidefinite exactly
when the map is completely positive, so raw matrix actions (not given in
operator-sum form) can be audited too.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .core import DensityMatrix, hs_distance, spectral_decomposition
from .dynamics import unvec, vec

__all__ = [
    "KrausMap",
    "apply_map",
    "all_to_one_map",
    "choi_matrix",
    "is_completely_positive",
    "compare_map_to_scheme",
]


class KrausMap:
    """A completely positive trace-preserving map in operator-sum form."""

    __slots__ = ("operators", "n")

    def __init__(self, operators: Sequence[np.ndarray], tp_tol: float = 1e-10):
        ops = [np.asarray(k, dtype=complex) for k in operators]
        if not ops:
            raise ValueError("need at least one operator")
        n = ops[0].shape[0]
        for k in ops:
            if k.shape != (n, n):
                raise ValueError(f"all operators must be {n} x {n}, got {k.shape}")
        total = sum(k.conj().T @ k for k in ops)
        residual = float(np.linalg.norm(total - np.eye(n)))
        if residual > tp_tol:
            raise ValueError(f"map is not trace preserving: "
                             f"||sum K^dag K - I||_F = {residual:.3e}")
        for k in ops:
            k.setflags(write=False)
        self.operators = tuple(ops)
        self.n = n

    def __len__(self) -> int:
        return len(self.operators)

    def act(self, matrix: np.ndarray) -> np.ndarray:
        """Apply the map to an arbitrary matrix (not only states)."""
        matrix = np.asarray(matrix, dtype=complex)
        out = np.zeros_like(matrix)
        for k in self.operators:
            out += k @ matrix @ k.conj().T
        return out

    def superoperator(self) -> np.ndarray:
        """Column-stacking matrix representation sum_i conj(K_i) (x) K_i."""
        out = np.zeros((self.n ** 2, self.n ** 2), dtype=complex)
        for k in self.operators:
            out += np.kron(k.conj(), k)
        return out


def apply_map(phi: KrausMap, rho: DensityMatrix) -> DensityMatrix:
    """Phi(rho) as a validated state."""
    if phi.n != rho.n:
        raise ValueError(f"dimension mismatch: map is {phi.n}, state is {rho.n}")
    m = phi.act(rho.matrix)
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m, herm_tol=1e-10, trace_tol=1e-9, psd_tol=1e-9)


def all_to_one_map(rho_f: DensityMatrix, prune: bool = False) -> KrausMap:
    """The map sending *every* state to rho_f.

    With rho_f = sum_i p_i |phi_i><phi_i| the n^2 operators are
    K_ij = sqrt(p_i) |phi_i><phi_j|.  Zero operators (p_i = 0) are kept by
    default so the double indexing stays literal; ``prune`` drops them.
    """
    p, phi = spectral_decomposition(rho_f)
    # Clip tiny negative eigenvalues allowed by the state tolerance.
    p = np.clip(p, 0.0, None)
    ops = []
    for i in range(rho_f.n):
        for j in range(rho_f.n):
            k = np.sqrt(p[i]) * np.outer(phi[:, i], phi[:, j].conj())
            if prune and p[i] == 0.0:
                continue
            ops.append(k)
    return KrausMap(ops)


MapLike = KrausMap | np.ndarray | Callable[[np.ndarray], np.ndarray]


def _action(phi: MapLike, n: int | None) -> tuple[Callable[[np.ndarray], np.ndarray], int]:
    if isinstance(phi, KrausMap):
        return phi.act, phi.n
    if isinstance(phi, np.ndarray):
        side = phi.shape[0]
        n_ = int(round(np.sqrt(side)))
        if phi.shape != (side, side) or n_ * n_ != side:
            raise ValueError(f"superoperator must be n^2 x n^2, got {phi.shape}")
        return (lambda m: unvec(phi @ vec(m), n_)), n_
    if callable(phi):
        if n is None:
            raise ValueError("dimension n is required for a callable map action")
        return phi, n
    raise TypeError(f"cannot interpret {type(phi).__name__} as a map")


def choi_matrix(phi: MapLike, n: int | None = None) -> np.ndarray:
    """Choi matrix sum_ij |i><j| (x) Phi(|i><j|), an n^2 x n^2 matrix."""
    act, n = _action(phi, n)
    c = np.zeros((n * n, n * n), dtype=complex)
    unit = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            unit[i, j] = 1.0
            c[i * n:(i + 1) * n, j * n:(j + 1) * n] = act(unit)
            unit[i, j] = 0.0
    return c


def is_completely_positive(phi: MapLike, n: int | None = None,
                           tol: float = 1e-10) -> tuple[bool, float]:
    """(verdict, smallest Choi eigenvalue).

    Operator-sum maps are CP by construction and report True; use the raw
    superoperator or callable form to audit hand-built actions (the
    transpose map is the classic failure).
    """
    c = choi_matrix(phi, n)
    c = 0.5 * (c + c.conj().T)
    lo = float(np.linalg.eigvalsh(c)[0])
    return lo >= -tol, lo


def compare_map_to_scheme(system, plan_, phi: KrausMap, trials: int, seed) -> float:
    """Worst-case distance between the executed scheme and the Kraus map.

    Runs the two-stage plan from seeded random states and compares each
    physical final state to Phi(rho); the all-to-one map built from the
    plan's target makes this the realization error of the scheme.
    """
    from .dynamics import build_dissipator
    from .engineering import _stage1_states, random_input_states
    from .coherent import apply_unitary, pulse_unitary

    if trials < 1:
        raise ValueError(f"need at least 1 trial, got {trials}")
    gen = build_dissipator(system, plan_.n_star)
    if plan_.mode == "pulse" and plan_.stage2_pulse is not None:
        u = pulse_unitary(system, plan_.stage2_pulse)
    else:
        u = plan_.stage2_unitary
    worst = 0.0
    for rho_i in random_input_states(system.n, trials, seed):
        end = _stage1_states(system, rho_i, plan_, samples=2, gen=gen)[-1][1]
        physical = apply_unitary(u, end)
        ideal = apply_map(phi, rho_i)
        worst = max(worst, hs_distance(physical, ideal))
    return worst
