"""Shared builders for the test suite."""

import numpy as np

from qsteer import QSystem, dipole_to_coupling

# Two calcium levels: the worked example used across the suite.
CALCIUM_OMEGA = 4.5e15        # rad/s
CALCIUM_A = 2.2e8             # 1/s
CALCIUM_DIPOLE = 2.4e-29      # C*m
CALCIUM_T1 = 50e-9            # s, stage-1 hold time


def calcium_system() -> QSystem:
    g = dipole_to_coupling(CALCIUM_DIPOLE)
    return QSystem(
        energies=[0.0, CALCIUM_OMEGA],
        coupling=np.array([[0.0, g], [g, 0.0]], dtype=complex),
        einstein_a=np.array([[0.0, CALCIUM_A], [0.0, 0.0]]),
    )


def two_level_system(omega: float = 10.0, a: float = 1.0,
                     coupling: float = 1.0) -> QSystem:
    """Order-unity two-level system for fast numerics."""
    return QSystem(
        energies=[0.0, omega],
        coupling=np.array([[0.0, coupling], [coupling, 0.0]], dtype=complex),
        einstein_a=np.array([[0.0, a], [0.0, 0.0]]),
    )


def descending_spectrum(n: int, rng: np.random.Generator,
                        min_gap: float = 1e-2) -> np.ndarray:
    """Random descending probability vector with well-separated entries.

    The separation floor keeps the synthesized occupation numbers far from
    the cap, so detailed balance holds to machine precision.
    """
    while True:
        p = np.sort(rng.dirichlet(np.ones(n)))[::-1]
        if np.all(-np.diff(p) >= min_gap):
            return p


def pauli_matrices():
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
    sz = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    return sx, sy, sz
