"""Dense complex linear algebra and the fundamental state/system types.

Conventions used throughout the package:

* hbar = 1: Hamiltonian entries are angular frequencies in rad/s, times are
  in seconds.  ``dipole_to_coupling`` converts an SI dipole moment to the
  corresponding coupling strength.
* Levels are indexed 0..n-1 with strictly increasing energies, so level 0
  is the ground state.
* Bloch convention for n=2: the ground state |0><0| sits at the north pole
  (z = +1).  Plotting code that wants the initial ground state at the south
  pole has to flip z itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

# SI constants, used only at the unit boundary (dipole moments, photon
# energy densities).  Everything internal is hbar = 1.
HBAR_SI = 1.0545718e-34  # J*s
C_SI = 2.99792458e8      # m/s

__all__ = [
    "HBAR_SI",
    "C_SI",
    "DensityMatrix",
    "QSystem",
    "density_from_pure",
    "spectral_decomposition",
    "hs_distance",
    "matrix_exp",
    "bloch_vector",
    "dipole_to_coupling",
    "random_pure_state",
    "random_density_matrix",
    "random_generic_system",
]


def _as_square_complex(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


class DensityMatrix:
    """A validated quantum state: Hermitian, unit trace, positive semidefinite.

    Construction checks the three defining properties and raises ValueError
    when any of them fails.  Operations that produce states numerically
    (propagation, channel application) pass slightly relaxed tolerances.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix, *, herm_tol: float = 1e-12,
                 trace_tol: float = 1e-12, psd_tol: float = 1e-10):
        m = _as_square_complex(matrix)
        herm_defect = np.abs(m - m.conj().T).max()
        if herm_defect > herm_tol:
            raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm_defect:.3e}")
        trace_defect = abs(m.trace() - 1.0)
        if trace_defect > trace_tol:
            raise ValueError(f"trace is not 1: |tr(rho) - 1| = {trace_defect:.3e}")
        # Hermitize before the eigenvalue check so eigvalsh is applicable.
        m = 0.5 * (m + m.conj().T)
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -psd_tol:
            raise ValueError(f"not positive semidefinite: min eigenvalue = {lo:.3e}")
        m.setflags(write=False)
        self.matrix = m

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)).copy()

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __repr__(self) -> str:
        return f"DensityMatrix(n={self.n}, populations={np.round(self.populations, 6)})"


def density_from_pure(psi) -> DensityMatrix:
    """Rank-1 projector |psi><psi| from a (not necessarily normalized) vector."""
    v = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("cannot build a state from the zero vector")
    v = v / norm
    return DensityMatrix(np.outer(v, v.conj()))


def spectral_decomposition(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching orthonormal eigenvectors of a state.

    Returns ``(p, phi)`` where ``phi[:, k]`` is the eigenvector for ``p[k]``
    and ``rho = phi @ diag(p) @ phi^dag``.  The output is deterministic:
    eigenvalues sort descending, ties keep eigh's ordering, and each vector
    is rephased so its largest-magnitude component is real and positive.
    """
    vals, vecs = np.linalg.eigh(rho.matrix)
    order = np.argsort(vals, kind="stable")[::-1]
    p = vals[order].real
    phi = vecs[:, order]
    for k in range(phi.shape[1]):
        col = phi[:, k]
        pivot = col[np.argmax(np.abs(col))]
        if np.abs(pivot) > 0:
            phi[:, k] = col * (pivot.conjugate() / np.abs(pivot))
    return p, phi


def hs_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Hilbert-Schmidt (Frobenius) distance ||a - b||_F."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    return float(np.linalg.norm(a.matrix - b.matrix))


def matrix_exp(matrix, scale: complex = 1.0) -> np.ndarray:
    """exp(scale * M) for a square matrix.

    Hermitian matrices go through the eigendecomposition (exact for the
    unitary propagators used here); everything else falls back to
    scipy's scaling-and-squaring Pade implementation.
    """
    m = _as_square_complex(matrix)
    scale = complex(scale)
    if np.abs(m - m.conj().T).max() <= 1e-12 * max(1.0, np.abs(m).max()):
        vals, vecs = np.linalg.eigh(m)
        return (vecs * np.exp(scale * vals)) @ vecs.conj().T
    return scipy.linalg.expm(scale * m)


def bloch_vector(rho: DensityMatrix) -> tuple[float, float, float]:
    """(x, y, z) Bloch coordinates of a two-level state; |0><0| maps to (0, 0, 1)."""
    if rho.n != 2:
        raise ValueError(f"Bloch vector requires a two-level state, got n={rho.n}")
    m = rho.matrix
    x = 2.0 * m[0, 1].real
    y = 2.0 * m[1, 0].imag
    z = (m[0, 0] - m[1, 1]).real
    return (float(x), float(y), float(z))


def dipole_to_coupling(dipole_cm: float) -> float:
    """SI dipole moment (C*m) -> coupling strength in rad/s per (V/m)."""
    return float(dipole_cm) / HBAR_SI


@dataclass(frozen=True)
class QSystem:
    """An n-level system: energies, field coupling, spontaneous-emission rates.

    Parameters
    ----------
    energies : array of n floats, rad/s
        Strictly increasing level energies (hbar = 1).
    coupling : n x n complex Hermitian array
        Interaction operator multiplying the control field u(t); units are
        rad/s per field unit (per V/m when the field is in V/m).
    einstein_a : n x n real array, 1/s
        Spontaneous-emission coefficients in the upper triangle:
        ``einstein_a[i, j]`` (i < j) is the rate constant of the j -> i
        transition.  Lower triangle and diagonal must be zero.
    generic : bool
        When True (default) the constructor verifies that all transition
        frequencies w_ij = energies[j] - energies[i] are pairwise distinct,
        which is what lets every transition be addressed independently.
    """

    energies: np.ndarray
    coupling: np.ndarray
    einstein_a: np.ndarray
    generic: bool = True

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float)
        coupling = _as_square_complex(self.coupling)
        a = np.asarray(self.einstein_a, dtype=float)
        n = energies.size
        if coupling.shape != (n, n) or a.shape != (n, n):
            raise ValueError("energies, coupling and einstein_a dimensions disagree")
        if n < 2:
            raise ValueError("need at least two levels")
        if not np.all(np.diff(energies) > 0):
            raise ValueError("energies must be strictly increasing")
        scale = max(1.0, np.abs(coupling).max())
        if np.abs(coupling - coupling.conj().T).max() > 1e-12 * scale:
            raise ValueError("coupling operator must be Hermitian")
        if np.any(a[np.tril_indices(n)] != 0.0):
            raise ValueError("einstein_a must be strictly upper triangular")
        if np.any(a < 0.0):
            raise ValueError("einstein_a entries must be nonnegative")
        if self.generic:
            freqs = sorted(energies[j] - energies[i]
                           for i in range(n) for j in range(i + 1, n))
            tol = 1e-9 * max(freqs)
            if any(b - a_ <= tol for a_, b in zip(freqs, freqs[1:])):
                raise ValueError("transition frequencies are not pairwise distinct; "
                                 "pass generic=False to build the system anyway")
        for arr in (energies, coupling, a):
            arr.setflags(write=False)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "einstein_a", a)

    @property
    def n(self) -> int:
        return self.energies.size

    def omega(self, i: int, j: int) -> float:
        """Transition frequency w_ij = energies[j] - energies[i] > 0 for i < j."""
        if not 0 <= i < j < self.n:
            raise ValueError(f"need 0 <= i < j < {self.n}, got ({i}, {j})")
        return float(self.energies[j] - self.energies[i])

    def hamiltonian(self) -> np.ndarray:
        return np.diag(self.energies.astype(complex))

    def transition_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n)]

    def all_rates_positive(self) -> bool:
        return all(self.einstein_a[i, j] > 0.0 for i, j in self.transition_pairs())


def random_pure_state(n: int, rng: np.random.Generator) -> DensityMatrix:
    """Haar-uniform random pure state of dimension n."""
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return density_from_pure(v)


def random_density_matrix(n: int, rng: np.random.Generator) -> DensityMatrix:
    """Random full-rank mixed state, Hilbert-Schmidt measure: G G^dag / tr."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = g @ g.conj().T
    return DensityMatrix(m / m.trace())


def random_generic_system(n: int, rng: np.random.Generator,
                          rate_scale: float = 1.0) -> QSystem:
    """Random generic n-level system with order-unity rates.

    Level spacings are drawn so that all transition frequencies are
    comfortably distinct, Einstein coefficients sit in
    [0.5, 2] * rate_scale, and the coupling operator has nonzero matrix
    elements on every transition.
    """
    gaps = rng.uniform(1.0, 2.0, size=n - 1)
    # Irrational-looking stretch keeps differences of sums distinct.
    gaps = gaps * (1.0 + 0.1 * np.arange(1, n))
    energies = np.concatenate([[0.0], np.cumsum(gaps)])
    a = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            a[i, j] = rng.uniform(0.5, 2.0) * rate_scale
    v = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    v = v + v.conj().T
    for i in range(n):
        for j in range(i + 1, n):
            if abs(v[i, j]) < 0.1:
                v[i, j] = 0.5 + 0.1j
                v[j, i] = 0.5 - 0.1j
    return QSystem(energies=energies, coupling=v, einstein_a=a)
