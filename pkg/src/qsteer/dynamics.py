"""Master equation for an n-level system in incoherent radiation.

The environment is characterized by the photon occupation number at each
transition frequency.  For occupation n_ij on the (i, j) transition
(i < j, frequency w_ij = e_j - e_i) the dissipator is

    L(rho) = sum_{i<j} A_ij [ (n_ij + 1) D[Q_ij](rho) + n_ij D[Q_ji](rho) ]

with Q_ij = |i><j| and D[Q](rho) = 2 Q rho Q^dag - Q^dag Q rho - rho Q^dag Q.

Expanding the diagonal sector gives classical population rates

    j -> i (emission):   2 A_ij (n_ij + 1)
    i -> j (absorption): 2 A_ij n_ij

and every off-diagonal element (l, m) decays independently at

    Gamma_lm = w_out(l) + w_out(m),

where w_out(k) is half the total population escape rate of level k.  All
rates here come from that expansion; shorthand conventions that fold the
factor 2 elsewhere differ from these by a uniform factor.

Superoperators act on column-stacked density matrices:
vec(A rho B) = (B^T kron A) vec(rho), with vec in Fortran order.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .core import C_SI, HBAR_SI, DensityMatrix, QSystem
from .errors import NonUniqueSteadyStateError

__all__ = [
    "SpectralDensity",
    "Liouvillian",
    "vec",
    "unvec",
    "build_dissipator",
    "pauli_generator",
    "coherence_decay_rates",
    "propagate",
    "stationary_state",
    "energy_density",
]

DEFAULT_N_MAX = 1.0e6


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector (Fortran order)."""
    return np.asarray(matrix, dtype=complex).reshape(-1, order="F")


def unvec(vector: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    return np.asarray(vector, dtype=complex).reshape((n, n), order="F")


class SpectralDensity:
    """Photon occupation numbers per transition: the incoherent control.

    ``occupations`` maps each ordered level pair (i, j) with i < j to the
    mean photon number at the transition frequency w_ij.  Every pair of an
    n-level system must be present.
    """

    __slots__ = ("n", "occupations")

    def __init__(self, n: int, occupations: dict[tuple[int, int], float],
                 n_max: float = DEFAULT_N_MAX):
        expected = {(i, j) for i in range(n) for j in range(i + 1, n)}
        if set(occupations) != expected:
            missing = expected - set(occupations)
            extra = set(occupations) - expected
            raise ValueError(f"occupation keys must be exactly the i<j pairs; "
                             f"missing={sorted(missing)}, unexpected={sorted(extra)}")
        occ = {}
        for pair, value in occupations.items():
            value = float(value)
            if not 0.0 <= value <= n_max:
                raise ValueError(f"occupation n{pair} = {value!r} outside [0, {n_max:g}]")
            occ[pair] = value
        self.n = n
        self.occupations = occ

    @classmethod
    def vacuum(cls, n: int) -> "SpectralDensity":
        return cls.uniform(n, 0.0)

    @classmethod
    def uniform(cls, n: int, value: float, n_max: float = DEFAULT_N_MAX) -> "SpectralDensity":
        pairs = {(i, j): value for i in range(n) for j in range(i + 1, n)}
        return cls(n, pairs, n_max=n_max)

    def __getitem__(self, pair: tuple[int, int]) -> float:
        return self.occupations[pair]

    def __repr__(self) -> str:
        items = ", ".join(f"n{p}={v:g}" for p, v in sorted(self.occupations.items()))
        return f"SpectralDensity({items})"


class Liouvillian:
    """Vectorized generator of the open-system evolution (units 1/s).

    The generator acts on column-stacked density matrices.  Construction
    checks trace preservation: vec(identity) must be a left null vector,
    relative to the generator's magnitude.
    """

    __slots__ = ("generator", "n", "_eig")

    def __init__(self, generator: np.ndarray, n: int):
        g = np.asarray(generator, dtype=complex)
        if g.shape != (n * n, n * n):
            raise ValueError(f"generator must be {n * n} x {n * n}, got {g.shape}")
        scale = max(np.abs(g).max(), 1e-300)
        residual = np.abs(vec(np.eye(n)) @ g).max()
        if residual > 1e-10 * scale:
            raise ValueError(f"generator does not preserve the trace: "
                             f"residual {residual:.3e} at scale {scale:.3e}")
        g.setflags(write=False)
        self.generator = g
        self.n = n
        self._eig = None

    def eig(self):
        """Cached eigendecomposition (vals, vecs, inverse-vecs) or None.

        Returns None when the generator is too ill-conditioned to
        diagonalize reliably; callers then fall back to expm stepping.
        """
        if self._eig is None:
            g = self.generator
            vals, vecs = np.linalg.eig(g)
            try:
                inv = np.linalg.inv(vecs)
            except np.linalg.LinAlgError:
                self._eig = (None,)
                return None
            scale = max(np.abs(g).max(), 1e-300)
            residual = np.abs((vecs * vals) @ inv - g).max()
            if residual > 1e-9 * scale:
                self._eig = (None,)
            else:
                self._eig = (vals, vecs, inv)
        if len(self._eig) == 1:
            return None
        return self._eig

    def decay_rates(self) -> np.ndarray:
        """Sorted nonnegative decay rates -Re(lambda) of all eigenvalues."""
        g = self.generator
        vals = np.linalg.eigvals(g)
        return np.sort(-vals.real)


def _transition_terms(system: QSystem, density: SpectralDensity):
    """Yield (Q, weight) Lindblad terms of the radiation dissipator."""
    n = system.n
    for i, j in system.transition_pairs():
        a = system.einstein_a[i, j]
        if a == 0.0:
            continue
        occ = density[(i, j)]
        q_down = np.zeros((n, n), dtype=complex)
        q_down[i, j] = 1.0
        yield q_down, a * (occ + 1.0)
        if occ > 0.0:
            yield q_down.conj().T.copy(), a * occ


def build_dissipator(system: QSystem, density: SpectralDensity,
                     h_eff: np.ndarray | None = None) -> Liouvillian:
    """Full generator: -i[H0 + H_eff, .] plus the radiation dissipator.

    ``h_eff`` is an optional diagonal level-shift Hamiltonian (rad/s); it
    changes coherence phases only, never the fixed points.
    """
    n = system.n
    if density.n != n:
        raise ValueError(f"spectral density is for n={density.n}, system has n={n}")
    if not system.generic:
        raise ValueError("the radiation dissipator requires a generic system "
                         "(pairwise distinct transition frequencies)")
    h = system.hamiltonian()
    if h_eff is not None:
        h_eff = np.asarray(h_eff, dtype=complex)
        if h_eff.shape != (n, n):
            raise ValueError(f"h_eff must be {n} x {n}")
        if np.abs(h_eff - np.diag(np.diag(h_eff))).max() > 0:
            raise ValueError("h_eff must be diagonal")
        h = h + h_eff
    eye = np.eye(n, dtype=complex)
    gen = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for q, weight in _transition_terms(system, density):
        qdq = q.conj().T @ q
        gen += weight * (2.0 * np.kron(q.conj(), q)
                         - np.kron(eye, qdq) - np.kron(qdq.T, eye))
    return Liouvillian(gen, n)


def pauli_generator(system: QSystem, density: SpectralDensity) -> np.ndarray:
    """Classical rate matrix R for the populations, dp/dt = R p.

    ``R[i, j]`` (i != j) is the j -> i transfer rate; each column sums to
    zero.  Rates follow the dissipator expansion: 2 A (n+1) down, 2 A n up.
    """
    n = system.n
    if density.n != n:
        raise ValueError(f"spectral density is for n={density.n}, system has n={n}")
    rates = np.zeros((n, n))
    for i, j in system.transition_pairs():
        a = system.einstein_a[i, j]
        occ = density[(i, j)]
        rates[i, j] += 2.0 * a * (occ + 1.0)  # emission j -> i
        rates[j, i] += 2.0 * a * occ          # absorption i -> j
    np.fill_diagonal(rates, 0.0)
    rates -= np.diag(rates.sum(axis=0))
    return rates


def coherence_decay_rates(system: QSystem, density: SpectralDensity) -> np.ndarray:
    """Decay rate Gamma_lm of each off-diagonal element (zero diagonal)."""
    n = system.n
    if density.n != n:
        raise ValueError(f"spectral density is for n={density.n}, system has n={n}")
    w_out = np.zeros(n)
    for i, j in system.transition_pairs():
        a = system.einstein_a[i, j]
        occ = density[(i, j)]
        w_out[j] += a * (occ + 1.0)
        w_out[i] += a * occ
    gamma = w_out[:, None] + w_out[None, :]
    np.fill_diagonal(gamma, 0.0)
    return gamma


def _state_from_vector(v: np.ndarray, n: int) -> DensityMatrix:
    m = unvec(v, n)
    m = 0.5 * (m + m.conj().T)
    trace = m.trace().real
    if abs(trace - 1.0) > 1e-9:
        raise ValueError(f"propagation lost trace: tr = {trace!r}")
    return DensityMatrix(m / trace, herm_tol=1e-10, trace_tol=1e-9, psd_tol=1e-9)


def propagate(gen: Liouvillian, rho0: DensityMatrix, t: float,
              samples: int = 200) -> list[tuple[float, DensityMatrix]]:
    """Evolve rho0 for time t, returning `samples` evenly spaced (t_k, state).

    The generator is constant, so the propagator is an exact matrix
    exponential: eigendecomposition when available, scaling-and-squaring
    steps otherwise.  t = 0 returns the single sample [(0, rho0)].
    """
    if t < 0:
        raise ValueError(f"propagation time must be nonnegative, got {t}")
    if t == 0.0:
        return [(0.0, rho0)]
    if samples < 2:
        raise ValueError("need at least 2 samples for t > 0")
    n = gen.n
    if rho0.n != n:
        raise ValueError(f"state dimension {rho0.n} does not match generator n={n}")
    times = np.linspace(0.0, t, samples)
    v0 = vec(rho0.matrix)
    out: list[tuple[float, DensityMatrix]] = [(0.0, rho0)]
    decomposition = gen.eig()
    if decomposition is not None:
        vals, vecs, inv = decomposition
        coeffs = inv @ v0
        for t_k in times[1:]:
            v = vecs @ (np.exp(vals * t_k) * coeffs)
            out.append((float(t_k), _state_from_vector(v, n)))
    else:
        step = scipy.linalg.expm(gen.generator * (times[1] - times[0]))
        v = v0
        for t_k in times[1:]:
            v = step @ v
            out.append((float(t_k), _state_from_vector(v, n)))
    return out


def stationary_state(gen: Liouvillian) -> DensityMatrix:
    """Unique fixed point of the generator.

    Uses the eigenvector of the (numerically) zero eigenvalue; raises
    NonUniqueSteadyStateError when the kernel is not one-dimensional.
    The stationarity residual is checked relative to the generator scale.
    """
    g = gen.generator
    n = gen.n
    scale = max(np.abs(g).max(), 1e-300)
    vals, vecs = np.linalg.eig(g)
    null_tol = 1e-10 * scale
    kernel = np.where(np.abs(vals) <= null_tol)[0]
    if kernel.size == 0:
        raise NonUniqueSteadyStateError("generator has no numerical null vector")
    if kernel.size > 1:
        raise NonUniqueSteadyStateError(
            f"generator kernel has dimension {kernel.size}; steady state not unique")
    v = vecs[:, kernel[0]]
    m = unvec(v, n)
    m = 0.5 * (m + m.conj().T)
    trace = m.trace().real
    if abs(trace) < 1e-12:
        raise NonUniqueSteadyStateError("null vector is traceless; no steady state")
    m = m / trace
    residual = np.abs(g @ vec(m)).max()
    if residual > 1e-10 * scale:
        raise NonUniqueSteadyStateError(
            f"candidate steady state has residual {residual:.3e} at scale {scale:.3e}")
    return DensityMatrix(m, herm_tol=1e-10, trace_tol=1e-9, psd_tol=1e-9)


def energy_density(omega: float, n_omega: float) -> float:
    """Radiative energy density per unit angular frequency, J*s/m^3.

    rho_w = hbar * w * n_w * w^2 / (pi^2 c^3), SI constants.
    """
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if n_omega < 0:
        raise ValueError(f"occupation must be nonnegative, got {n_omega}")
    return HBAR_SI * omega * n_omega * omega ** 2 / (np.pi ** 2 * C_SI ** 3)
