"""Unitary dynamics under a classical drive and controllability tests.

The drive enters as H(t) = H0 + u(t) V with u(t) = E cos(w t + phase).
Propagation uses midpoint-sampled piecewise-constant exponentials
(second-order Magnus), which keeps every step exactly unitary.  No
rotating-wave approximation is made anywhere in the propagation; RWA
formulas appear only as initial guesses for pulse durations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import HBAR_SI, DensityMatrix, QSystem

__all__ = [
    "Pulse",
    "max_step",
    "propagate_coherent",
    "pulse_unitary",
    "scan_pulse_duration",
    "lie_algebra_rank",
    "basis_rotation_unitary",
    "apply_unitary",
    "assert_unitary",
    "pi_pulse_duration",
]

# Minimum time resolution: this many integration samples per carrier period.
SAMPLES_PER_PERIOD = 40


@dataclass(frozen=True)
class Pulse:
    """Constant-envelope cosine drive u(t) = amplitude * cos(carrier*t + phase).

    ``amplitude`` is in field units (V/m when the system coupling is in
    rad/s per V/m), ``carrier`` in rad/s, ``duration`` in seconds.
    """

    amplitude: float
    carrier: float
    duration: float
    envelope: str = "constant"
    phase: float = 0.0

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError(f"duration must be nonnegative, got {self.duration}")
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be nonnegative, got {self.amplitude}")
        if self.envelope != "constant":
            raise ValueError(f"unsupported envelope {self.envelope!r}")

    def field(self, t) -> np.ndarray:
        return self.amplitude * np.cos(self.carrier * np.asarray(t) + self.phase)


def max_step(system: QSystem, pulse: Pulse) -> float:
    """Largest step that still resolves the fastest timescale in H(t)."""
    fastest = max(pulse.carrier, float(np.abs(system.energies).max()))
    if fastest <= 0:
        return np.inf
    return 2.0 * np.pi / (SAMPLES_PER_PERIOD * fastest)


def assert_unitary(u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    defect = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if defect > tol:
        raise ValueError(f"matrix is not unitary: max |U^dag U - I| = {defect:.3e}")
    return u


def _step_unitaries_2x2(h0: np.ndarray, v: np.ndarray, drive: np.ndarray,
                        dt: float) -> np.ndarray:
    """Vectorized exact exponentials exp(-i (H0 + u_k V) dt) for n = 2."""
    h = h0[None, :, :] + drive[:, None, None] * v[None, :, :]
    a = 0.5 * (h[:, 0, 0] + h[:, 1, 1]).real
    bz = 0.5 * (h[:, 0, 0] - h[:, 1, 1]).real
    bx = h[:, 0, 1].real
    by = -h[:, 0, 1].imag
    b = np.sqrt(bx * bx + by * by + bz * bz)
    cos_b = np.cos(b * dt)
    # sinc handles b -> 0 without a branch.
    sinc_b = dt * np.sinc(b * dt / np.pi)
    phase = np.exp(-1j * a * dt)
    u = np.empty((drive.size, 2, 2), dtype=complex)
    u[:, 0, 0] = phase * (cos_b - 1j * bz * sinc_b)
    u[:, 1, 1] = phase * (cos_b + 1j * bz * sinc_b)
    u[:, 0, 1] = phase * (-1j * (bx - 1j * by) * sinc_b)
    u[:, 1, 0] = phase * (-1j * (bx + 1j * by) * sinc_b)
    return u


def _step_unitaries(system: QSystem, pulse: Pulse, n_steps: int) -> tuple[np.ndarray, float]:
    """Per-step unitaries for the midpoint integrator over the pulse duration."""
    dt = pulse.duration / n_steps
    midpoints = (np.arange(n_steps) + 0.5) * dt
    drive = pulse.field(midpoints)
    h0 = system.hamiltonian()
    v = system.coupling
    if system.n == 2:
        return _step_unitaries_2x2(h0, v, drive, dt), dt
    steps = np.empty((n_steps, system.n, system.n), dtype=complex)
    for k in range(n_steps):
        h = h0 + drive[k] * v
        vals, vecs = np.linalg.eigh(h)
        steps[k] = (vecs * np.exp(-1j * vals * dt)) @ vecs.conj().T
    return steps, dt


def _resolve_steps(pulse: Pulse, dt: float | None, bound: float,
                   multiple_of: int = 1) -> int:
    """Number of integrator steps honoring the resolution bound."""
    if dt is None:
        dt = 0.5 * bound
    elif dt > bound * (1.0 + 1e-12):
        raise ValueError(f"step dt={dt:.3e} s too coarse; carrier resolution "
                         f"requires dt <= {bound:.3e} s")
    if pulse.duration == 0.0:
        return 0
    per_block = max(1, int(np.ceil(pulse.duration / (multiple_of * dt))))
    return per_block * multiple_of


def propagate_coherent(system: QSystem, pulse: Pulse, rho0: DensityMatrix,
                       dt: float | None = None,
                       samples: int = 200) -> list[tuple[float, DensityMatrix]]:
    """Integrate rho(t) = U_t rho0 U_t^dag under the full cosine drive.

    Returns `samples` evenly spaced (t_k, state) pairs covering
    [0, pulse.duration].  ``dt`` defaults to half the carrier-resolution
    bound; passing a coarser value raises.
    """
    if rho0.n != system.n:
        raise ValueError(f"state dimension {rho0.n} does not match system n={system.n}")
    if pulse.duration == 0.0:
        return [(0.0, rho0)]
    if samples < 2:
        raise ValueError("need at least 2 samples for a finite-duration pulse")
    n_steps = _resolve_steps(pulse, dt, max_step(system, pulse), samples - 1)
    steps, step_dt = _step_unitaries(system, pulse, n_steps)
    block = n_steps // (samples - 1)
    out: list[tuple[float, DensityMatrix]] = [(0.0, rho0)]
    u = np.eye(system.n, dtype=complex)
    for k in range(n_steps):
        u = steps[k] @ u
        if (k + 1) % block == 0:
            t_k = (k + 1) * step_dt
            m = u @ rho0.matrix @ u.conj().T
            m = 0.5 * (m + m.conj().T)
            out.append((float(t_k),
                        DensityMatrix(m, herm_tol=1e-10, trace_tol=1e-9, psd_tol=1e-9)))
    return out


def pulse_unitary(system: QSystem, pulse: Pulse, dt: float | None = None,
                  samples: int = 200) -> np.ndarray:
    """Total propagator of the pulse, on the same step grid as propagate_coherent."""
    if pulse.duration == 0.0:
        return np.eye(system.n, dtype=complex)
    n_steps = _resolve_steps(pulse, dt, max_step(system, pulse), max(1, samples - 1))
    steps, _ = _step_unitaries(system, pulse, n_steps)
    u = np.eye(system.n, dtype=complex)
    for k in range(n_steps):
        u = steps[k] @ u
    return u


def scan_pulse_duration(system: QSystem, template: Pulse, rho_start: np.ndarray,
                        rho_target: np.ndarray, t_max: float,
                        dt: float | None = None) -> tuple[float, float]:
    """Best pulse duration in [0, t_max] against a target state.

    Accumulates one fine-step propagation and evaluates
    ||U_k rho_start U_k^dag - rho_target||_F at every step, returning
    (duration, error) at the minimum.  This is the no-RWA refinement of
    analytic duration guesses.
    """
    probe = Pulse(amplitude=template.amplitude, carrier=template.carrier,
                  duration=t_max, envelope=template.envelope, phase=template.phase)
    bound = max_step(system, probe)
    n_steps = _resolve_steps(probe, dt, bound)
    steps, step_dt = _step_unitaries(system, probe, n_steps)
    cumulative = np.empty_like(steps)
    u = np.eye(system.n, dtype=complex)
    for k in range(n_steps):
        u = steps[k] @ u
        cumulative[k] = u
    evolved = np.einsum("kab,bc,kdc->kad", cumulative, rho_start,
                        cumulative.conj(), optimize=True)
    errors = np.linalg.norm(evolved - rho_target[None, :, :], axis=(1, 2))
    best = int(np.argmin(errors))
    if errors[best] < np.linalg.norm(rho_start - rho_target):
        return float((best + 1) * step_dt), float(errors[best])
    return 0.0, float(np.linalg.norm(rho_start - rho_target))


def _real_coords(m: np.ndarray) -> np.ndarray:
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


def lie_algebra_rank(h0: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> int:
    """Dimension of the dynamical Lie algebra of H = H0 + u V.

    Computes the real Lie algebra generated by {iH0, iV} under
    commutation.  When the generated algebra covers the full traceless
    sector su(n), the physically inert global-phase direction is counted
    as well, so a fully controllable system reports n^2 regardless of
    operator traces; otherwise the raw dimension is reported.
    Controllable means the returned dimension equals n^2.
    """
    h0 = np.asarray(h0, dtype=complex)
    v = np.asarray(v, dtype=complex)
    n = h0.shape[0]
    for name, m in (("h0", h0), ("v", v)):
        if m.shape != (n, n):
            raise ValueError(f"{name} must be {n} x {n}, got {m.shape}")
        if np.abs(m - m.conj().T).max() > 1e-12 * max(1.0, np.abs(m).max()):
            raise ValueError(f"{name} must be Hermitian")

    basis_coords: list[np.ndarray] = []
    basis_mats: list[np.ndarray] = []

    def try_add(m: np.ndarray) -> bool:
        norm = np.linalg.norm(m)
        if norm <= 0:
            return False
        m = m / norm
        c = _real_coords(m)
        # Modified Gram-Schmidt with one reorthogonalization pass.
        for _ in range(2):
            for b in basis_coords:
                c = c - (b @ c) * b
        residual = np.linalg.norm(c)
        if residual <= tol:
            return False
        basis_coords.append(c / residual)
        basis_mats.append(m)
        return True

    generators = [1j * h0, 1j * v]
    queue = [g for g in generators if try_add(g)]
    iterations = 0
    cap = max(n ** 4, 16)
    while queue and iterations < cap:
        iterations += 1
        x = queue.pop(0)
        for g in generators:
            bracket = g @ x - x @ g
            if try_add(bracket):
                queue.append(basis_mats[-1])
    if queue:
        raise RuntimeError("commutator closure failed to terminate")

    dim = len(basis_coords)
    # Count the global-phase direction if the traceless sector is complete.
    eye = np.eye(n, dtype=complex) * 1j
    c = _real_coords(eye / np.linalg.norm(eye))
    for _ in range(2):
        for b in basis_coords:
            c = c - (b @ c) * b
    if np.linalg.norm(c) > tol:
        if dim + 1 == n * n:
            return n * n
    return dim


def basis_rotation_unitary(phi) -> np.ndarray:
    """Unitary whose columns are the given orthonormal vectors: U|k> = phi_k.

    Accepts a 2D array whose columns are the vectors, or a sequence of
    vectors.
    """
    if isinstance(phi, np.ndarray) and phi.ndim == 2:
        u = np.array(phi, dtype=complex)
    else:
        u = np.column_stack([np.asarray(p, dtype=complex).ravel() for p in phi])
    if u.shape[0] != u.shape[1]:
        raise ValueError(f"need n orthonormal n-vectors, got shape {u.shape}")
    return assert_unitary(u)


def apply_unitary(u: np.ndarray, rho: DensityMatrix) -> DensityMatrix:
    """Conjugate a state: U rho U^dag."""
    u = assert_unitary(u)
    if u.shape[0] != rho.n:
        raise ValueError(f"dimension mismatch: U is {u.shape[0]}, state is {rho.n}")
    m = u @ rho.matrix @ u.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m, herm_tol=1e-10, trace_tol=1e-9, psd_tol=1e-9)


def pi_pulse_duration(system: QSystem, field: float, dipole: float) -> float:
    """RWA pi-pulse duration pi*hbar / (dipole * field) for a two-level system.

    ``field`` in V/m, ``dipole`` in C*m.  This is the analytic initial
    guess; full-drive propagation refines it with scan_pulse_duration.
    """
    if system.n != 2:
        raise ValueError(f"pi pulse is defined for two-level systems, got n={system.n}")
    if field <= 0:
        raise ValueError(f"field must be positive, got {field}")
    if dipole <= 0:
        raise ValueError(f"dipole must be positive, got {dipole}")
    return np.pi * HBAR_SI / (dipole * field)
