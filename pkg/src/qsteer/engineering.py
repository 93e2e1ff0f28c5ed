"""The two-stage steering scheme.

Stage 1 holds the system in engineered incoherent radiation whose
occupation numbers are chosen by detailed balance so that the populations
relax to the target spectrum, diagonal in the energy basis.  Stage 2 is a
fast unitary rotation of that diagonal state into the target eigenbasis,
either as an ideal unitary or (for two-level systems) as a resonant
pi-style pulse simulated with the full cosine drive.

Because stage 1 contracts every initial state onto the same fixed point,
one plan steers *all* initial states to the target; ``verify_all_to_one``
measures the residual spread.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .coherent import (Pulse, apply_unitary, basis_rotation_unitary,
                       lie_algebra_rank, propagate_coherent, pulse_unitary,
                       scan_pulse_duration)
from .core import (DensityMatrix, QSystem, hs_distance, random_density_matrix,
                   random_pure_state, spectral_decomposition)
from .dynamics import (DEFAULT_N_MAX, Liouvillian, SpectralDensity,
                       build_dissipator, propagate)
from .errors import InfeasiblePlanError, UncontrollableSystemError, ZeroGapError

__all__ = [
    "PlanConfig",
    "EngineeringPlan",
    "EngineeringReport",
    "AllToOneReport",
    "synthesize_spectral_density",
    "stage1_duration",
    "plan",
    "execute",
    "verify_all_to_one",
    "random_input_states",
]

# Residual thresholds used as CLI pass/fail defaults.
DEFAULT_THRESHOLD_IDEAL = 1e-6
DEFAULT_THRESHOLD_PULSE = 1e-3


def synthesize_spectral_density(p, n_max: float = DEFAULT_N_MAX) -> SpectralDensity:
    """Occupation numbers whose fixed point has populations p.

    ``p`` must be descending and sum to 1; p[i] is the target population of
    energy level i.  Detailed balance fixes n(i, j) = p_j / (p_i - p_j).
    Tied nonzero populations formally need infinite occupation and are
    capped at ``n_max``; tied zeros get 0.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("spectrum entries must be nonnegative")
    if np.any(np.diff(p) > 0):
        raise ValueError("spectrum must be sorted descending (largest population "
                         "on the lowest level)")
    if abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(f"spectrum must sum to 1, got {p.sum()!r}")
    n = p.size
    occupations = {}
    for i in range(n):
        for j in range(i + 1, n):
            gap = p[i] - p[j]
            if gap > 0.0:
                occupations[(i, j)] = min(p[j] / gap, n_max)
            elif p[j] > 0.0:
                occupations[(i, j)] = n_max
            else:
                occupations[(i, j)] = 0.0
    return SpectralDensity(n, occupations, n_max=n_max)


def stage1_duration(system: QSystem, density: SpectralDensity, a: float) -> float:
    """Relaxation time a / lambda_gap from the generator's spectral gap.

    lambda_gap is the smallest nonzero decay rate of the dissipative
    generator, so the slowest mode is damped by e^{-a} after the returned
    duration.
    """
    if a < 1:
        raise ValueError(f"stage-1 multiplier must be >= 1, got {a}")
    gen = build_dissipator(system, density)
    rates = gen.decay_rates()
    scale = max(rates.max(), 0.0)
    if scale <= 0.0:
        raise ZeroGapError("generator has no decaying mode")
    nonzero = rates[rates > 1e-12 * scale]
    if nonzero.size == 0:
        raise ZeroGapError("generator has no spectral gap")
    return float(a / nonzero.min())


@dataclass(frozen=True)
class PlanConfig:
    """Knobs for plan synthesis.

    mode "auto" picks "pulse" for two-level systems when a field amplitude
    is available and "ideal" otherwise.
    """

    a: float = 6.0
    n_max: float = DEFAULT_N_MAX
    mode: str = "auto"
    field_amplitude: float | None = None
    check_controllability: bool = True
    split_stage1: bool = False

    def __post_init__(self):
        if self.mode not in ("auto", "ideal", "pulse"):
            raise ValueError(f"mode must be auto/ideal/pulse, got {self.mode!r}")


@dataclass(frozen=True)
class EngineeringPlan:
    """Everything needed to run the two stages against one target state."""

    target: DensityMatrix
    spectrum: np.ndarray                 # descending eigenvalues of the target
    basis: np.ndarray                    # matching eigenvectors (columns)
    n_star: SpectralDensity
    stage1_time: float
    stage2_unitary: np.ndarray
    stage2_pulse: Pulse | None
    mode: str                            # "ideal" or "pulse"
    controllable: bool | None            # None when the check was skipped
    pulse_error_estimate: float | None = None
    pre_mix: SpectralDensity | None = None
    pre_mix_time: float = 0.0

    @property
    def diagonal_target(self) -> DensityMatrix:
        """The stage-1 fixed point: target spectrum on the energy levels."""
        return DensityMatrix(np.diag(self.spectrum.astype(complex)))


def plan(system: QSystem, rho_f: DensityMatrix,
         config: PlanConfig = PlanConfig()) -> EngineeringPlan:
    """Synthesize the two-stage plan steering every state into rho_f."""
    if rho_f.n != system.n:
        raise ValueError(f"target dimension {rho_f.n} does not match system n={system.n}")
    p, phi = spectral_decomposition(rho_f)
    n_star = synthesize_spectral_density(p, n_max=config.n_max)
    t1 = stage1_duration(system, n_star, config.a)
    u = basis_rotation_unitary(phi)

    mode = config.mode
    if mode == "auto":
        mode = "pulse" if (system.n == 2 and config.field_amplitude) else "ideal"

    controllable = None
    if config.check_controllability:
        rank = lie_algebra_rank(system.hamiltonian(), system.coupling)
        controllable = rank == system.n ** 2
        if mode == "pulse" and not controllable:
            raise UncontrollableSystemError(
                f"Lie algebra dimension {rank} < {system.n ** 2}; "
                "pulse-level stage 2 is not available")

    pulse = None
    pulse_err = None
    if mode == "pulse":
        if system.n != 2:
            raise InfeasiblePlanError("pulse-level stage 2 exists only for n = 2")
        if not config.field_amplitude or config.field_amplitude <= 0:
            raise InfeasiblePlanError("pulse mode needs a positive field amplitude")
        coupling = abs(system.coupling[0, 1])
        if coupling <= 0:
            raise InfeasiblePlanError("pulse mode needs a nonzero (0, 1) coupling")
        rabi = config.field_amplitude * coupling
        t_pi = np.pi / rabi
        template = Pulse(amplitude=config.field_amplitude,
                         carrier=system.omega(0, 1), duration=t_pi)
        duration, pulse_err = scan_pulse_duration(
            system, template, np.diag(p.astype(complex)), rho_f.matrix,
            t_max=1.25 * t_pi)
        pulse = replace(template, duration=duration)

    pre_mix = None
    pre_time = 0.0
    if config.split_stage1:
        pre_mix = SpectralDensity.uniform(system.n, 1.0)
        pre_time = stage1_duration(system, pre_mix, config.a)

    return EngineeringPlan(target=rho_f, spectrum=p, basis=phi, n_star=n_star,
                           stage1_time=t1, stage2_unitary=u, stage2_pulse=pulse,
                           mode=mode, controllable=controllable,
                           pulse_error_estimate=pulse_err,
                           pre_mix=pre_mix, pre_mix_time=pre_time)


@dataclass
class EngineeringReport:
    """Trajectory and objective series of one executed plan."""

    times: np.ndarray                    # seconds, strictly increasing
    stages: np.ndarray                   # 1 or 2 per sample
    states: list[DensityMatrix]
    objective_final: np.ndarray          # ||rho_t - rho_f||_F
    objective_diag: np.ndarray           # ||rho_t - diag-target||_F
    final_state: DensityMatrix = field(init=False)
    final_error: float = field(init=False)

    def __post_init__(self):
        self.final_state = self.states[-1]
        self.final_error = float(self.objective_final[-1])


def _stage1_states(system: QSystem, rho_i: DensityMatrix, plan_: EngineeringPlan,
                   samples: int, gen: Liouvillian | None = None):
    """(time, state) samples of stage 1, including the optional pre-mix part."""
    out: list[tuple[float, DensityMatrix]] = []
    offset = 0.0
    state = rho_i
    if plan_.pre_mix is not None and plan_.pre_mix_time > 0.0:
        pre_gen = build_dissipator(system, plan_.pre_mix)
        for t, rho in propagate(pre_gen, state, plan_.pre_mix_time, samples):
            out.append((t, rho))
        offset = plan_.pre_mix_time
        state = out[-1][1]
    if gen is None:
        gen = build_dissipator(system, plan_.n_star)
    segment = propagate(gen, state, plan_.stage1_time, samples)
    start = 1 if out else 0
    for t, rho in segment[start:]:
        out.append((offset + t, rho))
    return out


def execute(system: QSystem, rho_i: DensityMatrix, plan_: EngineeringPlan,
            mode: str | None = None, samples: int = 200,
            _gen: Liouvillian | None = None) -> EngineeringReport:
    """Run both stages from rho_i and record the objective series.

    ``mode`` overrides the plan's mode ("ideal" falls back to the exact
    stage-2 unitary even for pulse plans).  Stage 2 runs with the
    dissipator switched off; in ideal mode it is instantaneous and is
    recorded as a single sample at the next representable time after
    stage 1 ends.
    """
    if rho_i.n != system.n:
        raise ValueError(f"initial state dimension {rho_i.n} != system n={system.n}")
    mode = mode or plan_.mode
    if mode not in ("ideal", "pulse"):
        raise ValueError(f"mode must be ideal or pulse, got {mode!r}")
    if mode == "pulse" and plan_.stage2_pulse is None:
        raise InfeasiblePlanError("plan carries no pulse; re-plan in pulse mode")

    samples_1 = _stage1_states(system, rho_i, plan_, samples, gen=_gen)
    times = [t for t, _ in samples_1]
    states = [rho for _, rho in samples_1]
    stages = [1] * len(states)
    t1_end = times[-1]

    if mode == "ideal":
        times.append(float(np.nextafter(t1_end, np.inf)))
        states.append(apply_unitary(plan_.stage2_unitary, states[-1]))
        stages.append(2)
    else:
        pulse_samples = propagate_coherent(system, plan_.stage2_pulse,
                                           states[-1], samples=samples)
        for t, rho in pulse_samples[1:]:
            times.append(t1_end + t)
            states.append(rho)
            stages.append(2)

    rho_f = plan_.target.matrix
    rho_diag = plan_.diagonal_target.matrix
    obj_final = np.array([np.linalg.norm(s.matrix - rho_f) for s in states])
    obj_diag = np.array([np.linalg.norm(s.matrix - rho_diag) for s in states])
    return EngineeringReport(times=np.asarray(times), stages=np.asarray(stages),
                             states=states, objective_final=obj_final,
                             objective_diag=obj_diag)


def random_input_states(n: int, trials: int, seed) -> list[DensityMatrix]:
    """Deterministic mix of random pure and random mixed initial states."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(trials):
        if k % 2 == 0:
            out.append(random_pure_state(n, rng))
        else:
            out.append(random_density_matrix(n, rng))
    return out


@dataclass
class AllToOneReport:
    max_pairwise_distance: float
    final_states: list[DensityMatrix]
    trials: int
    seed: object


def verify_all_to_one(system: QSystem, plan_: EngineeringPlan, trials: int,
                      seed, mode: str | None = None) -> AllToOneReport:
    """Spread of final states over seeded random initial states.

    Executes the plan (stage-1 relaxation plus the actual stage-2 unitary,
    which for pulse plans is the accumulated full-drive propagator) from
    ``trials`` initial states, half pure and half mixed, and reports the
    maximum pairwise Frobenius distance.
    """
    if trials < 2:
        raise ValueError(f"need at least 2 trials, got {trials}")
    mode = mode or plan_.mode
    gen = build_dissipator(system, plan_.n_star)
    if mode == "pulse":
        if plan_.stage2_pulse is None:
            raise InfeasiblePlanError("plan carries no pulse; re-plan in pulse mode")
        u = pulse_unitary(system, plan_.stage2_pulse)
    else:
        u = plan_.stage2_unitary
    finals: list[DensityMatrix] = []
    for rho_i in random_input_states(system.n, trials, seed):
        end = _stage1_states(system, rho_i, plan_, samples=2, gen=gen)[-1][1]
        finals.append(apply_unitary(u, end))
    spread = 0.0
    mats = [s.matrix for s in finals]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            spread = max(spread, float(np.linalg.norm(mats[i] - mats[j])))
    return AllToOneReport(max_pairwise_distance=spread, final_states=finals,
                          trials=trials, seed=seed)
