"""Command-line surface.

Subcommands:

* ``engineer <scenario.json>`` - synthesize and run the two-stage plan,
  writing report.json and trajectory.csv into --out.
* ``verify <scenario.json>`` - all-to-one spread over random initial
  states plus a random initial/target steering sweep on the same system.
* ``controllability <system.json>`` - Lie-algebra dimension and verdict.
* ``kraus <target.json>`` - emit the all-to-one operator-sum map for a
  target state and audit it.

Exit codes: 0 success, 1 verification threshold failed, 2 parse error,
3 infeasible plan.  Outputs are byte-deterministic for a fixed scenario
and seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import (DensityMatrix, bloch_vector, hs_distance,
                   random_density_matrix, spectral_decomposition)
from .coherent import lie_algebra_rank
from .engineering import (DEFAULT_THRESHOLD_IDEAL, DEFAULT_THRESHOLD_PULSE,
                          PlanConfig, execute, plan, verify_all_to_one)
from .errors import InfeasiblePlanError, ScenarioError
from .kraus import all_to_one_map, apply_map, choi_matrix, is_completely_positive
from .scenario import Scenario, load_scenario, load_system, parse_state

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3


def _fmt(value: float) -> str:
    """Floating-point output format: 17 significant digits."""
    return format(float(value), ".17g")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _write_json(path: Path, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
    path.write_text(text + "\n", encoding="utf-8")


def _complex_listing(matrix: np.ndarray) -> dict:
    return {"re": np.real(matrix).tolist(), "im": np.imag(matrix).tolist()}


def _trajectory_csv(path: Path, report, n: int) -> None:
    """CSV contract: t_s, stage, upper-triangle re/im, objectives, Bloch (n=2)."""
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    header = ["t_s", "stage"]
    for i, j in pairs:
        header += [f"re_rho_{i}{j}", f"im_rho_{i}{j}"]
    header += ["obj_final", "obj_tilde"]
    if n == 2:
        header += ["bloch_x", "bloch_y", "bloch_z"]
    lines = [",".join(header)]
    for k, (t, stage) in enumerate(zip(report.times, report.stages)):
        state = report.states[k]
        row = [_fmt(t), str(int(stage))]
        for i, j in pairs:
            entry = state.matrix[i, j]
            row += [_fmt(entry.real), _fmt(entry.imag)]
        row += [_fmt(report.objective_final[k]), _fmt(report.objective_diag[k])]
        if n == 2:
            row += [_fmt(c) for c in bloch_vector(state)]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _plan_payload(plan_) -> dict:
    payload = {
        "mode": plan_.mode,
        "stage1_duration_s": plan_.stage1_time,
        "target_spectrum": plan_.spectrum.tolist(),
        "n_star": {f"{i},{j}": value
                   for (i, j), value in sorted(plan_.n_star.occupations.items())},
        "stage2_unitary": _complex_listing(plan_.stage2_unitary),
        "controllable": plan_.controllable,
    }
    if plan_.stage2_pulse is not None:
        pulse = plan_.stage2_pulse
        payload["stage2_pulse"] = {
            "amplitude_v_per_m": pulse.amplitude,
            "carrier_rad_per_s": pulse.carrier,
            "duration_s": pulse.duration,
            "phase_rad": pulse.phase,
            "envelope": pulse.envelope,
        }
        payload["pulse_error_estimate"] = plan_.pulse_error_estimate
    return payload


def _plan_from_scenario(scenario: Scenario, args) -> tuple:
    config = PlanConfig(
        a=(args.a if args.a is not None else (scenario.stage1_a or 6.0)),
        n_max=(args.nmax if args.nmax is not None else scenario.n_max),
        mode=(args.mode if args.mode is not None else scenario.mode),
        field_amplitude=scenario.field_amplitude,
    )
    plan_ = plan(scenario.system, scenario.target_state, config)
    if scenario.stage1_duration is not None and args.a is None:
        plan_ = dataclasses.replace(plan_, stage1_time=scenario.stage1_duration)
    return plan_, config


def _threshold(args, scenario: Scenario, plan_) -> float:
    if args.threshold is not None:
        return args.threshold
    if scenario.threshold is not None:
        return scenario.threshold
    return (DEFAULT_THRESHOLD_PULSE if plan_.mode == "pulse"
            else DEFAULT_THRESHOLD_IDEAL)


def cmd_engineer(args) -> int:
    scenario = load_scenario(args.scenario)
    plan_, _ = _plan_from_scenario(scenario, args)
    samples = args.samples if args.samples is not None else scenario.samples
    report = execute(scenario.system, scenario.initial_state, plan_,
                     samples=samples)
    threshold = _threshold(args, scenario, plan_)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _trajectory_csv(out / "trajectory.csv", report, scenario.system.n)
    _write_json(out / "report.json", {
        "scenario": scenario.name,
        "final_error": report.final_error,
        "threshold": threshold,
        "passed": bool(report.final_error <= threshold),
        "plan": _plan_payload(plan_),
        "samples_per_stage": samples,
        "final_state": _complex_listing(report.final_state.matrix),
    })
    print(f"{scenario.name}: final error {report.final_error:.3e} "
          f"(threshold {threshold:.1e}) -> "
          f"{'ok' if report.final_error <= threshold else 'FAIL'}")
    return EXIT_OK if report.final_error <= threshold else EXIT_THRESHOLD


def cmd_verify(args) -> int:
    scenario = load_scenario(args.scenario)
    plan_, _ = _plan_from_scenario(scenario, args)
    seed = args.seed if args.seed is not None else scenario.seed
    spread_threshold = args.threshold if args.threshold is not None else 1e-6
    report = verify_all_to_one(scenario.system, plan_, trials=args.trials,
                               seed=seed)

    # Random initial/target steering sweep on the same system, run at a
    # long stage-1 duration so only systematic errors remain.
    sweep_cases = max(2, min(args.trials, 20))
    sweep_threshold = 1e-5
    rng = np.random.default_rng(seed + 1)
    sweep_errors = []
    for _ in range(sweep_cases):
        rho_i = random_density_matrix(scenario.system.n, rng)
        rho_f = random_density_matrix(scenario.system.n, rng)
        sweep_plan = plan(scenario.system, rho_f,
                          PlanConfig(a=18.0, mode="ideal",
                                     n_max=scenario.n_max))
        result = execute(scenario.system, rho_i, sweep_plan, samples=2)
        sweep_errors.append(result.final_error)
    max_sweep = max(sweep_errors)

    passed = (report.max_pairwise_distance <= spread_threshold
              and max_sweep <= sweep_threshold)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "verify_report.json", {
        "scenario": scenario.name,
        "trials": args.trials,
        "seed": seed,
        "all_to_one_spread": report.max_pairwise_distance,
        "spread_threshold": spread_threshold,
        "steering_sweep_cases": sweep_cases,
        "steering_sweep_max_error": max_sweep,
        "steering_sweep_threshold": sweep_threshold,
        "passed": bool(passed),
    })
    print(f"all-to-one spread over {args.trials} states: "
          f"{report.max_pairwise_distance:.3e} (threshold {spread_threshold:.1e})")
    print(f"steering sweep over {sweep_cases} random pairs: max error "
          f"{max_sweep:.3e} (threshold {sweep_threshold:.1e})")
    print("verification " + ("passed" if passed else "FAILED"))
    return EXIT_OK if passed else EXIT_THRESHOLD


def cmd_controllability(args) -> int:
    system = load_system(args.system)
    dim = lie_algebra_rank(system.hamiltonian(), system.coupling)
    full = system.n ** 2
    verdict = "controllable" if dim == full else "uncontrollable"
    print(f"{dim}/{full} {verdict}")
    return EXIT_OK


def cmd_kraus(args) -> int:
    doc_path = Path(args.target)
    try:
        with open(doc_path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ScenarioError(f"cannot read {doc_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{doc_path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError(f"{doc_path}: top level must be an object")
    node = doc.get("target_state", doc)
    probe = node.get("populations") or node.get("matrix_re") or node.get("pure")
    if probe is None:
        raise ScenarioError(f"{doc_path}: need populations / pure / matrix_re")
    if "populations" in node:
        n = len(node["populations"])
    elif "pure" in node:
        n = len(node["pure"])
    else:
        n = len(node["matrix_re"])
    target = parse_state(node, n, "target_state")

    phi = all_to_one_map(target)
    total = sum(k.conj().T @ k for k in phi.operators)
    tp_residual = float(np.linalg.norm(total - np.eye(phi.n)))
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    outputs = [apply_map(phi, random_density_matrix(phi.n, rng)).matrix
               for _ in range(args.trials)]
    spread = 0.0
    for i in range(len(outputs)):
        for j in range(i + 1, len(outputs)):
            spread = max(spread, float(np.linalg.norm(outputs[i] - outputs[j])))
    target_dist = float(np.linalg.norm(outputs[0] - target.matrix))
    cp_ok, min_eig = is_completely_positive(phi)
    passed = (tp_residual <= 1e-10 and spread <= 1e-12 and cp_ok
              and target_dist <= 1e-10)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "kraus.json", {
        "dimension": phi.n,
        "operators": [_complex_listing(k) for k in phi.operators],
        "trace_preservation_residual": tp_residual,
        "constant_output_spread": spread,
        "distance_to_target": target_dist,
        "choi_min_eigenvalue": min_eig,
        "completely_positive": bool(cp_ok),
        "trials": args.trials,
        "passed": bool(passed),
    })
    print(f"all-to-one map with {len(phi)} operators: trace residual "
          f"{tp_residual:.3e}, output spread {spread:.3e}, "
          f"Choi min eigenvalue {min_eig:.3e}")
    return EXIT_OK if passed else EXIT_THRESHOLD


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsteer",
        description="Steer n-level quantum systems into arbitrary density "
                    "matrices with engineered incoherent radiation plus fast "
                    "unitary control.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--samples", type=int, default=None,
                       help="trajectory samples per stage")
        p.add_argument("--mode", choices=("ideal", "pulse"), default=None,
                       help="stage-2 mode override")
        p.add_argument("--a", type=float, default=None,
                       help="stage-1 duration in relaxation-gap units")
        p.add_argument("--nmax", type=float, default=None,
                       help="occupation-number cap")
        p.add_argument("--threshold", type=float, default=None,
                       help="pass/fail threshold override")

    p_eng = sub.add_parser("engineer", help="run the two-stage plan")
    p_eng.add_argument("scenario")
    common(p_eng)
    p_eng.set_defaults(func=cmd_engineer)

    p_ver = sub.add_parser("verify", help="all-to-one and steering sweeps")
    p_ver.add_argument("scenario")
    p_ver.add_argument("--trials", type=int, default=100)
    p_ver.add_argument("--seed", type=int, default=None)
    common(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_con = sub.add_parser("controllability", help="Lie-algebra rank verdict")
    p_con.add_argument("system")
    p_con.set_defaults(func=cmd_controllability)

    p_kraus = sub.add_parser("kraus", help="emit the all-to-one operator-sum map")
    p_kraus.add_argument("target")
    p_kraus.add_argument("--trials", type=int, default=100)
    p_kraus.add_argument("--seed", type=int, default=None)
    p_kraus.add_argument("--out", default=".")
    p_kraus.set_defaults(func=cmd_kraus)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasiblePlanError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
