"""Scenario files: the JSON surface of the CLI.

A scenario bundles a system, an initial and a target state, and stage
parameters.  All physical quantities carry explicit unit suffixes in
their field names.  Example:

    {
      "name": "calcium",
      "system": {
        "energies_rad_per_s": [0.0, 4.5e15],
        "einstein_a_per_s": [[0, 1, 2.2e8]],
        "dipole_cm": 2.4e-29
      },
      "initial_state": {"populations": [1.0, 0.0]},
      "target_state": {"populations": [0.25, 0.75]},
      "stage1": {"duration_s": 5.0e-8},
      "stage2": {"mode": "pulse", "field_amplitude_v_per_m": 1.0e7},
      "samples": 200,
      "seed": 7,
      "n_max": 1.0e6
    }

States accept one of: "populations" (diagonal), "pure" (amplitude list,
entries either numbers or [re, im] pairs), or "matrix_re" with optional
"matrix_im".  The system coupling comes either from "dipole_cm" (two-level
only; fills the off-diagonal with the dipole coupling in rad/s per V/m) or
from an explicit "coupling_re"/"coupling_im" matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path

import numpy as np

from .core import DensityMatrix, QSystem, density_from_pure, dipole_to_coupling
from .errors import ScenarioError

__all__ = ["Scenario", "bundled_scenario", "load_scenario", "load_system",
           "parse_state", "parse_system"]


def bundled_scenario(name: str) -> Path:
    """Path of a scenario shipped with the package (e.g. "calcium")."""
    path = Path(str(files("qsteer") / "scenarios" / f"{name}.json"))
    if not path.exists():
        raise ScenarioError(f"no bundled scenario named {name!r}")
    return path


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ScenarioError(f"{where}: missing required field {key!r}")
    return mapping[key]


def _complex_matrix(node: dict, re_key: str, im_key: str, where: str) -> np.ndarray:
    re = np.asarray(_require(node, re_key, where), dtype=float)
    m = re.astype(complex)
    if im_key in node:
        im = np.asarray(node[im_key], dtype=float)
        if im.shape != re.shape:
            raise ScenarioError(f"{where}: {im_key} shape {im.shape} does not "
                                f"match {re_key} shape {re.shape}")
        m = m + 1j * im
    return m


def parse_state(node, n: int, where: str) -> DensityMatrix:
    if not isinstance(node, dict):
        raise ScenarioError(f"{where}: expected an object")
    try:
        if "populations" in node:
            pops = np.asarray(node["populations"], dtype=float)
            if pops.size != n:
                raise ScenarioError(f"{where}.populations: expected {n} entries, "
                                    f"got {pops.size}")
            return DensityMatrix(np.diag(pops.astype(complex)))
        if "pure" in node:
            raw = node["pure"]
            amps = []
            for entry in raw:
                if isinstance(entry, (list, tuple)):
                    amps.append(complex(entry[0], entry[1]))
                else:
                    amps.append(complex(entry))
            if len(amps) != n:
                raise ScenarioError(f"{where}.pure: expected {n} amplitudes, "
                                    f"got {len(amps)}")
            return density_from_pure(np.asarray(amps))
        if "matrix_re" in node:
            m = _complex_matrix(node, "matrix_re", "matrix_im", where)
            if m.shape != (n, n):
                raise ScenarioError(f"{where}.matrix_re: expected {n} x {n}, "
                                    f"got {m.shape}")
            return DensityMatrix(m)
    except ScenarioError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc
    raise ScenarioError(f"{where}: need one of populations / pure / matrix_re")


def parse_system(node: dict, where: str = "system") -> tuple[QSystem, float | None]:
    """Build the QSystem; returns (system, dipole_cm or None)."""
    if not isinstance(node, dict):
        raise ScenarioError(f"{where}: expected an object")
    energies = np.asarray(_require(node, "energies_rad_per_s", where), dtype=float)
    n = energies.size
    a = np.zeros((n, n))
    for entry in node.get("einstein_a_per_s", []):
        try:
            i, j, value = entry
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"{where}.einstein_a_per_s: entries must be "
                                f"[lower, upper, rate], got {entry!r}") from exc
        i, j = int(i), int(j)
        if not 0 <= i < j < n:
            raise ScenarioError(f"{where}.einstein_a_per_s: need 0 <= lower < upper "
                                f"< {n}, got ({i}, {j})")
        a[i, j] = float(value)
    dipole = node.get("dipole_cm")
    if "coupling_re" in node:
        coupling = _complex_matrix(node, "coupling_re", "coupling_im", where)
        if coupling.shape != (n, n):
            raise ScenarioError(f"{where}.coupling_re: expected {n} x {n}, "
                                f"got {coupling.shape}")
    elif dipole is not None:
        if n != 2:
            raise ScenarioError(f"{where}.dipole_cm: dipole shorthand is for "
                                f"two-level systems; give coupling_re for n={n}")
        g = dipole_to_coupling(float(dipole))
        coupling = np.array([[0.0, g], [g, 0.0]], dtype=complex)
    else:
        coupling = np.zeros((n, n), dtype=complex)
    try:
        system = QSystem(energies=energies, coupling=coupling, einstein_a=a,
                         generic=bool(node.get("generic", True)))
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc
    return system, (float(dipole) if dipole is not None else None)


@dataclass(frozen=True)
class Scenario:
    name: str
    system: QSystem
    dipole_cm: float | None
    initial_state: DensityMatrix
    target_state: DensityMatrix
    stage1_a: float | None
    stage1_duration: float | None
    mode: str
    field_amplitude: float | None
    samples: int
    seed: int
    n_max: float
    threshold: float | None


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_scenario(path) -> Scenario:
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ScenarioError(f"{path}: top level must be an object")
    system, dipole = parse_system(_require(doc, "system", "scenario"))
    n = system.n
    initial = parse_state(_require(doc, "initial_state", "scenario"), n, "initial_state")
    target = parse_state(_require(doc, "target_state", "scenario"), n, "target_state")

    stage1 = doc.get("stage1", {})
    if not isinstance(stage1, dict):
        raise ScenarioError("stage1: expected an object")
    a = stage1.get("a")
    duration = stage1.get("duration_s")
    if a is None and duration is None:
        a = 6.0
    if a is not None and duration is not None:
        raise ScenarioError("stage1: give either a or duration_s, not both")

    stage2 = doc.get("stage2", {})
    if not isinstance(stage2, dict):
        raise ScenarioError("stage2: expected an object")
    mode = stage2.get("mode", "auto")
    if mode not in ("auto", "ideal", "pulse"):
        raise ScenarioError(f"stage2.mode: must be auto/ideal/pulse, got {mode!r}")
    field = stage2.get("field_amplitude_v_per_m")

    samples = int(doc.get("samples", 200))
    if samples < 2:
        raise ScenarioError(f"samples: need at least 2, got {samples}")
    seed = int(doc.get("seed", 0))
    n_max = float(doc.get("n_max", 1.0e6))
    if n_max <= 0:
        raise ScenarioError(f"n_max: must be positive, got {n_max}")
    threshold = doc.get("threshold")
    if threshold is not None and float(threshold) <= 0:
        raise ScenarioError(f"threshold: must be positive, got {threshold}")

    return Scenario(name=str(doc.get("name", "scenario")), system=system,
                    dipole_cm=dipole, initial_state=initial, target_state=target,
                    stage1_a=(float(a) if a is not None else None),
                    stage1_duration=(float(duration) if duration is not None else None),
                    mode=mode,
                    field_amplitude=(float(field) if field is not None else None),
                    samples=samples, seed=seed, n_max=n_max,
                    threshold=(float(threshold) if threshold is not None else None))


def load_system(path) -> QSystem:
    """Read a system file: either a bare system object or {"system": {...}}."""
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ScenarioError(f"{path}: top level must be an object")
    node = doc.get("system", doc)
    system, _ = parse_system(node)
    return system
