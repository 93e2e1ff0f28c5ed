"""Trajectory CSV parsing against the exporter's column contract.

The contract, in order: ``t_s``, ``stage``, then ``re_rho_ij``/``im_rho_ij``
for every upper-triangle pair i <= j in row-major order, then ``obj_final``
and ``obj_tilde``, and for two-level systems ``bloch_x``, ``bloch_y``,
``bloch_z``.  Times must be strictly increasing and stages must be a
nondecreasing sequence of 1s and 2s.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = ["TableError", "TrajectoryTable"]


class TableError(ValueError):
    """The CSV does not follow the trajectory contract."""


def _expected_header(n: int, with_bloch: bool) -> list[str]:
    header = ["t_s", "stage"]
    for i in range(n):
        for j in range(i, n):
            header += [f"re_rho_{i}{j}", f"im_rho_{i}{j}"]
    header += ["obj_final", "obj_tilde"]
    if with_bloch:
        header += ["bloch_x", "bloch_y", "bloch_z"]
    return header


def _infer_dimension(header: list[str]) -> tuple[int, bool]:
    with_bloch = header[-3:] == ["bloch_x", "bloch_y", "bloch_z"]
    rho_cols = len(header) - 4 - (3 if with_bloch else 0)
    if rho_cols <= 0 or rho_cols % 2:
        raise TableError(f"cannot infer dimension from {len(header)} columns")
    pairs = rho_cols // 2
    n = int((np.sqrt(8 * pairs + 1) - 1) / 2)
    if n * (n + 1) // 2 != pairs:
        raise TableError(f"{pairs} state columns do not form an upper triangle")
    return n, with_bloch


@dataclass
class TrajectoryTable:
    times: np.ndarray        # seconds
    stages: np.ndarray       # 1 / 2 per row
    states: np.ndarray       # (rows, n, n) complex, Hermitian-completed
    obj_final: np.ndarray
    obj_tilde: np.ndarray
    bloch: np.ndarray | None  # (rows, 3) or None

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @classmethod
    def read(cls, path) -> "TrajectoryTable":
        try:
            with open(path, newline="", encoding="utf-8") as handle:
                rows = list(csv.reader(handle))
        except OSError as exc:
            raise TableError(f"cannot read {path}: {exc}") from exc
        if not rows:
            raise TableError(f"{path}: empty file")
        header = rows[0]
        n, with_bloch = _infer_dimension(header)
        expected = _expected_header(n, with_bloch)
        if header != expected:
            raise TableError(f"{path}: header {header[:6]}... does not match "
                             f"the trajectory contract {expected[:6]}...")
        if len(rows) < 2:
            raise TableError(f"{path}: no data rows")
        width = len(expected)
        data = []
        for k, row in enumerate(rows[1:], start=2):
            if len(row) != width:
                raise TableError(f"{path}:{k}: expected {width} fields, "
                                 f"got {len(row)}")
            try:
                data.append([float(x) for x in row])
            except ValueError as exc:
                raise TableError(f"{path}:{k}: {exc}") from exc
        table = np.asarray(data)

        times = table[:, 0]
        if np.any(np.diff(times) <= 0):
            raise TableError(f"{path}: time column is not strictly increasing")
        stages = table[:, 1].astype(int)
        if not set(np.unique(stages)) <= {1, 2}:
            raise TableError(f"{path}: stage column must contain only 1 and 2")
        if np.any(np.diff(stages) < 0):
            raise TableError(f"{path}: stage column must be nondecreasing")

        states = np.zeros((table.shape[0], n, n), dtype=complex)
        col = 2
        for i in range(n):
            for j in range(i, n):
                entry = table[:, col] + 1j * table[:, col + 1]
                states[:, i, j] = entry
                if i != j:
                    states[:, j, i] = entry.conj()
                col += 2
        obj_final = table[:, col]
        obj_tilde = table[:, col + 1]
        bloch = table[:, col + 2:col + 5] if with_bloch else None
        return cls(times=times, stages=stages, states=states,
                   obj_final=obj_final, obj_tilde=obj_tilde, bloch=bloch)
