"""Figure rendering from trajectory tables.

Two products: the objective-vs-time panel pair (relaxation stage on a
nanosecond axis, rotation stage on a femtosecond axis) and the 3-D Bloch
trajectory.  Bloch plots flip the z axis so the ground state renders at the
south pole, matching the usual picture of a two-level atom starting in its
ground state at the bottom of the sphere.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .table import TableError, TrajectoryTable  # noqa: E402

__all__ = ["plot_objective", "plot_bloch"]

DPI = 200
# Fixed metadata keeps PNG output byte-deterministic.
_PNG_METADATA = {"Software": "figkit"}

STAGE1_COLOR = "tab:blue"
STAGE2_COLOR = "tab:green"
TARGET_COLOR = "tab:red"


def _split_stages(table: TrajectoryTable):
    first = np.searchsorted(table.stages, 2)
    return slice(0, first), slice(max(first - 1, 0), len(table.stages))


def plot_objective(csv_path, out_path) -> str:
    """Objective distances vs time, one panel per stage; returns out_path."""
    table = TrajectoryTable.read(csv_path)
    s1, s2 = _split_stages(table)
    has_stage2 = table.stages[-1] == 2

    n_panels = 2 if has_stage2 else 1
    fig, axes = plt.subplots(1, n_panels, figsize=(7.2, 3.2), sharey=True,
                             constrained_layout=True)
    axes = np.atleast_1d(axes)

    ax1 = axes[0]
    ax1.plot(table.times[s1] * 1e9, table.obj_final[s1], "-",
             color=STAGE1_COLOR, label=r"$\|\rho_t-\rho_{\mathrm{f}}\|$")
    ax1.plot(table.times[s1] * 1e9, table.obj_tilde[s1], ":",
             color=STAGE1_COLOR, label=r"$\|\rho_t-\tilde\rho_{\mathrm{f}}\|$")
    ax1.set_xlabel("t (ns)  [stage 1]")
    ax1.set_ylabel("objective")
    ax1.legend(loc="upper right", fontsize=8)

    if has_stage2:
        t0 = table.times[s2][0]
        ax2 = axes[1]
        ax2.plot((table.times[s2] - t0) * 1e15, table.obj_final[s2], "-",
                 color=STAGE2_COLOR)
        ax2.plot((table.times[s2] - t0) * 1e15, table.obj_tilde[s2], ":",
                 color=STAGE2_COLOR)
        ax2.set_xlabel("t - T (fs)  [stage 2]")

    fig.suptitle("objective vs time (nonuniform timescale)", fontsize=10)
    fig.savefig(out_path, dpi=DPI, metadata=_PNG_METADATA)
    plt.close(fig)
    return str(out_path)


def plot_bloch(csv_path, out_path) -> str:
    """Bloch-sphere trajectory with stage coloring; returns out_path."""
    table = TrajectoryTable.read(csv_path)
    if table.bloch is None:
        raise TableError(f"{csv_path}: no Bloch columns (system is not "
                         "two-level); cannot draw a Bloch trajectory")
    # Ground state drawn at the south pole.
    xyz = table.bloch * np.array([1.0, 1.0, -1.0])

    fig = plt.figure(figsize=(4.8, 4.8))
    ax = fig.add_subplot(111, projection="3d")
    u = np.linspace(0.0, 2.0 * np.pi, 25)
    v = np.linspace(0.0, np.pi, 13)
    ax.plot_wireframe(np.outer(np.cos(u), np.sin(v)),
                      np.outer(np.sin(u), np.sin(v)),
                      np.outer(np.ones_like(u), np.cos(v)),
                      color="0.85", linewidth=0.4)

    s1, s2 = _split_stages(table)
    ax.plot(xyz[s1, 0], xyz[s1, 1], xyz[s1, 2], color=STAGE1_COLOR,
            linewidth=1.6, label="stage 1 (incoherent)")
    if table.stages[-1] == 2:
        ax.plot(xyz[s2, 0], xyz[s2, 1], xyz[s2, 2], color=STAGE2_COLOR,
                linewidth=0.7, label="stage 2 (coherent)")
    ax.scatter([xyz[-1, 0]], [xyz[-1, 1]], [xyz[-1, 2]], color=TARGET_COLOR,
               s=40, depthshade=False, label="target")

    ax.set_xlim(-1, 1), ax.set_ylim(-1, 1), ax.set_zlim(-1, 1)
    ax.set_xlabel("x"), ax.set_ylabel("y"), ax.set_zlabel("z")
    ax.set_box_aspect((1, 1, 1))
    ax.view_init(elev=18.0, azim=-60.0)
    ax.legend(loc="upper left", fontsize=7)
    fig.savefig(out_path, dpi=DPI, metadata=_PNG_METADATA)
    plt.close(fig)
    return str(out_path)
