"""Shared fixtures for figkit tests: synthetic contract-conforming CSVs."""

import numpy as np


def fmt(x: float) -> str:
    return format(float(x), ".17g")


HEADER_2LVL = ("t_s,stage,re_rho_00,im_rho_00,re_rho_01,im_rho_01,"
               "re_rho_11,im_rho_11,obj_final,obj_tilde,"
               "bloch_x,bloch_y,bloch_z")


def synthetic_two_level_csv(path, rows: int = 40, constant: bool = False,
                            with_stage2: bool = True):
    """A plausible relaxation-then-rotation trajectory, or a constant state."""
    lines = [HEADER_2LVL]
    times = np.linspace(0.0, 50e-9, rows)
    for k, t in enumerate(times):
        z = 0.5 if constant else 1.0 - 0.5 * (1.0 - np.exp(-t / 8e-9))
        p0 = (1.0 + z) / 2.0
        obj = 0.0 if constant else abs(z - 0.5)
        lines.append(",".join([
            fmt(t), "1", fmt(p0), "0", "0", "0", fmt(1.0 - p0), "0",
            fmt(obj), fmt(obj), "0", "0", fmt(z)]))
    if with_stage2:
        for k in range(1, rows + 1):
            tau = k / rows
            t = 50e-9 + tau * 1.4e-12
            theta = np.pi * tau
            phi = 900.0 * 2.0 * np.pi * tau
            z = 0.5 * np.cos(theta)
            r = 0.5 * np.sin(theta)
            x, y = r * np.cos(phi), r * np.sin(phi)
            p0 = (1.0 + z) / 2.0
            lines.append(",".join([
                fmt(t), "2", fmt(p0), "0", fmt(x / 2.0), fmt(-y / 2.0),
                fmt(1.0 - p0), "0", fmt(abs(z + 0.5)), fmt(abs(z - 0.5)),
                fmt(x), fmt(y), fmt(z)]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
