"""Data-product emission: fixed-schema CSV files and the run manifest.

All floats are printed with 17 significant digits so repeated runs of the
same configuration diff byte-identically.  Every run directory holds
exactly one ``manifest.json`` which lists the emitted files.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .analysis import MIScan, spectrum
from .core import LatticeConfig, central_node_index, node_grid
from .proximity import DpsParams, ProximityReport, dps_eval
from .timestep import Trajectory

__all__ = [
    "RunManifest",
    "write_density_csv",
    "write_spectrum_csv",
    "write_phase_plane_csv",
    "write_center_density_csv",
    "write_wedge_csv",
    "write_mi_scan_csv",
    "write_proximity_csv",
    "write_manifest",
    "write_plot_scripts",
    "WEDGE_SLOPE",
]

# Front slope of the wedge overlay, x = +- 4*sqrt(2)*A*t.
WEDGE_SLOPE = 4.0 * math.sqrt(2.0)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_rows(path: Path, header: tuple[str, ...], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_density_csv(path: Path, traj: Trajectory, cfg: LatticeConfig) -> None:
    """Long-format density field: one row per (t, x) with |u|^2."""
    x = node_grid(cfg).x

    def rows():
        for t, state in zip(traj.times, traj.states):
            v = state.values
            dens = v.real**2 + v.imag**2
            for xn, d in zip(x, dens):
                yield (t, xn, d)

    _write_rows(path, ("t", "x", "density"), rows())


def write_spectrum_csv(path: Path, traj: Trajectory, cfg: LatticeConfig) -> None:
    """Modal magnitudes |A_K| per sample."""

    def rows():
        for state in traj.states:
            frame = spectrum(state, cfg)
            mags = np.abs(frame.coeffs)
            for kk, mag in enumerate(mags):
                yield (frame.t, kk, mag)

    _write_rows(path, ("t", "K", "abs_coeff"), rows())


def write_phase_plane_csv(path: Path, traj: Trajectory, cfg: LatticeConfig) -> None:
    """Trace of the central node (x = 0) in the complex plane."""
    idx = central_node_index(cfg)
    rows = (
        (t, s.values[idx].real, s.values[idx].imag)
        for t, s in zip(traj.times, traj.states)
    )
    _write_rows(path, ("t", "re_center", "im_center"), rows)


def write_center_density_csv(
    path: Path, traj: Trajectory, cfg: LatticeConfig, dps_ref: DpsParams | None = None
) -> None:
    """Central-node density series, optionally with the rogue-profile reference."""
    idx = central_node_index(cfg)
    grid = node_grid(cfg)
    if dps_ref is None:
        rows = ((t, abs(s.values[idx]) ** 2) for t, s in zip(traj.times, traj.states))
        _write_rows(path, ("t", "density"), rows)
    else:
        def rows():
            for t, s in zip(traj.times, traj.states):
                ref = dps_eval(grid, float(t), dps_ref).values[idx]
                yield (t, abs(s.values[idx]) ** 2, abs(ref) ** 2)

        _write_rows(path, ("t", "density", "dps_density"), rows())


def write_wedge_csv(path: Path, times: np.ndarray, background: float) -> None:
    """Wedge boundary overlay lines x = -+ 4*sqrt(2)*A*t."""
    rows = ((t, -WEDGE_SLOPE * background * t, WEDGE_SLOPE * background * t) for t in times)
    _write_rows(path, ("t", "x_minus", "x_plus"), rows)


def write_mi_scan_csv(path: Path, scans: list[MIScan]) -> None:
    """Sideband growth map, one row per (carrier K, sideband M)."""

    def rows():
        for scan in scans:
            for m, g in enumerate(scan.growth):
                yield (scan.K, m, g)

    _write_rows(path, ("K", "M", "growth"), rows())


def write_proximity_csv(path: Path, report: ProximityReport) -> None:
    """Distance curves with analytic envelopes; bound_I is nan when its
    hypothesis fails."""
    n = report.times.size
    bound_i = report.bound_I if report.bound_I is not None else np.full(n, math.nan)
    rows = zip(report.times, report.D_a, report.D_a_r, bound_i, report.bound_II)
    _write_rows(path, ("t", "D_a", "D_a_r", "bound_I", "bound_II"), rows)


# ---------------------------------------------------------------------------
# Manifest
# ---------------------------------------------------------------------------

@dataclass
class RunManifest:
    """Resolved run metadata; one per output directory."""

    scenario: str
    parameters: dict
    gate: dict
    integrator: dict
    software_version: str
    products: list[str] = field(default_factory=list)
    noise: dict = field(default_factory=dict)
    wall_time_s: float = 0.0
    extra: dict = field(default_factory=dict)


def write_manifest(path: Path, manifest: RunManifest) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(asdict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Companion plot scripts
# ---------------------------------------------------------------------------

_PLOT_TEMPLATES = {
    "densities": """\
# Render a density CSV (t, x, density) as a spacetime map, with the wedge
# overlay when present.  Usage: python plot_density.txt DENSITY_CSV [WEDGE_CSV]
import sys
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt(sys.argv[1], delimiter=",", names=True)
ts = np.unique(data["t"]); xs = np.unique(data["x"])
grid = data["density"].reshape(ts.size, xs.size)
plt.pcolormesh(xs, ts, grid, shading="nearest", cmap="viridis")
plt.colorbar(label="|u|^2")
if len(sys.argv) > 2:
    wedge = np.genfromtxt(sys.argv[2], delimiter=",", names=True)
    plt.plot(wedge["x_minus"], wedge["t"], "k-", lw=1)
    plt.plot(wedge["x_plus"], wedge["t"], "k-", lw=1)
    plt.xlim(xs[0], xs[-1])
plt.xlabel("x"); plt.ylabel("t")
plt.tight_layout(); plt.show()
""",
    "spectrum": """\
# Render spectrum snapshots (t, K, abs_coeff).  Usage:
#   python plot_spectrum.txt SPECTRUM_CSV [t1 t2 ...]
import sys
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt(sys.argv[1], delimiter=",", names=True)
ts = np.unique(data["t"])
wanted = [float(v) for v in sys.argv[2:]] or [ts[0], ts[-1]]
for tw in wanted:
    tn = ts[np.argmin(np.abs(ts - tw))]
    sel = data[data["t"] == tn]
    plt.semilogy(sel["K"], np.maximum(sel["abs_coeff"], 1e-18), label=f"t={tn:g}")
plt.xlabel("K"); plt.ylabel("|A_K|"); plt.legend()
plt.tight_layout(); plt.show()
""",
    "phase_plane": """\
# Render central-node orbits (t, re_center, im_center) in the complex plane.
# Usage: python plot_phase_plane.txt CSV [CSV ...]
import sys
import numpy as np
import matplotlib.pyplot as plt

for path in sys.argv[1:]:
    data = np.genfromtxt(path, delimiter=",", names=True)
    plt.plot(data["re_center"], data["im_center"], lw=0.8, label=path)
theta = np.linspace(0, 2 * np.pi, 256)
plt.gca().set_aspect("equal")
plt.xlabel("Re u_c"); plt.ylabel("Im u_c"); plt.legend(fontsize=7)
plt.tight_layout(); plt.show()
""",
    "center_density": """\
# Render the central-node density series against its rogue-profile reference.
# Usage: python plot_center_density.txt CSV
import sys
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt(sys.argv[1], delimiter=",", names=True)
plt.plot(data["t"], data["density"], "b-", label="run")
if "dps_density" in data.dtype.names:
    plt.plot(data["t"], data["dps_density"], "r--", label="rogue profile")
plt.xlabel("t"); plt.ylabel("|u_c|^2"); plt.legend()
plt.tight_layout(); plt.show()
""",
    "proximity": """\
# Render distance curves and envelopes (t, D_a, D_a_r, bound_I, bound_II).
# Usage: python plot_proximity.txt CSV
import sys
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt(sys.argv[1], delimiter=",", names=True)
plt.plot(data["t"], data["D_a"], label="D_a")
plt.plot(data["t"], data["D_a_r"], label="D_a_r")
if np.all(np.isfinite(data["bound_I"])):
    plt.plot(data["t"], data["bound_I"], "k:", label="estimate I")
plt.xlabel("t"); plt.ylabel("averaged distance"); plt.legend()
plt.tight_layout(); plt.show()
""",
    "mi_scan": """\
# Render a sideband growth map (K, M, growth).
# Usage: python plot_mi_scan.txt CSV
import sys
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt(sys.argv[1], delimiter=",", names=True)
ks = np.unique(data["K"]).astype(int)
if ks.size == 1:
    sel = data[data["K"] == ks[0]]
    plt.plot(sel["M"], sel["growth"], "o-")
    plt.xlabel("M"); plt.ylabel("growth")
else:
    ms = np.unique(data["M"]).astype(int)
    grid = data["growth"].reshape(ks.size, ms.size)
    plt.pcolormesh(ms, ks, grid, shading="nearest", cmap="magma")
    plt.colorbar(label="growth"); plt.xlabel("M"); plt.ylabel("K")
plt.tight_layout(); plt.show()
""",
}


def write_plot_scripts(out_dir: Path, products: list[str]) -> list[str]:
    """Emit companion plot scripts for the product kinds present."""
    written = []
    for kind in dict.fromkeys(products):
        template = _PLOT_TEMPLATES.get(kind)
        if template is None:
            continue
        name = f"plot_{kind}.txt"
        with open(out_dir / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(template)
        written.append(name)
    return written
