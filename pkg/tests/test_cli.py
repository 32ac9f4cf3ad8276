"""End-to-end CLI runs, product schemas, exit codes, determinism."""
import json

import numpy as np
import pytest

from dnlslab.cli import main
from dnlslab.core import LatticeConfig
from dnlslab.products import write_density_csv
from dnlslab.timestep import System, Trajectory


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == 0
    out = capsys.readouterr().out
    for name in ("fig5", "fig6", "fig12"):
        assert name in out


class TestGate:
    def test_prints_critical_amplitude(self, capsys):
        assert main(["gate", "--gamma", "0.0025", "--delta", "-0.01"]) == 0
        assert "A* = 0.5" in capsys.readouterr().out

    def test_solvability_verdict(self, capsys):
        assert main(["gate", "--gamma", "0.01", "--delta", "-0.01", "--a", "0.5"]) == 0
        assert "no" in capsys.readouterr().out

    def test_generalized_verdict(self, capsys):
        assert main(["gate", "--gamma", "0.0025", "--delta", "-0.01",
                     "--zeta", "0.5", "--g-freq", "0.5"]) == 0
        assert "yes" in capsys.readouterr().out

    def test_domain_error_exits_2(self, capsys):
        assert main(["gate", "--gamma", "-1.0", "--delta", "-0.01"]) == 2
        assert "error" in capsys.readouterr().err

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["gate", "--gamma", "0.1"])  # missing --delta
        assert exc.value.code == 2


class TestSimulate:
    def test_fig5_smoke_products_and_manifest(self, tmp_path, capsys):
        assert main(["simulate", "--scenario", "fig5", "--smoke",
                     "--out", str(tmp_path), "--plot-scripts"]) == 0
        out_dir = tmp_path / "fig5"
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["gate"]["solvable"] is True
        assert manifest["gate"]["a_star"] == 1.0
        assert manifest["software_version"]
        for name in manifest["products"]:
            assert (out_dir / name).exists(), name
        # both perturbation variants emit phase-plane traces
        names = set(manifest["products"])
        assert "phase_plane__dnls__ap_plus2.csv" in names
        assert "phase_plane__dnls__ap_minus0p999.csv" in names
        assert "plot_spectrum.txt" in names

    def test_fig5_orbits_converge_to_unit_circle(self, tmp_path):
        assert main(["simulate", "--scenario", "fig5", "--smoke",
                     "--out", str(tmp_path)]) == 0
        for label, start_outside in (("ap_plus2", True), ("ap_minus0p999", False)):
            rows = np.genfromtxt(
                tmp_path / "fig5" / f"phase_plane__dnls__{label}.csv",
                delimiter=",", names=True,
            )
            radius = np.hypot(rows["re_center"], rows["im_center"])
            assert abs(radius[-1] - 1.0) < 1e-3
            assert (radius[0] > 1.0) == start_outside

    def test_ap_override_collapses_variants(self, tmp_path):
        assert main(["simulate", "--scenario", "fig5", "--smoke", "--ap", "1.5",
                     "--out", str(tmp_path)]) == 0
        manifest = json.loads((tmp_path / "fig5" / "manifest.json").read_text())
        assert manifest["parameters"]["variants"] == ["ap_1p5"]

    def test_scenario_file_run(self, tmp_path):
        cfgfile = tmp_path / "mini.cfg"
        cfgfile.write_text(
            "L = 25\nN = 50\ngamma = 1.5\ndelta = -1.5\nic = planewave\n"
            "amplitude = 1\nperturbation = 0.5\nmode = 20\nt_end = 2\n"
            "sample_every = 0.5\noutputs = densities, spectrum\n"
        )
        assert main(["simulate", "--scenario", str(cfgfile), "--out", str(tmp_path)]) == 0
        out_dir = tmp_path / "mini"
        assert (out_dir / "density.csv").exists()
        assert (out_dir / "spectrum.csv").exists()

    def test_unknown_scenario_exits_2(self, capsys):
        assert main(["simulate", "--scenario", "fig99"]) == 2
        assert "error" in capsys.readouterr().err

    def test_determinism_byte_identical(self, tmp_path):
        for sub in ("a", "b"):
            assert main(["simulate", "--scenario", "fig9a", "--smoke",
                         "--out", str(tmp_path / sub)]) == 0
        body_a = (tmp_path / "a" / "fig9a" / "density.csv").read_bytes()
        body_b = (tmp_path / "b" / "fig9a" / "density.csv").read_bytes()
        assert body_a == body_b

    def test_density_schema(self, tmp_path):
        assert main(["simulate", "--scenario", "fig9a", "--smoke",
                     "--out", str(tmp_path)]) == 0
        with open(tmp_path / "fig9a" / "density.csv") as fh:
            assert fh.readline().strip() == "t,x,density"
        wedge = np.genfromtxt(tmp_path / "fig9a" / "wedge.csv",
                              delimiter=",", names=True)
        slope = 4.0 * np.sqrt(2.0) * 0.5
        assert wedge["x_plus"][-1] == pytest.approx(slope * wedge["t"][-1])


@pytest.mark.parametrize("name", sorted(
    ["fig5", "fig6", "fig8", "fig9a", "fig9b", "fig9c", "fig9d",
     "fig10a", "fig10b", "fig11", "fig12"]
))
def test_every_catalog_scenario_runs_in_smoke_mode(tmp_path, name):
    assert main(["simulate", "--scenario", name, "--smoke",
                 "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / name / "manifest.json").read_text())
    assert manifest["products"]
    # the embedded gate verdict must match a recomputation from the manifest
    from dnlslab.core import solvability_gate

    gate = manifest["gate"]
    params = manifest["parameters"]
    assert gate["solvable"] == solvability_gate(
        gate["background"], params["gamma"], params["delta"], gate["tolerance"]
    )


def test_auto_t0_locates_first_peak(tmp_path):
    assert main(["simulate", "--scenario", "fig9a", "--smoke", "--auto-t0",
                 "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "fig9a" / "manifest.json").read_text())
    assert abs(manifest["extra"]["auto_t0__algebraic"] - 2.4) < 0.5


def test_compare_al_emits_proximity(tmp_path):
    assert main(["compare-al", "--scenario", "fig12", "--out", str(tmp_path)]) == 0
    out_dir = tmp_path / "fig12"
    for label in ("algebraic", "sech"):
        rows = np.genfromtxt(out_dir / f"proximity__{label}.csv",
                             delimiter=",", names=True)
        assert rows["D_a"][0] == 0.0  # identical initial data
        assert np.all(rows["D_a"] <= rows["bound_II"] + 1e-12)
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["extra"]["proximity__algebraic"]["smallness_ok"] is False


def test_attractor_check(tmp_path, capsys):
    assert main(["attractor-check", "--scenario", "fig5", "--smoke",
                 "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "converged=True" in out
    assert "in_stable_band=True" in out
    manifest = json.loads((tmp_path / "fig5" / "manifest.json").read_text())
    assert manifest["extra"]["attractor_verdict"]["final_mode"] == 45


def test_mi_scan_command(tmp_path, capsys):
    assert main(["mi-scan", "--gamma", "1.5", "--delta", "-1.5",
                 "--L", "50", "--N", "100", "--carrier", "8",
                 "--out", str(tmp_path)]) == 0
    assert "unstable" in capsys.readouterr().out
    rows = np.genfromtxt(tmp_path / "mi_scan" / "mi_scan.csv",
                         delimiter=",", names=True)
    assert rows["growth"][0] == 0.0
    assert np.max(rows["growth"]) > 0.25


def test_empty_trajectory_gives_header_only_csv(tmp_path):
    cfg = LatticeConfig(L=50.0, N=100, gamma=1.5, delta=-1.5)
    traj = Trajectory(times=np.empty(0), states=[], system=System.DNLS)
    path = tmp_path / "density.csv"
    write_density_csv(path, traj, cfg)
    assert path.read_text() == "t,x,density\n"
