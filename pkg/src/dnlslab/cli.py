"""Command-line front end.

Subcommands: ``simulate``, ``mi-scan``, ``gate``, ``compare-al``,
``attractor-check``, ``list-scenarios``.  Data products land under
``<out>/<scenario>/``; the output root defaults to ``./out`` and can be
overridden by ``--out`` or the ``DNLS_OUT`` environment variable.
Exit codes: 0 success, 2 validation/usage error, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import attractor_verdict, mi_scan
from .core import (
    GeneralizedBCSpec,
    PlaneWaveIC,
    LatticeConfig,
    central_node_index,
    critical_amplitude,
    generalized_gate,
    make_initial_condition,
    solvability_gate,
)
from .errors import RuntimeFailure, ValidationFailure
from .products import (
    RunManifest,
    write_center_density_csv,
    write_density_csv,
    write_manifest,
    write_mi_scan_csv,
    write_phase_plane_csv,
    write_plot_scripts,
    write_proximity_csv,
    write_spectrum_csv,
    write_wedge_csv,
)
from .proximity import DpsParams, build_proximity_report
from .scenarios import (
    ScenarioSpec,
    apply_noise,
    catalog,
    load_scenario,
    smoke_variant,
)
from .timestep import System, integrate


def _out_root(args) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get("DNLS_OUT", "out"))


def _resolve_scenario(args) -> ScenarioSpec:
    spec = load_scenario(args.scenario)
    if getattr(args, "ap", None) is not None:
        base = spec.variants[0]
        if not isinstance(base.ic, PlaneWaveIC):
            raise ValidationFailure("--ap applies to plane-wave scenarios only")
        label = f"ap_{args.ap:g}".replace("-", "minus").replace(".", "p")
        spec = replace(
            spec,
            variants=(replace(base, label=label, ic=replace(base.ic, perturbation=args.ap)),),
        )
    if getattr(args, "smoke", False):
        spec = smoke_variant(spec)
    return spec


def _first_central_peak(traj, cfg, floor: float) -> float | None:
    """Time of the first local maximum of the central-node density above floor."""
    idx = central_node_index(cfg)
    dens = np.array([abs(s.values[idx]) ** 2 for s in traj.states])
    for i in range(1, dens.size - 1):
        if dens[i] > floor and dens[i] > dens[i - 1] and dens[i] >= dens[i + 1]:
            return float(traj.times[i])
    return None


def _gate_record(spec: ScenarioSpec) -> dict:
    a_star = critical_amplitude(spec.cfg.gamma, spec.cfg.delta)
    return {
        "background": spec.background,
        "a_star": a_star,
        "solvable": solvability_gate(spec.background, spec.cfg.gamma, spec.cfg.delta),
        "tolerance": 1e-9,
    }


def _base_manifest(spec: ScenarioSpec) -> RunManifest:
    cfg = spec.cfg
    return RunManifest(
        scenario=spec.name,
        parameters={
            "L": cfg.L, "N": cfg.N, "h": cfg.h, "k": cfg.k,
            "gamma": cfg.gamma, "delta": cfg.delta, "bc": cfg.bc.value,
            "systems": [s.value for s in spec.systems],
            "variants": [v.label for v in spec.variants],
        },
        gate=_gate_record(spec),
        integrator={
            "method": spec.integrator.method.value,
            "dt": spec.integrator.dt,
            "rtol": spec.integrator.rtol,
            "atol": spec.integrator.atol,
            "t_end": spec.integrator.t_end,
            "sample_every": spec.integrator.sample_every,
        },
        software_version=__version__,
        noise={"amp": spec.noise_amp, "seed": spec.noise_seed},
    )


def run_scenario(
    spec: ScenarioSpec,
    out_root: Path,
    plot_scripts: bool = False,
    auto_t0: bool = False,
) -> Path:
    """Run every (variant, system) pair of a scenario and emit its products."""
    out_dir = out_root / spec.name
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = _base_manifest(spec)
    started = time.perf_counter()
    cfg = spec.cfg
    single = len(spec.systems) == 1 and len(spec.variants) == 1

    def product_path(kind: str, system: System | None, label: str) -> Path:
        if single:
            return out_dir / f"{kind}.csv"
        sys_part = f"__{system.value}" if system is not None else ""
        return out_dir / f"{kind}{sys_part}__{label}.csv"

    for variant in spec.variants:
        ic = apply_noise(
            make_initial_condition(variant.ic, cfg), spec.noise_amp, spec.noise_seed
        )
        trajs: dict[System, object] = {}
        for system in spec.systems:
            trajs[system] = integrate(system, ic, cfg, spec.integrator)

        dps_ref = variant.dps_reference
        if auto_t0 and dps_ref is not None and System.DNLS in trajs:
            floor = 2.0 * spec.background**2
            peak = _first_central_peak(trajs[System.DNLS], cfg, floor)
            if peak is not None:
                dps_ref = DpsParams(q=dps_ref.q, t0=peak)
                manifest.extra[f"auto_t0__{variant.label}"] = peak

        for system, traj in trajs.items():
            for kind in spec.outputs:
                if kind == "densities":
                    path = product_path("density", system, variant.label)
                    write_density_csv(path, traj, cfg)
                elif kind == "spectrum":
                    path = product_path("spectrum", system, variant.label)
                    write_spectrum_csv(path, traj, cfg)
                elif kind == "phase_plane":
                    path = product_path("phase_plane", system, variant.label)
                    write_phase_plane_csv(path, traj, cfg)
                elif kind == "center_density":
                    path = product_path("center_density", system, variant.label)
                    write_center_density_csv(path, traj, cfg, dps_ref)
                else:
                    continue
                manifest.products.append(path.name)

        if "wedge" in spec.outputs:
            some_traj = next(iter(trajs.values()))
            path = product_path("wedge", None, variant.label)
            write_wedge_csv(path, some_traj.times, spec.background)
            manifest.products.append(path.name)
        if "proximity" in spec.outputs:
            report = build_proximity_report(
                trajs[System.DNLS], trajs[System.AL], cfg, spec.window
            )
            path = product_path("proximity", None, variant.label)
            write_proximity_csv(path, report)
            manifest.products.append(path.name)
            manifest.extra[f"proximity__{variant.label}"] = {
                "alpha": report.alpha,
                "N0": report.N0,
                "smallness_ok": report.smallness.ok,
                "smallness_lhs": report.smallness.lhs,
                "smallness_rhs": report.smallness.rhs,
                "estimate_I_hypothesis": report.bound_I is not None,
            }
        if "mi_scan" in spec.outputs:
            a_star = critical_amplitude(cfg.gamma, cfg.delta)
            if isinstance(variant.ic, PlaneWaveIC):
                carriers = [variant.ic.mode]
            else:
                carriers = list(range(cfg.N // 2 + 1))
            scans = [mi_scan(k, cfg, a_star, cfg.delta) for k in carriers]
            path = product_path("mi_scan", None, variant.label)
            write_mi_scan_csv(path, scans)
            manifest.products.append(path.name)

    if plot_scripts:
        manifest.products.extend(write_plot_scripts(out_dir, list(spec.outputs)))
    manifest.wall_time_s = time.perf_counter() - started
    write_manifest(out_dir / "manifest.json", manifest)
    return out_dir


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_list_scenarios(args) -> int:
    for name, spec in sorted(catalog().items()):
        print(f"{name:8s} {spec.description}")
    return 0


def _cmd_gate(args) -> int:
    a_star = critical_amplitude(args.gamma, args.delta)
    print(f"A* = {a_star:.17g}")
    if args.a is not None:
        verdict = solvability_gate(args.a, args.gamma, args.delta, args.tol)
        print(f"solvable(A={args.a:g}): {'yes' if verdict else 'no'}")
    if args.zeta is not None or args.g_freq is not None:
        if args.zeta is None or args.g_freq is None:
            raise ValidationFailure("--zeta and --g-freq must be given together")
        spec = GeneralizedBCSpec(
            zeta_minus=complex(args.zeta), zeta_plus=complex(args.zeta),
            zeta=args.zeta, G=args.g_freq,
        )
        verdict = generalized_gate(spec, args.gamma, args.delta, args.tol)
        print(f"generalized(zeta={args.zeta:g}, G={args.g_freq:g}): "
              f"{'yes' if verdict else 'no'}")
    return 0


def _cmd_simulate(args) -> int:
    spec = _resolve_scenario(args)
    out_dir = run_scenario(
        spec, _out_root(args), plot_scripts=args.plot_scripts, auto_t0=args.auto_t0
    )
    print(f"wrote {out_dir}")
    return 0


def _cmd_mi_scan(args) -> int:
    cfg = LatticeConfig(L=args.L, N=args.N, gamma=args.gamma, delta=args.delta,
                        h=args.h)
    a_star = critical_amplitude(cfg.gamma, cfg.delta)
    carriers = [args.carrier] if args.carrier is not None else list(range(cfg.N // 2 + 1))
    scans = [mi_scan(k, cfg, a_star, cfg.delta) for k in carriers]
    out_dir = _out_root(args) / "mi_scan"
    out_dir.mkdir(parents=True, exist_ok=True)
    write_mi_scan_csv(out_dir / "mi_scan.csv", scans)
    manifest = RunManifest(
        scenario="mi_scan",
        parameters={"L": cfg.L, "N": cfg.N, "h": cfg.h, "k": cfg.k,
                    "gamma": cfg.gamma, "delta": cfg.delta,
                    "carriers": carriers},
        gate={"a_star": a_star},
        integrator={},
        software_version=__version__,
        products=["mi_scan.csv"],
    )
    write_manifest(out_dir / "manifest.json", manifest)
    for scan in scans:
        verdict = "unstable" if scan.carrier_unstable else "stable"
        print(f"K={scan.K:3d}  {verdict:8s}  band={sorted(scan.unstable_band)}")
    print(f"wrote {out_dir}")
    return 0


def _cmd_compare_al(args) -> int:
    spec = _resolve_scenario(args)
    if set(spec.systems) != {System.DNLS, System.AL} or "proximity" not in spec.outputs:
        spec = replace(
            spec,
            systems=(System.DNLS, System.AL),
            outputs=tuple(dict.fromkeys(spec.outputs + ("proximity",))),
        )
    out_dir = run_scenario(spec, _out_root(args), plot_scripts=args.plot_scripts)
    print(f"wrote {out_dir}")
    return 0


def _cmd_attractor_check(args) -> int:
    spec = _resolve_scenario(args)
    if System.DNLS not in spec.systems:
        raise ValidationFailure("attractor-check needs a gain/loss lattice run")
    cfg = spec.cfg
    variant = spec.variants[0]
    ic = apply_noise(make_initial_condition(variant.ic, cfg), spec.noise_amp, spec.noise_seed)
    traj = integrate(System.DNLS, ic, cfg, spec.integrator)
    a_star = critical_amplitude(cfg.gamma, cfg.delta)
    window = args.window if args.window is not None else min(5.0, spec.integrator.t_end / 2)
    verdict = attractor_verdict(traj, cfg, a_star, tol_amp=args.tol_amp, t_window=window)
    out_dir = _out_root(args) / spec.name
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = _base_manifest(spec)
    manifest.extra["attractor_verdict"] = {
        "converged": verdict.converged,
        "final_mode": verdict.final_mode,
        "in_stable_band": verdict.in_stable_band,
        "tol_amp": args.tol_amp,
        "t_window": window,
    }
    write_manifest(out_dir / "manifest.json", manifest)
    print(f"converged={verdict.converged} final_mode={verdict.final_mode} "
          f"in_stable_band={verdict.in_stable_band}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnlslab",
        description="Gain/loss lattice simulator and analysis toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-scenarios", help="print the scenario catalog")
    p.set_defaults(fn=_cmd_list_scenarios)

    p = sub.add_parser("gate", help="print the critical amplitude and gate verdicts")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--a", type=float, default=None, help="background amplitude to test")
    p.add_argument("--zeta", type=float, default=None, help="two-sided boundary modulus")
    p.add_argument("--g-freq", type=float, default=None, help="boundary frequency parameter G")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(fn=_cmd_gate)

    def add_run_args(p, with_auto_t0=False):
        p.add_argument("--scenario", required=True,
                       help="catalog name or path to a scenario file")
        p.add_argument("--out", default=None, help="output root (default: $DNLS_OUT or ./out)")
        p.add_argument("--ap", type=float, default=None,
                       help="override the plane-wave perturbation amplitude")
        p.add_argument("--smoke", action="store_true", help="cap the horizon at t=10")
        p.add_argument("--plot-scripts", action="store_true",
                       help="emit companion plot scripts")
        if with_auto_t0:
            p.add_argument("--auto-t0", action="store_true",
                           help="locate the rogue-profile reference time from the run")

    p = sub.add_parser("simulate", help="run a scenario and emit its data products")
    add_run_args(p, with_auto_t0=True)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("mi-scan", help="sideband growth map for one or all carriers")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--carrier", type=int, default=None, help="carrier mode K (default: all)")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_mi_scan)

    p = sub.add_parser("compare-al", help="paired gain/loss vs integrable run with distances")
    add_run_args(p)
    p.set_defaults(fn=_cmd_compare_al)

    p = sub.add_parser("attractor-check", help="long-run convergence verdict")
    add_run_args(p)
    p.add_argument("--tol-amp", type=float, default=1e-3)
    p.add_argument("--window", type=float, default=None,
                   help="final time window inspected (default: min(5, t_end/2))")
    p.set_defaults(fn=_cmd_attractor_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeFailure as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
