"""``sohp <subcommand> --config FILE [--out DIR] [--seed N]``.

Each run writes its declared CSV/JSON outputs plus one ``manifest.json``
echoing the resolved configuration.  Failures exit nonzero and print a JSON
error object on stderr.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import SUBCOMMANDS, ConfigError, RunConfig, parse_config, serialize
from .gci import DEFAULT_N, RESIDUAL_TOL, compute_coefficients
from .hydro1d import FlowParams, HydroError, initial_state, physical_time, run_hydro
from .hyperbolicity import nonhyperbolic_extent, scan_hyperbolicity
from .kinetic import RelaxationConfig, run_relaxation
from .llg import (LlgCoefficients, OrientationField, dirichlet_energy, llg_step,
                  max_stable_dt_diffusive, max_stable_dt_llg, random_smooth_field,
                  spin_wave, step_diffusive)
from .output import write_csv, write_json
from .params import ModelParams
from .sphere import ThetaGrid, langevin_closed_form


def _coefficients(d, alpha, grid_n):
    return compute_coefficients(d=d, alpha=alpha, grid=ThetaGrid(grid_n))


def _flow(cfg: RunConfig):
    """Flux constants from (d, alpha) through the GCI solver, or given directly."""
    if cfg["source"] == "model":
        coeffs = _coefficients(cfg["d"], cfg["alpha"], cfg["grid_n"])
        return coeffs, coeffs.row()
    flow = FlowParams(cfg["a"], cfg["lambda"], cfg["delta"])
    return flow, {"a": flow.a, "lambda": flow.lam, "delta": flow.delta}


def run_coeffs(cfg: RunConfig, out: Path) -> dict:
    coeffs = _coefficients(cfg["d"], cfg["alpha"], cfg["grid_n"])
    header = ["d", "alpha", "c1", "c2", "delta", "lambda", "a", "residual"]
    write_csv(out / "coeffs.csv", header, [coeffs.row()])
    return {
        "outputs": ["coeffs.csv"],
        "resolution": {"grid_n": cfg["grid_n"], "quadrature": "composite Simpson on theta",
                       "residual_tolerance": RESIDUAL_TOL},
        "diagnostics": {**coeffs.row(), "a1": coeffs.a1, "a2": coeffs.a2,
                        "b1": coeffs.b1, "b2": coeffs.b2},
    }


def run_hyperbolicity(cfg: RunConfig, out: Path) -> dict:
    flow, info = _flow(cfg)
    report = scan_hyperbolicity(flow, np.linspace(0.0, np.pi, cfg["n_theta"]))
    header = ["theta", "re1", "im1", "re2", "im2", "re3", "im3", "all_real"]
    rows = []
    for t, r, flag in zip(report.theta_grid, report.roots, report.flags):
        rows.append([t, r[0].real, r[0].imag, r[1].real, r[1].imag, r[2].real, r[2].imag,
                     bool(flag)])
    write_csv(out / "hyperbolicity.csv", header, rows)
    summary = {"intervals": report.nonhyperbolic_set,
               "theta_star": nonhyperbolic_extent(report),
               "classifications_agree": report.consistent, **info}
    write_json(out / "intervals.json", summary)
    return {"outputs": ["hyperbolicity.csv", "intervals.json"],
            "resolution": {"n_theta": cfg["n_theta"]}, "diagnostics": summary}


def run_hydro_cmd(cfg: RunConfig, out: Path) -> dict:
    flow, info = _flow(cfg)
    init = cfg.section("initial")
    preset = init.pop("preset")
    state0 = initial_state(preset, cfg["n"], cfg["length"], **init)
    snaps = run_hydro(state0, flow, cfg["t_final"], cfg["out_dt"], cfg["cfl"], cfg["theta_min"])
    outputs = []
    for k, s in enumerate(snaps):
        name = f"snapshot_{k:04d}.csv"
        write_csv(out / name, ["z", "rho", "theta", "varphi"],
                  zip(s.z, s.rho, s.theta, s.varphi))
        outputs.append(name)
    c1 = getattr(flow, "c1", None)
    times = [s.time for s in snaps]
    return {
        "outputs": outputs,
        "resolution": {"n": cfg["n"], "dz": state0.dz, "cfl": cfg["cfl"]},
        "diagnostics": {
            **info,
            "snapshot_times": times,
            "physical_times": [physical_time(t, cfg["c"], c1) for t in times] if c1 else None,
            "mass": [s.mass() for s in snaps],
            "relative_mass_drift": abs(snaps[-1].mass() - snaps[0].mass()) / snaps[0].mass(),
        },
    }


def _initial_field(cfg: RunConfig, seed) -> OrientationField:
    init = cfg.section("initial")
    n, dim, length = cfg["n"], cfg["dim"], cfg["length"]
    if init["preset"] == "spin_wave":
        base = spin_wave(n, init["q"], init["tilt"], length)
        omega = base.omega if dim == 1 else np.broadcast_to(base.omega[:, None, :], (n, n, 3))
        fld = OrientationField(length / n, np.array(omega))
    else:
        fld = random_smooth_field((n,) * dim, init["modes"], seed or 0, length,
                                  init["amplitude"])
    x = np.arange(n) * fld.dx
    bump = np.sin(2 * np.pi * x / length)
    if dim == 2:
        bump = bump[:, None] * np.ones(n)[None, :]
    return replace(fld, rho=1.0 + init["amp_rho"] * bump)


def _integrate(fld, step, dt_of, t_final, out_dt):
    """March to each output time, re-evaluating the stable step as the field evolves."""
    snaps = [fld]
    n_out = int(np.floor(t_final / out_dt + 1e-12))
    for k in range(1, n_out + 1):
        target = k * out_dt
        while fld.time < target - 1e-14 * max(1.0, target):
            fld = step(fld, min(dt_of(fld), target - fld.time))
        fld = replace(fld, time=target)
        snaps.append(fld)
    return snaps


def _field_outputs(snaps, out: Path, with_rho: bool):
    outputs, series = [], []
    for k, f in enumerate(snaps):
        name = f"field_{k:04d}.csv"
        coords = np.meshgrid(*f.coordinates(), indexing="ij")
        cols = [c.ravel() for c in coords]
        header = ["x", "y"][: f.dim] + ["omega_x", "omega_y", "omega_z"]
        cols += [f.omega[..., i].ravel() for i in range(3)]
        if with_rho:
            header.append("rho")
            cols.append(f.rho.ravel())
        write_csv(out / name, header, zip(*cols))
        outputs.append(name)
        series.append({"time": f.time, "energy": dirichlet_energy(f), "mass": f.mass(),
                       "max_norm_drift": f.drift, "norm_deviation": f.norm_deviation()})
    write_json(out / "diagnostics.json", {"series": series})
    return outputs + ["diagnostics.json"], series


def run_diffusive(cfg: RunConfig, out: Path) -> dict:
    params = ModelParams(c=cfg["c"], d=cfg["d"], alpha=cfg["alpha"], kappa=cfg["kappa"],
                         phi_rep=cfg["phi_rep"])
    coeffs = _coefficients(params.d, params.alpha, cfg["grid_n"])
    fld = _initial_field(cfg, cfg.seed)

    def dt_of(f):
        return cfg["dt"] or max_stable_dt_diffusive(f, coeffs, params, cfg["cfl"])

    dt = dt_of(fld)
    snaps = _integrate(fld, lambda f, h: step_diffusive(f, coeffs, params, h), dt_of,
                       cfg["t_final"], cfg["out_dt"])
    outputs, series = _field_outputs(snaps, out, with_rho=True)
    return {"outputs": outputs, "resolution": {"n": cfg["n"], "dim": cfg["dim"], "dt": dt},
            "diagnostics": {**coeffs.row(), "final": series[-1]}}


def run_llg(cfg: RunConfig, out: Path) -> dict:
    if cfg["source"] == "model":
        coeffs = _coefficients(cfg["d"], cfg["alpha"], cfg["grid_n"])
        llg = LlgCoefficients.from_model(
            coeffs, ModelParams(c=0.0, d=cfg["d"], alpha=cfg["alpha"], kappa=cfg["kappa"]))
    else:
        llg = LlgCoefficients(cfg["damping"], cfg["precession"])
    fld = _initial_field(cfg, cfg.seed)
    fld = replace(fld, rho=np.ones(fld.shape))
    dt = cfg["dt"] or max_stable_dt_llg(fld, llg, cfg["cfl"])
    if not np.isfinite(dt):
        dt = cfg["out_dt"]
    snaps = _integrate(fld, lambda f, h: llg_step(f, llg, h, cfl=cfg["cfl"]), lambda f: dt,
                       cfg["t_final"], cfg["out_dt"])
    outputs, series = _field_outputs(snaps, out, with_rho=False)
    return {"outputs": outputs, "resolution": {"n": cfg["n"], "dim": cfg["dim"], "dt": dt},
            "diagnostics": {"damping": llg.damping, "precession": llg.precession,
                            "final": series[-1]}}


def run_kinetic(cfg: RunConfig, out: Path) -> dict:
    rc = RelaxationConfig(
        n=cfg["n"], d=cfg["d"], alpha=cfg["alpha"], dt=cfg["dt"], t_final=cfg["t_final"],
        seed=cfg.seed or 0, mode=cfg["mode"], out_dt=cfg["out_dt"],
        burn_in=None if cfg["burn_in"] < 0 else cfg["burn_in"], initial=cfg["initial"],
        bias=cfg["bias"], c=cfg["c"], box=cfg["box"], cells=cfg["cells"])
    res = run_relaxation(rc)
    header = ["time", "mean_resultant", "omega_x", "omega_y", "omega_z", "ks_distance"]
    write_csv(out / "diagnostics.csv", header, [g.row() for g in res.diagnostics])
    outputs = ["diagnostics.csv"]
    if cfg["dump_velocities"]:
        write_csv(out / "velocities.csv", ["vx", "vy", "vz"], res.final.velocities)
        outputs.append("velocities.csv")
    last = res.diagnostics[-1]
    return {"outputs": outputs,
            "resolution": {"n": rc.n, "dt": rc.dt, "burn_in": rc.effective_burn_in},
            "diagnostics": {**last.row(), "c1_oracle": langevin_closed_form(1.0 / rc.d)}}


SWEEP_HEADER = ["d", "alpha", "c1", "c2", "delta", "lambda", "a", "residual",
                "theta_star", "nonhyperbolic_measure", "error"]


def sweep_point(args) -> dict:
    """One sweep row; solver errors land in the ``error`` column."""
    d, alpha, grid_n, n_theta = args
    row = {k: float("nan") for k in SWEEP_HEADER}
    row.update(d=d, alpha=alpha, error="")
    try:
        coeffs = _coefficients(d, alpha, grid_n)
        report = scan_hyperbolicity(coeffs, np.linspace(0.0, np.pi, n_theta))
        row.update(coeffs.row())
        row["theta_star"] = nonhyperbolic_extent(report)
        row["nonhyperbolic_measure"] = float(sum(hi - lo for lo, hi in report.nonhyperbolic_set))
    except Exception as exc:  # recorded per row, the sweep goes on
        row["error"] = f"{type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")
    return row


def sweep(cfg: RunConfig) -> list:
    """Coefficient and hyperbolicity table over the (d, alpha) product grid.

    Rows come back in grid order whatever the worker count.
    """
    points = [(float(d), float(a), cfg["grid_n"], cfg["n_theta"])
              for d, a in itertools.product(cfg["d_values"], cfg["alpha_values"])]
    if len(points) > 10_000:
        raise ConfigError("sweep grids are limited to 10^4 points")
    if cfg["workers"] == 1:
        return [sweep_point(p) for p in points]
    with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
        return list(pool.map(sweep_point, points))


def run_sweep(cfg: RunConfig, out: Path) -> dict:
    rows = sweep(cfg)
    write_csv(out / "sweep.csv", SWEEP_HEADER, rows)
    return {"outputs": ["sweep.csv"],
            "resolution": {"grid_n": cfg["grid_n"], "n_theta": cfg["n_theta"]},
            "diagnostics": {"points": len(rows), "failed": sum(bool(r["error"]) for r in rows)}}


RUNNERS = {
    "coeffs": run_coeffs,
    "hyperbolicity": run_hyperbolicity,
    "hydro": run_hydro_cmd,
    "diffusive": run_diffusive,
    "llg": run_llg,
    "kinetic": run_kinetic,
    "sweep": run_sweep,
}


def execute(cfg: RunConfig) -> dict:
    """Run a validated config and write its outputs and manifest."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    result = RUNNERS[cfg.subcommand](cfg, out)
    manifest = {
        "artifact": "sohp",
        "version": __version__,
        "config": cfg.to_dict(),
        "config_text": serialize(cfg),
        "default_gci_grid": DEFAULT_N,
        "wall_clock_s": time.perf_counter() - start,
        **result,
    }
    write_json(out / "manifest.json", manifest)
    return manifest


def _error_payload(exc) -> dict:
    if isinstance(exc, ConfigError):
        return exc.to_dict()
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, HydroError):
        payload.update(step=exc.step, node=exc.node)
    return payload


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sohp", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", type=Path, help="configuration file (empty = defaults)")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        text = args.config.read_text() if args.config else ""
        cfg = parse_config(text, args.subcommand, str(args.out), args.seed)
        execute(cfg)
    except ConfigError as exc:
        print(json.dumps(_error_payload(exc)), file=sys.stderr)
        return 2
    except (HydroError, ValueError, RuntimeError, OSError, FloatingPointError) as exc:
        print(json.dumps(_error_payload(exc)), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
