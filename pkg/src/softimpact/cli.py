"""Command-line interface: experiment configs in, CSV/JSON/PNG artifacts out.

Every run writes a ``manifest.json`` echoing the resolved configuration with
per-file checksums. Exit codes: 0 on success, 2 on configuration errors
(nothing is written), 3 on numerical failures (the manifest records the
error).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .continuation import bifurcation_scan, continue_orbit
from .errors import ConfigError, DomainError, SoftImpactError
from .hill import classify_boundary_points, filtered_hausdorff, hausdorff_distance, impact_hill_region, smooth_hill_boundary
from .impact import compare_flows, propagate_impact
from .io import fmt, orbit_record, sha256_of, write_csv, write_json
from .model import PhaseState, WedgeModel, Window, check_conditions, model_from_dict, total_energy, v20_from_energy
from .orbits import (
    CONSTRAINTS,
    FIX_U10,
    PeriodicOrbit,
    find_period2_impact,
    find_period2_impact_at_energy,
    find_period2_impact_with_trace,
    find_period2_smooth,
    sample_return_map,
)
from .plots import (
    save_bifurcation_figure,
    save_cloud_figure,
    save_continuation_figure,
    save_decay_figure,
    save_hill_figure,
    save_trajectory_figure,
)
from .smooth import IntegratorConfig, SectionSpec, SlabSpec, hamiltonian_values, integrate_smooth

COMMANDS = (
    "simulate",
    "find-orbit",
    "continue",
    "bifurcation-scan",
    "hill",
    "poincare",
    "compare-flows",
    "check-conditions",
)

_TOP_KEYS = {"model", "integrator", "params", "output_dir", "seed"}
_PARAM_KEYS = {
    "simulate": ({"T"}, {"initial", "u10", "sample_dt"}),
    "find-orbit": ({"u10"}, {"eps_ladder"}),
    "continue": ({"eps_path"}, {"u10", "constraint", "target", "emit_trajectories"}),
    "bifurcation-scan": ({"ratios", "u10_grid", "epsilon"}, {"u_c_tol"}),
    "hill": ({"h_star", "window", "resolution", "epsilons"}, set()),
    "poincare": (
        {"u10", "epsilons", "n_returns", "n_seeds", "seed_span"},
        {"constraint", "target", "h", "slab", "v3", "u3_offset", "seed_mode"},
    ),
    "compare-flows": ({"epsilons"}, {"u10", "initial", "T", "periods"}),
    "check-conditions": ({"window", "epsilons"}, {"delta_k", "grid"}),
}


def _check_keys(data: dict, required: set, optional: set, where: str) -> None:
    unknown = set(data) - required - optional
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = required - set(data)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


def load_config(path: Path, command: str) -> dict:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(raw, {"model", "params"}, _TOP_KEYS, "config")
    try:
        model = model_from_dict(raw["model"])
    except DomainError as exc:
        raise ConfigError(f"invalid model block: {exc}") from exc
    integ = raw.get("integrator", {})
    _check_keys(integ, set(), {"rel_tol", "abs_tol", "max_step", "energy_drift_abort"}, "integrator")
    try:
        cfg = IntegratorConfig(
            rel_tol=float(integ.get("rel_tol", 1e-10)),
            abs_tol=float(integ.get("abs_tol", 1e-12)),
            max_step=float(integ.get("max_step", math.inf)),
            energy_drift_abort=float(integ.get("energy_drift_abort", 1e-6)),
        )
    except DomainError as exc:
        raise ConfigError(f"invalid integrator block: {exc}") from exc
    params = raw["params"]
    if not isinstance(params, dict):
        raise ConfigError("params must be a JSON object")
    required, optional = _PARAM_KEYS[command]
    _check_keys(params, required, optional, f"params ({command})")
    _validate_nested(command, params)
    return {
        "model": model,
        "cfg": cfg,
        "params": params,
        "seed": int(raw.get("seed", 0)),
        "output_dir": raw.get("output_dir"),
        "echo": raw,
    }


def _validate_nested(command: str, params: dict) -> None:
    if "initial" in params:
        _check_keys(params["initial"], {"q", "p"}, set(), "params.initial")
    if "slab" in params:
        _check_keys(params["slab"], set(), {"half_width", "velocity_sign", "index"}, "params.slab")
    if "window" in params:
        _window_from(params["window"], "params.window")
    if command == "bifurcation-scan" and isinstance(params.get("u10_grid"), dict):
        _check_keys(params["u10_grid"], {"min", "max", "count"}, set(), "params.u10_grid")
    if "constraint" in params and params["constraint"] not in CONSTRAINTS:
        raise ConfigError(f"constraint must be one of {CONSTRAINTS}")
    if command == "continue" and params.get("constraint", FIX_U10) != FIX_U10 and "target" not in params:
        raise ConfigError("fix_energy / fix_re_multiplier continuation needs a target")
    if command == "poincare":
        c = params.get("constraint", FIX_U10)
        if c == "fix_energy" and "h" not in params:
            raise ConfigError("poincare with fix_energy needs the h parameter")
        if c == "fix_re_multiplier" and "target" not in params:
            raise ConfigError("poincare with fix_re_multiplier needs a target")
    if command == "compare-flows" and "initial" not in params and "u10" not in params:
        raise ConfigError("compare-flows needs either an initial state or a u10 orbit start")
    if command == "compare-flows" and "initial" in params and "T" not in params:
        raise ConfigError("compare-flows with an explicit initial state needs T")
    if command == "simulate" and "initial" not in params and "u10" not in params:
        raise ConfigError("simulate needs either an initial state or a u10 orbit start")


def _window_from(values, where: str) -> Window:
    if not (isinstance(values, list) and len(values) == 4):
        raise ConfigError(f"{where} must be [x_min, x_max, y_min, y_max]")
    try:
        return Window(*[float(v) for v in values])
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _orbit_at_epsilon(model: WedgeModel, eps: float, params: dict, prev: PeriodicOrbit | None,
                      constraint: str, target, h) -> PeriodicOrbit:
    """Orbit for one steepness, warm-started from the previous family member."""
    m0 = replace(model, epsilon=0.0)
    u10 = float(params["u10"])
    if eps == 0.0:
        if constraint == "fix_energy":
            return find_period2_impact_at_energy(m0, float(h), (model.u1s + 0.6, 4.0 * u10))
        if constraint == "fix_re_multiplier":
            return find_period2_impact_with_trace(m0, 2.0 * float(target), (model.u1s + 0.6, 4.0 * u10))
        return find_period2_impact(m0, u10)
    guess = prev if prev is not None else _orbit_at_epsilon(model, 0.0, params, None, constraint, target, h)
    ladder = [e for e in (1e-3, 1e-2, 0.1, 0.2) if guess.epsilon < e < eps]
    orb = guess
    for e in (*ladder, eps):
        orb = find_period2_smooth(replace(model, epsilon=e), orb, constraint, target)
    return orb


def _trajectory_rows(model: WedgeModel, samples: np.ndarray) -> tuple[list[str], np.ndarray]:
    d = (samples.shape[1] - 2) // 2
    if d == 3:
        header = ["t", "u1", "u2", "u3", "v1", "v2", "v3", "H"]
    else:
        header = ["t", "u1", "u2", "v1", "v2", "H"]
    return header, samples


def _smooth_samples(model, traj, n: int) -> np.ndarray:
    ts = np.linspace(traj.t0, traj.t1, n)
    states = traj.states_at(ts)
    h = hamiltonian_values(model, states.T)
    return np.column_stack([ts, states, h])


# ---------------------------------------------------------------------------
# command implementations (each returns {filename: description})


def _run_simulate(out: Path, model, cfg, params, seed) -> None:
    t_final = float(params["T"])
    if "initial" in params:
        init = params["initial"]
        _check_keys(init, {"q", "p"}, set(), "params.initial")
        s0 = PhaseState(q=init["q"], p=init["p"])
    elif "u10" in params:
        orb = find_period2_impact(replace(model, epsilon=0.0), float(params["u10"]))
        s0 = orb.section_state()
    else:
        raise ConfigError("simulate needs either an initial state or a u10 orbit start")
    sample_dt = float(params.get("sample_dt", t_final / 2000.0))
    if model.epsilon == 0.0:
        traj = propagate_impact(model, s0, t_final, sample_dt=sample_dt)
        samples = traj.samples
        write_csv(
            out / "events.csv",
            ["t_c", "wall", "v1_pre", "v2_pre", "v1_post", "v2_post", "class"],
            [
                (
                    e.t_c,
                    e.wall.value,
                    float(e.state_pre.p[0]),
                    float(e.state_pre.p[1]),
                    float(e.state_post.p[0]),
                    float(e.state_post.p[1]),
                    e.classification.value,
                )
                for e in traj.events
            ],
        )
    else:
        traj = integrate_smooth(model, s0, t_final, cfg)
        samples = _smooth_samples(model, traj, max(2, int(round(t_final / sample_dt)) + 1))
    header, rows = _trajectory_rows(model, samples)
    write_csv(out / "trajectory.csv", header, rows)
    save_trajectory_figure(out / "trajectory.png", model, samples,
                           f"trajectory, epsilon={model.epsilon:g}")


def _run_find_orbit(out: Path, model, cfg, params, seed) -> None:
    u10 = float(params["u10"])
    m0 = replace(model, epsilon=0.0)
    orbit = find_period2_impact(m0, u10)
    if model.epsilon > 0.0:
        ladder = params.get("eps_ladder", [e for e in (1e-3, 1e-2, 0.1, 0.2) if e < model.epsilon])
        for e in (*[float(x) for x in ladder], model.epsilon):
            orbit = find_period2_smooth(replace(model, epsilon=e), orbit, FIX_U10)
    write_json(out / "orbit.json", orbit_record(orbit))
    if model.epsilon == 0.0:
        traj = propagate_impact(m0, orbit.section_state(), orbit.period, sample_dt=orbit.period / 2000)
        samples = traj.samples
    else:
        traj = integrate_smooth(model, orbit.section_state(), orbit.period, cfg)
        samples = _smooth_samples(model, traj, 2001)
    header, rows = _trajectory_rows(model, samples)
    write_csv(out / "orbit_trajectory.csv", header, rows)
    save_trajectory_figure(out / "orbit.png", model, samples,
                           f"period-2 orbit, epsilon={model.epsilon:g}, u10={orbit.u10:g}")


def _run_continue(out: Path, model, cfg, params, seed) -> None:
    eps_path = [float(e) for e in params["eps_path"]]
    constraint = params.get("constraint", FIX_U10)
    if constraint not in CONSTRAINTS:
        raise ConfigError(f"constraint must be one of {CONSTRAINTS}")
    target = params.get("target")
    u10 = float(params.get("u10", 0.0))
    m0 = replace(model, epsilon=0.0)
    if constraint == "fix_energy":
        orbit0 = find_period2_impact_at_energy(m0, float(target), (model.u1s + 0.6, max(4.0 * u10, 20.0)))
    elif constraint == "fix_re_multiplier":
        orbit0 = find_period2_impact_with_trace(m0, 2.0 * float(target), (model.u1s + 0.6, max(4.0 * u10, 20.0)))
    else:
        if "u10" not in params:
            raise ConfigError("fix_u10 continuation needs u10")
        orbit0 = find_period2_impact(m0, u10)
    run = continue_orbit(model, orbit0, eps_path, constraint, target)
    write_csv(
        out / "orbits.csv",
        ["epsilon", "u10", "v20", "H", "t_c", "trace", "stability"],
        [(o.epsilon, o.u10, o.v20, o.h, o.t_c, o.trace, o.stability.value) for o in run.orbits],
    )
    for i, orb in enumerate(run.orbits):
        write_json(out / f"orbit_{i}.json", orbit_record(orb))
    if run.failures:
        write_json(out / "failures.json", [{"epsilon": e, "error": msg} for e, msg in run.failures])
    trajectories = []
    if params.get("emit_trajectories", False):
        for orb in (run.orbits[0], run.orbits[-1]) if run.orbits else ():
            m = replace(model, epsilon=orb.epsilon)
            if orb.epsilon == 0.0:
                samples = propagate_impact(m0, orb.section_state(), orb.period, sample_dt=orb.period / 2000).samples
            else:
                samples = _smooth_samples(m, integrate_smooth(m, orb.section_state(), orb.period, cfg), 2001)
            header, rows = _trajectory_rows(m, samples)
            write_csv(out / f"trajectory_eps_{orb.epsilon:g}.csv", header, rows)
            trajectories.append((samples, f"eps={orb.epsilon:g}"))
    save_continuation_figure(out / "continuation.png", model, run.orbits, trajectories,
                             f"{constraint} continuation")
    if run.failures:
        raise SoftImpactError(f"continuation stopped at epsilon={run.failures[0][0]}: {run.failures[0][1]}")


def _run_bifurcation_scan(out: Path, model, cfg, params, seed, workers=None) -> None:
    ratios = [float(r) for r in params["ratios"]]
    grid = params["u10_grid"]
    if isinstance(grid, dict):
        _check_keys(grid, {"min", "max", "count"}, set(), "params.u10_grid")
        u10_grid = list(np.linspace(float(grid["min"]), float(grid["max"]), int(grid["count"])))
    else:
        u10_grid = [float(u) for u in grid]
    eps = float(params["epsilon"])
    curve = bifurcation_scan(model, ratios, u10_grid, eps,
                             u_c_tol=float(params.get("u_c_tol", 1e-6)), workers=workers)
    rows = []
    for i, r in enumerate(curve.ratios):
        for j, u in enumerate(curve.u10_grid):
            rows.append((r, u, float(curve.traces[i, j]), curve.tags[i][j]))
    write_csv(out / "bifurcation.csv", ["ratio", "u10", "trace", "stability"], rows)
    write_csv(out / "curve.csv", ["ratio", "u_c", "epsilon"],
              [(r, u, eps) for r, u in zip(curve.ratios, curve.u_c)])
    save_bifurcation_figure(out / "bifurcation.png", [curve], f"stability transition, eps={eps:g}")


def _run_hill(out: Path, model, cfg, params, seed) -> None:
    h_star = float(params["h_star"])
    window = _window_from(params["window"], "params.window")
    resolution = int(params["resolution"])
    epsilons = [float(e) for e in params["epsilons"]]
    region = classify_boundary_points(model, impact_hill_region(model, h_star, window, resolution))
    rows = []
    for pid, poly in enumerate(region.boundary):
        for x, y in poly.points:
            rows.append((pid, poly.tag, float(x), float(y)))
    write_csv(out / "region_impact.csv", ["polyline_id", "part_tag", "x", "y"], rows)
    write_csv(out / "corners.csv", ["x", "y", "class"],
              [(float(c.point[0]), float(c.point[1]), c.kind.value) for c in region.corners])
    corner_pts = np.array([c.point for c in region.corners]) if region.corners else None
    impact_parts = [b.points for b in region.boundary]
    smooth_regions = []
    haus_rows = []
    for eps in epsilons:
        sm = smooth_hill_boundary(model, h_star, eps, window, resolution)
        smooth_regions.append(sm)
        rows = []
        for pid, poly in enumerate(sm.boundary):
            for x, y in poly.points:
                rows.append((pid, poly.tag, float(x), float(y)))
        write_csv(out / f"region_eps_{eps:g}.csv", ["polyline_id", "part_tag", "x", "y"], rows)
        d = hausdorff_distance(impact_parts, [b.points for b in sm.boundary])
        fd = (
            filtered_hausdorff(impact_parts, [b.points for b in sm.boundary], corner_pts, 0.3)
            if corner_pts is not None
            else d
        )
        haus_rows.append((eps, d, fd))
    write_csv(out / "hausdorff.csv", ["epsilon", "distance", "distance_away_from_corners"], haus_rows)
    save_hill_figure(out / "hill.png", model, region, smooth_regions, f"Hill regions, H*={h_star:g}")
    save_decay_figure(out / "hill_convergence.png", [(e, d) for e, d, _ in haus_rows],
                      "epsilon", "Hausdorff distance", "boundary convergence",
                      extra_pairs=[(e, fd) for e, _, fd in haus_rows])


def _run_poincare(out: Path, model, cfg, params, seed) -> None:
    epsilons = [float(e) for e in params["epsilons"]]
    n_returns = int(params["n_returns"])
    n_seeds = int(params["n_seeds"])
    span = float(params["seed_span"])
    constraint = params.get("constraint", FIX_U10)
    if constraint not in CONSTRAINTS:
        raise ConfigError(f"constraint must be one of {CONSTRAINTS}")
    target = params.get("target")
    h_fixed = params.get("h")
    slab = None
    if "slab" in params:
        _check_keys(params["slab"], set(), {"half_width", "velocity_sign", "index"}, "params.slab")
        slab = SlabSpec(
            index=int(params["slab"].get("index", 2)),
            half_width=float(params["slab"].get("half_width", 0.1)),
            velocity_sign=int(params["slab"].get("velocity_sign", 1)),
        )
    rng = np.random.default_rng(seed)
    clouds: dict[float, np.ndarray] = {}
    fixed_points: dict[float, tuple[float, float]] = {}
    orbit_rows = []
    prev = None
    for eps in sorted(epsilons):
        orb = _orbit_at_epsilon(model, eps, params, prev, constraint, target, h_fixed)
        prev = orb
        orbit_rows.append((orb.epsilon, orb.u10, orb.v20, orb.h, orb.t_c, orb.trace, orb.stability.value))
        fixed_points[eps] = (orb.u10, 0.0)
        m = replace(model, epsilon=eps)
        if params.get("seed_mode", "segment") == "random":
            offsets = rng.uniform(0.0, span, size=n_seeds)
        else:
            offsets = np.linspace(span / n_seeds, span, n_seeds)
        seeds = []
        for du in offsets:
            u1 = orb.u10 + float(du)
            if model.has_oscillator and eps > 0.0:
                u3 = model.u3s + float(params.get("u3_offset", 0.0))
                v3 = float(params.get("v3", 0.05))
                pot_state = PhaseState(q=[u1, 0.0, u3], p=[0.0, 0.0, v3])
                rad = 2.0 * (orb.h - total_energy(m, pot_state))
                if rad <= 0.0:
                    continue
                seeds.append(PhaseState(q=[u1, 0.0, u3], p=[0.0, math.sqrt(rad), v3]))
            else:
                try:
                    v2 = v20_from_energy(m if eps > 0 else replace(m, epsilon=0.0), orb.h, u1, 0.0, 0.0)
                except DomainError:
                    continue
                seeds.append(PhaseState(q=[u1, 0.0], p=[0.0, v2]))
        spec = SectionSpec(coordinate=1, direction=1, slab=slab if (model.has_oscillator and eps > 0) else None)
        cloud = sample_return_map(m, seeds, n_returns, spec, cfg)
        clouds[eps] = cloud.points
        header = ["seed_id", "k", "u1", "v1"]
        rows = [tuple(r) for r in cloud.points]
        if cloud.extra is not None and len(cloud.extra) == len(cloud.points):
            header += ["u3", "v3"]
            rows = [tuple(r) + tuple(e) for r, e in zip(cloud.points, cloud.extra)]
        write_csv(out / f"cloud_eps_{eps:g}.csv", header, rows)
        if cloud.errors:
            write_json(out / f"seed_errors_eps_{eps:g}.json",
                       [{"seed": s, "error": e} for s, e in cloud.errors])
    write_csv(out / "orbits.csv", ["epsilon", "u10", "v20", "H", "t_c", "trace", "stability"], orbit_rows)
    save_cloud_figure(out / "poincare.png", clouds, fixed_points,
                      f"section return maps ({constraint})")


def _run_compare_flows(out: Path, model, cfg, params, seed) -> None:
    epsilons = [float(e) for e in params["epsilons"]]
    m0 = replace(model, epsilon=0.0)
    if "initial" in params:
        init = params["initial"]
        _check_keys(init, {"q", "p"}, set(), "params.initial")
        s0 = PhaseState(q=init["q"], p=init["p"])
        t_final = float(params["T"])
    else:
        orb = find_period2_impact(m0, float(params["u10"]))
        s0 = orb.section_state()
        t_final = float(params.get("periods", 1.0)) * orb.period
    pairs = compare_flows(m0, s0, t_final, epsilons, cfg)
    write_csv(out / "compare.csv", ["epsilon", "sup_distance"], pairs)
    save_decay_figure(out / "compare.png", pairs, "epsilon", "sup distance",
                      "hard-wall vs steep-wall trajectory distance")


def _run_check_conditions(out: Path, model, cfg, params, seed) -> None:
    window = _window_from(params["window"], "params.window")
    epsilons = sorted([float(e) for e in params["epsilons"]], reverse=True)
    report = check_conditions(model, window, epsilons,
                              delta_k=float(params.get("delta_k", 0.5)),
                              grid=int(params.get("grid", 256)))
    write_csv(
        out / "conditions.csv",
        ["epsilon", "interior_max_value", "interior_max_grad", "barrier_monotone",
         "inverse_sup", "inverse_slope_sup"],
        [
            (e.epsilon, e.interior_max_value, e.interior_max_grad, e.barrier_monotone,
             e.inverse_sup, e.inverse_slope_sup)
            for e in report.entries
        ],
    )
    write_json(out / "conditions_summary.json", {
        "interior_decay_monotone": report.interior_decay_monotone,
        "inverse_decay_monotone": report.inverse_decay_monotone,
        "u_hat": report.u_hat,
        "e_barrier": report.e_barrier,
        "barrier_unbounded": report.barrier_unbounded,
        "energy_window": list(report.energy_window),
        "wall_min_ok": report.wall_min_ok,
        "delta_k": report.delta_k,
    })
    save_decay_figure(out / "conditions.png",
                      [(e.epsilon, max(e.interior_max_value, 1e-300)) for e in report.entries],
                      "epsilon", "sup |V| on interior set", "wall steepness diagnostics",
                      extra_pairs=[(e.epsilon, e.inverse_sup) for e in report.entries])


_RUNNERS = {
    "simulate": _run_simulate,
    "find-orbit": _run_find_orbit,
    "continue": _run_continue,
    "bifurcation-scan": _run_bifurcation_scan,
    "hill": _run_hill,
    "poincare": _run_poincare,
    "compare-flows": _run_compare_flows,
    "check-conditions": _run_check_conditions,
}


def run(command: str, config_path: Path, output_dir: Path | None, workers: int | None = None) -> int:
    try:
        conf = load_config(config_path, command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = output_dir or (Path(conf["output_dir"]) if conf["output_dir"] else None)
    if out is None:
        print("config error: no output directory (flag --output_dir or config output_dir)", file=sys.stderr)
        return 2
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "version": __version__,
        "config": conf["echo"],
        "seed": conf["seed"],
    }
    started = time.perf_counter()
    status = 0
    try:
        if command == "bifurcation-scan":
            _RUNNERS[command](out, conf["model"], conf["cfg"], conf["params"], conf["seed"], workers=workers)
        else:
            _RUNNERS[command](out, conf["model"], conf["cfg"], conf["params"], conf["seed"])
        manifest["status"] = "ok"
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SoftImpactError, ValueError) as exc:
        manifest["status"] = "error"
        manifest["error"] = f"{type(exc).__name__}: {exc}"
        print(f"numerical failure: {manifest['error']}", file=sys.stderr)
        status = 3
    manifest["wall_clock_s"] = time.perf_counter() - started
    manifest["files"] = {
        p.name: sha256_of(p) for p in sorted(out.iterdir()) if p.is_file() and p.name != "manifest.json"
    }
    write_json(out / "manifest.json", manifest)
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="softimpact",
        description="Soft-impact wedge laboratory: simulate, find orbits, scan, and report.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path, help="experiment config (UTF-8 JSON)")
        p.add_argument("--output_dir", type=Path, default=None, help="artifact directory")
        if name == "bifurcation-scan":
            p.add_argument("--workers", type=int, default=None, help="parallel ratio jobs")
    args = parser.parse_args(argv)
    workers = getattr(args, "workers", None)
    return run(args.command, args.config, args.output_dir, workers=workers)


if __name__ == "__main__":
    sys.exit(main())
