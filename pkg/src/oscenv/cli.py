"""Command-line front end tying the solvers to on-disk run directories.

Subcommands:
  fp-run    distribution solve, normalized snapshots + mass series
  q-run     coupled complex solve + trajectory expectation series
  sde-run   path ensemble: binned densities + exponential-functional series
  entropy   entropy series from an existing run directory
  topology  region maps and component counts over a list of times
  validate  distribution solve vs path-ensemble density, total variation

Configuration is resolved in three layers: built-in defaults (the weak
noise preset), then `--preset`, then the JSON file given with `--config`,
then individual flags.  Every run writes its resolved configuration and
output list into manifest.json inside the output directory.  Data files
are deterministic for a fixed seed; the manifest also records wall-clock
times and so is the one file expected to differ between identical runs.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .entropy import entropy_series
from .errors import ConfigError, OscenvError
from .fields import Grid2D, trapezoid_mass
from .fp import run_fp
from .model import EnvConfig, omega0
from .oracle import DEFAULT_CUTOFF, simulate_ensemble
from .presets import PRESETS, get_preset
from .qfield import run_q
from .topology import classify_manifold
from . import files

_THREADS_VAR = "OSCENV_THREADS"


def default_config() -> dict:
    """Fully populated configuration equal to the weak-noise preset."""
    p = get_preset("table-row-1")
    return {
        "env": {
            "eps_r": p.cfg.eps_r,
            "eps_i": p.cfg.eps_i,
            "gamma": p.cfg.gamma,
            "nu": p.cfg.nu,
            "t0": p.cfg.t0,
            "omega_const": None,
        },
        "grid": {"M": 600, "L": 800, "du1": 0.02, "du2": 0.02},
        "stepping": {"dt": p.dt, "t_end": 20.0},
        "snapshots": [1.5, 10.0, 20.0],
        "oracle": {
            "paths": 100000,
            "dt": 1e-3,
            "bandwidth": 0.0,
            "cutoff": DEFAULT_CUTOFF,
        },
        "topology_times": [-20.0, 0.0, 20.0],
        "seed": 987654321,
    }


def _merge(base: dict, override: dict, path: str = "") -> None:
    for key, value in override.items():
        here = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown configuration field {here!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"field {here!r} must be an object")
            _merge(base[key], value, here)
        else:
            base[key] = value


def resolve_config(args) -> dict:
    cfg = default_config()
    if args.preset:
        p = get_preset(args.preset)
        cfg["env"].update(eps_r=p.cfg.eps_r, eps_i=p.cfg.eps_i,
                          gamma=p.cfg.gamma, nu=p.cfg.nu)
        cfg["stepping"]["dt"] = p.dt
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {args.config} is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must contain a JSON object")
        _merge(cfg, loaded)
    if getattr(args, "dt", None) is not None:
        cfg["stepping"]["dt"] = args.dt
    if getattr(args, "t_end", None) is not None:
        cfg["stepping"]["t_end"] = args.t_end
    if getattr(args, "snapshots", None):
        cfg["snapshots"] = [float(s) for s in args.snapshots]
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    if getattr(args, "paths", None) is not None:
        cfg["oracle"]["paths"] = args.paths
    if getattr(args, "bandwidth", None) is not None:
        cfg["oracle"]["bandwidth"] = args.bandwidth
    if getattr(args, "oracle_dt", None) is not None:
        cfg["oracle"]["dt"] = args.oracle_dt
    if getattr(args, "times", None):
        cfg["topology_times"] = [float(t) for t in args.times]
    return cfg


def build_env(cfg: dict) -> EnvConfig:
    env = cfg["env"]
    return EnvConfig(
        eps_r=float(env["eps_r"]), eps_i=float(env["eps_i"]),
        gamma=float(env["gamma"]), nu=float(env["nu"]), t0=float(env["t0"]),
        omega_const=None if env["omega_const"] is None else float(env["omega_const"]),
    )


def build_grid(cfg: dict) -> Grid2D:
    g = cfg["grid"]
    return Grid2D.centered(M=int(g["M"]), L=int(g["L"]),
                           du1=float(g["du1"]), du2=float(g["du2"]))


class _Run:
    """Output directory plus the manifest bookkeeping for one invocation."""

    def __init__(self, subcommand: str, cfg: dict, out: str, force: bool, threads: int):
        self.subcommand = subcommand
        self.cfg = cfg
        self.threads = threads
        self.dir = Path(out)
        if self.dir.exists() and any(self.dir.iterdir()) and not force:
            raise ConfigError(
                f"output directory {self.dir} is not empty; pass --force to overwrite"
            )
        self.dir.mkdir(parents=True, exist_ok=True)
        self.outputs: list[str] = []
        self.stages: dict[str, float] = {}
        self._t0 = time.perf_counter()
        self._stage_start = self._t0
        self._stage = None

    def stage(self, name: str) -> None:
        self._close_stage()
        self._stage = name
        self._stage_start = time.perf_counter()

    def _close_stage(self) -> None:
        if self._stage is not None:
            self.stages[self._stage] = round(time.perf_counter() - self._stage_start, 3)
            self._stage = None

    def path(self, name: str) -> Path:
        self.outputs.append(name)
        return self.dir / name

    def finish(self) -> None:
        self._close_stage()
        digest = hashlib.sha256(
            json.dumps(self.cfg, sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest()
        manifest = {
            "subcommand": self.subcommand,
            "config": self.cfg,
            "config_digest": digest,
            "seed": self.cfg["seed"],
            "threads": self.threads,
            "versions": _versions(),
            "wall_clock": self.stages,
            "outputs": sorted(self.outputs),
        }
        (self.dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _versions() -> dict:
    import numba
    import scipy
    return {
        "oscenv": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }


def _tname(t: float) -> str:
    return f"{t:g}"


def cmd_fp_run(run: _Run) -> None:
    env, grid = build_env(run.cfg), build_grid(run.cfg)
    step = run.cfg["stepping"]
    run.stage("fp")
    result = run_fp(env, grid, dt=float(step["dt"]), t_end=float(step["t_end"]),
                    snapshot_times=tuple(run.cfg["snapshots"]))
    run.stage("write")
    for snap in result.snapshots:
        files.write_snapshot(run.path(f"fp_t{_tname(snap.t)}.txt"), snap)
    files.write_series_csv(run.path("alpha.csv"), result.alpha_times, result.alpha_values)


def cmd_q_run(run: _Run) -> None:
    env, grid = build_env(run.cfg), build_grid(run.cfg)
    step = run.cfg["stepping"]
    dt, t_end = float(step["dt"]), float(step["t_end"])
    snaps = tuple(run.cfg["snapshots"])
    run.stage("q")
    qres = run_q(env, grid, dt=dt, t_end=t_end, snapshot_times=snaps)
    run.stage("fp")
    pres = run_fp(env, grid, dt=dt, t_end=t_end, snapshot_times=snaps)
    run.stage("write")
    for snap in qres.snapshots:
        files.write_complex_snapshot(run.path(f"q_t{_tname(snap.t)}.txt"), snap)
    alpha_at = {round(float(t), 9): float(a)
                for t, a in zip(pres.alpha_times, pres.alpha_values)}
    times, lams = [], []
    for t, qr_int, qi_int in zip(qres.series_times, qres.series_qr_int, qres.series_qi_int):
        alpha = alpha_at.get(round(float(t), 9))
        if alpha is None:
            continue
        times.append(float(t))
        lams.append(complex(qr_int, qi_int) / alpha)
    xi0 = 1.0 / math.sqrt(2.0 * omega0(env.t0, env))
    xis = [xi0 * lam for lam in lams]
    files.write_trajectory_csv(run.path("trajectory.csv"), times, lams, xis)


def cmd_sde_run(run: _Run) -> None:
    env, grid = build_env(run.cfg), build_grid(run.cfg)
    oracle = run.cfg["oracle"]
    run.stage("sde")
    ens = simulate_ensemble(
        env, grid, n_paths=int(oracle["paths"]), seed=int(run.cfg["seed"]),
        dt=float(oracle["dt"]), record_times=tuple(run.cfg["snapshots"]),
        cutoff=float(oracle["cutoff"]), bandwidth=float(oracle["bandwidth"]),
        threads=run.threads,
    )
    run.stage("write")
    for dens in ens.densities:
        files.write_snapshot(run.path(f"density_t{_tname(dens.t)}.txt"), dens)
    files.write_fk_csv(run.path("fk.csv"), ens.record_times, ens.fk_mean,
                       ens.fk_stderr_re, ens.fk_stderr_im, ens.n_effective)


def cmd_entropy(run: _Run, src: str) -> None:
    src_dir = Path(src)
    if not src_dir.is_dir():
        raise ConfigError(f"--from directory not found: {src_dir}")
    p_files = sorted(src_dir.glob("fp_t*.txt"))
    q_files = sorted(src_dir.glob("q_t*.txt"))
    if not p_files and not q_files:
        raise ConfigError(f"no fp_t*.txt or q_t*.txt snapshots in {src_dir}")
    run.stage("read")
    p_snaps = [files.read_snapshot(f) for f in p_files] or None
    q_snaps = [files.read_complex_snapshot(f) for f in q_files] or None
    if p_snaps:
        p_snaps.sort(key=lambda s: s.t)
    if q_snaps:
        q_snaps.sort(key=lambda s: s.t)
    run.stage("entropy")
    series = entropy_series(p_snapshots=p_snaps, q_snapshots=q_snaps)
    run.stage("write")
    files.write_entropy_csv(run.path("entropy.csv"), series)


def cmd_topology(run: _Run) -> None:
    env, grid = build_env(run.cfg), build_grid(run.cfg)
    rows = []
    run.stage("classify")
    for t in run.cfg["topology_times"]:
        region = classify_manifold(grid, float(t), env)
        files.write_region_map(run.path(f"region_t{_tname(t)}.txt"), region)
        rows.append((float(t), region.components,
                     region.components_upper, region.components_lower))
    run.stage("write")
    files.write_components_csv(run.path("components.csv"), rows)


def cmd_validate(run: _Run) -> None:
    env, grid = build_env(run.cfg), build_grid(run.cfg)
    step = run.cfg["stepping"]
    oracle = run.cfg["oracle"]
    check_times = tuple(run.cfg["snapshots"])
    run.stage("fp")
    pres = run_fp(env, grid, dt=float(step["dt"]), t_end=max(check_times),
                  snapshot_times=check_times)
    run.stage("sde")
    ens = simulate_ensemble(
        env, grid, n_paths=int(oracle["paths"]), seed=int(run.cfg["seed"]),
        dt=float(oracle["dt"]), record_times=check_times,
        cutoff=float(oracle["cutoff"]), bandwidth=float(oracle["bandwidth"]),
        threads=run.threads,
    )
    run.stage("write")
    rows = []
    by_time = {round(d.t, 6): d for d in ens.densities}
    for snap in pres.snapshots:
        files.write_snapshot(run.path(f"fp_t{_tname(snap.t)}.txt"), snap)
        dens = by_time.get(round(snap.t, 6))
        if dens is None:
            continue
        files.write_snapshot(run.path(f"density_t{_tname(dens.t)}.txt"), dens)
        tv = 0.5 * trapezoid_mass(grid, np.abs(snap.values - dens.values))
        rows.append([snap.t, tv])
        print(f"t={snap.t:g}  total variation = {tv:.6f}")
    lines = ["t,tv"] + [f"{repr(float(t))},{repr(float(v))}" for t, v in rows]
    run.path("validation.csv").write_text("\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscenv",
        description="Oscillator-environment simulation runs",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser, out_default: str) -> None:
        p.add_argument("--preset", choices=sorted(PRESETS),
                       help="named parameter row")
        p.add_argument("--config", help="JSON file overriding the defaults")
        p.add_argument("--out", default=out_default,
                       help=f"output directory (default {out_default})")
        p.add_argument("--force", action="store_true",
                       help="write into a non-empty output directory")
        p.add_argument("--threads", type=int,
                       default=int(os.environ.get(_THREADS_VAR, "1")),
                       help=f"worker count (default ${_THREADS_VAR} or 1); results do not depend on it")
        p.add_argument("--seed", type=int, help="reproducibility seed")

    def stepping(p: argparse.ArgumentParser) -> None:
        p.add_argument("--dt", type=float, help="time step")
        p.add_argument("--t-end", dest="t_end", type=float, help="final time")
        p.add_argument("--snapshots", type=float, nargs="+", metavar="T",
                       help="snapshot times")

    p = sub.add_parser("fp-run", help="distribution solve")
    common(p, "runs/fp"); stepping(p)
    p.set_defaults(fn=lambda run, args: cmd_fp_run(run))

    p = sub.add_parser("q-run", help="coupled complex solve")
    common(p, "runs/q"); stepping(p)
    p.set_defaults(fn=lambda run, args: cmd_q_run(run))

    p = sub.add_parser("sde-run", help="path-ensemble oracle")
    common(p, "runs/sde")
    p.add_argument("--snapshots", type=float, nargs="+", metavar="T",
                   help="record times")
    p.add_argument("--paths", type=int, help="number of paths")
    p.add_argument("--bandwidth", type=float, help="density smoothing width, 0 = raw histogram")
    p.add_argument("--oracle-dt", dest="oracle_dt", type=float, help="path integrator step")
    p.set_defaults(fn=lambda run, args: cmd_sde_run(run))

    p = sub.add_parser("entropy", help="entropy series from an existing run directory")
    common(p, "runs/entropy")
    p.add_argument("--from", dest="src", required=True, metavar="DIR",
                   help="directory holding fp_t*.txt / q_t*.txt snapshots")
    p.set_defaults(fn=lambda run, args: cmd_entropy(run, args.src))

    p = sub.add_parser("topology", help="manifold region maps")
    common(p, "runs/topology")
    p.add_argument("--times", type=float, nargs="+", metavar="T",
                   help="evaluation times (default -20 0 20)")
    p.set_defaults(fn=lambda run, args: cmd_topology(run))

    p = sub.add_parser("validate", help="distribution-vs-ensemble comparison")
    common(p, "runs/validate"); stepping(p)
    p.add_argument("--paths", type=int, help="number of paths")
    p.add_argument("--bandwidth", type=float, help="density smoothing width, 0 = raw histogram")
    p.add_argument("--oracle-dt", dest="oracle_dt", type=float, help="path integrator step")
    p.set_defaults(fn=lambda run, args: cmd_validate(run))

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.threads < 1:
            raise ConfigError(f"--threads must be at least 1, got {args.threads}")
        run = _Run(args.subcommand, cfg, args.out, args.force, args.threads)
        args.fn(run, args)
        run.finish()
    except OscenvError as exc:
        print(f"oscenv: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
