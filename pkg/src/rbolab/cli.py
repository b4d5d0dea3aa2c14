"""Command-line entry point: ``rbolab <command> [--config FILE] [--key value ...]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error.  ``RBO_WORKERS`` sets the number of worker processes used to
fan out stability ensembles (default 1); outputs are ordered by input, so
the worker count never changes the files written.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from .config import COMMANDS, RunConfig, config_echo, parse_config
from .errors import ConfigError, FieldFileError, IoFailure, NumericalFailure, RboError
from .evolution import EvolutionConfig, cfl_suggest, energy_scale, evolve, relative_drift
from .functionals import WaveParams
from .ground_state import SolverOptions, petviashvili_solve
from .io import read_field, report_extras, write_csv, write_field, write_report, write_sidecar
from .linearized import LinearizedOp, projected_min_eigenvalue
from .soliton import SolitonSpec, bo_soliton, rbo_residual
from .spectral import Grid, derivative
from .stability import gamma_convergence_study, perturb, run_stability_experiment

__all__ = ["main", "run", "worker_count", "GROUND_STATE_COLUMNS", "EVOLVE_COLUMNS",
           "SPECTRUM_COLUMNS", "SOLITON_CHECK_COLUMNS"]

log = logging.getLogger("rbolab")

GROUND_STATE_COLUMNS = ("c", "gamma", "m", "I", "K", "E", "V", "h_half_norm", "residual", "iterations")
EVOLVE_COLUMNS = ("t", "E", "V", "E_drift", "V_drift")
SPECTRUM_COLUMNS = ("c", "gamma", "n", "min_eig_projected", "raw_min_eig",
                    "kernel_residual", "dc_identity_residual")
SOLITON_CHECK_COLUMNS = ("n", "half_length", "c", "residual", "V", "V_exact",
                         "K", "K_exact", "I", "I_exact")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def worker_count() -> int:
    raw = os.environ.get("RBO_WORKERS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"RBO_WORKERS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"RBO_WORKERS must be a positive integer, got {raw!r}")
    return n


def _fan_out(fn, items):
    """``[fn(x) for x in items]``, possibly in worker processes, in input order."""
    items = list(items)
    nw = min(worker_count(), len(items))
    if nw <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=nw) as ex:
        return list(ex.map(fn, items))


def _grid(cfg: RunConfig) -> Grid:
    return Grid(cfg.n, cfg.half_length)


def _solver_opts(cfg: RunConfig) -> SolverOptions:
    return SolverOptions(tol=cfg.tol, max_iter=cfg.max_iter,
                         stabilizer_exponent=cfg.stabilizer_exponent, init=cfg.init)


def _ground_state(cfg: RunConfig):
    return petviashvili_solve(WaveParams(cfg.c, cfg.gamma), _grid(cfg), _solver_opts(cfg))


def _evo_config(cfg: RunConfig, u0) -> EvolutionConfig:
    dt = cfg.dt if cfg.dt is not None else cfl_suggest(u0)
    return EvolutionConfig(dt=dt, t_end=cfg.t_end, save_stride=cfg.save_stride)


def _cmd_ground_state(cfg: RunConfig, out: Path) -> dict:
    gs = _ground_state(cfg)
    f = gs.functionals
    row = (cfg.c, cfg.gamma, f.m_value, f.I_value, f.K_value, f.E_value, f.V_value,
           f.h_half_norm, gs.residual_rel, gs.iterations)
    write_csv(out / "ground_state.csv", GROUND_STATE_COLUMNS, [row])
    write_field(gs.psi, out / "psi.json")
    return {out / "ground_state.csv": {}, out / "psi.json": None}


def _cmd_evolve(cfg: RunConfig, out: Path) -> dict:
    p = WaveParams(cfg.c, cfg.gamma)
    if cfg.input:
        u0 = read_field(cfg.input)
    else:
        u0 = perturb(_ground_state(cfg).psi, cfg.amp, cfg.seed)
    ec = _evo_config(cfg, u0)
    traj = evolve(u0, p, ec)
    ed = relative_drift(traj.E_series, energy_scale(u0, p.gamma))
    vd = relative_drift(traj.V_series, traj.V_series[0])
    rows = zip(traj.times, traj.E_series, traj.V_series, ed, vd)
    write_csv(out / "evolve.csv", EVOLVE_COLUMNS, list(rows))
    write_field(traj.final, out / "final.json")
    return {out / "evolve.csv": {"dt": ec.dt},
            out / "final.json": None}


def _stability_member(args):
    gs, cfg, seed = args
    u0 = perturb(gs.psi, cfg.amp, seed)
    return run_stability_experiment(gs, cfg.amp, seed, cfg.t_end, _evo_config(cfg, u0))


def _cmd_stability(cfg: RunConfig, out: Path) -> dict:
    gs = _ground_state(cfg)
    reports = _fan_out(_stability_member, [(gs, cfg, s) for s in cfg.seeds])
    paths = {}
    for rep in reports:
        path = out / f"stability_seed{rep.seed}.csv"
        write_report(rep, path)
        paths[path] = report_extras(rep)
    return paths


def _cmd_converge_gamma(cfg: RunConfig, out: Path) -> dict:
    rows = gamma_convergence_study(cfg.c, cfg.gammas, _grid(cfg), _solver_opts(cfg))
    path = out / "converge_gamma.csv"
    write_report(rows, path)
    return {path: {}}


def _cmd_spectrum(cfg: RunConfig, out: Path) -> dict:
    gs = _ground_state(cfg)
    op = LinearizedOp(gs.psi, gs.params, nl_coeff=cfg.nl_coeff)
    rep = projected_min_eigenvalue(op, [gs.psi, derivative(gs.psi)])
    row = (cfg.c, cfg.gamma, cfg.n, rep.min_eig_projected, rep.raw_min_eig,
           rep.kernel_residual, rep.dc_identity_residual)
    path = out / "spectrum.csv"
    write_csv(path, SPECTRUM_COLUMNS, [row])
    return {path: {"degenerate": rep.degenerate}}


def _cmd_soliton_check(cfg: RunConfig, out: Path) -> dict:
    from .functionals import action_I, constraint_K, mass_V

    g, c = _grid(cfg), cfg.c
    q = bo_soliton(SolitonSpec(c), g)
    _, res = rbo_residual(q, WaveParams(c, 0.0))
    row = (cfg.n, cfg.half_length, c, res,
           mass_V(q), 2 * np.pi * c,
           constraint_K(q), np.pi * c ** 2,
           action_I(q, WaveParams(c, 0.0)), 1.5 * np.pi * c ** 2)
    path = out / "soliton_check.csv"
    write_csv(path, SOLITON_CHECK_COLUMNS, [row])
    return {path: {}}


_COMMANDS = {
    "ground-state": _cmd_ground_state,
    "evolve": _cmd_evolve,
    "stability": _cmd_stability,
    "converge-gamma": _cmd_converge_gamma,
    "spectrum": _cmd_spectrum,
    "soliton-check": _cmd_soliton_check,
}


def run(cfg: RunConfig) -> list[Path]:
    """Execute ``cfg`` and return the data files written."""
    out = Path(cfg.out_dir)
    t0 = time.perf_counter()
    written = _COMMANDS[cfg.command](cfg, out)
    wall = time.perf_counter() - t0
    meta = {"config": config_echo(cfg), "version": __version__, "wall_clock_s": wall}
    for path, extra in written.items():
        if extra is not None:
            write_sidecar(path, {**extra, **meta})
    return list(written)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("-v", "--verbose", action="store_true")
    for f in fields(RunConfig):
        if f.name in ("command", "provenance"):
            continue
        common.add_argument("--" + f.name.replace("_", "-"), dest=f.name, default=None,
                            metavar=f.name.upper())
    ap = argparse.ArgumentParser(prog="rbolab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"rbolab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = ""
        if args.config:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                raise IoFailure(f"cannot read config {args.config}: {exc}") from exc
        overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig)
                     if f.name not in ("command", "provenance")}
        cfg = parse_config(text, args.command, overrides)
        for p in run(cfg):
            print(p)
        return EXIT_OK
    except ConfigError as exc:
        print(f"rbolab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IoFailure, FieldFileError) as exc:
        print(f"rbolab: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericalFailure, RboError) as exc:
        print(f"rbolab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
