"""
Command line front end.

    pyadiabaton simulate  CONFIG [-o DIR]     direct solver run
    pyadiabaton adiabatic CONFIG [-o DIR]     characteristic solution
    pyadiabaton compare   CONFIG | --scenario NAME ...
    pyadiabaton design    CONFIG [--no-verify]
    pyadiabaton scenarios [--run NAME ...]
    pyadiabaton metrics   DIR

Exit status is 0 on success, 1 when a run fails (an error record goes to
stderr and, when the output directory exists, to error.json) and 2 on a
usage error.
"""
import argparse
import logging
import os
import sys

import numpy as np

from . import adiabatic, direct
from .config import RunConfig, dump_config, read_config
from .constant import MARGIN_THRESHOLD, package_name, version
from .diagnostics import cross_validate
from .envelope import envelope_as_dict, sample_envelope
from .errors import IoError, LambdaError
from .grid import ZetaGrid
from .persist import (
    jsonify, load_result, metrics_document, persist_result, write_error, write_json,
    write_text,
)
from .pulse import pulse_metrics
from .report import build_error_record
from .scenarios import SOLVER_MODES, get_scenario, run_scenario, run_scenarios, scenario_names
from .shaping import design_coupling
from .utils import logger, rel_l2

COMPARE_FILE = "compare.json"
DESIGN_FILE = "design.json"
DESIGNED_CONFIG_FILE = "designed.yaml"


def build_parser():
    parser = argparse.ArgumentParser(
        prog=package_name,
        description="Probe/coupling pulse propagation in a Lambda medium.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {version}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("simulate", "run the direct solver"),
                        ("adiabatic", "run the characteristic solver")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="YAML run configuration")
        p.add_argument("-o", "--output", help="output directory, overrides output_dir")

    p = sub.add_parser("compare", help="run both solvers and cross-validate")
    p.add_argument("config", nargs="?", help="YAML run configuration")
    p.add_argument("--scenario", action="append", default=[], choices=scenario_names(),
                   help="built-in scenario, repeatable; used instead of CONFIG")
    p.add_argument("-o", "--output", help="output directory")
    p.add_argument("--max-workers", type=int, help="parallel scenario runs")

    p = sub.add_parser("design", help="design the coupling for a target output probe")
    p.add_argument("config", help="YAML run configuration with a design block")
    p.add_argument("-o", "--output", help="output directory")
    p.add_argument("--no-verify", action="store_true",
                   help="skip the forward direct-solver verification")

    p = sub.add_parser("scenarios", help="list or run built-in scenarios")
    p.add_argument("--run", nargs="+", choices=scenario_names(), metavar="NAME",
                   help="run these scenarios")
    p.add_argument("--solver-mode", choices=SOLVER_MODES, default="direct")
    p.add_argument("-o", "--output", default="out", help="output directory")
    p.add_argument("--max-workers", type=int, help="parallel scenario runs")

    p = sub.add_parser("metrics", help="recompute diagnostics of a persisted run")
    p.add_argument("directory", help="run directory holding manifest.json")
    return parser


def _config_echo(cfg):
    return cfg.model_dump(mode="json", exclude_none=True)


def _output(args, cfg=None):
    out = args.output or (cfg.output_dir if cfg is not None else "out")
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as err:
        raise IoError(f"cannot create output directory {out}: {err}") from err
    args.resolved_output = out
    return out


def cmd_simulate(args):
    cfg = read_config(args.config)
    out = _output(args, cfg)
    scenario = cfg.resolve()
    result = direct.propagate(scenario.input_fields(), scenario.medium,
                              scenario.zeta_grid, cfg.solver_config())
    persist_result(result, out, config=_config_echo(cfg), emit_plots=cfg.emit_plots)
    if not result.valid:
        raise result.error
    return 0


def cmd_adiabatic(args):
    cfg = read_config(args.config)
    out = _output(args, cfg)
    scenario = cfg.resolve()
    result = adiabatic.solve(scenario.input_fields(), scenario.medium,
                             scenario.zeta_grid, edge_tol=cfg.solver.edge_tol)
    if result.shock_depth is not None:
        logger.warning("characteristics cross at zeta~%.4g; snapshots stop there",
                       result.shock_depth)
    persist_result(result, out, config=_config_echo(cfg), emit_plots=cfg.emit_plots)
    return 0


def _compare_one(name, runs, out, config_echo, emit_plots):
    direct_result = runs["direct"]
    chi = adiabatic.build_characteristics(direct_result.input_fields, direct_result.medium)
    persist_result(direct_result, os.path.join(out, "direct"), config=config_echo,
                   emit_plots=emit_plots, chi=chi)
    persist_result(runs["adiabatic"], os.path.join(out, "adiabatic"),
                   config=config_echo, emit_plots=emit_plots)

    checks = cross_validate(direct_result, chi)
    compared = [c for c in checks if not c.shocked]
    summary = dict(
        scenario=name,
        valid=direct_result.valid,
        snapshots=[c.as_dict() for c in checks],
        max_probe_l2=max((c.probe_l2 for c in compared), default=None),
        max_coupling_l2=max((c.coupling_l2 for c in compared), default=None),
        shock_depth=runs["adiabatic"].shock_depth,
    )
    logger.info("compare %s: max L2 probe=%s coupling=%s", name,
                summary["max_probe_l2"], summary["max_coupling_l2"])
    return summary


def cmd_compare(args):
    if args.scenario:
        out = _output(args)
        all_runs = run_scenarios(args.scenario, "both", args.max_workers)
        echoes = {name: dict(scenario=name) for name in all_runs}
        emit_plots = False
        multi = True
    else:
        cfg = read_config(args.config)
        out = _output(args, cfg)
        scenario = cfg.resolve()
        all_runs = {scenario.name: run_scenario(scenario, "both", cfg.solver_config())}
        echoes = {scenario.name: _config_echo(cfg)}
        emit_plots = cfg.emit_plots
        multi = False

    doc = {}
    for name, runs in all_runs.items():
        target = os.path.join(out, name) if multi else out
        doc[name] = _compare_one(name, runs, target, echoes[name], emit_plots)
    write_json(out, COMPARE_FILE, doc)
    sys.stdout.write(jsonify(doc))

    for runs in all_runs.values():
        if not runs["direct"].valid:
            raise runs["direct"].error
    return 0


def _designed_config(cfg, scenario, design):
    data = _config_echo(cfg)
    data.pop("scenario", None)
    data.pop("design", None)
    data["explicit"] = dict(
        probe=envelope_as_dict(design.probe),
        coupling=envelope_as_dict(design.coupling),
        medium=dict(kappa_c=scenario.medium.kappa_c),
        tau_grid=scenario.tau_grid.as_dict(),
        zeta_grid=dict(zeta_max=design.depth, n_zeta=scenario.zeta_grid.n_zeta,
                       snapshot_stride=min(scenario.zeta_grid.snapshot_stride,
                                           scenario.zeta_grid.n_zeta)),
    )
    return RunConfig.model_validate(data)


def cmd_design(args):
    cfg = read_config(args.config)
    out = _output(args, cfg)
    scenario = cfg.resolve()
    request = cfg.design_request()
    solver_config = cfg.solver_config()

    design = design_coupling(request.target, request.baseline_v, scenario.medium,
                             request.depth, scenario.tau_grid,
                             edge_tol=solver_config.edge_tol)
    target = sample_envelope(request.target, scenario.tau_grid)
    doc = dict(design.as_dict(),
               target=envelope_as_dict(request.target),
               baseline_v=envelope_as_dict(request.baseline_v),
               target_metrics=pulse_metrics(target, scenario.tau_grid).as_dict())
    if design.predicted is not None:
        doc["predicted_l2"] = rel_l2(target, np.abs(design.predicted.g_p))

    if design.depth > 0:
        designed = _designed_config(cfg, scenario, design)
        write_text(out, DESIGNED_CONFIG_FILE, dump_config(designed))

    verify = not args.no_verify and design.depth > 0
    if verify and (design.margin < MARGIN_THRESHOLD or design.shock_depth is not None):
        logger.warning("design not verified: margin %.3g, shock depth %s",
                       design.margin, design.shock_depth)
        verify = False

    if verify:
        zg = scenario.zeta_grid
        zeta_grid = ZetaGrid(design.depth, zg.n_zeta, min(zg.snapshot_stride, zg.n_zeta))
        result = direct.propagate(design.input_fields, scenario.medium, zeta_grid,
                                  solver_config)
        persist_result(result, os.path.join(out, "verify"), config=_config_echo(cfg),
                       emit_plots=cfg.emit_plots)
        if not result.valid:
            raise result.error
        output = np.abs(result.final.fields.g_p)
        doc["verified_l2"] = rel_l2(target, output)
        doc["verified_metrics"] = pulse_metrics(output, scenario.tau_grid).as_dict()

    write_json(out, DESIGN_FILE, doc)
    sys.stdout.write(jsonify(doc))
    return 0


def _describe(scenario):
    d = scenario.as_dict()
    for key in ("probe", "coupling"):
        if d[key]["kind"] == "tabulated":
            d[key] = dict(kind="tabulated", samples=len(d[key]["tau"]))
    return d


def cmd_scenarios(args):
    if not args.run:
        listing = [_describe(get_scenario(name)) for name in scenario_names()]
        sys.stdout.write(jsonify(listing))
        return 0

    out = _output(args)
    all_runs = run_scenarios(args.run, args.solver_mode, args.max_workers)
    failed = None
    for name, runs in all_runs.items():
        for mode, result in runs.items():
            persist_result(result, os.path.join(out, name, mode),
                           config=dict(scenario=name, solver_mode=args.solver_mode))
            if not result.valid and failed is None:
                failed = result.error
    if failed is not None:
        raise failed
    return 0


def cmd_metrics(args):
    result = load_result(args.directory)
    sys.stdout.write(jsonify(metrics_document(result)))
    return 0


_COMMANDS = dict(
    simulate=cmd_simulate,
    adiabatic=cmd_adiabatic,
    compare=cmd_compare,
    design=cmd_design,
    scenarios=cmd_scenarios,
    metrics=cmd_metrics,
)


def _set_verbosity(args):
    if args.verbose:
        logger.setLevel(logging.DEBUG)
    elif args.quiet:
        logger.setLevel(logging.WARNING)
    else:
        logger.setLevel(logging.INFO)


def run_command(argv):
    """Runs one subcommand and returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "compare" and bool(args.config) == bool(args.scenario):
            parser.error("compare needs exactly one of CONFIG and --scenario")
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2

    _set_verbosity(args)
    try:
        return _COMMANDS[args.command](args)
    except LambdaError as err:
        logger.error("%s failed: %s", args.command, err)
        record = build_error_record(err)
        sys.stderr.write(jsonify(record))
        out = getattr(args, "resolved_output", None)
        if out is not None and os.path.isdir(out):
            try:
                write_error(out, record)
            except LambdaError as io_err:
                logger.error("cannot write error record: %s", io_err)
        return 1


def main():
    sys.exit(run_command(sys.argv[1:]))
