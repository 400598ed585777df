"""Command-line entry point: ``twptr simulate | compare | hil``.

Exit status is 0 on success, 1 on any configuration, numeric, I/O or
protocol error and 2 on a usage error; every failure prints exactly one
line on standard error.
"""

import argparse
import dataclasses
import sys

from twptr.closed_loop import ScenarioKind, compare_runs, compute_metrics, run_scenario
from twptr.config import RunConfig, load_config
from twptr.errors import TwptrError
from twptr.hil import controller_client, parse_endpoint, plant_serve
from twptr.telemetry import read_csv, write_csv

SCENARIOS = [kind.value for kind in ScenarioKind]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _load(path):
    return load_config(path) if path else RunConfig()


def _scenario(config, kind=None, duration=None):
    scenario = config.scenario
    changes = {}
    if kind is not None:
        changes["kind"] = ScenarioKind(kind)
    if duration is not None:
        changes["duration"] = duration
    return dataclasses.replace(scenario, **changes) if changes else scenario


def _session(config, endpoint, realtime):
    parse_endpoint(endpoint)
    changes = {"endpoint": endpoint}
    if realtime:
        changes["realtime"] = True
    return dataclasses.replace(config.session, **changes)


def _print_metrics(kind, traj, out):
    print(f"scenario: {kind.value}", file=out)
    print(f"samples: {len(traj)}", file=out)
    if len(traj):
        m = compute_metrics(traj)
        print(f"max_abs_phi: {m.max_abs_phi:.17g}", file=out)
        print(f"max_abs_tau: {m.max_abs_tau:.17g}", file=out)
        print(f"rms_phi: {m.rms_phi:.17g}", file=out)


def cmd_simulate(args, out):
    config = _load(args.config)
    scenario = _scenario(config, args.scenario, args.duration)
    traj = run_scenario(scenario)
    write_csv(traj, args.out)
    _print_metrics(scenario.kind, traj, out)


def cmd_compare(args, out):
    base = compute_metrics(read_csv(args.base))
    improved = compute_metrics(read_csv(args.improved))
    c = compare_runs(base, improved)
    print(f"displacement_reduction: {100 * c.displacement_reduction:.2f}%", file=out)
    print(f"torque_reduction: {100 * c.torque_reduction:.2f}%", file=out)
    print(f"stability_increase: {100 * c.stability_increase:.2f}%", file=out)


def cmd_hil_plant(args, out):
    config = _load(args.config)
    session = _session(config, args.listen, args.realtime)
    scenario = _scenario(config, ScenarioKind.HIERARCHICAL.value, args.duration)

    def ready(address):
        print(f"listening on {address[0]}:{address[1]}", file=out, flush=True)

    traj = plant_serve(session, scenario, ready=ready)
    write_csv(traj, args.out)
    _print_metrics(scenario.kind, traj, out)


def cmd_hil_control(args, out):
    config = _load(args.config)
    session = _session(config, args.connect, args.realtime)
    log = controller_client(
        session, config.robot, config.motor, config.scenario.delay_target, config.scenario.substeps
    )
    out_of_sync = sum(not v.in_sync for v in log.sync)
    print(f"ticks: {len(log)}", file=out)
    print(f"out_of_sync_ticks: {out_of_sync}", file=out)


def build_parser():
    parser = _Parser(prog="twptr", description="Two-wheeled balancing robot simulator and HIL harness.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run one scenario and write CSV telemetry")
    sim.add_argument("--scenario", choices=SCENARIOS, help="overrides the config's scenario key")
    sim.add_argument("--config", help="key = value config file (defaults if omitted)")
    sim.add_argument("--out", required=True, help="CSV output path")
    sim.add_argument("--duration", type=float, help="seconds; overrides the config's duration key")
    sim.set_defaults(func=cmd_simulate)

    cmp_ = sub.add_parser("compare", help="compare two CSV runs")
    cmp_.add_argument("--base", required=True)
    cmp_.add_argument("--improved", required=True)
    cmp_.set_defaults(func=cmd_compare)

    hil = sub.add_parser("hil", help="networked plant / controller processes")
    roles = hil.add_subparsers(dest="role", required=True, parser_class=_Parser)
    plant = roles.add_parser("plant", help="serve the plant side")
    plant.add_argument("--listen", required=True, metavar="HOST:PORT")
    plant.add_argument("--config")
    plant.add_argument("--out", required=True, help="CSV output path")
    plant.add_argument("--duration", type=float)
    plant.add_argument("--realtime", action="store_true", help="pace ticks to the wall clock")
    plant.set_defaults(func=cmd_hil_plant)
    control = roles.add_parser("control", help="run the controller side")
    control.add_argument("--connect", required=True, metavar="HOST:PORT")
    control.add_argument("--config")
    control.add_argument("--realtime", action="store_true")
    control.set_defaults(func=cmd_hil_control)
    return parser


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return 2
    try:
        args.func(args, out)
    except (TwptrError, OSError, ValueError, ArithmeticError) as exc:
        message = " ".join(str(exc).split()) or type(exc).__name__
        print(f"error: {type(exc).__name__}: {message}", file=err)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
