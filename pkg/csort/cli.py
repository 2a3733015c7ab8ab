"""
Command line front end: solve, dual, layers, verify, quant, example and config.

Exit codes are 0 on success, 1 when input or parameters are rejected or a
check fails, and 2 when the library breaks one of its own invariants.
"""
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
#
# Copyright (C) 2025 The csort authors
#
import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field

from csort import layering, oracle, quant
from csort.config import Preferences
from csort.cost import PowerCostParams, ProductionSpec, TabulatedFunction, TechnologyPrimitives, power_params_from_primitives
from csort.distributions import DiscreteDistribution, common_component, read_csv
from csort.dual import DualSolution, SubpairNode, SubpairForest, dual_from_assignment, local_potentials, solve_beta_system
from csort.enums import ExitCode, Method
from csort.errors import CSortError, InputError, InternalInvariantViolation
from csort.solver import Assignment, solve

log = logging.getLogger(__name__)

POWER_FLAGS = ("zeta_p", "rho_p", "zeta_k", "rho_k")
PRIMITIVE_FLAGS = ("B_p", "eta_p", "B_k", "eta_k")
EXAMPLES = ("reflecting-binomial", "mixture", "dual-worked")


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as input errors instead of exiting"""
    def error(self, message: str):
        raise InputError(message)


@dataclass
class RunConfig:
    """Validated command line settings shared by every subcommand"""
    subcommand: str
    inputs: dict[str, str] = field(default_factory=dict)
    cost: dict[str, float] = field(default_factory=dict)
    method: Method = Method.EFFICIENT
    seed: int = 0
    output: str|None = None
    verbosity: int = 0
    threads: int = 1

    @classmethod
    def from_args(cls, args: argparse.Namespace, prefs: Preferences) -> "RunConfig":
        inputs = {}
        for flag in ("workers", "jobs", "assignment", "dual", "economy", "wage_percentiles", "occupation_map", "data_moments", "g_table", "h_table"):
            path = getattr(args, flag, None)
            if path is None:
                continue
            if not os.path.isfile(path):
                raise InputError(f"--{flag.replace('_', '-')}: file not found: {path}")
            inputs[flag] = path

        cost = {}
        for flag in POWER_FLAGS + PRIMITIVE_FLAGS:
            value = getattr(args, flag, None)
            if value is not None:
                cost[flag] = value
        power = [flag for flag in POWER_FLAGS if flag in cost]
        primitives = [flag for flag in PRIMITIVE_FLAGS if flag in cost]
        if power and primitives:
            raise InputError(f"--{power[0].replace('_', '-')} conflicts with --{primitives[0].replace('_', '-')}: give either power cost or technology primitive flags")

        method = prefs.get_method()
        if getattr(args, "method", None):
            method = Method.from_label(args.method)

        return cls(
            subcommand=args.subcommand,
            inputs=inputs,
            cost=cost,
            method=method,
            seed=getattr(args, "seed", 0) or 0,
            output=getattr(args, "out", None),
            verbosity=args.verbose,
            threads=args.threads or prefs.get_threads(),
        )

    def cost_params(self, prefs: Preferences) -> PowerCostParams:
        """
        Power cost from flags or primitives. A side with none of its own
        flags copies the other side; nothing given falls back to saved defaults.
        """
        if any(flag in self.cost for flag in PRIMITIVE_FLAGS):
            values = {}
            for side, source in self._sources(("B", "eta")).items():
                if "B_" + source not in self.cost or "eta_" + source not in self.cost:
                    raise InputError(f"--B-{source} and --eta-{source} must be given together")
                for field in ("B", "eta"):
                    values[f"{field}_{side}"] = self.cost[f"{field}_{source}"]
            return power_params_from_primitives(TechnologyPrimitives(**values))

        defaults = prefs.get_cost_defaults()
        values = {}
        for side, source in self._sources(("zeta", "rho")).items():
            for field in ("zeta", "rho"):
                values[f"{field}_{side}"] = self.cost.get(f"{field}_{source}", defaults[f"{field}_{source}"])
        return PowerCostParams(**values)

    def _sources(self, fields: tuple[str, str]) -> dict[str, str]:
        """Side whose flags fill in each side of the cost"""
        given = {side: any(f"{field}_{side}" in self.cost for field in fields) for side in ("p", "k")}
        return {
            "p": "k" if given["k"] and not given["p"] else "p",
            "k": "p" if given["p"] and not given["k"] else "k",
        }


def setup_logging(verbosity: int):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("csort").setLevel(level)


def _add_cost_flags(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("cost", "Power cost parameters, or technology primitives (not both)")
    for flag in POWER_FLAGS + PRIMITIVE_FLAGS:
        group.add_argument(f"--{flag.replace('_', '-')}", dest=flag, type=float)


def _add_economy_flags(parser: argparse.ArgumentParser, required: bool = True):
    parser.add_argument("--workers", required=required, help="CSV with columns skill,mass")
    parser.add_argument("--jobs", required=required, help="CSV with columns skill,mass")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="csort", description="Optimal assignment with concave mismatch costs")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging (repeat for debug)")
    parser.add_argument("--threads", type=int, default=None, help="Threads for per-layer solves (default: available cores)")
    commands = parser.add_subparsers(dest="subcommand", required=True, parser_class=ArgumentParser)

    cmd = commands.add_parser("solve", help="Optimal assignment of workers to jobs")
    _add_economy_flags(cmd)
    _add_cost_flags(cmd)
    cmd.add_argument("--method", choices=[m.label for m in Method])
    cmd.add_argument("--out")

    cmd = commands.add_parser("dual", help="Wages and firm values for an assignment")
    cmd.add_argument("--assignment", required=True, help="Assignment JSON written by solve")
    cmd.add_argument("--g-table", help="CSV with columns skill,value (default: identity)")
    cmd.add_argument("--h-table", help="CSV with columns skill,value (default: identity)")
    _add_cost_flags(cmd)
    cmd.add_argument("--out")

    cmd = commands.add_parser("layers", help="Layers of the mismatched part of an economy")
    _add_economy_flags(cmd)
    cmd.add_argument("--out")

    cmd = commands.add_parser("verify", help="Check solver and dual output")
    cmd.add_argument("--trials", type=int, default=1000)
    cmd.add_argument("--seed", type=int, default=0)
    cmd.add_argument("--max-atoms", type=int, default=12)
    cmd.add_argument("--assignment", help="Check this assignment instead of random economies")
    cmd.add_argument("--dual", help="Dual JSON written by the dual subcommand")
    _add_economy_flags(cmd, required=False)
    _add_cost_flags(cmd)
    cmd.add_argument("--out")

    cmd = commands.add_parser("quant", help="Within-occupation wage dispersion report")
    source = cmd.add_mutually_exclusive_group(required=True)
    source.add_argument("--economy", help="Economy JSON")
    source.add_argument("--preset", choices=sorted(quant.PRESETS))
    cmd.add_argument("--wage-percentiles", help="CSV with columns rank,wage")
    cmd.add_argument("--occupation-map", help="CSV with columns lo,hi,label")
    cmd.add_argument("--data-moments", help="CSV with columns lo,hi,var_log_wage,abs_dev_log_wage")
    cmd.add_argument("--method", choices=[m.label for m in Method])
    cmd.add_argument("--plot-data", help="Write occupation_rank,mean_wage,var_log_wage,employment_share CSV")
    cmd.add_argument("--plot", help="Write a PNG chart")
    cmd.add_argument("--out")

    cmd = commands.add_parser("example", help="Print the built-in worked examples")
    cmd.add_argument("--name", choices=EXAMPLES)
    cmd.add_argument("--out")

    cmd = commands.add_parser("config", help="Show or change saved defaults")
    cmd.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="e.g. zeta_p=0.5, method=simple, threads=4")
    return parser


def _emit(data, output: str|None):
    text = json.dumps(data, indent=2)
    if output:
        try:
            with open(output, "w", encoding="utf-8") as f:
                f.write(text + "\n")
        except OSError as e:
            raise InputError(f"Cannot write {output}: {e.strerror}") from e
        log.info("Wrote %s", output)
    else:
        print(text)


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"{path}: not UTF-8 text (byte {e.start})") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: not valid JSON ({e.msg} at line {e.lineno})") from e


def _read_table(path: str) -> TabulatedFunction:
    """`skill,value` CSV as a tabulated function"""
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            if not reader.fieldnames or "skill" not in reader.fieldnames or "value" not in reader.fieldnames:
                raise InputError(f"{path}: header must contain the columns 'skill' and 'value'")
            rows = sorted((float(row["skill"]), float(row["value"])) for row in reader)
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"{path}: not UTF-8 text (byte {e.start})") from e
    except ValueError as e:
        raise InputError(f"{path}: fields 'skill' and 'value' must be numbers") from e
    return TabulatedFunction(tuple(s for s, _ in rows), tuple(v for _, v in rows))


def _production(config: RunConfig, skills: list[float], cost: PowerCostParams) -> ProductionSpec:
    spec = ProductionSpec.identity(skills, cost)
    g = _read_table(config.inputs["g_table"]) if "g_table" in config.inputs else spec.g
    h = _read_table(config.inputs["h_table"]) if "h_table" in config.inputs else spec.h
    return ProductionSpec(g, h, cost)


def _economy(config: RunConfig) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    for flag in ("workers", "jobs"):
        if flag not in config.inputs:
            raise InputError(f"the following arguments are required: --{flag}")
    return read_csv(config.inputs["workers"]), read_csv(config.inputs["jobs"])


def cmd_solve(config: RunConfig, prefs: Preferences) -> ExitCode:
    F, G = _economy(config)
    cost = config.cost_params(prefs)
    assignment = solve(F, G, cost, config.method, config.threads)
    log.info("Total mismatch cost %.12g over %d pairs", assignment.total_cost, len(assignment.pairs))
    _emit(assignment.to_json(cost), config.output)
    return ExitCode.SUCCESS


def cmd_dual(config: RunConfig, prefs: Preferences) -> ExitCode:
    assignment = Assignment.from_json(_read_json(config.inputs["assignment"]))
    cost = config.cost_params(prefs)
    F, G = assignment.marginals()
    spec = _production(config, sorted(set(F.skills) | set(G.skills)), cost)

    dualsol = dual_from_assignment(assignment, spec)
    report = oracle.check_duality(dualsol, assignment, spec)
    if not report.passed:
        raise InternalInvariantViolation(f"Constructed dual fails its checks: {report.to_json()['flags']}")
    _emit({**dualsol.to_json(), "gap": report.gap}, config.output)
    return ExitCode.SUCCESS


def cmd_layers(config: RunConfig, prefs: Preferences) -> ExitCode: # pylint: disable=unused-argument
    F, G = _economy(config)
    _, F_rem, G_rem = common_component(F, G)
    _emit([layer.to_json() for layer in layering.decompose_layers(F_rem, G_rem)], config.output)
    return ExitCode.SUCCESS


def _verify_assignment(config: RunConfig, prefs: Preferences) -> ExitCode:
    assignment = Assignment.from_json(_read_json(config.inputs["assignment"]))
    cost = config.cost_params(prefs)
    if "workers" in config.inputs or "jobs" in config.inputs:
        F, G = _economy(config)
    else:
        F, G = assignment.marginals()
    spec = ProductionSpec.identity(sorted(set(F.skills) | set(G.skills)), cost)

    result = {"assignment": oracle.check_assignment(assignment, F, G, cost).to_json()}
    if "dual" in config.inputs:
        data = _read_json(config.inputs["dual"])
        try:
            phi, w, v = ({float(skill): float(value) for skill, value in data[key].items()} for key in ("phi", "w", "v"))
        except (KeyError, AttributeError, TypeError, ValueError) as e:
            raise InputError(f"{config.inputs['dual']}: needs 'phi', 'w' and 'v' maps of skill to value") from e
        dualsol = DualSolution(phi, {s: -value for s, value in phi.items()}, w, v)
    else:
        dualsol = dual_from_assignment(assignment, spec)
    result["duality"] = oracle.check_duality(dualsol, assignment, spec).to_json()

    _emit(result, config.output)
    if result["assignment"]["passed"] and result["duality"]["passed"]:
        return ExitCode.SUCCESS
    return ExitCode.VALIDATION_FAILURE


def cmd_verify(config: RunConfig, prefs: Preferences, args: argparse.Namespace) -> ExitCode:
    if "assignment" in config.inputs:
        return _verify_assignment(config, prefs)

    if args.trials < 1 or args.max_atoms < 1:
        raise InputError("--trials and --max-atoms must be positive")
    failures = oracle.run_trials(args.trials, config.seed, args.max_atoms)
    _emit({"trials": args.trials, "seed": config.seed, "failures": failures}, config.output)
    return ExitCode.INVARIANT_VIOLATION if failures else ExitCode.SUCCESS


def cmd_quant(config: RunConfig, prefs: Preferences, args: argparse.Namespace) -> ExitCode: # pylint: disable=unused-argument
    percentiles = quant.DEFAULT_WAGE_PERCENTILES
    if "wage_percentiles" in config.inputs:
        percentiles = quant.read_wage_percentiles(config.inputs["wage_percentiles"])

    if args.preset:
        economy = quant.PRESETS[args.preset](wage_percentiles=percentiles)
    else:
        economy = quant.load_economy(config.inputs["economy"], percentiles)

    method = config.method
    assignment = solve(economy.F, economy.G, economy.spec.cost, method, config.threads)
    if method == Method.CONVEX_PAM:
        dualsol = dual_from_assignment(solve(economy.F, economy.G, economy.spec.cost), economy.spec)
    else:
        dualsol = dual_from_assignment(assignment, economy.spec)

    occupation_map = quant.read_occupation_map(config.inputs["occupation_map"]) if "occupation_map" in config.inputs else None
    data_moments = quant.read_data_moments(config.inputs["data_moments"]) if "data_moments" in config.inputs else None
    segments = sorted(data_moments) if data_moments else quant.DEFAULT_SEGMENTS
    report = quant.dispersion_report(economy, assignment, dualsol, segments, occupation_map, data_moments)

    if args.plot_data:
        report.write_plot_csv(args.plot_data)
    if args.plot:
        from csort.rendering import render_dispersion_plot # pylint: disable=import-outside-toplevel
        png = render_dispersion_plot(report)
        try:
            with open(args.plot, "wb") as f:
                f.write(png.getvalue())
        except OSError as e:
            raise InputError(f"Cannot write {args.plot}: {e.strerror}") from e

    _emit({"economy": economy.label, "method": method.label, **report.to_json()}, config.output)
    return ExitCode.SUCCESS


def worked_dual_example() -> dict:
    """Nested pairs (3, 4) and (7, 8) inside (1, 10) under a square root cost"""
    cost = PowerCostParams.symmetric(0.5, 1.0)
    root = SubpairNode(1.0, 10.0, [SubpairNode(3.0, 4.0), SubpairNode(7.0, 8.0)])
    system = solve_beta_system(root.children, cost, root)
    phi = local_potentials(SubpairForest([root]), cost)
    return {
        "x": [1.0, 3.0, 7.0],
        "z": [10.0, 4.0, 8.0],
        "cost": cost.to_json(),
        "beta_interval": [system.L[(1, 2)], system.U[(1, 2)]],
        "beta_2": system.solution[0],
        "phi": {
            "x1": phi[3.0], "z1": phi[4.0],
            "x2": phi[7.0], "z2": phi[8.0],
            "x0": phi[1.0], "z0": phi[10.0],
        },
        "expected_phi": {
            "x1": 5 - 2 * math.sqrt(3), "z1": 4 - 2 * math.sqrt(3),
            "x2": 1.0, "z2": 0.0,
            "x0": 4 - math.sqrt(3), "z0": 1 - math.sqrt(3),
        },
    }


def _binomial_example(name: str) -> dict:
    fixture = quant.PRESETS[name]()
    cost = PowerCostParams.symmetric(0.5, 1.0)
    assignment = solve(fixture.F, fixture.G, cost)
    return {
        "workers": fixture.F.to_json(),
        "jobs": fixture.G.to_json(),
        "assignment": assignment.to_json(cost),
    }


def cmd_example(config: RunConfig, args: argparse.Namespace) -> ExitCode:
    names = [args.name] if args.name else list(EXAMPLES)
    output = {}
    for name in names:
        output[name] = worked_dual_example() if name == "dual-worked" else _binomial_example(name)
    _emit(output if len(names) > 1 else output[names[0]], config.output)
    return ExitCode.SUCCESS


def cmd_config(prefs: Preferences, args: argparse.Namespace) -> ExitCode:
    for item in args.set:
        key, _, value = item.partition("=")
        try:
            match key:
                case "method":
                    prefs.set_method(Method.from_label(value))
                case "threads":
                    prefs.set_threads(int(value))
                case _:
                    prefs.set_cost_default(key, float(value))
        except (KeyError, ValueError) as e:
            raise InputError(f"--set {item}: unknown key or invalid value") from e
    _emit(prefs.items(), None)
    return ExitCode.SUCCESS


def run(argv: list[str], prefs: Preferences|None = None) -> int:
    """Parse argv, run the subcommand and return the process exit code"""
    try:
        args = build_parser().parse_args(argv)
        setup_logging(args.verbose)
        prefs = prefs or Preferences()
        config = RunConfig.from_args(args, prefs)

        match args.subcommand:
            case "solve":
                return cmd_solve(config, prefs)
            case "dual":
                return cmd_dual(config, prefs)
            case "layers":
                return cmd_layers(config, prefs)
            case "verify":
                return cmd_verify(config, prefs, args)
            case "quant":
                return cmd_quant(config, prefs, args)
            case "example":
                return cmd_example(config, args)
            case "config":
                return cmd_config(prefs, args)
    except InternalInvariantViolation as e:
        log.error("Internal invariant violated: %s", e)
        return ExitCode.INVARIANT_VIOLATION
    except CSortError as e:
        log.error("%s", e)
        return e.exit_code
    return ExitCode.VALIDATION_FAILURE

