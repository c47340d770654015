import argparse
import dataclasses
import json
import os
import sys
import warnings

import numpy as np
import pandas as pd
import wandb

from src import DEFAULT_CONFIG_PATH
from src.config import load_scenario_config
from src.evaluation.metrics import Purity
from src.exceptions import QMemError, ConvergenceWarning
from src.mux.conversion import TimingParameters
from src.mux.schedule import load_schedule, compile_schedule
from src.qutrit.states import BASIS_LABELS
from src.scenarios import available_scenarios
from src.scenarios.common import config_snapshot
from src.tomography import load_records_csv, reconstruct_state
from src.utils import init_wandb

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3


def run_main(args: argparse.Namespace) -> int:
    scenario_names = list(available_scenarios) if args.scenario == "all" else [args.scenario]

    for name in scenario_names:
        config = load_scenario_config(args.config, scenario=name, seed=args.seed, out_dir=args.out,
                                      log_wandb=args.log_wandb)

        print("Experiment configuration:")
        print(dataclasses.asdict(config))

        print(f"\n########## Running scenario {name} ##########")

        _, scenario_main = available_scenarios[name]
        with init_wandb(name, 'run', log=config.log_wandb):

            if config.log_wandb:
                wandb.config.update(config_snapshot(config))

            scenario_main(config)

        print()

    return EXIT_OK


def list_main(args: argparse.Namespace) -> int:
    if args.format == "json":
        print(json.dumps([{"name": name, "description": description}
                          for name, (description, _) in available_scenarios.items()], indent=2))
    else:
        width = max(len(name) for name in available_scenarios)
        for name, (description, _) in available_scenarios.items():
            print(f"{name:<{width}}  {description}")

    return EXIT_OK


def validate_main(args: argparse.Namespace) -> int:
    config = load_scenario_config(args.config)
    schedule = load_schedule(args.schedule)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        plan = compile_schedule(schedule, TimingParameters.from_config(config))

    for warning in caught:
        print(f"warning: {warning.message}")

    print(plan.summary())
    return EXIT_OK


def reconstruct_main(args: argparse.Namespace) -> int:
    if args.group is None:
        groups = {"records": load_records_csv(args.counts)}
    else:
        groups = load_records_csv(args.counts, group_by=args.group)

    purity = Purity()

    rows = []
    for label, records in groups.items():
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ConvergenceWarning)
            result = reconstruct_state(records)

        for warning in caught:
            print(f"warning ({label}): {warning.message}")

        populations = np.real(np.diag(result.rho_hat.entries))
        rows.append({"purity": purity(result.rho_hat),
                     "log_likelihood": result.log_likelihood,
                     "iterations": result.iterations,
                     "converged": result.converged,
                     **{f"p_{basis}": p for basis, p in zip(BASIS_LABELS, populations)}})

    df = pd.DataFrame(rows, index=list(groups))
    df.index.name = args.group or "group"

    print(df.to_string(float_format=lambda x: f"{x:.6g}"))

    if args.out is not None:
        df.to_csv(args.out, float_format="%.10g", lineterminator="\n")
        print(f"Reconstructions saved into {args.out}")

    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Simulator of a multiplexed spin-wave AFC memory for OAM qutrits: '
                                                 'runs the scenarios, validates mode conversion schedules and reconstructs '
                                                 'states from count records')
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Run a scenario and write its JSON report and CSV artifacts")
    run_parser.add_argument('scenario', type=str, choices=list(available_scenarios) + ["all"],
                            help='Name of the scenario to run, "all" runs every scenario in order')
    run_parser.add_argument('-c', '--config', type=str, default=DEFAULT_CONFIG_PATH,
                            help='TOML configuration file', metavar='configs/default.toml')
    run_parser.add_argument('-seed', '--seed', type=int, default=None,
                            help='Top-level random seed, overrides the [tomography] seed of the config',
                            metavar='42')
    run_parser.add_argument('-o', '--out', type=str, default=None,
                            help='Directory where the reports are saved, one sub directory per scenario. '
                                 'By default reports/metrics',
                            metavar='None')
    run_parser.add_argument('--log_wandb', action=argparse.BooleanOptionalAction, default=False,
                            help='Log the metrics of the scenarios on wandb')
    run_parser.set_defaults(func=run_main)

    list_parser = subparsers.add_parser("list", help="List the available scenarios")
    list_parser.add_argument('--format', type=str, default="text", choices=["text", "json"],
                             help='Output format of the list')
    list_parser.set_defaults(func=list_main)

    validate_parser = subparsers.add_parser("validate", help="Compile a schedule file without executing it")
    validate_parser.add_argument('schedule', type=str, help='Schedule file to validate')
    validate_parser.add_argument('-c', '--config', type=str, default=DEFAULT_CONFIG_PATH,
                                 help='TOML configuration file providing the timing of the converter',
                                 metavar='configs/default.toml')
    validate_parser.set_defaults(func=validate_main)

    reconstruct_parser = subparsers.add_parser("reconstruct", help="Reconstruct the states of a count records file")
    reconstruct_parser.add_argument('counts', type=str, help='CSV file of count records, e.g. the counts.csv of qpt')
    reconstruct_parser.add_argument('--group', type=str, default=None,
                                    help='Column whose labels split the records into one state each',
                                    metavar='input_state')
    reconstruct_parser.add_argument('-o', '--out', type=str, default=None,
                                    help='CSV file where the table of reconstructions is saved', metavar='None')
    reconstruct_parser.set_defaults(func=reconstruct_main)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if getattr(args, "log_wandb", False):

        if 'WANDB_API_KEY' not in os.environ:
            parser.error('Cannot log run to wandb if environment variable "WANDB_API_KEY" is not present. '
                         'Please set the environment variable and add the api key for wandb')

        if 'WANDB_ENTITY' not in os.environ:
            parser.error('Cannot log run to wandb if environment variable "WANDB_ENTITY" is not present. '
                         'Please set the environment variable and add the entity for wandb logs')

    try:
        return args.func(args)
    except QMemError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
