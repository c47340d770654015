import json
import os
from contextlib import contextmanager
from typing import Literal, List, Dict, Any, Union

import numpy as np
import pandas as pd
import wandb

from src import ScenarioConfig

SeedLike = Union[int, np.random.SeedSequence]


def make_rng(seed: SeedLike, *stream: int) -> np.random.Generator:
    """
    Function which builds an independent random generator for the given seed and stream ids.

    Every source of randomness of the package goes through this function (or `spawn_seeds`): the
    top-level seed passed via command line is never used to set a global random state. Stream ids
    are small non-negative integers identifying who consumes the generator (e.g. table row and
    channel index), so that adding a consumer never changes the draws of the others

    Returns:
        A numpy Generator seeded with SeedSequence(seed, spawn_key=stream)

    """
    return np.random.default_rng(stream_seed(seed, *stream))


def stream_seed(seed: SeedLike, *stream: int) -> np.random.SeedSequence:
    """Seed sequence of the given stream ids, to be handed over to functions taking a seed"""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(stream))

    return np.random.SeedSequence(seed, spawn_key=tuple(stream))


def spawn_seeds(seed: SeedLike, n: int, *stream: int) -> List[np.random.SeedSequence]:
    # children are a function of (seed, stream, child index) only
    return stream_seed(seed, *stream).spawn(n)


def write_json_report(report: Dict[str, Any], out_dir: str, file_name: str = "report.json") -> str:
    os.makedirs(out_dir, exist_ok=True)
    report_path = os.path.join(out_dir, file_name)

    # sorted keys, no timestamps
    with open(report_path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(report, f, indent=2, sort_keys=True, allow_nan=True)
        f.write("\n")

    return report_path


def write_csv_artifact(df: pd.DataFrame, out_dir: str, file_name: str, index: bool = False) -> str:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, file_name)
    df.to_csv(csv_path, index=index, float_format="%.10g", lineterminator="\n")

    return csv_path


def log_wandb(scenario_config: ScenarioConfig, parameters_to_log: dict):
    if scenario_config.log_wandb:
        wandb.log(parameters_to_log)


@contextmanager
def init_wandb(scenario_name: str, job_type: Literal['run', 'validate'], log: bool):
    if log:
        with wandb.init(project="Multiplexed-AFC-Memory", job_type=job_type, group=scenario_name):
            yield
    else:
        yield
