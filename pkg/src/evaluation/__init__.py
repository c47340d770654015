import math
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd
import wandb
from cytoolz import merge_with

from src.exceptions import ValidationError

PROVENANCES = ("simulated", "analytic", "calibrated")


def metric_entry(value: float,
                 provenance: str = "simulated",
                 reference: Optional[float] = None,
                 reference_std: Optional[float] = None,
                 std: Optional[float] = None) -> Dict[str, Optional[float]]:
    """
    One metric of a JSON report: the value, how it was obtained and, where one exists, the reference
    value (with its uncertainty) it should be compared against. Infinite values are stored as None
    """
    if provenance not in PROVENANCES:
        raise ValidationError(f"Unknown provenance {provenance!r}, expected one of {PROVENANCES}")

    value = float(value)
    entry = {
        "value": value if math.isfinite(value) else None,
        "provenance": provenance,
        "reference": reference,
        "reference_std": reference_std,
    }
    if std is not None:
        entry["std"] = float(std)

    return entry


def summarize_results(results: List[dict],
                      index: Sequence[str],
                      log_wandb: bool = False,
                      prefix_all_metrics: str = "all_metrics",
                      prefix_avg_metrics: str = "avg_metrics") -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Tabulate one dict of figures of merit per row (channel, table row, ...) and append their mean
    as the "avg_results" row. Non numeric columns are kept in the table and left out of the mean
    """

    # from list of dicts to dict of lists
    results = merge_with(list, *results)

    results_df = pd.DataFrame(results)
    results_df.index = list(index)

    avg_results_df = pd.DataFrame(results_df.mean(numeric_only=True)).transpose()
    avg_results_df.index = ["avg_results"]

    print("*******************************")
    print(results_df)
    print("\nAverage results:")
    print(avg_results_df)
    print("*******************************")

    if log_wandb:
        dict_to_log = {
            f"{prefix_all_metrics}/metrics_table": wandb.Table(dataframe=results_df.reset_index()),
        }

        for column in avg_results_df.columns:
            dict_to_log[f"{prefix_avg_metrics}/{column}"] = avg_results_df.iloc[0][column].item()

        wandb.log(dict_to_log)

    return avg_results_df, results_df
