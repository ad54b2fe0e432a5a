"""Python bindings for the gwbridge C++ core."""

import json

from ._gwbridge import (
    CSV_HEADER,
    Offspring,
    Rng,
    Tree,
    bridge_dp,
    default_config,
    extinction_prob,
    pgf,
    return_prob,
    run_checks,
    sample_gw,
    sample_gw_survival,
    z_confinement,
    z_first_return_pmf,
)
from ._gwbridge import run_experiment as _run_experiment


def run_experiment(config, out_dir=""):
    """Run an experiment from a dict or JSON string.

    Returns (records, summary, ok); records is a list of dicts keyed like the CSV columns.
    """
    if not isinstance(config, str):
        config = json.dumps(config)
    records, summary, ok = _run_experiment(config, str(out_dir))
    return records, json.loads(summary), ok


__all__ = [
    "CSV_HEADER",
    "Offspring",
    "Rng",
    "Tree",
    "bridge_dp",
    "default_config",
    "extinction_prob",
    "pgf",
    "return_prob",
    "run_checks",
    "run_experiment",
    "sample_gw",
    "sample_gw_survival",
    "z_confinement",
    "z_first_return_pmf",
]
