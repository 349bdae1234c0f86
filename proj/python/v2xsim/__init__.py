"""Deterministic NR-V2X sidelink simulator with distraction-based priority."""

from ._core import (
    Priority,
    __version__,
    classify,
    fit_sigma,
    los_probability,
    pathloss_db,
    rayleigh_pdf,
    records_csv,
    run_scenario,
    sample_distraction,
    sinr_db,
    tail_probability,
)

__all__ = [
    "Priority",
    "__version__",
    "classify",
    "fit_sigma",
    "los_probability",
    "pathloss_db",
    "rayleigh_pdf",
    "records_csv",
    "run_scenario",
    "sample_distraction",
    "sinr_db",
    "tail_probability",
]
