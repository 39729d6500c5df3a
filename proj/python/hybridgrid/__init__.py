"""Hybrid amplitude-amplification agent on a walled gridworld."""

from ._core import (
    CacheError,
    CapExceeded,
    ConfigError,
    CurveStore,
    GridworldSpec,
    MissingCurvePoint,
    SummaryStats,
    __version__,
    amplified_probability,
    default_config_yaml,
    estimate_mc,
    exact_dp,
    expected_first_passage,
    expected_fixed_length_classical,
    expected_fixed_length_hybrid,
    first_hit_masses,
    jump_probability,
    pinit_min_closed_form,
    run,
    self_check,
    summary_json,
    sweep,
    table_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
