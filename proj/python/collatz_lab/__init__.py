"""Exact integer experiments on the accelerated 3n+1 map.

Everything crosses the boundary as Python ints and fractions.Fraction;
no value is ever rounded. See the package README for the experiment
subcommands mirrored by run().
"""

from ._core import (
    Bound,
    ConfigError,
    below_drop_threshold,
    census,
    census_oracle,
    compose,
    density_profile,
    drop_density_threshold,
    drop_guarantee_audit,
    drop_scan,
    finite_density,
    first_drop,
    h_image,
    image_cardinality_check,
    image_inclusion_check,
    iterate,
    parity_sum,
    parity_sum_below,
    parity_vector,
    residue_parity_table,
    run,
    step,
    trajectory,
    window_census,
    __version__,
)

__all__ = [
    "Bound",
    "ConfigError",
    "below_drop_threshold",
    "census",
    "census_oracle",
    "compose",
    "density_profile",
    "drop_density_threshold",
    "drop_guarantee_audit",
    "drop_scan",
    "finite_density",
    "first_drop",
    "h_image",
    "image_cardinality_check",
    "image_inclusion_check",
    "iterate",
    "parity_sum",
    "parity_sum_below",
    "parity_vector",
    "residue_parity_table",
    "run",
    "step",
    "trajectory",
    "window_census",
    "__version__",
]
