"""Toeplitz sequences over odometers, their correlations with the Moebius
function, and block-complexity estimates of the sequences they generate."""

from .builder import (
    ConstructionError,
    PartialFilling,
    build_block_scheme,
    build_sparse_readout,
    build_readout,
    initial_indicator,
    mobius_fill,
    schedule_ones,
)
from .complexity import (
    block_census,
    find_claim_indices,
    sparse_pattern_search,
    verify_replacement,
    verify_zero_frequency,
)
from .correlation import correlate, strong_correlation_check
from .mixing import WindowPlan, apply_window_shift, detect_period, plan_step
from .mobius import (
    MobiusTable,
    density_independence_check,
    mobius_sieve,
    progression_hit_density,
    squarefree_density,
    tail_product_bound,
)
from .odometer import OdometerPoint, Scale, ScaleError, parse_scale
from .structure import aperiodic_part, periodic_part, regularity_defect

__version__ = "0.1.0"
