"""Subshift languages, freezing potentials, dyadic tilings, pressure curves."""

__version__ = "0.1.0"

from .errors import (
    EmptyWindowError,
    FreezeshiftError,
    InputError,
    NonConvergedError,
    ResourceLimitError,
    UndeterminedError,
)
from .subshift import (
    Alphabet,
    BoxWindow,
    FullShift,
    Pattern,
    SFT,
    SinglePoint,
    SubshiftSpec,
    Substitution,
    enumerate_language,
    erg_box,
    generate_configuration,
    pattern_admissible,
    prefix_window,
    stat_box,
    substitution_expand,
)
from .complexity import (
    ComplexityTable,
    EntropyEstimate,
    KappaSequence,
    complexity_table,
    count_blocks,
    entropy_bounds,
    kappa_sequence,
    substitution_complexity_bound,
)
from .sequences import (
    AsymptoticClass,
    FreezingSequence,
    NoGoReport,
    build_cor53_sequence,
    build_thm34_sequence,
    build_thm51_sequence,
    build_thm52_sequence,
    custom_sequence,
    nogo_classify,
    power_sequence,
)
from .potential import (
    DistanceExponent,
    InteractionFamily,
    TruncatedPotential,
    distance_exponent,
    eval_truncated,
    generate_interaction,
    replacement_gain,
)
from .tiling import (
    DyadicTiling,
    OdometerOffset,
    PinSequence,
    pin_decomposition,
    tile_decomposition,
    tile_level,
)
from .pressure import (
    FreezeReport,
    PressureCurve,
    PressurePoint,
    SlackPolicy,
    SlantFit,
    default_beta_grid,
    detect_freeze,
    fit_slant,
    renewal_pressure,
    torus_pressure_2d,
    transfer_pressure_1d,
)
from .gibbs import (
    ChainState,
    FiniteSpecification,
    conditional_weights,
    full_support_rho,
    make_specification,
    metropolis_run,
)
from .specio import load_spec, save_spec
