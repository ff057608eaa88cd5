"""Configurable user-browsing models for linear and grid result layouts."""

from .config import (
    AbandonModel,
    BrowsingConfig,
    ConfigError,
    DecayMode,
    GridBehavior,
    RelevanceVector,
    RowDecay,
    SelectionMode,
    SelectionModel,
    Violation,
    check_config,
    default_graded_map,
    preset,
    selection_prob,
    validate_config,
)
from .grid import (
    GridAttentionProfile,
    PaperVariant,
    attention_profile,
    examine_prob_grid,
    middle_bias_weight,
    paper_formula_examine_prob,
    select_prob_grid,
)
from .layout import CellAddress, LayoutKind, LayoutSpec, cell_to_rank, rank_to_cell
from .linear import AttentionProfile, examine_prob_linear, select_prob_linear
from .metrics import GroupAssignment, err, group_exposure, rbp
from .simulator import SimulationReport, ValidationVerdict, empirical_profile, simulate, validate

__version__ = "0.1.0"
