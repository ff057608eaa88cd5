"""Closed-form attention for grid layouts.

The browsing machine extends the linear one with row-level events. Before
each row after the first the user survives with probability rho (otherwise
abandons). Every row, including the first, is skipped outright with
probability gamma. Inside a row that is not skipped, cells are visited left to
right with the linear select / abandon / continue step. A skipped row, or a
row traversed without selection or abandonment, leads to the next row.

For cell (k, c) with per-row traversal survival
``S_m = prod_{j in row m} (1 - psi'(j)) (1 - alpha(j))``::

    P[E] = rho^(k-1) * prod_{m<k} [gamma + (1 - gamma) S_m]
           * (1 - gamma) * prod_{c'<c} (1 - psi'(k, c')) (1 - alpha(k, c'))

where psi' is the selection probability after optional middle-bias
weighting. The beta "slower decay" correction is not a probability machine;
it is available only through :func:`paper_formula_examine_prob`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .config import (
    BrowsingConfig,
    ConfigError,
    DecayMode,
    RelevanceVector,
    Violation,
    abandon_vector,
    selection_vector,
)
from .layout import LayoutKind, LayoutSpec
from .linear import AttentionProfile, _frozen, examine_prob_linear


@dataclass(frozen=True)
class GridAttentionProfile(AttentionProfile):
    # probability of arriving at each row (after the row-boundary survival draw)
    row_reach: np.ndarray = field(default_factory=lambda: np.zeros(0))
    # probability of skipping each row, given it was reached
    row_skipped: np.ndarray = field(default_factory=lambda: np.zeros(0))
    # row-boundary (1 - rho) share of total_abandon
    row_abandon: float = 0.0

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "row_reach", _frozen(self.row_reach))
        object.__setattr__(self, "row_skipped", _frozen(self.row_skipped))

    @property
    def row_skip_marginal(self) -> np.ndarray:
        """Unconditional probability that each row is skipped."""
        return self.row_reach * self.row_skipped


def middle_bias_weight(col: int, row_width: int, sigma: float) -> float:
    """Gaussian weight on a column, 1 at the row centre and symmetric about it."""
    if row_width < 1 or not 1 <= col <= row_width:
        raise ValueError(f"column {col} outside [1, {row_width}]")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    centre = (row_width + 1) / 2.0
    return math.exp(-((col - centre) ** 2) / (2.0 * sigma * sigma))


def effective_selection(
    config: BrowsingConfig, relevance: RelevanceVector, layout: LayoutSpec
) -> np.ndarray:
    """Per-rank selection probability with middle-bias weighting applied."""
    psi = selection_vector(relevance, config.selection)
    sigma = config.grid.middle_bias_sigma
    if sigma is None:
        return psi
    weights = np.empty(layout.n_items)
    for row, width in enumerate(layout.row_lengths, start=1):
        for col, rank in enumerate(layout.row_ranks(row), start=1):
            weights[rank - 1] = middle_bias_weight(col, width, sigma)
    return psi * weights


def _check_inputs(relevance: RelevanceVector, layout: LayoutSpec) -> None:
    if len(relevance) != layout.n_items:
        raise ValueError(
            f"relevance has {len(relevance)} grades but the layout has {layout.n_items} cells"
        )


def examine_prob_grid(
    config: BrowsingConfig, relevance: RelevanceVector, layout: LayoutSpec
) -> GridAttentionProfile:
    if config.grid.row_decay.mode is DecayMode.BETA:
        raise ConfigError(
            [
                Violation(
                    "error",
                    "grid.row_decay.beta",
                    config.grid.row_decay.value,
                    "beta slower-decay has no state-machine semantics; "
                    "use paper_formula_examine_prob(SLOWER_DECAY_BETA, ...)",
                )
            ]
        )
    _check_inputs(relevance, layout)
    psi = effective_selection(config, relevance, layout)
    alpha = abandon_vector(relevance, config.abandon)
    gamma = config.grid.row_skip
    rho = config.grid.rho

    n_rows = layout.n_rows
    examine = np.empty(layout.n_items)
    row_reach = np.empty(n_rows)
    cell_abandon = 0.0
    row_abandon = 0.0
    alive = 1.0
    for k in range(n_rows):
        if k == 0:
            reach = alive
        else:
            row_abandon += alive * (1.0 - rho)
            reach = alive * rho
        row_reach[k] = reach
        p = reach * (1.0 - gamma)
        for rank in layout.row_ranks(k + 1):
            i = rank - 1
            examine[i] = p
            missed = p * (1.0 - psi[i])
            cell_abandon += missed * alpha[i]
            p = missed * (1.0 - alpha[i])
        alive = reach * gamma + p

    select = examine * psi
    return GridAttentionProfile(
        examine=examine,
        select=select,
        total_select=float(select.sum()),
        total_abandon=float(cell_abandon + row_abandon),
        total_exhaust=float(alive),
        row_reach=row_reach,
        row_skipped=np.full(n_rows, gamma),
        row_abandon=float(row_abandon),
    )


def select_prob_grid(
    config: BrowsingConfig, relevance: RelevanceVector, layout: LayoutSpec
) -> np.ndarray:
    return examine_prob_grid(config, relevance, layout).select


def attention_profile(
    config: BrowsingConfig, relevance: RelevanceVector, layout: LayoutSpec
) -> AttentionProfile:
    """Closed-form profile for any layout.

    Linear-vertical layouts with neutral grid behaviour use the linear closed
    form; everything else goes through the grid machine (which reduces to the
    linear one on a single column).
    """
    if layout.kind is LayoutKind.LINEAR_VERTICAL and config.grid.is_neutral:
        _check_inputs(relevance, layout)
        return examine_prob_linear(config, relevance)
    return examine_prob_grid(config, relevance, layout)


# --- formulas as published ---------------------------------------------------


class PaperVariant(enum.Enum):
    SLOWER_DECAY_BETA = "slower_decay_beta"
    ROW_SKIP_LITERAL = "row_skip"


@dataclass(frozen=True)
class PaperFormulaResult:
    examine: np.ndarray
    notes: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "examine", _frozen(self.examine))


_SLOWER_DECAY_NOTES = (
    "exponent on beta taken as r(i)-1 so the first row is unmodified",
    "product runs over preceding ranks j = 1..i-1",
    "min(., 1) clamp applied to the product, not inside it",
    "abandonment, row skipping and row continuation are not part of this formula",
    "output is a corrected score, not a state-machine probability",
)

_ROW_SKIP_NOTES = (
    "bracket over prior rows factorised per row as prod_m [gamma + (1-gamma) S_m]",
    "within-row product bounded to columns before c(i)",
    "empty prior-row bracket taken as 1 (summing the two empty products would give 2)",
    "current row is not subject to skipping, so first-row cells start at 1",
    "abandonment and row continuation are not part of this formula",
)


def paper_formula_examine_prob(
    variant: PaperVariant | str,
    config: BrowsingConfig,
    relevance: RelevanceVector,
    layout: LayoutSpec,
) -> PaperFormulaResult:
    """Evaluate a published grid formula with its index repairs noted.

    ``SLOWER_DECAY_BETA``: ``min(beta^(r(i)-1) * prod_{j<i} (1 - psi'(j)), 1)``;
    needs a beta row decay in ``config``.

    ``ROW_SKIP_LITERAL``: ``prod_{m<r(i)} [gamma + (1-gamma) prod_{j in row m}
    (1 - psi'(j))] * prod_{c'<c(i)} (1 - psi'(r(i), c'))``. Relative to
    :func:`examine_prob_grid` (with alpha = 0, rho = 1) this omits the
    ``(1 - gamma)`` entry factor of the current row.
    """
    variant = PaperVariant(variant)
    _check_inputs(relevance, layout)
    psi = effective_selection(config, relevance, layout)
    miss = 1.0 - psi
    examine = np.empty(layout.n_items)

    if variant is PaperVariant.SLOWER_DECAY_BETA:
        decay = config.grid.row_decay
        if decay.mode is not DecayMode.BETA:
            raise ValueError("slower_decay_beta needs grid.row_decay mode 'beta' with a value")
        beta = decay.value
        prefix = 1.0
        for row in range(1, layout.n_rows + 1):
            boost = beta ** (row - 1)
            for rank in layout.row_ranks(row):
                examine[rank - 1] = min(boost * prefix, 1.0)
                prefix *= miss[rank - 1]
        return PaperFormulaResult(examine, _SLOWER_DECAY_NOTES)

    gamma = config.grid.row_skip
    prior = 1.0
    for row in range(1, layout.n_rows + 1):
        survive = 1.0
        for rank in layout.row_ranks(row):
            examine[rank - 1] = prior * survive
            survive *= miss[rank - 1]
        prior *= gamma + (1.0 - gamma) * survive
    return PaperFormulaResult(examine, _ROW_SKIP_NOTES)
