"""Closed-form attention for linear (single-column) rankings.

At each position the user examines the item, selects it with probability
psi(i) (and stops), otherwise abandons with probability alpha(i), otherwise
moves on. Examination of position i is therefore the product of the
per-position continuation factors (1 - psi(j)) * (1 - alpha(j)) over j < i.
Geometric, cascade and extended-cascade browsing are all parameterisations of
this one product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import BrowsingConfig, RelevanceVector, abandon_vector, selection_vector


def _frozen(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AttentionProfile:
    examine: np.ndarray
    select: np.ndarray
    total_select: float
    total_abandon: float
    total_exhaust: float

    def __post_init__(self):
        object.__setattr__(self, "examine", _frozen(self.examine))
        object.__setattr__(self, "select", _frozen(self.select))

    def __len__(self) -> int:
        return len(self.examine)

    @property
    def total(self) -> float:
        return self.total_select + self.total_abandon + self.total_exhaust


def _check_length(relevance: RelevanceVector, n: int | None) -> int:
    if n is not None and n != len(relevance):
        raise ValueError(f"relevance has {len(relevance)} grades but N={n} was requested")
    if len(relevance) < 1:
        raise ValueError("need at least one ranked item")
    return len(relevance)


def examine_prob_linear(
    config: BrowsingConfig, relevance: RelevanceVector, n: int | None = None
) -> AttentionProfile:
    """Examination and selection probabilities for every rank of a linear list.

    Grid behaviour in ``config`` is ignored. ``n`` optionally asserts the
    ranking length.
    """
    n = _check_length(relevance, n)
    psi = selection_vector(relevance, config.selection)
    alpha = abandon_vector(relevance, config.abandon)

    examine = np.empty(n)
    reach = 1.0
    abandoned = 0.0
    for i in range(n):
        examine[i] = reach
        missed = reach * (1.0 - psi[i])
        abandoned += missed * alpha[i]
        reach = missed * (1.0 - alpha[i])
    select = examine * psi
    return AttentionProfile(
        examine=examine,
        select=select,
        total_select=float(select.sum()),
        total_abandon=float(abandoned),
        total_exhaust=float(reach),
    )


def select_prob_linear(
    config: BrowsingConfig, relevance: RelevanceVector, n: int | None = None
) -> np.ndarray:
    return examine_prob_linear(config, relevance, n).select
