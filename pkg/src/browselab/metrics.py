"""Effectiveness metrics (RBP, ERR) and attention-based group exposure."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

from .config import RelevanceVector, default_graded_map
from .linear import AttentionProfile


def rbp(relevance: RelevanceVector, lam: float, binarize: bool = False) -> float:
    """Rank-biased precision over the N ranked items, without tail residual.

    Graded relevance is rejected unless ``binarize`` is set, in which case any
    positive grade counts as relevant.
    """
    if not (math.isfinite(lam) and 0.0 < lam < 1.0):
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    if not relevance.is_binary and not binarize:
        raise ValueError(
            f"rbp needs binary relevance (g_max=1), got g_max={relevance.g_max}; "
            "pass binarize=True to map positive grades to 1"
        )
    total = 0.0
    weight = 1.0
    for g in relevance.grades:
        if g > 0:
            total += weight
        weight *= lam
    return (1.0 - lam) * total


def err(relevance: RelevanceVector, grade_map: Sequence[float] | None = None) -> float:
    """Expected reciprocal rank under the graded cascade.

    ``grade_map[g]`` is the stopping probability for grade ``g``; defaults to
    ``(2**g - 1) / 2**g_max``.
    """
    if grade_map is None:
        grade_map = default_graded_map(relevance.g_max)
    score = 0.0
    not_stopped = 1.0
    for rank, g in enumerate(relevance.grades, start=1):
        if g >= len(grade_map):
            raise ValueError(f"grade {g} at rank {rank} outside grade_map domain [0, {len(grade_map) - 1}]")
        stop = grade_map[g]
        score += not_stopped * stop / rank
        not_stopped *= 1.0 - stop
    return score


@dataclass(frozen=True)
class GroupAssignment:
    group_of: Mapping[int, Hashable]

    @property
    def labels(self) -> set:
        return set(self.group_of.values())

    @classmethod
    def from_labels(cls, labels: Sequence[Hashable]) -> GroupAssignment:
        """Assignment from a per-rank label list (index 0 is rank 1)."""
        return cls({rank: label for rank, label in enumerate(labels, start=1)})


def group_exposure(profile: AttentionProfile, groups: GroupAssignment) -> dict[Hashable, float]:
    """Sum examination probability per group."""
    n = len(profile.examine)
    unknown = sorted(set(groups.group_of) - set(range(1, n + 1)))
    if unknown:
        raise ValueError(f"groups name ranks {unknown} outside [1, {n}]")
    exposure: dict[Hashable, float] = {}
    for rank in range(1, n + 1):
        if rank not in groups.group_of:
            raise ValueError(f"rank {rank} has no group")
        label = groups.group_of[rank]
        exposure[label] = exposure.get(label, 0.0) + float(profile.examine[rank - 1])
    return exposure
