"""Monte-Carlo execution of the browsing state machine.

Each simulated user walks the page one event at a time:

    for each row:
        (rows after the first) survive with prob rho, else abandon  [row abandon]
        skip the row with prob gamma                               [skipped]
        otherwise for each cell, left to right:
            examine
            select with prob psi'(cell)  -> stop                   [selected]
            else abandon with prob alpha -> stop                   [cell abandon]
    fell off the last row                                          [exhausted]

Users are simulated as numpy boolean vectors, one Bernoulli draw per user per
event, so the oracle never touches the closed-form products it is used to
check.

Seeding: trials are split into partitions of ``PARTITION_SIZE``. Partition p
draws from ``numpy.random.Generator(PCG64(sub_seed(seed, p)))`` where
``sub_seed`` is the SplitMix64 finaliser applied to
``seed + (p + 1) * 0x9E3779B97F4A7C15 (mod 2**64)``. Counts are summed in
partition order, so results do not depend on ``workers``.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .config import BrowsingConfig, ConfigError, DecayMode, RelevanceVector, Violation, abandon_vector
from .grid import effective_selection
from .layout import LayoutSpec
from .linear import AttentionProfile

log = logging.getLogger(__name__)

PARTITION_SIZE = 1 << 16
_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def sub_seed(seed: int, partition: int) -> int:
    return splitmix64(seed + (partition + 1) * _GOLDEN)


def _int_array(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    seed: int
    examined: np.ndarray
    selected: np.ndarray
    abandoned_cell: int
    abandoned_row: int
    skipped: np.ndarray
    exhausted: int

    def __post_init__(self):
        for name in ("examined", "selected", "skipped"):
            object.__setattr__(self, name, _int_array(getattr(self, name)))

    @property
    def abandoned(self) -> int:
        return self.abandoned_cell + self.abandoned_row

    @property
    def conserved(self) -> bool:
        return int(self.selected.sum()) + self.abandoned + self.exhausted == self.trials

    def to_dict(self) -> dict[str, Any]:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "examined": self.examined.tolist(),
            "selected": self.selected.tolist(),
            "abandoned_cell": self.abandoned_cell,
            "abandoned_row": self.abandoned_row,
            "skipped": self.skipped.tolist(),
            "exhausted": self.exhausted,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SimulationReport:
        return cls(
            trials=int(data["trials"]),
            seed=int(data["seed"]),
            examined=data["examined"],
            selected=data["selected"],
            abandoned_cell=int(data["abandoned_cell"]),
            abandoned_row=int(data["abandoned_row"]),
            skipped=data["skipped"],
            exhausted=int(data["exhausted"]),
        )

    def __add__(self, other: SimulationReport) -> SimulationReport:
        return SimulationReport(
            trials=self.trials + other.trials,
            seed=self.seed,
            examined=self.examined + other.examined,
            selected=self.selected + other.selected,
            abandoned_cell=self.abandoned_cell + other.abandoned_cell,
            abandoned_row=self.abandoned_row + other.abandoned_row,
            skipped=self.skipped + other.skipped,
            exhausted=self.exhausted + other.exhausted,
        )


def _run_partition(
    n: int,
    rng: np.random.Generator,
    layout: LayoutSpec,
    psi: np.ndarray,
    alpha: np.ndarray,
    gamma: float,
    rho: float,
    seed: int,
) -> SimulationReport:
    examined = np.zeros(layout.n_items, dtype=np.int64)
    selected = np.zeros(layout.n_items, dtype=np.int64)
    skipped = np.zeros(layout.n_rows, dtype=np.int64)
    abandoned_cell = 0
    abandoned_row = 0

    browsing = np.ones(n, dtype=bool)
    for row in range(1, layout.n_rows + 1):
        if row > 1:
            quit_ = browsing & (rng.random(n) >= rho)
            abandoned_row += int(quit_.sum())
            browsing &= ~quit_
        skip = browsing & (rng.random(n) < gamma)
        skipped[row - 1] = skip.sum()
        in_row = browsing & ~skip
        for rank in layout.row_ranks(row):
            i = rank - 1
            examined[i] = in_row.sum()
            hit = in_row & (rng.random(n) < psi[i])
            selected[i] = hit.sum()
            in_row &= ~hit
            leave = in_row & (rng.random(n) < alpha[i])
            abandoned_cell += int(leave.sum())
            in_row &= ~leave
        browsing = skip | in_row

    return SimulationReport(
        trials=n,
        seed=seed,
        examined=examined,
        selected=selected,
        abandoned_cell=abandoned_cell,
        abandoned_row=abandoned_row,
        skipped=skipped,
        exhausted=int(browsing.sum()),
    )


def simulate(
    config: BrowsingConfig,
    relevance: RelevanceVector,
    layout: LayoutSpec,
    trials: int,
    seed: int,
    workers: int = 1,
) -> SimulationReport:
    """Run ``trials`` independent users through the browsing machine."""
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    if config.grid.row_decay.mode is DecayMode.BETA:
        raise ConfigError(
            [
                Violation(
                    "error",
                    "grid.row_decay.beta",
                    config.grid.row_decay.value,
                    "beta slower-decay is a corrected formula without a browsing machine; "
                    "it cannot be simulated",
                )
            ]
        )
    if len(relevance) != layout.n_items:
        raise ValueError(
            f"relevance has {len(relevance)} grades but the layout has {layout.n_items} cells"
        )
    seed = int(seed) & _MASK64
    psi = effective_selection(config, relevance, layout)
    alpha = abandon_vector(relevance, config.abandon)
    gamma = config.grid.row_skip
    rho = config.grid.rho

    sizes = [PARTITION_SIZE] * (trials // PARTITION_SIZE)
    if trials % PARTITION_SIZE:
        sizes.append(trials % PARTITION_SIZE)

    def run(p: int) -> SimulationReport:
        rng = np.random.Generator(np.random.PCG64(sub_seed(seed, p)))
        return _run_partition(sizes[p], rng, layout, psi, alpha, gamma, rho, seed)

    log.debug("simulating %d trials in %d partitions (seed=%d)", trials, len(sizes), seed)
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(p) for p in range(len(sizes))]

    report = parts[0]
    for part in parts[1:]:
        report = report + part
    return report


@dataclass(frozen=True)
class EmpiricalProfile:
    trials: int
    examine: np.ndarray
    select: np.ndarray
    examine_se: np.ndarray
    select_se: np.ndarray


def _binomial_se(p: np.ndarray, n: int) -> np.ndarray:
    return np.sqrt(np.clip(p * (1.0 - p), 0.0, None) / n)


def empirical_profile(report: SimulationReport) -> EmpiricalProfile:
    n = report.trials
    if n < 1:
        raise ValueError("report has no trials")
    examine = report.examined / n
    select = report.selected / n
    return EmpiricalProfile(n, examine, select, _binomial_se(examine, n), _binomial_se(select, n))


@dataclass(frozen=True)
class PositionCheck:
    quantity: str  # "examine" or "select"
    rank: int
    expected: float
    observed: float
    se: float
    z: float
    passed: bool


@dataclass(frozen=True)
class ValidationVerdict:
    passed: bool
    worst_z: float
    worst_rank: int
    worst_quantity: str
    conserved: bool
    checks: tuple[PositionCheck, ...] = field(repr=False, default=())

    @property
    def failures(self) -> list[PositionCheck]:
        return [c for c in self.checks if not c.passed]


def validate(
    closed: AttentionProfile,
    report: SimulationReport,
    z_threshold: float = 4.0,
    abs_floor: float = 0.005,
) -> ValidationVerdict:
    """Compare closed-form probabilities against simulated frequencies.

    A position passes when ``|p_hat - p| <= max(z_threshold * SE, abs_floor)``
    with ``SE = sqrt(p (1 - p) / trials)`` taken at the closed-form value ``p``.
    Both examination and selection are checked at every rank; the report must
    also conserve its trials exactly.
    """
    n = len(closed.examine)
    if len(report.examined) != n:
        raise ValueError(f"closed form has {n} ranks but the report has {len(report.examined)}")
    if not (z_threshold > 0 and abs_floor > 0):
        raise ValueError("z_threshold and abs_floor must be positive")

    checks = []
    for quantity, expected, counts in (
        ("examine", closed.examine, report.examined),
        ("select", closed.select, report.selected),
    ):
        observed = counts / report.trials
        se = _binomial_se(np.asarray(expected, dtype=float), report.trials)
        for i in range(n):
            diff = abs(observed[i] - expected[i])
            if se[i] > 0:
                z = diff / se[i]
            else:
                z = 0.0 if diff == 0 else math.inf
            ok = diff <= max(z_threshold * se[i], abs_floor)
            checks.append(
                PositionCheck(quantity, i + 1, float(expected[i]), float(observed[i]), float(se[i]), float(z), bool(ok))
            )

    worst = max(checks, key=lambda c: c.z)
    conserved = report.conserved
    return ValidationVerdict(
        passed=conserved and all(c.passed for c in checks),
        worst_z=worst.z,
        worst_rank=worst.rank,
        worst_quantity=worst.quantity,
        conserved=conserved,
        checks=tuple(checks),
    )
