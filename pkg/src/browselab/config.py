"""Browsing parameters, relevance-conditioned selection, and named presets.

A :class:`BrowsingConfig` bundles everything the closed forms and the
simulator need: how likely an examined item is to be selected, how likely
the user is to abandon after a non-selection, and the grid-only behaviours
(row skipping, row-level decay, middle bias).

Value types do only structural checks on construction. Range checks live in
:func:`validate_config` so that a bad config can be reported in full rather
than failing on the first field; :func:`check_config` raises on hard errors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

# Table ranges: psi, alpha, lambda, gamma in {0.1, ..., 0.9}; beta in {1.1, ..., 2.0}
PROB_RANGE = (0.1, 0.9)
BETA_RANGE = (1.1, 2.0)
_EPS = 1e-12


class ConfigError(ValueError):
    """Raised when a configuration has one or more hard violations."""

    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class SelectionMode(enum.Enum):
    CONSTANT = "constant"
    BINARY = "binary"
    GRADED = "graded"


class DecayMode(enum.Enum):
    NONE = "none"
    BETA = "beta"
    RHO = "rho"


@dataclass(frozen=True)
class SelectionModel:
    mode: SelectionMode
    psi: float = 0.0
    psi_rel: float = 0.0
    psi_nonrel: float = 0.0
    # grade_map[g] is the selection probability for grade g
    grade_map: tuple[float, ...] = ()

    @classmethod
    def constant(cls, psi: float) -> SelectionModel:
        return cls(SelectionMode.CONSTANT, psi=psi, psi_nonrel=psi)

    @classmethod
    def binary(cls, psi_rel: float, psi_nonrel: float) -> SelectionModel:
        return cls(SelectionMode.BINARY, psi_rel=psi_rel, psi_nonrel=psi_nonrel)

    @classmethod
    def graded(cls, grade_map: Mapping[int, float] | Sequence[float]) -> SelectionModel:
        if isinstance(grade_map, Mapping):
            keys = sorted(int(g) for g in grade_map)
            if keys != list(range(len(keys))):
                raise ValueError(f"grade_map must cover grades 0..g_max, got {keys}")
            values = tuple(float(grade_map[g]) for g in keys)
        else:
            values = tuple(float(p) for p in grade_map)
        if not values:
            raise ValueError("grade_map is empty")
        return cls(SelectionMode.GRADED, grade_map=values)


@dataclass(frozen=True)
class AbandonModel:
    alpha_rel: float = 0.0
    alpha_nonrel: float = 0.0

    @classmethod
    def constant(cls, alpha: float) -> AbandonModel:
        return cls(alpha, alpha)

    @property
    def is_constant(self) -> bool:
        return self.alpha_rel == self.alpha_nonrel


@dataclass(frozen=True)
class RowDecay:
    mode: DecayMode = DecayMode.NONE
    value: float = 1.0

    @classmethod
    def beta(cls, beta: float) -> RowDecay:
        return cls(DecayMode.BETA, beta)

    @classmethod
    def rho(cls, rho: float) -> RowDecay:
        return cls(DecayMode.RHO, rho)


@dataclass(frozen=True)
class GridBehavior:
    row_skip: float = 0.0
    row_decay: RowDecay = field(default_factory=RowDecay)
    # None disables middle bias; otherwise the Gaussian width in columns
    middle_bias_sigma: float | None = None

    @property
    def rho(self) -> float:
        """Per-row-boundary survival (1 unless row continuation is configured)."""
        return self.row_decay.value if self.row_decay.mode is DecayMode.RHO else 1.0

    @property
    def is_neutral(self) -> bool:
        return (
            self.row_skip == 0.0
            and self.row_decay.mode is DecayMode.NONE
            and self.middle_bias_sigma is None
        )


@dataclass(frozen=True)
class BrowsingConfig:
    selection: SelectionModel
    abandon: AbandonModel = field(default_factory=AbandonModel)
    grid: GridBehavior = field(default_factory=GridBehavior)


@dataclass(frozen=True)
class RelevanceVector:
    grades: tuple[int, ...]
    g_max: int = 1

    def __post_init__(self):
        grades = tuple(int(g) for g in self.grades)
        object.__setattr__(self, "grades", grades)
        if self.g_max < 1:
            raise ValueError(f"g_max must be positive, got {self.g_max}")
        for rank, g in enumerate(grades, start=1):
            if not 0 <= g <= self.g_max:
                raise ValueError(f"grade {g} at rank {rank} outside [0, {self.g_max}]")

    def __len__(self) -> int:
        return len(self.grades)

    @property
    def is_binary(self) -> bool:
        return self.g_max == 1

    def grade(self, rank: int) -> int:
        if not 1 <= rank <= len(self.grades):
            raise ValueError(f"rank {rank} outside [1, {len(self.grades)}]")
        return self.grades[rank - 1]


def default_graded_map(g_max: int) -> tuple[float, ...]:
    """ERR-style gain mapping ``g -> (2**g - 1) / 2**g_max`` for grades 0..g_max."""
    if g_max < 1:
        raise ValueError(f"g_max must be positive, got {g_max}")
    denom = 2.0**g_max
    return tuple((2.0**g - 1.0) / denom for g in range(g_max + 1))


def _select_for_grade(grade: int, model: SelectionModel) -> float:
    if model.mode is SelectionMode.CONSTANT:
        return model.psi
    if model.mode is SelectionMode.BINARY:
        return model.psi_rel if grade >= 1 else model.psi_nonrel
    if grade >= len(model.grade_map):
        raise ValueError(f"grade {grade} exceeds grade_map domain [0, {len(model.grade_map) - 1}]")
    return model.grade_map[grade]


def selection_prob(rank: int, relevance: RelevanceVector, model: SelectionModel) -> float:
    """Probability that the item at ``rank`` is selected, given it is examined."""
    return _select_for_grade(relevance.grade(rank), model)


def abandon_prob(rank: int, relevance: RelevanceVector, model: AbandonModel) -> float:
    """Abandonment after examining and not selecting the item at ``rank``."""
    return model.alpha_rel if relevance.grade(rank) >= 1 else model.alpha_nonrel


def selection_vector(relevance: RelevanceVector, model: SelectionModel) -> np.ndarray:
    return np.array([_select_for_grade(g, model) for g in relevance.grades], dtype=float)


def abandon_vector(relevance: RelevanceVector, model: AbandonModel) -> np.ndarray:
    return np.array(
        [model.alpha_rel if g >= 1 else model.alpha_nonrel for g in relevance.grades],
        dtype=float,
    )


# --- validation -----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    severity: str  # "error" or "warning"
    field: str
    value: float
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def __str__(self) -> str:
        return f"{self.severity}: {self.field}={self.value!r}: {self.message}"


def _in_table(x: float, lo: float, hi: float) -> bool:
    return lo - _EPS <= x <= hi + _EPS


def _check_prob(
    out: list[Violation],
    name: str,
    x: float,
    *,
    upper_open: bool = False,
    lower_open: bool = False,
) -> None:
    lo_ok = x > 0.0 if lower_open else x >= 0.0
    hi_ok = x < 1.0 if upper_open else x <= 1.0
    if not (math.isfinite(x) and lo_ok and hi_ok):
        legal = f"{'(' if lower_open else '['}0, 1{')' if upper_open else ']'}"
        out.append(Violation("error", name, x, f"must lie in {legal}; published range {{0.1, ..., 0.9}}"))
    elif x not in (0.0, 1.0) and not _in_table(x, *PROB_RANGE):
        out.append(
            Violation("warning", name, x, "outside published range {0.1, ..., 0.9}")
        )


def validate_config(config: BrowsingConfig) -> list[Violation]:
    """Collect hard errors and advisory warnings for every parameter.

    Hard errors are values that are not probabilities (or beta < 1).
    Warnings flag values outside the published parameter ranges; exact 0 and 1
    are accepted silently because the presets rely on them.
    """
    out: list[Violation] = []
    sel = config.selection
    if sel.mode is SelectionMode.CONSTANT:
        _check_prob(out, "selection.psi", sel.psi)
    elif sel.mode is SelectionMode.BINARY:
        _check_prob(out, "selection.psi_rel", sel.psi_rel)
        _check_prob(out, "selection.psi_nonrel", sel.psi_nonrel)
    else:
        for g, p in enumerate(sel.grade_map):
            if not (math.isfinite(p) and 0.0 <= p <= 1.0):
                out.append(Violation("error", f"selection.grade_map.{g}", p, "must lie in [0, 1]"))
        for g in range(1, len(sel.grade_map)):
            if sel.grade_map[g] < sel.grade_map[g - 1]:
                out.append(
                    Violation(
                        "error",
                        f"selection.grade_map.{g}",
                        sel.grade_map[g],
                        "grade_map must be non-decreasing in grade",
                    )
                )

    ab = config.abandon
    if ab.is_constant:
        _check_prob(out, "abandon.alpha", ab.alpha_rel, upper_open=True)
    else:
        _check_prob(out, "abandon.alpha_rel", ab.alpha_rel, upper_open=True)
        _check_prob(out, "abandon.alpha_nonrel", ab.alpha_nonrel, upper_open=True)

    grid = config.grid
    _check_prob(out, "grid.row_skip", grid.row_skip)
    decay = grid.row_decay
    if decay.mode is DecayMode.RHO:
        _check_prob(out, "grid.row_decay.rho", decay.value, lower_open=True)
    elif decay.mode is DecayMode.BETA:
        beta = decay.value
        if not (math.isfinite(beta) and beta >= 1.0):
            out.append(Violation("error", "grid.row_decay.beta", beta, "must be >= 1"))
        elif not _in_table(beta, *BETA_RANGE):
            out.append(
                Violation(
                    "warning",
                    "grid.row_decay.beta",
                    beta,
                    "outside published range {1.1, ..., 2.0}",
                )
            )
    sigma = grid.middle_bias_sigma
    if sigma is not None and not (math.isfinite(sigma) and sigma > 0):
        out.append(Violation("error", "grid.middle_bias.sigma", sigma, "must be positive"))
    return out


def check_config(config: BrowsingConfig) -> list[Violation]:
    """Raise :class:`ConfigError` on hard errors; return the warnings otherwise."""
    found = validate_config(config)
    errors = [v for v in found if v.is_error]
    if errors:
        raise ConfigError(errors)
    return found


# --- presets ----------------------------------------------------------------


def _require_lambda(lam: float) -> None:
    if not (math.isfinite(lam) and 0.0 < lam < 1.0):
        raise ConfigError(
            [Violation("error", "lambda", lam, "must lie in (0, 1); published range {0.1, ..., 0.9}")]
        )


def geometric(lam: float) -> BrowsingConfig:
    _require_lambda(lam)
    return BrowsingConfig(SelectionModel.constant(1.0 - lam))


def cascade(psi_rel: float, psi_nonrel: float) -> BrowsingConfig:
    config = BrowsingConfig(SelectionModel.binary(psi_rel, psi_nonrel))
    check_config(config)
    return config


def extended_cascade(psi_rel: float, psi_nonrel: float, alpha: float) -> BrowsingConfig:
    config = BrowsingConfig(
        SelectionModel.binary(psi_rel, psi_nonrel), AbandonModel.constant(alpha)
    )
    check_config(config)
    return config


def err_default(g_max: int) -> BrowsingConfig:
    return BrowsingConfig(SelectionModel.graded(default_graded_map(g_max)))


@dataclass(frozen=True)
class Preset:
    name: str
    build: Callable[..., BrowsingConfig]
    params: tuple[str, ...]
    source: str


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset("geometric", geometric, ("lambda",), "geometric browsing behind RBP; psi = 1 - lambda, alpha = 0"),
        Preset(
            "biega_geometric",
            geometric,
            ("lambda",),
            "geometric decay with equal per-position selection; same machine as geometric",
        ),
        Preset("cascade", cascade, ("psi_rel", "psi_nonrel"), "relevance-dependent cascade click model, alpha = 0"),
        Preset(
            "extended_cascade",
            extended_cascade,
            ("psi_rel", "psi_nonrel", "alpha"),
            "cascade with constant per-position abandonment",
        ),
        Preset("err_default", err_default, ("g_max",), "graded cascade behind ERR, psi = (2^g - 1) / 2^g_max"),
    )
}


def preset(name: str, **params: Any) -> BrowsingConfig:
    """Build a named preset, e.g. ``preset("geometric", lambda_=0.8)``.

    Parameter names match :attr:`Preset.params`; ``lambda`` may be passed as
    ``lambda_``.
    """
    try:
        spec = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
    if "lambda_" in params:
        params["lambda"] = params.pop("lambda_")
    missing = [p for p in spec.params if params.get(p) is None]
    if missing:
        raise ValueError(f"preset {name!r} needs {', '.join(missing)}")
    extra = sorted(set(params) - set(spec.params))
    if extra:
        raise ValueError(f"preset {name!r} does not take {', '.join(extra)}")
    return spec.build(*(params[p] for p in spec.params))


# --- JSON form ---------------------------------------------------------------


def config_from_dict(data: Mapping[str, Any]) -> BrowsingConfig:
    sel = data.get("selection")
    if not isinstance(sel, Mapping):
        raise ValueError("model.selection is required")
    mode = sel.get("mode", "constant")
    if mode == "constant":
        selection = SelectionModel.constant(float(sel["psi"]))
    elif mode == "binary":
        selection = SelectionModel.binary(float(sel["psi_rel"]), float(sel["psi_nonrel"]))
    elif mode == "graded":
        selection = SelectionModel.graded({int(g): float(p) for g, p in sel["grade_map"].items()})
    else:
        raise ValueError(f"selection.mode must be constant, binary or graded, got {mode!r}")

    ab = data.get("abandon", {})
    if "alpha" in ab:
        abandon = AbandonModel.constant(float(ab["alpha"]))
    else:
        abandon = AbandonModel(float(ab.get("alpha_rel", 0.0)), float(ab.get("alpha_nonrel", 0.0)))

    g = data.get("grid", {})
    decay = g.get("row_decay", {"mode": "none"})
    try:
        decay_mode = DecayMode(decay.get("mode", "none"))
    except ValueError:
        raise ValueError(f"grid.row_decay.mode must be none, beta or rho, got {decay.get('mode')!r}") from None
    row_decay = RowDecay() if decay_mode is DecayMode.NONE else RowDecay(decay_mode, float(decay["value"]))
    bias = g.get("middle_bias", {"mode": "none"})
    if bias.get("mode", "none") == "none":
        sigma = None
    elif bias["mode"] == "gaussian":
        sigma = float(bias["sigma"])
    else:
        raise ValueError(f"grid.middle_bias.mode must be none or gaussian, got {bias['mode']!r}")
    grid = GridBehavior(float(g.get("row_skip", 0.0)), row_decay, sigma)
    return BrowsingConfig(selection, abandon, grid)


def config_to_dict(config: BrowsingConfig) -> dict[str, Any]:
    sel = config.selection
    if sel.mode is SelectionMode.CONSTANT:
        selection: dict[str, Any] = {"mode": "constant", "psi": sel.psi}
    elif sel.mode is SelectionMode.BINARY:
        selection = {"mode": "binary", "psi_rel": sel.psi_rel, "psi_nonrel": sel.psi_nonrel}
    else:
        selection = {"mode": "graded", "grade_map": {str(g): p for g, p in enumerate(sel.grade_map)}}
    ab = config.abandon
    abandon = (
        {"alpha": ab.alpha_rel}
        if ab.is_constant
        else {"alpha_rel": ab.alpha_rel, "alpha_nonrel": ab.alpha_nonrel}
    )
    g = config.grid
    row_decay: dict[str, Any] = {"mode": g.row_decay.mode.value}
    if g.row_decay.mode is not DecayMode.NONE:
        row_decay["value"] = g.row_decay.value
    middle_bias: dict[str, Any] = (
        {"mode": "none"} if g.middle_bias_sigma is None else {"mode": "gaussian", "sigma": g.middle_bias_sigma}
    )
    return {
        "selection": selection,
        "abandon": abandon,
        "grid": {"row_skip": g.row_skip, "row_decay": row_decay, "middle_bias": middle_bias},
    }
