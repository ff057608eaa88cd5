"""``browselab`` command-line front end.

Exit codes: 0 success, 2 invalid input or configuration, 3 validation failure.
Set ``BROWSELAB_LOG`` to error, info or debug to control stderr logging.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import config as cfg
from .config import (
    AbandonModel,
    BrowsingConfig,
    ConfigError,
    DecayMode,
    RelevanceVector,
    RowDecay,
    SelectionMode,
    SelectionModel,
)
from .grid import GridAttentionProfile, PaperVariant, attention_profile, effective_selection, paper_formula_examine_prob
from .layout import LayoutSpec, layout_from_dict, layout_to_dict
from .linear import AttentionProfile
from .metrics import GroupAssignment, err, group_exposure, rbp
from .simulator import simulate, validate

log = logging.getLogger("browselab")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_FAILED = 0, 2, 3


class InputError(ValueError):
    pass


# --- deterministic JSON ------------------------------------------------------


def _encode(obj: Any, level: int) -> str:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        s = format(x, ".17g")
        return s if any(ch in s for ch in ".en") else s + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v, level + 1) for v in obj) + "]"
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        pad = "  " * (level + 1)
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """JSON with insertion-ordered keys and floats at 17 significant digits."""
    return _encode(obj, 0) + "\n"


def _write(payload: Mapping[str, Any], output: str | None) -> None:
    text = dumps({"schema_version": SCHEMA_VERSION, **payload})
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


# --- run config --------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    layout: LayoutSpec
    relevance: RelevanceVector
    model: BrowsingConfig | None
    groups: GroupAssignment | None
    trials: int | None
    seed: int | None


def _relevance_from(data: Any) -> RelevanceVector:
    if isinstance(data, Mapping):
        grades = data["grades"]
        g_max = int(data.get("g_max", max([1, *grades])))
    else:
        grades = data
        g_max = max([1, *grades])
    return RelevanceVector(tuple(grades), g_max)


def _groups_from(data: Any, n: int) -> GroupAssignment:
    if isinstance(data, Mapping):
        return GroupAssignment({int(rank): label for rank, label in data.items()})
    if len(data) != n:
        raise InputError(f"groups list has {len(data)} labels for {n} ranks")
    return GroupAssignment.from_labels(data)


def _preset_from_flags(name: str, args: argparse.Namespace, relevance: RelevanceVector) -> BrowsingConfig:
    if name not in cfg.PRESETS:
        raise InputError(f"unknown preset {name!r}; known: {', '.join(cfg.PRESETS)}")
    available = {
        "lambda": args.lam,
        "psi_rel": args.psi_rel,
        "psi_nonrel": args.psi_nonrel,
        "alpha": args.alpha,
        "g_max": relevance.g_max if relevance is not None else None,
    }
    wanted = cfg.PRESETS[name].params
    return cfg.preset(name, **{p: available[p] for p in wanted})


def _apply_overrides(model: BrowsingConfig, args: argparse.Namespace, used_preset: bool) -> BrowsingConfig:
    if not used_preset:
        if args.psi is not None:
            model = replace(model, selection=SelectionModel.constant(args.psi))
        if args.psi_rel is not None or args.psi_nonrel is not None:
            sel = model.selection
            base_rel = sel.psi_rel if sel.mode is SelectionMode.BINARY else sel.psi
            base_non = sel.psi_nonrel
            model = replace(
                model,
                selection=SelectionModel.binary(
                    args.psi_rel if args.psi_rel is not None else base_rel,
                    args.psi_nonrel if args.psi_nonrel is not None else base_non,
                ),
            )
        if args.alpha is not None:
            model = replace(model, abandon=AbandonModel.constant(args.alpha))
    grid = model.grid
    if args.gamma is not None:
        grid = replace(grid, row_skip=args.gamma)
    if args.beta is not None and args.rho is not None:
        raise InputError("--beta and --rho are alternative row-decay modes; give one")
    if args.beta is not None:
        grid = replace(grid, row_decay=RowDecay.beta(args.beta))
    if args.rho is not None:
        grid = replace(grid, row_decay=RowDecay.rho(args.rho))
    if args.sigma is not None:
        grid = replace(grid, middle_bias_sigma=args.sigma)
    return replace(model, grid=grid)


def load_run_config(args: argparse.Namespace, need_model: bool = True) -> RunConfig:
    try:
        data = json.loads(Path(args.input).read_text())
    except OSError as e:
        raise InputError(f"cannot read {args.input}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{args.input} is not valid JSON: {e}") from None
    if not isinstance(data, Mapping):
        raise InputError("run config must be a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InputError(f"unsupported schema_version {version!r}")
    if "relevance" not in data:
        raise InputError("run config needs relevance")
    relevance = _relevance_from(data["relevance"])
    layout = layout_from_dict(data["layout"]) if "layout" in data else LayoutSpec.linear(len(relevance))
    if layout.n_items != len(relevance):
        raise InputError(f"layout has {layout.n_items} cells but relevance has {len(relevance)} grades")

    if "model" in data and "preset" in data:
        raise InputError("give either model or preset, not both")
    model = None
    used_preset = False
    if args.preset:
        model = _preset_from_flags(args.preset, args, relevance)
        used_preset = True
    elif "model" in data:
        model = cfg.config_from_dict(data["model"])
    elif "preset" in data:
        params = dict(data["preset"])
        name = params.pop("name")
        if name == "err_default":
            params.setdefault("g_max", relevance.g_max)
        model = cfg.preset(name, **params)
        used_preset = True
    if model is not None:
        model = _apply_overrides(model, args, used_preset)
    elif need_model:
        raise InputError("run config needs a model or preset (or pass --preset)")

    groups = _groups_from(data["groups"], len(relevance)) if data.get("groups") is not None else None
    sim = data.get("simulation") or {}
    return RunConfig(
        layout=layout,
        relevance=relevance,
        model=model,
        groups=groups,
        trials=sim.get("trials"),
        seed=sim.get("seed"),
    )


def _checked(model: BrowsingConfig) -> BrowsingConfig:
    for v in cfg.check_config(model):
        log.warning("%s", v)
    return model


def _profile_payload(profile: AttentionProfile) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "examine": profile.examine,
        "select": profile.select,
        "totals": {
            "select": profile.total_select,
            "abandon": profile.total_abandon,
            "exhaust": profile.total_exhaust,
        },
    }
    if isinstance(profile, GridAttentionProfile):
        payload["per_row"] = {
            "reach": profile.row_reach,
            "skip": profile.row_skipped,
            "row_abandon": profile.row_abandon,
        }
    else:
        payload["per_row"] = None
    return payload


# --- commands ------------------------------------------------------------------


def cmd_attention(args: argparse.Namespace) -> int:
    run = load_run_config(args)
    model = _checked(run.model)
    payload: dict[str, Any] = {"command": "attention", "layout": layout_to_dict(run.layout)}
    if args.paper_literal:
        result = paper_formula_examine_prob(args.paper_literal, model, run.relevance, run.layout)
        psi = effective_selection(model, run.relevance, run.layout)
        payload.update(
            {
                "variant": args.paper_literal,
                "examine": result.examine,
                "select": result.examine * psi,
                "totals": None,
                "per_row": None,
                "notes": list(result.notes),
            }
        )
    else:
        payload.update(_profile_payload(attention_profile(model, run.relevance, run.layout)))
        payload["notes"] = []
    _write(payload, args.output)
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    run = load_run_config(args, need_model=args.metric == "exposure")
    params: dict[str, Any] = {}
    if args.metric == "rbp":
        if args.lam is None:
            raise InputError("rbp needs --lambda")
        params = {"lambda": args.lam, "binarize": args.binarize}
        value: Any = rbp(run.relevance, args.lam, binarize=args.binarize)
    elif args.metric == "err":
        model = run.model
        if model is not None and model.selection.mode is SelectionMode.GRADED:
            grade_map = model.selection.grade_map
        else:
            grade_map = cfg.default_graded_map(run.relevance.g_max)
        params = {"grade_map": {str(g): p for g, p in enumerate(grade_map)}}
        value = err(run.relevance, grade_map)
    else:
        if run.groups is None:
            raise InputError("exposure needs groups in the run config")
        model = _checked(run.model)
        exposure = group_exposure(attention_profile(model, run.relevance, run.layout), run.groups)
        value = {str(k): v for k, v in sorted(exposure.items(), key=lambda kv: str(kv[0]))}
        params = {"model": cfg.config_to_dict(model), "layout": layout_to_dict(run.layout)}
    _write({"metric": args.metric, "value": value, "params": params}, args.output)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    run = load_run_config(args)
    model = _checked(run.model)
    if model.grid.row_decay.mode is DecayMode.BETA:
        raise InputError(
            "beta slower-decay is quarantined: it is a corrected formula without a browsing "
            "machine, so it cannot be validated by simulation (use attention --paper-literal slower_decay_beta)"
        )
    trials = args.trials if args.trials is not None else (run.trials or 200_000)
    seed = args.seed if args.seed is not None else (run.seed if run.seed is not None else 0)
    closed = attention_profile(model, run.relevance, run.layout)
    if args.perturb:
        closed = replace(closed, examine=closed.examine + args.perturb, select=closed.select + args.perturb)
    report = simulate(model, run.relevance, run.layout, trials, seed, workers=args.workers)
    verdict = validate(closed, report, args.z, args.floor)
    log.info("validation %s (worst z=%.3g at %s rank %d)", "passed" if verdict.passed else "failed",
             verdict.worst_z, verdict.worst_quantity, verdict.worst_rank)
    payload = {
        "command": "validate",
        "passed": verdict.passed,
        "conserved": verdict.conserved,
        "worst_z": verdict.worst_z,
        "worst_rank": verdict.worst_rank,
        "worst_quantity": verdict.worst_quantity,
        "z_threshold": args.z,
        "abs_floor": args.floor,
        "perturb": args.perturb,
        "model": cfg.config_to_dict(model),
        "layout": layout_to_dict(run.layout),
        "closed": {"examine": closed.examine, "select": closed.select},
        "report": report.to_dict(),
        "failures": [
            {"quantity": c.quantity, "rank": c.rank, "expected": c.expected, "observed": c.observed, "z": c.z}
            for c in verdict.failures
        ],
    }
    _write(payload, args.output)
    return EXIT_OK if verdict.passed else EXIT_FAILED


def cmd_presets(args: argparse.Namespace) -> int:
    if args.action == "list":
        presets = [{"name": p.name, "params": list(p.params), "source": p.source} for p in cfg.PRESETS.values()]
        _write({"presets": presets}, args.output)
        return EXIT_OK
    if not args.name:
        raise InputError("presets show needs a preset name")
    if args.name not in cfg.PRESETS:
        raise InputError(f"unknown preset {args.name!r}; known: {', '.join(cfg.PRESETS)}")
    available = {
        "lambda": args.lam,
        "psi_rel": args.psi_rel,
        "psi_nonrel": args.psi_nonrel,
        "alpha": args.alpha,
        "g_max": args.g_max,
    }
    spec = cfg.PRESETS[args.name]
    model = cfg.preset(args.name, **{p: available[p] for p in spec.params})
    _write({"preset": args.name, **cfg.config_to_dict(model)}, args.output)
    return EXIT_OK


# --- argument parsing ----------------------------------------------------------


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", metavar="NAME", help="use a named preset instead of the config's model")
    p.add_argument("--lambda", dest="lam", type=float, help="continuation probability (geometric presets, rbp)")
    p.add_argument("--psi", type=float, help="constant selection probability")
    p.add_argument("--psi-rel", type=float, help="selection probability for relevant items")
    p.add_argument("--psi-nonrel", type=float, help="selection probability for non-relevant items")
    p.add_argument("--alpha", type=float, help="constant abandonment probability")
    p.add_argument("--gamma", type=float, help="row-skip probability")
    p.add_argument("--beta", type=float, help="slower-decay boost (paper-literal formula only)")
    p.add_argument("--rho", type=float, help="row-continuation probability")
    p.add_argument("--sigma", type=float, help="middle-bias Gaussian width, in columns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="browselab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("attention", help="closed-form examination and selection probabilities")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    _model_flags(p)
    p.add_argument("--paper-literal", choices=[v.value for v in PaperVariant])
    p.set_defaults(func=cmd_attention)

    p = sub.add_parser("metrics", help="rbp, err or group exposure")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--metric", required=True, choices=["rbp", "err", "exposure"])
    p.add_argument("--binarize", action="store_true", help="rbp: treat any positive grade as relevant")
    _model_flags(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("validate", help="check the closed form against Monte-Carlo simulation")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    _model_flags(p)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--z", type=float, default=4.0)
    p.add_argument("--floor", type=float, default=0.005)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("presets", help="list presets or show one expanded")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.add_argument("--output")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--psi-rel", type=float)
    p.add_argument("--psi-nonrel", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--g-max", type=int)
    p.set_defaults(func=cmd_presets)
    return parser


def _setup_logging() -> None:
    level = os.environ.get("BROWSELAB_LOG", "error").upper()
    if level not in ("ERROR", "INFO", "DEBUG"):
        level = "ERROR"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        for v in e.violations:
            print(f"browselab: {v}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, TypeError) as e:
        msg = f"missing field {e}" if isinstance(e, KeyError) else str(e)
        print(f"browselab: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"browselab: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
