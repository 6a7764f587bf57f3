"""Command-line frontend.

Every subcommand is a thin composition of library calls; results are
emitted as a key-sorted JSON report on stdout (or a flat table behind
``--format table``), with diagnostics on stderr only.  Exit codes: 0
success, 1 usage error, 2 data or validation error.  Randomized
subcommands require an explicit ``--seed`` so reruns are reproducible by
construction.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bootstrap import BootstrapConfig, bootstrap_band
from .compute import ComputeEstimate, savings_ratio
from .diagnose import (
    EarlyStopPolicy,
    compare_policies,
    early_stop,
    flag_undertrained,
    load_loss_curve,
)
from .errors import DataError
from .powerlaw import fit_runset
from .predict import extrapolate, holdout_eval, select_model
from .records import RunSet, ScaleSpec, emit, group, ingest, scale_ladder
from .svg import plot_runset, write_plot
from .synth import SynthSpec, generate

SCHEMA_VERSION = "1"

FLOPS_NOTE = "evaluation passes triggered by early stopping are not counted"


@dataclass(frozen=True)
class Report:
    """What gets printed: the command, its inputs, and its results."""

    command: str
    inputs: dict
    results: object
    schema_version: str = SCHEMA_VERSION


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A002 - argparse API
        raise UsageError(message)


def to_jsonable(obj):
    """Recursively convert dataclasses/arrays/numpy scalars to JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if obj is None or isinstance(obj, (str, int, float, bool)):
        return obj
    raise TypeError(f"cannot serialize {type(obj)!r}")


def render_report(report: Report, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(to_jsonable(report), sort_keys=True, indent=2) + "\n"
    lines: list[str] = []

    def walk(prefix: str, obj) -> None:
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}.{k}" if prefix else str(k), obj[k])
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        else:
            lines.append(f"{prefix} = {obj}")

    walk("", to_jsonable(report))
    return "\n".join(lines) + "\n"


def _parse_layer_range(text: str, flag: str) -> tuple[int, int]:
    parts = text.split("-")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"{flag} expects 'A-B' or a single integer, got {text!r}") from None
    return lo, hi


def _load_groups(args) -> dict:
    records = ingest(args.input, getattr(args, "input_format", None))
    return group(records)


def _pick(groups: dict, task, family, metric) -> RunSet:
    matches = [
        rs
        for (t, f, m), rs in groups.items()
        if (task is None or t == task) and (family is None or f == family) and (metric is None or m == metric)
    ]
    if len(matches) == 1:
        return matches[0]
    available = ", ".join("/".join(k) for k in groups)
    if not matches:
        raise DataError(
            f"no run group matches task={task!r} family={family!r} metric={metric!r}; "
            f"available: {available}"
        )
    raise DataError(
        f"selection is ambiguous (task={task!r} family={family!r} metric={metric!r}); "
        f"available: {available}"
    )


def _load_runset(args) -> RunSet:
    return _pick(_load_groups(args), args.task, args.family, args.metric)


def _target_scale(args) -> ScaleSpec:
    has_dims = args.target_layers is not None or args.target_hidden is not None
    if args.target_params is not None:
        if has_dims:
            raise UsageError("give either --target-params or --target-layers/--target-hidden")
        return ScaleSpec.from_params(args.target_params)
    if args.target_layers is None or args.target_hidden is None:
        raise UsageError("target needs --target-layers and --target-hidden, or --target-params")
    return ScaleSpec.from_dims(args.target_layers, args.target_hidden)


def _bootstrap_config(args, mode=None) -> BootstrapConfig:
    return BootstrapConfig(
        n_replicates=args.B,
        lo_pct=args.lo,
        hi_pct=args.hi,
        mode=mode if mode is not None else args.mode,
        rng_seed=args.seed,
    )


def _add_input_options(p, selectors: bool = True) -> None:
    p.add_argument("--input", required=True, help="JSONL or CSV records file")
    p.add_argument("--input-format", choices=("jsonl", "csv"), default=None)
    if selectors:
        p.add_argument("--task", default=None)
        p.add_argument("--family", default=None)
        p.add_argument("--metric", default=None)


def _add_bootstrap_options(p, with_mode: bool = True) -> None:
    p.add_argument("--B", type=int, default=1000, help="bootstrap replicates")
    p.add_argument("--lo", type=float, default=2.5)
    p.add_argument("--hi", type=float, default=97.5)
    if with_mode:
        p.add_argument("--mode", choices=("hierarchical", "naive"), default="hierarchical")
    p.add_argument("--seed", type=int, required=True, help="RNG seed (required)")


def _add_format_option(p) -> None:
    p.add_argument("--format", choices=("json", "table"), default="json")


# ---------------------------------------------------------------- handlers


def _cmd_fit(args) -> Report:
    runset = _load_runset(args)
    fit = fit_runset(runset, min_layers=args.min_depth, space=args.r2_space)
    inputs = {
        "input": args.input,
        "task": runset.task,
        "family": runset.family,
        "metric": runset.metric,
        "min_depth": args.min_depth,
        "r2_space": args.r2_space,
    }
    return Report(command="fit", inputs=inputs, results={"fit": fit})


def _cmd_bootstrap(args) -> Report:
    runset = _load_runset(args)
    cfg = _bootstrap_config(args)
    band = bootstrap_band(runset, cfg)
    fit = fit_runset(runset)
    inputs = {
        "input": args.input,
        "task": runset.task,
        "family": runset.family,
        "metric": runset.metric,
        "B": cfg.n_replicates,
        "lo": cfg.lo_pct,
        "hi": cfg.hi_pct,
        "mode": cfg.mode,
        "seed": cfg.rng_seed,
    }
    results = {"fit": fit, "band": band}
    return Report(command="bootstrap", inputs=inputs, results=results)


def _cmd_predict(args) -> Report:
    runset = _load_runset(args)
    target = _target_scale(args)
    cfg = _bootstrap_config(args)
    report = extrapolate(runset, target, cfg, actual=args.actual)
    inputs = {
        "input": args.input,
        "task": runset.task,
        "family": runset.family,
        "metric": runset.metric,
        "target_params": target.params,
        "actual": args.actual,
        "B": cfg.n_replicates,
        "mode": cfg.mode,
        "seed": cfg.rng_seed,
    }
    return Report(command="predict", inputs=inputs, results=report)


def _cmd_holdout(args) -> Report:
    runset = _load_runset(args)
    train = _parse_layer_range(args.train_layers, "--train-layers")
    test = _parse_layer_range(args.test_layers, "--test-layers")
    report = holdout_eval(runset, train, test)
    inputs = {
        "input": args.input,
        "task": runset.task,
        "family": runset.family,
        "metric": runset.metric,
        "train_layers": list(train),
        "test_layers": list(test),
    }
    return Report(command="holdout", inputs=inputs, results=report)


def _cmd_select(args) -> Report:
    groups = _load_groups(args)
    runset_a = _pick(groups, args.task, args.family_a, args.metric)
    runset_b = _pick(groups, args.task, args.family_b, args.metric)
    target = _target_scale(args)
    cfg = _bootstrap_config(args)
    report = select_model(
        runset_a,
        runset_b,
        target,
        cfg,
        r2_threshold=args.r2_threshold,
        actual_a=args.actual_a,
        actual_b=args.actual_b,
    )
    inputs = {
        "input": args.input,
        "family_a": args.family_a,
        "family_b": args.family_b,
        "r2_threshold": args.r2_threshold,
        "target_params": target.params,
        "actual_a": args.actual_a,
        "actual_b": args.actual_b,
        "B": cfg.n_replicates,
        "mode": cfg.mode,
        "seed": cfg.rng_seed,
    }
    return Report(command="select", inputs=inputs, results=report)


def _cmd_flops(args) -> Report:
    if args.params is not None and args.input is not None:
        raise UsageError("give either --params/--tokens or --input, not both")
    if args.params is not None:
        if args.tokens is None:
            raise UsageError("--tokens is required with --params")
        est = ComputeEstimate.of(args.params, args.tokens)
        inputs = {"params": args.params, "tokens": args.tokens}
        return Report(
            command="flops", inputs=inputs, results={"estimate": est, "note": FLOPS_NOTE}
        )
    if args.input is None:
        raise UsageError("flops needs --params/--tokens or --input")

    records = ingest(args.input, args.input_format)
    scales: dict = {}
    for r in records:
        scales.setdefault(r.scale)
    scale_list = sorted(scales, key=lambda s: s.params)
    tokens_known = all(r.tokens is not None for r in records)
    total_flops = (
        sum(6 * r.scale.params * r.tokens for r in records) if tokens_known else None
    )
    results = {
        "scales": [
            {"layers": s.layers, "hidden": s.hidden, "params": s.params} for s in scale_list
        ],
        "total_params": sum(s.params for s in scale_list),
        "total_flops": total_flops,
        "note": FLOPS_NOTE,
    }
    inputs = {"input": args.input}
    if args.baseline_params is not None or args.baseline_layers is not None:
        if args.baseline_params is not None:
            baseline = ScaleSpec.from_params(args.baseline_params)
        else:
            if args.baseline_hidden is None:
                raise UsageError("--baseline-hidden is required with --baseline-layers")
            baseline = ScaleSpec.from_dims(args.baseline_layers, args.baseline_hidden)
        results["baseline_params"] = baseline.params
        results["savings_ratio"] = savings_ratio(scale_list, baseline, "equal_tokens")
        inputs["baseline_params"] = baseline.params
    return Report(command="flops", inputs=inputs, results=results)


def _cmd_diagnose_earlystop(args) -> Report:
    curve = load_loss_curve(args.curve)
    policies = [EarlyStopPolicy(patience=p, min_decrease=args.min_decrease) for p in args.patience]
    inputs = {
        "curve": args.curve,
        "patience": list(args.patience),
        "min_decrease": args.min_decrease,
    }
    if len(policies) == 1:
        results: object = {"early_stop": early_stop(curve, policies[0])}
    else:
        results = {"policies": compare_policies(curve, policies)}
    return Report(command="diagnose earlystop", inputs=inputs, results=results)


def _cmd_diagnose_fit_outlier(args) -> Report:
    runset = _load_runset(args)
    if any(r.scale.layers is None for r in runset.records):
        raise DataError("records lack layer counts; cannot hold out a depth")
    held = {r.scale for r in runset.records if r.scale.layers == args.holdout_layers}
    if not held:
        raise DataError(f"no records with layers={args.holdout_layers} to hold out")
    if len(held) > 1:
        raise DataError(f"layers={args.holdout_layers} matches {len(held)} distinct scales")
    held_scale = held.pop()
    rest = runset.filter(lambda r: r.scale.layers != args.holdout_layers)
    cfg = _bootstrap_config(args)
    verdict = flag_undertrained(rest, held_scale, args.observed, cfg)
    inputs = {
        "input": args.input,
        "task": runset.task,
        "family": runset.family,
        "metric": runset.metric,
        "holdout_layers": args.holdout_layers,
        "observed": args.observed,
        "B": cfg.n_replicates,
        "mode": cfg.mode,
        "seed": cfg.rng_seed,
    }
    return Report(command="diagnose fit-outlier", inputs=inputs, results=verdict)


def _cmd_synth(args) -> Report:
    layers = _parse_layer_range(args.layers, "--layers")
    spec = SynthSpec(
        true_alpha=args.alpha,
        true_log_c=args.log_c,
        scales=tuple(scale_ladder(args.aspect_ratio, range(layers[0], layers[1] + 1))),
        seeds_per_scale=args.seeds_per_scale,
        sigma_pre=args.sigma_pre,
        sigma_fin=args.sigma_fin,
        rng_seed=args.seed,
        direction=args.direction,
        noise=args.noise,
        task=args.task,
        family=args.family,
        metric=args.metric,
    )
    runset, truth = generate(spec)
    emit(runset.records, args.out, "jsonl")
    truth_out = args.truth_out if args.truth_out else args.out + ".truth.json"
    Path(truth_out).write_text(
        json.dumps(to_jsonable(truth), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    inputs = {
        "alpha": args.alpha,
        "log_c": args.log_c,
        "aspect_ratio": args.aspect_ratio,
        "layers": list(layers),
        "seeds_per_scale": args.seeds_per_scale,
        "sigma_pre": args.sigma_pre,
        "sigma_fin": args.sigma_fin,
        "seed": args.seed,
        "direction": args.direction,
        "noise": args.noise,
    }
    results = {
        "out": args.out,
        "truth_out": truth_out,
        "records_written": len(runset),
        "truth": truth,
    }
    return Report(command="synth", inputs=inputs, results=results)


def _cmd_plot(args) -> Report:
    runset = _load_runset(args)
    heldout = (
        _parse_layer_range(args.heldout_layers, "--heldout-layers")
        if args.heldout_layers
        else None
    )
    fit_set = runset
    if heldout is not None:
        lo, hi = heldout
        fit_set = runset.filter(
            lambda r: r.scale.layers is None or not (lo <= r.scale.layers <= hi)
        )
    fit = fit_runset(fit_set, min_layers=args.min_depth)
    band = None
    if args.band:
        if args.seed is None:
            raise UsageError("--seed is required with --band")
        cfg = _bootstrap_config(args)
        band = bootstrap_band(fit_set, cfg)
    spec = plot_runset(runset, fit=fit, band=band, heldout_layers=heldout)
    write_plot(spec, args.out)
    digest = hashlib.sha256(Path(args.out).read_bytes()).hexdigest()
    inputs = {
        "input": args.input,
        "task": runset.task,
        "family": runset.family,
        "metric": runset.metric,
        "out": args.out,
        "band": bool(args.band),
        "heldout_layers": list(heldout) if heldout else None,
        "seed": args.seed,
    }
    return Report(
        command="plot",
        inputs=inputs,
        results={"out": args.out, "sha256": digest, "groups": len(spec.groups)},
    )


# ----------------------------------------------------------------- parser


def build_parser() -> _Parser:
    parser = _Parser(prog="scalefit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a power law to one run group")
    _add_input_options(p)
    p.add_argument("--min-depth", type=int, default=None, help="keep only layers >= d")
    p.add_argument("--r2-space", choices=("log", "linear"), default="log")
    _add_format_option(p)
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("bootstrap", help="bootstrap confidence band for a fit")
    _add_input_options(p)
    _add_bootstrap_options(p)
    _add_format_option(p)
    p.set_defaults(handler=_cmd_bootstrap)

    p = sub.add_parser("predict", help="extrapolate to a target scale")
    _add_input_options(p)
    p.add_argument("--target-layers", type=int, default=None)
    p.add_argument("--target-hidden", type=int, default=None)
    p.add_argument("--target-params", type=int, default=None)
    p.add_argument("--actual", type=float, default=None)
    _add_bootstrap_options(p)
    _add_format_option(p)
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("holdout", help="train/test split over depth ranges")
    _add_input_options(p)
    p.add_argument("--train-layers", required=True, help="inclusive range, e.g. 1-6")
    p.add_argument("--test-layers", required=True, help="inclusive range, e.g. 7-8")
    _add_format_option(p)
    p.set_defaults(handler=_cmd_holdout)

    p = sub.add_parser("select", help="compare two families at a target scale")
    _add_input_options(p, selectors=False)
    p.add_argument("--task", default=None)
    p.add_argument("--metric", default=None)
    p.add_argument("--family-a", required=True)
    p.add_argument("--family-b", required=True)
    p.add_argument("--r2-threshold", type=float, default=0.95)
    p.add_argument("--target-layers", type=int, default=None)
    p.add_argument("--target-hidden", type=int, default=None)
    p.add_argument("--target-params", type=int, default=None)
    p.add_argument("--actual-a", type=float, default=None)
    p.add_argument("--actual-b", type=float, default=None)
    _add_bootstrap_options(p)
    _add_format_option(p)
    p.set_defaults(handler=_cmd_select)

    p = sub.add_parser("flops", help="parameter and FLOP accounting")
    p.add_argument("--params", type=int, default=None)
    p.add_argument("--tokens", type=int, default=None)
    p.add_argument("--input", default=None)
    p.add_argument("--input-format", choices=("jsonl", "csv"), default=None)
    p.add_argument("--baseline-params", type=int, default=None)
    p.add_argument("--baseline-layers", type=int, default=None)
    p.add_argument("--baseline-hidden", type=int, default=None)
    _add_format_option(p)
    p.set_defaults(handler=_cmd_flops)

    p = sub.add_parser("diagnose", help="convergence diagnostics")
    dsub = p.add_subparsers(dest="diagnose_command", required=True, parser_class=_Parser)

    d = dsub.add_parser("earlystop", help="replay early stopping over a loss curve")
    d.add_argument("--curve", required=True, help="CSV with header step,eval_loss")
    d.add_argument("--patience", type=int, nargs="+", required=True)
    d.add_argument("--min-decrease", type=float, default=0.0)
    _add_format_option(d)
    d.set_defaults(handler=_cmd_diagnose_earlystop)

    d = dsub.add_parser("fit-outlier", help="flag a held-out scale against the band")
    _add_input_options(d)
    d.add_argument("--holdout-layers", type=int, required=True)
    d.add_argument("--observed", type=float, required=True)
    _add_bootstrap_options(d)
    _add_format_option(d)
    d.set_defaults(handler=_cmd_diagnose_fit_outlier)

    p = sub.add_parser("synth", help="generate synthetic records with known truth")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--log-c", type=float, required=True)
    p.add_argument("--aspect-ratio", type=int, default=32)
    p.add_argument("--layers", default="1-8", help="inclusive range, e.g. 1-8")
    p.add_argument("--seeds-per-scale", type=int, default=5)
    p.add_argument("--sigma-pre", type=float, default=0.0)
    p.add_argument("--sigma-fin", type=float, default=0.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--direction", choices=("maximize", "minimize"), default="minimize")
    p.add_argument("--noise", choices=("normal", "uniform"), default="normal")
    p.add_argument("--task", default="synthetic")
    p.add_argument("--family", default="synthetic")
    p.add_argument("--metric", default="score")
    p.add_argument("--out", required=True, help="JSONL output path")
    p.add_argument("--truth-out", default=None, help="defaults to <out>.truth.json")
    _add_format_option(p)
    p.set_defaults(handler=_cmd_synth)

    p = sub.add_parser("plot", help="render a log-log SVG plot")
    _add_input_options(p)
    p.add_argument("--out", required=True, help="SVG output path")
    p.add_argument("--min-depth", type=int, default=None)
    p.add_argument("--heldout-layers", default=None, help="inclusive range, e.g. 7-8")
    p.add_argument("--band", action="store_true", help="draw a bootstrap sleeve")
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--lo", type=float, default=2.5)
    p.add_argument("--hi", type=float, default=97.5)
    p.add_argument("--mode", choices=("hierarchical", "naive"), default="hierarchical")
    p.add_argument("--seed", type=int, default=None)
    _add_format_option(p)
    p.set_defaults(handler=_cmd_plot)

    return parser


def run(argv=None) -> int:
    """Parse argv, execute, and print a report; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report = args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(render_report(report, args.format))
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))
