"""Command-line interface.

Subcommands: ``task build``, ``task sample``, ``moments``, ``evaluate``,
``compare``, ``curves``.  Exit codes: 0 success, 2 input validation,
3 prediction coverage, 4 internal consistency.  All human-readable chatter
goes to stderr; stdout carries only data.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    Alphabet,
    load_alphabet,
    load_family_file,
    load_labeled_set,
    load_task,
    build_task,
    sample_training_set,
    save_labeled_set,
    save_task,
)
from .errors import CoverageError, InputError, SeqMomentsError
from .metrics import BASELINE_NAME, METRICS, evaluate
from .moments import (
    baseline_moments,
    enumerate_support,
    gold_moments,
    model_moments,
    seen_partition,
    save_moment_table,
    save_support,
)
from .predictions import load_predictions, validate_coverage
from .report import (
    format_value,
    read_plot_series,
    write_merged_series,
    write_plot_series,
    write_reports,
)


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def parse_lengths(text: str) -> list[int]:
    """Parse '1,2,3' or '1-5' (or a mix) into sorted distinct lengths."""
    lengths: set[int] = set()
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            raise InputError(f"bad lengths specification {text!r}")
        if "-" in piece:
            lo_text, _, hi_text = piece.partition("-")
            try:
                lo, hi = int(lo_text), int(hi_text)
            except ValueError:
                raise InputError(f"bad lengths range {piece!r}") from None
            if lo > hi:
                raise InputError(f"bad lengths range {piece!r}")
            lengths.update(range(lo, hi + 1))
        else:
            try:
                lengths.add(int(piece))
            except ValueError:
                raise InputError(f"bad length {piece!r}") from None
    if not lengths or min(lengths) < 1:
        raise InputError(f"lengths must be >= 1, got {text!r}")
    return sorted(lengths)


def _resolve_lengths(lengths_text: str | None, segment_length: int) -> list[int]:
    if lengths_text is None:
        return list(range(1, segment_length + 1))
    lengths = parse_lengths(lengths_text)
    if max(lengths) > segment_length:
        raise InputError(
            f"length {max(lengths)} exceeds the task segment length {segment_length}"
        )
    return lengths


def _parse_model_specs(specs: list[str], alphabet: Alphabet) -> dict[str, dict]:
    """Each spec is NAME=FILE (or just FILE, named by its stem)."""
    out: dict[str, dict] = {}
    for spec in specs:
        name, sep, path_text = spec.partition("=")
        if not sep:
            name, path_text = Path(spec).stem, spec
        if not name:
            raise InputError(f"bad prediction spec {spec!r}: empty model name")
        if name == BASELINE_NAME:
            raise InputError(f"model name {BASELINE_NAME!r} is reserved")
        if name in out:
            raise InputError(f"duplicate model name {name!r}")
        out[name] = load_predictions(path_text, alphabet, model_id=name)
    return out


# --- task -------------------------------------------------------------------

def _cmd_task_build(args) -> int:
    alphabet = None
    if args.alphabet:
        alphabet = load_alphabet(args.alphabet, args.tokenization)
    families, alphabet = load_family_file(args.families, args.tokenization, alphabet)
    task = build_task(
        families,
        alphabet,
        segment_length=args.segment_length,
        target_family=args.target,
        validation_family=args.validation,
    )
    save_task(task, args.out)
    _log(
        f"task: target family {task.target_family!r}, |U|={task.domain.total}, "
        f"|Y|={task.target.total}, ratio={task.ratio:.6g} -> {args.out}"
    )
    return 0


def _cmd_task_sample(args) -> int:
    task = load_task(args.task)
    labeled = sample_training_set(task, args.size, args.seed)
    save_labeled_set(labeled, task.domain.alphabet, args.out)
    n_pos = len(labeled.positives())
    _log(f"sampled {labeled.size} training items ({n_pos} positive) -> {args.out}")
    return 0


# --- moments ----------------------------------------------------------------

def _cmd_moments(args) -> int:
    task = load_task(args.task)
    lengths = _resolve_lengths(args.lengths, task.segment_length)
    alphabet = task.domain.alphabet
    models = _parse_model_specs(args.predictions or [], alphabet)
    training = load_labeled_set(args.training, alphabet) if args.training else None
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for n in lengths:
        support = enumerate_support(task.domain, n)
        save_support(support, alphabet, out_dir / f"support_n{n}.txt")
        gold = gold_moments(task.domain, task.target, n, support, workers=args.workers)
        save_moment_table(gold, alphabet, out_dir / f"gold_n{n}.tsv")
        for name, preds in models.items():
            table = model_moments(
                task.domain, preds.entries, n, support,
                workers=args.workers, missing_as_zero=args.allow_missing_predictions,
            )
            save_moment_table(table, alphabet, out_dir / f"model_{name}_n{n}.tsv")
        if training is not None:
            table = baseline_moments(task.domain, training, n, support)
            save_moment_table(table, alphabet, out_dir / f"baseline_n{n}.tsv")
    _log(f"wrote moment tables for lengths {lengths} -> {out_dir}")
    return 0


# --- evaluate ----------------------------------------------------------------

_CONFIG_KEYS = (
    "task", "training", "predictions", "lengths", "seen_reading",
    "workers", "seed", "out", "plot_series", "figures",
    "allow_missing_predictions",
)


def _merge_config(args) -> argparse.Namespace:
    """Fill unset evaluate flags from the JSON config; flags win on conflict."""
    if not args.config:
        return args
    try:
        raw = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.config}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise InputError(f"{args.config}: config must be a JSON object")
    for key, value in raw.items():
        if key not in _CONFIG_KEYS:
            raise InputError(f"{args.config}: unknown config key {key!r}")
        if getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _cmd_evaluate(args) -> int:
    args = _merge_config(args)
    # post-merge defaults for everything the config may leave unset
    if args.task is None or args.training is None or args.out is None:
        raise InputError("evaluate needs --task, --training, and --out (flags or config)")
    seen_reading = args.seen_reading or "all"
    try:
        workers = 1 if args.workers is None else int(args.workers)
        seed = 0 if args.seed is None else int(args.seed)
    except (TypeError, ValueError):
        raise InputError("workers and seed must be integers") from None
    plot_series = bool(args.plot_series)
    figures = True if args.figures is None else bool(args.figures)
    allow_missing = bool(args.allow_missing_predictions)
    if isinstance(args.lengths, list):
        args.lengths = ",".join(str(n) for n in args.lengths)
    elif args.lengths is not None and not isinstance(args.lengths, str):
        args.lengths = str(args.lengths)

    task = load_task(args.task)
    lengths = _resolve_lengths(args.lengths, task.segment_length)
    alphabet = task.domain.alphabet
    training = load_labeled_set(args.training, alphabet)
    model_preds = _parse_model_specs(list(args.predictions or []), alphabet)

    for name, preds in model_preds.items():
        missing = validate_coverage(preds, task.domain)
        if missing:
            if not allow_missing:
                # model_moments would raise anyway; fail fast with the model name
                rendered = [alphabet.render(x) for x in missing]
                shown = ", ".join(rendered[:5]) + (", ..." if len(rendered) > 5 else "")
                raise CoverageError(
                    f"model {name!r}: {len(rendered)} domain sequences lack predictions: {shown}",
                    missing=rendered,
                )
            _log(f"model {name!r}: {len(missing)} domain sequences lack predictions; treated as 0")

    gold_tables = {}
    partitions = {}
    baseline_tables = {}
    model_tables: dict[str, dict] = {name: {} for name in model_preds}
    for n in lengths:
        support = enumerate_support(task.domain, n)
        gold_tables[n] = gold_moments(task.domain, task.target, n, support, workers=workers)
        partitions[n] = seen_partition(training, support, reading=seen_reading)
        baseline_tables[n] = baseline_moments(task.domain, training, n, support)
        for name, preds in model_preds.items():
            model_tables[name][n] = model_moments(
                task.domain, preds.entries, n, support,
                workers=workers, missing_as_zero=allow_missing,
            )

    report = evaluate(
        model_tables, gold_tables, partitions,
        baseline=baseline_tables, seen_reading=seen_reading,
    )

    out_dir = Path(args.out)
    extra_meta = {
        "task": str(args.task),
        "training": str(args.training),
        "training_size": str(training.size),
        "seed": str(seed),
        "missing_predictions": "zero" if allow_missing else "error",
    }
    paths = write_reports(report, out_dir, extra_meta)
    if plot_series:
        paths.append(write_plot_series(report, training.size, out_dir / "plot_series.tsv"))
    if figures:
        from .figures import render_report_figures  # matplotlib import is slow; defer

        paths.extend(render_report_figures(report, out_dir / "figures"))
    _log(f"wrote {len(paths)} report files -> {out_dir}")
    for metric in METRICS:
        for model in report.models:
            print(f"{metric}\t{model}\tMICRO\t{format_value(report.micro_value(metric, model))}")
    return 0


# --- compare ------------------------------------------------------------------

def _cmd_compare(args) -> int:
    from .metrics import model_pairwise

    task = load_task(args.task)
    lengths = _resolve_lengths(args.lengths, task.segment_length)
    alphabet = task.domain.alphabet
    preds_a = load_predictions(args.predictions_a, alphabet, model_id="a")
    preds_b = load_predictions(args.predictions_b, alphabet, model_id="b")
    rows = []
    for n in lengths:
        support = enumerate_support(task.domain, n)
        table_a = model_moments(task.domain, preds_a.entries, n, support, workers=args.workers)
        table_b = model_moments(task.domain, preds_b.entries, n, support, workers=args.workers)
        rows.append(f"{n}\t{format_value(model_pairwise(table_a, table_b))}")
    text = "\n".join(rows) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        _log(f"wrote pairwise agreement for lengths {lengths} -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# --- curves -------------------------------------------------------------------

def _cmd_curves(args) -> int:
    rows = read_plot_series(args.series)
    if not rows:
        raise InputError("no plot-series rows found in the given files")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_merged_series(rows, out_dir / "curves.tsv")
    n_files = 1
    if args.figures is None or args.figures:
        from .figures import render_curve_figures

        n_files += len(render_curve_figures(rows, out_dir))
    _log(f"wrote {n_files} curve files -> {out_dir}")
    return 0


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqmoments",
        description="Moment-based evaluation of probabilistic binary sequence classifiers.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    task = sub.add_parser("task", help="build or sample evaluation tasks")
    task_sub = task.add_subparsers(dest="task_command", required=True)

    build = task_sub.add_parser("build", help="cut families into windows and assemble a task directory")
    build.add_argument("--families", required=True, help="familyId<TAB>sequence file")
    build.add_argument("--segment-length", type=int, required=True, metavar="L")
    build.add_argument("--target", default=None, metavar="FAMILY",
                       help="explicit target family (default: rarest by window mass)")
    build.add_argument("--validation", default=None, metavar="FAMILY",
                       help="held-out family excluded from rarest-target selection")
    build.add_argument("--tokenization", choices=("char", "whitespace"), default="char")
    build.add_argument("--alphabet", default=None, help="explicit alphabet file (one symbol per line)")
    build.add_argument("--out", required=True, help="task directory to write")
    build.set_defaults(func=_cmd_task_build)

    sample = task_sub.add_parser("sample", help="draw a labeled training set from a task's domain")
    sample.add_argument("--task", required=True, help="task directory")
    sample.add_argument("-m", "--size", type=int, required=True, help="number of training draws")
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--out", required=True, help="label<TAB>sequence file to write")
    sample.set_defaults(func=_cmd_task_sample)

    moments = sub.add_parser("moments", help="write support and moment table files")
    moments.add_argument("--task", required=True)
    moments.add_argument("--lengths", default=None, help="e.g. 1,2,3 or 1-5 (default: 1..L)")
    moments.add_argument("--predictions", action="append", default=None, metavar="NAME=FILE")
    moments.add_argument("--training", default=None, help="training file for baseline moments")
    moments.add_argument("--workers", type=int, default=1)
    moments.add_argument("--allow-missing-predictions", action="store_true")
    moments.add_argument("--out", required=True)
    moments.set_defaults(func=_cmd_moments)

    ev = sub.add_parser("evaluate", help="score models and the baseline against gold moments")
    ev.add_argument("--task", default=None)
    ev.add_argument("--training", default=None)
    ev.add_argument("--predictions", action="append", default=None, metavar="NAME=FILE")
    ev.add_argument("--lengths", default=None, help="e.g. 1,2,3 or 1-5 (default: 1..L)")
    ev.add_argument("--seen-reading", choices=("all", "positives"), default=None,
                    help="which training items mark a subsequence as seen (default: all)")
    ev.add_argument("--workers", type=int, default=None)
    ev.add_argument("--seed", type=int, default=None, help="recorded in meta.tsv for audit")
    ev.add_argument("--plot-series", action="store_true", default=None,
                    help="also write plot_series.tsv (MICRO values keyed by training size)")
    ev.add_argument("--figures", action=argparse.BooleanOptionalAction, default=None,
                    help="render PNG figures next to the TSV reports (default: on)")
    ev.add_argument("--allow-missing-predictions", action="store_true", default=None)
    ev.add_argument("--config", default=None, help="JSON config mirroring these flags; flags win")
    ev.add_argument("--out", default=None, help="report directory to write")
    ev.set_defaults(func=_cmd_evaluate)

    cmp_parser = sub.add_parser("compare", help="rank agreement between two models' moments")
    cmp_parser.add_argument("--task", required=True)
    cmp_parser.add_argument("--predictions-a", required=True, metavar="FILE")
    cmp_parser.add_argument("--predictions-b", required=True, metavar="FILE")
    cmp_parser.add_argument("--lengths", default=None)
    cmp_parser.add_argument("--workers", type=int, default=1)
    cmp_parser.add_argument("--out", default=None, help="output TSV (default: stdout)")
    cmp_parser.set_defaults(func=_cmd_compare)

    curves = sub.add_parser("curves", help="merge plot-series files and render metric-vs-m curves")
    curves.add_argument("--series", nargs="+", required=True, metavar="FILE")
    curves.add_argument("--figures", action=argparse.BooleanOptionalAction, default=None)
    curves.add_argument("--out", required=True)
    curves.set_defaults(func=_cmd_curves)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SeqMomentsError as exc:
        _log(f"error: {exc}")
        return exc.exit_code
    except OSError as exc:
        _log(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
