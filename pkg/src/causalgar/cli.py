"""Command-line interface.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors (anything
raised as a CausalgarError: parse failures, insufficient data, bad config).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import Config, load_config, with_overrides
from .errors import CausalgarError, MissingLabel
from .evaluate import (AblationMode, ablation_table, build_kb, loocv,
                       measure_runtime, noise_trend, preprocess_corpus,
                       sweep_pattern_count)
from .events import convert_streams
from .knowledge import build_knowledge_base
from .metrics import EvaluationReport
from .mining import train
from .recognize import recognize
from .relations import extract_causal_relations
from . import storage


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the documented contract is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}") from None


def _n_split(text: str):
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a count or 'auto', got {text!r}") from None


def _add_setting_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=[m.value for m in AblationMode],
                        default=None, help="pipeline ablation mode")
    parser.add_argument("--target", type=int, default=None, metavar="N",
                        dest="target_pattern_count",
                        help="calibrated pattern count per activity")
    parser.add_argument("--max-depth", type=int, default=None, metavar="D",
                        dest="max_depth", help="pattern depth cap, 0 = none")
    parser.add_argument("--n-split", type=_n_split, default=None, metavar="K",
                        dest="n_split",
                        help="split factor for activity-specific events, or 'auto'")
    parser.add_argument("--horizon", type=int, default=None, metavar="MS",
                        dest="pairing_horizon",
                        help="max gap between paired events, default unbounded")
    parser.add_argument("--window", type=int, default=None, metavar="W",
                        help="moving-average window for sensor streams")


def _resolve_config(args) -> Config:
    config = load_config(args.config) if args.config else Config()
    overrides = {}
    for name in ("seed", "jobs", "mode", "target_pattern_count", "max_depth",
                 "n_split", "pairing_horizon", "window"):
        overrides[name] = getattr(args, name, None)
    return with_overrides(config, **overrides)


def _load_labeled_episodes(directory) -> dict[str, list]:
    episodes: dict[str, list] = {}
    paths = sorted(Path(directory).glob("*.txt"))
    for path in paths:
        ep = storage.read_episode(path)
        if ep.ga_label is None:
            raise MissingLabel(f"{path} has no ga_label; training needs labels")
        episodes.setdefault(ep.ga_label, []).append(ep)
    return episodes


def _report_lines(report: EvaluationReport) -> list[str]:
    lines = ["activity\tprecision\trecall\tspecificity\tf1\tsupport"]
    total = sum(m.support for m in report.per_class.values())
    for ga in report.labels:
        m = report.per_class[ga]
        lines.append(f"{ga}\t{m.precision:.4f}\t{m.recall:.4f}"
                     f"\t{m.specificity:.4f}\t{m.f1:.4f}\t{m.support}")
    lines.append(f"macro\t{report.macro_precision:.4f}"
                 f"\t{report.macro_recall:.4f}\t{report.macro_specificity:.4f}"
                 f"\t{report.macro_f1:.4f}\t{total}")
    # micro precision/recall/F1 all equal accuracy when every case is classified
    wrong = round((1.0 - report.accuracy) * total)
    negatives = (len(report.labels) - 1) * total
    micro_spec = 1.0 - wrong / negatives if negatives else 0.0
    lines.append(f"micro\t{report.accuracy:.4f}\t{report.accuracy:.4f}"
                 f"\t{micro_spec:.4f}\t{report.micro_f1:.4f}\t{total}")
    return lines


def _emit(out_dir, name: str, lines: list[str]) -> None:
    for line in lines:
        print(line)
    if out_dir is not None:
        directory = Path(out_dir)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / name).write_text(
            "".join(line + "\n" for line in lines), encoding="utf-8")


def _write_summary(out_dir, entries: dict) -> None:
    if out_dir is None:
        return
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [f"{key}: {value}" for key, value in entries.items()]
    (directory / "summary.txt").write_text(
        "".join(line + "\n" for line in lines), encoding="utf-8")


# -- commands -----------------------------------------------------------------

def cmd_ingest(args) -> int:
    config = _resolve_config(args)
    registry = storage.read_registry(args.registry)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for raw_path in args.raw:
        records = storage.read_raw_records(raw_path)
        episode = convert_streams(records, registry, config.window, args.ga_label)
        target = out_dir / f"{Path(raw_path).stem}.txt"
        storage.write_episode(episode, target)
        print(f"{raw_path} -> {target} ({len(episode)} events)")
    return 0


def cmd_induce_kb(args) -> int:
    config = _resolve_config(args)
    registry = storage.read_registry(args.registry)
    training = _load_labeled_episodes(args.episodes)
    declared_affects, declared_related = _read_declarations(args)
    kb = build_knowledge_base(registry, training=training,
                              declared_affects=declared_affects,
                              declared_related_to=declared_related,
                              aggregation=config.kb_aggregation)
    storage.write_knowledge_base(kb, args.out)
    print(f"knowledge base written to {args.out} "
          f"({len(kb.affects)} activities, {len(kb.related_to)} related pairs)")
    return 0


def _read_declarations(args):
    affects = None
    if getattr(args, "affects", None):
        affects = {}
        for line in Path(args.affects).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            ga, _, rest = line.partition(",")
            affects[ga] = frozenset(v for v in rest.split(";") if v)
    related = None
    if getattr(args, "related_to", None):
        pairs = set()
        for line in Path(args.related_to).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            x, _, y = line.partition(",")
            pairs.add((x, y))
        related = frozenset(pairs)
    return affects, related


def cmd_train(args) -> int:
    config = _resolve_config(args)
    settings = config.harness_settings()
    corpus = storage.load_corpus_dir(args.corpus)
    kb = build_kb(corpus, settings)
    train_rels, _ = preprocess_corpus(corpus, kb, settings)
    store = train(train_rels, settings.target_pattern_count,
                  settings.max_depth, flatten=settings.mode.flattens)
    storage.write_knowledge_base(kb, args.kb_out)
    storage.write_pattern_store(store, args.store_out)
    for ga in store.names():
        trained = store.activities[ga]
        print(f"{ga}: {len(trained.patterns)} patterns at threshold "
              f"{trained.threshold:.4f}")
    print(f"knowledge base -> {args.kb_out}")
    print(f"pattern store -> {args.store_out}")
    return 0


def cmd_recognize(args) -> int:
    config = _resolve_config(args)
    settings = config.harness_settings()
    kb = storage.read_knowledge_base(args.kb)
    store = storage.read_pattern_store(args.store)
    rows = []
    for path in sorted(Path(args.episodes).glob("*.txt")):
        episode = storage.read_episode(path)
        rel = extract_causal_relations(episode, kb, settings.pairing_horizon,
                                       filter_after=settings.mode.filters_after)
        rec = recognize(store, rel, flatten=settings.mode.flattens)
        rows.append((path.stem, rec))
        print(f"{path.stem}\t{rec.predicted}")
    storage.write_predictions(rows, args.out)
    print(f"predictions -> {args.out}")
    return 0


def cmd_experiment(args) -> int:
    config = _resolve_config(args)
    settings = config.harness_settings()
    corpus = storage.load_corpus_dir(args.corpus)
    out_dir = getattr(args, "out_dir", None)
    common = {
        "command": f"experiment {args.experiment}",
        "corpus": args.corpus,
        "episodes": corpus.total_episodes(),
        "mode": settings.mode.value,
        "target_pattern_count": settings.target_pattern_count,
        "seed": config.seed,
    }
    if args.experiment == "loocv":
        report = loocv(corpus, settings, jobs=config.jobs)
        _emit(out_dir, "results.tsv", _report_lines(report))
        _write_summary(out_dir, {**common, "macro_f1": repr(report.macro_f1),
                                 "accuracy": repr(report.accuracy)})
    elif args.experiment == "ablation":
        table = ablation_table(corpus, settings, jobs=config.jobs)
        lines = ["mode\taccuracy\tmacro_f1"]
        for mode in AblationMode:
            rep = table[mode]
            lines.append(f"{mode.value}\t{rep.accuracy:.4f}\t{rep.macro_f1:.4f}")
        _emit(out_dir, "results.tsv", lines)
        _write_summary(out_dir, {**common, "modes": len(table)})
    elif args.experiment == "sweep":
        rows = sweep_pattern_count(corpus, args.counts, settings,
                                   jobs=config.jobs)
        lines = ["target_count\tthresholds\tmacro_f1"]
        for row in rows:
            thr = " ".join(f"{ga}={t:.4f}" for ga, t in row.thresholds.items())
            lines.append(f"{row.target_count}\t{thr}\t{row.macro_f1:.4f}")
        _emit(out_dir, "results.tsv", lines)
        _write_summary(out_dir, {**common, "counts": args.counts})
    elif args.experiment == "noise":
        trend = noise_trend(corpus, args.ratios, settings,
                            missing=config.missing_probability,
                            false=config.false_probability,
                            seed=config.seed, jobs=config.jobs)
        lines = ["noisy_episode_ratio\taccuracy\tmacro_f1"]
        for ratio, rep in trend:
            lines.append(f"{ratio}\t{rep.accuracy:.4f}\t{rep.macro_f1:.4f}")
        _emit(out_dir, "results.tsv", lines)
        _write_summary(out_dir, {**common,
                                 "missing": config.missing_probability,
                                 "false": config.false_probability})
    else:  # runtime
        rows = measure_runtime(corpus, args.sizes, settings,
                               reps=args.reps, seed=config.seed)
        lines = ["episodes\tmean_seconds\trep_seconds"]
        for row in rows:
            reps = " ".join(f"{t:.4f}" for t in row.rep_seconds)
            lines.append(f"{row.size}\t{row.mean_seconds:.4f}\t{reps}")
        _emit(out_dir, "results.tsv", lines)
        _write_summary(out_dir, {**common, "sizes": args.sizes})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="causalgar",
                     description="Group-activity recognition from anonymous "
                                 "sensor event streams")
    parser.add_argument("--config", default=None, metavar="FILE",
                        help="key=value configuration file")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for all randomness")
    parser.add_argument("--jobs", type=int, default=None,
                        help="parallel workers for cross-validation folds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="convert raw record streams to episodes")
    p.add_argument("raw", nargs="+", help="raw record files")
    p.add_argument("--registry", required=True, help="source registry file")
    p.add_argument("--out-dir", required=True, help="episode output directory")
    p.add_argument("--window", type=int, default=None,
                   help="moving-average window for sensor streams")
    p.add_argument("--ga-label", default=None,
                   help="activity label stamped on every ingested episode")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("induce-kb", help="induce a knowledge base from episodes")
    p.add_argument("--registry", required=True)
    p.add_argument("--episodes", required=True, help="labeled episode directory")
    p.add_argument("--out", required=True, help="knowledge base output file")
    p.add_argument("--affects", default=None,
                   help="declared affects file (ga,ctx;ctx lines)")
    p.add_argument("--related-to", dest="related_to", default=None,
                   help="declared related_to file (ctx,ctx lines)")
    p.set_defaults(func=cmd_induce_kb)

    p = sub.add_parser("train", help="train a pattern store from a corpus")
    p.add_argument("--corpus", required=True, help="corpus directory")
    p.add_argument("--kb-out", required=True, dest="kb_out")
    p.add_argument("--store-out", required=True, dest="store_out")
    _add_setting_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("recognize", help="classify unlabeled episodes")
    p.add_argument("--kb", required=True, help="knowledge base file")
    p.add_argument("--store", required=True, help="pattern store file")
    p.add_argument("--episodes", required=True, help="episode directory")
    p.add_argument("--out", required=True, help="predictions output file")
    _add_setting_flags(p)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("experiment", help="run an evaluation experiment")
    exp = p.add_subparsers(dest="experiment", required=True)
    for name, extra in (("loocv", ()),
                        ("ablation", ()),
                        ("sweep", ("counts",)),
                        ("noise", ("ratios",)),
                        ("runtime", ("sizes", "reps"))):
        q = exp.add_parser(name)
        q.add_argument("--corpus", required=True, help="corpus directory")
        q.add_argument("--out-dir", dest="out_dir", default=None,
                       help="directory for results.tsv and summary.txt")
        if "counts" in extra:
            q.add_argument("--counts", type=_int_list, required=True,
                           help="comma-separated pattern count targets")
        if "ratios" in extra:
            q.add_argument("--ratios", type=_float_list, required=True,
                           help="comma-separated noisy episode ratios")
        if "sizes" in extra:
            q.add_argument("--sizes", type=_int_list, required=True,
                           help="comma-separated episode counts")
        if "reps" in extra:
            q.add_argument("--reps", type=int, default=3,
                           help="repetitions per size")
        _add_setting_flags(q)
        q.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 0
    except CausalgarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
