"""Command-line pipeline: extract -> score -> classify -> evaluate,
plus the category-importance reports, per-word timelines and top-k
ranking views.

Every subcommand is deterministic: identical inputs and flags produce
byte-identical outputs. Exit codes: 0 success, 1 data errors, 2
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, TextIO

import yaml

from . import __version__
from .analysis import (build_feature_matrix, category_correlations, standardize,
                       timeline, train_logreg)
from .conllu import load_targets
from .decision import average_binary, classify_changepoint, classify_topn, rank_words
from .errors import ConfigError, DataError, GramprofError
from .evaluation import accuracy, binary_gold, graded_gold, load_gold, macro_f1, \
    per_class_f1, spearman
from .profiles import ProfileStore, extract_profiles
from .scoring import MethodConfig, score_period_pair

logger = logging.getLogger(__name__)

DEFAULT_FILTER = 0.05
DEFAULT_RATIO = 0.43


@dataclass
class DatasetSpec:
    """A dataset description: corpora per period, the period pairs to
    compare, the target list and optional gold data.

    When no pairs are declared, consecutive periods are compared, plus
    (first, last) when there are three or more periods.
    """

    name: str
    periods: list[tuple[str, list[str]]]
    targets_path: str
    gold_path: Optional[str] = None
    pairs: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        if len(self.periods) < 2:
            raise ConfigError("dataset needs at least 2 periods")
        labels = [label for label, _ in self.periods]
        if len(set(labels)) != len(labels):
            raise ConfigError("duplicate period labels")
        if not self.pairs:
            self.pairs = list(zip(labels, labels[1:]))
            if len(labels) >= 3:
                self.pairs.append((labels[0], labels[-1]))
        for a, b in self.pairs:
            if a not in labels or b not in labels:
                raise ConfigError(f"pair ({a!r}, {b!r}) references an undeclared period")

    @property
    def period_labels(self) -> list[str]:
        return [label for label, _ in self.periods]


def load_dataset_spec(path) -> DatasetSpec:
    """Read a dataset description from a YAML file. Relative paths are
    resolved against the file's directory."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path}: expected a mapping at the top level")
    base = path.parent

    def resolve(p) -> str:
        return str((base / str(p)))

    try:
        periods = []
        for entry in raw["periods"]:
            paths = entry["paths"]
            if not isinstance(paths, list) or not paths:
                raise ConfigError(f"config {path}: period {entry.get('label')!r} "
                                  f"needs a non-empty 'paths' list")
            periods.append((str(entry["label"]), [resolve(p) for p in paths]))
        pairs = [tuple(str(x) for x in pair) for pair in raw.get("pairs") or []]
        for pair in pairs:
            if len(pair) != 2:
                raise ConfigError(f"config {path}: pairs must have exactly 2 labels")
        spec = DatasetSpec(
            name=str(raw.get("name", path.stem)),
            periods=periods,
            targets_path=resolve(raw["targets"]),
            gold_path=resolve(raw["gold"]) if raw.get("gold") else None,
            pairs=pairs,
        )
    except KeyError as exc:
        raise ConfigError(f"config {path}: missing required key {exc}")
    for _, paths in spec.periods:
        for p in paths:
            if not Path(p).exists():
                raise ConfigError(f"config {path}: corpus file not found: {p}")
    if not Path(spec.targets_path).exists():
        raise ConfigError(f"config {path}: target file not found: {spec.targets_path}")
    return spec


# ----------------------------------------------------------------------
# small I/O helpers

def _open_output(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _read_score_tsv(path) -> dict[str, float]:
    """Read ``word_id<TAB>score`` lines."""
    scores: dict[str, float] = {}
    try:
        f = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}")
    with f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            columns = line.split("\t")
            if len(columns) < 2:
                raise DataError(f"{path}: line {line_number}: expected "
                                f"word_id<TAB>score")
            try:
                value = float(columns[1])
            except ValueError as exc:
                raise DataError(f"{path}: line {line_number}: {exc}")
            if columns[0] in scores:
                raise DataError(f"{path}: line {line_number}: duplicate word "
                                f"{columns[0]!r}")
            scores[columns[0]] = value
        if not scores:
            raise DataError(f"{path}: no scores found")
    return scores


def _read_label_tsv(path) -> dict[str, int]:
    """Read ``word_id<TAB>{0|1}`` lines."""
    labels: dict[str, int] = {}
    try:
        f = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}")
    with f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            columns = line.split("\t")
            if len(columns) < 2 or columns[1] not in ("0", "1"):
                raise DataError(f"{path}: line {line_number}: expected "
                                f"word_id<TAB>0|1")
            if columns[0] in labels:
                raise DataError(f"{path}: line {line_number}: duplicate word "
                                f"{columns[0]!r}")
            labels[columns[0]] = int(columns[1])
        if not labels:
            raise DataError(f"{path}: no labels found")
    return labels


def _load_store(path) -> ProfileStore:
    try:
        f = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read profile store {path}: {exc}")
    with f:
        return ProfileStore.load(f)


def _resolve_pair(store: ProfileStore, pair: Optional[list[str]]) -> tuple[str, str]:
    if pair:
        a, b = pair
    elif len(store.periods) == 2:
        a, b = store.periods
    else:
        raise ConfigError(f"store has periods {store.periods}; select two "
                          f"with --pair")
    for label in (a, b):
        if label not in store.periods:
            raise ConfigError(f"period {label!r} not in store (has {store.periods})")
    return a, b


def _method_config(args) -> MethodConfig:
    return MethodConfig(
        feature_kind=getattr(args, "features", "morphology"),
        separation=getattr(args, "separate", True),
        aggregation=getattr(args, "aggregate", "max"),
        filter_threshold=args.filter,
        zero_profile_distance=args.zero_distance,
        per_period_filter=args.filter_per_period,
    )


def _emit_report(rows: list[dict], stream: TextIO, output_format: str,
                 column_order: list[str]) -> None:
    """Write report rows as an aligned text table, TSV, or JSON lines."""
    if output_format == "json-lines":
        for row in rows:
            stream.write(json.dumps(row, sort_keys=True) + "\n")
        return
    cells = [[_format_cell(row.get(c)) for c in column_order] for row in rows]
    if output_format == "tsv":
        stream.write("\t".join(column_order) + "\n")
        for row_cells in cells:
            stream.write("\t".join(row_cells) + "\n")
        return
    widths = [max(len(column_order[i]),
                  max((len(c[i]) for c in cells), default=0))
              for i in range(len(column_order))]
    stream.write("  ".join(column_order[i].ljust(widths[i])
                           for i in range(len(column_order))).rstrip() + "\n")
    for row_cells in cells:
        stream.write("  ".join(row_cells[i].ljust(widths[i])
                               for i in range(len(column_order))).rstrip() + "\n")


def _format_cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


# ----------------------------------------------------------------------
# subcommands

def cmd_extract(args) -> int:
    spec = load_dataset_spec(args.config)
    targets = load_targets(spec.targets_path)
    corpora = {label: paths for label, paths in spec.periods}
    profiles = extract_profiles(
        corpora, targets,
        case_fold=args.case_fold,
        match_field="form" if args.match_form else "lemma",
        strip_subtypes=args.strip_deprel_subtype,
        errors="strict" if args.strict else "skip",
    )
    store = ProfileStore(
        periods=spec.period_labels,
        profiles=profiles,
        options={
            "dataset": spec.name,
            "case_fold": args.case_fold,
            "match_field": "form" if args.match_form else "lemma",
            "strip_deprel_subtype": args.strip_deprel_subtype,
        },
    )
    with open(args.output, "w", encoding="utf-8") as f:
        store.save(f)
    for word_id in store.word_ids:
        counts = "  ".join(f"{period}={store.get(word_id, period).total}"
                           for period in store.periods)
        print(f"{word_id}: {counts}")
        if all(store.get(word_id, period).total == 0 for period in store.periods):
            logger.warning("target %r matched nothing in any period", word_id)
    logger.info("wrote %d profiles to %s", len(profiles), args.output)
    return 0


def cmd_score(args) -> int:
    store = _load_store(args.store)
    pair = _resolve_pair(store, args.pair)
    config = _method_config(args)
    scores = score_period_pair(store.profiles, pair, config)
    by_word = {s.word_id: s for s in scores}
    ranking = rank_words({s.word_id: s.aggregate for s in scores})
    stream, close = _open_output(args.output)
    try:
        if args.explain:
            categories = sorted({c for s in scores for c in s.per_category})
            header = ["word_id", "score", "d_morph", "d_synt"] + categories
            stream.write("\t".join(header) + "\n")
            for word_id, aggregate in ranking:
                s = by_word[word_id]
                row = [word_id, f"{aggregate:.6f}",
                       "-" if s.d_morph is None else f"{s.d_morph:.6f}",
                       "-" if s.d_synt is None else f"{s.d_synt:.6f}"]
                row += [f"{s.per_category[c]:.6f}" if c in s.per_category else "-"
                        for c in categories]
                stream.write("\t".join(row) + "\n")
        else:
            for word_id, aggregate in ranking:
                stream.write(f"{word_id}\t{aggregate:.6f}\n")
    finally:
        if close:
            stream.close()
    return 0


def cmd_classify(args) -> int:
    scores = _read_score_tsv(args.ranking)
    ranking = rank_words(scores)
    if args.changepoint:
        labels = classify_changepoint(ranking)
    else:
        ratio = args.ratio if args.ratio is not None else DEFAULT_RATIO
        if not 0.0 <= ratio <= 1.0:
            raise ConfigError(f"--ratio must be in [0, 1], got {ratio}")
        labels = classify_topn(ranking, ratio)
    stream, close = _open_output(args.output)
    try:
        for word_id, _ in ranking:
            stream.write(f"{word_id}\t{labels[word_id]}\n")
    finally:
        if close:
            stream.close()
    return 0


def cmd_evaluate(args) -> int:
    gold_records = load_gold(args.gold)
    rows: list[dict]
    if args.task == "binary":
        pred = _read_label_tsv(args.pred)
        gold = binary_gold(gold_records)
        f1 = per_class_f1(pred, gold)
        rows = [
            {"metric": "accuracy", "value": accuracy(pred, gold)},
            {"metric": "macro_f1", "value": macro_f1(pred, gold)},
            {"metric": "f1_class_0", "value": f1[0]},
            {"metric": "f1_class_1", "value": f1[1]},
            {"metric": "n", "value": len(pred)},
        ]
    else:
        pred = _read_score_tsv(args.pred)
        gold = graded_gold(gold_records)
        rows = [
            {"metric": "spearman", "value": spearman(pred, gold)},
            {"metric": "n", "value": len(pred)},
        ]
    _emit_report(rows, sys.stdout, args.format, ["metric", "value"])
    return 0


def cmd_analyze(args) -> int:
    store = _load_store(args.store)
    pair = _resolve_pair(store, args.pair)
    gold_records = load_gold(args.gold)
    config = MethodConfig(
        feature_kind="combination", separation=True,
        filter_threshold=args.filter,
        zero_profile_distance=args.zero_distance,
        per_period_filter=args.filter_per_period,
    )
    matrix = build_feature_matrix(store.profiles, pair, config)
    if args.subset_suffix:
        keep = [w for w in matrix.word_ids if w.endswith(args.subset_suffix)]
        if not keep:
            raise DataError(f"no words match suffix {args.subset_suffix!r}")
        matrix = matrix.subset(keep)
        gold_records = {w: r for w, r in gold_records.items() if w in set(keep)}

    if args.report == "logreg":
        gold = binary_gold(gold_records)
        standardized, constant = standardize(matrix)
        for column in constant:
            logger.warning("category %r has constant distances; weight is "
                           "uninformative", column)
        result = train_logreg(standardized, gold,
                              l2_inverse_strength=args.l2)
        rows = [{"category": column,
                 "coefficient": float(result.coefficients[j]),
                 "positive": bool(result.coefficients[j] > 0)}
                for j, column in enumerate(result.columns)]
        rows.sort(key=lambda r: (-r["coefficient"], r["category"]))
        _emit_report(rows, sys.stdout, args.format,
                     ["category", "coefficient", "positive"])
        summary = [
            {"metric": "top_categories",
             "value": ", ".join(result.positive_categories) or "-"},
            {"metric": "train_accuracy", "value": result.train_accuracy},
            {"metric": "train_macro_f1", "value": result.train_macro_f1},
            {"metric": "iterations", "value": result.iterations},
        ]
        _emit_report(summary, sys.stdout, args.format, ["metric", "value"])
    else:
        gold = graded_gold(gold_records)
        results = category_correlations(
            matrix, gold,
            missing_as_absent=args.missing_as_absent,
            exact_p=args.exact_p,
        )
        rows = []
        for r in results:
            # text report mimics the usual presentation: '-' when not
            # significant; machine formats keep the value
            display_rho = r.rho if (args.format != "text" or r.significant) else None
            rows.append({
                "category": r.column,
                "rho": display_rho,
                "p_value": r.p_value,
                "significant": r.significant,
                "n": r.n,
                "note": r.note or None,
            })
        _emit_report(rows, sys.stdout, args.format,
                     ["category", "rho", "p_value", "significant", "n", "note"])
    return 0


def cmd_timeline(args) -> int:
    store = _load_store(args.store)
    if args.word not in set(store.word_ids):
        raise DataError(f"word {args.word!r} not in store; available: "
                        f"{', '.join(store.word_ids)}")
    profiles_by_period = {period: store.get(args.word, period)
                          for period in store.periods}
    rows = timeline(profiles_by_period, args.category)
    stream, close = _open_output(args.output)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["period", "value", "count", "proportion"])
        for row in rows:
            writer.writerow([row.period, row.value, row.count,
                             f"{row.proportion:.6f}"])
    finally:
        if close:
            stream.close()
    return 0


def cmd_rank(args) -> int:
    scores = _read_score_tsv(args.ranking)
    if args.top < 1:
        raise ConfigError("--top must be at least 1")
    for word_id, score in rank_words(scores)[:args.top]:
        print(f"{word_id}\t{score:.6f}")
    return 0


def cmd_combine_labels(args) -> int:
    labels_a = _read_label_tsv(args.labels_a)
    labels_b = _read_label_tsv(args.labels_b)
    combined = average_binary(labels_a, labels_b)
    stream, close = _open_output(args.output)
    try:
        for word_id in sorted(combined):
            stream.write(f"{word_id}\t{combined[word_id]}\n")
    finally:
        if close:
            stream.close()
    return 0


# ----------------------------------------------------------------------
# parser

def _add_filter_flags(parser) -> None:
    parser.add_argument("--filter", type=float, default=DEFAULT_FILTER,
                        metavar="SHARE",
                        help="drop features rarer than this share of the word's "
                             "usages (default %(default)s)")
    parser.add_argument("--filter-per-period", action="store_true",
                        help="compare feature counts against each period's own "
                             "total instead of the summed totals")
    parser.add_argument("--zero-distance", type=float, default=1.0, metavar="D",
                        help="distance for a profile present in only one period "
                             "(default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gramprof",
        description="Detect lexical semantic change from pre-tagged diachronic "
                    "corpora using grammatical profiles.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=None,
                        help="accepted for harness compatibility; the pipeline "
                             "is deterministic and ignores it")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="enable debug logging")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("extract", help="count grammatical profiles from corpora")
    p.add_argument("-c", "--config", required=True, help="dataset YAML file")
    p.add_argument("-o", "--output", required=True, help="profile store to write")
    p.add_argument("--match-form", action="store_true",
                   help="match targets on surface form instead of lemma")
    p.add_argument("--case-fold", action="store_true",
                   help="case-insensitive target matching")
    p.add_argument("--strip-deprel-subtype", action="store_true",
                   help="truncate dependency relations at ':' (obl:tmod -> obl)")
    p.add_argument("--strict", action="store_true",
                   help="abort on malformed CONLL-U lines instead of skipping")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("score", help="compute change scores for a period pair")
    p.add_argument("store", help="profile store from 'extract'")
    p.add_argument("-o", "--output", default=None, help="ranking TSV (default stdout)")
    p.add_argument("--features", choices=["morphology", "syntax", "average",
                                          "combination"],
                   default="morphology", help="feature set (default %(default)s)")
    p.add_argument("--separate", action="store_true",
                   help="score each morphological category separately")
    p.add_argument("--aggregate", choices=["max", "mean"], default="max",
                   help="how to aggregate per-category distances "
                        "(default %(default)s)")
    _add_filter_flags(p)
    p.add_argument("--pair", nargs=2, metavar=("A", "B"), default=None,
                   help="period labels to compare (default: the store's two "
                        "periods)")
    p.add_argument("--explain", action="store_true",
                   help="add per-category distance columns")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("classify", help="binary labels from a score ranking")
    p.add_argument("ranking", help="ranking TSV from 'score'")
    p.add_argument("-o", "--output", default=None, help="label TSV (default stdout)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--ratio", type=float, default=None, metavar="R",
                       help=f"label the top share as changed (e.g. {DEFAULT_RATIO})")
    group.add_argument("--changepoint", action="store_true",
                       help="find the split automatically by change-point "
                            "detection")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="score predictions against gold data")
    p.add_argument("pred", help="prediction TSV")
    p.add_argument("gold", help="gold TSV (word_id, binary, graded; '-' for "
                                "absent)")
    p.add_argument("--task", choices=["binary", "graded"], required=True)
    p.add_argument("--format", choices=["text", "tsv", "json-lines"],
                   default="text")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("analyze", help="category-importance reports")
    p.add_argument("store", help="profile store from 'extract'")
    p.add_argument("gold", help="gold TSV")
    p.add_argument("--report", choices=["logreg", "correlation"], required=True)
    p.add_argument("--pair", nargs=2, metavar=("A", "B"), default=None)
    _add_filter_flags(p)
    p.add_argument("--l2", type=float, default=1.0, metavar="C",
                   help="inverse L2 regularization strength for the logistic "
                        "regression (default %(default)s)")
    p.add_argument("--missing-as-absent", action="store_true",
                   help="drop words lacking a category from that category's "
                        "correlation instead of treating the distance as 0")
    p.add_argument("--exact-p", action="store_true",
                   help="exact permutation p-values (n <= 10 only)")
    p.add_argument("--subset-suffix", default=None, metavar="SUFFIX",
                   help="restrict the analysis to word_ids with this suffix "
                        "(e.g. _nn)")
    p.add_argument("--format", choices=["text", "tsv", "json-lines"],
                   default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("timeline", help="value distribution of one category "
                                        "over periods for one word")
    p.add_argument("store", help="profile store from 'extract'")
    p.add_argument("word", help="target word_id")
    p.add_argument("category", help="morphological category (or 'syntax')")
    p.add_argument("-o", "--output", default=None, help="CSV (default stdout)")
    p.set_defaults(func=cmd_timeline)

    p = sub.add_parser("rank", help="show the top of a score ranking")
    p.add_argument("ranking", help="ranking TSV from 'score'")
    p.add_argument("--top", type=int, default=10, metavar="K",
                   help="number of words to show (default %(default)s)")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("combine-labels",
                       help="merge two binary labelings (1 wins on disagreement)")
    p.add_argument("labels_a", help="label TSV")
    p.add_argument("labels_b", help="label TSV")
    p.add_argument("-o", "--output", default=None, help="label TSV (default stdout)")
    p.set_defaults(func=cmd_combine_labels)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GramprofError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
