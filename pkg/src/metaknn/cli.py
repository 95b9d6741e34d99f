"""Command-line interface.

Subcommands:

  eval       score a fixed model by leave-one-out (and on a test set)
  search     run the meta-level model search, printing the level table
  sequence   build a majority-vote model sequence from a search run
  reproduce  run a bundled benchmark suite against reference results

Exit codes: 0 success, 1 usage error, 2 data error, 3 reproduction rows
outside tolerance.  All output is deterministic: rerunning a command on the
same inputs produces byte-identical stdout and output files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .dataset import DataError, Dataset, load_csv, load_monks, load_partition, minmax_rescale, split_rows
from .distance import CAMBERRA, CHEBYSHEV, MINKOWSKI, DistanceSpec
from .evaluation import EvalContext
from .knn import ModelSpec
from .metasearch import (build_pool, evaluate_sequence, meta_search,
                         select_model_sequence)
from .reproduce import SUITE_NAMES, run_suite

DISTANCE_NAMES = {
    "euclidean": (MINKOWSKI, 2),
    "manhattan": (MINKOWSKI, 1),
    "minkowski": (MINKOWSKI, None),  # alpha taken from --alpha
    "chebyshev": (CHEBYSHEV, None),
    "camberra": (CAMBERRA, None),
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this interface reserves 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_data_args(p: _Parser, test_optional=True):
    p.add_argument("--train", required=True, help="training data file")
    p.add_argument("--test", help="test data file (encoded with the training tables)")
    p.add_argument("--format", choices=("csv", "monks"), default="csv")
    p.add_argument("--label-column", default="-1",
                   help="CSV label column name or position (default: last)")
    p.add_argument("--split", metavar="TRAIN:TEST",
                   help="carve a train/test partition out of --train by row counts")
    p.add_argument("--rescale", action="store_true",
                   help="min-max rescale features to [0,1] (off by default)")
    p.add_argument("--output", help="write line-delimited JSON records to this file")


def _add_model_args(p: _Parser):
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--distance", choices=sorted(DISTANCE_NAMES), default="euclidean")
    p.add_argument("--alpha", type=int, choices=(1, 2), default=None,
                   help="minkowski exponent (with --distance minkowski)")
    p.add_argument("--weights", help="comma-separated weights for the active features")
    p.add_argument("--features", help="comma-separated 1-based active feature indices")


def _add_search_args(p: _Parser):
    p.add_argument("--channels", default="k,distance,features,weights",
                   help="comma-separated channel order")
    p.add_argument("--epsilon", type=float, default=0.0,
                   help="minimum accuracy gain to accept a level")
    p.add_argument("--k-range", default="1:10", metavar="LO:HI")
    p.add_argument("--weight-method", choices=("quantized", "simplex"), default="quantized")
    p.add_argument("--step", type=float, default=0.1, help="weight grid step")
    p.add_argument("--budget", type=int, default=2000, help="simplex evaluation budget")


def build_parser() -> _Parser:
    parser = _Parser(prog="metaknn", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate one model")
    _add_data_args(p)
    _add_model_args(p)

    p = sub.add_parser("search", help="run the meta-level model search")
    _add_data_args(p)
    _add_search_args(p)

    p = sub.add_parser("sequence", help="select a majority-vote model sequence")
    _add_data_args(p)
    _add_search_args(p)

    p = sub.add_parser("reproduce", help="run a benchmark reproduction suite")
    p.add_argument("suite", choices=SUITE_NAMES + ("all",))
    p.add_argument("--data-dir", default="data", help="directory with the bundled datasets")
    p.add_argument("--output", help="write line-delimited JSON records to this file")
    return parser


def _load(args) -> tuple[Dataset, Dataset | None]:
    label = args.label_column
    if isinstance(label, str):
        try:
            label = int(label)
        except ValueError:
            pass
    if args.format == "monks":
        loaders = {"fmt": "monks"}
        single = lambda path: load_monks(path)
    else:
        loaders = {"fmt": "csv", "label_column": label}
        single = lambda path: load_csv(path, label_column=label)
    if args.test:
        part = load_partition(args.train, args.test, **loaders)
        train, test = part.train, part.test
    elif args.split:
        try:
            n_train, n_test = (int(t) for t in args.split.split(":"))
        except ValueError:
            raise ValueError("--split expects TRAIN:TEST row counts") from None
        part = split_rows(single(args.train), n_train, n_test)
        if part.unused_rows:
            print(f"note: {part.unused_rows} rows beyond the split are unused")
        train, test = part.train, part.test
    else:
        train, test = single(args.train), None
    if args.rescale:
        train = minmax_rescale(train)
        test = minmax_rescale(test) if test is not None else None
    return train, test


def _model_from_args(args, train: Dataset) -> ModelSpec:
    kind, alpha = DISTANCE_NAMES[args.distance]
    if kind == MINKOWSKI:
        alpha = args.alpha if args.alpha is not None else (alpha or 2)
    elif args.alpha is not None:
        raise ValueError("--alpha only applies to minkowski distances")
    weights = None
    if args.weights:
        weights = np.array([float(t) for t in args.weights.split(",")])
    mask = None
    if args.features:
        indices = sorted({int(t) for t in args.features.split(",")})
        if not indices or indices[0] < 1 or indices[-1] > train.n_features:
            raise ValueError(f"--features indices must be in 1..{train.n_features}")
        mask = np.zeros(train.n_features, dtype=bool)
        mask[[i - 1 for i in indices]] = True
    return ModelSpec(k=args.k, distance=DistanceSpec(kind, alpha, weights), feature_mask=mask)


def _config_echo(args, skip=("func", "command", "output")) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, records: list[dict]):
    if args.output:
        with open(args.output, "w") as f:
            for record in records:
                f.write(json.dumps(record, sort_keys=True) + "\n")


def _fmt(correct: int, total: int) -> str:
    return f"{correct}/{total} ({100.0 * correct / total:.1f}%)"


def _print_config(config: dict):
    print("config: " + json.dumps(config, sort_keys=True))


def _model_line(model: ModelSpec, n_features: int) -> str:
    d = model.describe(n_features)
    return (f"k={d['k']} distance={d['distance']} features={d['features']} "
            f"weights={[round(w, 10) for w in d['weights']]}")


def cmd_eval(args) -> int:
    train, test = _load(args)
    model = _model_from_args(args, train)
    config = _config_echo(args)
    _print_config(config)
    print("model: " + _model_line(model, train.n_features))
    ctx = EvalContext(train, test)
    loo = ctx.loo_report(model)
    print(f"train loo: {_fmt(loo.correct_count, loo.total)}")
    print(f"train confusion: {loo.confusion.tolist()}")
    records = [{"type": "config", **config},
               {"type": "model", **model.describe(train.n_features)},
               {"type": "train", **loo.to_dict()}]
    if test is not None:
        rep = ctx.test_report(model)
        print(f"test: {_fmt(rep.correct_count, rep.total)}")
        print(f"test confusion: {rep.confusion.tolist()}")
        records.append({"type": "test", **rep.to_dict()})
    _emit(args, records)
    return 0


def _search_kwargs(args):
    try:
        lo, hi = (int(t) for t in args.k_range.split(":"))
    except ValueError:
        raise ValueError("--k-range expects LO:HI")
    return dict(channels=tuple(t.strip() for t in args.channels.split(",") if t.strip()),
                epsilon=args.epsilon, k_range=(lo, hi),
                weight_method=args.weight_method, step=args.step, budget=args.budget)


def _run_search(args):
    train, test = _load(args)
    model, trace = meta_search(train, test=test, **_search_kwargs(args))
    return train, test, model, trace


def cmd_search(args) -> int:
    train, test, model, trace = _run_search(args)
    config = _config_echo(args)
    _print_config(config)
    ref = trace.initial
    print(f"reference: {_model_line(ref.model, train.n_features)}")
    print(f"  train {_fmt(ref.train_correct, ref.train_total)}"
          + (f"  test {_fmt(ref.test_correct, ref.test_total)}" if test is not None else ""))
    for level in trace.levels:
        print(f"level {level.level}:")
        for c in level.candidates:
            line = (f"  {c.channel:<9} train {_fmt(c.train_correct, c.train_total)}"
                    + (f"  test {_fmt(c.test_correct, c.test_total)}" if test is not None else "")
                    + f"  [{_model_line(c.model, train.n_features)}]")
            print(line)
        print(f"  accepted: {level.accepted if level.accepted else 'none'}")
    print(f"stop: {trace.stop_reason}")
    print("final model: " + _model_line(model, train.n_features))
    accepted = trace.accepted_records()
    final = accepted[-1] if accepted else trace.initial
    print(f"final train {_fmt(final.train_correct, final.train_total)}"
          + (f"  test {_fmt(final.test_correct, final.test_total)}" if test is not None else ""))
    _emit(args, [{"type": "config", **config}] + trace.to_records()
          + [{"type": "final", "model": model.describe(train.n_features)}])
    return 0


def cmd_sequence(args) -> int:
    train, test, _, trace = _run_search(args)
    config = _config_echo(args)
    _print_config(config)
    pool, truths = build_pool(train, trace)
    seq = select_model_sequence(pool, truths, epsilon=args.epsilon)
    print(f"pool size: {len(pool)}")
    records = [{"type": "config", **config}]
    for i, member in enumerate(seq.members, 1):
        correct = int(np.sum(member.predictions == truths))
        print(f"member {i}: {_model_line(member.model, train.n_features)}"
              f"  train {_fmt(correct, len(truths))}")
        records.append({"type": "member", "position": i,
                        "train_correct": correct, "train_total": len(truths),
                        "model": member.model.describe(train.n_features)})
    print(f"combined train {_fmt(seq.combined_correct, seq.total)}")
    summary = {"type": "sequence", "members": len(seq.members),
               "train_correct": seq.combined_correct, "train_total": seq.total}
    if test is not None:
        test_correct, test_total = evaluate_sequence(seq, train, test)
        print(f"combined test {_fmt(test_correct, test_total)}")
        summary["test_correct"], summary["test_total"] = test_correct, test_total
    records.append(summary)
    _emit(args, records)
    return 0


def cmd_reproduce(args) -> int:
    names = SUITE_NAMES if args.suite == "all" else (args.suite,)
    records = []
    failed = False
    for name in names:
        result = run_suite(name, args.data_dir)
        print(f"suite {name}:")
        for row in result.rows:
            mark = "PASS" if row.passed else "FAIL"
            print(f"  [{mark}] {row.label}: expected {row.expected}; observed {row.observed}")
        print(f"  result: {'PASS' if result.passed else 'FAIL'}")
        records.append(result.to_dict())
        failed = failed or not result.passed
    _emit(args, records)
    return 3 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    handlers = {"eval": cmd_eval, "search": cmd_search,
                "sequence": cmd_sequence, "reproduce": cmd_reproduce}
    try:
        return handlers[args.command](args)
    except (DataError, OSError) as exc:
        print(f"metaknn: data error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"metaknn: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
