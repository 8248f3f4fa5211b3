"""Command-line driver: generate, audit, rank, replay, aggregate, train, report.

Query subcommands render plain-text tables by default; ``--json`` switches to
the canonical JSON encoding, which is byte-identical to the HTTP service body
for the equivalent endpoint.  Validation failures exit with status 2 and the
module error name on standard error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import analysis, elicitation, metrics, similarity, training
from .bundled import (
    AUDIT_EXAMPLES,
    load_audit_example,
    load_default_dataset,
    load_default_schema,
)
from .data import (
    Dataset,
    dataset_from_jsonable,
    dataset_to_jsonable,
    generate_synthetic,
    save_dataset_csv,
    schema_from_jsonable,
)
from .errors import FairlicitError, InvalidChoiceError, SchemaError
from .serialize import canonical_json
from .service import pairwise_responses

BATCH_FORMAT = "fairlicit-session-batch"
BATCH_VERSION = 1


# --------------------------------------------------------------------- tables


def _format_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Aligned plain-text table: first column left, the rest right."""
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def render(cells: Sequence[str]) -> str:
        parts = [cells[0].ljust(widths[0])]
        parts += [cells[i].rjust(widths[i]) for i in range(1, len(cells))]
        return "  ".join(parts).rstrip()

    return "\n".join([render(headers)] + [render(list(r)) for r in rows])


def _rate_text(value: float | None) -> str:
    return "-" if value is None else f"{value:.3f}"


# ---------------------------------------------------------------------- input


def _read_json(path: str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from None


def _load_dataset_arg(args: argparse.Namespace) -> Dataset:
    if getattr(args, "bundled", None):
        name = args.bundled
        if name == "default":
            return load_default_dataset()
        return load_audit_example(name)
    if getattr(args, "dataset", None):
        return dataset_from_jsonable(_read_json(args.dataset))
    raise SchemaError("a dataset is required (--dataset PATH or --bundled NAME)")


def _parse_weights_arg(text: str | None) -> list[float] | None:
    if text is None or text == "":
        return None
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise SchemaError(f"malformed weights {text!r}") from None


def _session_logs_from_dir(directory: str) -> list[dict[str, Any]]:
    root = Path(directory)
    if not root.is_dir():
        raise SchemaError(f"{directory} is not a directory")
    files = sorted(root.glob("*.json"))
    if not files:
        raise SchemaError(f"no session logs found in {directory}")
    return [_read_json(str(path)) for path in files]


def _session_logs_arg(args: argparse.Namespace) -> list[dict[str, Any]]:
    """Session logs from --sessions DIR, or a batch document on stdin."""
    if args.sessions:
        return _session_logs_from_dir(args.sessions)
    try:
        batch = json.load(sys.stdin)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"stdin is not valid JSON: {exc}") from None
    if not isinstance(batch, dict) or "sessions" not in batch:
        raise SchemaError('expected a batch object with a "sessions" list on stdin')
    return list(batch["sessions"])


# ----------------------------------------------------------------- subcommands


def _cmd_gen(args: argparse.Namespace) -> int:
    schema = (
        schema_from_jsonable(_read_json(args.schema)) if args.schema else load_default_schema()
    )
    marginals = _read_json(args.marginals) if args.marginals else None
    dataset = generate_synthetic(
        schema, n=args.n, seed=args.seed, marginals=marginals, threshold=args.threshold
    )
    Path(args.out).write_text(canonical_json(dataset_to_jsonable(dataset)), encoding="utf-8")
    if args.csv:
        save_dataset_csv(dataset, args.csv)
    print(f"wrote {len(dataset.cases)} cases to {args.out}")
    return 0


def _cmd_audit(args: argparse.Namespace) -> int:
    dataset = _load_dataset_arg(args)
    report = metrics.fairness_report(dataset, args.attribute, args.criterion, args.epsilon)
    payload = metrics.report_to_jsonable(report)
    if args.json:
        sys.stdout.write(canonical_json(payload))
        return 0

    if args.criterion == "statistical_parity":
        columns = ["positive_rate"]
    else:
        columns = ["fpr", "fnr"]
    headers = ["subgroup", "n"] + columns
    rows = [
        [entry["value"], str(entry["n"])] + [_rate_text(entry[c]) for c in columns]
        for entry in payload["subgroups"]
    ]
    print(f"{args.criterion} on {args.attribute} (epsilon {args.epsilon:.3f})")
    print()
    print(_format_table(headers, rows))
    print()
    print(f"max gap {payload['max_gap']:.3f}, verdict {payload['verdict'].upper()}")
    return 0


def _cmd_similar(args: argparse.Namespace) -> int:
    dataset = _load_dataset_arg(args)
    weights = _parse_weights_arg(args.weights)

    if args.discordant is not None:
        pairs = similarity.nearest_discordant_pairs(dataset, weights, args.discordant)
        payload = similarity.pairs_to_jsonable(pairs)
        if args.json:
            sys.stdout.write(canonical_json(payload))
            return 0
        headers = ["case_a", "case_b", "distance"]
        rows = [[p["a"], p["b"], p["distance"]] for p in payload["pairs"]]
        print(_format_table(headers, rows))
        return 0

    if not args.reference:
        raise SchemaError("--reference is required unless --discordant is given")
    ranking = similarity.rank_by_similarity(dataset, args.reference, weights)
    payload = similarity.ranking_to_jsonable(ranking)
    if args.json:
        sys.stdout.write(canonical_json(payload))
        return 0
    print(f"reference: {payload['reference']}")
    print()
    headers = ["id", "distance", "prediction"]
    rows = [[e["id"], e["distance"], e["prediction"]] for e in payload["entries"]]
    print(_format_table(headers, rows))
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    dataset = _load_dataset_arg(args) if (args.dataset or args.bundled) else load_default_dataset()
    logs = _session_logs_from_dir(args.sessions)
    replayed = []
    for log in logs:
        session = elicitation.replay_session(log, dataset)
        replayed.append(elicitation.export_session(session))
    batch = {"format": BATCH_FORMAT, "version": BATCH_VERSION, "sessions": replayed}
    sys.stdout.write(canonical_json(batch))
    return 0


def _cmd_aggregate(args: argparse.Namespace) -> int:
    logs = _session_logs_arg(args)
    matrix = analysis.matrix_from_sessions(logs)
    summary = analysis.consensus_summary(matrix)
    if args.json:
        sys.stdout.write(canonical_json(analysis.summary_to_jsonable(summary)))
        return 0
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(analysis.CSV_HEADER)
    for row in analysis.summary_csv_rows(matrix):
        writer.writerow(row)
    return 0


def _training_config(args: argparse.Namespace) -> training.TrainingConfig:
    return training.TrainingConfig(
        lambda_pair=args.lambda_pair,
        lambda_parity=args.lambda_parity,
        lambda_odds=args.lambda_odds,
        margin=args.margin,
        l2=args.l2,
        excluded_attributes=tuple(args.exclude.split(",")) if args.exclude else (),
        seed=args.seed,
        learning_rate=args.learning_rate,
        decay=args.decay,
        max_iterations=args.max_iterations,
        tolerance=args.tolerance,
    )


def _cmd_train(args: argparse.Namespace) -> int:
    dataset = _load_dataset_arg(args)
    logs = _session_logs_arg(args)
    responses: list[tuple[str, str, str]] = []
    for log in logs:
        responses.extend(pairwise_responses(elicitation.import_session(log)))
    config = _training_config(args)
    constraints = training.derive_constraints(
        responses, policy=args.policy, margin=config.margin
    )
    model, report = training.train(dataset, constraints, config)
    Path(args.out).write_text(canonical_json(training.model_to_jsonable(model)), encoding="utf-8")
    if args.report:
        Path(args.report).write_text(
            canonical_json(training.report_to_jsonable(report)), encoding="utf-8"
        )
    if args.json:
        sys.stdout.write(canonical_json(training.report_to_jsonable(report)))
    else:
        print(training.report_text(report))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    if args.store:
        path = Path(args.store) / "reports" / f"{args.model_id}.json"
        if not path.is_file():
            raise SchemaError(f"no stored report for model {args.model_id!r}")
        payload = _read_json(str(path))
    else:
        if not args.model:
            raise SchemaError("--model PATH is required without --store")
        model = training.model_from_jsonable(_read_json(args.model))
        dataset = _load_dataset_arg(args)
        report = training.evaluate(model, dataset)
        payload = training.report_to_jsonable(report)
    if args.json:
        sys.stdout.write(canonical_json(payload))
        return 0
    print(training.report_text(training.report_from_jsonable(payload)))
    return 0


# --------------------------------------------------------------------- parser


def _add_dataset_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", help="dataset JSON file")
    parser.add_argument(
        "--bundled",
        choices=("default",) + AUDIT_EXAMPLES,
        help="use a bundled example dataset instead of --dataset",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairlicit",
        description="fairness elicitation and auditing over tabular risk predictions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--schema", help="schema JSON file (default: bundled schema)")
    p.add_argument("--marginals", help="marginals JSON file")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out", required=True, help="output dataset JSON file")
    p.add_argument("--csv", help="also write the case table as CSV")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("audit", help="group-fairness audit of a dataset")
    _add_dataset_flags(p)
    p.add_argument(
        "--criterion",
        required=True,
        choices=("statistical_parity", "equalized_odds"),
    )
    p.add_argument("--attribute", required=True)
    p.add_argument("--epsilon", type=float, default=metrics.DEFAULT_EPSILON)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("similar", help="rank cases by weighted distance to a reference")
    _add_dataset_flags(p)
    p.add_argument("--reference", help="reference case id")
    p.add_argument("--weights", help="comma-separated per-feature weights")
    p.add_argument(
        "--discordant",
        type=int,
        metavar="K",
        help="instead list the K closest discordant pairs",
    )
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_similar)

    p = sub.add_parser("replay", help="validate session logs and emit a batch document")
    p.add_argument("--sessions", required=True, help="directory of session JSON logs")
    _add_dataset_flags(p)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("aggregate", help="consensus summary over session logs")
    p.add_argument("--sessions", help="directory of session JSON logs (default: stdin batch)")
    p.add_argument("--json", action="store_true", help="JSON summary instead of CSV rows")
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("train", help="fit a constrained scoring model from session responses")
    _add_dataset_flags(p)
    p.add_argument("--sessions", help="directory of session JSON logs (default: stdin batch)")
    p.add_argument("--policy", default="borda_aggregate", choices=training.POLICIES)
    p.add_argument("--lambda-pair", type=float, default=1.0)
    p.add_argument("--lambda-parity", type=float, default=0.0)
    p.add_argument("--lambda-odds", type=float, default=0.0)
    p.add_argument("--margin", type=float, default=0.1)
    p.add_argument("--l2", type=float, default=1e-3)
    p.add_argument("--exclude", help="comma-separated sensitive attributes to drop")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--learning-rate", type=float, default=0.3)
    p.add_argument("--decay", type=float, default=0.0)
    p.add_argument("--max-iterations", type=int, default=5000)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--out", required=True, help="output model JSON file")
    p.add_argument("--report", help="also write the training report JSON")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("report", help="evaluate a model or print a stored training report")
    _add_dataset_flags(p)
    p.add_argument("--model", help="model JSON file (recompute against --dataset)")
    p.add_argument("--store", help="service store directory")
    p.add_argument("--model-id", help="model id within --store")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FairlicitError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
