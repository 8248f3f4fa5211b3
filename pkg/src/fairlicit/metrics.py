"""Group fairness metrics over hard predictions.

All rates are exact rationals (:class:`fractions.Fraction`); a rate whose
denominator is empty is ``None`` rather than a made-up number.  Verdicts
compare the largest pairwise subgroup gap against an epsilon tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .data import Dataset, FeatureSchema, HIGH, LOW
from .errors import (
    InvalidChoiceError,
    MissingLabelsError,
    MissingPredictionsError,
    UnknownAttributeError,
)

DEFAULT_EPSILON = 0.05

CRITERIA = ("unawareness", "statistical_parity", "equalized_odds")

GROUP_VIEW_METRICS = ("positive_rate", "fpr", "fnr", "accuracy")

SATISFIED = "satisfied"
VIOLATED = "violated"
UNDEFINED = "undefined"


@dataclass(frozen=True)
class SubgroupStats:
    """Confusion-derived statistics for one subgroup of one attribute.

    Label-dependent fields are ``None`` when the dataset carries no ground
    truth; rate fields are ``None`` when their denominator is empty.
    """

    attribute: str
    value: str
    n: int
    n_predicted_high: int
    n_true_high: int | None
    n_true_low: int | None
    positive_rate: Fraction | None
    fpr: Fraction | None
    fnr: Fraction | None
    accuracy: Fraction | None


@dataclass(frozen=True)
class FairnessReport:
    attribute: str
    criterion: str
    epsilon: float
    per_subgroup: tuple[SubgroupStats, ...]
    max_gap: Fraction
    verdict: str


@dataclass(frozen=True)
class GroupViewRow:
    subgroup: tuple[str, ...]
    n: int
    value: Fraction | None


@dataclass(frozen=True)
class GroupViewSummary:
    attributes: tuple[str, ...]
    metric: str
    rows: tuple[GroupViewRow, ...]
    description: str


@dataclass(frozen=True)
class AwarenessConfig:
    """Which sensitive attributes a model must not see."""

    excluded_attributes: tuple[str, ...] = ()

    def validate(self, schema: FeatureSchema) -> None:
        for attr in self.excluded_attributes:
            if not schema.has_feature(attr):
                raise UnknownAttributeError(attr)


def _require_attribute(dataset: Dataset, attribute: str) -> None:
    if not dataset.schema.has_feature(attribute):
        raise UnknownAttributeError(attribute)


def _require_predictions(dataset: Dataset) -> None:
    for case in dataset.cases:
        if case.prediction is None:
            raise MissingPredictionsError(f"case {case.id!r} has no prediction")


def _labels_available(dataset: Dataset) -> bool:
    return all(c.true_label is not None for c in dataset.cases)


def subgroup_stats(dataset: Dataset, attribute: str) -> tuple[SubgroupStats, ...]:
    """Per-value statistics for ``attribute``, in schema value order.

    Every schema value gets a row, populated or not.  Requires predictions on
    every case; label-dependent fields are filled only when every case is
    labeled, so partially labeled data never yields half-true rates.
    """
    _require_attribute(dataset, attribute)
    _require_predictions(dataset)
    labeled = _labels_available(dataset)
    feature = dataset.schema.feature(attribute)

    out = []
    for value in feature.values:
        members = [c for c in dataset.cases if c.values[attribute] == value]
        n = len(members)
        n_pos = sum(1 for c in members if c.prediction == HIGH)
        if labeled:
            true_high = [c for c in members if c.true_label == HIGH]
            true_low = [c for c in members if c.true_label == LOW]
            n_fp = sum(1 for c in true_low if c.prediction == HIGH)
            n_fn = sum(1 for c in true_high if c.prediction == LOW)
            n_correct = sum(1 for c in members if c.prediction == c.true_label)
            stats = SubgroupStats(
                attribute=attribute,
                value=value,
                n=n,
                n_predicted_high=n_pos,
                n_true_high=len(true_high),
                n_true_low=len(true_low),
                positive_rate=Fraction(n_pos, n) if n else None,
                fpr=Fraction(n_fp, len(true_low)) if true_low else None,
                fnr=Fraction(n_fn, len(true_high)) if true_high else None,
                accuracy=Fraction(n_correct, n) if n else None,
            )
        else:
            stats = SubgroupStats(
                attribute=attribute,
                value=value,
                n=n,
                n_predicted_high=n_pos,
                n_true_high=None,
                n_true_low=None,
                positive_rate=Fraction(n_pos, n) if n else None,
                fpr=None,
                fnr=None,
                accuracy=None,
            )
        out.append(stats)
    return tuple(out)


def _max_pairwise_gap(rates: Sequence[Fraction]) -> Fraction:
    gap = Fraction(0)
    for i in range(len(rates)):
        for j in range(i + 1, len(rates)):
            d = abs(rates[i] - rates[j])
            if d > gap:
                gap = d
    return gap


def statistical_parity_report(
    dataset: Dataset, attribute: str, epsilon: float = DEFAULT_EPSILON
) -> FairnessReport:
    """Largest pairwise gap in positive-classification rate across subgroups.

    Unpopulated subgroups are excluded from the gap; with fewer than two
    populated subgroups the gap is zero and the verdict is satisfied.
    """
    stats = subgroup_stats(dataset, attribute)
    rates = [s.positive_rate for s in stats if s.n > 0]
    gap = _max_pairwise_gap(rates)
    verdict = SATISFIED if gap <= epsilon else VIOLATED
    return FairnessReport(
        attribute=attribute,
        criterion="statistical_parity",
        epsilon=epsilon,
        per_subgroup=stats,
        max_gap=gap,
        verdict=verdict,
    )


def equalized_odds_report(
    dataset: Dataset, attribute: str, epsilon: float = DEFAULT_EPSILON
) -> FairnessReport:
    """Largest pairwise gap in FPR or FNR across subgroups.

    Needs ground truth on every case.  A populated subgroup with no
    true-low (or no true-high) members has an undefined FPR (FNR); any such
    subgroup makes the verdict ``undefined``, with the gap taken over the
    pairs where both rates exist.
    """
    if not _labels_available(dataset):
        raise MissingLabelsError("equalized odds needs a true label on every case")
    stats = subgroup_stats(dataset, attribute)
    populated = [s for s in stats if s.n > 0]

    gap = Fraction(0)
    any_undefined = False
    for s in populated:
        if s.fpr is None or s.fnr is None:
            any_undefined = True
    for rate_name in ("fpr", "fnr"):
        rates = [getattr(s, rate_name) for s in populated]
        rates = [r for r in rates if r is not None]
        g = _max_pairwise_gap(rates)
        if g > gap:
            gap = g

    if any_undefined:
        verdict = UNDEFINED
    else:
        verdict = SATISFIED if gap <= epsilon else VIOLATED
    return FairnessReport(
        attribute=attribute,
        criterion="equalized_odds",
        epsilon=epsilon,
        per_subgroup=stats,
        max_gap=gap,
        verdict=verdict,
    )


def fairness_report(
    dataset: Dataset, attribute: str, criterion: str, epsilon: float = DEFAULT_EPSILON
) -> FairnessReport:
    if criterion == "statistical_parity":
        return statistical_parity_report(dataset, attribute, epsilon)
    if criterion == "equalized_odds":
        return equalized_odds_report(dataset, attribute, epsilon)
    raise InvalidChoiceError("criterion", criterion, ("statistical_parity", "equalized_odds"))


def _metric_value(cases: list, metric: str) -> Fraction | None:
    n = len(cases)
    if metric == "positive_rate":
        return Fraction(sum(1 for c in cases if c.prediction == HIGH), n) if n else None
    if metric == "fpr":
        low = [c for c in cases if c.true_label == LOW]
        return (
            Fraction(sum(1 for c in low if c.prediction == HIGH), len(low)) if low else None
        )
    if metric == "fnr":
        high = [c for c in cases if c.true_label == HIGH]
        return (
            Fraction(sum(1 for c in high if c.prediction == LOW), len(high)) if high else None
        )
    if metric == "accuracy":
        return Fraction(sum(1 for c in cases if c.prediction == c.true_label), n) if n else None
    raise InvalidChoiceError("metric", metric, GROUP_VIEW_METRICS)


_METRIC_PHRASES = {
    "positive_rate": "rate of high-risk classification",
    "fpr": "false positive rate",
    "fnr": "false negative rate",
    "accuracy": "accuracy",
}


def group_view_summary(
    dataset: Dataset, attributes: str | Sequence[str], metric: str
) -> GroupViewSummary:
    """Metric per subgroup for one attribute or the cross of two.

    Rows follow schema value order (row-major for a cross).  The description
    is deterministic text naming the extreme subgroups and their gap.
    """
    if isinstance(attributes, str):
        attrs: tuple[str, ...] = (attributes,)
    else:
        attrs = tuple(attributes)
    if not 1 <= len(attrs) <= 2:
        raise InvalidChoiceError("attributes", attrs, ("one attribute", "two attributes"))
    if len(set(attrs)) != len(attrs):
        raise InvalidChoiceError("attributes", attrs, ("two distinct attributes",))
    for a in attrs:
        _require_attribute(dataset, a)
    if metric not in GROUP_VIEW_METRICS:
        raise InvalidChoiceError("metric", metric, GROUP_VIEW_METRICS)
    _require_predictions(dataset)
    if metric in ("fpr", "fnr", "accuracy") and not _labels_available(dataset):
        raise MissingLabelsError(f"{metric} needs a true label on every case")

    value_lists = [dataset.schema.feature(a).values for a in attrs]
    combos: list[tuple[str, ...]] = []
    if len(attrs) == 1:
        combos = [(v,) for v in value_lists[0]]
    else:
        combos = [(v0, v1) for v0 in value_lists[0] for v1 in value_lists[1]]

    rows = []
    for combo in combos:
        members = [
            c
            for c in dataset.cases
            if all(c.values[a] == v for a, v in zip(attrs, combo))
        ]
        rows.append(GroupViewRow(subgroup=combo, n=len(members), value=_metric_value(members, metric)))

    defined = [r for r in rows if r.value is not None]
    phrase = _METRIC_PHRASES[metric]
    label = " x ".join(attrs)
    if not defined:
        description = f"No populated subgroup of {label} has a defined {phrase}."
    else:
        hi = max(defined, key=lambda r: (r.value, r.subgroup))
        lo = min(defined, key=lambda r: (r.value, r.subgroup))
        gap = hi.value - lo.value

        def name(row: GroupViewRow) -> str:
            return ", ".join(f"{a}={v}" for a, v in zip(attrs, row.subgroup))

        if gap == 0:
            description = (
                f"The {phrase} is identical ({_fraction_text(hi.value)}) across all "
                f"populated subgroups of {label}."
            )
        else:
            description = (
                f"The {phrase} is highest for {name(hi)} ({_fraction_text(hi.value)}) and "
                f"lowest for {name(lo)} ({_fraction_text(lo.value)}), a gap of "
                f"{_fraction_text(gap)}."
            )
    return GroupViewSummary(attributes=attrs, metric=metric, rows=tuple(rows), description=description)


def _fraction_text(x: Fraction) -> str:
    return f"{float(x):.3f}"


def report_to_jsonable(report: FairnessReport) -> dict[str, Any]:
    """Wire form of a fairness report; exact rates rendered as floats."""

    def frac(x: Fraction | None) -> float | None:
        return None if x is None else float(x)

    return {
        "attribute": report.attribute,
        "criterion": report.criterion,
        "epsilon": report.epsilon,
        "max_gap": float(report.max_gap),
        "verdict": report.verdict,
        "subgroups": [
            {
                "value": s.value,
                "n": s.n,
                "n_predicted_high": s.n_predicted_high,
                "n_true_high": s.n_true_high,
                "n_true_low": s.n_true_low,
                "positive_rate": frac(s.positive_rate),
                "fpr": frac(s.fpr),
                "fnr": frac(s.fnr),
                "accuracy": frac(s.accuracy),
            }
            for s in report.per_subgroup
        ],
    }


def group_view_to_jsonable(summary: GroupViewSummary) -> dict[str, Any]:
    return {
        "attributes": list(summary.attributes),
        "metric": summary.metric,
        "description": summary.description,
        "rows": [
            {
                "subgroup": list(r.subgroup),
                "n": r.n,
                "value": None if r.value is None else float(r.value),
            }
            for r in summary.rows
        ],
    }
