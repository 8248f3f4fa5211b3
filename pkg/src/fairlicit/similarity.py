"""Weighted case similarity.

Cases embed into a numeric space: each ordinal feature contributes one
coordinate (its level, normalized to [0, 1]) and each categorical feature a
one-hot block scaled by 1/sqrt(2) so any two distinct values sit at unit
distance.  The distance between two cases is sqrt(sum_i w_i * (q_i - p_i)^2)
with one adjustable weight per feature; weights express how much each feature
matters when deciding which cases count as alike.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .data import Case, Dataset, FeatureSchema, ORDINAL, validate_schema
from .errors import (
    InvalidChoiceError,
    InvalidWeightsError,
    MissingPredictionsError,
    SchemaMismatchError,
    UnknownAttributeError,
    UnknownCaseError,
)

INV_SQRT2 = 1.0 / math.sqrt(2.0)


class CaseEncoder(BaseEstimator, TransformerMixin):
    """Encode cases as dense vectors.

    Parameters
    ----------
    exclude : tuple of str
        Feature names to leave out entirely; their coordinate blocks are
        absent from the output, not zeroed.
    """

    def __init__(self, exclude: tuple[str, ...] = ()):
        self.exclude = tuple(exclude)

    def fit(self, X: FeatureSchema | Dataset, y: Any = None) -> "CaseEncoder":
        schema = X.schema if isinstance(X, Dataset) else X
        validate_schema(schema)
        for name in self.exclude:
            if not schema.has_feature(name):
                raise UnknownAttributeError(name)
        self.schema_ = schema
        self.coordinate_labels_: list[str] = []
        self.blocks_: list[tuple[str, slice]] = []
        start = 0
        for f in schema.features:
            if f.name in self.exclude:
                continue
            if f.kind == ORDINAL:
                width = 1
                self.coordinate_labels_.append(f.name)
            else:
                width = len(f.values)
                self.coordinate_labels_.extend(f"{f.name}={v}" for v in f.values)
            self.blocks_.append((f.name, slice(start, start + width)))
            start += width
        self.n_features_out_ = start
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "schema_"):
            raise SchemaMismatchError("encoder is not fitted")

    def encode(self, case: Case) -> np.ndarray:
        self._check_fitted()
        row = np.zeros(self.n_features_out_)
        for f in self.schema_.features:
            if f.name in self.exclude:
                continue
            value = case.values.get(f.name)
            if value not in f.values:
                raise SchemaMismatchError(
                    f"case {case.id!r} does not conform to the fitted schema "
                    f"(feature {f.name!r}, value {value!r})"
                )
        for (name, block) in self.blocks_:
            f = self.schema_.feature(name)
            value = case.values[name]
            if f.kind == ORDINAL:
                row[block.start] = _ordinal_position(f, value)
            else:
                row[block.start + f.values.index(value)] = INV_SQRT2
        return row

    def transform(self, X: Iterable[Case]) -> np.ndarray:
        self._check_fitted()
        cases = list(X)
        out = np.zeros((len(cases), self.n_features_out_))
        for i, case in enumerate(cases):
            out[i] = self.encode(case)
        return out


def _ordinal_position(feature, value: str) -> float:
    levels = feature.levels
    lo, hi = levels[0], levels[-1]
    return (levels[feature.values.index(value)] - lo) / (hi - lo)


@dataclass(frozen=True)
class EncodedCase:
    case_id: str
    coordinates: tuple[float, ...]
    labels: tuple[str, ...]


def encode_case(schema: FeatureSchema, case: Case) -> EncodedCase:
    encoder = CaseEncoder().fit(schema)
    row = encoder.encode(case)
    return EncodedCase(
        case_id=case.id,
        coordinates=tuple(float(x) for x in row),
        labels=tuple(encoder.coordinate_labels_),
    )


@dataclass(frozen=True)
class WeightVector:
    """One non-negative weight per schema feature, in schema order."""

    weights: tuple[float, ...]

    @classmethod
    def default(cls, schema: FeatureSchema) -> "WeightVector":
        return cls(weights=tuple(1.0 for _ in schema.features))

    @classmethod
    def coerce(cls, schema: FeatureSchema, w: "WeightVector | Sequence[float] | None") -> "WeightVector":
        if w is None:
            return cls.default(schema)
        vec = w if isinstance(w, WeightVector) else cls(weights=tuple(float(x) for x in w))
        vec.validate(schema)
        return vec

    def validate(self, schema: FeatureSchema) -> None:
        if len(self.weights) != len(schema.features):
            raise InvalidWeightsError(
                f"expected {len(schema.features)} weights, got {len(self.weights)}"
            )
        for x in self.weights:
            if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
                raise InvalidWeightsError(f"weights must be finite numbers, got {x!r}")
            if x < 0:
                raise InvalidWeightsError(f"weights must be non-negative, got {x!r}")


def _feature_table(schema: FeatureSchema) -> list[tuple[str, bool, dict[str, float] | None]]:
    """Per feature: (name, is_ordinal, value -> normalized position)."""
    table = []
    for f in schema.features:
        if f.kind == ORDINAL:
            positions = {v: _ordinal_position(f, v) for v in f.values}
            table.append((f.name, True, positions))
        else:
            table.append((f.name, False, None))
    return table


def _sq_distance(table, weights: tuple[float, ...], a_values, b_values) -> float:
    sq = 0.0
    for (name, is_ordinal, positions), w in zip(table, weights):
        va = a_values[name]
        vb = b_values[name]
        if is_ordinal:
            d = positions[va] - positions[vb]
            sq += w * (d * d)
        elif va != vb:
            sq += w
    return sq


def _check_conforms(schema: FeatureSchema, case: Case) -> None:
    for f in schema.features:
        if case.values.get(f.name) not in f.values:
            raise SchemaMismatchError(
                f"case {case.id!r} does not conform to the schema "
                f"(feature {f.name!r}, value {case.values.get(f.name)!r})"
            )


def weighted_distance(
    schema: FeatureSchema,
    a: Case,
    b: Case,
    weights: WeightVector | Sequence[float] | None = None,
) -> float:
    """Distance between two cases under per-feature weights.

    Categorical disagreement on feature f contributes exactly w_f to the
    squared distance; ordinal disagreement contributes w_f times the squared
    normalized level gap.
    """
    vec = WeightVector.coerce(schema, weights)
    _check_conforms(schema, a)
    _check_conforms(schema, b)
    table = _feature_table(schema)
    return math.sqrt(_sq_distance(table, vec.weights, a.values, b.values))


@dataclass(frozen=True)
class RankedCase:
    case_id: str
    distance: float
    prediction: str | None


@dataclass(frozen=True)
class SimilarityRanking:
    reference_id: str
    weights: tuple[float, ...]
    entries: tuple[RankedCase, ...]


def rank_by_similarity(
    dataset: Dataset,
    reference_id: str,
    weights: WeightVector | Sequence[float] | None = None,
) -> SimilarityRanking:
    """All other cases ordered by ascending distance to the reference.

    Ties break by ascending case id (string order), so the ranking is a
    deterministic function of (dataset, reference, weights).
    """
    vec = WeightVector.coerce(dataset.schema, weights)
    reference = dataset.case(reference_id)
    if reference is None:
        raise UnknownCaseError(reference_id)
    table = _feature_table(dataset.schema)
    for case in dataset.cases:
        _check_conforms(dataset.schema, case)

    entries = []
    for case in dataset.cases:
        if case.id == reference_id:
            continue
        d = math.sqrt(_sq_distance(table, vec.weights, reference.values, case.values))
        entries.append(RankedCase(case_id=case.id, distance=d, prediction=case.prediction))
    entries.sort(key=lambda e: (e.distance, e.case_id))
    return SimilarityRanking(
        reference_id=reference_id, weights=vec.weights, entries=tuple(entries)
    )


@dataclass(frozen=True)
class DiscordantPair:
    case_a: str
    case_b: str
    distance: float
    prediction_a: str
    prediction_b: str


def nearest_discordant_pairs(
    dataset: Dataset,
    weights: WeightVector | Sequence[float] | None = None,
    k: int = 10,
) -> tuple[DiscordantPair, ...]:
    """The k closest pairs of cases that received different predictions.

    Requires a prediction on every case.  Pairs are reported with ids in
    ascending order and sorted by (distance, case_a, case_b); fewer than k
    pairs are returned when the dataset has fewer discordant pairs.
    """
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise InvalidChoiceError("k", k, ("an integer >= 1",))
    vec = WeightVector.coerce(dataset.schema, weights)
    for case in dataset.cases:
        if case.prediction is None:
            raise MissingPredictionsError(f"case {case.id!r} has no prediction")
        _check_conforms(dataset.schema, case)

    table = _feature_table(dataset.schema)
    cases = dataset.cases

    def candidates():
        for i in range(len(cases)):
            for j in range(i + 1, len(cases)):
                a, b = cases[i], cases[j]
                if a.prediction == b.prediction:
                    continue
                if a.id > b.id:
                    a, b = b, a
                d = math.sqrt(_sq_distance(table, vec.weights, a.values, b.values))
                yield DiscordantPair(
                    case_a=a.id,
                    case_b=b.id,
                    distance=d,
                    prediction_a=a.prediction,
                    prediction_b=b.prediction,
                )

    best = heapq.nsmallest(k, candidates(), key=lambda p: (p.distance, p.case_a, p.case_b))
    return tuple(best)


def format_distance(d: float) -> str:
    """Decimal text with 12 significant digits, the wire form of a distance."""
    return format(d, ".12g")


def ranking_to_jsonable(ranking: SimilarityRanking) -> dict[str, Any]:
    return {
        "reference": ranking.reference_id,
        "weights": list(ranking.weights),
        "entries": [
            {
                "id": e.case_id,
                "distance": format_distance(e.distance),
                "prediction": e.prediction,
            }
            for e in ranking.entries
        ],
    }


def pairs_to_jsonable(pairs: Iterable[DiscordantPair]) -> dict[str, Any]:
    return {
        "pairs": [
            {
                "a": p.case_a,
                "b": p.case_b,
                "distance": format_distance(p.distance),
                "prediction_a": p.prediction_a,
                "prediction_b": p.prediction_b,
            }
            for p in pairs
        ]
    }
