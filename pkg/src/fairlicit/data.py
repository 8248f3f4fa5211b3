"""Tabular case schemas, datasets, and the synthetic generator.

A dataset is a feature schema plus a list of cases.  Features are either
categorical (unordered value set) or ordinal (value set with numeric levels).
Cases optionally carry a ground-truth label, a model score in [0, 1], and a
hard prediction derived from the score by thresholding.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .errors import (
    BadMarginalsError,
    CellValueError,
    DuplicateIdError,
    SchemaError,
)
from .serialize import canonical_json

HIGH = "high"
LOW = "low"
LABELS = (HIGH, LOW)

CATEGORICAL = "categorical"
ORDINAL = "ordinal"

PROVENANCES = ("synthetic", "imported")

RESERVED_COLUMNS = ("id", "true_label", "score", "prediction")


@dataclass(frozen=True)
class FeatureDef:
    """One feature: a name, a kind, and its closed value set.

    Ordinal features carry one numeric level per value, strictly increasing
    in value order; categorical features have no levels.
    """

    name: str
    kind: str
    values: tuple[str, ...]
    levels: tuple[float, ...] | None = None
    description: str = ""


@dataclass(frozen=True)
class FeatureSchema:
    features: tuple[FeatureDef, ...]
    sensitive_attributes: tuple[str, ...] = ()

    def feature(self, name: str) -> FeatureDef:
        for f in self.features:
            if f.name == name:
                return f
        raise SchemaError(f"no such feature: {name!r}")

    def feature_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def has_feature(self, name: str) -> bool:
        return any(f.name == name for f in self.features)


@dataclass
class Case:
    id: str
    values: dict[str, str]
    true_label: str | None = None
    score: float | None = None
    prediction: str | None = None


@dataclass
class Dataset:
    schema: FeatureSchema
    cases: list[Case] = field(default_factory=list)
    threshold: float = 0.5
    provenance: str = "imported"

    def case(self, case_id: str) -> Case | None:
        for c in self.cases:
            if c.id == case_id:
                return c
        return None


def binarize(score: float, threshold: float) -> str:
    """Map a score to a hard label; the threshold itself classifies high."""
    return HIGH if score >= threshold else LOW


def validate_schema(schema: FeatureSchema) -> None:
    """Check structural schema invariants; raise :class:`SchemaError` if broken."""
    if not schema.features:
        raise SchemaError("schema has no features")
    seen: set[str] = set()
    for f in schema.features:
        if not f.name or not isinstance(f.name, str):
            raise SchemaError("feature names must be non-empty strings")
        if f.name in RESERVED_COLUMNS:
            raise SchemaError(f"feature name {f.name!r} collides with a reserved column")
        if f.name in seen:
            raise SchemaError(f"duplicate feature name: {f.name!r}")
        seen.add(f.name)
        if f.kind not in (CATEGORICAL, ORDINAL):
            raise SchemaError(f"feature {f.name!r} has unknown kind {f.kind!r}")
        if len(f.values) < 2:
            raise SchemaError(f"feature {f.name!r} needs at least two values")
        if len(set(f.values)) != len(f.values):
            raise SchemaError(f"feature {f.name!r} has duplicate values")
        if any(not v or not isinstance(v, str) for v in f.values):
            raise SchemaError(f"feature {f.name!r} has empty or non-string values")
        if f.kind == ORDINAL:
            if f.levels is None or len(f.levels) != len(f.values):
                raise SchemaError(f"ordinal feature {f.name!r} needs one level per value")
            lv = list(f.levels)
            if any(not np.isfinite(x) for x in lv):
                raise SchemaError(f"ordinal feature {f.name!r} has non-finite levels")
            if any(b <= a for a, b in zip(lv, lv[1:])):
                raise SchemaError(f"ordinal feature {f.name!r} levels must strictly increase")
        elif f.levels is not None:
            raise SchemaError(f"categorical feature {f.name!r} must not carry levels")
    for attr in schema.sensitive_attributes:
        if attr not in seen:
            raise SchemaError(f"sensitive attribute {attr!r} is not a schema feature")
    if len(set(schema.sensitive_attributes)) != len(schema.sensitive_attributes):
        raise SchemaError("duplicate sensitive attribute")


def schema_to_jsonable(schema: FeatureSchema) -> dict[str, Any]:
    features = []
    for f in schema.features:
        entry: dict[str, Any] = {
            "name": f.name,
            "kind": f.kind,
            "values": list(f.values),
        }
        if f.levels is not None:
            entry["levels"] = list(f.levels)
        if f.description:
            entry["description"] = f.description
        features.append(entry)
    return {
        "features": features,
        "sensitive_attributes": list(schema.sensitive_attributes),
    }


def schema_from_jsonable(obj: Any) -> FeatureSchema:
    if not isinstance(obj, dict):
        raise SchemaError("schema must be a JSON object")
    raw_features = obj.get("features")
    if not isinstance(raw_features, list):
        raise SchemaError("schema needs a 'features' list")
    features = []
    for raw in raw_features:
        if not isinstance(raw, dict):
            raise SchemaError("each feature must be a JSON object")
        name = raw.get("name")
        kind = raw.get("kind")
        values = raw.get("values")
        if not isinstance(name, str) or not isinstance(kind, str):
            raise SchemaError("feature 'name' and 'kind' must be strings")
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise SchemaError(f"feature {name!r}: 'values' must be a list of strings")
        levels = raw.get("levels")
        if levels is not None:
            if not isinstance(levels, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in levels
            ):
                raise SchemaError(f"feature {name!r}: 'levels' must be a list of numbers")
            levels = tuple(float(x) for x in levels)
        features.append(
            FeatureDef(
                name=name,
                kind=kind,
                values=tuple(values),
                levels=levels,
                description=str(raw.get("description", "")),
            )
        )
    sensitive = obj.get("sensitive_attributes", [])
    if not isinstance(sensitive, list) or not all(isinstance(a, str) for a in sensitive):
        raise SchemaError("'sensitive_attributes' must be a list of strings")
    schema = FeatureSchema(features=tuple(features), sensitive_attributes=tuple(sensitive))
    validate_schema(schema)
    return schema


def load_schema(path: str | Path) -> FeatureSchema:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"schema file is not valid JSON: {exc}") from exc
    return schema_from_jsonable(obj)


def save_schema(schema: FeatureSchema, path: str | Path) -> None:
    Path(path).write_text(canonical_json(schema_to_jsonable(schema)), encoding="utf-8")


def _validate_case(case: Case, schema: FeatureSchema, threshold: float, row: int | None = None) -> None:
    if not case.id or not isinstance(case.id, str):
        raise CellValueError("case id must be a non-empty string", row=row, column="id")
    expected = set(schema.feature_names())
    got = set(case.values)
    if got != expected:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        parts = []
        if missing:
            parts.append(f"missing {missing}")
        if extra:
            parts.append(f"unexpected {extra}")
        raise CellValueError(
            f"case {case.id!r} values do not match schema ({'; '.join(parts)})",
            row=row,
            column=(missing + extra)[0] if (missing or extra) else None,
        )
    for f in schema.features:
        v = case.values[f.name]
        if v not in f.values:
            raise CellValueError(
                f"case {case.id!r}: {v!r} is not a value of feature {f.name!r}",
                row=row,
                column=f.name,
            )
    for col, label in (("true_label", case.true_label), ("prediction", case.prediction)):
        if label is not None and label not in LABELS:
            raise CellValueError(
                f"case {case.id!r}: {col} must be one of {LABELS}, got {label!r}",
                row=row,
                column=col,
            )
    if case.score is not None:
        s = case.score
        if not isinstance(s, (int, float)) or isinstance(s, bool) or not np.isfinite(s):
            raise CellValueError(
                f"case {case.id!r}: score must be a finite number", row=row, column="score"
            )
        if not 0.0 <= s <= 1.0:
            raise CellValueError(
                f"case {case.id!r}: score {s} outside [0, 1]", row=row, column="score"
            )
        if case.prediction is not None and case.prediction != binarize(s, threshold):
            raise CellValueError(
                f"case {case.id!r}: prediction {case.prediction!r} disagrees with "
                f"binarize(score={s}, threshold={threshold})",
                row=row,
                column="prediction",
            )


def validate_dataset(dataset: Dataset) -> None:
    """Check all dataset invariants; raise a typed error on the first break."""
    validate_schema(dataset.schema)
    t = dataset.threshold
    if not isinstance(t, (int, float)) or isinstance(t, bool) or not (0.0 < t < 1.0):
        raise SchemaError(f"threshold must lie strictly inside (0, 1), got {t!r}")
    if dataset.provenance not in PROVENANCES:
        raise SchemaError(f"provenance must be one of {PROVENANCES}, got {dataset.provenance!r}")
    seen: set[str] = set()
    for case in dataset.cases:
        _validate_case(case, dataset.schema, t)
        if case.id in seen:
            raise DuplicateIdError(case.id)
        seen.add(case.id)


def case_to_jsonable(case: Case) -> dict[str, Any]:
    return {
        "id": case.id,
        "values": dict(case.values),
        "true_label": case.true_label,
        "score": case.score,
        "prediction": case.prediction,
    }


def case_from_jsonable(obj: Any) -> Case:
    if not isinstance(obj, dict) or not isinstance(obj.get("values"), dict):
        raise CellValueError("case must be an object with a 'values' mapping")
    score = obj.get("score")
    if score is not None:
        if not isinstance(score, (int, float)) or isinstance(score, bool):
            raise CellValueError("case score must be a number or null", column="score")
        score = float(score)
    return Case(
        id=str(obj.get("id", "")),
        values={str(k): str(v) for k, v in obj["values"].items()},
        true_label=obj.get("true_label"),
        score=score,
        prediction=obj.get("prediction"),
    )


def dataset_to_jsonable(dataset: Dataset) -> dict[str, Any]:
    return {
        "schema": schema_to_jsonable(dataset.schema),
        "threshold": dataset.threshold,
        "provenance": dataset.provenance,
        "cases": [case_to_jsonable(c) for c in dataset.cases],
    }


def dataset_from_jsonable(obj: Any) -> Dataset:
    if not isinstance(obj, dict):
        raise SchemaError("dataset must be a JSON object")
    schema = schema_from_jsonable(obj.get("schema"))
    raw_cases = obj.get("cases")
    if not isinstance(raw_cases, list):
        raise SchemaError("dataset needs a 'cases' list")
    threshold = obj.get("threshold", 0.5)
    if not isinstance(threshold, (int, float)) or isinstance(threshold, bool):
        raise SchemaError("dataset 'threshold' must be a number")
    dataset = Dataset(
        schema=schema,
        cases=[case_from_jsonable(c) for c in raw_cases],
        threshold=float(threshold),
        provenance=str(obj.get("provenance", "imported")),
    )
    validate_dataset(dataset)
    return dataset


def load_dataset_json(path: str | Path) -> Dataset:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"dataset file is not valid JSON: {exc}") from exc
    return dataset_from_jsonable(obj)


def save_dataset_json(dataset: Dataset, path: str | Path) -> None:
    Path(path).write_text(canonical_json(dataset_to_jsonable(dataset)), encoding="utf-8")


def save_dataset_csv(dataset: Dataset, path: str | Path) -> None:
    """Write cases as UTF-8 CSV: id, features in schema order, then outcomes.

    Floats are written with ``repr`` so a reload reproduces them exactly.
    """
    names = dataset.schema.feature_names()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", *names, "true_label", "score", "prediction"])
        for c in dataset.cases:
            writer.writerow(
                [
                    c.id,
                    *(c.values[n] for n in names),
                    c.true_label or "",
                    "" if c.score is None else repr(c.score),
                    c.prediction or "",
                ]
            )


def load_dataset(
    schema_file: str | Path,
    data_file: str | Path,
    threshold: float = 0.5,
    provenance: str = "imported",
) -> Dataset:
    """Load a dataset from a schema JSON file and a CSV of cases.

    The CSV must carry one column per schema feature; ``id``, ``true_label``,
    ``score`` and ``prediction`` columns are optional.  Missing ids are
    assigned sequentially as decimal text.  The first nonconforming cell
    raises :class:`CellValueError` carrying its row index and column name.
    """
    schema = load_schema(schema_file)
    with open(data_file, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("data file has no header row") from None
        rows = list(reader)

    feature_names = set(schema.feature_names())
    if len(set(header)) != len(header):
        raise SchemaError("data file has duplicate columns")
    for col in header:
        if col not in feature_names and col not in RESERVED_COLUMNS:
            raise SchemaError(f"data file has unknown column {col!r}")
    missing_cols = feature_names - set(header)
    if missing_cols:
        raise SchemaError(f"data file is missing feature columns {sorted(missing_cols)}")
    index = {col: i for i, col in enumerate(header)}

    cases: list[Case] = []
    seen: set[str] = set()
    for row_idx, row in enumerate(rows):
        if len(row) != len(header):
            raise CellValueError(
                f"row {row_idx} has {len(row)} fields, expected {len(header)}", row=row_idx
            )

        def cell(col: str) -> str:
            return row[index[col]]

        case_id = cell("id") if "id" in index else str(row_idx)
        if not case_id:
            raise CellValueError(f"row {row_idx} has an empty id", row=row_idx, column="id")
        if case_id in seen:
            raise DuplicateIdError(case_id)
        seen.add(case_id)

        values = {name: cell(name) for name in schema.feature_names()}

        def optional_label(col: str) -> str | None:
            if col not in index:
                return None
            text = cell(col)
            return text if text else None

        score: float | None = None
        if "score" in index and cell("score"):
            try:
                score = float(cell("score"))
            except ValueError:
                raise CellValueError(
                    f"row {row_idx}: score {cell('score')!r} is not a number",
                    row=row_idx,
                    column="score",
                ) from None

        case = Case(
            id=case_id,
            values=values,
            true_label=optional_label("true_label"),
            score=score,
            prediction=optional_label("prediction"),
        )
        _validate_case(case, schema, threshold, row=row_idx)
        cases.append(case)

    dataset = Dataset(schema=schema, cases=cases, threshold=threshold, provenance=provenance)
    validate_dataset(dataset)
    return dataset


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return np.exp(-np.logaddexp(0.0, -x))


def _validate_marginals(
    schema: FeatureSchema, marginals: Mapping[str, Mapping[str, float]]
) -> None:
    for name, probs in marginals.items():
        if not schema.has_feature(name):
            raise BadMarginalsError(name, "not a schema feature")
        feature = schema.feature(name)
        if set(probs) != set(feature.values):
            raise BadMarginalsError(name, "keys must be exactly the feature's values")
        vals = [probs[v] for v in feature.values]
        if any(p < 0 for p in vals):
            raise BadMarginalsError(name, "probabilities must be non-negative")
        total = float(sum(vals))
        if abs(total - 1.0) > 1e-9:
            raise BadMarginalsError(name, f"probabilities sum to {total!r}, not 1")


def generate_synthetic(
    schema: FeatureSchema,
    n: int,
    seed: int,
    marginals: Mapping[str, Mapping[str, float]] | None = None,
    threshold: float = 0.5,
    signal_scale: float = 2.0,
    noise_scale: float = 0.5,
) -> Dataset:
    """Generate a fully labeled synthetic dataset.

    Feature values are sampled independently per feature from the requested
    marginals (uniform when omitted).  A hidden linear function over the
    feature values drives both outcomes: the ground truth binarizes a noisy
    propensity sigma(z + e1), while the stored score is the separately
    perturbed model score sigma(z + e2) and the prediction is its
    thresholding.  The two noise draws make both false positives and false
    negatives occur at reasonable sizes.

    Parameters
    ----------
    schema : FeatureSchema
        Feature definitions to sample under.
    n : int
        Number of cases.
    seed : int
        Seed for the single RNG stream; equal seeds give byte-identical
        datasets.
    marginals : mapping, optional
        Per-feature value probabilities; features left out are uniform.
    threshold : float
        Score threshold separating ``high`` from ``low``.
    signal_scale, noise_scale : float
        Spread of the hidden coefficients and of the per-case noise.

    Returns
    -------
    Dataset
        Validated dataset with ``provenance="synthetic"``.
    """
    validate_schema(schema)
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise CellValueError(f"n must be a non-negative integer, got {n!r}", column="n")
    if marginals:
        _validate_marginals(schema, marginals)

    rng = np.random.default_rng(seed)
    coef = {
        f.name: rng.normal(0.0, signal_scale, size=len(f.values)) for f in schema.features
    }

    value_indices: dict[str, np.ndarray] = {}
    for f in schema.features:
        if marginals and f.name in marginals:
            p = np.asarray([marginals[f.name][v] for v in f.values], dtype=float)
            p = p / p.sum()
        else:
            p = np.full(len(f.values), 1.0 / len(f.values))
        value_indices[f.name] = rng.choice(len(f.values), size=n, p=p)

    z = np.zeros(n)
    for f in schema.features:
        z += coef[f.name][value_indices[f.name]]
    if schema.features:
        z /= len(schema.features)

    e1 = rng.normal(0.0, noise_scale, size=n)
    e2 = rng.normal(0.0, noise_scale, size=n)
    propensity = _sigmoid(z + e1)
    score = _sigmoid(z + e2)

    cases = []
    for i in range(n):
        s = float(score[i])
        cases.append(
            Case(
                id=str(i),
                values={
                    f.name: f.values[int(value_indices[f.name][i])] for f in schema.features
                },
                true_label=binarize(float(propensity[i]), threshold),
                score=s,
                prediction=binarize(s, threshold),
            )
        )

    dataset = Dataset(schema=schema, cases=cases, threshold=threshold, provenance="synthetic")
    validate_dataset(dataset)
    return dataset
