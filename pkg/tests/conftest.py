from __future__ import annotations

from typing import Any

import pytest

from fairlicit.bundled import (
    load_audit_example,
    load_default_dataset,
    load_default_schema,
    load_fixture_pairs,
    load_replay_session_logs,
)
from fairlicit.data import Case, Dataset, FeatureDef, FeatureSchema, validate_dataset


@pytest.fixture(scope="session")
def default_schema() -> FeatureSchema:
    return load_default_schema()


@pytest.fixture()
def default_dataset() -> Dataset:
    return load_default_dataset()


@pytest.fixture()
def parity_gap_dataset() -> Dataset:
    return load_audit_example("parity_gap_dataset")


@pytest.fixture()
def parity_balanced_dataset() -> Dataset:
    return load_audit_example("parity_balanced_dataset")


@pytest.fixture()
def odds_gap_dataset() -> Dataset:
    return load_audit_example("odds_gap_dataset")


@pytest.fixture()
def odds_balanced_dataset() -> Dataset:
    return load_audit_example("odds_balanced_dataset")


@pytest.fixture()
def fixture_pairs():
    return load_fixture_pairs()


@pytest.fixture()
def replay_logs() -> list[dict[str, Any]]:
    return load_replay_session_logs()


@pytest.fixture(scope="session")
def tiny_schema() -> FeatureSchema:
    """Three features small enough to hand-compute every metric."""
    return FeatureSchema(
        features=(
            FeatureDef(name="age_band", kind="ordinal", values=("young", "mid", "old"), levels=(0, 1, 2)),
            FeatureDef(name="color", kind="categorical", values=("red", "blue")),
            FeatureDef(name="size", kind="ordinal", values=("small", "large"), levels=(1, 2)),
        ),
        sensitive_attributes=("age_band", "color"),
    )


def make_case(
    case_id: str,
    values: dict[str, str],
    true_label: str | None = None,
    score: float | None = None,
    prediction: str | None = None,
) -> Case:
    return Case(id=case_id, values=values, true_label=true_label, score=score, prediction=prediction)


def make_dataset(schema: FeatureSchema, cases: list[Case], threshold: float = 0.5) -> Dataset:
    dataset = Dataset(schema=schema, cases=cases, threshold=threshold, provenance="imported")
    validate_dataset(dataset)
    return dataset


@pytest.fixture()
def tiny_cases(tiny_schema: FeatureSchema) -> Dataset:
    """Eight labeled, predicted cases over the tiny schema.

    age_band: 4 young / 3 mid / 1 old; predictions chosen so the young
    positive rate is 3/4 and the mid rate is 1/3.
    """
    rows = [
        ("t1", "young", "red", "small", "high", "high"),
        ("t2", "young", "red", "large", "low", "high"),
        ("t3", "young", "blue", "small", "high", "high"),
        ("t4", "young", "blue", "large", "low", "low"),
        ("t5", "mid", "red", "small", "high", "high"),
        ("t6", "mid", "blue", "large", "high", "low"),
        ("t7", "mid", "red", "large", "low", "low"),
        ("t8", "old", "blue", "small", "low", "low"),
    ]
    cases = [
        make_case(
            cid,
            {"age_band": age, "color": color, "size": size},
            true_label=label,
            score=0.9 if pred == "high" else 0.1,
            prediction=pred,
        )
        for cid, age, color, size, label, pred in rows
    ]
    return make_dataset(tiny_schema, cases)
