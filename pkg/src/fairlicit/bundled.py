"""Accessors for the data files shipped inside the package.

The bundle contains the default feature schema, the default mixed dataset
(vignette cases plus synthetic fill), four small audit example datasets, the
fourteen comparison vignette pairs, and twelve pre-recorded session logs used
as the cohort replay fixture.  Everything here is synthetic.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

from .data import Dataset, FeatureSchema, case_from_jsonable, dataset_from_jsonable, schema_from_jsonable
from .elicitation import FixturePair

AUDIT_EXAMPLES = (
    "parity_gap_dataset",
    "parity_balanced_dataset",
    "odds_gap_dataset",
    "odds_balanced_dataset",
)


def fixtures_root() -> Path:
    return Path(str(resources.files("fairlicit") / "fixtures"))


def _read_json(relative: str) -> Any:
    return json.loads((resources.files("fairlicit") / "fixtures" / relative).read_text("utf-8"))


def load_default_schema() -> FeatureSchema:
    return schema_from_jsonable(_read_json("default_schema.json"))


def load_default_dataset() -> Dataset:
    return dataset_from_jsonable(_read_json("default_dataset.json"))


def load_audit_example(name: str) -> Dataset:
    if name not in AUDIT_EXAMPLES:
        raise KeyError(f"unknown audit example {name!r} (have {AUDIT_EXAMPLES})")
    return dataset_from_jsonable(_read_json(f"{name}.json"))


def load_fixture_pairs() -> list[FixturePair]:
    raw = _read_json("fixture_pairs.json")
    return [
        FixturePair(
            index=entry["index"],
            case_a=case_from_jsonable(entry["case_a"]),
            case_b=case_from_jsonable(entry["case_b"]),
            differing=tuple(entry["differing"]),
        )
        for entry in raw["pairs"]
    ]


def replay_sessions_dir() -> Path:
    return fixtures_root() / "replay_sessions"


def load_replay_session_logs() -> list[dict[str, Any]]:
    directory = replay_sessions_dir()
    return [
        json.loads(path.read_text("utf-8")) for path in sorted(directory.glob("*.json"))
    ]
