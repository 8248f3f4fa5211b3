"""Capture real service response bodies for the frontend's mock API.

The frontend snapshot tests run against a fetch mock that must serve exactly
what the HTTP service serves.  This script drives the real app in-process and
freezes the bodies into frontend/tests/fixtures/bodies.json, keyed by
"METHOD /path?query" using the same literal query construction as the
TypeScript client (identifier/number values, commas unencoded).

Rerun after any change to the audited fixtures or the endpoint bodies:

    python3 scripts/build_frontend_fixtures.py
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from fairlicit.bundled import AUDIT_EXAMPLES, load_audit_example, load_default_dataset
from fairlicit.data import dataset_to_jsonable
from fairlicit.serialize import canonical_json
from fairlicit.service import Store, create_app

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures" / "bodies.json"

N_FEATURES = 12
UNIFORM = ",".join(["1"] * N_FEATURES)
BOOSTED = ",".join(["5"] + ["1"] * (N_FEATURES - 1))
ZERO = ",".join(["0"] * N_FEATURES)
DOUBLED = ",".join(["2"] * N_FEATURES)

REQUESTS = [
    # the landing query the navigation shell issues for the default dataset
    "GET /datasets/default/metrics?attribute=victim_age&metric=positive_rate&epsilon=0.05",
    # group view: the two audited examples, the balanced control, an epsilon
    # override, a single-populated-subgroup attribute, and a crossed view
    "GET /datasets/parity_gap_dataset/metrics?attribute=victim_age&metric=positive_rate&epsilon=0.05",
    "GET /datasets/parity_gap_dataset/metrics?attribute=victim_age&metric=positive_rate&epsilon=0.5",
    "GET /datasets/parity_gap_dataset/metrics?attribute=victim_gender&metric=positive_rate&epsilon=0.05",
    "GET /datasets/parity_balanced_dataset/metrics?attribute=victim_age&metric=positive_rate&epsilon=0.05",
    "GET /datasets/odds_gap_dataset/metrics?attribute=victim_age&metric=positive_rate&epsilon=0.05",
    "GET /datasets/odds_balanced_dataset/metrics?attribute=victim_age&metric=positive_rate&epsilon=0.05",
    "GET /datasets/odds_gap_dataset/metrics?attribute=victim_age&metric=fpr&epsilon=0.05",
    "GET /datasets/odds_gap_dataset/metrics?attribute=victim_age&metric=fnr&epsilon=0.05",
    "GET /datasets/odds_balanced_dataset/metrics?attribute=victim_age&metric=fpr&epsilon=0.05",
    "GET /datasets/odds_gap_dataset/metrics?attribute=victim_age&attribute2=victim_gender&metric=positive_rate&epsilon=0.05",
    # similarity view: uniform, one boosted slider, all-zero, all-doubled
    f"GET /datasets/default/similarity?reference=F01A&weights={UNIFORM}",
    f"GET /datasets/default/similarity?reference=F01A&weights={BOOSTED}",
    f"GET /datasets/default/similarity?reference=F01A&weights={ZERO}",
    f"GET /datasets/default/similarity?reference=F01A&weights={DOUBLED}",
]


def main() -> None:
    root = tempfile.mkdtemp()
    store = Store(root)
    store.write(
        "datasets", "default", json.loads(canonical_json(dataset_to_jsonable(load_default_dataset())))
    )
    for name in AUDIT_EXAMPLES:
        store.write(
            "datasets", name, json.loads(canonical_json(dataset_to_jsonable(load_audit_example(name))))
        )
    client = TestClient(create_app(root))

    bodies: dict[str, object] = {}
    for key in REQUESTS:
        method, url = key.split(" ", 1)
        assert method == "GET"
        response = client.get(url)
        assert response.status_code == 200, (key, response.status_code, response.text)
        bodies[key] = response.json()

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(canonical_json(bodies))
    print(f"wrote {len(bodies)} captured bodies to {OUT}")


if __name__ == "__main__":
    main()
