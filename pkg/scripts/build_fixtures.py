"""Regenerate the JSON fixtures bundled under src/fairlicit/fixtures/.

Deterministic: running it twice produces identical bytes.  The replay session
logs encode a hand-designed 12-participant cohort whose aggregates hit the
documented acceptance numbers exactly; the tables below are the single source
of truth for that cohort.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from fairlicit.data import (
    Case,
    Dataset,
    FeatureDef,
    FeatureSchema,
    binarize,
    dataset_to_jsonable,
    generate_synthetic,
    schema_to_jsonable,
    validate_dataset,
)
from fairlicit.elicitation import (
    FixturePair,
    GroupFairnessResponse,
    PairwiseQuestion,
    PairwiseResponse,
    ParticipantProfile,
    SequenceClock,
    StagePrompt,
    advance_stage,
    export_session,
    next_question,
    record_exploration,
    record_response,
    start_session,
    validate_fixture_pairs,
)
from fairlicit.data import case_to_jsonable
from fairlicit.serialize import canonical_json

FIXTURES = ROOT / "src" / "fairlicit" / "fixtures"


# --------------------------------------------------------------------------
# Default schema: 12 synthetic screening features, 5 of them sensitive.
# --------------------------------------------------------------------------

def default_schema() -> FeatureSchema:
    return FeatureSchema(
        features=(
            FeatureDef(
                name="victim_age",
                kind="ordinal",
                values=("infant", "toddler", "child", "adolescent"),
                levels=(0.0, 1.0, 2.0, 3.0),
                description="Age band of the child named in the report.",
            ),
            FeatureDef(
                name="victim_gender",
                kind="categorical",
                values=("female", "male", "nonbinary"),
                description="Gender recorded for the child named in the report.",
            ),
            FeatureDef(
                name="family_race",
                kind="categorical",
                values=("white", "black", "hispanic", "asian", "other"),
                description="Race recorded for the family in the report.",
            ),
            FeatureDef(
                name="use_of_public_assistance",
                kind="categorical",
                values=("no", "yes"),
                description="Whether the household currently receives public assistance.",
            ),
            FeatureDef(
                name="perpetrator_gender",
                kind="categorical",
                values=("female", "male"),
                description="Gender recorded for the alleged perpetrator.",
            ),
            FeatureDef(
                name="allegation_type",
                kind="ordinal",
                values=("neglect", "substance_abuse", "physical_abuse", "sexual_abuse"),
                levels=(0.0, 1.0, 2.0, 3.0),
                description="Primary allegation in the report, ordered by typical severity.",
            ),
            FeatureDef(
                name="perpetrator_age",
                kind="ordinal",
                values=("teen", "young_adult", "middle_aged", "senior"),
                levels=(0.0, 1.0, 2.0, 3.0),
                description="Age band of the alleged perpetrator.",
            ),
            FeatureDef(
                name="referral_history",
                kind="ordinal",
                values=("none", "one", "multiple"),
                levels=(0.0, 1.0, 2.0),
                description="Number of prior referrals involving this family.",
            ),
            FeatureDef(
                name="reporter_type",
                kind="categorical",
                values=(
                    "teacher",
                    "family_member",
                    "neighbor",
                    "medical_professional",
                    "law_enforcement",
                ),
                description="Relationship of the person who filed the report.",
            ),
            FeatureDef(
                name="perpetrator_relationship_to_victim",
                kind="categorical",
                values=("parent", "other_relative", "unrelated"),
                description="How the alleged perpetrator is related to the child.",
            ),
            FeatureDef(
                name="number_of_parents",
                kind="ordinal",
                values=("one", "two"),
                levels=(1.0, 2.0),
                description="Number of parents in the household.",
            ),
            FeatureDef(
                name="region_wealth",
                kind="ordinal",
                values=("low", "medium", "high"),
                levels=(0.0, 1.0, 2.0),
                description="Wealth band of the family's home region.",
            ),
        ),
        sensitive_attributes=(
            "victim_age",
            "victim_gender",
            "family_race",
            "use_of_public_assistance",
            "perpetrator_gender",
        ),
    )


# --------------------------------------------------------------------------
# Audit example datasets: two parity examples and two odds examples over
# victim_age, every other feature held constant.
# --------------------------------------------------------------------------

BASE_VALUES = {
    "victim_age": "child",
    "victim_gender": "female",
    "family_race": "white",
    "use_of_public_assistance": "no",
    "perpetrator_gender": "male",
    "allegation_type": "physical_abuse",
    "perpetrator_age": "middle_aged",
    "referral_history": "one",
    "reporter_type": "teacher",
    "perpetrator_relationship_to_victim": "parent",
    "number_of_parents": "two",
    "region_wealth": "medium",
}


def _audit_case(case_id: str, age: str, prediction: str, true_label: str | None = None) -> Case:
    values = dict(BASE_VALUES)
    values["victim_age"] = age
    return Case(id=case_id, values=values, true_label=true_label, prediction=prediction)


def parity_gap_dataset(schema: FeatureSchema) -> Dataset:
    # infants: 3 of 4 predicted high; adolescents: 2 of 4 -> gap 1/4.
    cases = [
        _audit_case("pg-01", "infant", "high"),
        _audit_case("pg-02", "infant", "high"),
        _audit_case("pg-03", "infant", "high"),
        _audit_case("pg-04", "infant", "low"),
        _audit_case("pg-05", "adolescent", "high"),
        _audit_case("pg-06", "adolescent", "high"),
        _audit_case("pg-07", "adolescent", "low"),
        _audit_case("pg-08", "adolescent", "low"),
    ]
    return Dataset(schema=schema, cases=cases, threshold=0.5, provenance="synthetic")


def parity_balanced_dataset(schema: FeatureSchema) -> Dataset:
    # both age groups: 2 of 4 predicted high -> gap 0.
    cases = [
        _audit_case("pb-01", "infant", "high"),
        _audit_case("pb-02", "infant", "high"),
        _audit_case("pb-03", "infant", "low"),
        _audit_case("pb-04", "infant", "low"),
        _audit_case("pb-05", "adolescent", "high"),
        _audit_case("pb-06", "adolescent", "high"),
        _audit_case("pb-07", "adolescent", "low"),
        _audit_case("pb-08", "adolescent", "low"),
    ]
    return Dataset(schema=schema, cases=cases, threshold=0.5, provenance="synthetic")


def odds_gap_dataset(schema: FeatureSchema) -> Dataset:
    # infants: fpr 1/2, fnr 1/5; adolescents: fpr 1/3, fnr 2/3.
    cases = [
        _audit_case("og-01", "infant", "high", "low"),
        _audit_case("og-02", "infant", "low", "low"),
        _audit_case("og-03", "infant", "low", "high"),
        _audit_case("og-04", "infant", "high", "high"),
        _audit_case("og-05", "infant", "high", "high"),
        _audit_case("og-06", "infant", "high", "high"),
        _audit_case("og-07", "infant", "high", "high"),
        _audit_case("og-08", "adolescent", "high", "low"),
        _audit_case("og-09", "adolescent", "low", "low"),
        _audit_case("og-10", "adolescent", "low", "low"),
        _audit_case("og-11", "adolescent", "low", "high"),
        _audit_case("og-12", "adolescent", "low", "high"),
        _audit_case("og-13", "adolescent", "high", "high"),
    ]
    return Dataset(schema=schema, cases=cases, threshold=0.5, provenance="synthetic")


def odds_balanced_dataset(schema: FeatureSchema) -> Dataset:
    # both age groups: fpr 1/2, fnr 2/3 -> gaps 0.
    def group(prefix: str, age: str) -> list[Case]:
        return [
            _audit_case(f"{prefix}-1", age, "high", "low"),
            _audit_case(f"{prefix}-2", age, "low", "low"),
            _audit_case(f"{prefix}-3", age, "low", "high"),
            _audit_case(f"{prefix}-4", age, "low", "high"),
            _audit_case(f"{prefix}-5", age, "high", "high"),
        ]

    cases = group("ob-i", "infant") + group("ob-a", "adolescent")
    return Dataset(schema=schema, cases=cases, threshold=0.5, provenance="synthetic")


# --------------------------------------------------------------------------
# The fourteen comparison vignette pairs.  Each entry: (differing features,
# overrides for case A, overrides for case B, shared overrides).
# --------------------------------------------------------------------------

PAIR_SPECS: list[tuple[list[str], dict, dict, dict]] = [
    (  # 1: a younger vs an older child
        ["victim_age"],
        {"victim_age": "infant"},
        {"victim_age": "adolescent"},
        {},
    ),
    (  # 2
        ["victim_gender"],
        {"victim_gender": "female"},
        {"victim_gender": "male"},
        {"reporter_type": "neighbor"},
    ),
    (  # 3
        ["family_race"],
        {"family_race": "black"},
        {"family_race": "white"},
        {"allegation_type": "neglect"},
    ),
    (  # 4
        ["use_of_public_assistance"],
        {"use_of_public_assistance": "yes"},
        {"use_of_public_assistance": "no"},
        {"referral_history": "none"},
    ),
    (  # 5
        ["perpetrator_gender"],
        {"perpetrator_gender": "male"},
        {"perpetrator_gender": "female"},
        {"perpetrator_relationship_to_victim": "other_relative"},
    ),
    (  # 6: B carries the more serious allegation
        ["allegation_type", "perpetrator_age"],
        {"allegation_type": "neglect", "perpetrator_age": "young_adult"},
        {"allegation_type": "sexual_abuse", "perpetrator_age": "middle_aged"},
        {},
    ),
    (  # 7: A has the longer referral history
        ["family_race", "referral_history"],
        {"family_race": "hispanic", "referral_history": "multiple"},
        {"family_race": "white", "referral_history": "none"},
        {},
    ),
    (  # 8
        ["use_of_public_assistance", "victim_age", "reporter_type"],
        {
            "use_of_public_assistance": "yes",
            "victim_age": "infant",
            "reporter_type": "medical_professional",
        },
        {"use_of_public_assistance": "no", "victim_age": "child", "reporter_type": "teacher"},
        {},
    ),
    (  # 9: perpetrator unrelated on both sides
        ["victim_age", "perpetrator_age"],
        {"victim_age": "toddler", "perpetrator_age": "senior"},
        {"victim_age": "child", "perpetrator_age": "teen"},
        {"perpetrator_relationship_to_victim": "unrelated"},
    ),
    (  # 10: perpetrator is a parent on both sides
        ["victim_age", "perpetrator_age"],
        {"victim_age": "infant", "perpetrator_age": "middle_aged"},
        {"victim_age": "adolescent", "perpetrator_age": "young_adult"},
        {"perpetrator_relationship_to_victim": "parent"},
    ),
    (  # 11: A is the single-parent, low-wealth case
        ["number_of_parents", "region_wealth", "perpetrator_relationship_to_victim"],
        {
            "number_of_parents": "one",
            "region_wealth": "low",
            "perpetrator_relationship_to_victim": "unrelated",
        },
        {
            "number_of_parents": "two",
            "region_wealth": "medium",
            "perpetrator_relationship_to_victim": "parent",
        },
        {},
    ),
    (  # 12: B is poorer, assisted, repeatedly referred
        ["region_wealth", "use_of_public_assistance", "referral_history"],
        {"region_wealth": "high", "use_of_public_assistance": "no", "referral_history": "none"},
        {
            "region_wealth": "low",
            "use_of_public_assistance": "yes",
            "referral_history": "multiple",
        },
        {},
    ),
    (  # 13
        ["family_race", "region_wealth", "use_of_public_assistance"],
        {"family_race": "black", "region_wealth": "low", "use_of_public_assistance": "yes"},
        {"family_race": "asian", "region_wealth": "high", "use_of_public_assistance": "no"},
        {},
    ),
    (  # 14: younger two-parent boy vs older single-parent girl
        ["number_of_parents", "victim_age", "victim_gender"],
        {"number_of_parents": "two", "victim_age": "infant", "victim_gender": "male"},
        {"number_of_parents": "one", "victim_age": "adolescent", "victim_gender": "female"},
        {},
    ),
]


def build_fixture_pairs(schema: FeatureSchema) -> list[FixturePair]:
    pairs = []
    for i, (differing, a_over, b_over, shared) in enumerate(PAIR_SPECS, start=1):
        base = dict(BASE_VALUES)
        base.update(shared)
        values_a = dict(base)
        values_a.update(a_over)
        values_b = dict(base)
        values_b.update(b_over)
        pairs.append(
            FixturePair(
                index=i,
                case_a=Case(id=f"F{i:02d}A", values=values_a),
                case_b=Case(id=f"F{i:02d}B", values=values_b),
                differing=tuple(differing),
            )
        )
    validate_fixture_pairs(pairs, schema)
    return pairs


# --------------------------------------------------------------------------
# Default dataset: the 28 vignette cases (given deterministic outcomes) plus
# synthetic fill, 120 cases total.
# --------------------------------------------------------------------------

def build_default_dataset(schema: FeatureSchema, pairs: list[FixturePair]) -> Dataset:
    rng = np.random.default_rng(424242)
    cases = []
    for pair in pairs:
        for vignette in (pair.case_a, pair.case_b):
            score = round(float(rng.uniform(0.05, 0.95)), 6)
            truth = binarize(float(rng.uniform(0.0, 1.0)), 0.5)
            cases.append(
                Case(
                    id=vignette.id,
                    values=dict(vignette.values),
                    true_label=truth,
                    score=score,
                    prediction=binarize(score, 0.5),
                )
            )
    fill = generate_synthetic(schema, n=92, seed=20240613)
    for case in fill.cases:
        cases.append(
            Case(
                id=f"D{int(case.id):03d}",
                values=dict(case.values),
                true_label=case.true_label,
                score=case.score,
                prediction=case.prediction,
            )
        )
    dataset = Dataset(schema=schema, cases=cases, threshold=0.5, provenance="synthetic")
    validate_dataset(dataset)
    return dataset


# --------------------------------------------------------------------------
# The 12-participant cohort.  Attribute order everywhere:
# [victim_age, victim_gender, family_race, use_of_public_assistance,
#  perpetrator_gender] (the schema's sensitive order).
#
# Designed totals: equalized_odds yes = 40/60 (eight all-yes participants,
# four all-no); statistical_parity yes per attribute = [3, 7, 6, 5, 5] = 26;
# unawareness yes per attribute = [2, 6, 6, 5, 6] = 25; mean consistency
# (12 + 11 + 8.6) / 36 = 0.8778; pair 6 unanimous; pairs 1, 11, 14 contested;
# exactly five pairs with a >= 10 count.
# --------------------------------------------------------------------------

ROLES_BY_PARTICIPANT = [
    "social_worker",
    "social_worker",
    "social_worker",
    "social_worker",
    "social_worker",
    "social_worker",
    "parent",
    "parent",
    "parent",
    "parent",
    "other",
    "other",
]

# Group-fairness answer grids: rows = participants p01..p12, columns =
# sensitive attributes in schema order; 1 = yes, 0 = no.
UNAWARENESS_GRID = [
    [1, 1, 1, 1, 1],
    [1, 1, 1, 1, 1],
    [0, 1, 1, 1, 1],
    [0, 1, 1, 1, 1],
    [0, 1, 1, 1, 1],
    [0, 1, 1, 0, 1],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0],
]

PARITY_GRID = [
    [1, 1, 1, 1, 1],
    [0, 1, 0, 0, 0],
    [0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 0, 0, 1, 0],
    [1, 1, 1, 0, 0],
    [1, 1, 0, 0, 1],
    [0, 1, 1, 0, 1],
    [0, 1, 1, 1, 0],
    [0, 0, 1, 0, 1],
    [0, 0, 0, 1, 1],
]

ODDS_GRID = [[1] * 5] * 8 + [[0] * 5] * 4

# Pairwise answers: one row per vignette pair (1..14), twelve choices in
# participant order.  eq/a/b = equal / prioritize_a / prioritize_b,
# nc/no = not_comfortable / no_opinion.
_CH = {"eq": "equal", "a": "prioritize_a", "b": "prioritize_b", "nc": "not_comfortable", "no": "no_opinion"}

PAIRWISE_GRID = [
    ["a", "a", "a", "a", "a", "a", "eq", "eq", "eq", "eq", "eq", "nc"],
    ["eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "a", "no"],
    ["eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "b"],
    ["eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "a", "a", "b", "no"],
    ["eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "a", "nc"],
    ["b", "b", "b", "b", "b", "b", "b", "b", "b", "b", "b", "b"],
    ["a", "a", "a", "a", "a", "a", "a", "a", "a", "a", "a", "eq"],
    ["a", "a", "a", "a", "a", "a", "a", "eq", "eq", "eq", "no", "no"],
    ["eq", "eq", "eq", "eq", "eq", "eq", "eq", "eq", "a", "a", "a", "nc"],
    ["a", "a", "a", "a", "a", "a", "a", "a", "a", "eq", "eq", "no"],
    ["a", "a", "a", "a", "a", "a", "eq", "eq", "eq", "eq", "eq", "no"],
    ["b", "b", "b", "b", "b", "b", "b", "eq", "eq", "eq", "eq", "a"],
    ["a", "a", "a", "a", "a", "a", "a", "a", "eq", "eq", "eq", "eq"],
    ["a", "a", "a", "a", "a", "eq", "eq", "eq", "eq", "b", "b", "b"],
]

RATIONALES = {
    (0, 5): "The allegation against case B is far more serious.",
    (2, 11): "Repeated referrals with public assistance point at sustained risk.",
}

GF_CHOICE = {1: "yes", 0: "no"}

CRITERION_GRIDS = {
    "unawareness": UNAWARENESS_GRID,
    "statistical_parity": PARITY_GRID,
    "equalized_odds": ODDS_GRID,
}

STAGE2_ANSWERS = ["equal", "prioritize_a", "prioritize_b", "no_opinion"]


def build_replay_sessions(dataset: Dataset, pairs: list[FixturePair]) -> list[dict]:
    logs = []
    for p_idx in range(12):
        participant = ParticipantProfile(role=ROLES_BY_PARTICIPANT[p_idx], demographics={})
        session = start_session(
            participant,
            dataset,
            seed=1000 + p_idx,
            dataset_ref="default",
            session_id=f"p{p_idx + 1:02d}",
            fixture_pairs=pairs,
            clock=SequenceClock(),
        )
        # Stage 1: fourteen vignette pairs, then the group-fairness grid.
        while True:
            question = next_question(session, dataset)
            if isinstance(question, StagePrompt):
                break
            if isinstance(question, PairwiseQuestion):
                pair_row = question.pair_index - 1
                choice = _CH[PAIRWISE_GRID[pair_row][p_idx]]
                rationale = RATIONALES.get((p_idx, pair_row))
                record_response(
                    session,
                    PairwiseResponse(
                        question_id=question.question_id, choice=choice, rationale=rationale
                    ),
                )
            else:
                grid = CRITERION_GRIDS[question.criterion]
                attr_idx = dataset.schema.sensitive_attributes.index(question.attribute)
                choice = GF_CHOICE[grid[p_idx][attr_idx]]
                record_response(
                    session,
                    GroupFairnessResponse(question_id=question.question_id, choice=choice),
                )
        advance_stage(session)

        # Stage 2: three random pairs, predictions visible.
        for t in range(3):
            question = next_question(session, dataset)
            choice = STAGE2_ANSWERS[(p_idx + t) % len(STAGE2_ANSWERS)]
            record_response(
                session, PairwiseResponse(question_id=question.question_id, choice=choice)
            )
        advance_stage(session)

        # Stage 3: one weight adjustment and one flagged pair.
        weights = [1.0] * len(dataset.schema.features)
        weights[p_idx % len(weights)] = 2.0
        record_exploration(
            session, dataset, "weight_change", {"weights": weights, "reference": "F01A"}
        )
        record_exploration(
            session,
            dataset,
            "similarity_flag",
            {"case_a": "F01A", "case_b": "F01B", "note": "Nearly identical but treated differently."},
        )
        advance_stage(session)

        # Stage 4: a couple of group-view queries, then close.
        record_exploration(
            session,
            dataset,
            "group_query",
            {"attributes": ["victim_age"], "metric": "positive_rate"},
        )
        if p_idx % 2 == 0:
            record_exploration(
                session,
                dataset,
                "group_query",
                {"attributes": ["victim_age", "victim_gender"], "metric": "fpr"},
            )
        advance_stage(session)
        logs.append(export_session(session))
    return logs


def write(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(payload), encoding="utf-8")
    print(f"wrote {path.relative_to(ROOT)}")


def main() -> None:
    schema = default_schema()
    write(FIXTURES / "default_schema.json", schema_to_jsonable(schema))

    for name, builder in (
        ("parity_gap_dataset", parity_gap_dataset),
        ("parity_balanced_dataset", parity_balanced_dataset),
        ("odds_gap_dataset", odds_gap_dataset),
        ("odds_balanced_dataset", odds_balanced_dataset),
    ):
        dataset = builder(schema)
        validate_dataset(dataset)
        write(FIXTURES / f"{name}.json", dataset_to_jsonable(dataset))

    pairs = build_fixture_pairs(schema)
    write(
        FIXTURES / "fixture_pairs.json",
        {
            "pairs": [
                {
                    "index": p.index,
                    "differing": list(p.differing),
                    "case_a": case_to_jsonable(p.case_a),
                    "case_b": case_to_jsonable(p.case_b),
                }
                for p in pairs
            ]
        },
    )

    dataset = build_default_dataset(schema, pairs)
    write(FIXTURES / "default_dataset.json", dataset_to_jsonable(dataset))

    for log in build_replay_sessions(dataset, pairs):
        write(FIXTURES / "replay_sessions" / f"{log['session']['session_id']}.json", log)


if __name__ == "__main__":
    main()
