"""Independent reference computations used by the test suite.

Distances are recomputed in exact rational arithmetic from first principles
(one coordinate per ordinal feature, a unit-distance indicator for
categoricals), so ranking comparisons do not inherit the library's float
evaluation order.  Ordinal level spans in the random schemas are powers of
two, keeping every encoded position exactly representable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from fairlicit.data import Case, Dataset, FeatureDef, FeatureSchema, binarize


def exact_sq_distance(
    schema: FeatureSchema, weights: Sequence[float], a: Case, b: Case
) -> Fraction:
    """Squared weighted distance as an exact rational."""
    total = Fraction(0)
    for feature, w in zip(schema.features, weights):
        va, vb = a.values[feature.name], b.values[feature.name]
        if feature.kind == "ordinal":
            lo, hi = Fraction(feature.levels[0]), Fraction(feature.levels[-1])
            pa = (Fraction(feature.levels[feature.values.index(va)]) - lo) / (hi - lo)
            pb = (Fraction(feature.levels[feature.values.index(vb)]) - lo) / (hi - lo)
            total += Fraction(w) * (pa - pb) ** 2
        elif va != vb:
            total += Fraction(w)
    return total


def brute_force_ranking(
    dataset: Dataset, reference_id: str, weights: Sequence[float]
) -> list[str]:
    """Case ids sorted by (exact squared distance, id), reference excluded."""
    reference = dataset.case(reference_id)
    keyed = [
        (exact_sq_distance(dataset.schema, weights, reference, case), case.id)
        for case in dataset.cases
        if case.id != reference_id
    ]
    keyed.sort()
    return [case_id for _, case_id in keyed]


def brute_force_discordant(
    dataset: Dataset, weights: Sequence[float], k: int
) -> list[tuple[str, str]]:
    """The k closest opposite-prediction pairs by exact distance."""
    cases = dataset.cases
    keyed = []
    for i in range(len(cases)):
        for j in range(i + 1, len(cases)):
            a, b = cases[i], cases[j]
            if a.prediction == b.prediction:
                continue
            if a.id > b.id:
                a, b = b, a
            keyed.append((exact_sq_distance(dataset.schema, weights, a, b), a.id, b.id))
    keyed.sort()
    return [(a, b) for _, a, b in keyed[:k]]


def random_schema(rng: np.random.Generator) -> FeatureSchema:
    """A small random schema; ordinal spans are powers of two."""
    n_features = int(rng.integers(2, 7))
    features = []
    for i in range(n_features):
        if rng.random() < 0.5:
            span = int(2 ** rng.integers(0, 4))
            n_interior = int(rng.integers(0, min(3, span)))
            interior = (
                rng.choice(range(1, span), size=n_interior, replace=False).tolist()
                if n_interior
                else []
            )
            levels = tuple(sorted([0, span] + interior))
            features.append(
                FeatureDef(
                    name=f"f{i}",
                    kind="ordinal",
                    values=tuple(f"v{j}" for j in range(len(levels))),
                    levels=levels,
                )
            )
        else:
            n_values = int(rng.integers(2, 6))
            features.append(
                FeatureDef(
                    name=f"f{i}",
                    kind="categorical",
                    values=tuple(f"v{j}" for j in range(n_values)),
                )
            )
    sensitive = tuple(f.name for f in features if rng.random() < 0.4)
    return FeatureSchema(features=tuple(features), sensitive_attributes=sensitive)


def random_cases(schema: FeatureSchema, n: int, rng: np.random.Generator) -> Dataset:
    cases = []
    for i in range(n):
        values = {f.name: f.values[int(rng.integers(0, len(f.values)))] for f in schema.features}
        score = float(rng.random())
        cases.append(
            Case(
                id=f"c{i:04d}",
                values=values,
                true_label=binarize(float(rng.random()), 0.5),
                score=score,
                prediction=binarize(score, 0.5),
            )
        )
    return Dataset(schema=schema, cases=cases, threshold=0.5, provenance="synthetic")


def random_weights(schema: FeatureSchema, rng: np.random.Generator) -> list[float]:
    """Strictly positive continuous weights (no exact collisions)."""
    return [float(w) for w in rng.random(len(schema.features)) + 0.01]


def borda_oracle(
    responses: Sequence[tuple[str, str, str]], case_ids: Sequence[str]
) -> tuple[dict[str, Fraction], list[str], bool]:
    """Direct restatement of the scoring rule, kept free of library code."""
    scores = {cid: Fraction(0) for cid in case_ids}
    for a, b, choice in responses:
        if choice == "prioritize_a":
            scores[a] += 1
        elif choice == "prioritize_b":
            scores[b] += 1
        elif choice == "equal":
            scores[a] += Fraction(1, 2)
            scores[b] += Fraction(1, 2)
    ordering = sorted(scores, key=lambda cid: (-scores[cid], cid))
    tied = any(
        scores[ordering[i]] == scores[ordering[i + 1]] for i in range(len(ordering) - 1)
    )
    return scores, ordering, tied
