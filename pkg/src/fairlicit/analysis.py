"""Cohort-level analysis of elicitation sessions.

Session logs flatten into a response matrix: one row per participant, one
column per shared stage-1 question.  On top of the matrix sit criterion
support rates, per-pair consensus classes, within-participant consistency,
and a Borda-count aggregation of pairwise priorities.  Counting is exact
(integers and :class:`fractions.Fraction`); floats appear only at the wire.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .elicitation import (
    CRITERIA,
    GF_CHOICES,
    PAIR_CHOICES,
    Session,
    import_session,
)
from .errors import (
    DuplicateIdError,
    EmptyMatrixError,
    InvalidChoiceError,
    NoAnswersError,
    SchemaMismatchError,
    UnknownCaseError,
    UnknownQuestionError,
    UnknownSessionError,
)

SUBSTANTIVE_CHOICES = ("equal", "prioritize_a", "prioritize_b")
ABSTAIN_CHOICES = ("not_comfortable", "no_opinion")

UNANIMOUS = "unanimous"
MAJORITY = "majority"
CONTESTED = "contested"

STRONG_AGREEMENT_COUNT = 10


@dataclass
class ResponseMatrix:
    """Stage-1 responses of a cohort, aligned on a shared question set."""

    participants: tuple[str, ...]
    pair_questions: tuple[str, ...]
    pair_cases: dict[str, tuple[str, str]]
    attributes: tuple[str, ...]
    criteria: tuple[str, ...]
    pairwise: dict[tuple[str, str], str] = field(default_factory=dict)
    group: dict[tuple[str, str, str], str] = field(default_factory=dict)


def matrix_from_sessions(sessions: Iterable[Session | Mapping[str, Any]]) -> ResponseMatrix:
    """Build the response matrix from sessions or exported session logs.

    All sessions must share the same stage-1 question set; participants are
    keyed by session id.  A cell exists only where the participant answered.
    """
    loaded: list[Session] = []
    for s in sessions:
        loaded.append(s if isinstance(s, Session) else import_session(dict(s)))
    if not loaded:
        raise EmptyMatrixError("no sessions")

    reference_queue = [r.to_jsonable() for r in loaded[0].stage1_queue]
    pair_questions: list[str] = []
    pair_cases: dict[str, tuple[str, str]] = {}
    attributes: list[str] = []
    for record in loaded[0].stage1_queue:
        if record.qtype == "pairwise":
            pair_questions.append(record.question_id)
            pair_cases[record.question_id] = (record.case_a, record.case_b)
        elif record.attribute not in attributes:
            attributes.append(record.attribute)

    participants: list[str] = []
    pairwise: dict[tuple[str, str], str] = {}
    group: dict[tuple[str, str, str], str] = {}
    for session in loaded:
        if [r.to_jsonable() for r in session.stage1_queue] != reference_queue:
            raise SchemaMismatchError(
                f"session {session.session_id!r} has a different stage-1 question set"
            )
        if session.session_id in participants:
            raise DuplicateIdError(session.session_id)
        participants.append(session.session_id)
        by_id = {r.question_id: r for r in session.stage1_queue}
        for event in session.transcript:
            if event.kind != "response":
                continue
            qid = event.payload["question_id"]
            record = by_id.get(qid)
            if record is None:
                continue  # stage-2 responses are per-session, not cohort columns
            if record.qtype == "pairwise":
                pairwise[(session.session_id, qid)] = event.payload["choice"]
            else:
                group[(session.session_id, record.criterion, record.attribute)] = event.payload[
                    "choice"
                ]

    return ResponseMatrix(
        participants=tuple(participants),
        pair_questions=tuple(pair_questions),
        pair_cases=pair_cases,
        attributes=tuple(attributes),
        criteria=CRITERIA,
        pairwise=pairwise,
        group=group,
    )


@dataclass(frozen=True)
class CriterionSupport:
    criterion: str
    participants: int
    attributes: int
    yes_count: int
    support: Fraction
    per_attribute_yes: dict[str, int]


def criterion_support(matrix: ResponseMatrix, criterion: str) -> CriterionSupport:
    """Fraction of yes over all (participant, attribute) cells of a criterion.

    Unanswered and no_opinion cells stay in the denominator: support measures
    affirmative endorsement across the whole cohort grid.
    """
    if criterion not in matrix.criteria:
        raise InvalidChoiceError("criterion", criterion, matrix.criteria)
    p = len(matrix.participants)
    a = len(matrix.attributes)
    if p == 0 or a == 0:
        raise EmptyMatrixError("matrix has no group-fairness cells")
    per_attribute = {attr: 0 for attr in matrix.attributes}
    for participant in matrix.participants:
        for attr in matrix.attributes:
            if matrix.group.get((participant, criterion, attr)) == "yes":
                per_attribute[attr] += 1
    yes = sum(per_attribute.values())
    return CriterionSupport(
        criterion=criterion,
        participants=p,
        attributes=a,
        yes_count=yes,
        support=Fraction(yes, p * a),
        per_attribute_yes=per_attribute,
    )


@dataclass(frozen=True)
class PairConsensus:
    question_id: str
    case_a: str
    case_b: str
    counts: dict[str, int]
    responses: int
    classification: str
    top_choice: str | None
    strong_agreement: bool


def consensus_class(matrix: ResponseMatrix, question_id: str) -> PairConsensus:
    """Classify cohort agreement on one pairwise question.

    unanimous: every substantive (non-abstaining) response picked the same
    option, and there is at least one.  majority: the leading substantive
    option holds a strict majority of all responses, abstentions included.
    Anything else is contested.  ``strong_agreement`` flags any single option
    (abstentions included) chosen by at least ten participants.
    """
    if question_id not in matrix.pair_questions:
        raise UnknownQuestionError(question_id)
    counts = {choice: 0 for choice in PAIR_CHOICES}
    for participant in matrix.participants:
        choice = matrix.pairwise.get((participant, question_id))
        if choice is not None:
            counts[choice] += 1
    total = sum(counts.values())
    substantive = {c: counts[c] for c in SUBSTANTIVE_CHOICES}
    substantive_total = sum(substantive.values())
    top_choice = max(SUBSTANTIVE_CHOICES, key=lambda c: substantive[c]) if substantive_total else None
    top_count = substantive[top_choice] if top_choice else 0

    if substantive_total > 0 and top_count == substantive_total:
        classification = UNANIMOUS
    elif 2 * top_count > total:
        classification = MAJORITY
    else:
        classification = CONTESTED

    case_a, case_b = matrix.pair_cases[question_id]
    return PairConsensus(
        question_id=question_id,
        case_a=case_a,
        case_b=case_b,
        counts=counts,
        responses=total,
        classification=classification,
        top_choice=top_choice,
        strong_agreement=max(counts.values()) >= STRONG_AGREEMENT_COUNT if total else False,
    )


def consistency_score(matrix: ResponseMatrix, participant: str, criterion: str) -> Fraction:
    """Within-participant agreement on one criterion across attributes.

    The modal yes/no answer count over the answered attributes; no_opinion
    cells are excluded from both sides.  All-abstain raises
    :class:`NoAnswersError`.
    """
    if participant not in matrix.participants:
        raise UnknownSessionError(participant)
    if criterion not in matrix.criteria:
        raise InvalidChoiceError("criterion", criterion, matrix.criteria)
    answered = [
        matrix.group[(participant, criterion, attr)]
        for attr in matrix.attributes
        if matrix.group.get((participant, criterion, attr)) in ("yes", "no")
    ]
    if not answered:
        raise NoAnswersError(
            f"participant {participant!r} gave no yes/no answers for {criterion!r}"
        )
    modal = max(answered.count("yes"), answered.count("no"))
    return Fraction(modal, len(answered))


def mean_consistency(matrix: ResponseMatrix) -> Fraction:
    """Mean of consistency scores over all (participant, criterion) cells
    that have at least one yes/no answer."""
    scores = []
    for participant in matrix.participants:
        for criterion in matrix.criteria:
            try:
                scores.append(consistency_score(matrix, participant, criterion))
            except NoAnswersError:
                continue
    if not scores:
        raise NoAnswersError("no participant answered any group-fairness question")
    return sum(scores, Fraction(0)) / len(scores)


@dataclass(frozen=True)
class BordaResult:
    scores: dict[str, Fraction]
    ordering: tuple[str, ...]
    tied: bool


def borda_aggregate(
    responses: Iterable[tuple[str, str, str]], case_ids: Iterable[str]
) -> BordaResult:
    """Aggregate pairwise responses into a priority ordering over cases.

    Each response is (case_a, case_b, choice).  prioritize_a gives case_a one
    point, prioritize_b gives case_b one point, equal gives each half a
    point, and abstentions (not_comfortable, no_opinion) give nothing.  The
    ordering sorts by descending score; exact score ties are flagged and
    broken by ascending case id.
    """
    ids = list(case_ids)
    if len(set(ids)) != len(ids):
        raise DuplicateIdError(next(i for i in ids if ids.count(i) > 1))
    # accumulate in half-points so every update is integer arithmetic
    halves: dict[str, int] = {cid: 0 for cid in ids}
    for case_a, case_b, choice in responses:
        if case_a not in halves:
            raise UnknownCaseError(case_a)
        if case_b not in halves:
            raise UnknownCaseError(case_b)
        if choice == "prioritize_a":
            halves[case_a] += 2
        elif choice == "prioritize_b":
            halves[case_b] += 2
        elif choice == "equal":
            halves[case_a] += 1
            halves[case_b] += 1
        elif choice not in PAIR_CHOICES:
            raise InvalidChoiceError("choice", choice, PAIR_CHOICES)

    scores = {cid: Fraction(count, 2) for cid, count in halves.items()}
    ordering = tuple(sorted(scores, key=lambda cid: (-scores[cid], cid)))
    tied = any(
        scores[ordering[i]] == scores[ordering[i + 1]] for i in range(len(ordering) - 1)
    )
    return BordaResult(scores=scores, ordering=ordering, tied=tied)


@dataclass(frozen=True)
class ConsensusSummary:
    matrix: ResponseMatrix
    support: dict[str, CriterionSupport]
    pairs: tuple[PairConsensus, ...]
    per_participant_consistency: dict[tuple[str, str], Fraction]
    mean_consistency_score: Fraction | None


def consensus_summary(matrix: ResponseMatrix) -> ConsensusSummary:
    support = {c: criterion_support(matrix, c) for c in matrix.criteria} if matrix.attributes else {}
    pairs = tuple(consensus_class(matrix, qid) for qid in matrix.pair_questions)
    per: dict[tuple[str, str], Fraction] = {}
    for participant in matrix.participants:
        for criterion in matrix.criteria:
            try:
                per[(participant, criterion)] = consistency_score(matrix, participant, criterion)
            except NoAnswersError:
                continue
    mean = (sum(per.values(), Fraction(0)) / len(per)) if per else None
    return ConsensusSummary(
        matrix=matrix,
        support=support,
        pairs=pairs,
        per_participant_consistency=per,
        mean_consistency_score=mean,
    )


def summary_to_jsonable(summary: ConsensusSummary) -> dict[str, Any]:
    matrix = summary.matrix
    per_participant: dict[str, dict[str, float]] = {}
    for (participant, criterion), score in summary.per_participant_consistency.items():
        per_participant.setdefault(participant, {})[criterion] = float(score)
    return {
        "participants": list(matrix.participants),
        "attributes": list(matrix.attributes),
        "criterion_support": {
            c: {
                "criterion": s.criterion,
                "participants": s.participants,
                "attributes": s.attributes,
                "yes_count": s.yes_count,
                "support": float(s.support),
                "per_attribute_yes": dict(s.per_attribute_yes),
            }
            for c, s in summary.support.items()
        },
        "pairs": [
            {
                "question_id": p.question_id,
                "case_a": p.case_a,
                "case_b": p.case_b,
                "counts": dict(p.counts),
                "responses": p.responses,
                "classification": p.classification,
                "top_choice": p.top_choice,
                "strong_agreement": p.strong_agreement,
            }
            for p in summary.pairs
        ],
        "consistency": {
            "mean": None
            if summary.mean_consistency_score is None
            else float(summary.mean_consistency_score),
            "per_participant": per_participant,
        },
    }


CSV_HEADER = ("figure", "criterion", "attribute", "pair", "choice", "count", "value")


def summary_csv_rows(matrix: ResponseMatrix) -> list[tuple[str, ...]]:
    """Plot-ready rows: support per criterion, group-fairness answer counts
    by attribute and overall, and per-pair choice counts."""
    rows: list[tuple[str, ...]] = []
    if matrix.attributes:
        for criterion in matrix.criteria:
            s = criterion_support(matrix, criterion)
            rows.append(
                ("criterion_support", criterion, "", "", "", "", f"{float(s.support):.3f}")
            )
        for criterion in matrix.criteria:
            for attr in matrix.attributes:
                tallies = {c: 0 for c in GF_CHOICES}
                for participant in matrix.participants:
                    choice = matrix.group.get((participant, criterion, attr))
                    if choice is not None:
                        tallies[choice] += 1
                for choice in GF_CHOICES:
                    rows.append(
                        (
                            "group_fairness_by_attribute",
                            criterion,
                            attr,
                            "",
                            choice,
                            str(tallies[choice]),
                            "",
                        )
                    )
        for criterion in matrix.criteria:
            tallies = {c: 0 for c in GF_CHOICES}
            for (participant, crit, attr), choice in matrix.group.items():
                if crit == criterion:
                    tallies[choice] += 1
            for choice in GF_CHOICES:
                rows.append(
                    ("group_fairness_overall", criterion, "", "", choice, str(tallies[choice]), "")
                )
    for qid in matrix.pair_questions:
        consensus = consensus_class(matrix, qid)
        for choice in PAIR_CHOICES:
            rows.append(
                ("pairwise_by_case", "", "", qid, choice, str(consensus.counts[choice]), "")
            )
    return rows


def borda_to_jsonable(result: BordaResult) -> dict[str, Any]:
    return {
        "scores": {cid: float(score) for cid, score in result.scores.items()},
        "ordering": list(result.ordering),
        "tied": result.tied,
    }
