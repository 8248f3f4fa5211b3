"""Four-stage preference elicitation sessions.

A session walks one participant through: (1) a fixed set of pairwise
comparison vignettes plus yes/no group-fairness questions, (2) randomly drawn
case pairs shown with the model's predictions, (3) free exploration of the
similarity view (weight changes, flagged pairs), and (4) free exploration of
the group view.  Everything observable is appended to a transcript, and the
transcript plus the seed fully determine the session: replaying the recorded
inputs reproduces the log byte for byte.
"""

from __future__ import annotations

import math
import time
import uuid
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .data import Case, Dataset, FeatureSchema, case_from_jsonable, case_to_jsonable
from .errors import (
    DuplicateResponseError,
    EmptyDatasetError,
    FairlicitError,
    InvalidChoiceError,
    MissingPredictionsError,
    SchemaError,
    SchemaMismatchError,
    SessionClosedError,
    UnknownAttributeError,
    UnknownCaseError,
    UnknownQuestionError,
    WrongStageError,
)
from .metrics import CRITERIA, GROUP_VIEW_METRICS
from .serialize import canonical_json

SESSION_FORMAT = "fairlicit-session"
SESSION_VERSION = 1

ROLES = ("social_worker", "parent", "other")

PAIR_CHOICES = ("equal", "prioritize_a", "prioritize_b", "not_comfortable", "no_opinion")
GF_CHOICES = ("yes", "no", "no_opinion")

EXPLORATION_KINDS = ("weight_change", "similarity_flag", "group_query")

STAGE_FIXED_QUESTIONS = 1
STAGE_RANDOM_PAIRS = 2
STAGE_SIMILARITY = 3
STAGE_GROUPS = 4

CRITERION_TEXT = {
    "unawareness": (
        "For the algorithm to be fair, must the following hold for {attribute}: "
        "the sensitive attribute should not be a predictive factor?"
    ),
    "statistical_parity": (
        "For the algorithm to be fair, must the following hold for {attribute}: "
        "the rates of positive classification should be equal across the sensitive attribute?"
    ),
    "equalized_odds": (
        "For the algorithm to be fair, must the following hold for {attribute}: "
        "the false positive and false negative rates should be equal across the sensitive attribute?"
    ),
}

Clock = Callable[[], float]


class SequenceClock:
    """Deterministic clock: 0, 1, 2, ... — used by fixtures and tests."""

    def __init__(self, start: int = 0):
        self._next = start

    def __call__(self) -> int:
        value = self._next
        self._next += 1
        return value


@dataclass(frozen=True)
class ParticipantProfile:
    role: str
    demographics: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class FixturePair:
    """One hand-built vignette pair; the two cases differ exactly in
    ``differing`` and agree everywhere else."""

    index: int
    case_a: Case
    case_b: Case
    differing: tuple[str, ...]


@dataclass(frozen=True)
class PairwiseQuestion:
    question_id: str
    case_a: Case
    case_b: Case
    show_predictions: bool
    source: str
    pair_index: int | None = None


@dataclass(frozen=True)
class GroupFairnessQuestion:
    question_id: str
    attribute: str
    criterion: str
    text: str


@dataclass(frozen=True)
class StagePrompt:
    stage: int
    action: str
    message: str


@dataclass(frozen=True)
class PairwiseResponse:
    question_id: str
    choice: str
    rationale: str | None = None


@dataclass(frozen=True)
class GroupFairnessResponse:
    question_id: str
    choice: str
    rationale: str | None = None


@dataclass(frozen=True)
class Event:
    kind: str
    stage: int
    timestamp: float
    payload: dict[str, Any]


@dataclass(frozen=True)
class _QuestionRecord:
    """Flat, serializable description of a question; cases held by id."""

    question_id: str
    qtype: str  # "pairwise" | "group_fairness"
    case_a: str | None = None
    case_b: str | None = None
    show_predictions: bool = False
    source: str | None = None
    pair_index: int | None = None
    attribute: str | None = None
    criterion: str | None = None
    text: str | None = None

    def to_jsonable(self) -> dict[str, Any]:
        if self.qtype == "pairwise":
            return {
                "id": self.question_id,
                "type": "pairwise",
                "case_a": self.case_a,
                "case_b": self.case_b,
                "show_predictions": self.show_predictions,
                "source": self.source,
                "pair_index": self.pair_index,
            }
        return {
            "id": self.question_id,
            "type": "group_fairness",
            "attribute": self.attribute,
            "criterion": self.criterion,
            "text": self.text,
        }

    @classmethod
    def from_jsonable(cls, obj: dict[str, Any]) -> "_QuestionRecord":
        if obj.get("type") == "pairwise":
            return cls(
                question_id=obj["id"],
                qtype="pairwise",
                case_a=obj["case_a"],
                case_b=obj["case_b"],
                show_predictions=bool(obj.get("show_predictions", False)),
                source=obj.get("source"),
                pair_index=obj.get("pair_index"),
            )
        if obj.get("type") == "group_fairness":
            return cls(
                question_id=obj["id"],
                qtype="group_fairness",
                attribute=obj["attribute"],
                criterion=obj["criterion"],
                text=obj.get("text"),
            )
        raise SchemaError(f"unknown question type in log: {obj.get('type')!r}")


@dataclass
class Session:
    session_id: str
    participant: ParticipantProfile
    dataset_ref: str
    seed: int
    stage: int = STAGE_FIXED_QUESTIONS
    created_at: float = 0.0
    closed_at: float | None = None
    transcript: list[Event] = field(default_factory=list)
    fixture_cases: dict[str, Case] = field(default_factory=dict)
    stage1_queue: list[_QuestionRecord] = field(default_factory=list)
    clock: Clock = time.time

    # Derived bookkeeping, rebuilt on import.
    _served: dict[str, _QuestionRecord] = field(default_factory=dict)
    _answers: dict[str, str] = field(default_factory=dict)
    _stage2_count: int = 0

    @property
    def closed(self) -> bool:
        return self.closed_at is not None

    def elicited_weights(self) -> list[float] | None:
        """Latest stage-3 weight vector, or None if never adjusted."""
        for event in reversed(self.transcript):
            if event.kind == "exploration" and event.payload.get("kind") == "weight_change":
                return list(event.payload["weights"])
        return None


def _check_case_conforms(schema: FeatureSchema, case: Case) -> None:
    for f in schema.features:
        if case.values.get(f.name) not in f.values:
            raise SchemaMismatchError(
                f"fixture case {case.id!r} does not conform to the dataset schema "
                f"(feature {f.name!r}, value {case.values.get(f.name)!r})"
            )


def validate_fixture_pairs(pairs: Sequence[FixturePair], schema: FeatureSchema) -> None:
    """Each pair must conform to the schema and differ exactly as declared."""
    for pair in pairs:
        _check_case_conforms(schema, pair.case_a)
        _check_case_conforms(schema, pair.case_b)
        actual = tuple(
            f.name
            for f in schema.features
            if pair.case_a.values[f.name] != pair.case_b.values[f.name]
        )
        if set(actual) != set(pair.differing):
            raise SchemaMismatchError(
                f"fixture pair {pair.index} differs in {sorted(actual)}, "
                f"declared {sorted(pair.differing)}"
            )


def _build_stage1_queue(
    pairs: Sequence[FixturePair], schema: FeatureSchema
) -> list[_QuestionRecord]:
    queue: list[_QuestionRecord] = []
    for pair in pairs:
        queue.append(
            _QuestionRecord(
                question_id=f"s1-pair-{pair.index:02d}",
                qtype="pairwise",
                case_a=pair.case_a.id,
                case_b=pair.case_b.id,
                show_predictions=False,
                source="fixture",
                pair_index=pair.index,
            )
        )
    for criterion in CRITERIA:
        for attribute in schema.sensitive_attributes:
            queue.append(
                _QuestionRecord(
                    question_id=f"s1-gf-{criterion}-{attribute}",
                    qtype="group_fairness",
                    attribute=attribute,
                    criterion=criterion,
                    text=CRITERION_TEXT[criterion].format(attribute=attribute),
                )
            )
    return queue


def start_session(
    participant: ParticipantProfile,
    dataset: Dataset,
    seed: int,
    dataset_ref: str = "",
    session_id: str | None = None,
    fixture_pairs: Sequence[FixturePair] | None = None,
    clock: Clock | None = None,
) -> Session:
    """Open a stage-1 session against a dataset with predictions.

    The fixture pairs default to the bundled vignette set; they must conform
    to the dataset's schema.  ``seed`` drives stage-2 pair sampling only.
    """
    if participant.role not in ROLES:
        raise InvalidChoiceError("role", participant.role, ROLES)
    for case in dataset.cases:
        if case.prediction is None:
            raise MissingPredictionsError(f"case {case.id!r} has no prediction")
    if len(dataset.cases) < 2:
        raise EmptyDatasetError("a session needs at least two dataset cases")
    if fixture_pairs is None:
        from .bundled import load_fixture_pairs

        fixture_pairs = load_fixture_pairs()
    validate_fixture_pairs(fixture_pairs, dataset.schema)

    clock = clock or time.time
    session = Session(
        session_id=session_id or uuid.uuid4().hex[:12],
        participant=participant,
        dataset_ref=dataset_ref,
        seed=seed,
        stage=STAGE_FIXED_QUESTIONS,
        created_at=clock(),
        clock=clock,
    )
    for pair in fixture_pairs:
        session.fixture_cases[pair.case_a.id] = pair.case_a
        session.fixture_cases[pair.case_b.id] = pair.case_b
    session.stage1_queue = _build_stage1_queue(fixture_pairs, dataset.schema)
    return session


def _resolve_case(session: Session, dataset: Dataset, case_id: str) -> Case:
    case = dataset.case(case_id)
    if case is not None:
        return case
    # Vignette cases are carried by the session itself so stage 1 works
    # against datasets that do not contain them.
    if case_id in session.fixture_cases:
        return session.fixture_cases[case_id]
    raise UnknownCaseError(case_id)


def _question_object(
    session: Session, dataset: Dataset, record: _QuestionRecord
) -> PairwiseQuestion | GroupFairnessQuestion:
    if record.qtype == "pairwise":
        return PairwiseQuestion(
            question_id=record.question_id,
            case_a=_resolve_case(session, dataset, record.case_a),
            case_b=_resolve_case(session, dataset, record.case_b),
            show_predictions=record.show_predictions,
            source=record.source,
            pair_index=record.pair_index,
        )
    return GroupFairnessQuestion(
        question_id=record.question_id,
        attribute=record.attribute,
        criterion=record.criterion,
        text=record.text,
    )


def _pending_record(session: Session) -> _QuestionRecord | None:
    for qid, record in session._served.items():
        if qid not in session._answers:
            return record
    return None


def _append(session: Session, kind: str, payload: dict[str, Any], at: float | None) -> None:
    ts = session.clock() if at is None else at
    session.transcript.append(Event(kind=kind, stage=session.stage, timestamp=ts, payload=payload))


def _serve(session: Session, record: _QuestionRecord, at: float | None) -> None:
    session._served[record.question_id] = record
    if record.source == "random":
        session._stage2_count += 1
    _append(session, "question_served", {"question": record.to_jsonable()}, at)


def sample_random_pair(seed: int, draw_index: int, n_cases: int) -> tuple[int, int]:
    """Uniform unordered pair of distinct case indices, stateless per draw.

    Draw ``t`` is a pure function of (seed, t), so a session's pair sequence
    can be reproduced from its header without RNG state.
    """
    rng = np.random.default_rng([seed, draw_index])
    i = int(rng.integers(n_cases))
    j = int(rng.integers(n_cases - 1))
    if j >= i:
        j += 1
    return (i, j) if i < j else (j, i)


def next_question(
    session: Session, dataset: Dataset, at: float | None = None
) -> PairwiseQuestion | GroupFairnessQuestion | StagePrompt:
    """Serve (or re-serve) the participant's next question.

    Idempotent while a question is pending: the same unanswered question comes
    back without a new transcript event.  In stages 3 and 4 there are no
    questions, only a prompt describing the exploration view.
    """
    if session.closed:
        raise SessionClosedError(f"session {session.session_id!r} is closed")

    pending = _pending_record(session)
    if pending is not None:
        return _question_object(session, dataset, pending)

    if session.stage == STAGE_FIXED_QUESTIONS:
        for record in session.stage1_queue:
            if record.question_id not in session._served:
                _serve(session, record, at)
                return _question_object(session, dataset, record)
        return StagePrompt(
            stage=STAGE_FIXED_QUESTIONS,
            action="advance",
            message="All fixed questions are answered; advance to the next stage.",
        )

    if session.stage == STAGE_RANDOM_PAIRS:
        t = session._stage2_count
        i, j = sample_random_pair(session.seed, t, len(dataset.cases))
        record = _QuestionRecord(
            question_id=f"s2-rand-{t:04d}",
            qtype="pairwise",
            case_a=dataset.cases[i].id,
            case_b=dataset.cases[j].id,
            show_predictions=True,
            source="random",
        )
        _serve(session, record, at)
        return _question_object(session, dataset, record)

    if session.stage == STAGE_SIMILARITY:
        return StagePrompt(
            stage=STAGE_SIMILARITY,
            action="explore_similarity",
            message=(
                "Explore the similarity view: pick a reference case, adjust the "
                "feature weights, and flag any nearby pair that received "
                "different predictions but should not have."
            ),
        )
    return StagePrompt(
        stage=STAGE_GROUPS,
        action="explore_groups",
        message=(
            "Explore the group view: compare classification rates and error "
            "rates across subgroups of the sensitive attributes."
        ),
    )


def record_response(
    session: Session,
    response: PairwiseResponse | GroupFairnessResponse,
    at: float | None = None,
) -> None:
    """Record an answer to a served, not-yet-answered question."""
    if session.closed:
        raise SessionClosedError(f"session {session.session_id!r} is closed")
    qid = response.question_id
    record = session._served.get(qid)
    if record is None:
        raise UnknownQuestionError(qid)
    if qid in session._answers:
        raise DuplicateResponseError(qid)
    allowed = PAIR_CHOICES if record.qtype == "pairwise" else GF_CHOICES
    if response.choice not in allowed:
        raise InvalidChoiceError("choice", response.choice, allowed)
    if response.rationale is not None and not isinstance(response.rationale, str):
        raise InvalidChoiceError("rationale", response.rationale, ("a string", "null"))

    session._answers[qid] = response.choice
    _append(
        session,
        "response",
        {
            "question_id": qid,
            "choice": response.choice,
            "rationale": response.rationale,
        },
        at,
    )


def record_exploration(
    session: Session,
    dataset: Dataset,
    kind: str,
    payload: dict[str, Any],
    at: float | None = None,
) -> None:
    """Record a stage-3 or stage-4 exploration event.

    ``weight_change`` and ``similarity_flag`` belong to stage 3, ``group_query``
    to stage 4; anything else is a stage violation.
    """
    if session.closed:
        raise SessionClosedError(f"session {session.session_id!r} is closed")
    if kind not in EXPLORATION_KINDS:
        raise InvalidChoiceError("kind", kind, EXPLORATION_KINDS)

    if kind in ("weight_change", "similarity_flag"):
        if session.stage != STAGE_SIMILARITY:
            raise WrongStageError(f"{kind} events belong to stage {STAGE_SIMILARITY}")
    else:
        if session.stage != STAGE_GROUPS:
            raise WrongStageError(f"{kind} events belong to stage {STAGE_GROUPS}")

    clean: dict[str, Any] = {"kind": kind}
    if kind == "weight_change":
        weights = payload.get("weights")
        if (
            not isinstance(weights, (list, tuple))
            or len(weights) != len(dataset.schema.features)
            or any(
                not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x) or x < 0
                for x in weights
            )
        ):
            raise InvalidChoiceError(
                "weights", weights, ("one finite non-negative number per schema feature",)
            )
        clean["weights"] = [float(x) for x in weights]
        if "reference" in payload and payload["reference"] is not None:
            _resolve_case(session, dataset, str(payload["reference"]))
            clean["reference"] = str(payload["reference"])
    elif kind == "similarity_flag":
        for key in ("case_a", "case_b"):
            cid = payload.get(key)
            if not isinstance(cid, str):
                raise InvalidChoiceError(key, cid, ("a case id",))
            _resolve_case(session, dataset, cid)
            clean[key] = cid
        if payload.get("note") is not None:
            clean["note"] = str(payload["note"])
    else:  # group_query
        attributes = payload.get("attributes")
        if not isinstance(attributes, (list, tuple)) or not 1 <= len(attributes) <= 2:
            raise InvalidChoiceError("attributes", attributes, ("one or two attribute names",))
        for attr in attributes:
            if not dataset.schema.has_feature(attr):
                raise UnknownAttributeError(attr)
        metric = payload.get("metric")
        if metric not in GROUP_VIEW_METRICS:
            raise InvalidChoiceError("metric", metric, GROUP_VIEW_METRICS)
        clean["attributes"] = [str(a) for a in attributes]
        clean["metric"] = metric

    _append(session, "exploration", clean, at)


def advance_stage(session: Session, at: float | None = None) -> None:
    """Move to the next stage; after stage 4 the session closes.

    Leaving stage 1 requires every fixed question to be answered.
    """
    if session.closed:
        raise SessionClosedError(f"session {session.session_id!r} is closed")
    if session.stage == STAGE_FIXED_QUESTIONS:
        unanswered = [
            r.question_id for r in session.stage1_queue if r.question_id not in session._answers
        ]
        if unanswered:
            raise WrongStageError(
                f"{len(unanswered)} stage-1 questions are still unanswered "
                f"(first: {unanswered[0]!r})"
            )

    ts = session.clock() if at is None else at
    if session.stage == STAGE_GROUPS:
        session.transcript.append(
            Event(
                kind="stage_advanced",
                stage=session.stage,
                timestamp=ts,
                payload={"from": STAGE_GROUPS, "to": "closed"},
            )
        )
        session.closed_at = ts
    else:
        new_stage = session.stage + 1
        session.transcript.append(
            Event(
                kind="stage_advanced",
                stage=session.stage,
                timestamp=ts,
                payload={"from": session.stage, "to": new_stage},
            )
        )
        session.stage = new_stage


def is_stage1_complete(session: Session) -> bool:
    return all(r.question_id in session._answers for r in session.stage1_queue)


def export_session(session: Session) -> dict[str, Any]:
    """Self-contained jsonable log: header, fixture cases, queue, transcript."""
    return {
        "format": SESSION_FORMAT,
        "version": SESSION_VERSION,
        "session": {
            "session_id": session.session_id,
            "participant": {
                "role": session.participant.role,
                "demographics": dict(session.participant.demographics),
            },
            "dataset_ref": session.dataset_ref,
            "seed": session.seed,
            "stage": session.stage,
            "created_at": session.created_at,
            "closed_at": session.closed_at,
            "fixture_cases": [
                case_to_jsonable(session.fixture_cases[cid])
                for cid in sorted(session.fixture_cases)
            ],
            "stage1_queue": [r.to_jsonable() for r in session.stage1_queue],
            "transcript": [
                {
                    "kind": e.kind,
                    "stage": e.stage,
                    "timestamp": e.timestamp,
                    "payload": e.payload,
                }
                for e in session.transcript
            ],
        },
    }


def export_session_json(session: Session) -> str:
    return canonical_json(export_session(session))


def import_session(obj: dict[str, Any], clock: Clock | None = None) -> Session:
    """Rebuild a session (including derived bookkeeping) from an exported log."""
    if not isinstance(obj, dict) or obj.get("format") != SESSION_FORMAT:
        raise SchemaError("not a session log")
    if obj.get("version") != SESSION_VERSION:
        raise SchemaError(f"unsupported session log version {obj.get('version')!r}")
    body = obj.get("session")
    if not isinstance(body, dict):
        raise SchemaError("session log has no 'session' object")

    participant_raw = body.get("participant") or {}
    participant = ParticipantProfile(
        role=participant_raw.get("role", ""),
        demographics=dict(participant_raw.get("demographics", {})),
    )
    if participant.role not in ROLES:
        raise InvalidChoiceError("role", participant.role, ROLES)

    session = Session(
        session_id=str(body["session_id"]),
        participant=participant,
        dataset_ref=str(body.get("dataset_ref", "")),
        seed=int(body["seed"]),
        stage=int(body.get("stage", STAGE_FIXED_QUESTIONS)),
        created_at=body.get("created_at", 0),
        closed_at=body.get("closed_at"),
        clock=clock or time.time,
    )
    for raw in body.get("fixture_cases", []):
        case = case_from_jsonable(raw)
        session.fixture_cases[case.id] = case
    session.stage1_queue = [
        _QuestionRecord.from_jsonable(raw) for raw in body.get("stage1_queue", [])
    ]
    for raw in body.get("transcript", []):
        event = Event(
            kind=raw["kind"],
            stage=int(raw["stage"]),
            timestamp=raw["timestamp"],
            payload=dict(raw["payload"]),
        )
        session.transcript.append(event)
        if event.kind == "question_served":
            record = _QuestionRecord.from_jsonable(event.payload["question"])
            session._served[record.question_id] = record
            if record.source == "random":
                session._stage2_count += 1
        elif event.kind == "response":
            session._answers[event.payload["question_id"]] = event.payload["choice"]
    return session


def replay_session(
    log: dict[str, Any],
    dataset: Dataset,
) -> Session:
    """Re-drive a recorded session through the state machine from scratch.

    Every recorded event is re-applied in order with its recorded timestamp;
    served questions must come back identical (same ids, same sampled pairs),
    otherwise the log is inconsistent with the protocol and a
    :class:`SchemaMismatchError` is raised.  The replayed session exports
    byte-identically to the input log.
    """
    source = import_session(log)
    fresh = dict(log)
    fresh["session"] = dict(log["session"])
    fresh["session"]["transcript"] = []
    fresh["session"]["stage"] = STAGE_FIXED_QUESTIONS
    fresh["session"]["closed_at"] = None
    session = import_session(fresh)

    for event in source.transcript:
        at = event.timestamp
        if event.kind == "question_served":
            recorded = _QuestionRecord.from_jsonable(event.payload["question"])
            served = next_question(session, dataset, at=at)
            if isinstance(served, StagePrompt):
                raise SchemaMismatchError(
                    f"replay expected question {recorded.question_id!r}, got a stage prompt"
                )
            if session._served[served.question_id] != recorded:
                raise SchemaMismatchError(
                    f"replay served a different question than recorded "
                    f"({served.question_id!r} vs {recorded.question_id!r})"
                )
        elif event.kind == "response":
            record = session._served.get(event.payload["question_id"])
            cls = (
                PairwiseResponse
                if record is not None and record.qtype == "pairwise"
                else GroupFairnessResponse
            )
            record_response(
                session,
                cls(
                    question_id=event.payload["question_id"],
                    choice=event.payload["choice"],
                    rationale=event.payload.get("rationale"),
                ),
                at=at,
            )
        elif event.kind == "exploration":
            payload = dict(event.payload)
            kind = payload.pop("kind")
            record_exploration(session, dataset, kind, payload, at=at)
        elif event.kind == "stage_advanced":
            advance_stage(session, at=at)
        else:
            raise SchemaError(f"unknown transcript event kind {event.kind!r}")

    if export_session(session) != export_session(source):
        raise SchemaMismatchError("replayed session does not reproduce the recorded log")
    return session


def question_to_jsonable(
    question: PairwiseQuestion | GroupFairnessQuestion | StagePrompt,
) -> dict[str, Any]:
    """Wire form of a served question, with case payloads for rendering."""
    if isinstance(question, StagePrompt):
        return {
            "type": "stage_prompt",
            "stage": question.stage,
            "action": question.action,
            "message": question.message,
        }
    if isinstance(question, PairwiseQuestion):
        def case_payload(case: Case) -> dict[str, Any]:
            payload = {"id": case.id, "values": dict(case.values)}
            payload["prediction"] = case.prediction if question.show_predictions else None
            return payload

        return {
            "type": "pairwise",
            "id": question.question_id,
            "case_a": case_payload(question.case_a),
            "case_b": case_payload(question.case_b),
            "show_predictions": question.show_predictions,
            "source": question.source,
            "pair_index": question.pair_index,
            "choices": list(PAIR_CHOICES),
        }
    return {
        "type": "group_fairness",
        "id": question.question_id,
        "attribute": question.attribute,
        "criterion": question.criterion,
        "text": question.text,
        "choices": list(GF_CHOICES),
    }
