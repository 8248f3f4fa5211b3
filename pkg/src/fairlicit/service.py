"""HTTP JSON API over a file-backed store.

Every artifact lives as one canonical-JSON file under the store root
(datasets/, sessions/, models/, reports/); the service keeps no other state,
so restarting it — or pointing the CLI at the same directory — sees exactly
the same world.  Writes go through write-temp-then-rename, and per-session
mutations are serialized by an in-process lock.
"""

from __future__ import annotations

import argparse
import json
import os
import threading
import uuid
from collections import defaultdict
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware

from . import analysis, elicitation, metrics, similarity, training
from .bundled import load_default_schema
from .data import (
    dataset_from_jsonable,
    dataset_to_jsonable,
    generate_synthetic,
    schema_from_jsonable,
)
from .errors import (
    FairlicitError,
    InvalidChoiceError,
    InvalidWeightsError,
    SchemaError,
    UnknownDatasetError,
    UnknownModelError,
    UnknownSessionError,
)
from .serialize import canonical_json

DEFAULT_STORE = "fairlicit-store"

STATUS_BY_CODE = {
    "SchemaError": 400,
    "ValueError": 400,
    "DuplicateId": 400,
    "BadMarginals": 400,
    "InvalidWeights": 400,
    "InvalidChoice": 400,
    "UnknownAttribute": 400,
    "SchemaMismatch": 400,
    "EmptyMatrix": 400,
    "NoAnswers": 400,
    "EmptyDataset": 400,
    "UnknownDataset": 404,
    "UnknownSession": 404,
    "UnknownModel": 404,
    "UnknownCase": 404,
    "UnknownQuestion": 404,
    "MissingPredictions": 409,
    "MissingLabels": 409,
    "WrongStage": 409,
    "DuplicateResponse": 409,
    "SessionClosed": 409,
    "NonFinite": 422,
}

KINDS = ("datasets", "sessions", "models", "reports")


class Store:
    """Directory of canonical-JSON artifacts, one file per id."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        for kind in KINDS:
            (self.root / kind).mkdir(parents=True, exist_ok=True)

    def path(self, kind: str, item_id: str) -> Path:
        return self.root / kind / f"{item_id}.json"

    def write(self, kind: str, item_id: str, payload: Any) -> None:
        target = self.path(kind, item_id)
        temp = target.with_name(f".{target.name}.tmp")
        temp.write_text(canonical_json(payload), encoding="utf-8")
        os.replace(temp, target)

    def read(self, kind: str, item_id: str) -> Any | None:
        target = self.path(kind, item_id)
        if not target.is_file():
            return None
        return json.loads(target.read_text(encoding="utf-8"))

    def list_ids(self, kind: str) -> list[str]:
        return sorted(p.stem for p in (self.root / kind).glob("*.json"))


def _json_response(payload: Any, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _new_id() -> str:
    return uuid.uuid4().hex[:12]


def create_app(store_dir: str | Path, epsilon_default: float = metrics.DEFAULT_EPSILON) -> FastAPI:
    app = FastAPI(title="fairlicit", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = Store(store_dir)
    app.state.store = store
    app.state.epsilon_default = epsilon_default
    session_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
    locks_guard = threading.Lock()

    def session_lock(session_id: str) -> threading.Lock:
        with locks_guard:
            return session_locks[session_id]

    @app.exception_handler(FairlicitError)
    async def handle_module_error(request: Request, exc: FairlicitError) -> Response:
        status = STATUS_BY_CODE.get(exc.code, 400)
        return _json_response({"error": exc.code, "detail": str(exc)}, status)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError) -> Response:
        return _json_response({"error": "SchemaError", "detail": "malformed request"}, 400)

    async def read_body(request: Request) -> dict[str, Any]:
        try:
            body = await request.json()
        except json.JSONDecodeError as exc:
            raise SchemaError(f"request body is not valid JSON: {exc}") from None
        if not isinstance(body, dict):
            raise SchemaError("request body must be a JSON object")
        return body

    def load_dataset_or_404(dataset_id: str):
        raw = store.read("datasets", dataset_id)
        if raw is None:
            raise UnknownDatasetError(dataset_id)
        return dataset_from_jsonable(raw)

    def load_session_or_404(session_id: str) -> elicitation.Session:
        raw = store.read("sessions", session_id)
        if raw is None:
            raise UnknownSessionError(session_id)
        return elicitation.import_session(raw)

    def save_session(session: elicitation.Session) -> None:
        store.write("sessions", session.session_id, elicitation.export_session(session))

    def parse_epsilon(request: Request) -> float:
        text = request.query_params.get("epsilon")
        if text is None or text == "":
            return app.state.epsilon_default
        try:
            value = float(text)
        except ValueError:
            raise InvalidChoiceError("epsilon", text, ("a decimal number",)) from None
        if not 0.0 <= value <= 1.0:
            raise InvalidChoiceError("epsilon", value, ("a number in [0, 1]",))
        return value

    def parse_weights(request: Request) -> list[float] | None:
        text = request.query_params.get("weights")
        if text is None or text == "":
            return None
        try:
            return [float(part) for part in text.split(",")]
        except ValueError:
            raise InvalidWeightsError(f"malformed weights {text!r}") from None

    # ------------------------------------------------------------------ data

    @app.get("/datasets")
    async def list_datasets() -> Response:
        entries = []
        for dataset_id in store.list_ids("datasets"):
            raw = store.read("datasets", dataset_id)
            entries.append(
                {
                    "id": dataset_id,
                    "provenance": raw.get("provenance"),
                    "threshold": raw.get("threshold"),
                    "n_cases": len(raw.get("cases", [])),
                }
            )
        return _json_response({"datasets": entries})

    @app.post("/datasets")
    async def import_dataset(request: Request) -> Response:
        body = await read_body(request)
        dataset = dataset_from_jsonable(body)
        dataset_id = _new_id()
        store.write("datasets", dataset_id, dataset_to_jsonable(dataset))
        return _json_response({"id": dataset_id}, 201)

    @app.post("/datasets/synthetic")
    async def synthesize_dataset(request: Request) -> Response:
        body = await read_body(request)
        schema = (
            schema_from_jsonable(body["schema"]) if "schema" in body else load_default_schema()
        )
        n = body.get("n")
        seed = body.get("seed")
        if not isinstance(n, int) or isinstance(n, bool):
            raise InvalidChoiceError("n", n, ("an integer",))
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise InvalidChoiceError("seed", seed, ("an integer",))
        dataset = generate_synthetic(
            schema,
            n=n,
            seed=seed,
            marginals=body.get("marginals"),
            threshold=body.get("threshold", 0.5),
        )
        dataset_id = _new_id()
        store.write("datasets", dataset_id, dataset_to_jsonable(dataset))
        return _json_response({"id": dataset_id}, 201)

    @app.get("/datasets/{dataset_id}")
    async def get_dataset(dataset_id: str) -> Response:
        raw = store.read("datasets", dataset_id)
        if raw is None:
            raise UnknownDatasetError(dataset_id)
        return _json_response(raw)

    # --------------------------------------------------------------- metrics

    CRITERION_FOR_METRIC = {
        "positive_rate": "statistical_parity",
        "fpr": "equalized_odds",
        "fnr": "equalized_odds",
    }

    @app.get("/datasets/{dataset_id}/metrics")
    async def dataset_metrics(dataset_id: str, request: Request) -> Response:
        dataset = load_dataset_or_404(dataset_id)
        attribute = request.query_params.get("attribute")
        if not attribute:
            raise InvalidChoiceError("attribute", attribute, ("a schema feature name",))
        attribute2 = request.query_params.get("attribute2") or None
        metric = request.query_params.get("metric") or "positive_rate"
        epsilon = parse_epsilon(request)

        attrs = [attribute] if attribute2 is None else [attribute, attribute2]
        view = metrics.group_view_summary(dataset, attrs, metric)
        fairness = None
        criterion = CRITERION_FOR_METRIC.get(metric)
        if attribute2 is None and criterion is not None:
            report = metrics.fairness_report(dataset, attribute, criterion, epsilon)
            fairness = metrics.report_to_jsonable(report)
        return _json_response(
            {"view": metrics.group_view_to_jsonable(view), "fairness": fairness}
        )

    @app.get("/datasets/{dataset_id}/fairness")
    async def dataset_fairness(dataset_id: str, request: Request) -> Response:
        dataset = load_dataset_or_404(dataset_id)
        criterion = request.query_params.get("criterion") or ""
        attribute = request.query_params.get("attribute") or ""
        epsilon = parse_epsilon(request)
        report = metrics.fairness_report(dataset, attribute, criterion, epsilon)
        return _json_response(metrics.report_to_jsonable(report))

    @app.get("/datasets/{dataset_id}/similarity")
    async def dataset_similarity(dataset_id: str, request: Request) -> Response:
        dataset = load_dataset_or_404(dataset_id)
        reference = request.query_params.get("reference") or ""
        weights = parse_weights(request)
        ranking = similarity.rank_by_similarity(dataset, reference, weights)
        return _json_response(similarity.ranking_to_jsonable(ranking))

    @app.get("/datasets/{dataset_id}/discordant")
    async def dataset_discordant(dataset_id: str, request: Request) -> Response:
        dataset = load_dataset_or_404(dataset_id)
        weights = parse_weights(request)
        k_text = request.query_params.get("k")
        if k_text is None or k_text == "":
            k = 10
        else:
            try:
                k = int(k_text)
            except ValueError:
                raise InvalidChoiceError("k", k_text, ("an integer >= 1",)) from None
        pairs = similarity.nearest_discordant_pairs(dataset, weights, k)
        return _json_response(similarity.pairs_to_jsonable(pairs))

    # -------------------------------------------------------------- sessions

    @app.post("/sessions")
    async def create_session(request: Request) -> Response:
        body = await read_body(request)
        dataset_id = body.get("dataset")
        if not isinstance(dataset_id, str) or not dataset_id:
            raise InvalidChoiceError("dataset", dataset_id, ("a dataset id",))
        dataset = load_dataset_or_404(dataset_id)
        participant_raw = body.get("participant") or {}
        participant = elicitation.ParticipantProfile(
            role=participant_raw.get("role", ""),
            demographics={
                str(k): str(v) for k, v in (participant_raw.get("demographics") or {}).items()
            },
        )
        seed = body.get("seed")
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise InvalidChoiceError("seed", seed, ("an integer",))
        session_id = body.get("session_id") or _new_id()
        if store.read("sessions", session_id) is not None:
            raise InvalidChoiceError("session_id", session_id, ("an unused session id",))
        session = elicitation.start_session(
            participant,
            dataset,
            seed=seed,
            dataset_ref=dataset_id,
            session_id=session_id,
        )
        save_session(session)
        return _json_response({"id": session.session_id, "stage": session.stage}, 201)

    @app.get("/sessions/{session_id}/next")
    async def session_next(session_id: str) -> Response:
        with session_lock(session_id):
            session = load_session_or_404(session_id)
            dataset = load_dataset_or_404(session.dataset_ref)
            question = elicitation.next_question(session, dataset)
            save_session(session)
        return _json_response(elicitation.question_to_jsonable(question))

    @app.post("/sessions/{session_id}/responses")
    async def session_respond(session_id: str, request: Request) -> Response:
        body = await read_body(request)
        with session_lock(session_id):
            session = load_session_or_404(session_id)
            response = elicitation.PairwiseResponse(
                question_id=str(body.get("question_id", "")),
                choice=body.get("choice"),
                rationale=body.get("rationale"),
            )
            elicitation.record_response(session, response)
            save_session(session)
            return _json_response(
                {"recorded": response.question_id, "stage": session.stage}
            )

    @app.post("/sessions/{session_id}/events")
    async def session_event(session_id: str, request: Request) -> Response:
        body = await read_body(request)
        kind = body.pop("kind", None)
        with session_lock(session_id):
            session = load_session_or_404(session_id)
            dataset = load_dataset_or_404(session.dataset_ref)
            elicitation.record_exploration(session, dataset, kind, body)
            save_session(session)
            return _json_response({"recorded": kind, "stage": session.stage})

    @app.post("/sessions/{session_id}/advance")
    async def session_advance(session_id: str) -> Response:
        with session_lock(session_id):
            session = load_session_or_404(session_id)
            elicitation.advance_stage(session)
            save_session(session)
            return _json_response({"stage": session.stage, "closed": session.closed})

    @app.get("/sessions/{session_id}/export")
    async def session_export(session_id: str) -> Response:
        raw = store.read("sessions", session_id)
        if raw is None:
            raise UnknownSessionError(session_id)
        return _json_response(raw)

    # -------------------------------------------------- analysis and training

    @app.get("/analysis/summary")
    async def analysis_summary(request: Request) -> Response:
        sessions_param = request.query_params.get("sessions")
        if not sessions_param:
            raise InvalidChoiceError("sessions", sessions_param, ("comma-separated session ids",))
        logs = []
        for session_id in sessions_param.split(","):
            raw = store.read("sessions", session_id)
            if raw is None:
                raise UnknownSessionError(session_id)
            logs.append(raw)
        matrix = analysis.matrix_from_sessions(logs)
        summary = analysis.consensus_summary(matrix)
        return _json_response(analysis.summary_to_jsonable(summary))

    @app.post("/train")
    async def train_model(request: Request) -> Response:
        body = await read_body(request)
        dataset_id = body.get("dataset")
        if not isinstance(dataset_id, str) or not dataset_id:
            raise InvalidChoiceError("dataset", dataset_id, ("a dataset id",))
        dataset = load_dataset_or_404(dataset_id)
        session_ids = body.get("sessions")
        if not isinstance(session_ids, list) or not session_ids:
            raise InvalidChoiceError("sessions", session_ids, ("a non-empty list of session ids",))
        responses: list[tuple[str, str, str]] = []
        for session_id in session_ids:
            session = load_session_or_404(str(session_id))
            responses.extend(pairwise_responses(session))
        policy = body.get("policy", "borda_aggregate")
        config = training.config_from_jsonable(body.get("config", {}))
        constraints = training.derive_constraints(
            responses, policy=policy, margin=config.margin
        )
        model, report = training.train(dataset, constraints, config)
        model_id = _new_id()
        store.write("models", model_id, training.model_to_jsonable(model))
        store.write("reports", model_id, training.report_to_jsonable(report))
        return _json_response({"model": model_id}, 201)

    @app.get("/models/{model_id}/report")
    async def model_report(model_id: str) -> Response:
        raw = store.read("reports", model_id)
        if raw is None:
            raise UnknownModelError(model_id)
        return _json_response(raw)

    return app


def pairwise_responses(session: elicitation.Session) -> list[tuple[str, str, str]]:
    """All recorded pairwise (case_a, case_b, choice) triples of a session."""
    records = {}
    for event in session.transcript:
        if event.kind == "question_served":
            question = event.payload["question"]
            if question.get("type") == "pairwise":
                records[question["id"]] = (question["case_a"], question["case_b"])
    triples = []
    for event in session.transcript:
        if event.kind == "response":
            qid = event.payload["question_id"]
            if qid in records:
                case_a, case_b = records[qid]
                triples.append((case_a, case_b, event.payload["choice"]))
    return triples


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(prog="fairlicit-service")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument(
        "--store-dir",
        default=os.environ.get("FAIRLICIT_STORE", DEFAULT_STORE),
        help="artifact store directory (or set FAIRLICIT_STORE)",
    )
    parser.add_argument("--epsilon-default", type=float, default=metrics.DEFAULT_EPSILON)
    args = parser.parse_args(argv)

    import uvicorn

    uvicorn.run(
        create_app(args.store_dir, args.epsilon_default), host=args.host, port=args.port
    )


if __name__ == "__main__":
    main()
