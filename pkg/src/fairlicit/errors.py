"""Shared error types.

Every error that can cross a process boundary (CLI stderr, HTTP body) carries a
stable ``code`` string so callers can match on it without parsing prose.
"""

from __future__ import annotations


class FairlicitError(Exception):
    """Base class for all platform errors."""

    code = "Error"


class SchemaError(FairlicitError):
    code = "SchemaError"


class CellValueError(FairlicitError):
    """A single cell failed validation.

    ``row`` is the zero-based data-row index (None when the value did not come
    from a tabular file) and ``column`` is the offending field name.
    """

    code = "ValueError"

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class DuplicateIdError(FairlicitError):
    code = "DuplicateId"

    def __init__(self, case_id: str):
        super().__init__(f"duplicate case id: {case_id!r}")
        self.case_id = case_id


class BadMarginalsError(FairlicitError):
    code = "BadMarginals"

    def __init__(self, feature: str, message: str):
        super().__init__(f"bad marginals for feature {feature!r}: {message}")
        self.feature = feature


class UnknownAttributeError(FairlicitError):
    code = "UnknownAttribute"

    def __init__(self, attribute: str):
        super().__init__(f"unknown attribute: {attribute!r}")
        self.attribute = attribute


class UnknownCaseError(FairlicitError):
    code = "UnknownCase"

    def __init__(self, case_id: str):
        super().__init__(f"unknown case id: {case_id!r}")
        self.case_id = case_id


class UnknownDatasetError(FairlicitError):
    code = "UnknownDataset"

    def __init__(self, dataset_id: str):
        super().__init__(f"unknown dataset: {dataset_id!r}")
        self.dataset_id = dataset_id


class UnknownSessionError(FairlicitError):
    code = "UnknownSession"

    def __init__(self, session_id: str):
        super().__init__(f"unknown session: {session_id!r}")
        self.session_id = session_id


class UnknownModelError(FairlicitError):
    code = "UnknownModel"

    def __init__(self, model_id: str):
        super().__init__(f"unknown model: {model_id!r}")
        self.model_id = model_id


class UnknownQuestionError(FairlicitError):
    code = "UnknownQuestion"

    def __init__(self, question_id: str):
        super().__init__(f"unknown question: {question_id!r}")
        self.question_id = question_id


class MissingPredictionsError(FairlicitError):
    code = "MissingPredictions"


class MissingLabelsError(FairlicitError):
    code = "MissingLabels"


class SchemaMismatchError(FairlicitError):
    code = "SchemaMismatch"


class InvalidWeightsError(FairlicitError):
    code = "InvalidWeights"


class InvalidChoiceError(FairlicitError):
    """A value fell outside a closed enumeration; names the offending field."""

    code = "InvalidChoice"

    def __init__(self, field: str, value: object, allowed: tuple[str, ...]):
        super().__init__(
            f"invalid value for {field!r}: {value!r} (allowed: {', '.join(allowed)})"
        )
        self.field = field
        self.value = value
        self.allowed = allowed


class SessionClosedError(FairlicitError):
    code = "SessionClosed"


class DuplicateResponseError(FairlicitError):
    code = "DuplicateResponse"

    def __init__(self, question_id: str):
        super().__init__(f"question already answered: {question_id!r}")
        self.question_id = question_id


class WrongStageError(FairlicitError):
    code = "WrongStage"


class EmptyMatrixError(FairlicitError):
    code = "EmptyMatrix"


class NoAnswersError(FairlicitError):
    code = "NoAnswers"


class EmptyDatasetError(FairlicitError):
    code = "EmptyDataset"


class NonFiniteError(FairlicitError):
    code = "NonFinite"
