"""Constraint-aware logistic scoring models.

Pairwise judgments become soft ordering constraints on the score; group
fairness preferences become penalty terms; unawareness answers become hard
feature exclusions.  The loss is

    L = mean cross-entropy
      + L2 * ||coefficients||^2
      + lambda_pair  * sum_strict weight * max(0, margin - (s_hi - s_lo))^2
      + lambda_pair  * sum_equal  weight * (s_a - s_b)^2
      + lambda_parity * sum_attr sum_{g<h} (mean_g(s) - mean_h(s))^2
      + lambda_odds   * sum_attr sum_{g<h} [(fpr~_g - fpr~_h)^2 + (fnr~_g - fnr~_h)^2]

where fpr~ and fnr~ are smoothed rates: mean score over truly-low members and
mean (1 - score) over truly-high members.  Hard-prediction gaps are
non-differentiable, so training optimizes these mean-score proxies while
reports show both.  Optimization is plain seeded gradient descent with a
fixed step schedule: slower than fancy optimizers, but bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .data import Case, Dataset, HIGH, binarize, schema_from_jsonable, schema_to_jsonable
from .errors import (
    EmptyDatasetError,
    InvalidChoiceError,
    MissingLabelsError,
    NonFiniteError,
    SchemaError,
    SchemaMismatchError,
    UnknownAttributeError,
    UnknownCaseError,
)
from .metrics import (
    DEFAULT_EPSILON,
    equalized_odds_report,
    statistical_parity_report,
)
from .similarity import CaseEncoder

POLICIES = ("per_participant", "borda_aggregate")


@dataclass(frozen=True)
class PairConstraint:
    """One soft constraint on two cases' scores.

    strict: score(hi) should exceed score(lo) by at least ``margin``.
    equal: score(a) and score(b) should coincide.
    """

    kind: str
    hi: str | None = None
    lo: str | None = None
    a: str | None = None
    b: str | None = None
    margin: float = 0.0
    weight: float = 1.0


def strict_constraint(hi: str, lo: str, margin: float = 0.1, weight: float = 1.0) -> PairConstraint:
    return PairConstraint(kind="strict", hi=hi, lo=lo, margin=margin, weight=weight)


def equal_constraint(a: str, b: str, weight: float = 1.0) -> PairConstraint:
    return PairConstraint(kind="equal", a=a, b=b, weight=weight)


def _validate_constraint(c: PairConstraint) -> None:
    if c.kind not in ("strict", "equal"):
        raise InvalidChoiceError("kind", c.kind, ("strict", "equal"))
    if not math.isfinite(c.margin) or c.margin < 0:
        raise InvalidChoiceError("margin", c.margin, ("a finite number >= 0",))
    if not math.isfinite(c.weight) or c.weight < 0:
        raise InvalidChoiceError("weight", c.weight, ("a finite number >= 0",))
    if c.kind == "strict":
        if not c.hi or not c.lo or c.hi == c.lo:
            raise InvalidChoiceError("hi/lo", (c.hi, c.lo), ("two distinct case ids",))
    else:
        if not c.a or not c.b:
            raise InvalidChoiceError("a/b", (c.a, c.b), ("two case ids",))


@dataclass(frozen=True)
class TrainingConfig:
    lambda_pair: float = 1.0
    lambda_parity: float = 0.0
    lambda_odds: float = 0.0
    margin: float = 0.1
    l2: float = 1e-3
    excluded_attributes: tuple[str, ...] = ()
    seed: int = 0
    learning_rate: float = 0.3
    decay: float = 0.0
    max_iterations: int = 5000
    tolerance: float = 1e-9
    init_scale: float = 0.01


def config_to_jsonable(config: TrainingConfig) -> dict[str, Any]:
    return {
        "lambda_pair": config.lambda_pair,
        "lambda_parity": config.lambda_parity,
        "lambda_odds": config.lambda_odds,
        "margin": config.margin,
        "l2": config.l2,
        "excluded_attributes": list(config.excluded_attributes),
        "seed": config.seed,
        "learning_rate": config.learning_rate,
        "decay": config.decay,
        "max_iterations": config.max_iterations,
        "tolerance": config.tolerance,
        "init_scale": config.init_scale,
    }


def config_from_jsonable(obj: Mapping[str, Any]) -> TrainingConfig:
    known = {f for f in TrainingConfig.__dataclass_fields__}
    unknown = set(obj) - known
    if unknown:
        raise SchemaError(f"unknown training config fields: {sorted(unknown)}")
    kwargs = dict(obj)
    if "excluded_attributes" in kwargs:
        kwargs["excluded_attributes"] = tuple(kwargs["excluded_attributes"])
    return TrainingConfig(**kwargs)


@dataclass
class TrainingProblem:
    """Numeric form of one training job: arrays, constraint indices, groups."""

    X: np.ndarray
    y: np.ndarray
    strict: list[tuple[int, int, float, float]]  # (hi_idx, lo_idx, margin, weight)
    equal: list[tuple[int, int, float]]  # (a_idx, b_idx, weight)
    groups: dict[str, list[np.ndarray]]  # attr -> populated subgroup index arrays
    lambda_pair: float
    lambda_parity: float
    lambda_odds: float
    l2: float

    @property
    def n_parameters(self) -> int:
        return self.X.shape[1] + 1


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return np.exp(-np.logaddexp(0.0, -z))


def build_problem(
    dataset: Dataset, constraints: Sequence[PairConstraint], config: TrainingConfig
) -> tuple[TrainingProblem, CaseEncoder]:
    if not dataset.cases:
        raise EmptyDatasetError("cannot train on an empty dataset")
    for case in dataset.cases:
        if case.true_label is None:
            raise MissingLabelsError(f"case {case.id!r} has no true label")
    encoder = CaseEncoder(exclude=tuple(config.excluded_attributes)).fit(dataset.schema)

    X = encoder.transform(dataset.cases)
    y = np.array([1.0 if c.true_label == HIGH else 0.0 for c in dataset.cases])
    index = {c.id: i for i, c in enumerate(dataset.cases)}

    strict: list[tuple[int, int, float, float]] = []
    equal: list[tuple[int, int, float]] = []
    for c in constraints:
        _validate_constraint(c)
        ids = (c.hi, c.lo) if c.kind == "strict" else (c.a, c.b)
        for cid in ids:
            if cid not in index:
                raise UnknownCaseError(cid)
        if c.kind == "strict":
            strict.append((index[c.hi], index[c.lo], c.margin, c.weight))
        else:
            equal.append((index[c.a], index[c.b], c.weight))

    groups: dict[str, list[np.ndarray]] = {}
    for attr in dataset.schema.sensitive_attributes:
        feature = dataset.schema.feature(attr)
        members = []
        for value in feature.values:
            idx = np.array(
                [i for i, c in enumerate(dataset.cases) if c.values[attr] == value], dtype=int
            )
            if len(idx):
                members.append(idx)
        groups[attr] = members

    problem = TrainingProblem(
        X=X,
        y=y,
        strict=strict,
        equal=equal,
        groups=groups,
        lambda_pair=config.lambda_pair,
        lambda_parity=config.lambda_parity,
        lambda_odds=config.lambda_odds,
        l2=config.l2,
    )
    return problem, encoder


def objective_terms(problem: TrainingProblem, theta: np.ndarray) -> dict[str, float]:
    """The loss, term by term (unweighted by their lambdas where noted)."""
    w = theta[:-1]
    b = theta[-1]
    z = problem.X @ w + b
    s = _sigmoid(z)
    n = len(z)

    cross_entropy = float(np.mean(np.logaddexp(0.0, z) - problem.y * z)) if n else 0.0
    l2_term = float(problem.l2 * (w @ w))

    pair_strict = 0.0
    for hi, lo, margin, weight in problem.strict:
        violation = max(0.0, margin - (s[hi] - s[lo]))
        pair_strict += weight * violation * violation
    pair_equal = 0.0
    for a_idx, b_idx, weight in problem.equal:
        diff = s[a_idx] - s[b_idx]
        pair_equal += weight * diff * diff

    parity = 0.0
    odds = 0.0
    for attr, members in problem.groups.items():
        means = [float(s[idx].mean()) for idx in members]
        for i in range(len(means)):
            for j in range(i + 1, len(means)):
                d = means[i] - means[j]
                parity += d * d
        for label_value in (0.0, 1.0):
            subset_means = []
            for idx in members:
                sub = idx[problem.y[idx] == label_value]
                if len(sub):
                    subset_means.append(float(s[sub].mean()))
            for i in range(len(subset_means)):
                for j in range(i + 1, len(subset_means)):
                    d = subset_means[i] - subset_means[j]
                    odds += d * d

    return {
        "cross_entropy": cross_entropy,
        "l2": l2_term,
        "pair_strict": problem.lambda_pair * pair_strict,
        "pair_equal": problem.lambda_pair * pair_equal,
        "parity": problem.lambda_parity * parity,
        "odds": problem.lambda_odds * odds,
    }


def objective(problem: TrainingProblem, theta: np.ndarray) -> float:
    return float(sum(objective_terms(problem, theta).values()))


def gradient(problem: TrainingProblem, theta: np.ndarray) -> np.ndarray:
    """Analytic gradient of the full loss at ``theta``."""
    if not np.all(np.isfinite(theta)):
        raise NonFiniteError("parameters are not finite")
    w = theta[:-1]
    b = theta[-1]
    z = problem.X @ w + b
    s = _sigmoid(z)
    sp = s * (1.0 - s)
    n = len(z)

    dz = (s - problem.y) / n if n else np.zeros(0)

    for hi, lo, margin, weight in problem.strict:
        violation = margin - (s[hi] - s[lo])
        if violation > 0.0:
            scale = 2.0 * problem.lambda_pair * weight * violation
            dz[hi] -= scale * sp[hi]
            dz[lo] += scale * sp[lo]
    for a_idx, b_idx, weight in problem.equal:
        scale = 2.0 * problem.lambda_pair * weight * (s[a_idx] - s[b_idx])
        dz[a_idx] += scale * sp[a_idx]
        dz[b_idx] -= scale * sp[b_idx]

    for attr, members in problem.groups.items():
        means = [float(s[idx].mean()) for idx in members]
        for g, idx in enumerate(members):
            pull = sum(2.0 * (means[g] - means[h]) for h in range(len(means)) if h != g)
            if pull:
                dz[idx] += problem.lambda_parity * pull * sp[idx] / len(idx)
        for label_value in (0.0, 1.0):
            subsets = []
            for idx in members:
                sub = idx[problem.y[idx] == label_value]
                if len(sub):
                    subsets.append(sub)
            sub_means = [float(s[sub].mean()) for sub in subsets]
            for g, sub in enumerate(subsets):
                pull = sum(
                    2.0 * (sub_means[g] - sub_means[h]) for h in range(len(sub_means)) if h != g
                )
                if pull:
                    dz[sub] += problem.lambda_odds * pull * sp[sub] / len(sub)

    grad_w = problem.X.T @ dz + 2.0 * problem.l2 * w
    grad_b = float(dz.sum())
    return np.concatenate([grad_w, [grad_b]])


class ConstrainedLogistic(BaseEstimator):
    """Gradient-descent logistic regression with pairwise and group penalties.

    Operates on encoded arrays; :func:`train` wraps it with the dataset-level
    plumbing.  Deterministic: equal (problem, config) give equal parameters.
    """

    def __init__(
        self,
        lambda_pair: float = 1.0,
        lambda_parity: float = 0.0,
        lambda_odds: float = 0.0,
        l2: float = 1e-3,
        seed: int = 0,
        learning_rate: float = 0.3,
        decay: float = 0.0,
        max_iterations: int = 5000,
        tolerance: float = 1e-9,
        init_scale: float = 0.01,
    ):
        self.lambda_pair = lambda_pair
        self.lambda_parity = lambda_parity
        self.lambda_odds = lambda_odds
        self.l2 = l2
        self.seed = seed
        self.learning_rate = learning_rate
        self.decay = decay
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self.init_scale = init_scale

    def fit(
        self,
        X: np.ndarray,
        y: np.ndarray,
        strict: Sequence[tuple[int, int, float, float]] = (),
        equal: Sequence[tuple[int, int, float]] = (),
        groups: Mapping[str, list[np.ndarray]] | None = None,
    ) -> "ConstrainedLogistic":
        problem = TrainingProblem(
            X=np.asarray(X, dtype=float),
            y=np.asarray(y, dtype=float),
            strict=list(strict),
            equal=list(equal),
            groups=dict(groups or {}),
            lambda_pair=self.lambda_pair,
            lambda_parity=self.lambda_parity,
            lambda_odds=self.lambda_odds,
            l2=self.l2,
        )
        theta, diagnostics = _descend(
            problem,
            seed=self.seed,
            learning_rate=self.learning_rate,
            decay=self.decay,
            max_iterations=self.max_iterations,
            tolerance=self.tolerance,
            init_scale=self.init_scale,
        )
        self.coef_ = theta[:-1]
        self.intercept_ = float(theta[-1])
        self.n_iter_ = diagnostics["iterations"]
        self.converged_ = diagnostics["converged"]
        self.final_grad_norm_ = diagnostics["grad_norm"]
        return self

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(np.asarray(X, dtype=float) @ self.coef_ + self.intercept_)

    def predict(self, X: np.ndarray, threshold: float = 0.5) -> np.ndarray:
        return (self.decision_scores(X) >= threshold).astype(int)


def _descend(
    problem: TrainingProblem,
    seed: int,
    learning_rate: float,
    decay: float,
    max_iterations: int,
    tolerance: float,
    init_scale: float,
) -> tuple[np.ndarray, dict[str, Any]]:
    rng = np.random.default_rng(seed)
    theta = np.concatenate([rng.normal(0.0, init_scale, size=problem.X.shape[1]), [0.0]])

    grad_norm = math.inf
    iterations = 0
    converged = False
    for t in range(max_iterations):
        g = gradient(problem, theta)
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"gradient diverged at iteration {t}")
        grad_norm = float(np.max(np.abs(g)))
        iterations = t
        if grad_norm < tolerance:
            converged = True
            break
        theta = theta - (learning_rate / (1.0 + decay * t)) * g
        if not np.all(np.isfinite(theta)):
            raise NonFiniteError(f"parameters diverged at iteration {t}")
    else:
        iterations = max_iterations

    return theta, {"iterations": iterations, "converged": converged, "grad_norm": grad_norm}


@dataclass
class ConstrainedModel:
    """A trained scoring model, self-contained for later scoring.

    Coefficients are keyed by encoded-coordinate label (the feature name for
    ordinals, ``feature=value`` for categorical coordinates); excluded
    attributes have no keys at all.
    """

    schema_jsonable: dict[str, Any]
    coefficients: dict[str, float]
    intercept: float
    threshold: float
    config: TrainingConfig

    def _encoder(self) -> CaseEncoder:
        schema = schema_from_jsonable(self.schema_jsonable)
        return CaseEncoder(exclude=tuple(self.config.excluded_attributes)).fit(schema)

    def parameter_vector(self) -> np.ndarray:
        encoder = self._encoder()
        if set(self.coefficients) != set(encoder.coordinate_labels_):
            raise SchemaError("model coefficients do not match the schema's coordinate layout")
        return np.concatenate(
            [[self.coefficients[label] for label in encoder.coordinate_labels_], [self.intercept]]
        )

    def score_cases(self, dataset: Dataset) -> np.ndarray:
        if schema_to_jsonable(dataset.schema) != self.schema_jsonable:
            raise SchemaMismatchError("model and dataset schemas differ")
        encoder = self._encoder()
        theta = self.parameter_vector()
        return _sigmoid(encoder.transform(dataset.cases) @ theta[:-1] + theta[-1])

    def score_case(self, case: Case) -> float:
        encoder = self._encoder()
        theta = self.parameter_vector()
        return float(_sigmoid(np.array([encoder.encode(case) @ theta[:-1] + theta[-1]]))[0])

    def predict_case(self, case: Case) -> str:
        return binarize(self.score_case(case), self.threshold)


def model_to_jsonable(model: ConstrainedModel) -> dict[str, Any]:
    return {
        "schema": model.schema_jsonable,
        "coefficients": dict(model.coefficients),
        "intercept": model.intercept,
        "threshold": model.threshold,
        "training_config": config_to_jsonable(model.config),
    }


def model_from_jsonable(obj: Mapping[str, Any]) -> ConstrainedModel:
    if not isinstance(obj, Mapping):
        raise SchemaError("model must be a JSON object")
    for key in ("schema", "coefficients", "intercept", "threshold", "training_config"):
        if key not in obj:
            raise SchemaError(f"model is missing {key!r}")
    model = ConstrainedModel(
        schema_jsonable=dict(obj["schema"]),
        coefficients={str(k): float(v) for k, v in obj["coefficients"].items()},
        intercept=float(obj["intercept"]),
        threshold=float(obj["threshold"]),
        config=config_from_jsonable(obj["training_config"]),
    )
    model.parameter_vector()  # validates the coefficient layout
    return model


@dataclass
class TrainingReport:
    objective: float
    terms: dict[str, float]
    strict_constraints: int
    strict_satisfied: int
    equal_constraints: int
    hard_parity_gaps: dict[str, float]
    hard_odds_gaps: dict[str, float]
    grad_norm: float
    iterations: int | None = None
    converged: bool | None = None

    @property
    def fraction_strict_satisfied(self) -> float | None:
        if self.strict_constraints == 0:
            return None
        return self.strict_satisfied / self.strict_constraints


def report_to_jsonable(report: TrainingReport) -> dict[str, Any]:
    return {
        "objective": report.objective,
        "terms": dict(report.terms),
        "strict_constraints": report.strict_constraints,
        "strict_satisfied": report.strict_satisfied,
        "fraction_strict_satisfied": report.fraction_strict_satisfied,
        "equal_constraints": report.equal_constraints,
        "hard_parity_gaps": dict(report.hard_parity_gaps),
        "hard_odds_gaps": dict(report.hard_odds_gaps),
        "grad_norm": report.grad_norm,
        "iterations": report.iterations,
        "converged": report.converged,
    }


def report_from_jsonable(obj: Mapping[str, Any]) -> TrainingReport:
    for key in ("objective", "terms", "strict_constraints", "strict_satisfied"):
        if key not in obj:
            raise SchemaError(f"report is missing {key!r}")
    return TrainingReport(
        objective=float(obj["objective"]),
        terms={str(k): float(v) for k, v in obj["terms"].items()},
        strict_constraints=int(obj["strict_constraints"]),
        strict_satisfied=int(obj["strict_satisfied"]),
        equal_constraints=int(obj.get("equal_constraints", 0)),
        hard_parity_gaps={str(k): float(v) for k, v in obj.get("hard_parity_gaps", {}).items()},
        hard_odds_gaps={str(k): float(v) for k, v in obj.get("hard_odds_gaps", {}).items()},
        grad_norm=float(obj.get("grad_norm", 0.0)),
        iterations=obj.get("iterations"),
        converged=obj.get("converged"),
    )


def report_text(report: TrainingReport) -> str:
    lines = [
        f"objective          {report.objective:.6f}",
        "terms:",
    ]
    for name, value in report.terms.items():
        lines.append(f"  {name:<16} {value:.6f}")
    if report.strict_constraints:
        lines.append(
            f"strict constraints {report.strict_satisfied}/{report.strict_constraints} "
            f"satisfied at margin"
        )
    if report.equal_constraints:
        lines.append(f"equal constraints  {report.equal_constraints}")
    for attr, gap in report.hard_parity_gaps.items():
        lines.append(f"parity gap         {attr}: {gap:.6f}")
    for attr, gap in report.hard_odds_gaps.items():
        lines.append(f"odds gap           {attr}: {gap:.6f}")
    lines.append(f"gradient norm      {report.grad_norm:.3e}")
    if report.iterations is not None:
        lines.append(f"iterations         {report.iterations}")
    if report.converged is not None:
        lines.append(f"converged          {report.converged}")
    return "\n".join(lines) + "\n"


def train(
    dataset: Dataset, constraints: Sequence[PairConstraint], config: TrainingConfig
) -> tuple[ConstrainedModel, TrainingReport]:
    """Fit a model under the given constraints; bit-reproducible per config."""
    problem, encoder = build_problem(dataset, constraints, config)
    theta, diagnostics = _descend(
        problem,
        seed=config.seed,
        learning_rate=config.learning_rate,
        decay=config.decay,
        max_iterations=config.max_iterations,
        tolerance=config.tolerance,
        init_scale=config.init_scale,
    )
    model = ConstrainedModel(
        schema_jsonable=schema_to_jsonable(dataset.schema),
        coefficients={
            label: float(theta[i]) for i, label in enumerate(encoder.coordinate_labels_)
        },
        intercept=float(theta[-1]),
        threshold=dataset.threshold,
        config=config,
    )
    report = evaluate(model, dataset, constraints)
    report.iterations = diagnostics["iterations"]
    report.converged = diagnostics["converged"]
    return model, report


def evaluate(
    dataset_model: ConstrainedModel, dataset: Dataset, constraints: Sequence[PairConstraint] = ()
) -> TrainingReport:
    """Recompute the full report for a model on a dataset from scratch.

    Hard parity/odds gaps come from the metrics module on predictions
    re-binarized at the model threshold, so report numbers and audit numbers
    can never drift apart.
    """
    model = dataset_model
    scores = model.score_cases(dataset)
    problem, _ = build_problem(dataset, constraints, model.config)
    theta = model.parameter_vector()

    terms = objective_terms(problem, theta)
    grad_norm = float(np.max(np.abs(gradient(problem, theta))))

    strict_total = len(problem.strict)
    strict_satisfied = 0
    s = _sigmoid(problem.X @ theta[:-1] + theta[-1])
    for hi, lo, margin, _weight in problem.strict:
        if s[hi] - s[lo] >= margin:
            strict_satisfied += 1

    audited = Dataset(
        schema=dataset.schema,
        cases=[
            Case(
                id=c.id,
                values=dict(c.values),
                true_label=c.true_label,
                score=float(scores[i]),
                prediction=binarize(float(scores[i]), model.threshold),
            )
            for i, c in enumerate(dataset.cases)
        ],
        threshold=model.threshold,
        provenance=dataset.provenance,
    )
    hard_parity = {}
    hard_odds = {}
    for attr in dataset.schema.sensitive_attributes:
        hard_parity[attr] = float(
            statistical_parity_report(audited, attr, DEFAULT_EPSILON).max_gap
        )
        hard_odds[attr] = float(equalized_odds_report(audited, attr, DEFAULT_EPSILON).max_gap)

    return TrainingReport(
        objective=float(sum(terms.values())),
        terms=terms,
        strict_constraints=strict_total,
        strict_satisfied=strict_satisfied,
        equal_constraints=len(problem.equal),
        hard_parity_gaps=hard_parity,
        hard_odds_gaps=hard_odds,
        grad_norm=grad_norm,
    )


def derive_constraints(
    responses: Iterable[tuple[str, str, str]],
    policy: str = "borda_aggregate",
    margin: float = 0.1,
    weight: float = 1.0,
    case_ids: Iterable[str] | None = None,
) -> list[PairConstraint]:
    """Turn pairwise responses (case_a, case_b, choice) into constraints.

    per_participant: every substantive response yields its own constraint.
    borda_aggregate: responses are tallied per unordered pair with the Borda
    point schedule and a single constraint reflects each pair's winner
    (an equality when tied).  Abstentions never yield constraints.  When
    ``case_ids`` is given, responses must reference only those cases.
    """
    if policy not in POLICIES:
        raise InvalidChoiceError("policy", policy, POLICIES)

    known = None if case_ids is None else set(case_ids)
    records = list(responses)
    for case_a, case_b, choice in records:
        if known is not None:
            for cid in (case_a, case_b):
                if cid not in known:
                    raise UnknownCaseError(cid)
        if choice not in ("equal", "prioritize_a", "prioritize_b", "not_comfortable", "no_opinion"):
            raise InvalidChoiceError(
                "choice",
                choice,
                ("equal", "prioritize_a", "prioritize_b", "not_comfortable", "no_opinion"),
            )

    constraints: list[PairConstraint] = []
    if policy == "per_participant":
        for case_a, case_b, choice in records:
            if choice == "prioritize_a":
                constraints.append(strict_constraint(case_a, case_b, margin, weight))
            elif choice == "prioritize_b":
                constraints.append(strict_constraint(case_b, case_a, margin, weight))
            elif choice == "equal":
                constraints.append(equal_constraint(case_a, case_b, weight))
        return constraints

    points: dict[tuple[str, str], dict[str, float]] = {}
    order: list[tuple[str, str]] = []
    for case_a, case_b, choice in records:
        if choice in ("not_comfortable", "no_opinion"):
            continue
        key = (case_a, case_b) if case_a <= case_b else (case_b, case_a)
        if key not in points:
            points[key] = {key[0]: 0.0, key[1]: 0.0}
            order.append(key)
        if choice == "prioritize_a":
            points[key][case_a] += 1.0
        elif choice == "prioritize_b":
            points[key][case_b] += 1.0
        else:
            points[key][case_a] += 0.5
            points[key][case_b] += 0.5

    for key in order:
        first, second = key
        pa, pb = points[key][first], points[key][second]
        if pa > pb:
            constraints.append(strict_constraint(first, second, margin, weight))
        elif pb > pa:
            constraints.append(strict_constraint(second, first, margin, weight))
        else:
            constraints.append(equal_constraint(first, second, weight))
    return constraints
