"""Embedding evaluation: load vectors, train the suite, report.

An embedding file is plain text, one ``<uri> v1 ... vd`` line per
entity, optionally preceded by a ``<count> <dim>`` header line.  Every
(gold-standard cell x embedding x classifier) combination becomes one
CellResult; accuracies feed a one-sided test against the 0.5 baseline
with Bonferroni correction over the six classifiers of a cell; four
CSV reports summarize the grid.  Identical inputs and seeds produce
byte-identical CSVs.
"""

from __future__ import annotations

import csv
import logging
import math
import os
import warnings
from dataclasses import dataclass
from statistics import NormalDist
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from kgcbench.classifiers import (
    CLASSIFIER_KINDS,
    ClassifierSpec,
    build_classifier,
    derive_seed,
)
from kgcbench.constructors import ConstructorExpr, matches
from kgcbench.goldstandard import CaseOnDisk, discover_cases

logger = logging.getLogger(__name__)

MISSING_VECTOR_POLICIES = ("error", "dropExample", "zeroVector")

REPORT_FILES = (
    "accuracy_per_classifier.csv",
    "best_per_testcase.csv",
    "domain_aggregate.csv",
    "best_classifier_counts.csv",
)


class EmbeddingFormatError(ValueError):
    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EvaluationError(RuntimeError):
    """A cell could not be scored (missing vectors, empty class, ...)."""


@dataclass
class EmbeddingSet:
    """URI-to-vector map with one shared dimension."""

    dimension: int
    vectors: Dict[str, np.ndarray]

    def __contains__(self, uri: str) -> bool:
        return uri in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


def load_embeddings(path: str) -> EmbeddingSet:
    """Parse the textual embedding format.

    The dimension is inferred from the first data line; an optional
    leading ``<count> <dim>`` header is validated against it.  A URI
    appearing twice keeps its last vector (with a warning).
    """
    vectors: Dict[str, np.ndarray] = {}
    dimension: Optional[int] = None
    header_dim: Optional[int] = None
    first_content_line = True
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            tokens = raw.split()
            if not tokens:
                continue
            if first_content_line and len(tokens) == 2 and _both_ints(tokens):
                header_dim = int(tokens[1])
                first_content_line = False
                continue
            first_content_line = False
            uri, components = tokens[0], tokens[1:]
            if not components:
                raise EmbeddingFormatError(line_number, f"no components for {uri!r}")
            try:
                vector = np.array([float(c) for c in components], dtype=np.float64)
            except ValueError:
                raise EmbeddingFormatError(
                    line_number, f"non-numeric component for {uri!r}"
                ) from None
            if not np.all(np.isfinite(vector)):
                raise EmbeddingFormatError(
                    line_number, f"NaN or infinite component for {uri!r}"
                )
            if dimension is None:
                dimension = len(vector)
                if header_dim is not None and header_dim != dimension:
                    raise EmbeddingFormatError(
                        line_number,
                        f"header dimension {header_dim} does not match "
                        f"data dimension {dimension}",
                    )
            elif len(vector) != dimension:
                raise EmbeddingFormatError(
                    line_number,
                    f"expected {dimension} components, got {len(vector)}",
                )
            if uri in vectors:
                logger.warning("duplicate vector for %s; last one wins", uri)
            vectors[uri] = vector
    if dimension is None:
        raise EmbeddingFormatError(0, "no vectors in file")
    return EmbeddingSet(dimension=dimension, vectors=vectors)


def _both_ints(tokens: Sequence[str]) -> bool:
    try:
        int(tokens[0]), int(tokens[1])
        return True
    except ValueError:
        return False


def write_embeddings(embedding: EmbeddingSet, path: str, header: bool = False) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        if header:
            handle.write(f"{len(embedding.vectors)} {embedding.dimension}\n")
        for uri in sorted(embedding.vectors):
            components = " ".join(repr(float(v)) for v in embedding.vectors[uri])
            handle.write(f"{uri} {components}\n")


# -- diagnostic embeddings ---------------------------------------------------


def oracle_embedding(
    graph, exprs: Dict[str, ConstructorExpr], uris: Iterable[str]
) -> EmbeddingSet:
    """One 0/1 feature per constructor expression: ground-truth membership."""
    families = sorted(exprs)
    vectors = {
        uri: np.array(
            [1.0 if matches(graph, exprs[f], uri) else 0.0 for f in families],
            dtype=np.float64,
        )
        for uri in uris
    }
    return EmbeddingSet(dimension=len(families), vectors=vectors)


def random_embedding(uris: Iterable[str], dimension: int, seed: int) -> EmbeddingSet:
    """Seeded standard-normal vectors: the null hypothesis embedding."""
    ordered = sorted(set(uris))
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((len(ordered), dimension))
    vectors = {uri: matrix[i] for i, uri in enumerate(ordered)}
    return EmbeddingSet(dimension=dimension, vectors=vectors)


# -- scoring -----------------------------------------------------------------


def _materialize(
    rows: Sequence[Tuple[str, int]],
    embedding: EmbeddingSet,
    policy: str,
) -> Tuple[np.ndarray, np.ndarray]:
    xs: List[np.ndarray] = []
    ys: List[int] = []
    for uri, label in rows:
        vector = embedding.vectors.get(uri)
        if vector is None:
            if policy == "error":
                raise EvaluationError(f"no vector for {uri}")
            if policy == "dropExample":
                continue
            vector = np.zeros(embedding.dimension, dtype=np.float64)
        xs.append(vector)
        ys.append(label)
    if not xs:
        return np.empty((0, embedding.dimension)), np.empty((0,), dtype=np.int64)
    return np.stack(xs), np.array(ys, dtype=np.int64)


def train_and_score(
    train_rows: Sequence[Tuple[str, int]],
    test_rows: Sequence[Tuple[str, int]],
    embedding: EmbeddingSet,
    spec: ClassifierSpec,
    policy: str = "error",
) -> Tuple[float, int]:
    """Fit one classifier on the train rows, return (accuracy, nTest)."""
    if policy not in MISSING_VECTOR_POLICIES:
        raise ValueError(f"unknown missing-vector policy: {policy!r}")
    x_train, y_train = _materialize(train_rows, embedding, policy)
    x_test, y_test = _materialize(test_rows, embedding, policy)
    if len(set(y_train.tolist())) < 2:
        raise EvaluationError(
            "training data lost a class "
            f"({len(y_train)} rows after policy {policy!r})"
        )
    if len(y_test) == 0:
        raise EvaluationError(f"no test rows left after policy {policy!r}")
    estimator = build_classifier(spec, n_train=len(y_train))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        estimator.fit(x_train, y_train)
        predictions = estimator.predict(x_test)
    correct = int(np.sum(predictions == y_test))
    return correct / len(y_test), len(y_test)


def significance(
    accuracy: float,
    n_test: int,
    alpha: float = 0.05,
    m: int = 6,
    exact: bool = False,
) -> Tuple[float, bool]:
    """One-sided test of accuracy against the 0.5 coin-flip baseline.

    Default is the normal approximation without continuity correction;
    ``exact`` switches to the exact binomial tail for small test sets.
    Significance applies the Bonferroni-corrected level alpha/m.
    """
    if n_test < 1:
        raise ValueError(f"n_test must be >= 1, got {n_test}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if exact:
        from scipy.stats import binom

        correct = int(round(accuracy * n_test))
        p_value = float(binom.sf(correct - 1, n_test, 0.5))
    else:
        z = (accuracy - 0.5) / math.sqrt(0.25 / n_test)
        p_value = 1.0 - NormalDist().cdf(z)
    return p_value, p_value < alpha / m


@dataclass(frozen=True)
class CellResult:
    """One classifier's outcome on one gold-standard cell."""

    embedding: str
    test_case: str
    collection: str
    size: int
    hard: bool
    classifier: str
    accuracy: Optional[float]
    n_test: Optional[int]
    p_value: Optional[float]
    significant: Optional[bool]
    error: Optional[str] = None


def _score_cell(
    case: CaseOnDisk,
    hard: bool,
    embedding_name: str,
    embedding: EmbeddingSet,
    kind: str,
    policy: str,
    base_seed: int,
    alpha: float,
    m: int,
    exact: bool,
) -> CellResult:
    train = case.train_hard if hard else case.train
    test = case.test_hard if hard else case.test
    cell_key = "|".join(
        [
            embedding_name,
            case.test_case,
            case.collection,
            str(case.size),
            "hard" if hard else "plain",
            kind,
        ]
    )
    spec = ClassifierSpec(kind=kind, seed=derive_seed(base_seed, cell_key))
    try:
        accuracy, n_test = train_and_score(train, test, embedding, spec, policy)
    except EvaluationError as exc:
        return CellResult(
            embedding=embedding_name,
            test_case=case.test_case,
            collection=case.collection,
            size=case.size,
            hard=hard,
            classifier=kind,
            accuracy=None,
            n_test=None,
            p_value=None,
            significant=None,
            error=str(exc),
        )
    p_value, is_significant = significance(accuracy, n_test, alpha, m, exact)
    return CellResult(
        embedding=embedding_name,
        test_case=case.test_case,
        collection=case.collection,
        size=case.size,
        hard=hard,
        classifier=kind,
        accuracy=accuracy,
        n_test=n_test,
        p_value=p_value,
        significant=is_significant,
    )


def run_suite(
    gold_root: str,
    embeddings: Sequence[Tuple[str, EmbeddingSet]],
    policy: str = "error",
    base_seed: int = 0,
    alpha: float = 0.05,
    m: int = 6,
    exact: bool = False,
    classifiers: Sequence[str] = CLASSIFIER_KINDS,
    jobs: int = 1,
) -> List[CellResult]:
    """Score every (cell, embedding, classifier) combination.

    Cell errors are recorded in their CellResult, never fatal; an
    unreadable gold standard is.
    """
    cases = discover_cases(gold_root)
    tasks = []
    for name, embedding in embeddings:
        for case in cases:
            variants = [False] + ([True] if case.train_hard is not None else [])
            for hard in variants:
                for kind in classifiers:
                    tasks.append((case, hard, name, embedding, kind))
    if jobs > 1:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=jobs)(
            delayed(_score_cell)(
                case, hard, name, embedding, kind, policy, base_seed, alpha, m, exact
            )
            for case, hard, name, embedding, kind in tasks
        )
        return list(results)
    return [
        _score_cell(
            case, hard, name, embedding, kind, policy, base_seed, alpha, m, exact
        )
        for case, hard, name, embedding, kind in tasks
    ]


# -- reports -------------------------------------------------------------------


def _row_key(result: CellResult) -> tuple:
    return (
        result.embedding,
        result.collection,
        result.test_case,
        result.size,
        result.hard,
        CLASSIFIER_KINDS.index(result.classifier),
    )


def _fmt_accuracy(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def _fmt_p(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6g}"


def _fmt_bool(value: Optional[bool]) -> str:
    return "" if value is None else ("true" if value else "false")


def emit_reports(results: Sequence[CellResult], out_dir: str) -> Dict[str, str]:
    """Write the four CSV reports; returns report name -> path."""
    if not results:
        raise ValueError("no results to report")
    os.makedirs(out_dir, exist_ok=True)
    ordered = sorted(results, key=_row_key)
    paths = {name: os.path.join(out_dir, name) for name in REPORT_FILES}

    with open(
        paths["accuracy_per_classifier.csv"], "w", encoding="utf-8", newline=""
    ) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            [
                "embedding",
                "test_case",
                "collection",
                "size",
                "hard",
                "classifier",
                "accuracy",
                "n_test",
                "p_value",
                "significant",
                "error",
            ]
        )
        for r in ordered:
            writer.writerow(
                [
                    r.embedding,
                    r.test_case,
                    r.collection,
                    r.size,
                    _fmt_bool(r.hard),
                    r.classifier,
                    _fmt_accuracy(r.accuracy),
                    "" if r.n_test is None else r.n_test,
                    _fmt_p(r.p_value),
                    _fmt_bool(r.significant),
                    r.error or "",
                ]
            )

    # best classifier per cell; ties resolve to the canonical kind order
    groups: Dict[tuple, List[CellResult]] = {}
    for r in ordered:
        groups.setdefault(
            (r.embedding, r.collection, r.test_case, r.size, r.hard), []
        ).append(r)
    best_rows: List[CellResult] = []
    for key in sorted(groups):
        scored = [r for r in groups[key] if r.accuracy is not None]
        if not scored:
            continue
        best_rows.append(
            max(
                scored,
                key=lambda r: (r.accuracy, -CLASSIFIER_KINDS.index(r.classifier)),
            )
        )

    with open(
        paths["best_per_testcase.csv"], "w", encoding="utf-8", newline=""
    ) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            [
                "embedding",
                "test_case",
                "collection",
                "size",
                "hard",
                "best_classifier",
                "accuracy",
                "n_test",
                "p_value",
                "significant",
            ]
        )
        for r in best_rows:
            writer.writerow(
                [
                    r.embedding,
                    r.test_case,
                    r.collection,
                    r.size,
                    _fmt_bool(r.hard),
                    r.classifier,
                    _fmt_accuracy(r.accuracy),
                    r.n_test,
                    _fmt_p(r.p_value),
                    _fmt_bool(r.significant),
                ]
            )

    # hard cells are excluded from the per-domain aggregate
    with open(
        paths["domain_aggregate.csv"], "w", encoding="utf-8", newline=""
    ) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["embedding", "collection", "test_case", "size", "best_classifier", "accuracy"]
        )
        for r in best_rows:
            if r.hard:
                continue
            writer.writerow(
                [
                    r.embedding,
                    r.collection,
                    r.test_case,
                    r.size,
                    r.classifier,
                    _fmt_accuracy(r.accuracy),
                ]
            )

    with open(
        paths["best_classifier_counts.csv"], "w", encoding="utf-8", newline=""
    ) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["embedding", "classifier", "count"])
        counts: Dict[Tuple[str, str], int] = {}
        for r in best_rows:
            counts[(r.embedding, r.classifier)] = (
                counts.get((r.embedding, r.classifier), 0) + 1
            )
        for name in sorted({r.embedding for r in best_rows}):
            for kind in CLASSIFIER_KINDS:
                writer.writerow([name, kind, counts.get((name, kind), 0)])

    return paths
