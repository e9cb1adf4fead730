"""Gold-standard containers, stratified splitting, and on-disk layout.

A gold standard is organized as::

    <version>/<tcXX>/<collection>/<size>/
        positives.txt        one URI per line, sorted
        negatives.txt        one URI per line, sorted
        hard_negatives.txt   optional, same format
        train.csv, test.csv  uri,label rows (label 1 = positive)
        train_hard.csv, test_hard.csv   optional hard-negative variant
        expr.txt             canonical constructor expression, if known

where ``collection`` is ``synthetic`` for generated graphs or a domain
name for extracted ones.  Splits are stratified: the positive count in
train and test equals the negative count exactly, with the per-class
train size ``round(train_fraction * class_size)``.  All shuffling is
seeded, so the same inputs and seed reproduce the same files byte for
byte.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from kgcbench.constructors import ConstructorExpr

TRAIN_FRACTION = 0.8


class GoldStandardError(ValueError):
    """Raised on malformed or inconsistent gold-standard data."""


@dataclass
class LabeledExamples:
    """Balanced positive/negative URI sets for one test case."""

    test_case: str
    positives: Set[str]
    negatives: Set[str]
    expr: Optional[ConstructorExpr] = None
    hard_negatives: Set[str] = field(default_factory=set)

    def validate(self) -> None:
        if len(self.positives) != len(self.negatives):
            raise GoldStandardError(
                f"{self.test_case}: {len(self.positives)} positives vs "
                f"{len(self.negatives)} negatives (must be balanced)"
            )
        if self.positives & self.negatives:
            raise GoldStandardError(
                f"{self.test_case}: positives and negatives overlap"
            )
        if self.positives & self.hard_negatives:
            raise GoldStandardError(
                f"{self.test_case}: positives and hard negatives overlap"
            )


@dataclass
class Split:
    """An ordered, labeled train/test partition.  Label 1 = positive."""

    train: List[Tuple[str, int]]
    test: List[Tuple[str, int]]

    def train_positives(self) -> int:
        return sum(label for _, label in self.train)

    def test_positives(self) -> int:
        return sum(label for _, label in self.test)


def split_stratified(
    positives: Sequence[str],
    negatives: Sequence[str],
    rng: np.random.Generator,
    train_fraction: float = TRAIN_FRACTION,
) -> Split:
    """Seeded stratified split with exact per-class counts.

    Both classes contribute ``round(train_fraction * class_size)``
    examples to train; the combined train and test lists are then
    shuffled once more so downstream order-sensitive learners do not
    see the classes blocked together.
    """
    if len(positives) != len(negatives):
        raise GoldStandardError("stratified split requires balanced classes")
    if not 0.0 < train_fraction < 1.0:
        raise GoldStandardError("train_fraction must be in (0, 1)")
    n_class = len(positives)
    n_train = round(train_fraction * n_class)
    if n_class > 0 and (n_train == 0 or n_train == n_class):
        raise GoldStandardError(
            f"split of {n_class} per class leaves an empty partition"
        )

    pos = sorted(positives)
    neg = sorted(negatives)
    pos_order = rng.permutation(n_class)
    neg_order = rng.permutation(n_class)
    train = [(pos[i], 1) for i in pos_order[:n_train]]
    train += [(neg[i], 0) for i in neg_order[:n_train]]
    test = [(pos[i], 1) for i in pos_order[n_train:]]
    test += [(neg[i], 0) for i in neg_order[n_train:]]
    train_order = rng.permutation(len(train))
    test_order = rng.permutation(len(test))
    return Split(
        train=[train[i] for i in train_order],
        test=[test[i] for i in test_order],
    )


# -- on-disk layout -----------------------------------------------------


def case_dir(root: str, test_case: str, collection: str, size: int) -> str:
    return os.path.join(root, test_case, collection, str(size))


def _write_uri_list(path: str, uris: Set[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for uri in sorted(uris):
            handle.write(uri)
            handle.write("\n")


def _read_uri_list(path: str) -> Set[str]:
    with open(path, "r", encoding="utf-8") as handle:
        return {line.strip() for line in handle if line.strip()}


def _write_split_csv(path: str, rows: List[Tuple[str, int]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["uri", "label"])
        for uri, label in rows:
            writer.writerow([uri, label])


def _read_split_csv(path: str) -> List[Tuple[str, int]]:
    rows: List[Tuple[str, int]] = []
    with open(path, "r", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["uri", "label"]:
            raise GoldStandardError(f"{path}: expected header uri,label")
        for record in reader:
            if len(record) != 2 or record[1] not in ("0", "1"):
                raise GoldStandardError(f"{path}: malformed row {record!r}")
            rows.append((record[0], int(record[1])))
    return rows


def write_case(
    root: str,
    test_case: str,
    collection: str,
    size: int,
    examples: LabeledExamples,
    split: Split,
    hard_split: Optional[Split] = None,
) -> str:
    """Write one test-case cell; returns the cell directory."""
    examples.validate()
    directory = case_dir(root, test_case, collection, size)
    os.makedirs(directory, exist_ok=True)
    _write_uri_list(os.path.join(directory, "positives.txt"), examples.positives)
    _write_uri_list(os.path.join(directory, "negatives.txt"), examples.negatives)
    _write_split_csv(os.path.join(directory, "train.csv"), split.train)
    _write_split_csv(os.path.join(directory, "test.csv"), split.test)
    if examples.expr is not None:
        with open(
            os.path.join(directory, "expr.txt"), "w", encoding="utf-8", newline="\n"
        ) as handle:
            handle.write(examples.expr.to_text())
            handle.write("\n")
    if examples.hard_negatives:
        _write_uri_list(
            os.path.join(directory, "hard_negatives.txt"), examples.hard_negatives
        )
    if hard_split is not None:
        _write_split_csv(os.path.join(directory, "train_hard.csv"), hard_split.train)
        _write_split_csv(os.path.join(directory, "test_hard.csv"), hard_split.test)
    return directory


@dataclass
class CaseOnDisk:
    """One discovered test-case cell of a written gold standard."""

    test_case: str
    collection: str
    size: int
    path: str
    positives: Set[str]
    negatives: Set[str]
    train: List[Tuple[str, int]]
    test: List[Tuple[str, int]]
    expr_text: Optional[str]
    hard_negatives: Set[str]
    train_hard: Optional[List[Tuple[str, int]]]
    test_hard: Optional[List[Tuple[str, int]]]


def read_case(path: str, test_case: str, collection: str, size: int) -> CaseOnDisk:
    expr_path = os.path.join(path, "expr.txt")
    expr_text = None
    if os.path.exists(expr_path):
        with open(expr_path, "r", encoding="utf-8") as handle:
            expr_text = handle.read().strip()
    hard_path = os.path.join(path, "hard_negatives.txt")
    hard = _read_uri_list(hard_path) if os.path.exists(hard_path) else set()
    train_hard_path = os.path.join(path, "train_hard.csv")
    test_hard_path = os.path.join(path, "test_hard.csv")
    return CaseOnDisk(
        test_case=test_case,
        collection=collection,
        size=size,
        path=path,
        positives=_read_uri_list(os.path.join(path, "positives.txt")),
        negatives=_read_uri_list(os.path.join(path, "negatives.txt")),
        train=_read_split_csv(os.path.join(path, "train.csv")),
        test=_read_split_csv(os.path.join(path, "test.csv")),
        expr_text=expr_text,
        hard_negatives=hard,
        train_hard=(
            _read_split_csv(train_hard_path)
            if os.path.exists(train_hard_path)
            else None
        ),
        test_hard=(
            _read_split_csv(test_hard_path) if os.path.exists(test_hard_path) else None
        ),
    )


def discover_cases(root: str) -> List[CaseOnDisk]:
    """Find every written cell under a gold-standard version directory."""
    cases: List[CaseOnDisk] = []
    if not os.path.isdir(root):
        raise GoldStandardError(f"not a gold-standard directory: {root}")
    for test_case in sorted(os.listdir(root)):
        tc_path = os.path.join(root, test_case)
        if not (os.path.isdir(tc_path) and test_case.startswith("tc")):
            continue
        for collection in sorted(os.listdir(tc_path)):
            coll_path = os.path.join(tc_path, collection)
            if not os.path.isdir(coll_path):
                continue
            for size_name in sorted(os.listdir(coll_path)):
                size_path = os.path.join(coll_path, size_name)
                if not os.path.isdir(size_path) or not size_name.isdigit():
                    continue
                if not os.path.exists(os.path.join(size_path, "train.csv")):
                    continue
                cases.append(
                    read_case(size_path, test_case, collection, int(size_name))
                )
    if not cases:
        raise GoldStandardError(f"no test-case cells found under {root}")
    return cases
