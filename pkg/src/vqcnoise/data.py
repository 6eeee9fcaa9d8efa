"""Tabular data ingestion and leak-free preprocessing.

Loads a Kaggle-format passenger CSV (comma separated, quoted strings allowed,
header row required), fits imputation / label-encoding / min-max statistics
on the training split only, and produces feature matrices in [0, 1] with
binary labels.  The schema is column-name driven, so any binary-label table
with a ``Survived`` column loads the same way.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

LABEL_COLUMN = "Survived"
DEFAULT_FEATURES = ("Pclass", "Sex", "Age", "Fare")

RawRecord = dict  # column name -> cell string, or None for a missing cell


@dataclass(frozen=True)
class LabeledSet:
    """Preprocessed feature rows in [0, 1] with binary labels."""

    features: np.ndarray  # (n, d) float
    labels: np.ndarray    # (n,) int in {0, 1}

    def __post_init__(self):
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features and labels have different lengths")
        if self.labels.size and not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be binary")

    def __len__(self) -> int:
        return self.labels.shape[0]


def load_csv(path: str) -> list[RawRecord]:
    """Parse the CSV into records; empty cells become None."""
    records: list[RawRecord] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected a header row")
        if len(set(header)) != len(header) or any(not h for h in header):
            raise ValueError(f"{path}: malformed header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: line {lineno} has {len(row)} cells, "
                    f"expected {len(header)}")
            rec = {h: (cell if cell != "" else None)
                   for h, cell in zip(header, row)}
            label = rec.get(LABEL_COLUMN)
            if label is not None and label not in ("0", "1"):
                raise ValueError(
                    f"{path}: line {lineno} has non-binary {LABEL_COLUMN} "
                    f"value {label!r}")
            records.append(rec)
    return records


def _is_numeric(values: list[str]) -> bool:
    for v in values:
        try:
            float(v)
        except ValueError:
            return False
    return True


def _median(values: list[float]) -> float:
    return float(np.median(np.asarray(values, dtype=float)))


@dataclass(frozen=True)
class Preprocessor:
    """Per-feature statistics fitted exclusively on the training split."""

    features: tuple[str, ...]
    numeric: dict          # feature -> True if numeric, False if categorical
    categories: dict       # categorical feature -> {value: code}
    impute: dict           # feature -> imputation value (encoded scale)
    ranges: dict           # feature -> (min, max) on the encoded scale


def fit_preprocessor(train: list[RawRecord],
                     features: tuple[str, ...] = DEFAULT_FEATURES) -> Preprocessor:
    """Learn imputation values, label dictionaries, and min/max from train.

    Numeric features impute with the train median; categorical features get
    a sorted-lexical label dictionary and impute with the train mode.
    Constant features (min == max) are rejected.
    """
    if not train:
        raise ValueError("cannot fit a preprocessor on an empty training set")
    for feat in features:
        if feat not in train[0]:
            raise ValueError(f"unknown feature name {feat!r}")
    numeric: dict[str, bool] = {}
    categories: dict[str, dict] = {}
    impute: dict[str, float] = {}
    ranges: dict[str, tuple[float, float]] = {}
    for feat in features:
        present = [rec[feat] for rec in train if rec[feat] is not None]
        if not present:
            raise ValueError(f"feature {feat!r} is entirely missing in train")
        if _is_numeric(present):
            numeric[feat] = True
            values = [float(v) for v in present]
            impute[feat] = _median(values)
        else:
            numeric[feat] = False
            table = {v: code for code, v in enumerate(sorted(set(present)))}
            categories[feat] = table
            mode = max(sorted(set(present)), key=present.count)
            impute[feat] = float(table[mode])
            values = [float(table[v]) for v in present]
        lo, hi = min(values), max(values)
        if lo == hi:
            raise ValueError(f"feature {feat!r} is constant (min == max)")
        ranges[feat] = (lo, hi)
    return Preprocessor(tuple(features), numeric, categories, impute, ranges)


def _encode_cell(pre: Preprocessor, feat: str, cell, unseen: list[int]) -> float:
    if cell is None:
        return pre.impute[feat]
    if pre.numeric[feat]:
        return float(cell)
    code = pre.categories[feat].get(cell)
    if code is None:
        unseen[0] += 1
        return 0.0
    return float(code)


def transform_with_report(pre: Preprocessor,
                          records: list[RawRecord]) -> tuple[LabeledSet, dict]:
    """Impute, encode, min-max scale with train statistics, clip to [0, 1].

    Also returns a report with the unseen-category count.
    """
    n, d = len(records), len(pre.features)
    out = np.empty((n, d), dtype=float)
    labels = np.empty(n, dtype=int)
    unseen = [0]
    for r, rec in enumerate(records):
        label = rec.get(LABEL_COLUMN)
        if label is None:
            raise ValueError(f"record {r} is missing {LABEL_COLUMN}")
        labels[r] = int(label)
        for c, feat in enumerate(pre.features):
            value = _encode_cell(pre, feat, rec[feat], unseen)
            lo, hi = pre.ranges[feat]
            out[r, c] = (value - lo) / (hi - lo)
    np.clip(out, 0.0, 1.0, out=out)
    return LabeledSet(out, labels), {"unseen_categories": unseen[0]}


def transform(pre: Preprocessor, records: list[RawRecord]) -> LabeledSet:
    labeled, _report = transform_with_report(pre, records)
    return labeled


def split(records: list[RawRecord], test_fraction: float,
          seed: int) -> tuple[list[RawRecord], list[RawRecord]]:
    """Deterministic stratified split on the label column.

    Per class, round(test_fraction * class size) rows go to test; the split
    is disjoint, exhaustive, and identical for identical seeds.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie strictly between 0 and 1")
    by_class: dict[str, list[int]] = {}
    for idx, rec in enumerate(records):
        label = rec.get(LABEL_COLUMN)
        if label is None:
            raise ValueError(f"record {idx} is missing {LABEL_COLUMN}")
        by_class.setdefault(label, []).append(idx)
    rng = np.random.default_rng(seed)
    test_idx: list[int] = []
    train_idx: list[int] = []
    for label in sorted(by_class):
        indices = np.array(by_class[label])
        if indices.size < 2:
            raise ValueError(f"class {label!r} has fewer than 2 members")
        rng.shuffle(indices)
        n_test = int(round(test_fraction * indices.size))
        test_idx.extend(indices[:n_test].tolist())
        train_idx.extend(indices[n_test:].tolist())
    return ([records[i] for i in sorted(train_idx)],
            [records[i] for i in sorted(test_idx)])
