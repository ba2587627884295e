"""Input/output data for a set of decision making units."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DatasetError(ValueError):
    """Invalid DMU data (negative, non-finite, degenerate, duplicate id, ...)."""


@dataclass(frozen=True)
class DmuRecord:
    id: str
    inputs: tuple[float, ...]
    outputs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "inputs", tuple(float(v) for v in self.inputs))
        object.__setattr__(self, "outputs", tuple(float(v) for v in self.outputs))
        _check_row(self.id, np.array(self.inputs), np.array(self.outputs))


def _check_row(dmu_id, x, y):
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise DatasetError(f"DMU {dmu_id!r}: values must be finite")
    if (x < 0).any() or (y < 0).any():
        raise DatasetError(f"DMU {dmu_id!r}: values must be nonnegative")
    if not (x > 0).any():
        raise DatasetError(f"DMU {dmu_id!r}: all inputs are zero")
    if not (y > 0).any():
        raise DatasetError(f"DMU {dmu_id!r}: all outputs are zero")


class Dataset:
    """Ordered DMUs sharing the same input and output dimensions.

    ``X`` (m x n1) and ``Y`` (m x n2) hold one row per DMU in list order;
    that order is also the tie-break order of every report.
    """

    __slots__ = ("ids", "X", "Y", "input_names", "output_names", "_index")

    def __init__(self, dmus: Sequence[DmuRecord], input_names=None, output_names=None):
        dmus = list(dmus)
        if not dmus:
            raise DatasetError("dataset has no DMUs")
        n1, n2 = len(dmus[0].inputs), len(dmus[0].outputs)
        for d in dmus:
            if len(d.inputs) != n1 or len(d.outputs) != n2:
                raise DatasetError(
                    f"DMU {d.id!r} has {len(d.inputs)} inputs / {len(d.outputs)} outputs, "
                    f"expected {n1} / {n2}")
        X = np.array([d.inputs for d in dmus], dtype=float).reshape(len(dmus), n1)
        Y = np.array([d.outputs for d in dmus], dtype=float).reshape(len(dmus), n2)
        self._init([d.id for d in dmus], X, Y, input_names, output_names)

    @classmethod
    def from_arrays(cls, ids, X, Y, input_names=None, output_names=None) -> "Dataset":
        X = np.array(X, dtype=float)
        Y = np.array(Y, dtype=float)
        if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
            raise DatasetError("X and Y must be 2-D with one row per DMU")
        if X.shape[0] == 0:
            raise DatasetError("dataset has no DMUs")
        ids = [str(i) for i in ids]
        if len(ids) != X.shape[0]:
            raise DatasetError("one id per DMU row required")
        bad = ~(np.isfinite(X).all(axis=1) & np.isfinite(Y).all(axis=1)
                & (X >= 0).all(axis=1) & (Y >= 0).all(axis=1)
                & (X > 0).any(axis=1) & (Y > 0).any(axis=1))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            _check_row(ids[i], X[i], Y[i])
        self = cls.__new__(cls)
        self._init(ids, X, Y, input_names, output_names)
        return self

    def _init(self, ids, X, Y, input_names, output_names):
        ids = tuple(ids)
        if len(set(ids)) != len(ids):
            seen = set()
            dup = next(i for i in ids if i in seen or seen.add(i))
            raise DatasetError(f"duplicate DMU id {dup!r}")
        n1, n2 = X.shape[1], Y.shape[1]
        if n1 == 0 or n2 == 0:
            raise DatasetError("need at least one input and one output")
        input_names = tuple(input_names) if input_names is not None else tuple(f"x{j + 1}" for j in range(n1))
        output_names = tuple(output_names) if output_names is not None else tuple(f"y{k + 1}" for k in range(n2))
        if len(input_names) != n1 or len(output_names) != n2:
            raise DatasetError("column names do not match data dimensions")
        X.setflags(write=False)
        Y.setflags(write=False)
        self.ids, self.X, self.Y = ids, X, Y
        self.input_names, self.output_names = input_names, output_names
        self._index = {k: i for i, k in enumerate(ids)}

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def input_dim(self) -> int:
        return self.X.shape[1]

    @property
    def output_dim(self) -> int:
        return self.Y.shape[1]

    @property
    def dmus(self) -> list[DmuRecord]:
        return [DmuRecord(i, tuple(x), tuple(y)) for i, x, y in zip(self.ids, self.X, self.Y)]

    def __len__(self):
        return self.m

    def index(self, dmu_id: str) -> int:
        try:
            return self._index[dmu_id]
        except KeyError:
            raise KeyError(f"no DMU with id {dmu_id!r}") from None

    def check_index(self, test_index: int) -> int:
        if not 0 <= test_index < self.m:
            raise IndexError(f"DMU index {test_index} out of range for {self.m} DMUs")
        return int(test_index)

    def replace_data(self, X, Y) -> "Dataset":
        """Same ids and column names, new numbers (validated)."""
        return Dataset.from_arrays(self.ids, X, Y, self.input_names, self.output_names)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.ids == other.ids and self.input_names == other.input_names
                and self.output_names == other.output_names
                and np.array_equal(self.X, other.X) and np.array_equal(self.Y, other.Y))

    __hash__ = None

    def __repr__(self):
        return f"Dataset(m={self.m}, inputs={list(self.input_names)}, outputs={list(self.output_names)})"


class IntervalDataset:
    """Elementwise bounds ``lower <= data <= upper`` on a dataset."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower: Dataset, upper: Dataset):
        if lower.ids != upper.ids or lower.X.shape != upper.X.shape or lower.Y.shape != upper.Y.shape:
            raise DatasetError("interval bounds must have identical ids and shapes")
        if (lower.X > upper.X).any() or (lower.Y > upper.Y).any():
            raise DatasetError("interval lower bound exceeds upper bound")
        self.lower, self.upper = lower, upper

    @classmethod
    def point(cls, dataset: Dataset) -> "IntervalDataset":
        return cls(dataset, dataset)

    @property
    def ids(self):
        return self.lower.ids

    @property
    def m(self) -> int:
        return self.lower.m

    def __len__(self):
        return self.m

    def best_case(self, test_index: int) -> Dataset:
        """Low inputs and high outputs for the test DMU, the opposite for its peers."""
        X, Y = self.upper.X.copy(), self.lower.Y.copy()
        X[test_index], Y[test_index] = self.lower.X[test_index], self.upper.Y[test_index]
        return self.lower.replace_data(X, Y)

    def worst_case(self, test_index: int) -> Dataset:
        X, Y = self.lower.X.copy(), self.upper.Y.copy()
        X[test_index], Y[test_index] = self.upper.X[test_index], self.lower.Y[test_index]
        return self.lower.replace_data(X, Y)

    def __eq__(self, other):
        if not isinstance(other, IntervalDataset):
            return NotImplemented
        return self.lower == other.lower and self.upper == other.upper

    __hash__ = None

    def __repr__(self):
        return f"IntervalDataset(m={self.m})"
