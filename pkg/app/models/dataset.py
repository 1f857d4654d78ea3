import enum
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from app.core.exceptions import ValidationError


class LabelEncoding(str, enum.Enum):
    REAL = "real"
    BINARY01 = "binary01"


@dataclass(frozen=True, eq=False)
class Dataset:
    """n observations (rows of X) with responses y.

    `fixed` lists columns that are always part of every support (the bias
    column added by `add_bias`); selection never picks or drops them.
    """

    X: np.ndarray
    y: np.ndarray
    label_encoding: LabelEncoding = LabelEncoding.REAL
    fixed: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def selectable(self) -> Tuple[int, ...]:
        fixed = set(self.fixed)
        return tuple(j for j in range(self.p) if j not in fixed)

    def equals(self, other: "Dataset") -> bool:
        return (
            self.label_encoding == other.label_encoding
            and self.fixed == other.fixed
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )


def validate_dataset(raw_X, raw_y, encoding: LabelEncoding = LabelEncoding.REAL, fixed=()) -> Dataset:
    """Build a Dataset, enforcing shape, finiteness and label invariants."""
    try:
        X = np.array(raw_X, dtype=np.float64)
        y = np.array(raw_y, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"non-numeric entry: {e}")

    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2 or y.ndim != 1:
        raise ValidationError(f"dimension mismatch: X must be 2-d and y 1-d, got {X.shape} and {y.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValidationError(f"dimension mismatch: X must be at least 1x1, got {X.shape}")
    if X.shape[0] != y.shape[0]:
        raise ValidationError(f"dimension mismatch: X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValidationError("non-finite entry")

    encoding = LabelEncoding(encoding)
    if encoding == LabelEncoding.BINARY01 and not np.all((y == 0.0) | (y == 1.0)):
        raise ValidationError("label outside {0,1}")

    fixed = tuple(sorted(set(int(j) for j in fixed)))
    if any(j < 0 or j >= X.shape[1] for j in fixed):
        raise ValidationError(f"fixed column out of range: {fixed}")

    X.setflags(write=False)
    y.setflags(write=False)
    return Dataset(X=X, y=y, label_encoding=encoding, fixed=fixed)


def add_bias(data: Dataset) -> Dataset:
    """Prepend a column of ones (index 0) that every support keeps."""
    X = np.hstack([np.ones((data.n, 1)), data.X])
    fixed = (0,) + tuple(j + 1 for j in data.fixed)
    return validate_dataset(X, data.y, data.label_encoding, fixed=fixed)
