from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple

import numpy as np

from app.core.exceptions import ValidationError


@dataclass(frozen=True)
class Support:
    """Strictly increasing set of 0-based column indices in [0, p)."""

    indices: Tuple[int, ...]
    p: int

    def __post_init__(self):
        if self.p < 1:
            raise ValidationError(f"support dimension must be >= 1, got {self.p}")
        previous = -1
        for j in self.indices:
            if j <= previous:
                raise ValidationError(f"support indices must be strictly increasing: {self.indices}")
            previous = j
        if self.indices and (self.indices[0] < 0 or self.indices[-1] >= self.p):
            raise ValidationError(f"support index out of range [0, {self.p}): {self.indices}")

    @classmethod
    def of(cls, indices: Iterable[int], p: int) -> "Support":
        values = [int(j) for j in indices]
        if len(set(values)) != len(values):
            raise ValidationError(f"duplicate support index in {values}")
        return cls(tuple(sorted(values)), p)

    @classmethod
    def empty(cls, p: int) -> "Support":
        return cls((), p)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, j: int) -> bool:
        return j in self.indices

    def _check_compatible(self, other: "Support") -> None:
        if other.p != self.p:
            raise ValidationError(f"supports over different dimensions: {self.p} vs {other.p}")

    def union(self, other: "Support") -> "Support":
        self._check_compatible(other)
        return Support(tuple(sorted(set(self.indices) | set(other.indices))), self.p)

    def difference(self, other: "Support") -> "Support":
        self._check_compatible(other)
        drop = set(other.indices)
        return Support(tuple(j for j in self.indices if j not in drop), self.p)

    def isdisjoint(self, other: "Support") -> bool:
        return set(self.indices).isdisjoint(other.indices)

    def add(self, j: int) -> "Support":
        return self.union(Support((int(j),), self.p))

    def remove(self, j: int) -> "Support":
        return self.difference(Support((int(j),), self.p))

    def as_array(self) -> np.ndarray:
        return np.array(self.indices, dtype=np.intp)

    def to_list(self):
        return list(self.indices)

    def __str__(self) -> str:
        return "{" + ", ".join(str(j) for j in self.indices) + "}"


@dataclass(frozen=True, eq=False)
class ParamVector:
    """Length-p coefficient vector that is exactly zero off its support."""

    beta: np.ndarray
    support: Support

    def __post_init__(self):
        beta = self.beta
        if beta.ndim != 1 or beta.shape[0] != self.support.p:
            raise ValidationError(f"beta must have length {self.support.p}, got shape {beta.shape}")
        off = np.ones(beta.shape[0], dtype=bool)
        off[self.support.as_array()] = False
        if np.any(beta[off] != 0.0):
            raise ValidationError("beta has nonzero entries outside its support")

    @classmethod
    def zeros(cls, p: int) -> "ParamVector":
        beta = np.zeros(p)
        beta.setflags(write=False)
        return cls(beta, Support.empty(p))

    @classmethod
    def from_restricted(cls, values, support: Support) -> "ParamVector":
        beta = np.zeros(support.p)
        beta[support.as_array()] = np.asarray(values, dtype=np.float64)
        beta.setflags(write=False)
        return cls(beta, support)

    @classmethod
    def from_dense(cls, beta, support: Support = None) -> "ParamVector":
        beta = np.array(beta, dtype=np.float64)
        if support is None:
            support = Support.of(np.flatnonzero(beta), beta.shape[0])
        beta.setflags(write=False)
        return cls(beta, support)

    @property
    def p(self) -> int:
        return self.support.p

    def restricted(self) -> np.ndarray:
        return self.beta[self.support.as_array()]

    def equals(self, other: "ParamVector") -> bool:
        return self.support == other.support and np.array_equal(self.beta, other.beta)
