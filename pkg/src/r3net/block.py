"""A single R3Net block: linear map, optional sign splitter, ReLU."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ensembles import WeightMatrix, apply


def relu(v) -> np.ndarray:
    """Component-wise ``max(v, 0)``."""
    return np.maximum(np.asarray(v, dtype=np.float64), 0.0)


def sign_split_forward(z) -> np.ndarray:
    """ReLU of ``[I; -I] z`` along the last axis, i.e. ``[relu(z); relu(-z)]``.

    The 2n x n splitter matrix is never formed.
    """
    z = np.asarray(z, dtype=np.float64)
    return np.concatenate([np.maximum(z, 0.0), np.maximum(-z, 0.0)], axis=-1)


def l0(v) -> int | np.ndarray:
    """Count of entries different from zero (exact comparison), per row if 2-D."""
    c = np.count_nonzero(np.asarray(v), axis=-1)
    return int(c) if np.ndim(c) == 0 else c


@dataclass(frozen=True)
class BlockOutput:
    z: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    l0: int


@dataclass(frozen=True, eq=False)
class Block:
    weights: WeightMatrix
    splitter: bool = True

    @property
    def input_dim(self) -> int:
        return self.weights.m

    @property
    def output_dim(self) -> int:
        return 2 * self.weights.n if self.splitter else self.weights.n

    def activate(self, z) -> np.ndarray:
        return sign_split_forward(z) if self.splitter else relu(z)

    def forward(self, q) -> BlockOutput:
        z = apply(self.weights, q)
        y = self.activate(z)
        return BlockOutput(z=z, y=y, l0=l0(y))
