"""Monte Carlo estimates of the restricted-isometry constant.

The estimate is a running maximum of ``| ||W x||^2 / ||x||^2 - 1 |`` over
random sparse probes, so it can only under-report the true constant. Even
trials probe a unit-norm nu-sparse vector; odd trials probe the difference
of two such vectors (up to 2nu-sparse), which is the operand the isometry
inequality is applied to for a pair of sparse inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .ensembles import EnsembleSpec, WeightMatrix

DEFAULT_C = 4.0
HIST_EDGES = np.linspace(0.0, 3.0, 31)

_RIP_TAG = 101


@dataclass(frozen=True)
class RipEstimate:
    delta_hat: float
    ensemble: EnsembleSpec
    nu: int
    trials: int
    worst_witness: np.ndarray = field(repr=False)
    worst_ratio: float
    ratio_min: float
    ratio_max: float
    ratio_histogram: np.ndarray = field(repr=False)
    histogram_edges: np.ndarray = field(repr=False, default_factory=lambda: HIST_EDGES.copy())


def _sparse(rng: np.random.Generator, count: int, m: int, nu: int) -> np.ndarray:
    support = np.argsort(rng.random((count, m)), axis=1)[:, :nu]
    x = np.zeros((count, m))
    np.put_along_axis(x, support, rng.standard_normal((count, nu)), axis=1)
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x


def _probe_block(rng: np.random.Generator, m: int, nu: int) -> np.ndarray:
    # blocks start at even trial indices, so parity within the block is global parity
    a = _sparse(rng, _rng.BLOCK, m, nu)
    b = _sparse(rng, _rng.BLOCK, m, nu)
    x = a.copy()
    x[1::2] -= b[1::2]
    norms = np.linalg.norm(x, axis=1)
    # a - b can cancel exactly when m is tiny; probe a alone in that case
    dead = norms == 0.0
    x[dead], norms[dead] = a[dead], 1.0
    return x / norms[:, None]


def estimate_ric(w: WeightMatrix, nu: int, trials: int, seed: int = 0) -> RipEstimate:
    """Sampled lower bound on the RIC of ``w`` at sparsity ``nu``.

    Deterministic given ``(w, nu, trials, seed)``; running with more trials
    extends the same probe sequence, so the estimate never decreases.
    """
    m = w.m
    if not 1 <= nu <= m:
        raise ValueError(f"sparsity must satisfy 1 <= nu <= m={m}, got {nu}")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    worst = -1.0
    witness = None
    worst_ratio = 1.0
    lo, hi = math.inf, -math.inf
    hist = np.zeros(len(HIST_EDGES) - 1, dtype=np.int64)
    for start, stop, rng in _rng.blocks(seed, trials, _RIP_TAG, m, nu):
        x = _probe_block(rng, m, nu)[: stop - start]
        ratios = np.sum((x @ w.entries.T) ** 2, axis=1)
        dev = np.abs(ratios - 1.0)
        k = int(np.argmax(dev))
        if dev[k] > worst:
            worst, witness, worst_ratio = float(dev[k]), x[k].copy(), float(ratios[k])
        lo = min(lo, float(ratios.min()))
        hi = max(hi, float(ratios.max()))
        hist += np.histogram(np.clip(ratios, HIST_EDGES[0], HIST_EDGES[-1]), bins=HIST_EDGES)[0]
    return RipEstimate(
        delta_hat=worst,
        ensemble=w.spec,
        nu=nu,
        trials=trials,
        worst_witness=witness,
        worst_ratio=worst_ratio,
        ratio_min=lo,
        ratio_max=hi,
        ratio_histogram=hist,
    )


def dimension_rule(nu: int, m: int, c: float = DEFAULT_C) -> int:
    """Row count ``ceil(c * nu * ln m)``, at least 1."""
    if nu < 1 or m < 2 or not c > 0:
        raise ValueError(f"need nu >= 1, m >= 2, c > 0; got nu={nu}, m={m}, c={c}")
    return max(1, math.ceil(c * nu * math.log(m)))
