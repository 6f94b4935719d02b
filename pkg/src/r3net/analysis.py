"""Per-pair distance decompositions and contraction bounds.

For two pre-activation vectors ``z1, z2`` the index set splits into ``M``
(signs agree and are nonzero) and its complement. With

    matched      = sum_{i in M}  (|z1_i| - |z2_i|)^2
    mismatched_z = sum_{i in Mc} (|z1_i| + |z2_i|)^2
    mismatched_y = sum_{i in Mc}  |z1_i|^2 + |z2_i|^2

the squared distances before and after the sign splitter are exactly
``matched + mismatched_z`` and ``matched + mismatched_y``. The contraction
constant of the pair is ``kappa = max(matched, mismatched_y) / ||z1 - z2||^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .block import sign_split_forward
from .ensembles import WeightMatrix, apply
from .errors import DegeneratePairError, DimensionError

# Relative slack granted to the passing side of an inequality check.
INEQ_RTOL = 1e-12


@dataclass(frozen=True)
class SignDecomposition:
    signs: np.ndarray
    magnitudes: np.ndarray
    positive_part: np.ndarray
    negative_part: np.ndarray


@dataclass(frozen=True)
class MatchedSignSet:
    matched: np.ndarray
    complement: np.ndarray

    @property
    def size(self) -> int:
        return len(self.matched) + len(self.complement)

    @property
    def mismatch_fraction(self) -> float:
        return len(self.complement) / self.size if self.size else 0.0


@dataclass(frozen=True)
class PairAnalysis:
    matched_term: float
    mismatched_term_z: float
    mismatched_term_y: float
    gamma: float
    kappa: float
    z_dist_sq: float
    ybar_dist_sq: float
    signs: MatchedSignSet = field(repr=False)

    @property
    def mismatch_fraction(self) -> float:
        return self.signs.mismatch_fraction

    @property
    def sandwich_holds(self) -> bool:
        return leq(self.kappa * self.z_dist_sq, self.ybar_dist_sq) and leq(
            self.ybar_dist_sq, self.z_dist_sq
        )


@dataclass(frozen=True)
class RobustnessBound:
    """Constants of ``A ||x1-x2||^2 <= ||f(x1)-f(x2)||^2 <= B ||x1-x2||^2``."""

    lower_A: float
    upper_B: float

    def __post_init__(self):
        if not self.upper_B > 0:
            raise ValueError(f"upper bound must be positive, got {self.upper_B}")
        if not 0 <= self.lower_A <= self.upper_B:
            raise ValueError(f"need 0 <= A <= B, got A={self.lower_A}, B={self.upper_B}")


@dataclass(frozen=True)
class BlockBoundCheck:
    bound: RobustnessBound
    kappa: float
    delta_hat: float
    input_dist_sq: float
    z_dist_sq: float
    output_dist_sq: float
    passed: bool


def leq(a: float, b: float, rtol: float = INEQ_RTOL) -> bool:
    """``a <= b`` up to a relative slack on the scale of the operands."""
    return a <= b + rtol * max(abs(a), abs(b))


def _pair(z1, z2) -> tuple[np.ndarray, np.ndarray]:
    z1 = np.asarray(z1, dtype=np.float64)
    z2 = np.asarray(z2, dtype=np.float64)
    if z1.ndim != 1 or z1.shape != z2.shape:
        raise DimensionError(f"pair vectors must be 1-D of equal length, got {z1.shape} and {z2.shape}")
    return z1, z2


def decompose(v) -> SignDecomposition:
    v = np.asarray(v, dtype=np.float64)
    return SignDecomposition(
        signs=np.sign(v),
        magnitudes=np.abs(v),
        positive_part=np.where(v > 0, v, 0.0),
        negative_part=np.where(v < 0, v, 0.0),
    )


def matched_set(z1, z2) -> MatchedSignSet:
    """Partition indices by whether ``sign(z1_i) == sign(z2_i) != 0``.

    Indices where either entry is exactly zero land in the complement.
    """
    z1, z2 = _pair(z1, z2)
    s1, s2 = np.sign(z1), np.sign(z2)
    mask = (s1 == s2) & (s1 != 0)
    return MatchedSignSet(matched=np.flatnonzero(mask), complement=np.flatnonzero(~mask))


def analyze_pair(z1, z2) -> PairAnalysis:
    """Decomposition terms, gamma and kappa for one pre-activation pair.

    The two squared distances are computed directly from the vectors (the
    output side through :func:`sign_split_forward`), not from the terms, so
    the decomposition identities remain checkable.

    Raises
    ------
    DegeneratePairError
        If ``z1`` and ``z2`` are identical.
    """
    z1, z2 = _pair(z1, z2)
    if np.array_equal(z1, z2):
        raise DegeneratePairError("kappa is undefined for identical vectors")
    sets = matched_set(z1, z2)
    a1, a2 = np.abs(z1), np.abs(z2)
    m, c = sets.matched, sets.complement
    matched = float(np.sum((a1[m] - a2[m]) ** 2))
    mis_z = float(np.sum((a1[c] + a2[c]) ** 2))
    mis_y = float(np.sum(a1[c] ** 2 + a2[c] ** 2))
    z_dist_sq = float(np.sum((z1 - z2) ** 2))
    if z_dist_sq == 0.0:
        raise DegeneratePairError("squared distance underflows to zero")
    ybar_dist_sq = float(np.sum((sign_split_forward(z1) - sign_split_forward(z2)) ** 2))
    gamma = max(matched, mis_y)
    kappa = min(gamma / z_dist_sq, 1.0)
    return PairAnalysis(
        matched_term=matched,
        mismatched_term_z=mis_z,
        mismatched_term_y=mis_y,
        gamma=gamma,
        kappa=kappa,
        z_dist_sq=z_dist_sq,
        ybar_dist_sq=ybar_dist_sq,
        signs=sets,
    )


def verify_block_bounds(w: WeightMatrix, q1, q2, delta_hat: float = 0.0) -> BlockBoundCheck:
    """Check ``kappa(1-d) ||dq||^2 <= ||dy||^2 <= (1+d) ||dq||^2`` for one pair.

    ``delta_hat`` is a restricted-isometry estimate for ``w`` (zero for an
    orthonormal matrix). The verdict is computed, never assumed.
    """
    if not 0.0 <= delta_hat < 1.0:
        raise ValueError(f"delta_hat must lie in [0, 1), got {delta_hat}")
    q1, q2 = _pair(q1, q2)
    if np.array_equal(q1, q2):
        raise DegeneratePairError("inputs are identical")
    pa = analyze_pair(apply(w, q1), apply(w, q2))
    bound = RobustnessBound(lower_A=pa.kappa * (1.0 - delta_hat), upper_B=1.0 + delta_hat)
    dq = float(np.sum((q1 - q2) ** 2))
    out = pa.ybar_dist_sq
    passed = leq(bound.lower_A * dq, out) and leq(out, bound.upper_B * dq)
    return BlockBoundCheck(
        bound=bound,
        kappa=pa.kappa,
        delta_hat=delta_hat,
        input_dist_sq=dq,
        z_dist_sq=pa.z_dist_sq,
        output_dist_sq=out,
        passed=passed,
    )
