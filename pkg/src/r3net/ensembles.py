"""Weight-matrix ensembles.

Random kinds (Gaussian, Rademacher, Bernoulli, RandomOrthonormal) are drawn
from a stream keyed by ``(seed, kind tag, n, m)``; deterministic kinds (DCT,
WalshHadamard, Haar) ignore the seed. Every matrix is stored dense.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .errors import DimensionError


class Kind(enum.Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    BERNOULLI = "bernoulli"
    RANDOM_ORTHONORMAL = "random_orthonormal"
    DCT = "dct"
    WALSH_HADAMARD = "walsh_hadamard"
    HAAR = "haar"

    @property
    def orthonormal(self) -> bool:
        return self in _ORTHONORMAL

    @property
    def deterministic(self) -> bool:
        return self in (Kind.DCT, Kind.WALSH_HADAMARD, Kind.HAAR)

    @property
    def tag(self) -> int:
        return _TAGS[self]

    @classmethod
    def parse(cls, name: str | Kind) -> Kind:
        if isinstance(name, Kind):
            return name
        key = name.strip().lower().replace("-", "_")
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown ensemble {name!r} (choose from {choices})") from None


_ORTHONORMAL = frozenset({Kind.RANDOM_ORTHONORMAL, Kind.DCT, Kind.WALSH_HADAMARD, Kind.HAAR})
_TAGS = {kind: i + 1 for i, kind in enumerate(Kind)}
_ALIASES = {
    "orthonormal": "random_orthonormal",
    "randomorthonormal": "random_orthonormal",
    "hadamard": "walsh_hadamard",
    "walshhadamard": "walsh_hadamard",
    "wht": "walsh_hadamard",
}


def _is_pow2(k: int) -> bool:
    return k >= 1 and (k & (k - 1)) == 0


@dataclass(frozen=True)
class EnsembleSpec:
    kind: Kind
    n: int
    m: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        object.__setattr__(self, "seed", _rng.check_seed(self.seed))
        if self.n < 1 or self.m < 1:
            raise DimensionError(f"dimensions must be positive, got n={self.n}, m={self.m}")
        if self.kind.orthonormal and self.n < self.m:
            raise DimensionError(
                f"{self.kind.value} needs n >= m for orthonormal columns, got n={self.n}, m={self.m}"
            )
        if self.kind in (Kind.WALSH_HADAMARD, Kind.HAAR):
            if not _is_pow2(self.n):
                raise DimensionError(f"{self.kind.value} needs a power-of-two size, got n={self.n}")
            if self.n != self.m:
                raise DimensionError(f"{self.kind.value} needs n == m, got n={self.n}, m={self.m}")


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """A realized n x m weight matrix and the spec that produced it."""

    entries: np.ndarray = field(repr=False)
    spec: EnsembleSpec

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.float64)
        if entries.shape != (self.spec.n, self.spec.m):
            raise DimensionError(
                f"entries have shape {entries.shape}, spec says {(self.spec.n, self.spec.m)}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def orthonormal(self) -> bool:
        return self.spec.kind.orthonormal

    @classmethod
    def from_array(cls, a, kind: Kind | str = Kind.GAUSSIAN) -> WeightMatrix:
        """Wrap a caller-supplied matrix; ``kind`` only records provenance."""
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2:
            raise DimensionError(f"weight matrix must be 2-D, got shape {a.shape}")
        spec = EnsembleSpec(Kind.parse(kind), a.shape[0], a.shape[1])
        return cls(a, spec)


def draw(kind: Kind, n: int, m: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw entries of a random-kind matrix, optionally a batch of ``size``.

    Shared by :func:`build` and the batched Monte Carlo drivers so both sample
    from exactly the same distribution.
    """
    shape = (n, m) if size is None else (size, n, m)
    if kind is Kind.GAUSSIAN:
        return rng.standard_normal(shape) / math.sqrt(n)
    if kind is Kind.RADEMACHER:
        return np.where(rng.random(shape) < 0.5, 1.0, -1.0) / math.sqrt(n)
    if kind is Kind.BERNOULLI:
        # {0,1} entries, column-centred; factor 2 restores unit column energy
        b = (rng.random(shape) < 0.5).astype(np.float64)
        b -= b.mean(axis=-2, keepdims=True)
        return 2.0 * b / math.sqrt(n)
    if kind is Kind.RANDOM_ORTHONORMAL:
        g = rng.standard_normal(shape)
        q, r = np.linalg.qr(g)
        d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
        d[d == 0] = 1.0
        return q * d[..., None, :]
    raise ValueError(f"{kind.value} is deterministic; use build()")


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal type-II DCT matrix; row k is the k-th cosine basis vector."""
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    c = np.cos(np.pi * (2 * j + 1) * k / (2 * n)) * math.sqrt(2.0 / n)
    c[0] /= math.sqrt(2.0)
    return c


def hadamard_matrix(n: int) -> np.ndarray:
    """Sylvester-ordered Hadamard matrix scaled by 1/sqrt(n)."""
    if not _is_pow2(n):
        raise DimensionError(f"Hadamard size must be a power of two, got {n}")
    h = np.ones((1, 1))
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return h / math.sqrt(n)


def haar_matrix(n: int) -> np.ndarray:
    """Orthonormal Haar wavelet matrix, rows ordered coarse to fine.

    Row 0 is the constant vector; the remaining rows walk scales
    ``j = 0 .. log2(n) - 1`` and, within a scale, shifts left to right.
    """
    if not _is_pow2(n):
        raise DimensionError(f"Haar size must be a power of two, got {n}")
    h = np.zeros((n, n))
    h[0] = 1.0 / math.sqrt(n)
    row = 1
    scale = 1
    while scale < n:
        width = n // scale
        amp = math.sqrt(scale / n)
        for k in range(scale):
            lo = k * width
            h[row, lo : lo + width // 2] = amp
            h[row, lo + width // 2 : lo + width] = -amp
            row += 1
        scale *= 2
    return h


def fwht(x) -> np.ndarray:
    """Orthonormal fast Walsh-Hadamard transform along the last axis.

    Equivalent to ``hadamard_matrix(n) @ x`` in Sylvester order.
    """
    y = np.array(x, dtype=np.float64, copy=True)
    n = y.shape[-1]
    if not _is_pow2(n):
        raise DimensionError(f"length must be a power of two, got {n}")
    h = 1
    while h < n:
        y = y.reshape(*y.shape[:-1], n // (2 * h), 2, h)
        a = y[..., 0, :].copy()
        b = y[..., 1, :]
        y[..., 0, :] += b
        y[..., 1, :] = a - b
        y = y.reshape(*y.shape[:-3], n)
        h *= 2
    return y / math.sqrt(n)


def build(spec: EnsembleSpec) -> WeightMatrix:
    """Realize ``spec``. A pure function of the spec: equal specs, equal bits."""
    kind, n, m = spec.kind, spec.n, spec.m
    if kind is Kind.DCT:
        entries = dct_matrix(n)[:, :m]
    elif kind is Kind.WALSH_HADAMARD:
        entries = hadamard_matrix(n)
    elif kind is Kind.HAAR:
        entries = haar_matrix(n)
    else:
        entries = draw(kind, n, m, _rng.stream(spec.seed, kind.tag, n, m))
    return WeightMatrix(entries, spec)


def apply(w: WeightMatrix, q) -> np.ndarray:
    """Return ``z = W q``."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape[-1:] != (w.m,):
        raise DimensionError(f"input has length {q.shape[-1] if q.ndim else 0}, weight expects {w.m}")
    return q @ w.entries.T if q.ndim > 1 else w.entries @ q
