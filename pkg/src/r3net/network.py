"""Chains of blocks and the multiplicative distance bounds across layers."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .analysis import PairAnalysis, analyze_pair, leq
from .block import Block
from .ensembles import EnsembleSpec, Kind, build
from .errors import DegeneratePairError, DimensionError, LayerCollapseError

# Chain products accumulate rounding from every layer.
CHAIN_RTOL = 1e-10


@dataclass(frozen=True)
class NetworkSpec:
    layers: tuple[EnsembleSpec, ...]
    splitter: bool = True
    input_dim: int = 0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))

    def expected_cols(self, layer: int) -> int:
        """Input width required of 0-based ``layer`` by the dimension schedule."""
        if layer == 0:
            return self.input_dim
        prev = self.layers[layer - 1].n
        return 2 * prev if self.splitter else prev

    def validate(self) -> None:
        if not self.layers:
            raise DimensionError("a network needs at least one layer")
        if self.input_dim < 1:
            raise DimensionError(f"input_dim must be positive, got {self.input_dim}")
        for i, layer in enumerate(self.layers):
            want = self.expected_cols(i)
            if layer.m != want:
                raise DimensionError(
                    f"layer {i + 1} has {layer.m} columns, the schedule requires {want}"
                )

    @classmethod
    def uniform(
        cls,
        kind: Kind | str,
        rows: Sequence[int],
        input_dim: int,
        splitter: bool = True,
        seed: int = 0,
    ) -> NetworkSpec:
        """Same ensemble at every layer, columns filled in from the schedule.

        Layer ``l`` (1-based) gets the child seed ``derive_seed(seed, l)``.
        """
        kind = Kind.parse(kind)
        layers = []
        cols = input_dim
        for i, n in enumerate(rows):
            layers.append(EnsembleSpec(kind, n, cols, _rng.derive_seed(seed, i + 1)))
            cols = 2 * n if splitter else n
        return cls(tuple(layers), splitter, input_dim)


@dataclass(frozen=True, eq=False)
class Network:
    spec: NetworkSpec
    blocks: tuple[Block, ...]

    @property
    def depth(self) -> int:
        return len(self.blocks)

    @property
    def output_dim(self) -> int:
        return self.blocks[-1].output_dim

    @property
    def orthonormal(self) -> bool:
        return all(b.weights.orthonormal for b in self.blocks)


@dataclass(frozen=True)
class LayerTrace:
    z: list[np.ndarray] = field(repr=False)
    y: list[np.ndarray] = field(repr=False)
    l0: list[int]

    @property
    def output(self) -> np.ndarray:
        return self.y[-1]


@dataclass(frozen=True)
class ChainBoundReport:
    kappas: list[float]
    deltas: list[float]
    lower: float
    upper: float
    input_dist_sq: float
    output_dist_sq: float
    layer_dist_sq: list[float]
    layers: list[PairAnalysis] = field(repr=False)
    verdict: bool

    @property
    def ratio(self) -> float:
        return self.output_dist_sq / self.input_dist_sq

    @property
    def layer_ratios(self) -> list[float]:
        """Output-to-input squared-distance ratio of each layer."""
        d = [self.input_dist_sq, *self.layer_dist_sq]
        return [d[i + 1] / d[i] for i in range(len(self.layer_dist_sq))]


def build_network(spec: NetworkSpec) -> Network:
    spec.validate()
    return Network(spec, tuple(Block(build(layer), spec.splitter) for layer in spec.layers))


def forward_chain(net: Network, x) -> LayerTrace:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.spec.input_dim,):
        raise DimensionError(f"input has shape {x.shape}, network expects ({net.spec.input_dim},)")
    zs, ys, counts = [], [], []
    q = x
    for b in net.blocks:
        out = b.forward(q)
        zs.append(out.z)
        ys.append(out.y)
        counts.append(out.l0)
        q = out.y
    return LayerTrace(zs, ys, counts)


def analyze_chain(net: Network, x1, x2, deltas: Sequence[float] | None = None) -> ChainBoundReport:
    """Per-layer contraction constants and the product bounds for one pair.

    ``deltas`` holds one RIC estimate per layer; it may be omitted only for a
    chain whose layers are all orthonormal, where every estimate is zero.

    Raises
    ------
    DegeneratePairError
        If ``x1 == x2``.
    LayerCollapseError
        If the pair's pre-activations coincide at some layer (``.layer`` is
        1-based).
    """
    if not net.spec.splitter:
        raise ValueError("chain bounds need the sign splitter; plain ReLU has a zero lower bound")
    if deltas is None:
        if not net.orthonormal:
            raise ValueError("deltas are required unless every layer is orthonormal")
        deltas = [0.0] * net.depth
    deltas = [float(d) for d in deltas]
    if len(deltas) != net.depth:
        raise ValueError(f"need {net.depth} deltas, got {len(deltas)}")
    if any(not 0.0 <= d < 1.0 for d in deltas):
        raise ValueError(f"deltas must lie in [0, 1), got {deltas}")

    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if np.array_equal(x1, x2):
        raise DegeneratePairError("inputs are identical")
    t1, t2 = forward_chain(net, x1), forward_chain(net, x2)

    layers = []
    for i, (z1, z2) in enumerate(zip(t1.z, t2.z)):
        if np.array_equal(z1, z2):
            raise LayerCollapseError(i + 1)
        try:
            layers.append(analyze_pair(z1, z2))
        except DegeneratePairError:
            raise LayerCollapseError(i + 1) from None

    kappas = [pa.kappa for pa in layers]
    lower = math.prod(k * (1.0 - d) for k, d in zip(kappas, deltas))
    upper = math.prod(1.0 + d for d in deltas)
    din = float(np.sum((x1 - x2) ** 2))
    dist = [pa.ybar_dist_sq for pa in layers]
    dout = dist[-1]
    verdict = leq(lower * din, dout, CHAIN_RTOL) and leq(dout, upper * din, CHAIN_RTOL)
    return ChainBoundReport(
        kappas=kappas,
        deltas=deltas,
        lower=lower,
        upper=upper,
        input_dist_sq=din,
        output_dist_sq=dout,
        layer_dist_sq=dist,
        layers=layers,
        verdict=verdict,
    )
