"""Random-weight blocks with a sign splitter and ReLU, plus numerical checks
of their distance-contraction and restricted-isometry bounds."""

from .analysis import (
    BlockBoundCheck,
    MatchedSignSet,
    PairAnalysis,
    RobustnessBound,
    SignDecomposition,
    analyze_pair,
    decompose,
    matched_set,
    verify_block_bounds,
)
from .block import Block, BlockOutput, relu, sign_split_forward
from .ensembles import EnsembleSpec, Kind, WeightMatrix, apply, build
from .errors import ConfigError, DegeneratePairError, DimensionError, LayerCollapseError
from .network import (
    ChainBoundReport,
    LayerTrace,
    Network,
    NetworkSpec,
    analyze_chain,
    build_network,
    forward_chain,
)
from .rip import RipEstimate, dimension_rule, estimate_ric

__version__ = "0.1.0"

__all__ = [
    "Block",
    "BlockBoundCheck",
    "BlockOutput",
    "ChainBoundReport",
    "ConfigError",
    "DegeneratePairError",
    "DimensionError",
    "EnsembleSpec",
    "Kind",
    "LayerCollapseError",
    "LayerTrace",
    "MatchedSignSet",
    "Network",
    "NetworkSpec",
    "PairAnalysis",
    "RipEstimate",
    "RobustnessBound",
    "SignDecomposition",
    "WeightMatrix",
    "analyze_chain",
    "analyze_pair",
    "apply",
    "build",
    "build_network",
    "decompose",
    "dimension_rule",
    "estimate_ric",
    "forward_chain",
    "matched_set",
    "relu",
    "sign_split_forward",
    "verify_block_bounds",
]
