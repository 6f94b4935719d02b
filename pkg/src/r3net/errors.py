"""Exception types shared across modules."""


class DimensionError(ValueError):
    """Shapes or sizes are incompatible."""


class DegeneratePairError(ValueError):
    """The two vectors of a pair are identical, so no contraction constant exists."""


class LayerCollapseError(DegeneratePairError):
    """Two distinct inputs produced identical pre-activations at an inner layer."""

    def __init__(self, layer: int):
        self.layer = layer
        super().__init__(f"pre-activations coincide at layer {layer}")


class ConfigError(ValueError):
    """Invalid experiment configuration."""
