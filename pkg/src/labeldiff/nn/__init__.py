from .layers import (Conv2d, GroupNorm, Linear, NearestUpsample2x, Param, SiLU,
                     sigmoid, sinusoidal_embedding)
from .optim import Adam

__all__ = ["Adam", "Conv2d", "GroupNorm", "Linear", "NearestUpsample2x", "Param",
           "SiLU", "sigmoid", "sinusoidal_embedding"]
