"""motkit: Chow motives of split varieties over GF(p), computed exactly."""

from .chow import ChowModel, SplitChowStructure, projective_space, split_quadric_odd, tensor_product
from .correspondence import Correspondence, compose, diagonal, transpose

__all__ = [
    "ChowModel", "SplitChowStructure", "projective_space", "split_quadric_odd", "tensor_product",
    "Correspondence", "compose", "diagonal", "transpose",
]
__version__ = "0.1.0"
