__version__ = "0.1.0"

from giantatom.model import (
    Boundary, CouplingConfig, Emitter, HamiltonianMatrix, LatticeParams, LegMode, SiteIndexing, Variant, assemble,
)
from giantatom.spectral import SpectrumResult, StateClass, classify_states, eigendecompose

__all__ = [
    "Boundary", "CouplingConfig", "Emitter", "HamiltonianMatrix", "LatticeParams", "LegMode", "SiteIndexing",
    "SpectrumResult", "StateClass", "Variant", "assemble", "classify_states", "eigendecompose",
]
