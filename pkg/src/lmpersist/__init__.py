"""Persistent homology of Linial-Meshulam filtrations and its large-n limits."""

from .complex import LMFiltration, derive_seed, promoting_count, sample_filtration
from .linalg import SparseSignMatrix, leaf_removal, rank_mod_p
from .persistence import VerboseDiagram, betti_grid, persistent_betti, reduce_diagram

__all__ = [
    "LMFiltration",
    "SparseSignMatrix",
    "VerboseDiagram",
    "betti_grid",
    "derive_seed",
    "leaf_removal",
    "persistent_betti",
    "promoting_count",
    "rank_mod_p",
    "reduce_diagram",
    "sample_filtration",
]

__version__ = "0.1.0"
