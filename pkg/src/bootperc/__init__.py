"""Anisotropic bootstrap percolation: exact closures, spanning analysis and Monte Carlo."""
__version__ = "0.1.0"

from .engine import UpdateFamily, closure, make_nr_family, percolates, step
from .estimators import BootstrapClosure, CriticalLengthEstimator
from .families import CriticalityLabel, Direction, classify_nr, is_stable_direction, stable_set_descriptor
from .lattice import Block, Configuration, NeighborhoodSpec, bounding_block, long, neighborhood_offsets
from .spanning import StrongGraphParam, al_witness, components_process, diam, strong_components

__all__ = [
    "Block",
    "BootstrapClosure",
    "Configuration",
    "CriticalLengthEstimator",
    "CriticalityLabel",
    "Direction",
    "NeighborhoodSpec",
    "StrongGraphParam",
    "UpdateFamily",
    "al_witness",
    "bounding_block",
    "classify_nr",
    "closure",
    "components_process",
    "diam",
    "is_stable_direction",
    "long",
    "make_nr_family",
    "neighborhood_offsets",
    "percolates",
    "stable_set_descriptor",
    "step",
    "strong_components",
]
