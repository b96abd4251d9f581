"""Self-affine sets K = A^{-1}(K + D): neighbor sets, augmented trees,
simplicity (total disconnectedness), dimensions and w-Lipschitz classification."""

from .affine_core import AffineSystem, validate_system, word_offset, residue_check, map_fixed_point, bounding_box
from .pseudo_norm import PseudoNormEvaluator
from .neighbor_set import NeighborSet, compute as compute_neighbors, brute_force_oracle
from .augmented_tree import expand, LazyTree, gromov_product
from .simplicity import decide as decide_simplicity, Limits
from .dimension import w_dimension, mcmullen_dimension, dimension_report
from .equivalence import decide as decide_equivalence
from .files import SystemSpec, parse_spec, load_fixture

__all__ = [
    "AffineSystem", "validate_system", "word_offset", "residue_check", "map_fixed_point", "bounding_box",
    "PseudoNormEvaluator", "NeighborSet", "compute_neighbors", "brute_force_oracle",
    "expand", "LazyTree", "gromov_product", "decide_simplicity", "Limits",
    "w_dimension", "mcmullen_dimension", "dimension_report", "decide_equivalence",
    "SystemSpec", "parse_spec", "load_fixture",
]
