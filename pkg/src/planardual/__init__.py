"""Geometric and abstract duality of planar multigraphs.

Set ``PLANARDUAL_NO_NUMBA=1`` before import to run the pure-numpy kernels.
"""

from .bijection import EdgeBijection, compose
from .chains import (
    DualityChain,
    DualityStep,
    GeometricDualPair,
    SimilarityChain,
    compress_chain,
    duality_chain_2iso,
    duality_chain_adual,
    normalize_to_star,
    realize_2iso,
    reduce_cut_vertices,
    verify_chain,
)
from .embed import Embedding, enumerate_spherical_embeddings, find_dual_embedding, geometric_dual
from .errors import PlanarDualError
from .graphcore import MultiGraph, blocks, components, cut_vertices, one_point_union, rank
from .knot import (
    CheckerboardPair,
    Crossing,
    LinkDiagram,
    checkerboard,
    diagram_chain,
    diagram_from_signed_gdp,
    goeritz,
    shared_checkerboard,
)
from .matroid import (
    find_2_isomorphism,
    find_abstract_duality,
    is_2_isomorphism,
    is_abstract_duality,
    is_graph_isomorphism,
)

__version__ = "0.1.0"
