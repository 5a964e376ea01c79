"""Exact intersection-lattice computations on configurations of curves."""
from __future__ import annotations

from .config import (
    Configuration,
    ConfigurationError,
    Curve,
    GramMatrix,
    QDivisor,
    adjoint_pairing,
    canonical_lattice,
    gram_matrix,
    is_rational_tree,
    load_configuration,
    parse_configuration,
    round_up,
)
from .linalg import HypothesisError, definiteness, determinant, is_negative_definite
from .zariski import ZariskiDecomposition, chain_forcing, coefficient_upper_bounds, zariski_decompose

__all__ = [
    "Configuration",
    "ConfigurationError",
    "Curve",
    "GramMatrix",
    "HypothesisError",
    "QDivisor",
    "ZariskiDecomposition",
    "adjoint_pairing",
    "canonical_lattice",
    "chain_forcing",
    "coefficient_upper_bounds",
    "definiteness",
    "determinant",
    "gram_matrix",
    "is_negative_definite",
    "is_rational_tree",
    "load_configuration",
    "parse_configuration",
    "round_up",
    "zariski_decompose",
]
