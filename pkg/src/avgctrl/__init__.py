"""Structural averaged controllability of sparsity patterns.

Graph tests, exact monomial certificates built on sparse Hilbert
matrices, and a numeric ensemble simulator for cross-checking them.
"""

from .analysis import AnalysisReport, analyze
from .construction import (
    Certificate,
    averaged_rank_test,
    controllability_matrix,
    monomial_certificate,
)
from .graph import SparsityPattern, accessible, load_pattern, parse_pattern
from .hilbert import hilbert, sparse_hilbert, verify_single_truncation
from .poly import Polynomial, PolyMatrix, RationalMatrix

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "Certificate",
    "PolyMatrix",
    "Polynomial",
    "RationalMatrix",
    "SparsityPattern",
    "accessible",
    "analyze",
    "averaged_rank_test",
    "controllability_matrix",
    "hilbert",
    "load_pattern",
    "monomial_certificate",
    "parse_pattern",
    "sparse_hilbert",
    "verify_single_truncation",
]
