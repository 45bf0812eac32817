"""
Halin Weight Certifier

A library and command line tool that certifies generalized Halin graphs as
(1,3)-total-weight-choosable by constructing permanent-non-singular
(0,2)-matrices, and turns those certificates into proper list total
weightings.

Features:
- Halin graph construction, random and exhaustive generators
- Coefficient matrices and exact permanents
- Eulerian sub-digraph counts and graph polynomial expansion
- Constructive certificates for bipartite and non-bipartite cases
- List total weighting solver and brute-force choosability checks

Usage:
    # Command line
    python -m src.cli certify graph.json -o certificate.json

    # Library
    from src.tools.certifier_tools import certify
"""

__version__ = "1.0.0"
__author__ = "Halin Weight Certifier Team"
__license__ = "MIT"

from src.config import settings
from src.storage import ArtifactStore
from src import models

__all__ = [
    "settings",
    "ArtifactStore",
    "models",
]
