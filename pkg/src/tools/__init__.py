"""
Halin Weight Certifier - Tools Package

CONTEXT:
This package contains the certifier's algorithms, organized by concern:

- graph_tools: Graph, plane tree and Halin construction, structural queries
- matrix_tools: A_G, A_G(eta), permanents, column identities, expansion
- alon_tarsi_tools: Eulerian sub-digraph counts, polynomial oracle
- bipartite_tools: Partition, sink/source assignment and block composition
- certifier_tools: Certificate dispatch, search and verification
- weight_tools: Properness, list weighting solver, brute-force choosability

Each tool module provides plain synchronous functions over the models in
src.models.
"""

__all__ = [
    "graph_tools",
    "matrix_tools",
    "alon_tarsi_tools",
    "bipartite_tools",
    "certifier_tools",
    "weight_tools",
]
