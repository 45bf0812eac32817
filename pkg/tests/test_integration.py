"""
End-to-End Integration Tests for the Halin Weight Certifier

This module runs the whole pipeline (certify, verify, solve) over the
exhaustive family of small generalized Halin graphs and over seeded random
instances, the way the fuzz driver does.

Context:
- Small trees come from enumerate_plane_trees, larger ones from random_plane_tree
- Every certificate must be edge-only, capped at 2 and verify exactly
- Fallbacks to search are tolerated but must stay rare
"""

from collections import Counter
from random import Random

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.models import HalinKind, Provenance
from src.storage import ArtifactStore
from src.tools.certifier_tools import certify, verify_certificate
from src.tools.graph_tools import build_halin, enumerate_plane_trees, random_plane_tree
from src.tools.weight_tools import is_proper, random_list_assignment, solve


def _pipeline(h, seed: int = 0):
    g = h.graph
    c = certify(h)
    assert not c.eta.vertices
    assert c.eta.max_edge() <= 2
    report = verify_certificate(g, c)
    assert report.ok, report.reason
    w = solve(g, c, random_list_assignment(g, 1, 3, 10, seed))
    assert is_proper(g, w).proper
    return c


@pytest.mark.integration
@pytest.mark.e2e
class TestSmallFamily:
    """Every generalized Halin graph up to eleven tree vertices"""

    @pytest.mark.parametrize("vertex_count", [
        4, 5, 6, 7,
        *(pytest.param(n, marks=pytest.mark.slow) for n in range(8, 12)),
    ])
    def test_exhaustive_family(self, vertex_count):
        """
        GIVEN: All plane trees on the given number of vertices with at least 3 leaves
        WHEN: Each Halin closure goes through certify, verify and solve
        THEN: Every step succeeds
        """
        trees = list(enumerate_plane_trees(vertex_count))
        assert trees
        for i, tree in enumerate(trees):
            _pipeline(build_halin(tree), seed=i)

    @pytest.mark.slow
    def test_constructive_share(self):
        """At least nine in ten certificates come from a construction rather than search."""
        provenance = Counter()
        for n in range(4, 12):
            for tree in enumerate_plane_trees(n):
                provenance[certify(build_halin(tree)).provenance] += 1
        total = sum(provenance.values())
        assert provenance[Provenance.SEARCH] <= total // 10, dict(provenance)


@pytest.mark.integration
@pytest.mark.e2e
@pytest.mark.slow
class TestRandomInstances:

    @hsettings(max_examples=25, deadline=None)
    @given(leaves=st.integers(3, 9), seed=st.integers(0, 100_000), degree2=st.booleans())
    def test_random_pipeline(self, leaves, seed, degree2):
        kind = HalinKind.GENERALIZED if degree2 else HalinKind.STRICT
        h = build_halin(random_plane_tree(leaves, allow_degree2=degree2, seed=seed), kind)
        _pipeline(h, seed)

    def test_five_hundred_seeded_instances(self):
        """
        GIVEN: Seeded random trees with 3..8 leaves and at most 14 vertices
        WHEN: 500 of their Halin closures go through the pipeline
        THEN: Every step succeeds
        """
        rng = Random(6174)
        done = 0
        for seed in range(10_000):
            degree2 = seed % 2 == 1
            tree = random_plane_tree(rng.randint(3, 8), allow_degree2=degree2, seed=seed)
            if len(tree.vertices) > 14:
                continue
            kind = HalinKind.GENERALIZED if degree2 else HalinKind.STRICT
            _pipeline(build_halin(tree, kind), seed)
            done += 1
            if done == 500:
                break
        assert done == 500

    def test_one_certificate_serves_many_list_assignments(self):
        """
        GIVEN: 20 certified instances
        WHEN: Each is solved against 200 seeded (1,3)-list assignments
        THEN: Every weighting is proper
        """
        for seed in range(20):
            h = build_halin(random_plane_tree(3 + seed % 5, allow_degree2=seed % 2 == 1, seed=seed))
            g = h.graph
            c = certify(h)
            for list_seed in range(200):
                w = solve(g, c, random_list_assignment(g, 1, 3, 10, list_seed))
                assert is_proper(g, w).proper

    def test_artifacts_survive_the_disk(self, tmp_path):
        """
        GIVEN: A random generalized instance
        WHEN: Graph, certificate and weighting are written and read back
        THEN: The reloaded certificate still verifies and the weighting is still proper
        """
        store = ArtifactStore(tmp_path)
        h = build_halin(random_plane_tree(8, allow_degree2=True, seed=42))
        c = _pipeline(h, 42)
        store.write_halin("g.json", h)
        store.write_certificate("c.json", c)
        g = store.read_graph("g.json")
        reloaded = store.read_certificate("c.json")
        assert reloaded.permanent == c.permanent
        assert verify_certificate(g, reloaded).ok
        w = solve(g, reloaded, random_list_assignment(g, 1, 3, 10, 7))
        store.write_weighting("w.json", w)
        assert is_proper(g, store.read_weighting("w.json")).proper
