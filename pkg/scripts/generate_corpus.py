#!/usr/bin/env python3
"""
Halin Weight Certifier - Corpus Generation Script

This script builds a certified corpus on disk:
1. Every generalized Halin graph from plane trees up to a vertex bound
2. Seeded random instances up to a leaf bound

Each instance is certified and verified; graph and certificate documents are
written side by side and a provenance summary is printed at the end.

Context:
- Output directory defaults to corpus/ (override with --out)
- Instances whose certificate needed the search fallback are listed for triage
- Exit status 1 when a certificate fails verification or search dominates

Usage:
    python scripts/generate_corpus.py --max-vertices 8 --random 500 --max-leaves 9
"""

import argparse
import sys
import time
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.errors import CertifierError  # noqa: E402
from src.models import HalinGraph, HalinKind, Provenance  # noqa: E402
from src.storage import ArtifactStore  # noqa: E402
from src.tools.certifier_tools import certify, verify_certificate  # noqa: E402
from src.tools.graph_tools import build_halin, enumerate_plane_trees, random_plane_tree  # noqa: E402

CONSTRUCTIVE_SHARE = 0.9


class CorpusGenerator:
    def __init__(self, out_dir: Path):
        self.store = ArtifactStore(out_dir)
        self.provenance: Counter = Counter()
        self.stats = {
            "instances": 0,
            "slowest": 0.0,
            "fallbacks": [],
            "errors": [],
        }

    def certify_one(self, name: str, h: HalinGraph) -> None:
        """Certify, verify and store one instance"""
        started = time.perf_counter()
        try:
            c = certify(h)
        except CertifierError as e:
            self.stats["errors"].append(f"{name}: {e}")
            print(f"  ⚠️  {name}: {e}")
            return
        elapsed = time.perf_counter() - started
        self.stats["slowest"] = max(self.stats["slowest"], elapsed)

        report = verify_certificate(h.graph, c)
        if not report.ok:
            self.stats["errors"].append(f"{name}: verification failed ({report.reason})")
            print(f"  ⚠️  {name}: verification failed ({report.reason})")
            return

        self.store.write_halin(f"{name}.graph.json", h)
        self.store.write_certificate(f"{name}.cert.json", c)
        self.provenance[c.provenance.value] += 1
        self.stats["instances"] += 1
        if c.provenance == Provenance.SEARCH:
            self.stats["fallbacks"].append(f"{name}: {c.aux.get('fallback', 'search only')}")

    def exhaustive_family(self, max_vertices: int) -> None:
        """Every plane tree with at least three leaves up to max_vertices"""
        print("\n🌳 Exhaustive family...")
        print("=" * 60)
        for n in range(4, max_vertices + 1):
            trees = list(enumerate_plane_trees(n))
            for i, tree in enumerate(trees):
                self.certify_one(f"tree-{n}-{i:04d}", build_halin(tree))
            print(f"  ✓ {n} vertices: {len(trees)} trees")

    def random_instances(self, count: int, max_leaves: int, seed: int) -> None:
        """Seeded random trees with 3..max_leaves leaves, alternating strict and generalized"""
        print("\n🎲 Random instances...")
        print("=" * 60)
        for s in range(seed, seed + count):
            leaves = 3 + s % (max_leaves - 2)
            degree2 = s % 2 == 1
            kind = HalinKind.GENERALIZED if degree2 else HalinKind.STRICT
            h = build_halin(random_plane_tree(leaves, allow_degree2=degree2, seed=s), kind)
            self.certify_one(f"random-{s:06d}", h)
        print(f"  ✓ {count} seeds from {seed}")

    def run(self, args: argparse.Namespace) -> int:
        """Execute full corpus generation"""
        if args.max_leaves < 3:
            print("❌ --max-leaves must be at least 3")
            return 2
        print("\n" + "=" * 60)
        print("Halin Weight Certifier - Corpus Generation")
        print("=" * 60)

        self.exhaustive_family(args.max_vertices)
        if args.random:
            self.random_instances(args.random, args.max_leaves, args.seed)

        total = self.stats["instances"]
        search = self.provenance.get(Provenance.SEARCH.value, 0)
        print(f"\n📊 Summary ({self.store.base_dir}):")
        print(f"  • Certified: {total}")
        for name, n in sorted(self.provenance.items()):
            print(f"  • {name}: {n}")
        print(f"  • Slowest certificate: {self.stats['slowest']:.2f}s")
        for line in self.stats["fallbacks"]:
            print(f"  • fallback {line}")
        if self.stats["errors"]:
            print(f"  • Errors: {len(self.stats['errors'])}")
            return 1
        if total and (total - search) / total < CONSTRUCTIVE_SHARE:
            print(f"\n❌ Only {total - search} of {total} certificates are constructive")
            return 1
        print("\n✅ CORPUS COMPLETE")
        return 0


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Generate a certified Halin graph corpus")
    parser.add_argument("--out", type=Path, default=Path("corpus"))
    parser.add_argument("--max-vertices", type=int, default=8)
    parser.add_argument("--random", type=int, default=0, help="Number of random instances")
    parser.add_argument("--max-leaves", type=int, default=9)
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args()


if __name__ == "__main__":
    arguments = parse_args()
    generator = CorpusGenerator(arguments.out)
    sys.exit(generator.run(arguments))
