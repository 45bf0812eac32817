"""
Halin Weight Certifier - Command Line Interface

CONTEXT:
Batch front end over the library. Subcommands:
- gen:        write a Halin document (random tree, or a wheel)
- certify:    write a certificate and print its provenance
- verify:     recheck a certificate (exit 1 with the reason on failure)
- solve:      write a proper total weighting for a list assignment
- permanent:  print the permanent of a matrix dump
- alon-tarsi: print the even and odd Eulerian sub-digraph counts
- fuzz:       gen -> certify -> verify -> solve over a seed range

EXIT CODES:
    0 success, 1 verification or fuzz failure, 2 input error, 3 scale guard

DEPENDENCIES:
- argparse: Subcommand parsing
- asyncio + concurrent.futures: Concurrent fuzz iterations
- src.storage: Artifact files

USAGE:
    python -m src.cli gen --leaves 6 --seed 3 -o g.json
    python -m src.cli certify g.json -o cert.json
    python -m src.cli verify g.json cert.json
    python -m src.cli fuzz --count 500 --leaves 3..8
"""

import argparse
import asyncio
import logging
import sys
from concurrent.futures import Executor, ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel

from src.config import settings
from src.errors import CertifierError, InputError, ScaleGuardError
from src.models import HalinGraph, HalinKind
from src.storage import ArtifactStore
from src.tools.alon_tarsi_tools import count_eulerian
from src.tools.certifier_tools import (
    build_case_orientation,
    certify,
    orientation_case,
    verify_certificate,
)
from src.tools.graph_tools import bipartition, build_halin, build_wheel, random_plane_tree
from src.tools.matrix_tools import canonical_orientation, permanent_exact, permanent_mod
from src.tools.weight_tools import is_proper, random_list_assignment, solve

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_SCALE = 3

FUZZ_WINDOW = 10


# ============================================================================
# INSTANCE GENERATION
# ============================================================================

def generate_instance(leaf_count: int, seed: int, kind: HalinKind = HalinKind.GENERALIZED) -> HalinGraph:
    """Random Halin graph; generalized instances may subdivide tree edges."""
    tree = random_plane_tree(leaf_count, allow_degree2=kind == HalinKind.GENERALIZED, seed=seed)
    return build_halin(tree, kind)


def parse_leaf_range(text: str) -> Tuple[int, int]:
    """'5' or '3..8' -> inclusive (low, high)."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError as e:
        raise InputError(f"leaf range must look like 5 or 3..8, got {text!r}") from e
    if lo < 3 or hi < lo:
        raise InputError(f"leaf range {text!r} must satisfy 3 <= low <= high")
    return lo, hi


# ============================================================================
# FUZZING
# ============================================================================

class FuzzOutcome(BaseModel):
    seed: int
    leaf_count: int
    failure: Optional[str] = None


class FuzzReport(BaseModel):
    checked: int
    outcomes: List[FuzzOutcome]
    first_failure: Optional[FuzzOutcome] = None
    reproducer: Optional[str] = None


def _instance_for(seed: int, lo: int, hi: int) -> Tuple[int, HalinGraph]:
    leaf_count = lo + seed % (hi - lo + 1)
    kind = HalinKind.GENERALIZED if seed % 2 else HalinKind.STRICT
    return leaf_count, generate_instance(leaf_count, seed, kind)


def check_instance(h: HalinGraph, seed: int) -> Optional[str]:
    """Run the full pipeline on one instance; `<stage>: <detail>` or None."""
    g = h.graph
    try:
        certificate = certify(h)
        report = verify_certificate(g, certificate)
        if not report.ok:
            return f"verification failed: {report.reason}"
        weighting = solve(g, certificate, random_list_assignment(g, 1, 3, FUZZ_WINDOW, seed))
        check = is_proper(g, weighting)
        if not check.proper:
            return f"improper weighting: {check.violating_edge}"
    except CertifierError as e:
        return f"{type(e).__name__}: {e}"
    return None


def failure_kind(failure: str) -> str:
    """The stage or exception name a check_instance failure starts with."""
    return failure.split(":", 1)[0]


def fuzz_one(seed: int, lo: int, hi: int) -> FuzzOutcome:
    leaf_count, h = _instance_for(seed, lo, hi)
    return FuzzOutcome(seed=seed, leaf_count=leaf_count, failure=check_instance(h, seed))


def shrink_failure(outcome: FuzzOutcome, attempts: int = 20) -> HalinGraph:
    """
    Smallest failing instance found by lowering the leaf count.

    Each smaller leaf count regenerates trees from the failing seed onwards
    and keeps the first one that fails at the same stage (or with the same
    exception) as the original.
    """
    wanted = failure_kind(outcome.failure or "")
    kind = HalinKind.GENERALIZED if outcome.seed % 2 else HalinKind.STRICT
    best = generate_instance(outcome.leaf_count, outcome.seed, kind)
    for leaf_count in range(3, outcome.leaf_count):
        for seed in range(outcome.seed, outcome.seed + attempts):
            candidate = generate_instance(leaf_count, seed, kind)
            failure = check_instance(candidate, seed)
            if failure is None:
                continue
            if failure_kind(failure) != wanted:
                logger.debug(f"Skipped {leaf_count} leaves (seed {seed}): {failure}")
                continue
            logger.info(f"Shrunk failure to {leaf_count} leaves (seed {seed})")
            return candidate
    return best


async def fuzz(
    count: int,
    leaf_range: Tuple[int, int],
    seed: int = 0,
    workers: Optional[int] = None,
    out_dir: Optional[Path] = None,
) -> FuzzReport:
    """
    Run `count` pipeline checks over seeds seed..seed+count-1.

    Outcomes are reported in seed order; the failure with the smallest seed
    is minimized and written to out_dir as a Halin document.
    """
    workers = workers if workers is not None else settings.fuzz_workers
    lo, hi = leaf_range
    loop = asyncio.get_running_loop()
    executor: Optional[Executor] = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    logger.info(f"Fuzzing {count} instances, leaves {lo}..{hi}, {workers} worker(s)")
    try:
        outcomes = await asyncio.gather(*(
            loop.run_in_executor(executor, fuzz_one, s, lo, hi) for s in range(seed, seed + count)
        ))
    finally:
        if executor is not None:
            executor.shutdown()

    failures = [o for o in outcomes if o.failure is not None]
    report = FuzzReport(checked=len(outcomes), outcomes=list(outcomes))
    if failures:
        first = failures[0]
        logger.warning(f"Fuzz failure at seed {first.seed}: {first.failure}")
        reproducer = shrink_failure(first)
        store = ArtifactStore(out_dir)
        path = store.write_halin(f"reproducer-seed-{first.seed}.json", reproducer)
        report = report.model_copy(update={"first_failure": first, "reproducer": str(path)})
    return report


# ============================================================================
# SUBCOMMANDS
# ============================================================================

def _cmd_gen(args: argparse.Namespace, store: ArtifactStore) -> int:
    kind = HalinKind(args.kind)
    if args.wheel is not None:
        h = build_wheel(args.wheel)
    else:
        h = generate_instance(args.leaves, args.seed if args.seed is not None else settings.default_seed, kind)
    path = store.write_halin(args.output, h)
    print(f"wrote {path}: |V|={h.graph.vertex_count} |E|={h.graph.edge_count} leaves={len(h.cycle)}")
    return EXIT_OK


def _cmd_certify(args: argparse.Namespace, store: ArtifactStore) -> int:
    h = store.read_halin(args.graph)
    c = certify(h)
    path = store.write_certificate(args.output, c)
    doubled = sum(1 for n in c.eta.edges.values() if n == 2)
    print(f"provenance: {c.provenance.value}")
    print(f"permanent: {c.permanent}")
    print(f"doubled edge columns: {doubled}")
    if "fallback" in c.aux:
        print(f"fallback reason: {c.aux['fallback']}")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace, store: ArtifactStore) -> int:
    g = store.read_graph(args.graph)
    c = store.read_certificate(args.certificate)
    report = verify_certificate(g, c)
    if report.ok:
        print(f"ok: permanent {report.permanent}")
        return EXIT_OK
    print(f"rejected: {report.reason}")
    return EXIT_FAILED


def _cmd_solve(args: argparse.Namespace, store: ArtifactStore) -> int:
    g = store.read_graph(args.graph)
    c = store.read_certificate(args.certificate)
    if args.lists:
        lists = store.read_lists(args.lists)
    else:
        seed = args.seed if args.seed is not None else settings.default_seed
        lists = random_list_assignment(g, 1, 3, args.window, seed)
    weighting = solve(g, c, lists)
    path = store.write_weighting(args.output, weighting)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_permanent(args: argparse.Namespace, store: ArtifactStore) -> int:
    matrix = store.read_matrix(args.matrix)
    print(permanent_mod(matrix, args.modulus) if args.modulus else permanent_exact(matrix))
    return EXIT_OK


def _cmd_alon_tarsi(args: argparse.Namespace, store: ArtifactStore) -> int:
    doc = store.read_json(args.graph)
    if "tree" in doc and args.orientation == "case":
        h = store.read_halin(args.graph)
        if bipartition(h.graph).is_bipartite or (h.is_wheel and len(h.cycle) % 2):
            raise InputError("the case orientation needs a non-bipartite Halin graph that is not an odd wheel")
        case = orientation_case(h)
        d = build_case_orientation(h, case)
        print(f"case: {case.value}")
    else:
        d = canonical_orientation(store.read_graph(args.graph))
    counts = count_eulerian(d)
    print(f"EE: {counts.even_count}")
    print(f"EO: {counts.odd_count}")
    print(f"difference: {counts.difference}")
    return EXIT_OK


def _cmd_fuzz(args: argparse.Namespace, store: ArtifactStore) -> int:
    seed = args.seed if args.seed is not None else settings.default_seed
    report = asyncio.run(fuzz(args.count, parse_leaf_range(args.leaves), seed, args.workers, store.base_dir))
    if report.first_failure is None:
        print(f"fuzz: {report.checked} instances passed")
        return EXIT_OK
    print(f"fuzz: failure at seed {report.first_failure.seed}: {report.first_failure.failure}")
    print(f"reproducer: {report.reproducer}")
    return EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m src.cli",
        description="Certify (1,3)-total-weight choosability of generalized Halin graphs",
    )
    parser.add_argument("--workdir", type=Path, default=None, help="Base directory for relative paths")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="Generate a Halin document")
    p.add_argument("--leaves", type=int, default=5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--kind", choices=[k.value for k in HalinKind], default=HalinKind.GENERALIZED.value)
    p.add_argument("--wheel", type=int, default=None, help="Build the wheel W_n instead")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=_cmd_gen)

    p = sub.add_parser("certify", help="Produce a certificate")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=_cmd_certify)

    p = sub.add_parser("verify", help="Recheck a certificate")
    p.add_argument("graph")
    p.add_argument("certificate")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("solve", help="Find a proper total weighting")
    p.add_argument("graph")
    p.add_argument("certificate")
    p.add_argument("--lists", default=None, help="List assignment document (random (1,3) lists otherwise)")
    p.add_argument("--window", type=int, default=FUZZ_WINDOW)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("permanent", help="Permanent of a matrix dump")
    p.add_argument("matrix")
    p.add_argument("--modulus", type=int, default=None)
    p.set_defaults(handler=_cmd_permanent)

    p = sub.add_parser("alon-tarsi", help="Eulerian sub-digraph counts")
    p.add_argument("graph")
    p.add_argument("--orientation", choices=["case", "canonical"], default="case")
    p.set_defaults(handler=_cmd_alon_tarsi)

    p = sub.add_parser("fuzz", help="Pipeline fuzzing over seeds")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--leaves", default="3..8")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(handler=_cmd_fuzz)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run one subcommand and return its exit status."""
    args = build_parser().parse_args(argv)
    store = ArtifactStore(args.workdir)
    try:
        return args.handler(args, store)
    except InputError as e:
        logger.error(f"Input error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ScaleGuardError as e:
        logger.error(f"Scale guard: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCALE
    except CertifierError as e:
        logger.error(f"Internal consistency failure: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
