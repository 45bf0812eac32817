"""
Halin Weight Certifier - Artifact Store

CONTEXT:
This module reads and writes every on-disk artifact of the certifier:
- Graph / Halin documents
- Certificates and index functions
- List assignments and total weightings
- Matrix dumps (header "rows cols", then one space-separated row per line)

JSON is written canonically (sorted keys, 2-space indent, trailing newline)
so the same artifact is byte-identical across runs. Every document is
validated through the pydantic models; malformed files surface as InputError
naming the file and, for JSON syntax errors, the line and column.

DEPENDENCIES:
- pydantic: Document validation
- src.models: Artifact schemas
- src.tools.graph_tools: Plain graph documents are normalised through build_graph

USAGE:
    from src.storage import ArtifactStore

    store = ArtifactStore("runs/w7")
    store.write_halin("graph.json", build_wheel(7))
    halin = store.read_halin("graph.json")
"""

import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, TypeVar, Union

from pydantic import ValidationError

from src.errors import InputError
from src.models import (
    Certificate,
    Graph,
    HalinGraph,
    IndexFunction,
    ListAssignment,
    TotalWeighting,
    parse_edge_key,
)
from src.tools.graph_tools import build_graph

logger = logging.getLogger(__name__)

T = TypeVar("T")
PathLike = Union[str, Path]


def canonical_json(doc: Any) -> str:
    """Sorted keys, 2-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


class ArtifactStore:
    """
    File-system store for certifier artifacts.

    Relative names resolve against the base directory; absolute paths are
    used as given.
    """

    def __init__(self, base_dir: Optional[PathLike] = None):
        self._base = Path(base_dir) if base_dir is not None else Path.cwd()
        logger.debug(f"Artifact store rooted at {self._base}")

    @property
    def base_dir(self) -> Path:
        return self._base

    def path(self, name: PathLike) -> Path:
        p = Path(name)
        return p if p.is_absolute() else self._base / p

    # ========================================================================
    # RAW DOCUMENTS
    # ========================================================================

    def read_json(self, name: PathLike) -> Any:
        """
        Load a JSON document.

        Raises:
            InputError: Missing file or malformed JSON, with its location
        """
        p = self.path(name)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as e:
            logger.error(f"Cannot read {p}: {e}")
            raise InputError(f"{p}: cannot read file ({e.strerror})") from e
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            logger.error(f"Malformed JSON in {p} at line {e.lineno}, column {e.colno}")
            raise InputError(f"{p}:{e.lineno}:{e.colno}: {e.msg}") from e

    def write_json(self, name: PathLike, doc: Any) -> Path:
        p = self.path(name)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(canonical_json(doc), encoding="utf-8")
        logger.debug(f"Wrote {p}")
        return p

    def _load(self, name: PathLike, parse: Callable[[Any], T]) -> T:
        doc = self.read_json(name)
        try:
            return parse(doc)
        except (ValidationError, ValueError, KeyError, TypeError) as e:
            logger.error(f"Invalid document {self.path(name)}: {e}")
            raise InputError(f"{self.path(name)}: {e}") from e

    # ========================================================================
    # GRAPHS
    # ========================================================================

    def read_halin(self, name: PathLike) -> HalinGraph:
        return self._load(name, HalinGraph.from_document)

    def write_halin(self, name: PathLike, h: HalinGraph) -> Path:
        return self.write_json(name, h.to_document())

    def read_graph(self, name: PathLike) -> Graph:
        """Plain graph from a Graph or Halin document (the tree is ignored)."""
        def parse(doc: Dict[str, Any]) -> Graph:
            if "tree" in doc and "edges" not in doc:
                return HalinGraph.from_document(doc).graph
            return build_graph((parse_edge_key(e) for e in doc["edges"]), doc.get("vertices"))
        return self._load(name, parse)

    def write_graph(self, name: PathLike, g: Graph) -> Path:
        return self.write_json(name, {"vertices": list(g.vertices), "edges": [list(e) for e in g.edges]})

    # ========================================================================
    # CERTIFICATES AND INDEX FUNCTIONS
    # ========================================================================

    def read_certificate(self, name: PathLike) -> Certificate:
        return self._load(name, Certificate.model_validate)

    def write_certificate(self, name: PathLike, c: Certificate) -> Path:
        return self.write_json(name, c.model_dump(mode="json"))

    def read_index_function(self, name: PathLike) -> IndexFunction:
        return self._load(name, IndexFunction.model_validate)

    def write_index_function(self, name: PathLike, eta: IndexFunction) -> Path:
        return self.write_json(name, eta.model_dump(mode="json"))

    # ========================================================================
    # WEIGHTINGS
    # ========================================================================

    def read_lists(self, name: PathLike) -> ListAssignment:
        return self._load(name, ListAssignment.model_validate)

    def write_lists(self, name: PathLike, lists: ListAssignment) -> Path:
        return self.write_json(name, lists.model_dump(mode="json"))

    def read_weighting(self, name: PathLike) -> TotalWeighting:
        return self._load(name, TotalWeighting.model_validate)

    def write_weighting(self, name: PathLike, w: TotalWeighting) -> Path:
        return self.write_json(name, w.model_dump(mode="json"))

    # ========================================================================
    # MATRIX DUMPS
    # ========================================================================

    def read_matrix(self, name: PathLike) -> List[List[int]]:
        """
        Parse a matrix dump.

        Raises:
            InputError: Bad header, wrong row length or non-integer entry, with its line
        """
        p = self.path(name)
        try:
            lines = [line for line in p.read_text(encoding="utf-8").splitlines() if line.strip()]
        except OSError as e:
            raise InputError(f"{p}: cannot read file ({e.strerror})") from e
        if not lines:
            raise InputError(f"{p}:1: empty matrix dump")
        try:
            rows, cols = (int(x) for x in lines[0].split())
        except ValueError as e:
            raise InputError(f"{p}:1: header must be 'rows cols'") from e
        if len(lines) - 1 != rows:
            raise InputError(f"{p}: header announces {rows} rows, found {len(lines) - 1}")

        matrix: List[List[int]] = []
        for lineno, line in enumerate(lines[1:], start=2):
            try:
                row = [int(x) for x in line.split()]
            except ValueError as e:
                raise InputError(f"{p}:{lineno}: non-integer entry") from e
            if len(row) != cols:
                raise InputError(f"{p}:{lineno}: expected {cols} entries, found {len(row)}")
            matrix.append(row)
        return matrix

    def write_matrix(self, name: PathLike, matrix: Any) -> Path:
        rows = [[int(x) for x in row] for row in matrix]
        cols = len(rows[0]) if rows else 0
        body = "".join(" ".join(str(x) for x in row) + "\n" for row in rows)
        p = self.path(name)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(f"{len(rows)} {cols}\n" + body, encoding="utf-8")
        return p
