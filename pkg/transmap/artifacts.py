"""File names inside a run directory and the stage that produces each."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, TypeVar

from .corpus.jsonio import parse_corpus_json
from .corpus.models import BibRecord
from .errors import MissingArtifact, ParseError, SchemaViolation, TransmapError
from .network.cluster import Partition, partition_from_json
from .network.graph import CitationNetwork, network_from_json
from .network.selection import SelectionResult
from .semantic.annotate import Annotation, annotations_from_json

CORPUS = "corpus.json"
SELECTION = "selection.json"
NETWORK = "network.json"
PARTITION = "partition.json"
ANNOTATIONS = "annotations.json"
REPORT = "report.md"
MANIFEST = "manifest.json"
EXPORT_STEM = "map"

PRODUCED_BY: Dict[str, str] = {
    CORPUS: "ingest",
    SELECTION: "select",
    NETWORK: "graph",
    PARTITION: "cluster",
    ANNOTATIONS: "annotate",
    REPORT: "report",
}

T = TypeVar("T")


def read_artifact(run_dir: str, name: str) -> bytes:
    path = os.path.join(run_dir, name)
    if not os.path.exists(path):
        raise MissingArtifact(PRODUCED_BY.get(name, "run"), f"{path} not found")
    with open(path, "rb") as f:
        return f.read()


def write_artifact(run_dir: str, name: str, data: bytes) -> str:
    os.makedirs(run_dir, exist_ok=True)
    path = os.path.join(run_dir, name)
    with open(path, "wb") as f:
        f.write(data)
    return path


def decode_artifact(data: bytes, source: str, loader: Callable[[bytes], T]) -> T:
    """Run `loader` over an artifact's bytes; bad JSON or shape becomes an input error naming `source`."""
    try:
        return loader(data)
    except TransmapError:
        raise
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ParseError(f"not a JSON artifact ({e})", source=source) from e
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        detail = f"missing field {e}" if isinstance(e, KeyError) else str(e)
        raise SchemaViolation("artifact", detail, source=source) from e


def _selection(data: bytes) -> SelectionResult:
    body: Any = json.loads(data)
    if not isinstance(body, dict):
        raise TypeError("expected a JSON object")
    return SelectionResult.from_dict(body)


def load_selection(data: bytes, source: str = SELECTION) -> SelectionResult:
    return decode_artifact(data, source, _selection)


def load_network(data: bytes, source: str = NETWORK) -> CitationNetwork:
    return decode_artifact(data, source, network_from_json)


def load_partition(data: bytes, source: str = PARTITION) -> Partition:
    return decode_artifact(data, source, partition_from_json)


def load_annotations(data: bytes, source: str = ANNOTATIONS) -> Dict[str, Annotation]:
    return decode_artifact(data, source, annotations_from_json)


@dataclass
class RunArtifacts:
    corpus: List[BibRecord]
    selection: SelectionResult
    network: CitationNetwork
    partition: Partition
    annotations: Dict[str, Annotation]

    @classmethod
    def load(cls, run_dir: str) -> "RunArtifacts":
        def path(name: str) -> str:
            return os.path.join(run_dir, name)

        return cls(
            corpus=parse_corpus_json(read_artifact(run_dir, CORPUS), source=path(CORPUS)),
            selection=load_selection(read_artifact(run_dir, SELECTION), path(SELECTION)),
            network=load_network(read_artifact(run_dir, NETWORK), path(NETWORK)),
            partition=load_partition(read_artifact(run_dir, PARTITION), path(PARTITION)),
            annotations=load_annotations(read_artifact(run_dir, ANNOTATIONS), path(ANNOTATIONS)),
        )


def existing_outputs(run_dir: str) -> List[str]:
    if not os.path.isdir(run_dir):
        return []
    return sorted(n for n in os.listdir(run_dir) if os.path.isfile(os.path.join(run_dir, n)) and n != MANIFEST)
