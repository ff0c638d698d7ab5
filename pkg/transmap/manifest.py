from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Dict, Iterable, Mapping, Optional

from . import __version__
from .config import PATH_KEYS, PipelineConfig

# Optional blake3 dependency with blake2b fallback
try:  # pragma: no cover - trivial import/fallback
    from blake3 import blake3 as _blake3_ctor  # type: ignore

    DIGEST_ALGORITHM = "blake3"

    def _blake_digest(b: bytes) -> bytes:
        return _blake3_ctor(b).digest()

except Exception:  # pragma: no cover - fallback path
    import hashlib

    DIGEST_ALGORITHM = "blake2b-256"

    def _blake_digest(b: bytes) -> bytes:
        return hashlib.blake2b(b, digest_size=32).digest()


def digest_bytes(data: bytes) -> str:
    return _blake_digest(data).hex()


def digest_file(path: str) -> str:
    with open(path, "rb") as f:
        return digest_bytes(f.read())


def digest_resource_or_file(path: Optional[str], resource: str) -> str:
    """Digest of a user file, or of the bundled data file it defaults to."""
    if path:
        return digest_file(path)
    return digest_bytes(resources.files("transmap.data").joinpath(resource).read_bytes())


def config_snapshot(cfg: PipelineConfig) -> Dict[str, Any]:
    """Effective config with file paths reduced to base names so runs compare across machines."""
    snap = cfg.to_dict()
    for section, key in PATH_KEYS:
        value = snap.get(section, {}).get(key)
        if isinstance(value, str) and value:
            snap[section][key] = os.path.basename(value)
    snap["annotate"]["vocab_digest"] = digest_resource_or_file(cfg.annotate.vocab, "vocabulary.tsv")
    snap["annotate"]["prefixes_digest"] = digest_resource_or_file(cfg.annotate.prefixes, "clinical_prefixes.txt")
    return snap


@dataclass
class RunManifest:
    tool_version: str = __version__
    digest_algorithm: str = DIGEST_ALGORITHM
    inputs: Dict[str, str] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    stage_timings: Dict[str, float] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    clinical_categories: Dict[str, str] = field(default_factory=dict)

    def add_inputs(self, paths: Iterable[str]) -> None:
        for p in paths:
            self.inputs[os.path.basename(p)] = digest_file(p)

    def add_outputs(self, run_dir: str, names: Iterable[str]) -> None:
        for name in names:
            self.outputs[name] = digest_file(os.path.join(run_dir, name))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tool_version": self.tool_version,
            "digest_algorithm": self.digest_algorithm,
            "inputs": dict(sorted(self.inputs.items())),
            "config": self.config,
            "clinical_categories": dict(sorted(self.clinical_categories.items())),
            "stage_timings": {k: round(v, 3) for k, v in self.stage_timings.items()},
            "outputs": dict(sorted(self.outputs.items())),
        }

    def to_json(self) -> bytes:
        return (json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunManifest":
        return cls(
            tool_version=str(data.get("tool_version", "")),
            digest_algorithm=str(data.get("digest_algorithm", DIGEST_ALGORITHM)),
            inputs=dict(data.get("inputs", {})),
            config=dict(data.get("config", {})),
            stage_timings={k: float(v) for k, v in data.get("stage_timings", {}).items()},
            outputs=dict(data.get("outputs", {})),
            clinical_categories=dict(data.get("clinical_categories", {})),
        )
