"""Pipeline configuration loaded from a JSON file.

Relative paths inside the file resolve against the file's directory, so
a corpus can ship a self-contained config.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .filtering import DEFAULT_T1, DEFAULT_T2
from .index import DEFAULT_B, DEFAULT_K1
from .linking import NoiseModel
from .segment import DEFAULT_EVIDENCE_K
from .table_type import DEFAULT_THRESHOLD


@dataclass
class PipelineConfig:
    taxonomy_path: Path
    evidence_strategy: str = "bow"
    curated_mentions_path: Path | None = None
    abbreviations_path: Path | None = None
    table_type_model_path: Path | None = None
    segmenter_model_path: Path | None = None
    t1: float = DEFAULT_T1
    t2: float = DEFAULT_T2
    table_type_threshold: float = DEFAULT_THRESHOLD
    noise: NoiseModel = field(default_factory=NoiseModel)
    bm25_k1: float = DEFAULT_K1
    bm25_b: float = DEFAULT_B
    evidence_k: int = DEFAULT_EVIDENCE_K

    def validate(self) -> None:
        for name in ("taxonomy_path", "curated_mentions_path", "abbreviations_path",
                     "table_type_model_path", "segmenter_model_path"):
            path = getattr(self, name)
            if path is not None and not Path(path).exists():
                raise FileNotFoundError(f"{name} does not exist: {path}")
        for name in ("t1", "t2", "table_type_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.bm25_k1 <= 0:
            raise ValueError("bm25_k1 must be positive")
        if not 0.0 <= self.bm25_b <= 1.0:
            raise ValueError("bm25_b must be in [0, 1]")
        if self.evidence_k < 1:
            raise ValueError("evidence_k must be at least 1")
        self.noise.validate()

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        path = Path(path)
        data = json.loads(path.read_text())
        base = path.parent

        def resolve(key):
            value = data.get(key)
            return (base / value) if value else None

        thresholds = data.get("thresholds", {})
        bm25 = data.get("bm25", {})
        config = cls(
            taxonomy_path=resolve("taxonomy"),
            evidence_strategy=data.get("evidence_strategy", "bow"),
            curated_mentions_path=resolve("curated_mentions"),
            abbreviations_path=resolve("abbreviations"),
            table_type_model_path=resolve("table_type_model"),
            segmenter_model_path=resolve("segmenter_model"),
            t1=thresholds.get("t1", DEFAULT_T1),
            t2=thresholds.get("t2", DEFAULT_T2),
            table_type_threshold=thresholds.get("table_type", DEFAULT_THRESHOLD),
            noise=NoiseModel.from_dict(data.get("noise", {})),
            bm25_k1=bm25.get("k1", DEFAULT_K1),
            bm25_b=bm25.get("b", DEFAULT_B),
            evidence_k=data.get("evidence_k", DEFAULT_EVIDENCE_K),
        )
        if config.taxonomy_path is None:
            raise ValueError(f"config {path} does not name a taxonomy file")
        config.validate()
        return config
