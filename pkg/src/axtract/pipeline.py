"""End-to-end extraction: source bundle in, results tuples out.

The stages run in order: ingest, index, table-type gating, segmentation,
context generation, linking, filtering.  Both leaderboard and ablation
tables proceed to extraction; only irrelevant tables are dropped before
linking.  All outputs serialize deterministically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import abbrev, filtering, index as index_mod, ingest, linking, segment, table_type, taxonomy as taxonomy_mod
from .classifier import ClassifierModel
from .numeric import parse_numeric
from .config import PipelineConfig
from .diagnostics import Diagnostics
from .filtering import ResultRecord
from .linking import NoiseModel, ScoredCandidate
from .segment import SegmentedTable
from .table_type import TableTypeModel
from .taxonomy import Taxonomy


@dataclass
class PipelineModels:
    taxonomy: Taxonomy
    table_type_model: TableTypeModel
    segmenter_model: ClassifierModel
    noise: NoiseModel
    config: PipelineConfig

    @classmethod
    def load(cls, config: PipelineConfig) -> "PipelineModels":
        tax = taxonomy_mod.load_taxonomy(config.taxonomy_path)
        curated = (taxonomy_mod.load_curated_mentions(config.curated_mentions_path)
                   if config.curated_mentions_path else None)
        pairs = (abbrev.load_abbreviations(config.abbreviations_path)
                 if config.abbreviations_path else None)
        tax = taxonomy_mod.generate_evidences(
            tax, config.evidence_strategy, abbreviations=pairs, curated=curated)
        if config.table_type_model_path is None:
            raise ValueError("config does not name a table-type model")
        if config.segmenter_model_path is None:
            raise ValueError("config does not name a segmenter model")
        return cls(
            taxonomy=tax,
            table_type_model=TableTypeModel.load(config.table_type_model_path),
            segmenter_model=ClassifierModel.load(config.segmenter_model_path),
            noise=config.noise,
            config=config,
        )


@dataclass
class PaperExtraction:
    paper_id: str
    document: ingest.PaperDocument
    segmented: list[SegmentedTable] = field(default_factory=list)
    candidates: dict[str, list[ScoredCandidate]] = field(default_factory=dict)
    records: list[ResultRecord] = field(default_factory=list)
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def segmented_by_id(self, table_id: str) -> SegmentedTable | None:
        for seg in self.segmented:
            if seg.table.table_id == table_id:
                return seg
        return None


def cell_key(table_id: str, row: int, col: int) -> str:
    return f"{table_id}:{row}:{col}"


def extract_paper(models: PipelineModels, src: ingest.PaperSource) -> PaperExtraction:
    cfg = models.config
    diag = Diagnostics(src.paper_id)
    doc = ingest.extract_document(src, diag)
    frag_index = index_mod.build_index(doc, k1=cfg.bm25_k1, b=cfg.bm25_b)

    extraction = PaperExtraction(paper_id=src.paper_id, document=doc, diagnostics=diag)

    relevant = 0
    for table in doc.tables:
        prediction = table_type.classify_table_type(
            table, models.table_type_model, cfg.table_type_threshold)
        if not prediction.relevant:
            extraction.segmented.append(SegmentedTable(
                table=table,
                classes=[[segment.OTHER] * table.n_cols for _ in range(table.n_rows)],
                type=prediction,
            ))
            continue
        relevant += 1
        seg = segment.segment_table(
            table, models.segmenter_model, frag_index,
            evidence_k=cfg.evidence_k, type_prediction=prediction)
        extraction.segmented.append(seg)

        for row, col in seg.numeric_cells():
            raw = table.grid[row][col].content
            parsed = parse_numeric(raw)
            if parsed and parsed.multiple:
                diag.add("MultipleNumbers", table_id=table.table_id, row=row, col=col,
                         content=raw)
            contexts = linking.generate_contexts(row, col, seg, doc, frag_index)
            evidence = linking.gather_evidence(contexts, models.taxonomy)
            model_name, model_kind = linking.attach_model(seg, row, col)
            cands = linking.score_leaderboards(
                evidence, models.taxonomy, models.noise,
                cell=(table.table_id, row, col), raw_value=raw,
                model_name=model_name, model_kind=model_kind,
                paper_id=src.paper_id)
            extraction.candidates[cell_key(table.table_id, row, col)] = cands

    if relevant == 0:
        diag.add("NoRelevantTables")

    all_candidates = [c for cands in extraction.candidates.values() for c in cands]
    extraction.records = filtering.filter_results(
        all_candidates, models.taxonomy, t1=cfg.t1, t2=cfg.t2)
    return extraction


def iter_source_bundles(source_path) -> list[Path]:
    """A path is one bundle, or a directory of per-paper bundles."""
    source_path = Path(source_path)
    if source_path.is_file():
        return [source_path]
    if any(source_path.glob("*.tex")):
        return [source_path]
    bundles = [p for p in sorted(source_path.iterdir())
               if p.is_dir() or p.name.endswith((".tar.gz", ".tgz", ".tar"))]
    return bundles or [source_path]


def run_extract(config: PipelineConfig, source_path,
                store_dir=None) -> tuple[list[ResultRecord], Diagnostics]:
    """Extract every paper under ``source_path``; failures never abort the batch."""
    models = PipelineModels.load(config)
    records: list[ResultRecord] = []
    batch_diag = Diagnostics()
    for bundle in iter_source_bundles(source_path):
        try:
            src = ingest.load_bundle(bundle)
            extraction = extract_paper(models, src)
        except Exception as exc:  # noqa: BLE001 - one bad paper must not kill the run
            batch_diag.add("PaperFailed", bundle=str(bundle), error=str(exc))
            continue
        records.extend(extraction.records)
        batch_diag.extend(extraction.diagnostics)
        if store_dir is not None:
            save_extraction(store_dir, extraction)
    return records, batch_diag


def records_to_json(records: list[ResultRecord]) -> str:
    payload = [r.to_dict() for r in records]
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def load_records(path) -> list[ResultRecord]:
    data = json.loads(Path(path).read_text())
    return [ResultRecord.from_dict(d) for d in data]


# --- extraction store -------------------------------------------------------
#
# Directory-per-paper layout of JSON artifacts; no database.  The review
# service reads these files and serves them unchanged.

def paper_dir(store_dir, paper_id: str) -> Path:
    return Path(store_dir) / "papers" / paper_id


def save_extraction(store_dir, extraction: PaperExtraction) -> None:
    target = paper_dir(store_dir, extraction.paper_id)
    target.mkdir(parents=True, exist_ok=True)

    def dump(name: str, payload) -> None:
        (target / name).write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n")

    dump("document.json", extraction.document.to_dict())
    dump("segmentation.json", [seg.to_dict() for seg in extraction.segmented])
    dump("candidates.json", {
        key: [c.to_dict() for c in cands]
        for key, cands in sorted(extraction.candidates.items())
    })
    dump("records.json", [r.to_dict() for r in extraction.records])
    (target / "diagnostics.jsonl").write_text(extraction.diagnostics.to_jsonl())


def load_extraction(store_dir, paper_id: str) -> PaperExtraction | None:
    target = paper_dir(store_dir, paper_id)
    if not (target / "document.json").exists():
        return None
    document = ingest.PaperDocument.from_dict(
        json.loads((target / "document.json").read_text()))
    segmented = [SegmentedTable.from_dict(d)
                 for d in json.loads((target / "segmentation.json").read_text())]
    candidates = {
        key: [ScoredCandidate.from_dict(c) for c in cands]
        for key, cands in json.loads((target / "candidates.json").read_text()).items()
    }
    records = [ResultRecord.from_dict(d)
               for d in json.loads((target / "records.json").read_text())]
    return PaperExtraction(
        paper_id=paper_id, document=document, segmented=segmented,
        candidates=candidates, records=records,
        diagnostics=Diagnostics(paper_id),
    )


def list_papers(store_dir) -> list[str]:
    papers = Path(store_dir) / "papers"
    if not papers.is_dir():
        return []
    return sorted(p.name for p in papers.iterdir() if p.is_dir())
