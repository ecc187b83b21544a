"""HTTP JSON API for the review UI.

Extraction artifacts are read-only once written; the annotation log is
the only mutable state.  Candidate lists served here are exactly the
stored scoring output truncated to k — the service never re-ranks.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import ingest, pipeline
from .config import PipelineConfig
from .errors import NoMainFile, UnknownLeaderboard, UnreadableArchive
from .pipeline import PaperExtraction, PipelineModels, cell_key
from .review import AnnotationDecision, AnnotationLog, merged_results


def create_app(config: PipelineConfig, store_dir, frontend_dir=None) -> FastAPI:
    app = FastAPI(title="axtract review service")
    store_dir = Path(store_dir)
    store_dir.mkdir(parents=True, exist_ok=True)
    models = PipelineModels.load(config)
    log = AnnotationLog(store_dir)
    cache: dict[str, PaperExtraction] = {}

    def get_extraction(paper_id: str) -> PaperExtraction:
        if paper_id not in cache:
            extraction = pipeline.load_extraction(store_dir, paper_id)
            if extraction is None:
                raise HTTPException(status_code=404, detail=f"unknown paper {paper_id}")
            cache[paper_id] = extraction
        return cache[paper_id]

    @app.get("/papers")
    def papers_list():
        return {"papers": pipeline.list_papers(store_dir)}

    @app.post("/papers")
    async def upload_paper(request: Request, paper_id: str | None = None):
        body = await request.body()
        if not body:
            raise HTTPException(status_code=400, detail="empty body")
        with tempfile.NamedTemporaryFile(suffix=".tar.gz") as tmp:
            tmp.write(body)
            tmp.flush()
            try:
                src = ingest.load_bundle(tmp.name, paper_id=paper_id)
            except (UnreadableArchive, NoMainFile) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            extraction = pipeline.extract_paper(models, src)
        pipeline.save_extraction(store_dir, extraction)
        cache[extraction.paper_id] = extraction
        return {"paper_id": extraction.paper_id,
                "tables": len(extraction.document.tables),
                "records": len(extraction.records)}

    @app.get("/papers/{paper_id}")
    def paper_view(paper_id: str):
        extraction = get_extraction(paper_id)
        doc = extraction.document
        tables = []
        for seg in extraction.segmented:
            tables.append({
                "table_id": seg.table.table_id,
                "caption": seg.table.caption,
                "grid": [[cell.to_dict() for cell in row] for row in seg.table.grid],
                "classes": seg.classes,
                "type": seg.type.to_dict() if seg.type else None,
            })
        return {
            "paper_id": paper_id,
            "title": doc.title,
            "abstract": doc.abstract,
            "tables": tables,
        }

    @app.get("/papers/{paper_id}/cells/{table_id}/{row}/{col}/candidates")
    def cell_candidates(paper_id: str, table_id: str, row: int, col: int,
                        k: int = Query(default=5, ge=1)):
        extraction = get_extraction(paper_id)
        seg = extraction.segmented_by_id(table_id)
        if seg is None:
            raise HTTPException(status_code=404, detail=f"unknown table {table_id}")
        if not (0 <= row < seg.table.n_rows and 0 <= col < seg.table.n_cols):
            raise HTTPException(status_code=404, detail="cell outside table")
        cands = extraction.candidates.get(cell_key(table_id, row, col))
        if cands is None:
            raise HTTPException(status_code=404, detail="no candidates for cell")
        return {"candidates": [c.to_dict() for c in cands[:k]]}

    @app.post("/annotations")
    async def post_annotation(request: Request):
        try:
            payload = await request.json()
        except Exception as exc:  # malformed JSON body
            raise HTTPException(status_code=400, detail="malformed JSON") from exc
        try:
            decision = AnnotationDecision.from_dict(payload)
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"bad decision: {exc}") from exc
        get_extraction(decision.paper_id)  # 404 for unknown papers
        try:
            stored = log.append(decision, models.taxonomy)
        except UnknownLeaderboard as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return JSONResponse({"status": "ok", "decision": stored.to_dict()})

    @app.get("/papers/{paper_id}/results")
    def paper_results(paper_id: str):
        extraction = get_extraction(paper_id)
        records = merged_results(extraction, log, models.taxonomy)
        return {"records": [r.to_dict() for r in records]}

    @app.get("/export")
    def export_annotations():
        return {"annotations": [d.to_dict() for d in sorted(
            log.accepted(), key=lambda d: (d.paper_id, d.table_id, d.row, d.col))]}

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
