"""Command-line interface for extraction, training, evaluation and serving."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import abbrev, evaluation, gold as gold_mod, index as index_mod, ingest, pipeline, segment, table_type
from .config import PipelineConfig
from .linking import gather_evidence, generate_contexts, score_leaderboards
from .segment import SegmentedTable


@click.group()
def main():
    """Extract machine-learning results tuples from LaTeX paper sources."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--source", "source_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--store", "store_dir", type=click.Path(), default=None,
              help="Also write per-paper extraction artifacts here.")
@click.option("--diagnostics", "diag_path", type=click.Path(), default=None)
def extract(config_path, source_path, out_path, store_dir, diag_path):
    """Run the full pipeline over a source bundle or a directory of bundles."""
    config = PipelineConfig.load(config_path)
    records, diag = pipeline.run_extract(config, source_path, store_dir=store_dir)
    Path(out_path).write_text(pipeline.records_to_json(records))
    if diag_path:
        Path(diag_path).write_text(diag.to_jsonl())
    click.echo(f"wrote {len(records)} records to {out_path}")
    failed = diag.count("PaperFailed")
    if failed:
        click.echo(f"{failed} paper(s) failed; see diagnostics", err=True)


def _index_provider(sources_dir, k1, b):
    """Build per-paper fragment indexes lazily from a directory of bundles."""
    cache = {}

    def provider(paper_id):
        if sources_dir is None:
            return None
        if paper_id not in cache:
            bundle = _find_bundle(sources_dir, paper_id)
            if bundle is None:
                cache[paper_id] = None
            else:
                doc = ingest.extract_document(ingest.load_bundle(bundle, paper_id=paper_id))
                cache[paper_id] = index_mod.build_index(doc, k1=k1, b=b)
        return cache[paper_id]

    return provider


def _find_bundle(sources_dir, paper_id):
    base = Path(sources_dir)
    for candidate in (base / paper_id, base / f"{paper_id}.tar.gz",
                      base / f"{paper_id}.tgz"):
        if candidate.exists():
            return candidate
    return None


@main.command("train-segmenter")
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--sources", "sources_dir", type=click.Path(exists=True), default=None,
              help="Directory of paper bundles for evidence retrieval.")
@click.option("--alpha", default=1.0, show_default=True)
@click.option("--evidence-k", default=segment.DEFAULT_EVIDENCE_K, show_default=True)
def train_segmenter_cmd(gold_path, out_path, sources_dir, alpha, evidence_k):
    """Train the cell segmentation model from gold-segmented tables."""
    gold_tables = gold_mod.load_gold_segmentation(gold_path)
    provider = _index_provider(sources_dir, index_mod.DEFAULT_K1, index_mod.DEFAULT_B)
    triples = [(gt.paper_id, gt.table, gt.classes) for gt in gold_tables if gt.classes]
    model = segment.train_segmenter(triples, provider, evidence_k=evidence_k, alpha=alpha)
    model.save(out_path)
    click.echo(f"trained segmenter on {len(triples)} tables -> {out_path}")


@main.command("train-table-type")
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--alpha", default=1.0, show_default=True)
def train_table_type_cmd(gold_path, out_path, alpha):
    """Train the table type classifier from (table, type) gold."""
    gold_tables = gold_mod.load_gold_segmentation(gold_path)
    pairs = [(gt.table, gt.table_type) for gt in gold_tables if gt.table_type]
    model = table_type.train_table_type(pairs, alpha=alpha)
    model.save(out_path)
    click.echo(f"trained table-type model on {len(pairs)} tables -> {out_path}")


@main.command()
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True))
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--granularity", default="tdms", show_default=True,
              type=click.Choice(list(evaluation.GRANULARITIES), case_sensitive=False))
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True), default=None,
              help="Canonicalize gold entity names against this taxonomy.")
@click.option("--macro-axis", default=evaluation.MACRO_BY_PAPER, show_default=True,
              type=click.Choice([evaluation.MACRO_BY_PAPER, evaluation.MACRO_BY_LEADERBOARD]))
@click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")
def evaluate(pred_path, gold_path, granularity, taxonomy_path, macro_axis, as_json):
    """Score predicted records against gold records."""
    from .taxonomy import load_taxonomy

    tax = load_taxonomy(taxonomy_path) if taxonomy_path else None
    pred = pipeline.load_records(pred_path)
    gold_records = evaluation.load_gold(gold_path, tax)
    report = evaluation.evaluate_records(pred, gold_records, granularity,
                                         macro_axis=macro_axis)
    if as_json:
        click.echo(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    else:
        click.echo(report.format_table())


@main.command("link-eval")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--gold-seg", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--k", default=5, show_default=True)
@click.option("--sources", "sources_dir", type=click.Path(exists=True), default=None)
def link_eval(config_path, gold_path, k, sources_dir):
    """Top-k linking accuracy on tables with gold type and segmentation."""
    config = PipelineConfig.load(config_path)
    models = pipeline.PipelineModels.load(config)
    gold_tables = gold_mod.load_gold_segmentation(gold_path)
    linker = build_gold_linker(models, sources_dir)
    accuracy = evaluation.topk_linking_accuracy(gold_tables, linker, k)
    click.echo(json.dumps({"k": k, "accuracy": accuracy}, sort_keys=True, indent=2))


def build_gold_linker(models, sources_dir):
    """Linker over gold-segmented tables for the link-eval protocol."""
    docs = {}

    def get_doc(paper_id):
        if paper_id not in docs:
            bundle = _find_bundle(sources_dir, paper_id) if sources_dir else None
            if bundle is None:
                docs[paper_id] = (ingest.PaperDocument(paper_id=paper_id), None)
            else:
                doc = ingest.extract_document(ingest.load_bundle(bundle, paper_id=paper_id))
                docs[paper_id] = (doc, index_mod.build_index(
                    doc, k1=models.config.bm25_k1, b=models.config.bm25_b))
        return docs[paper_id]

    def linker(gt, row, col):
        doc, frag_index = get_doc(gt.paper_id)
        if frag_index is None:
            frag_index = index_mod.build_index(doc)
        seg = gold_to_segmented(gt)
        contexts = generate_contexts(row, col, seg, doc, frag_index)
        evidence = gather_evidence(contexts, models.taxonomy)
        return score_leaderboards(evidence, models.taxonomy, models.noise)

    return linker


def gold_to_segmented(gt) -> SegmentedTable:
    """Gold classes normalized to the pipeline's five classes + markers."""
    from .numeric import is_numeric

    classes = []
    for r, row in enumerate(gt.table.grid):
        out_row = []
        for c, cell in enumerate(row):
            if gt.classes and r < len(gt.classes) and c < len(gt.classes[r]):
                label = segment.CLASS_ALIASES.get(
                    gt.classes[r][c].strip().lower(), segment.OTHER)
            else:
                label = segment.OTHER
            if is_numeric(cell.content):
                label = segment.NUMERIC_MARKER
            out_row.append(label)
        classes.append(out_row)
    return SegmentedTable(table=gt.table, classes=classes)


@main.command("detect-abbrevs")
@click.option("--sources", "sources_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def detect_abbrevs(sources_dir, out_path):
    """Scan a corpus for abbreviation definitions; write a two-column TSV."""
    corpus = []
    for bundle in pipeline.iter_source_bundles(sources_dir):
        try:
            corpus.append(ingest.extract_document(ingest.load_bundle(bundle)))
        except Exception as exc:  # noqa: BLE001
            click.echo(f"skipping {bundle}: {exc}", err=True)
    pairs = abbrev.detect_abbreviations(corpus)
    abbrev.save_abbreviations(pairs, out_path)
    click.echo(f"found {len(pairs)} abbreviation pairs -> {out_path}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--port", default=8764, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store", "store_dir", type=click.Path(), default="store")
@click.option("--frontend", "frontend_dir", type=click.Path(), default=None,
              help="Serve a built frontend from this directory.")
def serve(config_path, port, host, store_dir, frontend_dir):
    """Run the review HTTP service. AXTRACT_STORE overrides --store."""
    import uvicorn

    from .service import create_app

    store_dir = os.environ.get("AXTRACT_STORE", store_dir)
    config = PipelineConfig.load(config_path)
    app = create_app(config, store_dir, frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
