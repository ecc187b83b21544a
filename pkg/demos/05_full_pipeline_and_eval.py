"""End-to-end run over the mini-corpus plus the evaluation harness.

Extracts all five papers, scores the output against the gold tuples at
every granularity, and compares evidence-generation strategies on
gold-segmented tables (Top-1 / Top-5 linking accuracy).
"""

from pathlib import Path

from axtract import abbrev, evaluation, gold, pipeline, taxonomy as tx
from axtract.cli import build_gold_linker
from axtract.config import PipelineConfig

CORPUS = Path(__file__).resolve().parent.parent / "minicorpus"

config = PipelineConfig.load(CORPUS / "config.json")
records, diag = pipeline.run_extract(config, CORPUS / "papers")
print(f"extracted {len(records)} records from 5 papers "
      f"({len(diag.events)} diagnostics)")
for r in records:
    print(f"  {r.paper_id:16s} ({r.task}, {r.dataset}, {r.metric}) "
          f"= {round(r.value, 6)} [{r.model_name}]")

gold_records = evaluation.load_gold(
    CORPUS / "gold_records.json", tx.load_taxonomy(CORPUS / "taxonomy.json"))
print()
for granularity in ("tdms", "tdm", "task", "dataset", "metric"):
    report = evaluation.evaluate_records(records, gold_records, granularity)
    print(report.format_table())

print("\nlinking accuracy on gold segmentation, per evidence strategy:")
base = tx.load_taxonomy(CORPUS / "taxonomy.json")
pairs = abbrev.load_abbreviations(CORPUS / "abbreviations.tsv")
curated = tx.load_curated_mentions(CORPUS / "curated_mentions.json")
annotated = [gt for gt in gold.load_gold_segmentation(CORPUS / "gold_tables.json")
             if gt.records]
print(f"{'strategy':14s} {'top1':>6s} {'top5':>6s}   (full task/dataset/metric triple)")
for strategy in ("bow", "abbreviations", "curated", "combined"):
    taxonomy = tx.generate_evidences(base, strategy, abbreviations=pairs,
                                     curated=curated)
    models = pipeline.PipelineModels.load(config)
    models.taxonomy = taxonomy
    linker = build_gold_linker(models, CORPUS / "papers")
    top1 = evaluation.topk_linking_accuracy(annotated, linker, 1)["leaderboard"]
    top5 = evaluation.topk_linking_accuracy(annotated, linker, 5)["leaderboard"]
    print(f"{strategy:14s} {top1:6.2f} {top5:6.2f}")
