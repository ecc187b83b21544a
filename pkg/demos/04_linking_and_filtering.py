"""From a numeric cell to a results tuple: contexts, evidence, scoring,
filtering.

Follows one cell of the summarization paper through every linking stage,
then shows the paper's filtered records.
"""

from pathlib import Path

from axtract import filtering, ingest, linking, pipeline
from axtract.config import PipelineConfig

CORPUS = Path(__file__).resolve().parent.parent / "minicorpus"

config = PipelineConfig.load(CORPUS / "config.json")
models = pipeline.PipelineModels.load(config)
src = ingest.load_bundle(CORPUS / "papers" / "summ-giga", paper_id="summ-giga")
extraction = pipeline.extract_paper(models, src)

seg = extraction.segmented_by_id("table_2")
import axtract.index as index_mod

idx = index_mod.build_index(extraction.document)
row, col = 3, 1  # the 47.6 cell in the NMT-1 row, R-1 column
ctx = linking.generate_contexts(row, col, seg, extraction.document, idx)
print("contexts for cell (3,1):")
print("  table:   ", ctx.table_ctx)
print("  caption: ", ctx.caption_ctx)
print("  mentions:", ctx.mentions_ctx[:70], "...")
print("  abstract:", ctx.abstract_ctx[:70], "...")

evidence = linking.gather_evidence(ctx, models.taxonomy)
print(f"\n{len(evidence)} evidence items (mention, type, entity, context):")
for item in evidence.items[:12]:
    print(f"  ({item.mention!r}, {item.entity_type}, {item.entity}, {item.context})")

candidates = extraction.candidates["table_2:3:1"]
print("\ntop candidates for the cell:")
for cand in candidates[:4]:
    print(f"  {cand.posterior:6.3f}  ({cand.task}, {cand.dataset}, {cand.metric})"
          f"  value={cand.normalized_value}  model={cand.model_name}")

print("\nfiltered records for the whole paper "
      f"(t1={config.t1}, t2={config.t2}; best value per leaderboard):")
for record in extraction.records:
    print(f"  {record.model_name:8s} ({record.task}, {record.dataset}, "
          f"{record.metric}) = {record.value}   conf={record.confidence:.3f}")
