"""Table type classification and per-cell semantic segmentation.

Uses the models trained on the mini-corpus to gate and segment every
table of one paper, printing the class grid.
"""

from pathlib import Path

from axtract import index, ingest, segment, table_type

CORPUS = Path(__file__).resolve().parent.parent / "minicorpus"

doc = ingest.extract_document(
    ingest.load_bundle(CORPUS / "papers" / "asr-librispeech", paper_id="asr-librispeech"))
idx = index.build_index(doc)

type_model = table_type.TableTypeModel.load(CORPUS / "models" / "table_type.json")
seg_model = segment.ClassifierModel.load(CORPUS / "models" / "segmenter.json")

SHORT = {"dataset": "DAT", "metric": "MET", "paper_model": "OUR",
         "cited_model": "CIT", "other": "---", "numeric": "NUM"}

for table in doc.tables:
    prediction = table_type.classify_table_type(table, type_model)
    print(f"\n{table.table_id}: {table.caption}")
    print(f"  leaderboard={prediction.leaderboard_prob:.3f} "
          f"ablation={prediction.ablation_prob:.3f} -> {prediction.decided_type}")
    if not prediction.relevant:
        print("  (gated out, not segmented)")
        continue
    seg = segment.segment_table(table, seg_model, idx, type_prediction=prediction)
    for r, row in enumerate(table.grid):
        cells = [f"{SHORT[seg.classes[r][c]]} {cell.content[:14]:14s}"
                 for c, cell in enumerate(row)]
        print("   " + " | ".join(cells))
