"""BM25 fragment retrieval and mention masking for cell evidence.

Builds the per-paper index, runs a few queries, and shows how retrieved
fragments are masked before they feed the cell classifier.
"""

from pathlib import Path

from axtract import index, ingest
from axtract.segment import retrieve_cell_evidence

CORPUS = Path(__file__).resolve().parent.parent / "minicorpus"

doc = ingest.extract_document(
    ingest.load_bundle(CORPUS / "papers" / "summ-giga", paper_id="summ-giga"))
idx = index.build_index(doc)
print(f"index over {len(idx)} fragments, avg length {idx.avg_doc_length:.1f} tokens")

for query in ("NMT-1", "GigaWord", "coverage penalty"):
    print(f"\nquery: {query!r}")
    for frag, score in index.search(idx, query, 3):
        print(f"  {score:6.3f}  [{frag.section_heading}] {frag.text[:70]}...")

print("\nmasked evidence for the cell content 'NMT-2':")
for masked in retrieve_cell_evidence("NMT-2", idx, 3):
    print(f"  {masked[:100]}")

table = doc.tables[1]
mentions = index.find_table_mentions(doc, table, 5)
print(f"\nfragments referencing Table {table.number}:")
for frag in mentions:
    print(f"  {frag.text[:90]}")
