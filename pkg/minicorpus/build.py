#!/usr/bin/env python3
"""Regenerate the derived mini-corpus artifacts.

Reads the LaTeX sources under papers/, attaches the hand labels below,
and writes gold_tables.json, abbreviations.tsv and the trained models.
Everything is deterministic; rerunning reproduces identical files.
"""

from pathlib import Path

from axtract import abbrev, gold, index, ingest, segment, table_type

HERE = Path(__file__).parent

# hand labels: per paper, per table (document order), the table type,
# the class grid, and the per-cell leaderboard annotations used by the
# linking evaluation
D, M, P, C, O, N = "dataset", "metric", "paper_model", "cited_model", "other", "numeric"

IC, SUM, MT, SR = ("Image Classification", "Summarization",
                   "Machine Translation", "Speech Recognition")

LABELS = {
    "effnet-image": [
        {
            "type": "leaderboard",
            "classes": [
                [O, M, M],
                [C, N, N],
                [C, N, N],
                [P, N, N],
            ],
            "records": [
                (1, 1, IC, "ImageNet", "Top 1 Accuracy", 0.76),
                (1, 2, IC, "ImageNet", "Top 5 Accuracy", 0.93),
                (2, 1, IC, "ImageNet", "Top 1 Accuracy", 0.774),
                (2, 2, IC, "ImageNet", "Top 5 Accuracy", 0.936),
                (3, 1, IC, "ImageNet", "Top 1 Accuracy", 0.844),
                (3, 2, IC, "ImageNet", "Top 5 Accuracy", 0.971),
            ],
        },
        {
            "type": "irrelevant",
            "classes": [
                [O, O],
                [O, N],
                [O, N],
                [O, N],
            ],
            "records": [],
        },
        {
            "type": "ablation",
            "classes": [
                [O, M],
                [P, N],
                [P, N],
                [P, N],
            ],
            "records": [
                (1, 1, IC, "ImageNet", "Top 1 Accuracy", 0.826),
                (2, 1, IC, "ImageNet", "Top 1 Accuracy", 0.802),
                (3, 1, IC, "ImageNet", "Top 1 Accuracy", 0.798),
            ],
        },
    ],
    "summ-giga": [
        {
            "type": "irrelevant",
            "classes": [
                [O, O],
                [O, N],
                [O, N],
                [O, N],
            ],
            "records": [],
        },
        {
            "type": "leaderboard",
            "classes": [
                [O, D, D, D],
                [O, M, M, M],
                [C, N, N, N],
                [P, N, N, N],
                [P, N, N, N],
            ],
            "records": [
                (2, 1, SUM, "GigaWord", "Rouge-1", 43.4),
                (2, 2, SUM, "GigaWord", "Rouge-2", 21.1),
                (2, 3, SUM, "GigaWord", "Rouge-L", 40.2),
                (3, 1, SUM, "GigaWord", "Rouge-1", 47.6),
                (3, 2, SUM, "GigaWord", "Rouge-2", 22.9),
                (3, 3, SUM, "GigaWord", "Rouge-L", 44.1),
                (4, 1, SUM, "GigaWord", "Rouge-1", 48.2),
                (4, 2, SUM, "GigaWord", "Rouge-2", 23.5),
                (4, 3, SUM, "GigaWord", "Rouge-L", 44.8),
            ],
        },
    ],
    "nmt-iwslt": [
        {
            "type": "leaderboard",
            "classes": [
                [O, D, D],
                [C, N, N],
                [P, N, N],
            ],
            "records": [
                (1, 1, MT, "IWSLT2015 English-Vietnamese", "BLEU score", 28.5),
                (1, 2, MT, "WMT 2014 English-French", "BLEU score", 38.1),
                (2, 1, MT, "IWSLT2015 English-Vietnamese", "BLEU score", 31.2),
                (2, 2, MT, "WMT 2014 English-French", "BLEU score", 41.8),
            ],
        },
    ],
    "asr-librispeech": [
        {
            "type": "leaderboard",
            "classes": [
                [O, M],
                [C, N],
                [P, N],
                [P, N],
            ],
            "records": [
                (1, 1, SR, "LibriSpeech test-clean", "Word Error Rate", 5.3),
                (2, 1, SR, "LibriSpeech test-clean", "Word Error Rate", 4.1),
                (3, 1, SR, "LibriSpeech test-clean", "Word Error Rate", 3.8),
            ],
        },
        {
            "type": "ablation",
            "classes": [
                [O, M],
                [P, N],
                [P, N],
                [P, N],
            ],
            "records": [
                (1, 1, SR, "LibriSpeech test-clean", "Word Error Rate", 4.1),
                (2, 1, SR, "LibriSpeech test-clean", "Word Error Rate", 4.9),
                (3, 1, SR, "LibriSpeech test-clean", "Word Error Rate", 5.6),
            ],
        },
    ],
    "survey-datasets": [
        {
            "type": "irrelevant",
            "classes": [
                [O, O],
                [D, N],
                [D, N],
            ],
            "records": [],
        },
    ],
}


def main():
    papers_dir = HERE / "papers"
    docs = []
    gold_tables = []
    for paper_id in sorted(LABELS):
        src = ingest.load_bundle(papers_dir / paper_id, paper_id=paper_id)
        doc = ingest.extract_document(src)
        docs.append(doc)
        annotations = LABELS[paper_id]
        assert len(doc.tables) == len(annotations), (
            f"{paper_id}: extracted {len(doc.tables)} tables, "
            f"labeled {len(annotations)}")
        for table, ann in zip(doc.tables, annotations):
            shape = (table.n_rows, table.n_cols)
            label_shape = (len(ann["classes"]), len(ann["classes"][0]))
            assert shape == label_shape, (
                f"{paper_id}/{table.table_id}: grid {shape} vs labels {label_shape}")
            gold_tables.append(gold.GoldSegTable(
                paper_id=paper_id,
                table=table,
                classes=ann["classes"],
                table_type=ann["type"],
                records=[gold.GoldCellRecord(row=r, col=c, task=t, dataset=d,
                                             metric=m, value=v)
                         for r, c, t, d, m, v in ann["records"]],
            ))

    gold.save_gold_segmentation(gold_tables, HERE / "gold_tables.json")
    print(f"wrote gold_tables.json ({len(gold_tables)} tables)")

    pairs = abbrev.detect_abbreviations(docs)
    abbrev.save_abbreviations(pairs, HERE / "abbreviations.tsv")
    print(f"wrote abbreviations.tsv ({len(pairs)} pairs):",
          ", ".join(p.short_form for p in pairs))

    type_model = table_type.train_table_type(
        [(gt.table, gt.table_type) for gt in gold_tables])
    (HERE / "models").mkdir(exist_ok=True)
    type_model.save(HERE / "models" / "table_type.json")
    print("wrote models/table_type.json")

    indexes = {doc.paper_id: index.build_index(doc) for doc in docs}
    seg_model = segment.train_segmenter(
        [(gt.paper_id, gt.table, gt.classes) for gt in gold_tables],
        indexes.get)
    seg_model.save(HERE / "models" / "segmenter.json")
    print("wrote models/segmenter.json")


if __name__ == "__main__":
    main()
