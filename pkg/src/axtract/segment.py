"""Table semantic segmentation: a class for every non-numeric cell.

Each cell is classified as dataset, metric, paper_model, cited_model or
other, using masked text evidence retrieved from the paper plus the
structural features of the cell.  Numeric cells are marked instead of
classified; empty cells fall into "other" without running the model.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import classifier
from .classifier import ClassifierModel, LabeledExample, TrainConfig
from .index import FragmentIndex, search
from .numeric import is_numeric
from .table_type import TableTypePrediction
from .tables import RawTable

DATASET = "dataset"
METRIC = "metric"
PAPER_MODEL = "paper_model"
CITED_MODEL = "cited_model"
OTHER = "other"

CELL_CLASSES = (DATASET, METRIC, PAPER_MODEL, CITED_MODEL, OTHER)

NUMERIC_MARKER = "numeric"

MASK_TOKEN = "<MASK>"

DEFAULT_EVIDENCE_K = 10

# gold annotations may use the six-class scheme; task and meta collapse
# into "other" for the pipeline
CLASS_ALIASES = {
    "dataset": DATASET,
    "subdataset": DATASET,
    "metric": METRIC,
    "paper_model": PAPER_MODEL,
    "paper model": PAPER_MODEL,
    "model_paper": PAPER_MODEL,
    "cited_model": CITED_MODEL,
    "cited model": CITED_MODEL,
    "competing model": CITED_MODEL,
    "model_cited": CITED_MODEL,
    "meta": OTHER,
    "task": OTHER,
    "other": OTHER,
    "numeric": NUMERIC_MARKER,
    "empty": OTHER,
}


@dataclass
class SegmentedTable:
    table: RawTable
    classes: list[list[str]]
    type: TableTypePrediction | None = None

    def cell_class(self, row: int, col: int) -> str:
        return self.classes[row][col]

    def numeric_cells(self) -> list[tuple[int, int]]:
        return [
            (r, c)
            for r, row in enumerate(self.classes)
            for c, value in enumerate(row)
            if value == NUMERIC_MARKER
        ]

    def to_dict(self) -> dict:
        return {
            "table": self.table.to_dict(),
            "classes": [list(row) for row in self.classes],
            "type": self.type.to_dict() if self.type else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SegmentedTable":
        return cls(
            table=RawTable.from_dict(d["table"]),
            classes=[list(row) for row in d["classes"]],
            type=TableTypePrediction.from_dict(d["type"]) if d.get("type") else None,
        )


def mask_mentions(text: str, query: str) -> str:
    """Replace every occurrence of the queried content with the mask token."""
    words = query.split()
    if not words:
        return text
    pattern = re.compile(r"\s+".join(re.escape(w) for w in words), re.IGNORECASE)
    return pattern.sub(MASK_TOKEN, text)


def retrieve_cell_evidence(cell, index: FragmentIndex,
                           k: int = DEFAULT_EVIDENCE_K) -> list[str]:
    """Top-k fragments for the cell content, with the content masked out."""
    content = getattr(cell, "content", cell)
    if not content.strip():
        return []
    return [mask_mentions(frag.text, content) for frag, _ in search(index, content, k)]


def cell_example(table: RawTable, row: int, col: int,
                 index: FragmentIndex | None,
                 evidence_k: int = DEFAULT_EVIDENCE_K,
                 label: str | None = None) -> LabeledExample:
    cell = table.grid[row][col]
    evidence = (retrieve_cell_evidence(cell.content, index, evidence_k)
                if index is not None else [])
    row_cells = [c.content for c in table.grid[row]]
    col_cells = [r[col].content for r in table.grid]
    return classifier.featurize(cell, row_cells, col_cells, evidence,
                                position=(row, col), label=label)


def segment_table(table: RawTable, model: ClassifierModel,
                  index: FragmentIndex | None,
                  evidence_k: int = DEFAULT_EVIDENCE_K,
                  type_prediction: TableTypePrediction | None = None) -> SegmentedTable:
    """Mark numeric cells and classify the rest."""
    classes: list[list[str]] = []
    for r, row in enumerate(table.grid):
        row_classes = []
        for c, cell in enumerate(row):
            if not cell.content.strip():
                row_classes.append(OTHER)
            elif is_numeric(cell.content):
                row_classes.append(NUMERIC_MARKER)
            else:
                example = cell_example(table, r, c, index, evidence_k)
                row_classes.append(classifier.predict(model, example).argmax())
        classes.append(row_classes)
    return SegmentedTable(table=table, classes=classes, type=type_prediction)


def train_segmenter(gold: list[tuple[str, RawTable, list[list[str]]]],
                    index_provider, evidence_k: int = DEFAULT_EVIDENCE_K,
                    alpha: float = 1.0) -> ClassifierModel:
    """Fit the cell classifier from (paper_id, table, label grid) gold.

    ``index_provider`` maps a paper_id to its FragmentIndex (or None when
    the paper text is unavailable; the evidence field is then empty).
    Numeric and empty cells never become training examples.
    """
    examples: list[LabeledExample] = []
    for paper_id, table, labels in gold:
        index = index_provider(paper_id) if index_provider else None
        for r, row in enumerate(table.grid):
            for c, cell in enumerate(row):
                label = CLASS_ALIASES.get(str(labels[r][c]).strip().lower())
                if label is None or label == NUMERIC_MARKER:
                    continue
                if not cell.content.strip() or is_numeric(cell.content):
                    continue
                examples.append(cell_example(table, r, c, index, evidence_k, label=label))
    examples.sort(key=lambda ex: (
        ex.label or "",
        ex.text_fields["content"],
        ex.text_fields["row_context"],
        ex.text_fields["column_context"],
    ))
    # the retrieved-evidence field is hundreds of tokens long; averaged it
    # informs the decision without flooding the structural features
    return classifier.train(examples, TrainConfig(
        alpha=alpha, labels=CELL_CLASSES, normalize_fields=("text",)))
