"""Table type classification: leaderboard, ablation or irrelevant.

Two independent one-vs-rest classifiers score the leaderboard and
ablation labels from the caption and flattened table text; a table is
irrelevant when neither score reaches the threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import classifier
from .classifier import ClassifierModel, LabeledExample, TrainConfig
from .errors import EmptyClass
from .tables import RawTable, table_text

LEADERBOARD = "leaderboard"
ABLATION = "ablation"
IRRELEVANT = "irrelevant"

TABLE_TYPES = (LEADERBOARD, ABLATION, IRRELEVANT)

DEFAULT_THRESHOLD = 0.5

_REST = "rest"


@dataclass
class TableTypePrediction:
    leaderboard_prob: float
    ablation_prob: float
    decided_type: str

    @property
    def relevant(self) -> bool:
        return self.decided_type != IRRELEVANT

    def to_dict(self) -> dict:
        return {
            "leaderboard_prob": self.leaderboard_prob,
            "ablation_prob": self.ablation_prob,
            "decided_type": self.decided_type,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TableTypePrediction":
        return cls(d["leaderboard_prob"], d["ablation_prob"], d["decided_type"])


@dataclass
class TableTypeModel:
    leaderboard_model: ClassifierModel
    ablation_model: ClassifierModel

    def save(self, path) -> None:
        payload = {
            "kind": "table-type",
            "leaderboard": self.leaderboard_model.to_dict(),
            "ablation": self.ablation_model.to_dict(),
        }
        Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "TableTypeModel":
        payload = json.loads(Path(path).read_text())
        return cls(
            leaderboard_model=ClassifierModel.from_dict(payload["leaderboard"]),
            ablation_model=ClassifierModel.from_dict(payload["ablation"]),
        )


def table_example(table: RawTable, label: str | None = None) -> LabeledExample:
    return LabeledExample(
        text_fields={"caption": table.caption, "content": table_text(table)},
        label=label,
    )


def decide_type(leaderboard_prob: float, ablation_prob: float,
                threshold: float) -> str:
    """Decision rule: irrelevant iff both scores are below the threshold,
    otherwise the larger of the scores at/above it; ties prefer leaderboard."""
    lb_above = leaderboard_prob >= threshold
    ab_above = ablation_prob >= threshold
    if lb_above and (leaderboard_prob >= ablation_prob or not ab_above):
        return LEADERBOARD
    if ab_above:
        return ABLATION
    return IRRELEVANT


def classify_table_type(table: RawTable, model: TableTypeModel,
                        threshold: float = DEFAULT_THRESHOLD) -> TableTypePrediction:
    example = table_example(table)
    lb = classifier.predict(model.leaderboard_model, example).scores.get(LEADERBOARD, 0.0)
    ab = classifier.predict(model.ablation_model, example).scores.get(ABLATION, 0.0)
    return TableTypePrediction(
        leaderboard_prob=lb,
        ablation_prob=ab,
        decided_type=decide_type(lb, ab, threshold),
    )


def train_table_type(gold: list[tuple[RawTable, str]], alpha: float = 1.0
                     ) -> TableTypeModel:
    """Fit both one-vs-rest models from (table, type) gold pairs."""
    types = {t for _, t in gold}
    for required in (LEADERBOARD, ABLATION):
        if required not in types:
            raise EmptyClass(f"gold has no {required} tables")

    def binary_examples(positive: str) -> list[LabeledExample]:
        examples = [
            table_example(table, positive if t == positive else _REST)
            for table, t in gold
        ]
        # canonical ordering keeps training independent of gold file order
        examples.sort(key=lambda ex: (ex.label or "",
                                      ex.text_fields["caption"],
                                      ex.text_fields["content"]))
        return examples

    config = TrainConfig(alpha=alpha)
    return TableTypeModel(
        leaderboard_model=classifier.train(binary_examples(LEADERBOARD), config),
        ablation_model=classifier.train(binary_examples(ABLATION), config),
    )
