"""Append-only annotation log for the human review workflow.

Decisions accumulate in a JSONL file; the latest decision per cell wins
at read time.  Accepted decisions merge into the extraction's filtered
records; rejections remove the cell's record.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import UnknownLeaderboard
from .filtering import ResultRecord
from .pipeline import PaperExtraction, cell_key
from .taxonomy import Taxonomy


@dataclass
class AnnotationDecision:
    paper_id: str
    table_id: str
    row: int
    col: int
    leaderboard_id: str | None = None   # None with rejected=True rejects the cell
    rejected: bool = False
    value_override: float | None = None
    note: str | None = None
    timestamp: float = 0.0

    def cell(self) -> tuple[str, str, int, int]:
        return (self.paper_id, self.table_id, self.row, self.col)

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "table_id": self.table_id,
            "row": self.row,
            "col": self.col,
            "leaderboard_id": self.leaderboard_id,
            "rejected": self.rejected,
            "value_override": self.value_override,
            "note": self.note,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnnotationDecision":
        return cls(
            paper_id=d["paper_id"], table_id=d["table_id"],
            row=int(d["row"]), col=int(d["col"]),
            leaderboard_id=d.get("leaderboard_id"),
            rejected=bool(d.get("rejected", False)),
            value_override=d.get("value_override"),
            note=d.get("note"),
            timestamp=float(d.get("timestamp", 0.0)),
        )


class AnnotationLog:
    """Single-writer append-only log stored at <store>/annotations.jsonl."""

    def __init__(self, store_dir):
        self.path = Path(store_dir) / "annotations.jsonl"

    def append(self, decision: AnnotationDecision, taxonomy: Taxonomy) -> AnnotationDecision:
        if not decision.rejected:
            if decision.leaderboard_id is None:
                raise UnknownLeaderboard("decision accepts no leaderboard")
            if taxonomy.by_id(decision.leaderboard_id) is None:
                raise UnknownLeaderboard(decision.leaderboard_id)
        if decision.timestamp == 0.0:
            decision.timestamp = time.time()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(json.dumps(decision.to_dict(), sort_keys=True) + "\n")
        return decision

    def replay(self) -> list[AnnotationDecision]:
        if not self.path.exists():
            return []
        return [AnnotationDecision.from_dict(json.loads(line))
                for line in self.path.read_text().splitlines() if line.strip()]

    def latest_per_cell(self) -> dict[tuple[str, str, int, int], AnnotationDecision]:
        latest: dict[tuple[str, str, int, int], AnnotationDecision] = {}
        for decision in self.replay():
            latest[decision.cell()] = decision
        return latest

    def accepted(self) -> list[AnnotationDecision]:
        return [d for d in self.latest_per_cell().values() if not d.rejected]


def merged_results(extraction: PaperExtraction, log: AnnotationLog,
                   taxonomy: Taxonomy) -> list[ResultRecord]:
    """Filtered records with human decisions applied on top.

    An accepted decision adds (or replaces) the record for its cell; a
    rejection removes it.  Records from untouched cells pass through.
    """
    decisions = {
        key: d for key, d in log.latest_per_cell().items()
        if key[0] == extraction.paper_id
    }
    touched = {(d.table_id, d.row, d.col) for d in decisions.values()}
    records = [r for r in extraction.records if r.provenance not in touched]

    for decision in decisions.values():
        if decision.rejected:
            continue
        lb = taxonomy.by_id(decision.leaderboard_id)
        if lb is None:
            continue
        key = cell_key(decision.table_id, decision.row, decision.col)
        candidate = next(
            (c for c in extraction.candidates.get(key, [])
             if c.leaderboard_id == decision.leaderboard_id), None)
        if decision.value_override is not None:
            value = decision.value_override
        elif candidate is not None and candidate.normalized_value is not None:
            value = candidate.normalized_value
        else:
            continue
        records.append(ResultRecord(
            paper_id=decision.paper_id,
            task=lb.task, dataset=lb.dataset, metric=lb.metric,
            value=value,
            model_name=candidate.model_name if candidate else None,
            leaderboard_id=lb.leaderboard_id,
            confidence=candidate.posterior if candidate else 1.0,
            provenance=(decision.table_id, decision.row, decision.col),
        ))
    records.sort(key=lambda r: (r.task, r.dataset, r.metric, r.provenance))
    return records
