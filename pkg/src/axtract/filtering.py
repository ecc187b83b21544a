"""Reduce scored candidates to the final results tuples.

Four steps: keep only paper-model results, apply the first confidence
threshold, keep the single best value per leaderboard (honoring its
higher-is-better orientation), then apply the second threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linking import ScoredCandidate
from .segment import PAPER_MODEL
from .taxonomy import Taxonomy

DEFAULT_T1 = 0.1
DEFAULT_T2 = 0.5


@dataclass
class ResultRecord:
    paper_id: str
    task: str
    dataset: str
    metric: str
    value: float
    model_name: str | None
    leaderboard_id: str
    confidence: float
    provenance: tuple[str, int, int]  # (table_id, row, col)

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "task": self.task,
            "dataset": self.dataset,
            "metric": self.metric,
            "value": self.value,
            "model": self.model_name,
            "confidence": self.confidence,
            "leaderboard_id": self.leaderboard_id,
            "table_id": self.provenance[0],
            "row": self.provenance[1],
            "col": self.provenance[2],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResultRecord":
        return cls(
            paper_id=d.get("paper_id", ""),
            task=d["task"], dataset=d["dataset"], metric=d["metric"],
            value=d["value"], model_name=d.get("model"),
            leaderboard_id=d.get("leaderboard_id", ""),
            confidence=d.get("confidence", 0.0),
            provenance=(d.get("table_id", ""), d.get("row", -1), d.get("col", -1)),
        )


def filter_results(candidates: list[ScoredCandidate], taxonomy: Taxonomy,
                   t1: float = DEFAULT_T1, t2: float = DEFAULT_T2
                   ) -> list[ResultRecord]:
    """Candidates below a threshold are dropped strictly; ties within a
    leaderboard keep the higher confidence, then the earlier cell."""
    higher = {lb.leaderboard_id: lb.higher_is_better for lb in taxonomy.leaderboards}

    surviving = [
        c for c in candidates
        if c.model_kind == PAPER_MODEL
        and c.posterior >= t1
        and c.normalized_value is not None
    ]

    best: dict[str, ScoredCandidate] = {}
    for cand in surviving:
        current = best.get(cand.leaderboard_id)
        if current is None or _beats(cand, current, higher.get(cand.leaderboard_id, True)):
            best[cand.leaderboard_id] = cand

    records = []
    for cand in best.values():
        if cand.posterior < t2:
            continue
        records.append(ResultRecord(
            paper_id=cand.paper_id,
            task=cand.task, dataset=cand.dataset, metric=cand.metric,
            value=cand.normalized_value,
            model_name=cand.model_name,
            leaderboard_id=cand.leaderboard_id,
            confidence=cand.posterior,
            provenance=cand.cell if cand.cell else ("", -1, -1),
        ))
    records.sort(key=lambda r: (r.task, r.dataset, r.metric, r.provenance))
    return records


def _beats(challenger: ScoredCandidate, incumbent: ScoredCandidate,
           higher_is_better: bool) -> bool:
    a, b = challenger.normalized_value, incumbent.normalized_value
    if a != b:
        return a > b if higher_is_better else a < b
    if challenger.posterior != incumbent.posterior:
        return challenger.posterior > incumbent.posterior
    return (challenger.cell or ()) < (incumbent.cell or ())
