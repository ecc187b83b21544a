"""Scoring extraction output against gold annotations.

Micro scores pool match counts over all papers; macro scores average
per-paper precision/recall/F1 over papers that have at least one gold
record.  Values are compared after normalization with a small tolerance
to absorb float serialization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MalformedGold, UnknownGranularity
from .filtering import ResultRecord
from .gold import GoldSegTable
from .taxonomy import DATASET, METRIC, TASK, Taxonomy

VALUE_TOLERANCE = 1e-6

GRANULARITIES = ("tdms", "tdm", "task", "dataset", "metric")

MACRO_BY_PAPER = "paper"
MACRO_BY_LEADERBOARD = "leaderboard"


@dataclass
class GoldRecord:
    paper_id: str
    task: str
    dataset: str
    metric: str
    value: float | None = None
    provenance: tuple[str, int, int] | None = None
    unknown_entities: tuple[str, ...] = ()


@dataclass
class PRF:
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass
class EvalReport:
    granularity: str
    micro: PRF
    macro: PRF
    per_paper: dict[str, PRF] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    top_k: dict[str, float] | None = None

    def to_dict(self) -> dict:
        out = {
            "granularity": self.granularity,
            "micro": self.micro.to_dict(),
            "macro": self.macro.to_dict(),
            "per_paper": {p: prf.to_dict() for p, prf in sorted(self.per_paper.items())},
            "counts": dict(self.counts),
        }
        if self.top_k is not None:
            out["top_k"] = dict(self.top_k)
        return out

    def format_table(self) -> str:
        rows = [("", "P", "R", "F1"),
                ("micro", *(f"{x:.4f}" for x in
                            (self.micro.precision, self.micro.recall, self.micro.f1))),
                ("macro", *(f"{x:.4f}" for x in
                            (self.macro.precision, self.macro.recall, self.macro.f1)))]
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(cell.rjust(widths[i]) for i, cell in enumerate(row))
                 for row in rows]
        return f"[{self.granularity}]\n" + "\n".join(lines)


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def load_gold(path, taxonomy: Taxonomy | None = None) -> list[GoldRecord]:
    """Load gold records, canonicalizing entity names against the taxonomy.

    Unknown entities are kept and flagged in ``unknown_entities``.
    """
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedGold(f"cannot read gold records {path}: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("records")
    if not isinstance(data, list):
        raise MalformedGold("gold records must be a list")

    records = []
    for entry in data:
        if not isinstance(entry, dict):
            raise MalformedGold(f"gold record is not an object: {entry!r}")
        try:
            paper_id = str(entry["paper_id"])
            names = {TASK: str(entry["task"]), DATASET: str(entry["dataset"]),
                     METRIC: str(entry["metric"])}
        except KeyError as exc:
            raise MalformedGold(f"missing key {exc} in gold record {entry!r}") from exc
        unknown = []
        if taxonomy is not None:
            for etype, name in names.items():
                canonical = taxonomy.find_entity(etype, name)
                if canonical is None:
                    unknown.append(etype)
                else:
                    names[etype] = canonical
        value = entry.get("value")
        provenance = None
        if "table_id" in entry:
            provenance = (entry["table_id"], entry.get("row", -1), entry.get("col", -1))
        records.append(GoldRecord(
            paper_id=paper_id, task=names[TASK], dataset=names[DATASET],
            metric=names[METRIC],
            value=float(value) if value is not None else None,
            provenance=provenance,
            unknown_entities=tuple(unknown),
        ))
    return records


def _tuple_at(task: str, dataset: str, metric: str, value: float | None,
              granularity: str):
    if granularity == "tdms":
        return (task.lower(), dataset.lower(), metric.lower(), value)
    if granularity == "tdm":
        return (task.lower(), dataset.lower(), metric.lower())
    if granularity == "task":
        return (task.lower(),)
    if granularity == "dataset":
        return (dataset.lower(),)
    if granularity == "metric":
        return (metric.lower(),)
    raise UnknownGranularity(granularity)


def _dedupe(tuples):
    """Collapse duplicates; values collapse when within tolerance."""
    out = []
    for t in tuples:
        if not any(_tuples_match(t, u) for u in out):
            out.append(t)
    return out


def _tuples_match(a, b) -> bool:
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if isinstance(x, float) and isinstance(y, float):
            if abs(x - y) > VALUE_TOLERANCE:
                return False
        elif x != y:
            return False
    return True


def _match_count(pred, gold) -> int:
    matched = 0
    remaining = list(gold)
    for p in pred:
        for g in remaining:
            if _tuples_match(p, g):
                remaining.remove(g)
                matched += 1
                break
    return matched


def evaluate_records(pred: list[ResultRecord], gold: list[GoldRecord],
                     granularity: str, macro_axis: str = MACRO_BY_PAPER
                     ) -> EvalReport:
    """Precision/recall/F1 of predictions against gold at one granularity."""
    granularity = granularity.lower()
    if granularity not in GRANULARITIES:
        raise UnknownGranularity(granularity)

    papers = sorted({r.paper_id for r in pred} | {g.paper_id for g in gold})
    per_paper: dict[str, PRF] = {}
    tp = n_pred = n_gold = 0
    for paper in papers:
        p_tuples = _dedupe([
            _tuple_at(r.task, r.dataset, r.metric, r.value, granularity)
            for r in pred if r.paper_id == paper
        ])
        g_tuples = _dedupe([
            _tuple_at(g.task, g.dataset, g.metric, g.value, granularity)
            for g in gold if g.paper_id == paper
        ])
        matched = _match_count(p_tuples, g_tuples)
        tp += matched
        n_pred += len(p_tuples)
        n_gold += len(g_tuples)
        if g_tuples:
            p = matched / len(p_tuples) if p_tuples else 0.0
            r = matched / len(g_tuples)
            per_paper[paper] = PRF(p, r, f1_score(p, r))

    micro_p = tp / n_pred if n_pred else 0.0
    micro_r = tp / n_gold if n_gold else 0.0
    micro = PRF(micro_p, micro_r, f1_score(micro_p, micro_r))

    if macro_axis == MACRO_BY_PAPER:
        macro = _average_prf(list(per_paper.values()))
    elif macro_axis == MACRO_BY_LEADERBOARD:
        macro = _macro_by_leaderboard(pred, gold, granularity)
    else:
        raise ValueError(f"unknown macro axis: {macro_axis}")

    return EvalReport(
        granularity=granularity,
        micro=micro,
        macro=macro,
        per_paper=per_paper,
        counts={"matched": tp, "predicted": n_pred, "gold": n_gold},
    )


def _average_prf(items: list[PRF]) -> PRF:
    """Macro row: averaged precision and recall, F1 recomputed from the
    averages so every report row satisfies F1 = 2PR/(P+R)."""
    if not items:
        return PRF(0.0, 0.0, 0.0)
    n = len(items)
    p = sum(x.precision for x in items) / n
    r = sum(x.recall for x in items) / n
    return PRF(p, r, f1_score(p, r))


def _macro_by_leaderboard(pred: list[ResultRecord], gold: list[GoldRecord],
                          granularity: str) -> PRF:
    """Alternative macro axis: average over distinct gold (t, d, m) groups."""
    groups = sorted({(g.task.lower(), g.dataset.lower(), g.metric.lower()) for g in gold})
    items = []
    for key in groups:
        g_tuples = _dedupe([
            (g.paper_id, *_tuple_at(g.task, g.dataset, g.metric, g.value, granularity))
            for g in gold
            if (g.task.lower(), g.dataset.lower(), g.metric.lower()) == key
        ])
        p_tuples = _dedupe([
            (r.paper_id, *_tuple_at(r.task, r.dataset, r.metric, r.value, granularity))
            for r in pred
            if (r.task.lower(), r.dataset.lower(), r.metric.lower()) == key
        ])
        matched = _match_count(p_tuples, g_tuples)
        p = matched / len(p_tuples) if p_tuples else 0.0
        r = matched / len(g_tuples) if g_tuples else 0.0
        items.append(PRF(p, r, f1_score(p, r)))
    return _average_prf(items)


def topk_linking_accuracy(gold_tables: list[GoldSegTable], linker, k: int
                          ) -> dict[str, float]:
    """Top-k accuracy of the linker on gold-segmented tables.

    ``linker(gold_table, row, col)`` returns ranked candidates carrying
    task/dataset/metric attributes.  Accuracy counts over every annotated
    cell: the full (t, d, m) triple plus each entity independently.
    """
    hits = {"leaderboard": 0, "task": 0, "dataset": 0, "metric": 0}
    total = 0
    for gt in gold_tables:
        for record in gt.records:
            total += 1
            top = list(linker(gt, record.row, record.col))[:k]
            want = (record.task.lower(), record.dataset.lower(), record.metric.lower())
            if any((c.task.lower(), c.dataset.lower(), c.metric.lower()) == want
                   for c in top):
                hits["leaderboard"] += 1
            if any(c.task.lower() == want[0] for c in top):
                hits["task"] += 1
            if any(c.dataset.lower() == want[1] for c in top):
                hits["dataset"] += 1
            if any(c.metric.lower() == want[2] for c in top):
                hits["metric"] += 1
    if total == 0:
        return {key: 0.0 for key in hits}
    return {key: count / total for key, count in hits.items()}
