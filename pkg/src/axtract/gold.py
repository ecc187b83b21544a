"""Readers and writers for gold annotation files.

The segmented-tables format carries one JSON record per table: the cell
grid (full cell objects or plain strings), a per-cell class grid, the
table type, and optional per-cell leaderboard records used by the
linking evaluation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MalformedGold
from .tables import Cell, RawTable


@dataclass
class GoldCellRecord:
    row: int
    col: int
    task: str
    dataset: str
    metric: str
    value: float | None = None


@dataclass
class GoldSegTable:
    paper_id: str
    table: RawTable
    classes: list[list[str]]
    table_type: str = ""
    records: list[GoldCellRecord] = field(default_factory=list)


def load_gold_segmentation(path) -> list[GoldSegTable]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedGold(f"cannot read gold file {path}: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedGold("gold segmentation must be a list of table records")

    out = []
    for entry in data:
        table_payload = entry.get("table")
        if table_payload and "grid" in table_payload:
            table = RawTable.from_dict(table_payload)
        else:
            # plain-text grid shorthand: rows of strings
            rows = entry.get("rows") or (table_payload or {}).get("rows")
            if rows is None:
                raise MalformedGold(f"gold entry without table grid: {entry!r}")
            grid = [[Cell(content=str(text), span_origin=(r, c))
                     for c, text in enumerate(row)]
                    for r, row in enumerate(rows)]
            table = RawTable(
                table_id=entry.get("table_id", ""),
                caption=entry.get("caption", ""),
                grid=grid,
            )
        classes = entry.get("classes") or []
        if classes and len(classes) != table.n_rows:
            raise MalformedGold(
                f"class grid shape mismatch for table {table.table_id!r}")
        records = [
            GoldCellRecord(
                row=r["row"], col=r["col"], task=r["task"],
                dataset=r["dataset"], metric=r["metric"], value=r.get("value"),
            )
            for r in entry.get("records", [])
        ]
        out.append(GoldSegTable(
            paper_id=entry.get("paper_id", ""),
            table=table,
            classes=[[str(cls) for cls in row] for row in classes],
            table_type=entry.get("type", ""),
            records=records,
        ))
    return out


def save_gold_segmentation(tables: list[GoldSegTable], path) -> None:
    payload = []
    for gt in tables:
        payload.append({
            "paper_id": gt.paper_id,
            "type": gt.table_type,
            "table": gt.table.to_dict(),
            "classes": gt.classes,
            "records": [
                {"row": r.row, "col": r.col, "task": r.task,
                 "dataset": r.dataset, "metric": r.metric, "value": r.value}
                for r in gt.records
            ],
        })
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
