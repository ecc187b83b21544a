"""Diagnostics collected while processing a paper.

Nothing here is fatal: unparseable regions are dropped and counted so a
batch run can report what was lost without aborting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Diagnostics:
    paper_id: str = ""
    events: list[dict] = field(default_factory=list)

    def add(self, kind: str, **detail) -> None:
        event = {"kind": kind}
        if self.paper_id:
            event["paper_id"] = self.paper_id
        event.update(detail)
        self.events.append(event)

    def count(self, kind: str) -> int:
        return sum(1 for e in self.events if e["kind"] == kind)

    def extend(self, other: "Diagnostics") -> None:
        self.events.extend(other.events)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.events)
