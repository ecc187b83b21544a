"""Linking numeric cells to leaderboards through evidence in contexts.

For every numeric cell a hierarchy of contexts is assembled (table row
and column, caption, table-referencing fragments, abstract, full paper).
Registered mentions found in those contexts become evidence items; a
naive-Bayes mixture scores each leaderboard, treating every piece of
evidence as either genuinely descriptive or noise, with a per-context
noise probability.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import NotNumeric
from .index import FragmentIndex, find_table_mentions_indexed
from .ingest import PaperDocument
from .numeric import parse_numeric
from .segment import CITED_MODEL, DATASET, METRIC, PAPER_MODEL, SegmentedTable
from .taxonomy import ENTITY_TYPES, Leaderboard, Taxonomy

TABLE_CTX = "table"
CAPTION_CTX = "caption"
MENTIONS_CTX = "mentions"
ABSTRACT_CTX = "abstract"
PAPER_CTX = "paper"

CONTEXT_KINDS = (TABLE_CTX, CAPTION_CTX, MENTIONS_CTX, ABSTRACT_CTX, PAPER_CTX)

# engineering defaults, monotone with context specificity; tune on a
# validation split before trusting absolute confidences
DEFAULT_NOISE_PROB = {
    TABLE_CTX: 0.1,
    CAPTION_CTX: 0.2,
    MENTIONS_CTX: 0.3,
    ABSTRACT_CTX: 0.5,
    PAPER_CTX: 0.8,
}

_LINKED_CLASSES = (DATASET, METRIC, PAPER_MODEL, CITED_MODEL)


@dataclass
class NoiseModel:
    noise_prob: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_NOISE_PROB))
    entity_given_noise: dict[str, float] = field(
        default_factory=lambda: {t: 1.0 / 3.0 for t in ENTITY_TYPES})

    def validate(self) -> None:
        for kind in CONTEXT_KINDS:
            p = self.noise_prob.get(kind)
            if p is None or not 0.0 <= p <= 1.0:
                raise ValueError(f"noise_prob[{kind!r}] must be in [0, 1]")
        total = sum(self.entity_given_noise.get(t, 0.0) for t in ENTITY_TYPES)
        if abs(total - 1.0) > 1e-9:
            raise ValueError("entity_given_noise must sum to 1 over entity types")

    def to_dict(self) -> dict:
        return {"noise_prob": dict(self.noise_prob),
                "entity_given_noise": dict(self.entity_given_noise)}

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseModel":
        model = cls()
        model.noise_prob.update(d.get("noise_prob", {}))
        model.entity_given_noise.update(d.get("entity_given_noise", {}))
        model.validate()
        return model


@dataclass
class CellContexts:
    table_ctx: list[str] = field(default_factory=list)
    caption_ctx: str = ""
    mentions_ctx: str = ""
    abstract_ctx: str = ""
    paper_ctx: str = ""

    def text(self, kind: str) -> str:
        if kind == TABLE_CTX:
            return " ".join(self.table_ctx)
        return {
            CAPTION_CTX: self.caption_ctx,
            MENTIONS_CTX: self.mentions_ctx,
            ABSTRACT_CTX: self.abstract_ctx,
            PAPER_CTX: self.paper_ctx,
        }[kind]


@dataclass(frozen=True)
class EvidenceItem:
    mention: str
    entity_type: str
    entity: str
    context: str


@dataclass
class EvidenceSet:
    items: list[EvidenceItem] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.items)

    def factors(self) -> list[tuple[str, str, str]]:
        """Distinct (mention, entity_type, context) triples.

        A mention shared by several entities of one type is a single
        observation; which entities it supports is resolved per
        leaderboard during scoring.
        """
        seen = []
        for item in self.items:
            key = (item.mention, item.entity_type, item.context)
            if key not in seen:
                seen.append(key)
        return seen


@dataclass
class ScoredCandidate:
    leaderboard_id: str
    task: str
    dataset: str
    metric: str
    posterior: float
    cell: tuple[str, int, int] | None = None  # (table_id, row, col)
    raw_value: str = ""
    normalized_value: float | None = None
    model_name: str | None = None
    model_kind: str | None = None
    paper_id: str = ""

    def to_dict(self) -> dict:
        return {
            "leaderboard_id": self.leaderboard_id,
            "task": self.task,
            "dataset": self.dataset,
            "metric": self.metric,
            "posterior": self.posterior,
            "cell": list(self.cell) if self.cell else None,
            "raw_value": self.raw_value,
            "normalized_value": self.normalized_value,
            "model_name": self.model_name,
            "model_kind": self.model_kind,
            "paper_id": self.paper_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScoredCandidate":
        return cls(
            leaderboard_id=d["leaderboard_id"], task=d["task"], dataset=d["dataset"],
            metric=d["metric"], posterior=d["posterior"],
            cell=tuple(d["cell"]) if d.get("cell") else None,
            raw_value=d.get("raw_value", ""),
            normalized_value=d.get("normalized_value"),
            model_name=d.get("model_name"), model_kind=d.get("model_kind"),
            paper_id=d.get("paper_id", ""),
        )


def generate_contexts(row: int, col: int, seg: SegmentedTable,
                      doc: PaperDocument, index: FragmentIndex,
                      mention_k: int = 10) -> CellContexts:
    """Assemble the context hierarchy for one numeric cell."""
    table = seg.table
    table_ctx: list[str] = []
    for c in range(table.n_cols):
        if c != col and seg.classes[row][c] in _LINKED_CLASSES:
            content = table.grid[row][c].content
            if content and content not in table_ctx:
                table_ctx.append(content)
    for r in range(table.n_rows):
        if r != row and seg.classes[r][col] in _LINKED_CLASSES:
            content = table.grid[r][col].content
            if content and content not in table_ctx:
                table_ctx.append(content)
    mentions = find_table_mentions_indexed(index, table, mention_k)
    return CellContexts(
        table_ctx=table_ctx,
        caption_ctx=table.caption,
        mentions_ctx=" ".join(f.text for f in mentions),
        abstract_ctx=doc.abstract,
        paper_ctx=doc.full_text(),
    )


@lru_cache(maxsize=4096)
def _mention_pattern(mention: str) -> re.Pattern:
    return re.compile(
        r"(?<![A-Za-z0-9])" + re.escape(mention) + r"(?![A-Za-z0-9])",
        re.IGNORECASE)


def gather_evidence(ctx: CellContexts, taxonomy: Taxonomy) -> EvidenceSet:
    """Scan each context for every registered mention (word-boundary,
    case-insensitive); one item per (mention, entity, context) found."""
    items: list[EvidenceItem] = []
    for kind in CONTEXT_KINDS:
        text = re.sub(r"\s+", " ", ctx.text(kind))
        if not text:
            continue
        for etype in ENTITY_TYPES:
            for entity in taxonomy.entities(etype):
                for mention in taxonomy.evidence.get((etype, entity), ()):
                    if _mention_pattern(mention).search(text):
                        items.append(EvidenceItem(mention, etype, entity, kind))
    return EvidenceSet(items=items)


def score_leaderboards(evidence: EvidenceSet, taxonomy: Taxonomy,
                       noise: NoiseModel,
                       cell: tuple[str, int, int] | None = None,
                       raw_value: str = "",
                       model_name: str | None = None,
                       model_kind: str | None = None,
                       paper_id: str = "") -> list[ScoredCandidate]:
    """Posterior over all leaderboards for one cell's evidence.

    Each distinct (mention, entity type, context) observation contributes
    the mixture factor

        P(noise | ctx) * P(entity type | noise)
        + (1 - P(noise | ctx)) * P(mention | leaderboard's entity)

    accumulated in log space; the posterior is normalized over the whole
    taxonomy with a uniform prior.  An empty evidence set therefore
    yields the uniform distribution.
    """
    n = len(taxonomy.leaderboards)
    if n == 0:
        return []
    factors = evidence.factors()
    log_scores: list[float] = []
    for lb in taxonomy.leaderboards:
        lp = -math.log(n)  # uniform prior
        for mention, etype, kind in factors:
            p_noise = noise.noise_prob[kind]
            p_type = noise.entity_given_noise[etype]
            weights = taxonomy.mention_weights.get((etype, lb.entity(etype)), {})
            p_mention = weights.get(mention, 0.0)
            factor = p_noise * p_type + (1.0 - p_noise) * p_mention
            lp += math.log(factor) if factor > 0.0 else -math.inf
        log_scores.append(lp)

    peak = max(log_scores)
    if peak == -math.inf:
        posteriors = [1.0 / n] * n
    else:
        unnorm = [math.exp(lp - peak) for lp in log_scores]
        total = sum(unnorm)
        posteriors = [u / total for u in unnorm]

    candidates = []
    for lb, posterior in zip(taxonomy.leaderboards, posteriors):
        normalized = None
        if raw_value:
            try:
                normalized = normalize_metric_value(raw_value, lb)
            except NotNumeric:
                normalized = None
        candidates.append(ScoredCandidate(
            leaderboard_id=lb.leaderboard_id,
            task=lb.task, dataset=lb.dataset, metric=lb.metric,
            posterior=posterior, cell=cell, raw_value=raw_value,
            normalized_value=normalized,
            model_name=model_name, model_kind=model_kind, paper_id=paper_id,
        ))
    candidates.sort(key=lambda c: (-c.posterior, c.leaderboard_id))
    return candidates


def normalize_metric_value(raw: str, leaderboard: Leaderboard) -> float:
    """Parse a result cell and scale it into the leaderboard's range.

    A fraction-range leaderboard maps values in (1, 100] down by 100; a
    percent-range leaderboard maps values in (0, 1] up by 100.  The
    function is idempotent on its own output.
    """
    parsed = parse_numeric(raw)
    if parsed is None:
        raise NotNumeric(f"cannot parse numeric value from {raw!r}")
    value = parsed.value
    hint = leaderboard.range_hint
    if hint == "fraction" and 1.0 < value <= 100.0:
        return value / 100.0
    if hint == "percent" and 0.0 < value <= 1.0:
        return value * 100.0
    return value


def attach_model(seg: SegmentedTable, row: int, col: int
                 ) -> tuple[str | None, str | None]:
    """Nearest paper/cited model cell in the row, else in the column."""
    table = seg.table
    best: tuple[int, int, str, str] | None = None  # (distance, index, name, kind)
    for c in range(table.n_cols):
        kind = seg.classes[row][c]
        if kind in (PAPER_MODEL, CITED_MODEL) and table.grid[row][c].content:
            entry = (abs(c - col), c, table.grid[row][c].content, kind)
            if best is None or entry[:2] < best[:2]:
                best = entry
    if best is None:
        for r in range(table.n_rows):
            kind = seg.classes[r][col]
            if kind in (PAPER_MODEL, CITED_MODEL) and table.grid[r][col].content:
                entry = (abs(r - row), r, table.grid[r][col].content, kind)
                if best is None or entry[:2] < best[:2]:
                    best = entry
    if best is None:
        return None, None
    return best[2], best[3]
