"""The closed set of known leaderboards and their mention evidence.

A leaderboard is a (task, dataset, metric) triple with a higher-is-better
orientation.  Every task, dataset and metric carries a set of mention
strings; finding one in a cell's context is evidence that the cell links
to entities carrying that mention.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .abbrev import AbbreviationPair
from .errors import DuplicateLeaderboard, MalformedTaxonomy, MissingExtras, NotEvidence
from .stopwords import STOP_WORDS

TASK = "task"
DATASET = "dataset"
METRIC = "metric"
ENTITY_TYPES = (TASK, DATASET, METRIC)

STRATEGIES = ("bow", "abbreviations", "curated", "combined")

RANGE_HINTS = ("percent", "fraction", "absolute")


@dataclass(frozen=True)
class Leaderboard:
    leaderboard_id: str
    task: str
    dataset: str
    metric: str
    higher_is_better: bool = True
    range_hint: str | None = None

    def entity(self, entity_type: str) -> str:
        if entity_type == TASK:
            return self.task
        if entity_type == DATASET:
            return self.dataset
        if entity_type == METRIC:
            return self.metric
        raise KeyError(entity_type)


@dataclass
class Taxonomy:
    leaderboards: list[Leaderboard]
    tasks: list[str] = field(default_factory=list)
    datasets: list[str] = field(default_factory=list)
    metrics: list[str] = field(default_factory=list)
    # (entity type, entity name) -> sorted mention strings (lowercased)
    evidence: dict[tuple[str, str], tuple[str, ...]] = field(default_factory=dict)
    # (entity type, entity name) -> mention -> normalized probability weight
    mention_weights: dict[tuple[str, str], dict[str, float]] = field(default_factory=dict)
    strategy: str | None = None

    def __len__(self) -> int:
        return len(self.leaderboards)

    def entities(self, entity_type: str) -> list[str]:
        return {TASK: self.tasks, DATASET: self.datasets, METRIC: self.metrics}[entity_type]

    def by_id(self, leaderboard_id: str) -> Leaderboard | None:
        for lb in self.leaderboards:
            if lb.leaderboard_id == leaderboard_id:
                return lb
        return None

    def find_entity(self, entity_type: str, name: str) -> str | None:
        """Canonical entity name matched case-insensitively, else None."""
        lowered = name.strip().lower()
        for canonical in self.entities(entity_type):
            if canonical.lower() == lowered:
                return canonical
        return None

    def mention_sharers(self, entity_type: str, mention: str) -> int:
        return sum(
            1 for name in self.entities(entity_type)
            if mention in self.evidence.get((entity_type, name), ())
        )


def _normalize_mention(text: str) -> str:
    return re.sub(r"\s+", " ", text.strip().lower())


def load_taxonomy(path) -> Taxonomy:
    """Load the taxonomy JSON file and populate default BoW evidence."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedTaxonomy(f"cannot read taxonomy {path}: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("leaderboards")
    if not isinstance(data, list):
        raise MalformedTaxonomy("taxonomy must be a list of leaderboard entries")

    leaderboards = []
    seen = set()
    for entry in data:
        if not isinstance(entry, dict):
            raise MalformedTaxonomy(f"leaderboard entry is not an object: {entry!r}")
        try:
            task = str(entry["task"]).strip()
            dataset = str(entry["dataset"]).strip()
            metric = str(entry["metric"]).strip()
        except KeyError as exc:
            raise MalformedTaxonomy(f"missing key {exc} in {entry!r}") from exc
        if not (task and dataset and metric):
            raise MalformedTaxonomy(f"empty entity name in {entry!r}")
        higher = bool(entry.get("higher_is_better", True))
        hint = entry.get("range_hint")
        if hint is not None and hint not in RANGE_HINTS:
            raise MalformedTaxonomy(f"unknown range_hint {hint!r}")
        key = (task.lower(), dataset.lower(), metric.lower())
        if key in seen:
            raise DuplicateLeaderboard(f"duplicate triple ({task}, {dataset}, {metric})")
        seen.add(key)
        lb_id = entry.get("id") or f"{task}::{dataset}::{metric}"
        leaderboards.append(Leaderboard(
            leaderboard_id=lb_id, task=task, dataset=dataset, metric=metric,
            higher_is_better=higher, range_hint=hint,
        ))
    return build_taxonomy(leaderboards)


def build_taxonomy(leaderboards: list[Leaderboard]) -> Taxonomy:
    tax = Taxonomy(
        leaderboards=list(leaderboards),
        tasks=sorted({lb.task for lb in leaderboards}),
        datasets=sorted({lb.dataset for lb in leaderboards}),
        metrics=sorted({lb.metric for lb in leaderboards}),
    )
    return generate_evidences(tax, "bow")


def _bow_mentions(entity_type: str, name: str) -> set[str]:
    mentions = {_normalize_mention(name)}
    if entity_type == TASK:
        # task names are common words; only the full name counts
        return mentions
    for word in name.split():
        word = _normalize_mention(word)
        if word and word not in STOP_WORDS:
            mentions.add(word)
    return mentions


def generate_evidences(taxonomy: Taxonomy, strategy: str,
                       abbreviations: list[AbbreviationPair] | None = None,
                       curated: dict[tuple[str, str], list[str]] | None = None
                       ) -> Taxonomy:
    """Return a copy of the taxonomy with mention evidence for ``strategy``.

    bow            full names plus their non-stop-word words
    abbreviations  bow plus short forms whose long form occurs in a
                   dataset or metric name
    curated        bow plus hand-curated mention lists
    combined       curated plus abbreviations
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown evidence strategy: {strategy}")
    if strategy in ("abbreviations", "combined") and abbreviations is None:
        raise MissingExtras("strategy %r needs abbreviation pairs" % strategy)
    if strategy in ("curated", "combined") and curated is None:
        raise MissingExtras("strategy %r needs curated mentions" % strategy)

    evidence: dict[tuple[str, str], set[str]] = {}
    for etype in ENTITY_TYPES:
        for name in taxonomy.entities(etype):
            evidence[(etype, name)] = _bow_mentions(etype, name)

    if strategy in ("curated", "combined"):
        for (etype, name), mentions in curated.items():
            canonical = taxonomy.find_entity(etype, name)
            if canonical is None:
                continue
            evidence[(etype, canonical)].update(
                _normalize_mention(m) for m in mentions if m.strip())

    if strategy in ("abbreviations", "combined"):
        for pair in abbreviations:
            short = _normalize_mention(pair.short_form)
            long_pat = re.compile(
                r"(?<![A-Za-z0-9])" + re.escape(pair.long_form.strip()) + r"(?![A-Za-z0-9])",
                re.IGNORECASE)
            for etype in (DATASET, METRIC):
                for name in taxonomy.entities(etype):
                    if long_pat.search(name):
                        evidence[(etype, name)].add(short)

    out = Taxonomy(
        leaderboards=list(taxonomy.leaderboards),
        tasks=list(taxonomy.tasks),
        datasets=list(taxonomy.datasets),
        metrics=list(taxonomy.metrics),
        evidence={key: tuple(sorted(ms)) for key, ms in evidence.items()},
        strategy=strategy,
    )
    out.mention_weights = _compute_mention_weights(out)
    return out


def _compute_mention_weights(taxonomy: Taxonomy) -> dict[tuple[str, str], dict[str, float]]:
    """Per-entity mention distributions, each weight ∝ 1/#sharing entities."""
    weights: dict[tuple[str, str], dict[str, float]] = {}
    for etype in ENTITY_TYPES:
        sharers: dict[str, int] = {}
        for name in taxonomy.entities(etype):
            for mention in taxonomy.evidence.get((etype, name), ()):
                sharers[mention] = sharers.get(mention, 0) + 1
        for name in taxonomy.entities(etype):
            mentions = taxonomy.evidence.get((etype, name), ())
            raw = {m: 1.0 / sharers[m] for m in mentions}
            total = sum(raw.values())
            weights[(etype, name)] = {m: w / total for m, w in raw.items()} if total else {}
    return weights


def mention_probability(taxonomy: Taxonomy, entity_type: str, mention: str,
                        entity: str) -> float:
    """Normalized weight of ``mention`` within ``entity``'s distribution."""
    mention = _normalize_mention(mention)
    table = taxonomy.mention_weights.get((entity_type, entity))
    if table is None or mention not in table:
        raise NotEvidence(f"{mention!r} is not evidence for {entity_type} {entity!r}")
    return table[mention]


def load_curated_mentions(path) -> dict[tuple[str, str], list[str]]:
    """Read the curated mention file: [{entity_type, entity_name, mentions}]."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedTaxonomy(f"cannot read curated mentions {path}: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedTaxonomy("curated mentions must be a list")
    curated: dict[tuple[str, str], list[str]] = {}
    for entry in data:
        etype = entry.get("entity_type")
        if etype not in ENTITY_TYPES:
            raise MalformedTaxonomy(f"unknown entity_type {etype!r}")
        key = (etype, str(entry.get("entity_name", "")))
        curated.setdefault(key, []).extend(str(m) for m in entry.get("mentions", []))
    return curated
