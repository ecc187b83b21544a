"""Multinomial naive Bayes over named text fields plus categorical features.

This is the trainable classifier behind table-type prediction and cell
segmentation.  Text fields contribute unigram counts, categorical fields
contribute a single one-hot token in their own field namespace; additive
smoothing covers unseen tokens.  Models serialize to versioned JSON and
reload bit-exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyClass
from .index import tokenize
from .tables import Cell

MODEL_VERSION = 1

SEP_TOKEN = "<sep>"


@dataclass
class LabeledExample:
    text_fields: dict[str, str] = field(default_factory=dict)
    categorical_fields: dict[str, str] = field(default_factory=dict)
    label: str | None = None


@dataclass
class LabelDistribution:
    scores: dict[str, float]

    def argmax(self) -> str:
        return max(self.scores.items(), key=lambda kv: (kv[1], kv[0]))[0]

    def __getitem__(self, label: str) -> float:
        return self.scores[label]


@dataclass
class TrainConfig:
    alpha: float = 1.0
    labels: tuple[str, ...] | None = None  # declared label set; inferred if None
    allow_single_class: bool = False
    # fields whose log-likelihood is averaged over their tokens instead of
    # summed, so a very long field cannot drown out the short ones
    normalize_fields: tuple[str, ...] = ()


@dataclass
class ClassifierModel:
    labels: list[str]
    alpha: float
    priors: dict[str, int]                                  # label -> example count
    counts: dict[str, dict[str, dict[str, int]]]            # field -> label -> token -> count
    totals: dict[str, dict[str, int]]                       # field -> label -> token total
    vocab_sizes: dict[str, int]                             # field -> |V|
    normalized_fields: list[str] = field(default_factory=list)

    def log_likelihood(self, fname: str, label: str, token: str) -> float:
        vocab = self.vocab_sizes.get(fname)
        if vocab is None:
            return 0.0  # field unknown to the model
        count = self.counts[fname].get(label, {}).get(token, 0)
        total = self.totals[fname].get(label, 0)
        # one extra vocabulary slot absorbs unseen tokens
        return math.log((count + self.alpha) / (total + self.alpha * (vocab + 1)))

    def to_dict(self) -> dict:
        return {
            "version": MODEL_VERSION,
            "labels": list(self.labels),
            "alpha": self.alpha,
            "normalized_fields": sorted(self.normalized_fields),
            "priors": {k: self.priors[k] for k in sorted(self.priors)},
            "counts": {
                f: {lbl: {t: c[lbl][t] for t in sorted(c[lbl])}
                    for lbl in sorted(c)}
                for f, c in sorted(self.counts.items())
            },
            "totals": {f: {lbl: t[lbl] for lbl in sorted(t)}
                       for f, t in sorted(self.totals.items())},
            "vocab_sizes": {f: self.vocab_sizes[f] for f in sorted(self.vocab_sizes)},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierModel":
        if d.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version: {d.get('version')}")
        return cls(
            labels=list(d["labels"]),
            alpha=d["alpha"],
            priors=dict(d["priors"]),
            counts={f: {lbl: dict(tokens) for lbl, tokens in by_label.items()}
                    for f, by_label in d["counts"].items()},
            totals={f: dict(by_label) for f, by_label in d["totals"].items()},
            vocab_sizes=dict(d["vocab_sizes"]),
            normalized_fields=list(d.get("normalized_fields", [])),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "ClassifierModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _example_fields(example: LabeledExample) -> list[tuple[str, list[str]]]:
    fields = []
    for fname, text in example.text_fields.items():
        tokens = tokenize(text)
        if tokens:
            fields.append((fname, tokens))
    for fname, value in example.categorical_fields.items():
        fields.append(("cat:" + fname, [str(value)]))
    return fields


def _example_tokens(example: LabeledExample):
    for fname, tokens in _example_fields(example):
        for token in tokens:
            yield fname, token


def train(examples: list[LabeledExample], config: TrainConfig | None = None
          ) -> ClassifierModel:
    """Fit the model; raises EmptyClass when a declared label has no examples."""
    config = config or TrainConfig()
    seen = sorted({ex.label for ex in examples if ex.label is not None})
    if not seen:
        raise EmptyClass("no labeled examples")
    labels = sorted(config.labels) if config.labels else seen
    missing = [lbl for lbl in labels if lbl not in seen]
    if missing:
        if config.allow_single_class and len(seen) >= 1:
            labels = seen
        else:
            raise EmptyClass(f"no examples for label(s): {', '.join(missing)}")

    priors = {lbl: 0 for lbl in labels}
    counts: dict[str, dict[str, dict[str, int]]] = {}
    totals: dict[str, dict[str, int]] = {}
    vocabs: dict[str, set[str]] = {}

    for ex in examples:
        if ex.label not in priors:
            continue
        priors[ex.label] += 1
        for fname, token in _example_tokens(ex):
            vocabs.setdefault(fname, set()).add(token)
            field_counts = counts.setdefault(fname, {}).setdefault(ex.label, {})
            field_counts[token] = field_counts.get(token, 0) + 1
            by_label = totals.setdefault(fname, {})
            by_label[ex.label] = by_label.get(ex.label, 0) + 1

    return ClassifierModel(
        labels=labels,
        alpha=config.alpha,
        priors=priors,
        counts=counts,
        totals=totals,
        vocab_sizes={f: len(v) for f, v in vocabs.items()},
        normalized_fields=sorted(config.normalize_fields),
    )


def predict(model: ClassifierModel, example: LabeledExample) -> LabelDistribution:
    """Posterior over the model's labels; empty examples return the prior.

    Fields listed in the model's ``normalized_fields`` contribute the mean
    of their tokens' log-likelihoods instead of the sum.
    """
    fields = _example_fields(example)
    normalized = set(model.normalized_fields)
    total_examples = sum(model.priors.values())
    log_scores = {}
    for label in model.labels:
        lp = math.log(model.priors[label] / total_examples) if model.priors[label] else -math.inf
        for fname, tokens in fields:
            contribution = sum(model.log_likelihood(fname, label, t) for t in tokens)
            if fname in normalized:
                contribution /= len(tokens)
            lp += contribution
        log_scores[label] = lp
    peak = max(log_scores.values())
    if peak == -math.inf:
        n = len(model.labels)
        return LabelDistribution({lbl: 1.0 / n for lbl in model.labels})
    exp_scores = {lbl: math.exp(lp - peak) for lbl, lp in log_scores.items()}
    norm = sum(exp_scores.values())
    return LabelDistribution({lbl: s / norm for lbl, s in exp_scores.items()})


def join_context(cells: list[str]) -> str:
    """Concatenate sibling cells with the separator token: "a <sep> b <sep>"."""
    return " ".join(f"{c} {SEP_TOKEN}" for c in cells)


def featurize(cell: Cell, row_cells: list[str], column_cells: list[str],
              evidence_texts: list[str], position: tuple[int, int] | None = None,
              label: str | None = None) -> LabeledExample:
    """Build the classification example for one table cell.

    ``row_cells``/``column_cells`` are the full sibling rows and columns
    (including the cell itself); ``evidence_texts`` are the masked
    fragments retrieved for the cell content; ``position`` is the (row,
    col) grid address, from which in-table position features derive.
    """
    categorical = {
        "is_emphasised": "true" if cell.is_emphasised else "false",
        "style": " ".join(cell.style),
        "has_reference": "true" if cell.reference_keys else "false",
        "is_header": "true" if cell.is_header else "false",
    }
    if position is not None:
        row, col = position
        categorical["first_row"] = "true" if row == 0 else "false"
        categorical["first_column"] = "true" if col == 0 else "false"
    return LabeledExample(
        text_fields={
            "text": " ".join(evidence_texts),
            "content": cell.content,
            "row_context": join_context(row_cells),
            "column_context": join_context(column_cells),
            "references": " ".join(cell.reference_keys),
        },
        categorical_fields=categorical,
        label=label,
    )
