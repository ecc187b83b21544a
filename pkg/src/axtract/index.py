"""Per-paper fragment index with BM25 retrieval.

Documents are split into sentence windows; the index serves cell-content
lookups during table segmentation and table-mention lookups during
context generation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .ingest import PaperDocument
from .tables import RawTable

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75
MAX_FRAGMENT_TOKENS = 300

# hyphenated and dotted compounds survive as single terms ("sst-2", "en-vi")
_TOKEN_RE = re.compile(r"[a-z0-9]+(?:[-.][a-z0-9]+)*")

_SENTENCE_RE = re.compile(r"(?<=[.!?])\s+(?=[A-Z0-9(\[])")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENTENCE_RE.split(text) if s.strip()]


@dataclass
class Fragment:
    fragment_id: str
    paper_id: str
    section_heading: str
    text: str
    order: int


@dataclass
class FragmentIndex:
    paper_id: str
    fragments: list[Fragment]
    postings: dict[str, list[tuple[int, int]]]  # term -> [(fragment pos, tf)]
    doc_lengths: list[int]
    avg_doc_length: float
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B

    def __len__(self) -> int:
        return len(self.fragments)

    def idf(self, term: str) -> float:
        n = len(self.postings.get(term, ()))
        if n == 0:
            return 0.0
        return math.log(1.0 + (len(self.fragments) - n + 0.5) / (n + 0.5))

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "k1": self.k1,
            "b": self.b,
            "fragments": [
                {"fragment_id": f.fragment_id, "section_heading": f.section_heading,
                 "text": f.text, "order": f.order}
                for f in self.fragments
            ],
        }


def build_index(doc: PaperDocument, k1: float = DEFAULT_K1, b: float = DEFAULT_B
                ) -> FragmentIndex:
    """Split a document into fragments and build the inverted index.

    Fragments are sentences grouped greedily into windows of at most
    MAX_FRAGMENT_TOKENS tokens, never crossing a section boundary.
    """
    pieces: list[tuple[str, str]] = []
    if doc.title:
        pieces.append(("title", doc.title))
    if doc.abstract:
        pieces.append(("abstract", doc.abstract))
    for heading, body in doc.sections:
        if body:
            pieces.append((heading, body))
    for key, text in doc.references:
        if text:
            pieces.append(("references", f"[{key}] {text}"))

    fragments: list[Fragment] = []
    for heading, text in pieces:
        for window in _windows(split_sentences(text)):
            order = len(fragments)
            fragments.append(Fragment(
                fragment_id=f"{doc.paper_id}:f{order}",
                paper_id=doc.paper_id,
                section_heading=heading,
                text=window,
                order=order,
            ))

    postings: dict[str, list[tuple[int, int]]] = {}
    doc_lengths: list[int] = []
    for pos, frag in enumerate(fragments):
        tokens = tokenize(frag.text)
        doc_lengths.append(len(tokens))
        counts: dict[str, int] = {}
        for t in tokens:
            counts[t] = counts.get(t, 0) + 1
        for term, tf in counts.items():
            postings.setdefault(term, []).append((pos, tf))

    avg = sum(doc_lengths) / len(doc_lengths) if doc_lengths else 0.0
    return FragmentIndex(
        paper_id=doc.paper_id,
        fragments=fragments,
        postings=postings,
        doc_lengths=doc_lengths,
        avg_doc_length=avg,
        k1=k1,
        b=b,
    )


def _windows(sentences: list[str]) -> list[str]:
    windows = []
    current: list[str] = []
    current_len = 0
    for sent in sentences:
        n = len(tokenize(sent))
        if current and current_len + n > MAX_FRAGMENT_TOKENS:
            windows.append(" ".join(current))
            current, current_len = [], 0
        current.append(sent)
        current_len += n
    if current:
        windows.append(" ".join(current))
    return windows


def search(index: FragmentIndex, query: str, k: int) -> list[tuple[Fragment, float]]:
    """BM25-ranked fragments for a query; ties break by fragment order."""
    terms = tokenize(query)
    if not terms or not index.fragments:
        return []
    scores: dict[int, float] = {}
    for term in set(terms):
        idf = index.idf(term)
        if idf == 0.0:
            continue
        repeat = terms.count(term)
        for pos, tf in index.postings[term]:
            norm = index.k1 * (1.0 - index.b
                               + index.b * index.doc_lengths[pos] / index.avg_doc_length)
            contrib = idf * tf * (index.k1 + 1.0) / (tf + norm)
            scores[pos] = scores.get(pos, 0.0) + repeat * contrib
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return [(index.fragments[pos], score) for pos, score in ranked[:k]]


def find_table_mentions(doc: PaperDocument, table: RawTable, k: int = 10
                        ) -> list[Fragment]:
    """Fragments whose text references the table by ordinal ("Table 2")."""
    if table.number is None:
        return []
    index = build_index(doc)
    return find_table_mentions_indexed(index, table, k)


def find_table_mentions_indexed(index: FragmentIndex, table: RawTable, k: int = 10
                                ) -> list[Fragment]:
    if table.number is None:
        return []
    pattern = re.compile(r"\btable\s+%d\b" % table.number, re.IGNORECASE)
    hits = [f for f in index.fragments if pattern.search(f.text)]
    return hits[:k]
