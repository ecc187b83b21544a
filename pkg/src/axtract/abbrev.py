"""Parenthetical abbreviation detection over paper text.

Finds "Long Form (LF)" style definitions by aligning the short form's
characters against the preceding words, scanning right to left; the
first character must start a word.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

_PAREN_RE = re.compile(r"\(([^()]{1,60})\)")

MAX_SHORT_LEN = 12


@dataclass(frozen=True)
class AbbreviationPair:
    short_form: str
    long_form: str
    count: int = 1


def _align_long_form(short: str, candidate: str) -> str | None:
    """Match short-form characters right-to-left inside the candidate text."""
    s_idx = len(short) - 1
    l_idx = len(candidate) - 1
    while s_idx >= 0:
        ch = short[s_idx].lower()
        if not ch.isalnum():
            s_idx -= 1
            continue
        while l_idx >= 0:
            if candidate[l_idx].lower() == ch:
                # the first short-form character must begin a word
                if s_idx > 0 or l_idx == 0 or not candidate[l_idx - 1].isalnum():
                    break
            l_idx -= 1
        if l_idx < 0:
            return None
        l_idx -= 1
        s_idx -= 1
    start = candidate.rfind(" ", 0, l_idx + 1) + 1
    return candidate[start:]


def _valid_short_form(short: str) -> bool:
    if not 2 <= len(short) <= MAX_SHORT_LEN or " " in short:
        return False
    if not any(c.isalpha() for c in short):
        return False
    return short[0].isalnum()


def find_pairs(text: str) -> list[tuple[str, str]]:
    pairs = []
    for m in _PAREN_RE.finditer(text):
        short = m.group(1).strip()
        if not _valid_short_form(short):
            continue
        letters = sum(1 for c in short if c.isalnum())
        max_words = min(letters + 5, letters * 2)
        words = text[:m.start()].rstrip().split(" ")
        candidate = " ".join(words[-max_words:]).strip().rstrip(",;:")
        if not candidate:
            continue
        long_form = _align_long_form(short, candidate)
        if long_form and len(short) < len(long_form):
            pairs.append((short, long_form))
    return pairs


def detect_abbreviations(corpus) -> list[AbbreviationPair]:
    """Scan a corpus of PaperDocuments for abbreviation definitions."""
    counts: dict[tuple[str, str], int] = {}
    witness: dict[tuple[str, str], tuple[str, str]] = {}
    for doc in corpus:
        texts = [doc.title, doc.abstract]
        texts.extend(body for _, body in doc.sections)
        texts.extend(t for _, t in doc.references)
        for text in texts:
            if not text:
                continue
            for short, long_form in find_pairs(text):
                key = (short.lower(), long_form.lower())
                counts[key] = counts.get(key, 0) + 1
                witness.setdefault(key, (short, long_form))
    return [
        AbbreviationPair(short_form=witness[key][0], long_form=witness[key][1],
                         count=counts[key])
        for key in sorted(counts)
    ]


def save_abbreviations(pairs: list[AbbreviationPair], path) -> None:
    lines = [f"{p.short_form}\t{p.long_form}" for p in pairs]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def load_abbreviations(path) -> list[AbbreviationPair]:
    pairs = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        short, _, long_form = line.partition("\t")
        if short and long_form:
            pairs.append(AbbreviationPair(short_form=short, long_form=long_form))
    return pairs
