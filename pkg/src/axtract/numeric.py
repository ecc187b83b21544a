"""Numeric cell detection and value parsing.

A cell counts as numeric if, after stripping error suffixes, percent
signs and surrounding decoration, it parses as a decimal number.  Cells
holding several numbers ("47.6/48.1") yield the first one and are
flagged so the caller can record a diagnostic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)"
_NUMBER_RE = re.compile(_NUMBER)
_SINGLE_RE = re.compile(_NUMBER + r"$")
_MULTI_RE = re.compile(_NUMBER + r"(?:\s*/\s*" + _NUMBER + r")+$")


@dataclass(frozen=True)
class ParsedNumber:
    value: float
    multiple: bool = False


def parse_numeric(text: str) -> ParsedNumber | None:
    s = text.strip()
    if not s:
        return None
    while len(s) >= 2 and s[0] in "([" and s[-1] in ")]":
        s = s[1:-1].strip()
    # error suffix: "23.4 ± 0.1", "23.4 +- 0.1", "23.4 +/- 0.1"
    s = re.split(r"±|\+/-|\+-", s, maxsplit=1)[0]
    s = s.replace("%", "").strip()
    s = s.rstrip("*†‡").strip()
    s = re.sub(r"(?<=\d),(?=\d\d\d\b)", "", s)
    if _SINGLE_RE.fullmatch(s):
        return ParsedNumber(float(s))
    if _MULTI_RE.fullmatch(s):
        first = _NUMBER_RE.match(s)
        return ParsedNumber(float(first.group(0)), multiple=True)
    return None


def is_numeric(text: str) -> bool:
    return parse_numeric(text) is not None
