"""Table extraction from LaTeX sources.

Tabular-family environments are parsed into rectangular cell grids.
Column/row spans are flattened by duplicating the spanned content into
each covered cell, with ``span_origin`` recording where the content came
from, so downstream per-cell classification can treat every column
independently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import latex
from .diagnostics import Diagnostics

TABULAR_ENVS = ("tabular", "tabular*", "tabularx", "longtable")
FLOAT_ENVS = ("table", "table*")

_FULL_RULES = ("\\toprule", "\\midrule", "\\bottomrule", "\\hline")

_RULE_RE = re.compile(
    r"\s*(?:\\(?:toprule|midrule|bottomrule|hline|morecmidrules)(?:\[[^\]]*\])?"
    r"|\\(?:cmidrule|cline)(?:\([^)]*\))?\{[^{}]*\})"
)


@dataclass
class Cell:
    content: str = ""
    is_emphasised: bool = False
    style: tuple[str, ...] = ()
    reference_keys: tuple[str, ...] = ()
    is_header: bool = False
    span_origin: tuple[int, int] = (-1, -1)

    def to_dict(self) -> dict:
        return {
            "content": self.content,
            "is_emphasised": self.is_emphasised,
            "style": list(self.style),
            "reference_keys": list(self.reference_keys),
            "is_header": self.is_header,
            "span_origin": list(self.span_origin),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Cell":
        return cls(
            content=d["content"],
            is_emphasised=d["is_emphasised"],
            style=tuple(d["style"]),
            reference_keys=tuple(d["reference_keys"]),
            is_header=d["is_header"],
            span_origin=tuple(d["span_origin"]),
        )


@dataclass
class RawTable:
    table_id: str
    caption: str = ""
    grid: list[list[Cell]] = field(default_factory=list)
    float_label: str | None = None
    number: int | None = None  # float ordinal used to resolve "Table N"

    @property
    def n_rows(self) -> int:
        return len(self.grid)

    @property
    def n_cols(self) -> int:
        return len(self.grid[0]) if self.grid else 0

    def cell(self, row: int, col: int) -> Cell:
        return self.grid[row][col]

    def to_dict(self) -> dict:
        return {
            "table_id": self.table_id,
            "caption": self.caption,
            "float_label": self.float_label,
            "number": self.number,
            "grid": [[c.to_dict() for c in row] for row in self.grid],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RawTable":
        return cls(
            table_id=d["table_id"],
            caption=d["caption"],
            float_label=d.get("float_label"),
            number=d.get("number"),
            grid=[[Cell.from_dict(c) for c in row] for row in d["grid"]],
        )


@dataclass
class _RawCell:
    tex: str
    span: int = 1        # multicolumn width
    align: str | None = None


def parse_colspec(spec: str) -> list[str]:
    """Read alignment letters out of a column specification."""
    aligns: list[str] = []
    i = 0
    while i < len(spec):
        ch = spec[i]
        if ch in "lcr":
            aligns.append(ch)
            i += 1
        elif ch in "pmbX":
            aligns.append("l")
            i += 1
            if i < len(spec) and spec[i] == "{":
                _, i = latex.read_group(spec, i)
        elif ch == "*":
            i += 1
            try:
                count_s, i = latex.read_group(spec, i)
                inner, i = latex.read_group(spec, i)
                aligns.extend(parse_colspec(inner) * int(count_s))
            except (ValueError, IndexError):
                pass
        elif ch in "@!>":
            i += 1
            if i < len(spec) and spec[i] == "{":
                _, i = latex.read_group(spec, i)
        else:
            i += 1
    return aligns


def _split_depth0(tex: str, seps: tuple[str, ...]) -> list[str]:
    """Split on separators at brace/environment depth zero."""
    parts = []
    buf = []
    depth = 0
    env_depth = 0
    i = 0
    while i < len(tex):
        c = tex[i]
        if c == "\\":
            m = latex._ENV_TOKEN_RE.match(tex, i)
            if m:
                env_depth += 1 if m.group(1) == "begin" else -1
                buf.append(m.group(0))
                i = m.end()
                continue
            if depth == 0 and env_depth == 0:
                for sep in seps:
                    if tex.startswith(sep, i):
                        nxt = i + len(sep)
                        # \\ must not eat \\% or commands like \\par: only
                        # literal separators are configured here
                        parts.append("".join(buf))
                        buf = []
                        i = nxt
                        # skip optional spacing arg: \\[2pt]
                        if sep == "\\\\" and i < len(tex) and tex[i] == "[":
                            j = tex.find("]", i)
                            if j >= 0:
                                i = j + 1
                        break
                else:
                    buf.append(tex[i:i + 2])
                    i += 2
                continue
            buf.append(tex[i:i + 2])
            i += 2
            continue
        if c == "{":
            depth += 1
        elif c == "}":
            depth = max(0, depth - 1)
        if c in seps and depth == 0 and env_depth == 0:
            parts.append("".join(buf))
            buf = []
            i += 1
            continue
        buf.append(c)
        i += 1
    parts.append("".join(buf))
    return parts


def _strip_rules(segment: str) -> tuple[str, bool]:
    """Remove leading rule commands; reports whether a full rule was seen."""
    full = False
    while True:
        m = _RULE_RE.match(segment)
        if not m:
            break
        matched = m.group(0).strip()
        if any(matched.startswith(r) for r in _FULL_RULES):
            full = True
        segment = segment[m.end():]
    return segment, full


def _parse_multicolumn(tex: str) -> tuple[int, str, str] | None:
    m = re.match(r"\s*\\multicolumn\s*", tex)
    if not m:
        return None
    i = m.end()
    try:
        n_s, i = latex.read_group(tex, i)
        spec, i = latex.read_group(tex, i)
        content, i = latex.read_group(tex, i)
    except ValueError:
        return None
    if tex[i:].strip():
        content = content + " " + tex[i:]
    try:
        n = int(n_s.strip())
    except ValueError:
        return None
    aligns = parse_colspec(spec)
    return n, (aligns[0] if aligns else "c"), content


def _parse_multirow(tex: str) -> tuple[int, str] | None:
    m = re.match(r"\s*\\multirow\s*(\[[^\]]*\])?\s*", tex)
    if not m:
        return None
    i = m.end()
    try:
        n_s, i = latex.read_group(tex, i)
        _, i = latex.read_group(tex, i)  # width
        content, i = latex.read_group(tex, i)
    except ValueError:
        return None
    try:
        n = int(n_s.strip())
    except ValueError:
        return None
    return n, content


def parse_tabular(colspec: str, body: str, diagnostics: Diagnostics | None = None
                  ) -> tuple[list[list[Cell]], set[int]] | None:
    """Parse a tabular body into a grid of cells.

    Returns (grid, full_rule_positions) where positions index the row a
    full-width horizontal rule precedes (len(grid) = rule after the last
    row), or None for tables that do not resolve to a rectangle.
    """
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()

    # inner tables are skipped rather than flattened
    for start, end, _, _ in reversed(latex.find_environments(body, TABULAR_ENVS)):
        diagnostics.add("NestedTable")
        body = body[:start] + " " + body[end:]

    aligns = parse_colspec(colspec)

    rows: list[list[_RawCell]] = []
    rule_rows: set[int] = set()
    pending_multirow: dict[int, tuple[int, tuple[int, int], Cell]] = {}

    for segment in _split_depth0(body, ("\\\\", "\\tabularnewline")):
        segment, full_rule = _strip_rules(segment)
        if full_rule:
            rule_rows.add(len(rows))
        if not segment.strip():
            continue
        raw_cells: list[_RawCell] = []
        for chunk in _split_depth0(segment, ("&",)):
            mc = _parse_multicolumn(chunk)
            if mc:
                n, align, content = mc
                raw_cells.append(_RawCell(content, span=n, align=align))
            else:
                raw_cells.append(_RawCell(chunk))
        if len(raw_cells) == 1 and not raw_cells[0].tex.strip():
            continue  # stray newline, not a row
        rows.append(raw_cells)

    grid: list[list[Cell]] = []
    for raw_cells in rows:
        row_idx = len(grid)
        cells: list[Cell] = []
        started_here: dict[int, tuple[int, tuple[int, int], Cell]] = {}
        for raw in raw_cells:
            col_idx = len(cells)
            tex_content = raw.tex
            mr = _parse_multirow(tex_content)
            if mr:
                n, content = mr
                tex_content = content
                cell = _make_cell(tex_content)
                for _ in range(raw.span):
                    cells.append(_copy_cell(cell, origin=(row_idx, col_idx)))
                if n > 1:
                    started_here[col_idx] = (n - 1, (row_idx, col_idx), cell)
                continue
            cell = _make_cell(tex_content)
            cell.span_origin = (row_idx, col_idx)
            cells.append(cell)
            for _ in range(raw.span - 1):
                cells.append(_copy_cell(cell, origin=(row_idx, col_idx)))
        # fill cells covered by a multirow from an earlier row when this row
        # left them empty, as LaTeX convention requires
        for col, (remaining, origin, proto) in list(pending_multirow.items()):
            if col < len(cells) and not cells[col].content and not cells[col].is_emphasised:
                cells[col] = _copy_cell(proto, origin=origin)
            if remaining <= 1:
                del pending_multirow[col]
            else:
                pending_multirow[col] = (remaining - 1, origin, proto)
        pending_multirow.update(started_here)
        grid.append(cells)

    if not grid:
        return None
    widths = {len(row) for row in grid}
    if len(widths) != 1:
        diagnostics.add("MalformedTable", widths=sorted(widths))
        return None

    n_cols = widths.pop()
    aligns = (aligns + ["l"] * n_cols)[:n_cols]
    header_limit = min((r for r in rule_rows if r > 0), default=0)
    for r, row in enumerate(grid):
        for c, cell in enumerate(row):
            tags = ["align-" + {"l": "left", "c": "center", "r": "right"}[aligns[c]]]
            if r in rule_rows:
                tags.append("border-top")
            if (r + 1) in rule_rows:
                tags.append("border-bottom")
            cell.style = tuple(tags)
            cell.is_header = c == 0 or r < header_limit
    return grid, rule_rows


def _make_cell(tex_content: str) -> Cell:
    return Cell(
        content=latex.detex(tex_content, math="unwrap"),
        is_emphasised=latex.has_emphasis(tex_content),
        reference_keys=tuple(latex.extract_citation_keys(tex_content)),
    )


def _copy_cell(cell: Cell, origin: tuple[int, int]) -> Cell:
    return Cell(
        content=cell.content,
        is_emphasised=cell.is_emphasised,
        style=cell.style,
        reference_keys=cell.reference_keys,
        is_header=cell.is_header,
        span_origin=origin,
    )


def _find_caption(float_body: str) -> str:
    m = re.search(r"\\caption(?:of\{[^{}]*\})?\s*(?:\[[^\]]*\])?", float_body)
    if not m:
        return ""
    i = m.end()
    try:
        content, _ = latex.read_group(float_body, i)
    except (ValueError, IndexError):
        return ""
    return latex.detex(content, math="placeholder")


def _find_label(float_body: str) -> str | None:
    m = re.search(r"\\label\{([^{}]*)\}", float_body)
    return m.group(1).strip() if m else None


def extract_tables_from_text(text: str, paper_id: str,
                             diagnostics: Diagnostics | None = None
                             ) -> tuple[list[RawTable], list[tuple[int, int]]]:
    """Extract tables from assembled LaTeX text.

    Returns the tables in document order plus the spans (float or bare
    tabular) they occupy, so text extraction can cut them out.
    """
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    positioned: list[tuple[int, RawTable]] = []
    spans: list[tuple[int, int]] = []
    float_counter = 0
    covered: list[tuple[int, int]] = []

    for start, end, _, body in find_floats(text):
        float_counter += 1
        covered.append((start, end))
        spans.append((start, end))
        caption = _find_caption(body)
        label = _find_label(body)
        for _, _, env_name, env_body in latex.find_environments(body, TABULAR_ENVS):
            grid = _parse_env(env_name, env_body, diagnostics)
            if grid is None:
                continue
            positioned.append((start, RawTable(
                table_id="",
                caption=caption,
                grid=grid,
                float_label=label,
                number=float_counter,
            )))

    # bare tabulars outside any float
    for start, end, env_name, env_body in latex.find_environments(text, TABULAR_ENVS):
        if any(cs <= start and end <= ce for cs, ce in covered):
            continue
        spans.append((start, end))
        grid = _parse_env(env_name, env_body, diagnostics)
        if grid is None:
            continue
        positioned.append((start, RawTable(table_id="", caption="", grid=grid,
                                           float_label=None, number=None)))

    positioned.sort(key=lambda p: p[0])
    tables = [tab for _, tab in positioned]
    for idx, tab in enumerate(tables, start=1):
        tab.table_id = f"table_{idx}"
    spans.sort()
    return tables, spans


def _parse_env(env_name: str, env_body: str, diagnostics: Diagnostics
               ) -> list[list[Cell]] | None:
    i = 0
    body = env_body
    try:
        if env_name in ("tabular*", "tabularx"):
            _, i = latex.read_group(body, _skip_ws(body, i))
        colspec, i = latex.read_group(body, _skip_ws(body, i))
    except ValueError:
        diagnostics.add("MalformedTable", reason="missing column spec")
        return None
    parsed = parse_tabular(colspec, body[i:], diagnostics)
    if parsed is None:
        return None
    return parsed[0]


def _skip_ws(s: str, i: int) -> int:
    while i < len(s) and s[i] in " \t\n":
        i += 1
    return i


def find_floats(text: str) -> list[tuple[int, int, str, str]]:
    floats = latex.find_environments(text, FLOAT_ENVS)
    floats.sort(key=lambda f: f[0])
    return floats


def table_text(table: RawTable) -> str:
    """Flatten a table's cell contents into one string (classifier input)."""
    parts = []
    for row in table.grid:
        for cell in row:
            if cell.content:
                parts.append(cell.content)
    return " ".join(parts)
