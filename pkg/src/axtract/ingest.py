"""Load LaTeX source bundles and turn them into structured documents."""

from __future__ import annotations

import re
import tarfile
from dataclasses import dataclass, field
from pathlib import Path

from . import latex, tables
from .diagnostics import Diagnostics
from .errors import NoMainFile, UnreadableArchive
from .tables import RawTable

INCLUDE_DEPTH_LIMIT = 10

_TEX_SUFFIXES = (".tex", ".ltx")


@dataclass
class PaperSource:
    paper_id: str
    files: dict[str, bytes]
    main_file: str

    def text(self, path: str) -> str:
        return self.files[path].decode("utf-8", errors="replace")


@dataclass
class PaperDocument:
    paper_id: str
    title: str = ""
    abstract: str = ""
    sections: list[tuple[str, str]] = field(default_factory=list)
    references: list[tuple[str, str]] = field(default_factory=list)
    tables: list[RawTable] = field(default_factory=list)

    def full_text(self) -> str:
        """The entire paper text: title, abstract, sections, references."""
        parts = [self.title, self.abstract]
        parts.extend(body for _, body in self.sections)
        parts.extend(text for _, text in self.references)
        return " ".join(p for p in parts if p)

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "title": self.title,
            "abstract": self.abstract,
            "sections": [{"heading": h, "text": b} for h, b in self.sections],
            "references": [{"key": k, "text": t} for k, t in self.references],
            "tables": [t.to_dict() for t in self.tables],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PaperDocument":
        return cls(
            paper_id=d["paper_id"],
            title=d["title"],
            abstract=d["abstract"],
            sections=[(s["heading"], s["text"]) for s in d["sections"]],
            references=[(r["key"], r["text"]) for r in d["references"]],
            tables=[RawTable.from_dict(t) for t in d["tables"]],
        )


def load_bundle(path, paper_id: str | None = None) -> PaperSource:
    """Read a directory or .tar.gz of LaTeX sources and pick the main file.

    The main file is the one containing a document environment; when
    several qualify the one defining the document class wins, remaining
    ties break lexicographically by path.
    """
    path = Path(path)
    if path.is_dir():
        files = {
            p.relative_to(path).as_posix(): p.read_bytes()
            for p in sorted(path.rglob("*")) if p.is_file()
        }
        default_id = path.name
    elif path.is_file() and path.suffix in _TEX_SUFFIXES:
        files = {path.name: path.read_bytes()}
        default_id = path.stem
    else:
        try:
            with tarfile.open(path, "r:*") as tar:
                files = {}
                for member in tar.getmembers():
                    if not member.isfile():
                        continue
                    fobj = tar.extractfile(member)
                    if fobj is None:
                        continue
                    files[member.name.lstrip("./")] = fobj.read()
        except (tarfile.TarError, OSError, EOFError) as exc:
            raise UnreadableArchive(f"cannot read archive {path}: {exc}") from exc
        default_id = path.name
        for suffix in (".tar.gz", ".tgz", ".tar"):
            if default_id.endswith(suffix):
                default_id = default_id[:-len(suffix)]
                break

    main = _pick_main_file(files)
    if main is None:
        raise NoMainFile(f"no file in {path} contains a document environment")
    return PaperSource(paper_id=paper_id or default_id, files=files, main_file=main)


def _pick_main_file(files: dict[str, bytes]) -> str | None:
    candidates = []
    for name in sorted(files):
        if not name.lower().endswith(_TEX_SUFFIXES):
            continue
        text = latex.strip_comments(files[name].decode("utf-8", errors="replace"))
        if "\\begin{document}" in text:
            candidates.append((name, "\\documentclass" in text))
    if not candidates:
        return None
    with_class = [name for name, has_class in candidates if has_class]
    return min(with_class) if with_class else candidates[0][0]


def assemble_text(src: PaperSource, diagnostics: Diagnostics | None = None,
                  extra_macros: dict[str, tuple[int, str]] | None = None) -> str:
    """Comment-strip, inline includes and expand macros for a bundle."""
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    text = _inline_includes(src, src.main_file, [], diagnostics)
    macros = latex.parse_macros(text)
    if extra_macros:
        macros.update(extra_macros)
    text = latex.strip_macro_definitions(text)
    text = latex.expand_macros(text, macros, diagnostics=diagnostics)
    return text


def _inline_includes(src: PaperSource, name: str, stack: list[str],
                     diagnostics: Diagnostics) -> str:
    resolved = _resolve_tex_name(src, name)
    if resolved is None:
        diagnostics.add("MissingInclude", file=name)
        return ""
    if resolved in stack:
        diagnostics.add("IncludeCycle", file=resolved)
        return ""
    if len(stack) >= INCLUDE_DEPTH_LIMIT:
        diagnostics.add("IncludeDepthLimit", file=resolved)
        return ""
    text = latex.strip_comments(src.text(resolved))
    stack = stack + [resolved]

    def repl(m: re.Match) -> str:
        return " " + _inline_includes(src, m.group(1).strip(), stack, diagnostics) + " "

    return re.sub(r"\\(?:input|include)\{([^{}]*)\}", repl, text)


def _resolve_tex_name(src: PaperSource, name: str) -> str | None:
    for candidate in (name, name + ".tex"):
        if candidate in src.files:
            return candidate
    return None


def extract_tables(src: PaperSource, diagnostics: Diagnostics | None = None
                   ) -> list[RawTable]:
    """Extract all tables from a source bundle, in document order."""
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    text = assemble_text(src, diagnostics)
    extracted, _ = tables.extract_tables_from_text(text, src.paper_id, diagnostics)
    return extracted


_SECTION_RE = re.compile(
    r"\\(section|subsection|subsubsection|paragraph)\*?\s*(?:\[[^\]]*\])?(?=\{)")

_BIBITEM_RE = re.compile(r"\\bibitem\s*(?:\[[^\]]*\])?\{([^{}]*)\}")


def extract_document(src: PaperSource, diagnostics: Diagnostics | None = None
                     ) -> PaperDocument:
    """Produce the structured plain-text view of a paper plus its tables."""
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    text = assemble_text(src, diagnostics)

    extracted, spans = tables.extract_tables_from_text(text, src.paper_id, diagnostics)
    refs = {t.float_label: str(t.number) for t in extracted
            if t.float_label and t.number is not None}

    title = ""
    tm = re.search(r"\\title\s*(?:\[[^\]]*\])?(?=\{)", text)
    if tm:
        try:
            raw_title, _ = latex.read_group(text, tm.end())
            title = latex.detex(raw_title, refs=refs)
        except ValueError:
            pass

    body = text
    dm = re.search(r"\\begin\{document\}(.*)\\end\{document\}", body, flags=re.S)
    if dm:
        body = dm.group(1)
        offset = dm.start(1)
        spans = [(max(s - offset, 0), e - offset) for s, e in spans
                 if e > offset and s < dm.end(1)]

    # cut table floats/tabulars out of the running text
    for s, e in sorted(spans, reverse=True):
        body = body[:s] + " " + body[e:]

    abstract = ""
    envs = latex.find_environments(body, "abstract")
    if envs:
        start, end, _, abs_body = envs[0]
        abstract = latex.detex(abs_body, refs=refs)
        body = body[:start] + " " + body[end:]
    else:
        am = re.search(r"\\abstract(?=\{)", body)
        if am:
            try:
                raw_abs, end = latex.read_group(body, am.end())
                abstract = latex.detex(raw_abs, refs=refs)
                body = body[:am.start()] + " " + body[end:]
            except ValueError:
                pass

    references: list[tuple[str, str]] = []
    bib_envs = latex.find_environments(body, "thebibliography")
    for _, _, _, bib_body in bib_envs:
        items = _BIBITEM_RE.split(bib_body)
        # split yields [pre, key1, text1, key2, text2, ...]
        for i in range(1, len(items) - 1, 2):
            key = items[i].strip()
            ref_text = latex.detex(items[i + 1], refs=refs)
            if key:
                references.append((key, ref_text))
    for start, end, _, _ in reversed(bib_envs):
        body = body[:start] + " " + body[end:]

    sections: list[tuple[str, str]] = []
    pos = 0
    pending_heading = ""
    for m in _SECTION_RE.finditer(body):
        chunk = latex.detex(body[pos:m.start()], refs=refs)
        if chunk:
            sections.append((pending_heading, chunk))
        elif pending_heading:
            sections.append((pending_heading, ""))
        try:
            raw_heading, after = latex.read_group(body, m.end())
            pending_heading = latex.detex(raw_heading, refs=refs)
            pos = after
        except ValueError:
            pending_heading = ""
            pos = m.end()
    tail = latex.detex(body[pos:], refs=refs)
    if tail or pending_heading:
        sections.append((pending_heading, tail))
    sections = [(h, b) for h, b in sections if h or b]

    return PaperDocument(
        paper_id=src.paper_id,
        title=title,
        abstract=abstract,
        sections=sections,
        references=references,
        tables=extracted,
    )
