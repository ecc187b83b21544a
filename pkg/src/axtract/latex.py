"""Low-level LaTeX source manipulation: comments, groups, macros, detexing.

This is a best-effort plain-text extractor, not a TeX engine.  It aims to
keep the running text (and numbers inside table cells) intact while
removing markup, which is all the downstream retrieval and classification
stages need.
"""

from __future__ import annotations

import re

from .diagnostics import Diagnostics

MATH_TOKEN = "[MATH]"

MACRO_EXPANSION_DEPTH = 10

# Commands whose single brace argument is kept as-is (style wrappers).
_UNWRAP_COMMANDS = {
    "textbf", "textit", "textsc", "texttt", "textrm", "textsf", "textmd",
    "textup", "textsl", "emph", "text", "mbox", "hbox", "fbox",
    "underline", "uline", "mathrm", "mathbf", "mathit", "bm", "boldmath",
    "small", "footnotesize", "scriptsize", "large",
}

# Two-argument commands where the first argument is dropped, second kept.
_DROP_FIRST_COMMANDS = {"textcolor", "colorbox", "href"}

# Commands dropped together with every brace argument.
_DROP_ARG_COMMANDS = {
    "documentclass", "usepackage", "bibliographystyle", "bibliography",
    "includegraphics", "label", "vspace", "hspace", "setlength",
    "addtolength", "definecolor", "pagestyle", "thispagestyle",
    "setcounter", "addtocounter", "newcounter", "graphicspath",
    "cellcolor", "rowcolor", "arrayrulecolor", "color", "hypersetup",
    "cmidrule", "cline", "sethlcolor", "colorlet", "author", "date",
    "institute", "email", "affiliation", "fancyhead", "fancyfoot",
    "renewenvironment", "newenvironment", "caption",
}

_CITE_RE = re.compile(
    r"\\(?:cite|citep|citet|citealp|citealt|citeauthor|citeyear)\*?"
    r"(?:\[[^\]]*\]){0,2}\{([^{}]*)\}"
)

_ACCENTS_RE = re.compile(r"\\[\'`^\"~=.](?:\{(\w)\}|(\w))")

_ENV_TOKEN_RE = re.compile(r"\\(begin|end)\{([A-Za-z*]+)\}")

_MATH_ENVS = (
    "equation", "equation*", "align", "align*", "gather", "gather*",
    "eqnarray", "eqnarray*", "multline", "multline*", "displaymath", "math",
)

_DROP_ENVS = ("figure", "figure*", "tikzpicture", "filecontents", "lstlisting", "verbatim")


def strip_comments(tex: str) -> str:
    """Remove % comments to end of line, keeping escaped \\%."""
    out = []
    for line in tex.split("\n"):
        i = 0
        while True:
            j = line.find("%", i)
            if j < 0:
                out.append(line)
                break
            # count preceding backslashes; odd count means escaped percent
            k = j - 1
            while k >= 0 and line[k] == "\\":
                k -= 1
            if (j - 1 - k) % 2 == 1:
                i = j + 1
                continue
            out.append(line[:j])
            break
    return "\n".join(out)


def read_group(tex: str, pos: int) -> tuple[str, int]:
    """Read a {...} group starting at ``pos``; returns (content, end).

    ``end`` points one past the closing brace.  Raises ValueError when no
    balanced group starts at ``pos``.
    """
    if pos >= len(tex) or tex[pos] != "{":
        raise ValueError("no group at position %d" % pos)
    depth = 0
    i = pos
    while i < len(tex):
        c = tex[i]
        if c == "\\" and i + 1 < len(tex):
            i += 2
            continue
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return tex[pos + 1:i], i + 1
        i += 1
    raise ValueError("unbalanced group at position %d" % pos)


def skip_optional(tex: str, pos: int) -> tuple[str | None, int]:
    """Read an optional [...] argument at ``pos`` if present."""
    if pos < len(tex) and tex[pos] == "[":
        j = tex.find("]", pos)
        if j >= 0:
            return tex[pos + 1:j], j + 1
    return None, pos


def find_environments(tex: str, names) -> list[tuple[int, int, str, str]]:
    """Locate outermost environments from ``names``.

    Returns (start, end, name, body) with start/end spanning the whole
    \\begin...\\end block.  Environments nested inside a match are left to
    the caller.
    """
    if isinstance(names, str):
        names = (names,)
    wanted = set(names)
    results = []
    stack: list[tuple[str, int, int]] = []  # (name, start, body_start)
    for m in _ENV_TOKEN_RE.finditer(tex):
        kind, name = m.group(1), m.group(2)
        if name not in wanted:
            continue
        if kind == "begin":
            stack.append((name, m.start(), m.end()))
        elif stack:
            # unwind to the matching begin of the same name if present
            for si in range(len(stack) - 1, -1, -1):
                if stack[si][0] == name:
                    sname, start, body_start = stack[si]
                    del stack[si:]
                    if si == 0:
                        results.append((start, m.end(), sname, tex[body_start:m.start()]))
                    break
    return results


def parse_macros(tex: str) -> dict[str, tuple[int, str]]:
    """Collect zero/one-argument \\newcommand and \\def macros.

    Returns name -> (nargs, body).  Macros taking two or more arguments
    are ignored; the generic cleanup strips them later.
    """
    macros: dict[str, tuple[int, str]] = {}
    for m in re.finditer(r"\\(?:re)?newcommand\*?|\\providecommand\*?|\\def", tex):
        i = m.end()
        is_def = tex[m.start():m.end()] == "\\def"
        # macro name: {\name} or \name
        if i < len(tex) and tex[i] == "{":
            try:
                name_grp, i = read_group(tex, i)
            except ValueError:
                continue
            name = name_grp.strip()
        else:
            nm = re.match(r"\\[A-Za-z@]+", tex[i:])
            if not nm:
                continue
            name = nm.group(0)
            i += nm.end()
        if not name.startswith("\\"):
            continue
        name = name[1:]
        nargs = 0
        if is_def:
            # \def\name#1{...}: parameter text up to the body group
            pm = re.match(r"(#\d)*", tex[i:])
            params = pm.group(0)
            nargs = params.count("#")
            i += pm.end()
        else:
            opt, i = skip_optional(tex, i)
            if opt is not None:
                try:
                    nargs = int(opt.strip())
                except ValueError:
                    nargs = 0
            # default-value optional argument makes this a 2+ form; skip it
            opt2, i = skip_optional(tex, i)
            if opt2 is not None:
                continue
        while i < len(tex) and tex[i] in " \t\n":
            i += 1
        if i >= len(tex) or tex[i] != "{":
            continue
        try:
            body, _ = read_group(tex, i)
        except ValueError:
            continue
        if nargs <= 1:
            macros[name] = (nargs, body)
    return macros


def strip_macro_definitions(tex: str) -> str:
    """Remove macro definition commands (after they have been collected)."""
    out = []
    i = 0
    pat = re.compile(r"\\(?:(?:re)?newcommand\*?|providecommand\*?|def)(?![A-Za-z])")
    while True:
        m = pat.search(tex, i)
        if not m:
            out.append(tex[i:])
            break
        out.append(tex[i:m.start()])
        j = m.end()
        if tex[m.start():m.end()].startswith("\\def"):
            nm = re.match(r"\\[A-Za-z@]+(#\d)*", tex[j:])
            if nm:
                j += nm.end()
        else:
            if j < len(tex) and tex[j] == "{":
                try:
                    _, j = read_group(tex, j)
                except ValueError:
                    pass
            else:
                nm = re.match(r"\\[A-Za-z@]+", tex[j:])
                if nm:
                    j += nm.end()
            _, j = skip_optional(tex, j)
            _, j = skip_optional(tex, j)
        while j < len(tex) and tex[j] in " \t\n":
            j += 1
        if j < len(tex) and tex[j] == "{":
            try:
                _, j = read_group(tex, j)
            except ValueError:
                j += 1
        i = j
    return "".join(out)


def expand_macros(tex: str, macros: dict[str, tuple[int, str]],
                  depth: int = MACRO_EXPANSION_DEPTH,
                  diagnostics: Diagnostics | None = None) -> str:
    """Expand user macros repeatedly, bounded by ``depth`` passes."""
    if not macros:
        return tex
    names = sorted(macros, key=len, reverse=True)
    pat = re.compile(r"\\(" + "|".join(re.escape(n) for n in names) + r")(?![A-Za-z])")
    for _ in range(depth):
        changed = False
        out = []
        i = 0
        while True:
            m = pat.search(tex, i)
            if not m:
                out.append(tex[i:])
                break
            out.append(tex[i:m.start()])
            nargs, body = macros[m.group(1)]
            j = m.end()
            if nargs == 0:
                out.append(body)
                changed = True
            else:
                while j < len(tex) and tex[j] in " \t":
                    j += 1
                if j < len(tex) and tex[j] == "{":
                    try:
                        arg, j = read_group(tex, j)
                    except ValueError:
                        arg = None
                else:
                    arg = None
                if arg is None:
                    out.append(m.group(0))
                else:
                    out.append(body.replace("#1", arg))
                    changed = True
            i = j
        tex = "".join(out)
        if not changed:
            return tex
    if diagnostics is not None:
        diagnostics.add("MacroDepthLimit")
    return tex


def replace_math(tex: str, token: str = MATH_TOKEN) -> str:
    """Replace display and inline math with a placeholder token."""
    for env in _MATH_ENVS:
        for start, end, _, _ in reversed(find_environments(tex, env)):
            tex = tex[:start] + " " + token + " " + tex[end:]
    tex = re.sub(r"\\\[.*?\\\]", " %s " % token, tex, flags=re.S)
    tex = re.sub(r"\\\(.*?\\\)", " %s " % token, tex, flags=re.S)
    tex = re.sub(r"(?<!\\)\$\$.+?(?<!\\)\$\$", " %s " % token, tex, flags=re.S)
    tex = re.sub(r"(?<!\\)\$[^$]+(?<!\\)\$", " %s " % token, tex, flags=re.S)
    return tex


def unwrap_math(tex: str) -> str:
    """Drop math delimiters but keep the contents (used for table cells)."""
    tex = re.sub(r"\\\[|\\\]|\\\(|\\\)", " ", tex)
    tex = re.sub(r"(?<!\\)\$", "", tex)
    return tex


def extract_citation_keys(tex: str) -> list[str]:
    keys = []
    for m in _CITE_RE.finditer(tex):
        for key in m.group(1).split(","):
            key = key.strip()
            if key and key not in keys:
                keys.append(key)
    return keys


_SYMBOL_COMMANDS = {
    "pm": "±", "times": "×", "cdot": "·", "ldots": "...", "dots": "...",
    "%": "%", "&": "&", "$": "$", "#": "#", "_": "_", "{": "{", "}": "}",
    "leq": "<=", "geq": ">=", "le": "<=", "ge": ">=", " ": " ", ",": " ",
    ";": " ", "!": "", "quad": " ", "qquad": " ", "slash": "/",
}


def detex(tex: str, refs: dict[str, str] | None = None,
          math: str = "placeholder", math_token: str = MATH_TOKEN) -> str:
    """Convert a LaTeX snippet to plain text.

    ``math`` is "placeholder" (running text) or "unwrap" (table cells,
    where numbers like $48.2$ must survive).  ``refs`` maps \\ref keys to
    replacement text, e.g. a table label to its ordinal.
    """
    refs = refs or {}

    for env in _DROP_ENVS:
        for start, end, _, _ in reversed(find_environments(tex, env)):
            tex = tex[:start] + " " + tex[end:]

    if math == "placeholder":
        tex = replace_math(tex, math_token)
    else:
        tex = unwrap_math(tex)

    # footnotes are dropped wholesale: they rarely carry table-relevant text
    tex = _drop_command_with_group(tex, "footnote")

    tex = re.sub(r"\\(?:auto|c|C)?ref\*?\{([^{}]*)\}",
                 lambda m: refs.get(m.group(1).strip(), ""), tex)
    tex = re.sub(r"\\eqref\{[^{}]*\}", "", tex)
    tex = _CITE_RE.sub("", tex)
    tex = re.sub(r"\\url\{([^{}]*)\}", r"\1", tex)
    tex = _ACCENTS_RE.sub(lambda m: m.group(1) or m.group(2), tex)

    tex = _apply_commands(tex)

    tex = re.sub(r"\\begin\{[A-Za-z*]+\}(\[[^\]]*\])?", " ", tex)
    tex = re.sub(r"\\end\{[A-Za-z*]+\}", " ", tex)
    tex = tex.replace("\\\\", " ").replace("\\tabularnewline", " ")
    tex = re.sub(r"\\[A-Za-z@]+\*?(\[[^\]]*\])?", " ", tex)  # leftover commands
    tex = re.sub(r"\\[^A-Za-z]", " ", tex)
    tex = tex.replace("~", " ")
    tex = tex.replace("``", '"').replace("''", '"')
    tex = re.sub(r"---?", "-", tex)
    tex = re.sub(r"[{}]", "", tex)
    tex = re.sub(r"\s+", " ", tex)
    return tex.strip()


def _drop_command_with_group(tex: str, name: str) -> str:
    out = []
    i = 0
    pat = re.compile(r"\\" + name + r"(?![A-Za-z])")
    while True:
        m = pat.search(tex, i)
        if not m:
            out.append(tex[i:])
            break
        out.append(tex[i:m.start()])
        j = m.end()
        _, j = skip_optional(tex, j)
        if j < len(tex) and tex[j] == "{":
            try:
                _, j = read_group(tex, j)
            except ValueError:
                j += 1
        i = j
    return "".join(out)


def _apply_commands(tex: str) -> str:
    """Resolve known commands: unwrap styles, drop noise, map symbols."""
    out = []
    i = 0
    pat = re.compile(r"\\([A-Za-z@]+\*?|[^A-Za-z])")
    while True:
        m = pat.search(tex, i)
        if not m:
            out.append(tex[i:])
            break
        out.append(tex[i:m.start()])
        name = m.group(1).rstrip("*")
        j = m.end()
        if name in _SYMBOL_COMMANDS:
            out.append(_SYMBOL_COMMANDS[name])
            i = j
            continue
        if name in _UNWRAP_COMMANDS:
            while j < len(tex) and tex[j] in " \t":
                j += 1
            if j < len(tex) and tex[j] == "{":
                try:
                    content, j = read_group(tex, j)
                    out.append(_apply_commands(content))
                except ValueError:
                    j += 1
            i = j
            continue
        if name in _DROP_FIRST_COMMANDS:
            _, j = skip_optional(tex, j)
            if j < len(tex) and tex[j] == "{":
                try:
                    _, j = read_group(tex, j)
                except ValueError:
                    j += 1
            if j < len(tex) and tex[j] == "{":
                try:
                    content, j = read_group(tex, j)
                    out.append(_apply_commands(content))
                except ValueError:
                    j += 1
            i = j
            continue
        if name in _DROP_ARG_COMMANDS:
            _, j = skip_optional(tex, j)
            while j < len(tex) and tex[j] == "{":
                try:
                    _, j = read_group(tex, j)
                except ValueError:
                    j += 1
                    break
                _, j = skip_optional(tex, j)
            i = j
            continue
        out.append(m.group(0))  # unknown: handled by the generic sweep
        i = j
    return "".join(out)


_EMPH_RE = re.compile(
    r"\\(textbf|textit|emph|textsl|textsc|bf|bfseries|it|itshape|em"
    r"|mathbf|bm|boldmath|underline|uline|textcolor|color|cellcolor|hl)(?![A-Za-z])"
)


def has_emphasis(tex: str) -> bool:
    return bool(_EMPH_RE.search(tex))
