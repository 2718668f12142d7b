"""Line-oriented scanning of triple-backtick code fences.

Shared by the knowledge base (code-flag detection) and the evaluation
harness (snippet extraction), so both agree on what counts as a fenced
block: an opening line whose stripped form starts with ``` (any language
tag after it is dropped), closed by a line that is exactly ``` after
stripping.
"""

from __future__ import annotations


def scan_fences(text: str) -> tuple[list[str], int | None]:
    """Return (snippets, open_line).

    ``snippets`` holds the content of every completed fenced block in
    source order, without the fence lines. ``open_line`` is the 1-based
    line number of a fence that was opened but never closed, or None.
    """
    snippets: list[str] = []
    open_line: int | None = None
    buf: list[str] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if open_line is None:
            if stripped.startswith("```"):
                open_line = lineno
                buf = []
        elif stripped == "```":
            snippets.append("\n".join(buf))
            open_line = None
        else:
            buf.append(line)
    return snippets, open_line


def has_code_fence(text: str) -> bool:
    """True iff the text contains at least one completed fenced block."""
    snippets, _ = scan_fences(text)
    return bool(snippets)
