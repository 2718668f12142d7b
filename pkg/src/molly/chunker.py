"""Split course documents into bounded, overlap-linked retrieval chunks.

Splitting is recursive over an ordered delimiter list: a span is cut at
occurrences of the first delimiter, adjacent pieces are packed so each
chunk stays as close to max_len as the delimiter allows, and any piece
that alone exceeds max_len is re-split with the next delimiter. The final
empty-string delimiter forces a sliding window whose consecutive windows
share exactly `overlap` characters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidConfig

DEFAULT_DELIMITERS = ("\n\n", "\n", " ", "")


@dataclass(frozen=True)
class ChunkConfig:
    max_len: int = 1000
    overlap: int = 100
    delimiters: tuple[str, ...] = DEFAULT_DELIMITERS

    def __post_init__(self) -> None:
        if self.max_len <= 0:
            raise InvalidConfig("max_len must be positive")
        if not 0 <= self.overlap < self.max_len:
            raise InvalidConfig("overlap must satisfy 0 <= overlap < max_len")
        if not self.delimiters:
            raise InvalidConfig("delimiters must be non-empty")
        if self.delimiters[-1] != "":
            raise InvalidConfig("last delimiter must be the empty string")


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    seq: int
    text: str
    start: int
    end: int


def split_document(doc_id: str, text: str, config: ChunkConfig | None = None) -> list[Chunk]:
    """Split a document; every chunk is a verbatim source substring."""
    config = config or ChunkConfig()
    if not text:
        return []
    spans = _split_span(text, 0, len(text), 0, config)
    return [
        Chunk(doc_id=doc_id, seq=seq, text=text[start:end], start=start, end=end)
        for seq, (start, end) in enumerate(spans)
    ]


def _split_span(
    text: str, start: int, end: int, delim_idx: int, config: ChunkConfig
) -> list[tuple[int, int]]:
    if end - start <= config.max_len:
        return [(start, end)] if end > start else []
    delimiter = config.delimiters[delim_idx]
    if delimiter == "":
        return _forced_windows(start, end, config)

    fragments = _fragments(text, start, end, delimiter)
    if len(fragments) == 1:
        return _split_span(text, start, end, delim_idx + 1, config)

    spans: list[tuple[int, int]] = []
    group: tuple[int, int] | None = None
    for frag_start, frag_end in fragments:
        if frag_end - frag_start > config.max_len:
            if group is not None:
                spans.append(group)
                group = None
            spans.extend(_split_span(text, frag_start, frag_end, delim_idx + 1, config))
        elif group is None:
            group = (frag_start, frag_end)
        elif frag_end - group[0] <= config.max_len:
            group = (group[0], frag_end)
        else:
            spans.append(group)
            group = (frag_start, frag_end)
    if group is not None:
        spans.append(group)
    return spans


def _fragments(text: str, start: int, end: int, delimiter: str) -> list[tuple[int, int]]:
    """Cut [start, end) after each delimiter occurrence, delimiter retained."""
    fragments: list[tuple[int, int]] = []
    pos = start
    while pos < end:
        hit = text.find(delimiter, pos, end)
        if hit == -1:
            fragments.append((pos, end))
            break
        cut = hit + len(delimiter)
        fragments.append((pos, cut))
        pos = cut
    return fragments


def _forced_windows(start: int, end: int, config: ChunkConfig) -> list[tuple[int, int]]:
    step = config.max_len - config.overlap
    windows: list[tuple[int, int]] = []
    pos = start
    while True:
        window_end = min(pos + config.max_len, end)
        windows.append((pos, window_end))
        if window_end >= end:
            return windows
        pos += step
