"""Structured QA knowledge base: loading, validation, persistence, statistics.

The entry file is newline-delimited UTF-8, one JSON object per line with
keys id, question, knowledge_point, answer. A supplied contains_code key
is ignored and recomputed from the answer text.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .errors import (
    DuplicateId,
    EmptyField,
    EmptyKnowledgeBase,
    MalformedRecord,
    MissingField,
)
from .textblocks import has_code_fence

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("id", "question", "knowledge_point", "answer")

# A token is one Han character or one contiguous run of ASCII word
# characters. Punctuation and whitespace are not counted. This is a
# documented convention so statistics stay reproducible on mixed
# Chinese/code text.
_TOKEN_RE = re.compile(r"[㐀-䶿一-鿿豈-﫿]|[0-9A-Za-z_]+")

TokenCounter = Callable[[str], int]


def default_token_count(text: str) -> int:
    return len(_TOKEN_RE.findall(text))


@dataclass(frozen=True)
class QAEntry:
    id: str
    question: str
    knowledge_point: str
    answer: str
    contains_code: bool

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "question": self.question,
            "knowledge_point": self.knowledge_point,
            "answer": self.answer,
            "contains_code": self.contains_code,
        }


@dataclass(frozen=True)
class KnowledgeBase:
    entries: tuple[QAEntry, ...]

    def __post_init__(self) -> None:
        by_id: dict[str, QAEntry] = {}
        for entry in self.entries:
            if entry.id in by_id:
                raise DuplicateId(entry.id, line=0)
            by_id[entry.id] = entry
        object.__setattr__(self, "_by_id", by_id)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def get(self, entry_id: str) -> QAEntry | None:
        return self._by_id.get(entry_id)

    @property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(e.knowledge_point for e in self.entries)


@dataclass(frozen=True)
class DatasetStats:
    n_entries: int
    question_len_max: int
    question_len_min: int
    question_len_avg: float
    answer_tokens_max: int
    answer_tokens_min: int
    answer_tokens_avg: float
    n_with_code: int

    def to_dict(self) -> dict:
        return {
            "n_entries": self.n_entries,
            "question_len_max": self.question_len_max,
            "question_len_min": self.question_len_min,
            "question_len_avg": self.question_len_avg,
            "answer_tokens_max": self.answer_tokens_max,
            "answer_tokens_min": self.answer_tokens_min,
            "answer_tokens_avg": self.answer_tokens_avg,
            "n_with_code": self.n_with_code,
        }


def parse_entry(record: str | Mapping, position: int | None = None) -> QAEntry:
    """Validate one record (a JSON line or an already-decoded mapping)."""
    if isinstance(record, str):
        try:
            decoded = json.loads(record)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(position, f"invalid JSON: {exc.msg}") from exc
    else:
        decoded = record
    if not isinstance(decoded, Mapping):
        raise MalformedRecord(position, "record is not a key-value object")

    values: dict[str, str] = {}
    for name in REQUIRED_FIELDS:
        if name not in decoded:
            raise MissingField(name, position)
        raw = decoded[name]
        if not isinstance(raw, str):
            raise MalformedRecord(position, f"field {name!r} must be a string")
        value = raw.strip()
        if not value:
            raise EmptyField(name, position)
        values[name] = value

    return QAEntry(
        id=values["id"],
        question=values["question"],
        knowledge_point=values["knowledge_point"],
        answer=values["answer"],
        contains_code=has_code_fence(values["answer"]),
    )


def iter_records(path: str | Path) -> Iterable[tuple[int, str]]:
    """Yield (line_number, line) for non-blank lines of an entry file."""
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.strip()
            if stripped:
                yield lineno, stripped


def load_dataset(path: str | Path, vocabulary_path: str | Path | None = None) -> KnowledgeBase:
    """Load and validate an entry file; order preserved, duplicate ids rejected."""
    allowed: set[str] | None = None
    if vocabulary_path is not None:
        with open(vocabulary_path, encoding="utf-8") as handle:
            allowed = {line.strip() for line in handle if line.strip()}

    entries: list[QAEntry] = []
    seen: dict[str, int] = {}
    for lineno, line in iter_records(path):
        entry = parse_entry(line, position=lineno)
        if entry.id in seen:
            raise DuplicateId(entry.id, lineno)
        seen[entry.id] = lineno
        if allowed is not None and entry.knowledge_point not in allowed:
            logger.warning(
                "line %d: knowledge point %r is not in the allow-list",
                lineno,
                entry.knowledge_point,
            )
        entries.append(entry)
    return KnowledgeBase(entries=tuple(entries))


def save_dataset(kb: KnowledgeBase, path: str | Path) -> None:
    """Write the knowledge base back out in the entry file format."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for entry in kb:
            handle.write(json.dumps(entry.to_record(), ensure_ascii=False))
            handle.write("\n")


def compute_stats(kb: KnowledgeBase, tokenizer: TokenCounter = default_token_count) -> DatasetStats:
    """Token-count statistics over the whole knowledge base."""
    if len(kb) == 0:
        raise EmptyKnowledgeBase()
    q_counts = [tokenizer(e.question) for e in kb]
    a_counts = [tokenizer(e.answer) for e in kb]
    return DatasetStats(
        n_entries=len(kb),
        question_len_max=max(q_counts),
        question_len_min=min(q_counts),
        question_len_avg=round(sum(q_counts) / len(q_counts), 2),
        answer_tokens_max=max(a_counts),
        answer_tokens_min=min(a_counts),
        answer_tokens_avg=round(sum(a_counts) / len(a_counts), 2),
        n_with_code=sum(1 for e in kb if e.contains_code),
    )


_STATS_ROWS = (
    ("Number of dialogues", "n_entries"),
    ("Longest question length", "question_len_max"),
    ("Shortest question length", "question_len_min"),
    ("Average question length", "question_len_avg"),
    ("Max. # tokens per answer", "answer_tokens_max"),
    ("Min. # tokens per answer", "answer_tokens_min"),
    ("Avg. # tokens per answer", "answer_tokens_avg"),
    ("Number of answers containing code", "n_with_code"),
)


def render_stats_table(stats: DatasetStats) -> str:
    """Two-column text table over the dataset statistics."""
    data = stats.to_dict()
    width = max(len(label) for label, _ in _STATS_ROWS) + 2
    lines = [f"{'Statistic type':<{width}}Value", "-" * (width + 10)]
    for label, key in _STATS_ROWS:
        value = data[key]
        rendered = f"{value:.2f}" if isinstance(value, float) else str(value)
        lines.append(f"{label:<{width}}{rendered}")
    return "\n".join(lines)
