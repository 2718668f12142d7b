"""Exception types shared across the package."""

from __future__ import annotations


class MollyError(Exception):
    """Base class for every error raised by this package."""


# knowledge base ------------------------------------------------------------

class MalformedRecord(MollyError):
    def __init__(self, position: int | None, reason: str):
        self.position = position
        self.reason = reason
        where = f" at line {position}" if position is not None else ""
        super().__init__(f"malformed record{where}: {reason}")


class MissingField(MollyError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        self.position = position
        where = f" at line {position}" if position is not None else ""
        super().__init__(f"missing field {name!r}{where}")


class EmptyField(MollyError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        self.position = position
        where = f" at line {position}" if position is not None else ""
        super().__init__(f"field {name!r} is empty{where}")


class DuplicateId(MollyError):
    def __init__(self, entry_id: str, line: int):
        self.entry_id = entry_id
        self.line = line
        super().__init__(f"duplicate id {entry_id!r} at line {line}")


class EmptyKnowledgeBase(MollyError):
    def __init__(self) -> None:
        super().__init__("knowledge base has no entries")


# chunker ---------------------------------------------------------------------

class InvalidConfig(MollyError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"invalid chunk config: {reason}")


# index / embeddings ----------------------------------------------------------

class EmptyText(MollyError):
    def __init__(self) -> None:
        super().__init__("cannot embed empty text")


class DimMismatch(MollyError):
    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"dimensionality mismatch: expected {expected}, got {got}")


class EmptyIndex(MollyError):
    def __init__(self) -> None:
        super().__init__("vector index contains no items")


# llm backends ----------------------------------------------------------------

class BackendUnavailable(MollyError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"backend unavailable: {reason}")


class AuthFailure(MollyError):
    def __init__(self, status: int, detail: str = ""):
        self.status = status
        self.detail = detail
        super().__init__(f"authentication failed (status {status}): {detail}")


class PlaybookExhausted(MollyError):
    def __init__(self, stage_tag: str):
        self.stage_tag = stage_tag
        super().__init__(f"playbook has no responses left for stage {stage_tag!r}")


class UnknownTemplate(MollyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown prompt template {name!r}")


class UnboundPlaceholder(MollyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"template placeholder {{{name}}} is not bound")


# agent pipeline ----------------------------------------------------------------

class MalformedPersonaOutput(MollyError):
    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f"could not parse persona output: {detail}")


class MalformedVerdict(MollyError):
    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f"could not parse reflection verdict: {detail}")


class NoExemplars(MollyError):
    def __init__(self) -> None:
        super().__init__("no exemplars retrieved and the no-exemplar fallback is disabled")


class UnresolvableId(MollyError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"index key {key!r} does not resolve to a knowledge-base entry")


# evaluation --------------------------------------------------------------------

class OutOfRange(MollyError):
    def __init__(self, component: str, value: float):
        self.component = component
        self.value = value
        super().__init__(f"score component {component}={value} outside [0, 100]")


class MalformedJudgeOutput(MollyError):
    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f"could not parse judge output: {detail}")


class UnterminatedFence(MollyError):
    def __init__(self, line: int):
        self.line = line
        super().__init__(f"code fence opened at line {line} is never closed")


class InterpreterMissing(MollyError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"interpreter not found: {path}")


class SandboxSetupFailure(MollyError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"could not set up execution sandbox: {reason}")


class LengthMismatch(MollyError):
    def __init__(self, len_a: int, len_b: int):
        self.len_a = len_a
        self.len_b = len_b
        super().__init__(f"rating vectors differ in length: {len_a} vs {len_b}")


class DegenerateMarginals(MollyError):
    def __init__(self) -> None:
        super().__init__("expected agreement is 1 while observed agreement is below 1; kappa undefined")
