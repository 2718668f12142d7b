"""The tutoring pipeline: role-play perception, exemplar retrieval with
draft generation, and the iterative critique/refine loop.

Every draft receives a verdict, including the last one, so a session's
`resolved` flag is always well defined: it is true exactly when the final
verdict passes all three dimensions.
"""

from __future__ import annotations

import re
import time
import uuid
from dataclasses import dataclass, field
from typing import Callable

from .errors import (
    MalformedPersonaOutput,
    MalformedVerdict,
    NoExemplars,
    UnresolvableId,
)
from .index import EmbeddingBackend, HashEmbedder, VectorIndex, embed
from .kb import KnowledgeBase
from .llm import CallRecord, CompletionRequest, render_prompt, simple_request

DEFAULT_SUMMARY_CAP = 400

_SYSTEM_PROMPTS = {
    "perception_teacher": "You are the teacher in a tutoring role-play for Python learners.",
    "perception_student": "You are an experienced Python learner evaluating a teacher's analysis.",
    "generation": "You are a Python tutoring assistant.",
    "reflection_critic": "You are a strict reviewer of Python tutoring answers.",
    "reflection_refiner": "You are a Python tutoring assistant revising an answer.",
}


@dataclass(frozen=True)
class AgentConfig:
    k: int = 3
    max_reflection_iters: int = 3
    max_perception_rounds: int = 2
    summary_cap: int = DEFAULT_SUMMARY_CAP
    perception: bool = True
    reflection: bool = True
    allow_empty_exemplars: bool = True
    templates_dir: str | None = None


@dataclass(frozen=True)
class StudentVerdict:
    addresses: bool
    critique: str

    def to_dict(self) -> dict:
        return {"addresses": self.addresses, "critique": self.critique}


@dataclass(frozen=True)
class PerceptionNote:
    teacher_analysis: str
    student_verdict: StudentVerdict
    rounds_used: int
    summary: str

    def to_dict(self) -> dict:
        return {
            "teacher_analysis": self.teacher_analysis,
            "student_verdict": self.student_verdict.to_dict(),
            "rounds_used": self.rounds_used,
            "summary": self.summary,
        }


@dataclass(frozen=True)
class ExemplarAnswer:
    entry_id: str
    question: str
    answer: str
    score: float

    def to_dict(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "question": self.question,
            "answer": self.answer,
            "score": self.score,
        }


@dataclass(frozen=True)
class Draft:
    iteration: int
    answer_text: str

    def __post_init__(self) -> None:
        if not self.answer_text:
            raise ValueError("draft answer must be non-empty")

    def to_dict(self) -> dict:
        return {"iteration": self.iteration, "answer_text": self.answer_text}


@dataclass(frozen=True)
class DimensionVerdict:
    passed: bool
    comment: str

    def to_dict(self) -> dict:
        return {"pass": self.passed, "comment": self.comment}


@dataclass(frozen=True)
class ReflectionVerdict:
    rationality: DimensionVerdict
    code_correctness: DimensionVerdict
    usefulness: DimensionVerdict
    revision_instructions: str

    @property
    def all_pass(self) -> bool:
        return self.rationality.passed and self.code_correctness.passed and self.usefulness.passed

    def to_dict(self) -> dict:
        return {
            "rationality": self.rationality.to_dict(),
            "code_correctness": self.code_correctness.to_dict(),
            "usefulness": self.usefulness.to_dict(),
            "revision_instructions": self.revision_instructions,
        }


@dataclass
class SessionTranscript:
    session_id: str
    question: str
    perception: PerceptionNote | None
    query: str
    exemplars: list[ExemplarAnswer]
    drafts: list[Draft]
    verdicts: list[ReflectionVerdict]
    final_answer: str
    resolved: bool | None
    call_log: list[CallRecord]
    timings: dict[str, float]
    aborted: bool = False
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "question": self.question,
            "perception": self.perception.to_dict() if self.perception else None,
            "query": self.query,
            "exemplars": [e.to_dict() for e in self.exemplars],
            "drafts": [d.to_dict() for d in self.drafts],
            "verdicts": [v.to_dict() for v in self.verdicts],
            "final_answer": self.final_answer,
            "resolved": self.resolved,
            "call_log": [c.to_dict() for c in self.call_log],
            "timings": self.timings,
            "aborted": self.aborted,
            "error": self.error,
        }


def _call(backend, request: CompletionRequest, call_log: list[CallRecord] | None) -> str:
    response = backend.complete(request)
    if call_log is not None:
        call_log.append(CallRecord(request.stage_tag, request.digest(), response))
    return response


_ADDRESSES_RE = re.compile(r"ADDRESSES:\s*(YES|NO)\b", re.IGNORECASE)
_CRITIQUE_RE = re.compile(r"CRITIQUE:\s*(.*?)(?=\n[A-Z]{2,}:|\Z)", re.DOTALL)
_SUMMARY_RE = re.compile(r"SUMMARY:\s*(.*)\Z", re.DOTALL)


def _parse_student(raw: str, require_summary: bool, require_critique: bool):
    addresses_match = _ADDRESSES_RE.search(raw)
    if addresses_match is None:
        raise MalformedPersonaOutput("missing ADDRESSES line")
    addresses = addresses_match.group(1).upper() == "YES"
    critique_match = _CRITIQUE_RE.search(raw)
    critique = critique_match.group(1).strip() if critique_match else ""
    summary_match = _SUMMARY_RE.search(raw)
    summary = summary_match.group(1).strip() if summary_match else ""
    if require_summary and not summary:
        raise MalformedPersonaOutput("missing SUMMARY field")
    if require_critique and not addresses and not critique:
        raise MalformedPersonaOutput("verdict is NO but CRITIQUE is missing")
    return addresses, critique, summary


def perceive(
    question: str,
    backend,
    config: AgentConfig | None = None,
    call_log: list[CallRecord] | None = None,
) -> PerceptionNote:
    """Teacher/student role-play that distills the question's intent.

    The teacher names knowledge points without answering; the student
    judges whether that framing addresses the question and writes the
    note-style summary. A negative student verdict re-prompts the teacher
    with the critique, up to the configured round cap.
    """
    config = config or AgentConfig()
    if not question.strip():
        raise ValueError("question must be non-empty")

    analysis = ""
    critique = ""
    addresses = False
    summary = ""
    rounds_used = 0
    for round_no in range(1, config.max_perception_rounds + 1):
        last_round = round_no == config.max_perception_rounds
        if round_no == 1:
            teacher_prompt = render_prompt(
                "perception_teacher", {"question": question}, config.templates_dir
            )
        else:
            teacher_prompt = render_prompt(
                "perception_teacher_retry",
                {"question": question, "critique": critique},
                config.templates_dir,
            )
        analysis = _call(
            backend,
            simple_request("perception_teacher", _SYSTEM_PROMPTS["perception_teacher"], teacher_prompt),
            call_log,
        )

        student_prompt = render_prompt(
            "perception_student",
            {"question": question, "analysis": analysis},
            config.templates_dir,
        )
        request = simple_request(
            "perception_student", _SYSTEM_PROMPTS["perception_student"], student_prompt
        )
        raw = _call(backend, request, call_log)
        rounds_used = round_no
        try:
            addresses, critique, summary = _parse_student(
                raw, require_summary=last_round, require_critique=not last_round
            )
            if addresses and not summary:
                raise MalformedPersonaOutput("verdict is YES but SUMMARY is missing")
        except MalformedPersonaOutput:
            # one re-prompt with the same request, then give up
            raw = _call(backend, request, call_log)
            addresses, critique, summary = _parse_student(
                raw, require_summary=last_round, require_critique=not last_round
            )
            if addresses and not summary:
                raise MalformedPersonaOutput("verdict is YES but SUMMARY is missing")
        if addresses:
            break

    return PerceptionNote(
        teacher_analysis=analysis,
        student_verdict=StudentVerdict(addresses=addresses, critique=critique),
        rounds_used=rounds_used,
        summary=summary[: config.summary_cap],
    )


def build_query(question: str, note: PerceptionNote) -> str:
    """Retrieval query: the question enriched with the perception summary."""
    return f"{question}\n{note.summary}"


def format_exemplars(exemplars: list[ExemplarAnswer]) -> str:
    parts = [
        f"[{i}] Question: {e.question}\nAnswer: {e.answer}"
        for i, e in enumerate(exemplars, start=1)
    ]
    return "\n\n".join(parts)


def retrieve_exemplars(
    query: str,
    kb: KnowledgeBase,
    index: VectorIndex,
    k: int = 3,
    embedder: EmbeddingBackend | None = None,
) -> list[ExemplarAnswer]:
    """Embed the query, rank KB questions by cosine, resolve the answers."""
    embedder = embedder or HashEmbedder(index.dim)
    query_vector = embed(query, embedder)
    exemplars: list[ExemplarAnswer] = []
    for result in index.top_k(query_vector, k):
        entry = kb.get(result.key)
        if entry is None:
            raise UnresolvableId(result.key)
        exemplars.append(
            ExemplarAnswer(
                entry_id=entry.id,
                question=entry.question,
                answer=entry.answer,
                score=result.score,
            )
        )
    return exemplars


def generate_draft(
    question: str,
    exemplars: list[ExemplarAnswer],
    backend,
    config: AgentConfig | None = None,
    call_log: list[CallRecord] | None = None,
) -> Draft:
    """Produce the preliminary answer grounded in the retrieved exemplars."""
    config = config or AgentConfig()
    if exemplars:
        prompt = render_prompt(
            "rag_qa",
            {"documents": format_exemplars(exemplars), "question": question},
            config.templates_dir,
        )
    elif config.allow_empty_exemplars:
        prompt = render_prompt("base_qa", {"question": question}, config.templates_dir)
    else:
        raise NoExemplars()
    text = _call(
        backend, simple_request("generation", _SYSTEM_PROMPTS["generation"], prompt), call_log
    )
    return Draft(iteration=0, answer_text=text)


_DIMENSION_RES = {
    "rationality": re.compile(r"^RATIONALITY:\s*(PASS|FAIL)\b[ \t]*[-:–—]?[ \t]*(.*)$", re.MULTILINE),
    "code_correctness": re.compile(r"^CODE:\s*(PASS|FAIL)\b[ \t]*[-:–—]?[ \t]*(.*)$", re.MULTILINE),
    "usefulness": re.compile(r"^USEFULNESS:\s*(PASS|FAIL)\b[ \t]*[-:–—]?[ \t]*(.*)$", re.MULTILINE),
}
_INSTRUCTIONS_RE = re.compile(r"^INSTRUCTIONS:\s*(.*)\Z", re.MULTILINE | re.DOTALL)


def _parse_verdict(raw: str) -> ReflectionVerdict:
    dims: dict[str, DimensionVerdict] = {}
    for name, pattern in _DIMENSION_RES.items():
        match = pattern.search(raw)
        if match is None:
            raise MalformedVerdict(f"missing {name} line")
        dims[name] = DimensionVerdict(
            passed=match.group(1).upper() == "PASS", comment=match.group(2).strip()
        )
    instructions_match = _INSTRUCTIONS_RE.search(raw)
    instructions = instructions_match.group(1).strip() if instructions_match else ""
    all_pass = all(d.passed for d in dims.values())
    if all_pass:
        instructions = ""
    elif not instructions:
        raise MalformedVerdict("failing verdict without INSTRUCTIONS")
    return ReflectionVerdict(
        rationality=dims["rationality"],
        code_correctness=dims["code_correctness"],
        usefulness=dims["usefulness"],
        revision_instructions=instructions,
    )


def critique(
    question: str,
    draft: Draft,
    exemplars: list[ExemplarAnswer],
    backend,
    config: AgentConfig | None = None,
    call_log: list[CallRecord] | None = None,
) -> ReflectionVerdict:
    """Critic pass over a draft, grounded in the exemplar answers."""
    config = config or AgentConfig()
    prompt = render_prompt(
        "reflection_critic",
        {
            "question": question,
            "draft": draft.answer_text,
            "exemplars": format_exemplars(exemplars) if exemplars else "(none retrieved)",
        },
        config.templates_dir,
    )
    request = simple_request(
        "reflection_critic", _SYSTEM_PROMPTS["reflection_critic"], prompt
    )
    raw = _call(backend, request, call_log)
    try:
        return _parse_verdict(raw)
    except MalformedVerdict:
        raw = _call(backend, request, call_log)
        return _parse_verdict(raw)


def refine(
    question: str,
    draft: Draft,
    verdict: ReflectionVerdict,
    exemplars: list[ExemplarAnswer],
    backend,
    config: AgentConfig | None = None,
    call_log: list[CallRecord] | None = None,
) -> Draft:
    """Produce the next draft from a failing verdict."""
    config = config or AgentConfig()
    if verdict.all_pass:
        raise ValueError("refine requires a verdict with at least one failing dimension")
    comments = "\n".join(
        f"{name}: {'PASS' if d.passed else 'FAIL'} {d.comment}".rstrip()
        for name, d in (
            ("rationality", verdict.rationality),
            ("code", verdict.code_correctness),
            ("usefulness", verdict.usefulness),
        )
    )
    prompt = render_prompt(
        "reflection_refiner",
        {
            "question": question,
            "draft": draft.answer_text,
            "comments": comments,
            "instructions": verdict.revision_instructions,
            "exemplars": format_exemplars(exemplars) if exemplars else "(none retrieved)",
        },
        config.templates_dir,
    )
    text = _call(
        backend,
        simple_request("reflection_refiner", _SYSTEM_PROMPTS["reflection_refiner"], prompt),
        call_log,
    )
    return Draft(iteration=draft.iteration + 1, answer_text=text)


StageCallback = Callable[[str, dict], None]


def run_session(
    question: str,
    config: AgentConfig,
    kb: KnowledgeBase,
    index: VectorIndex,
    backend,
    embedder: EmbeddingBackend | None = None,
    session_id: str | None = None,
    clock: Callable[[], float] = time.monotonic,
    on_stage: StageCallback | None = None,
) -> SessionTranscript:
    """Run the full pipeline for one question.

    Stage failures do not raise: the returned transcript is marked aborted
    and carries the error, so callers always get the partial record.
    """
    if not question or not question.strip():
        raise ValueError("question must be non-empty")
    session_id = session_id or uuid.uuid4().hex
    embedder = embedder or HashEmbedder(index.dim)

    call_log: list[CallRecord] = []
    timings: dict[str, float] = {}
    transcript = SessionTranscript(
        session_id=session_id,
        question=question,
        perception=None,
        query=question,
        exemplars=[],
        drafts=[],
        verdicts=[],
        final_answer="",
        resolved=None,
        call_log=call_log,
        timings=timings,
    )

    def emit(kind: str, payload: dict) -> None:
        if on_stage is not None:
            on_stage(kind, payload)

    try:
        if config.perception:
            started = clock()
            note = perceive(question, backend, config, call_log)
            timings["perception"] = clock() - started
            transcript.perception = note
            transcript.query = build_query(question, note)
            emit("perception_note", note.to_dict())

        started = clock()
        exemplars = retrieve_exemplars(transcript.query, kb, index, config.k, embedder)
        timings["retrieval"] = clock() - started
        transcript.exemplars = exemplars
        emit(
            "retrieval_results",
            {"query": transcript.query, "exemplars": [e.to_dict() for e in exemplars]},
        )

        started = clock()
        draft = generate_draft(question, exemplars, backend, config, call_log)
        timings["generation"] = clock() - started
        transcript.drafts.append(draft)
        emit("draft", draft.to_dict())

        if config.reflection:
            started = clock()
            while True:
                verdict = critique(question, draft, exemplars, backend, config, call_log)
                transcript.verdicts.append(verdict)
                emit("reflection_verdict", {"iteration": draft.iteration, **verdict.to_dict()})
                if verdict.all_pass:
                    transcript.resolved = True
                    break
                if draft.iteration >= config.max_reflection_iters:
                    transcript.resolved = False
                    break
                draft = refine(question, draft, verdict, exemplars, backend, config, call_log)
                transcript.drafts.append(draft)
                emit("draft", draft.to_dict())
            timings["reflection"] = clock() - started

        transcript.final_answer = transcript.drafts[-1].answer_text
    except Exception as exc:  # any stage error yields a partial, aborted transcript
        transcript.aborted = True
        transcript.error = f"{type(exc).__name__}: {exc}"
        if transcript.drafts:
            transcript.final_answer = transcript.drafts[-1].answer_text
    return transcript
