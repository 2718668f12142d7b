"""Rubric scoring, LLM-as-judge, code-accuracy checks, Cohen's kappa, and
report aggregation.

The overall score and its band are always recomputed locally from the
AC/EA/UF components; they are never accepted from a judge model.
"""

from __future__ import annotations

import os
import re
import subprocess
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Callable, Hashable, Sequence

from .errors import (
    DegenerateMarginals,
    InterpreterMissing,
    LengthMismatch,
    MalformedJudgeOutput,
    OutOfRange,
    SandboxSetupFailure,
    UnterminatedFence,
)
from .kb import QAEntry
from .llm import CallRecord, render_prompt, simple_request
from .textblocks import scan_fences

WEIGHT_AC = 0.7
WEIGHT_EA = 0.1
WEIGHT_UF = 0.2

BANDS = ("Excellent", "Good", "Average", "Poor")

_JUDGE_SYSTEM = "You are a strict evaluator of Python tutoring answers."


def round_half_up(value: float, places: int = 2) -> float:
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def _check_component(name: str, value: float) -> None:
    if not 0 <= value <= 100:
        raise OutOfRange(name, value)


def weighted_overall(ac: float, ea: float, uf: float) -> float:
    """Exact weighted sum of the three components."""
    for name, value in (("ac", ac), ("ea", ea), ("uf", uf)):
        _check_component(name, value)
    return WEIGHT_AC * ac + WEIGHT_EA * ea + WEIGHT_UF * uf


def score_overall(ac: float, ea: float, uf: float) -> float:
    """Reported overall score: the weighted sum rounded half-up to 2 decimals.

    The sum is carried out in decimal arithmetic so reported values do not
    pick up binary-float rounding artifacts.
    """
    for name, value in (("ac", ac), ("ea", ea), ("uf", uf)):
        _check_component(name, value)
    total = (
        Decimal(repr(ac)) * Decimal("0.7")
        + Decimal(repr(ea)) * Decimal("0.1")
        + Decimal(repr(uf)) * Decimal("0.2")
    )
    return float(total.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def band(overall: float) -> str:
    """Qualitative grade. The 70-80 range extends the Average band upward."""
    if not 0 <= overall <= 100:
        raise OutOfRange("overall", overall)
    if overall >= 90:
        return "Excellent"
    if overall >= 80:
        return "Good"
    if overall >= 60:
        return "Average"
    return "Poor"


@dataclass(frozen=True)
class RubricScore:
    ac: float
    ea: float
    uf: float
    overall: float
    band: str

    @classmethod
    def from_components(cls, ac: float, ea: float, uf: float) -> "RubricScore":
        overall = weighted_overall(ac, ea, uf)
        return cls(ac=ac, ea=ea, uf=uf, overall=overall, band=band(overall))

    def to_dict(self) -> dict:
        return {
            "ac": self.ac,
            "ea": self.ea,
            "uf": self.uf,
            "overall": self.overall,
            "band": self.band,
        }


_JUDGE_FIELD_RES = {
    "ac": re.compile(r"\bAC:\s*(-?\d+(?:\.\d+)?)"),
    "ea": re.compile(r"\bEA:\s*(-?\d+(?:\.\d+)?)"),
    "uf": re.compile(r"\bUF:\s*(-?\d+(?:\.\d+)?)"),
}


def _parse_judge(raw: str) -> tuple[float, float, float]:
    values: dict[str, float] = {}
    for name, pattern in _JUDGE_FIELD_RES.items():
        match = pattern.search(raw)
        if match is None:
            raise MalformedJudgeOutput(f"missing {name.upper()} value")
        values[name] = float(match.group(1))
    return values["ac"], values["ea"], values["uf"]


def judge(
    question: str,
    candidate_answer: str,
    reference_answer: str,
    backend,
    templates_dir: str | None = None,
    call_log: list[CallRecord] | None = None,
) -> RubricScore:
    """Rubric scoring by a judge model against the human reference answer."""
    prompt = render_prompt(
        "judge",
        {"question": question, "candidate": candidate_answer, "reference": reference_answer},
        templates_dir,
    )
    request = simple_request("judge", _JUDGE_SYSTEM, prompt)

    raw = backend.complete(request)
    if call_log is not None:
        call_log.append(CallRecord("judge", request.digest(), raw))
    try:
        ac, ea, uf = _parse_judge(raw)
    except MalformedJudgeOutput:
        raw = backend.complete(request)
        if call_log is not None:
            call_log.append(CallRecord("judge", request.digest(), raw))
        ac, ea, uf = _parse_judge(raw)
    return RubricScore.from_components(ac, ea, uf)


def extract_code_blocks(answer_text: str) -> list[str]:
    """Contents of all fenced blocks, language tags stripped, in order."""
    snippets, open_line = scan_fences(answer_text)
    if open_line is not None:
        raise UnterminatedFence(open_line)
    return snippets


@dataclass(frozen=True)
class CodeLimits:
    interpreter_path: str = sys.executable
    timeout_secs: float = 5.0


@dataclass(frozen=True)
class CodeOutcome:
    snippet_index: int
    verdict: int
    mode: str
    detail: str

    def to_dict(self) -> dict:
        return {
            "snippet_index": self.snippet_index,
            "verdict": self.verdict,
            "mode": self.mode,
            "detail": self.detail,
        }


_CORRECT_RE = re.compile(r"\bCORRECT:\s*(YES|NO)\b", re.IGNORECASE)


def check_code(
    snippet: str,
    snippet_index: int = 0,
    mode: str = "execution",
    limits: CodeLimits | None = None,
    backend=None,
    question: str = "",
    templates_dir: str | None = None,
) -> CodeOutcome:
    """Binary correctness check for one snippet.

    Execution mode runs the snippet as a separate interpreter process in a
    scratch directory with a minimal environment and a wall-clock timeout;
    success means exit status 0. Judge mode asks the backend instead.
    """
    if mode == "execution":
        limits = limits or CodeLimits()
        interpreter = limits.interpreter_path
        if not (os.path.isfile(interpreter) and os.access(interpreter, os.X_OK)):
            raise InterpreterMissing(interpreter)
        try:
            scratch = tempfile.TemporaryDirectory(prefix="code-check-")
        except OSError as exc:
            raise SandboxSetupFailure(str(exc)) from exc
        with scratch as workdir:
            script = os.path.join(workdir, "snippet.py")
            with open(script, "w", encoding="utf-8") as handle:
                handle.write(snippet)
            env = {"PATH": os.environ.get("PATH", ""), "LANG": "C.UTF-8"}
            try:
                proc = subprocess.run(
                    [interpreter, script],
                    cwd=workdir,
                    env=env,
                    capture_output=True,
                    text=True,
                    timeout=limits.timeout_secs,
                )
            except subprocess.TimeoutExpired:
                return CodeOutcome(
                    snippet_index, 0, "execution", f"timeout after {limits.timeout_secs:g}s"
                )
        if proc.returncode == 0:
            return CodeOutcome(snippet_index, 1, "execution", "exit status 0")
        stderr_tail = proc.stderr.strip().splitlines()[-1] if proc.stderr.strip() else ""
        return CodeOutcome(
            snippet_index, 0, "execution", stderr_tail or f"exit status {proc.returncode}"
        )

    if mode == "judge":
        if backend is None:
            raise ValueError("judge mode requires a backend")
        prompt = render_prompt(
            "code_judge", {"question": question, "snippet": snippet}, templates_dir
        )
        request = simple_request("judge", _JUDGE_SYSTEM, prompt)
        raw = backend.complete(request)
        match = _CORRECT_RE.search(raw)
        if match is None:
            raw = backend.complete(request)
            match = _CORRECT_RE.search(raw)
            if match is None:
                raise MalformedJudgeOutput("missing CORRECT verdict")
        verdict = 1 if match.group(1).upper() == "YES" else 0
        return CodeOutcome(snippet_index, verdict, "judge", f"judge said {match.group(1).upper()}")

    raise ValueError(f"unknown code-check mode {mode!r}")


@dataclass(frozen=True)
class KappaResult:
    kappa: float
    p_o: float
    p_e: float
    n: int

    def to_dict(self) -> dict:
        return {"kappa": self.kappa, "p_o": self.p_o, "p_e": self.p_e, "n": self.n}


def cohen_kappa(ratings_a: Sequence[Hashable], ratings_b: Sequence[Hashable]) -> KappaResult:
    """Two-rater chance-corrected agreement over categorical labels."""
    if len(ratings_a) != len(ratings_b):
        raise LengthMismatch(len(ratings_a), len(ratings_b))
    n = len(ratings_a)
    if n == 0:
        raise ValueError("ratings must be non-empty")
    p_o = sum(1 for a, b in zip(ratings_a, ratings_b) if a == b) / n
    labels = set(ratings_a) | set(ratings_b)
    p_e = sum(
        (sum(1 for a in ratings_a if a == label) / n)
        * (sum(1 for b in ratings_b if b == label) / n)
        for label in labels
    )
    if p_e >= 1.0:
        if p_o == 1.0:
            return KappaResult(kappa=1.0, p_o=p_o, p_e=p_e, n=n)
        raise DegenerateMarginals()
    return KappaResult(kappa=(p_o - p_e) / (1 - p_e), p_o=p_o, p_e=p_e, n=n)


@dataclass
class EvalItemResult:
    entry_id: str
    question: str
    answer_text: str
    score: RubricScore | None
    code_outcomes: list[CodeOutcome]
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "question": self.question,
            "answer_text": self.answer_text,
            "score": self.score.to_dict() if self.score else None,
            "code_outcomes": [o.to_dict() for o in self.code_outcomes],
            "error": self.error,
        }


@dataclass
class EvalReport:
    system: str
    items: list[EvalItemResult]
    mean_ac: float | None
    mean_ea: float | None
    mean_uf: float | None
    mean_overall: float | None
    n_snippets: int
    n_correct_snippets: int

    @property
    def code_accuracy_pct(self) -> float | None:
        if self.n_snippets == 0:
            return None
        return 100.0 * self.n_correct_snippets / self.n_snippets

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "n_items": len(self.items),
            "mean_ac": self.mean_ac,
            "mean_ea": self.mean_ea,
            "mean_uf": self.mean_uf,
            "mean_overall": self.mean_overall,
            "n_snippets": self.n_snippets,
            "n_correct_snippets": self.n_correct_snippets,
            "code_accuracy_pct": self.code_accuracy_pct,
            "items": [item.to_dict() for item in self.items],
        }


AnswerSource = Callable[[QAEntry], str]


def evaluate_dataset(
    items: Sequence[QAEntry],
    answer_source: AnswerSource,
    judge_backend,
    system_name: str = "system",
    code_mode: str = "execution",
    limits: CodeLimits | None = None,
    parallelism: int = 1,
    templates_dir: str | None = None,
) -> EvalReport:
    """Judge every item's generated answer, check code for flagged items,
    and aggregate the means. Per-item failures are recorded, not dropped.
    """
    if not items:
        raise ValueError("items must be non-empty")

    def _one(item: QAEntry) -> EvalItemResult:
        try:
            answer = answer_source(item)
        except Exception as exc:
            return EvalItemResult(item.id, item.question, "", None, [], error=str(exc))
        result = EvalItemResult(item.id, item.question, answer, None, [])
        try:
            result.score = judge(
                item.question, answer, item.answer, judge_backend, templates_dir
            )
        except Exception as exc:
            result.error = str(exc)
            return result
        if item.contains_code:
            try:
                snippets = extract_code_blocks(answer)
                result.code_outcomes = [
                    check_code(
                        snippet,
                        snippet_index=i,
                        mode=code_mode,
                        limits=limits,
                        backend=judge_backend,
                        question=item.question,
                        templates_dir=templates_dir,
                    )
                    for i, snippet in enumerate(snippets)
                ]
            except Exception as exc:
                result.error = str(exc)
        return result

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_one, items))
    else:
        results = [_one(item) for item in items]

    scored = [r.score for r in results if r.score is not None]
    n_snippets = sum(len(r.code_outcomes) for r in results)
    n_correct = sum(o.verdict for r in results for o in r.code_outcomes)

    def _mean(values: list[float]) -> float | None:
        return sum(values) / len(values) if values else None

    return EvalReport(
        system=system_name,
        items=results,
        mean_ac=_mean([s.ac for s in scored]),
        mean_ea=_mean([s.ea for s in scored]),
        mean_uf=_mean([s.uf for s in scored]),
        mean_overall=_mean([s.overall for s in scored]),
        n_snippets=n_snippets,
        n_correct_snippets=n_correct,
    )


_REPORT_COLUMNS = ("Method", "AC", "EA", "UF", "Overall Score", "Code Accuracy (%)")


def render_report(reports: Sequence[EvalReport]) -> str:
    """Text table with one row per evaluated system."""
    rows = []
    for report in reports:
        def fmt(value: float | None) -> str:
            return f"{round_half_up(value):.2f}" if value is not None else "-"

        code_pct = report.code_accuracy_pct
        rows.append(
            (
                report.system,
                fmt(report.mean_ac),
                fmt(report.mean_ea),
                fmt(report.mean_uf),
                fmt(report.mean_overall),
                f"{round_half_up(code_pct, 1):.1f}" if code_pct is not None else "-",
            )
        )
    widths = [
        max(len(_REPORT_COLUMNS[i]), *(len(row[i]) for row in rows)) if rows else len(_REPORT_COLUMNS[i])
        for i in range(len(_REPORT_COLUMNS))
    ]
    header = "  ".join(name.ljust(widths[i]) for i, name in enumerate(_REPORT_COLUMNS))
    divider = "-" * len(header)
    lines = [header, divider]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)
