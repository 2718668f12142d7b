from __future__ import annotations

import random
import sys

import pytest

from molly.errors import (
    DegenerateMarginals,
    InterpreterMissing,
    LengthMismatch,
    MalformedJudgeOutput,
    OutOfRange,
    UnterminatedFence,
)
from molly.eval import (
    CodeLimits,
    RubricScore,
    band,
    check_code,
    cohen_kappa,
    evaluate_dataset,
    extract_code_blocks,
    judge,
    render_report,
    round_half_up,
    score_overall,
    weighted_overall,
)
from molly.kb import parse_entry
from molly.llm import MockBackend, Playbook


def mock(records):
    return MockBackend(Playbook(records))


# --- score_overall -------------------------------------------------------------

def test_score_overall_reference_vectors():
    assert score_overall(78.46, 75.82, 67.95) == 76.09
    assert score_overall(83.63, 85.50, 79.41) == 82.97


def test_score_overall_degenerate_bounds():
    assert score_overall(100, 100, 100) == 100.00
    assert score_overall(0, 0, 0) == 0.00


def test_score_overall_rejects_out_of_range():
    with pytest.raises(OutOfRange):
        score_overall(101, 50, 50)
    with pytest.raises(OutOfRange):
        score_overall(50, -0.1, 50)


def test_score_overall_monotonic_and_bounded():
    rng = random.Random(4)
    for _ in range(200):
        ac, ea, uf = (rng.uniform(0, 100) for _ in range(3))
        base = weighted_overall(ac, ea, uf)
        assert 0 <= base <= 100
        bump = min(100, ac + 1)
        assert weighted_overall(bump, ea, uf) >= base


def test_round_half_up_behavior():
    assert round_half_up(76.094) == 76.09
    assert round_half_up(76.095) == 76.10
    assert round_half_up(80.125) == 80.13  # not banker's rounding


# --- band --------------------------------------------------------------------------

def test_band_reference_points():
    assert band(95) == "Excellent"
    assert band(90) == "Excellent"
    assert band(85) == "Good"
    assert band(80) == "Good"
    assert band(75) == "Average"  # gap range assigned to Average
    assert band(60) == "Average"
    assert band(59.99) == "Poor"
    assert band(0) == "Poor"


def test_band_rejects_out_of_range():
    with pytest.raises(OutOfRange):
        band(100.01)


def test_band_consistent_with_overall_on_random_scores():
    rng = random.Random(9)
    for _ in range(300):
        overall = rng.uniform(0, 100)
        grade = band(overall)
        if overall >= 90:
            assert grade == "Excellent"
        elif overall >= 80:
            assert grade == "Good"
        elif overall >= 60:
            assert grade == "Average"
        else:
            assert grade == "Poor"


def test_rubric_score_recomputes_overall():
    score = RubricScore.from_components(80, 90, 70)
    assert score.overall == pytest.approx(0.7 * 80 + 0.1 * 90 + 0.2 * 70, abs=1e-9)
    assert score.band == "Average"


# --- judge -------------------------------------------------------------------------

def test_judge_parses_block_and_computes_locally():
    score = judge("q", "cand", "ref", mock([("judge", "AC: 80 / EA: 90 / UF: 70")]))
    assert (score.ac, score.ea, score.uf) == (80.0, 90.0, 70.0)
    assert round_half_up(score.overall) == 79.00
    assert score.band == "Average"


def test_judge_out_of_range_rejected():
    with pytest.raises(OutOfRange):
        judge("q", "cand", "ref", mock([("judge", "AC: 101 / EA: 90 / UF: 70")]))


def test_judge_retries_once_then_fails():
    backend = mock([("judge", "no scores here"), ("judge", "still prose")])
    with pytest.raises(MalformedJudgeOutput):
        judge("q", "cand", "ref", backend)
    assert len(backend.call_log) == 2


def test_judge_recovers_on_retry():
    backend = mock([("judge", "hmm"), ("judge", "AC: 50\nEA: 60\nUF: 70")])
    score = judge("q", "cand", "ref", backend)
    assert score.ac == 50.0


# --- extract_code_blocks ------------------------------------------------------------

def test_extract_no_fences():
    assert extract_code_blocks("plain text, no code") == []


def test_extract_exception_handling_example():
    answer = (
        "Here is an example:\n\n"
        "```python\n"
        "try:\n"
        "    # Code that may raise an exception\n"
        "    pass\n"
        "except ValueError:\n"
        "    pass\n"
        "```\n"
    )
    snippets = extract_code_blocks(answer)
    assert len(snippets) == 1
    assert snippets[0].startswith("try:")


def test_extract_two_fences_in_order():
    text = "```python\nfirst\n```\nmiddle\n```\nsecond\n```"
    assert extract_code_blocks(text) == ["first", "second"]


def test_extract_strips_language_tag():
    assert extract_code_blocks("```python\nx = 1\n```") == ["x = 1"]


def test_extract_unterminated_fence():
    with pytest.raises(UnterminatedFence) as excinfo:
        extract_code_blocks("before\n```python\nx = 1\n")
    assert excinfo.value.line == 2


def test_extract_rewrap_idempotent():
    text = "```python\na = 1\nb = 2\n```\n\n```\nc = 3\n```"
    snippets = extract_code_blocks(text)
    rewrapped = "\n".join(f"```\n{s}\n```" for s in snippets)
    assert extract_code_blocks(rewrapped) == snippets


# --- check_code -------------------------------------------------------------------

def test_check_code_success():
    outcome = check_code("print(1)")
    assert outcome.verdict == 1
    assert outcome.mode == "execution"


def test_check_code_runtime_error():
    outcome = check_code("1/0")
    assert outcome.verdict == 0
    assert "ZeroDivisionError" in outcome.detail


def test_check_code_timeout_short_limit():
    outcome = check_code("while True:\n    pass", limits=CodeLimits(timeout_secs=0.5))
    assert outcome.verdict == 0
    assert "timeout" in outcome.detail


def test_check_code_interpreter_missing():
    with pytest.raises(InterpreterMissing):
        check_code("print(1)", limits=CodeLimits(interpreter_path="/no/such/python"))


def test_check_code_judge_mode():
    outcome = check_code(
        "print(1)", mode="judge", backend=mock([("judge", "CORRECT: YES")]), question="q"
    )
    assert outcome.verdict == 1
    outcome = check_code(
        "1/0", mode="judge", backend=mock([("judge", "CORRECT: NO")]), question="q"
    )
    assert outcome.verdict == 0


# --- cohen_kappa --------------------------------------------------------------------

def _ratings_from_confusion(matrix):
    a, b = [], []
    labels = list(range(len(matrix)))
    for i, row in enumerate(matrix):
        for j, count in enumerate(row):
            a.extend([labels[i]] * count)
            b.extend([labels[j]] * count)
    return a, b


def test_kappa_perfect_agreement():
    assert cohen_kappa([1, 2, 3, 1], [1, 2, 3, 1]).kappa == 1.0


def test_kappa_derived_confusion_matrix():
    # [[20, 5], [10, 15]]: p_o = 0.7, p_e = 0.5 -> kappa = 0.4
    a, b = _ratings_from_confusion([[20, 5], [10, 15]])
    result = cohen_kappa(a, b)
    assert result.p_o == pytest.approx(0.7, abs=1e-12)
    assert result.p_e == pytest.approx(0.5, abs=1e-12)
    assert result.kappa == pytest.approx(0.4, abs=1e-9)
    assert result.n == 50


def test_kappa_formula_invariant():
    rng = random.Random(17)
    for _ in range(100):
        n = rng.randint(2, 40)
        a = [rng.randint(0, 2) for _ in range(n)]
        b = [rng.randint(0, 2) for _ in range(n)]
        try:
            result = cohen_kappa(a, b)
        except DegenerateMarginals:
            continue
        assert result.kappa == pytest.approx(
            (result.p_o - result.p_e) / (1 - result.p_e), abs=1e-12
        )
        assert -1 - 1e-9 <= result.kappa <= 1 + 1e-9


def test_kappa_label_permutation_invariance():
    rng = random.Random(23)
    for _ in range(100):
        n = rng.randint(2, 30)
        a = [rng.randint(0, 2) for _ in range(n)]
        b = [rng.randint(0, 2) for _ in range(n)]
        permutation = {0: "x", 1: "y", 2: "z"}
        try:
            baseline = cohen_kappa(a, b).kappa
        except DegenerateMarginals:
            continue
        relabeled = cohen_kappa([permutation[v] for v in a], [permutation[v] for v in b]).kappa
        assert relabeled == pytest.approx(baseline, abs=1e-12)


def test_kappa_length_mismatch():
    with pytest.raises(LengthMismatch):
        cohen_kappa([1, 2], [1])


def test_kappa_constant_identical_vectors():
    # p_e = 1 and p_o = 1: defined as perfect agreement, not an error
    result = cohen_kappa([1, 1, 1], [1, 1, 1])
    assert result.kappa == 1.0
    assert result.p_e == 1.0


# --- evaluate_dataset ---------------------------------------------------------------

def _items(n, with_code_flags):
    items = []
    for i in range(n):
        answer = "参考答案"
        if with_code_flags[i]:
            answer += "\n```python\nprint(0)\n```"
        items.append(
            parse_entry(
                {
                    "id": f"e{i}",
                    "question": f"问题{i}",
                    "knowledge_point": "kp",
                    "answer": answer,
                }
            )
        )
    return items


def test_evaluate_dataset_means():
    items = _items(3, [False, False, False])
    judge_responses = [
        ("judge", "AC: 80\nEA: 80\nUF: 80"),
        ("judge", "AC: 90\nEA: 90\nUF: 90"),
        ("judge", "AC: 70\nEA: 70\nUF: 70"),
    ]
    report = evaluate_dataset(
        items, lambda item: f"answer to {item.question}", mock(judge_responses)
    )
    assert report.mean_overall == pytest.approx(80.0)
    assert report.mean_ac == pytest.approx(80.0)
    assert report.code_accuracy_pct is None


def test_evaluate_dataset_code_accuracy():
    items = _items(2, [True, True])
    judge_responses = [("judge", "AC: 80\nEA: 80\nUF: 80")] * 2
    answers = {
        "e0": "ok\n```python\nprint(1)\n```",
        "e1": "bad\n```python\n1/0\n```",
    }
    report = evaluate_dataset(items, lambda item: answers[item.id], mock(judge_responses))
    assert report.n_snippets == 2
    assert report.n_correct_snippets == 1
    assert report.code_accuracy_pct == pytest.approx(50.0)


def test_evaluate_dataset_rejects_empty():
    with pytest.raises(ValueError):
        evaluate_dataset([], lambda item: "", mock([]))


def test_evaluate_dataset_records_failures():
    items = _items(2, [False, False])

    def flaky(item):
        if item.id == "e1":
            raise RuntimeError("backend blew up")
        return "answer"

    report = evaluate_dataset(items, flaky, mock([("judge", "AC: 80\nEA: 80\nUF: 80")]))
    assert report.items[1].error == "backend blew up"
    assert report.items[1].score is None
    assert report.mean_ac == pytest.approx(80.0)  # over scored items only


def test_evaluate_dataset_means_match_item_records():
    items = _items(3, [False, True, False])
    judge_responses = [
        ("judge", "AC: 82\nEA: 88\nUF: 78"),
        ("judge", "AC: 75\nEA: 80\nUF: 70"),
        ("judge", "AC: 90\nEA: 92\nUF: 85"),
    ]
    answers = {
        "e0": "plain",
        "e1": "```python\nprint(1)\n```",
        "e2": "plain too",
    }
    report = evaluate_dataset(items, lambda item: answers[item.id], mock(judge_responses))
    scores = [item.score for item in report.items]
    assert report.mean_ac == pytest.approx(sum(s.ac for s in scores) / 3)
    assert report.mean_overall == pytest.approx(sum(s.overall for s in scores) / 3)
    assert report.n_snippets == sum(len(item.code_outcomes) for item in report.items)


def test_render_report_shape():
    items = _items(1, [False])
    report = evaluate_dataset(
        items, lambda item: "a", mock([("judge", "AC: 80\nEA: 90\nUF: 70")]), system_name="agent"
    )
    table = render_report([report])
    assert "Method" in table and "Overall Score" in table and "Code Accuracy (%)" in table
    assert "agent" in table
    assert "79.00" in table
