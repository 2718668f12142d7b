import { t } from "./labels.js";
import type { Turn } from "./state.js";
import type { DimensionVerdict } from "./types.js";

// Pure HTML-string builders. No score math, no sorting: payloads are
// rendered exactly as the service delivered them.

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

// Split fenced code out of answer text so code renders monospaced with a
// copy affordance.
export function renderAnswerBody(text: string): string {
  const parts: string[] = [];
  const lines = text.split("\n");
  let code: string[] | null = null;
  for (const line of lines) {
    const stripped = line.trim();
    if (code === null) {
      if (stripped.startsWith("```")) {
        code = [];
      } else {
        parts.push(`<p>${escapeHtml(line)}</p>`);
      }
    } else if (stripped === "```") {
      const body = escapeHtml(code.join("\n"));
      parts.push(
        `<div class="codeblock"><button class="copy" data-copy aria-label="${t("copyCode")}">⧉ ${t(
          "copyCode",
        )}</button><pre><code>${body}</code></pre></div>`,
      );
      code = null;
    } else {
      code.push(line);
    }
  }
  if (code !== null) {
    parts.push(`<pre><code>${escapeHtml(code.join("\n"))}</code></pre>`);
  }
  return parts.join("\n");
}

function panel(kind: string, title: string, body: string): string {
  return (
    `<details class="panel panel-${kind}" open>` +
    `<summary tabindex="0">${escapeHtml(title)}</summary>` +
    `<div class="panel-body">${body}</div></details>`
  );
}

export function renderPerceptionPanel(turn: Turn): string {
  const note = turn.perception;
  if (!note) return "";
  const verdictLabel = note.student_verdict.addresses ? t("addressesYes") : t("addressesNo");
  const body =
    `<h4>${t("teacherAnalysis")}</h4><p>${escapeHtml(note.teacher_analysis)}</p>` +
    `<h4>${t("studentVerdict")}</h4><p>${escapeHtml(verdictLabel)}` +
    (note.student_verdict.critique
      ? ` — ${escapeHtml(note.student_verdict.critique)}`
      : "") +
    ` <span class="muted">(${t("rounds")}: ${note.rounds_used})</span></p>` +
    `<h4>${t("summary")}</h4><p>${escapeHtml(note.summary)}</p>`;
  return panel("perception", t("perceptionPanel"), body);
}

export function renderRetrievalPanel(turn: Turn): string {
  const retrieval = turn.retrieval;
  if (!retrieval) return "";
  const rows = retrieval.exemplars
    .map(
      (exemplar) =>
        `<li><span class="score">${t("similarity")} ${exemplar.score.toFixed(4)}</span> ` +
        `<span class="exemplar-q">${escapeHtml(exemplar.question)}</span>` +
        `<details><summary tabindex="0">${escapeHtml(exemplar.entry_id)}</summary>` +
        `<div class="exemplar-a">${renderAnswerBody(exemplar.answer)}</div></details></li>`,
    )
    .join("");
  return panel("retrieval", t("retrievalPanel"), `<ol class="exemplars">${rows}</ol>`);
}

export function renderDraftPanel(turn: Turn): string {
  if (turn.drafts.length === 0) return "";
  const body = turn.drafts
    .map(
      (draft) =>
        `<div class="draft"><h4>${t("draftIteration", { n: draft.iteration })}</h4>` +
        `${renderAnswerBody(draft.answer_text)}</div>`,
    )
    .join("");
  return panel("draft", t("draftPanel"), body);
}

function dimensionRow(label: string, verdict: DimensionVerdict): string {
  const mark = verdict.pass ? "✓" : "✗";
  const cls = verdict.pass ? "pass" : "fail";
  const text = verdict.pass ? t("passLabel") : t("failLabel");
  return (
    `<li class="${cls}"><span class="mark">${mark}</span> ${escapeHtml(label)}: ${text}` +
    (verdict.comment ? ` — ${escapeHtml(verdict.comment)}` : "") +
    `</li>`
  );
}

export function renderReflectionPanel(turn: Turn): string {
  if (turn.verdicts.length === 0) return "";
  const body = turn.verdicts
    .map((verdict, i) => {
      const allPass =
        verdict.rationality.pass && verdict.code_correctness.pass && verdict.usefulness.pass;
      return (
        `<div class="verdict"><h4>${t("draftIteration", { n: verdict.iteration ?? i })}</h4><ul>` +
        dimensionRow(t("rationality"), verdict.rationality) +
        dimensionRow(t("codeCorrectness"), verdict.code_correctness) +
        dimensionRow(t("usefulness"), verdict.usefulness) +
        `</ul>` +
        (!allPass && verdict.revision_instructions
          ? `<p class="instructions">${t("instructions")}: ${escapeHtml(
              verdict.revision_instructions,
            )}</p>`
          : "") +
        `</div>`
      );
    })
    .join("");
  return panel("reflection", t("reflectionPanel"), body);
}

export function renderFinalPanel(turn: Turn): string {
  if (turn.aborted) {
    return (
      `<div class="panel panel-final aborted"><span class="badge">${t("abortedBadge")}</span>` +
      `<p>${escapeHtml(turn.error ?? "")}</p></div>`
    );
  }
  if (turn.finalAnswer === null) return "";
  return panel("final", t("finalPanel"), renderAnswerBody(turn.finalAnswer));
}

export function renderTurn(turn: Turn): string {
  return (
    `<div class="turn">` +
    `<div class="bubble question">${escapeHtml(turn.question)}</div>` +
    renderPerceptionPanel(turn) +
    renderRetrievalPanel(turn) +
    renderDraftPanel(turn) +
    renderReflectionPanel(turn) +
    renderFinalPanel(turn) +
    `</div>`
  );
}
