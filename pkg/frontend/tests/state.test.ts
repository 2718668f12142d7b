import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import {
  applyEvent,
  beginTurn,
  failTurn,
  newSession,
  transcriptToEvents,
} from "../src/state.js";
import { createSseParser } from "../src/sse.js";
import type { StageEvent, Transcript } from "../src/types.js";

import transcriptFixture from "./fixtures/transcript.json";

const transcript = transcriptFixture as unknown as Transcript;

function event(seq: number, kind: StageEvent["kind"], payload: Record<string, unknown> = {}): StageEvent {
  return { session_id: "s", seq, kind, payload, timestamp: 0 };
}

describe("session state", () => {
  it("collects stage payloads in seq order", () => {
    const state = newSession("s");
    beginTurn(state, "什么是列表？");
    applyEvent(state, event(1, "perception_note", { summary: "要点" }));
    applyEvent(state, event(2, "retrieval_results", { query: "q", exemplars: [] }));
    applyEvent(state, event(3, "draft", { iteration: 0, answer_text: "D0" }));
    const turn = state.turns[0];
    expect(turn.perception).not.toBeNull();
    expect(turn.retrieval).not.toBeNull();
    expect(turn.drafts.length).toBe(1);
    expect(turn.lastSeq).toBe(3);
  });

  it("ignores stale or duplicate seq numbers", () => {
    const state = newSession("s");
    beginTurn(state, "q");
    applyEvent(state, event(1, "draft", { iteration: 0, answer_text: "D0" }));
    applyEvent(state, event(1, "draft", { iteration: 0, answer_text: "dup" }));
    expect(state.turns[0].drafts.length).toBe(1);
  });

  it("terminal final_answer closes the turn and re-enables input", () => {
    const state = newSession("s");
    beginTurn(state, "q");
    expect(state.inFlight).toBe(true);
    applyEvent(state, event(1, "final_answer", { final_answer: "A", resolved: true }));
    expect(state.inFlight).toBe(false);
    expect(state.turns[0].done).toBe(true);
    expect(state.turns[0].finalAnswer).toBe("A");
    expect(state.turns[0].resolved).toBe(true);
  });

  it("aborted closes the turn with the error retained", () => {
    const state = newSession("s");
    beginTurn(state, "q");
    applyEvent(state, event(1, "draft", { iteration: 0, answer_text: "D0" }));
    applyEvent(state, event(2, "aborted", { error: "boom" }));
    const turn = state.turns[0];
    expect(turn.aborted).toBe(true);
    expect(turn.error).toBe("boom");
    expect(turn.drafts.length).toBe(1); // partial progress kept
    expect(state.inFlight).toBe(false);
  });

  it("rejects a second in-flight turn", () => {
    const state = newSession("s");
    beginTurn(state, "q1");
    expect(() => beginTurn(state, "q2")).toThrow();
  });

  it("failTurn closes an interrupted stream and re-enables input", () => {
    const state = newSession("s");
    beginTurn(state, "q");
    applyEvent(state, event(1, "draft", { iteration: 0, answer_text: "D0" }));
    failTurn(state, "network dropped");
    expect(state.inFlight).toBe(false);
    expect(state.turns[0].error).toBe("network dropped");
    expect(state.turns[0].drafts.length).toBe(1);
  });
});

describe("transcript replay", () => {
  it("unfolds a stored transcript into the live event order", () => {
    const events = transcriptToEvents(transcript);
    const kinds = events.map((e) => e.kind);
    expect(kinds[0]).toBe("perception_note");
    expect(kinds[1]).toBe("retrieval_results");
    expect(kinds[kinds.length - 1]).toBe("final_answer");
    // drafts and verdicts interleave: d0 v0 d1 v1 d2 v2
    expect(kinds.filter((k) => k === "draft").length).toBe(3);
    expect(kinds.filter((k) => k === "reflection_verdict").length).toBe(3);
    expect(events.map((e) => e.seq)).toEqual(events.map((_, i) => i + 1));
  });

  it("replay populates every stage panel slot", () => {
    const state = newSession(transcript.session_id);
    beginTurn(state, transcript.question);
    for (const e of transcriptToEvents(transcript)) {
      applyEvent(state, e);
    }
    const turn = state.turns[0];
    expect(turn.perception).not.toBeNull();
    expect(turn.retrieval).not.toBeNull();
    expect(turn.drafts.length).toBeGreaterThan(0);
    expect(turn.verdicts.length).toBeGreaterThan(0);
    expect(turn.finalAnswer).toBe(transcript.final_answer);
    expect(turn.done).toBe(true);
  });

  it("fixture exemplar scores arrive in descending order", () => {
    const scores = transcript.exemplars.map((e) => e.score);
    const sorted = [...scores].sort((a, b) => b - a);
    expect(scores).toEqual(sorted);
  });
});

describe("event paint latency", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("each event is applied synchronously on receipt (well under 200 ms)", () => {
    const state = newSession("s");
    beginTurn(state, "q");
    const paintTimes: Array<{ seq: number; at: number }> = [];
    const parser = createSseParser((e) => {
      applyEvent(state, e); // the UI repaints in the same tick
      paintTimes.push({ seq: e.seq, at: Date.now() });
    });

    const frames = [
      event(1, "perception_note", { summary: "s" }),
      event(2, "retrieval_results", { query: "q", exemplars: [] }),
      event(3, "draft", { iteration: 0, answer_text: "D0" }),
      event(4, "reflection_verdict", {
        rationality: { pass: true, comment: "" },
        code_correctness: { pass: true, comment: "" },
        usefulness: { pass: true, comment: "" },
        revision_instructions: "",
      }),
      event(5, "final_answer", { final_answer: "A", resolved: true }),
    ];
    for (const [i, frame] of frames.entries()) {
      vi.setSystemTime(1000 * (i + 1)); // network delivery instant
      const receivedAt = Date.now();
      parser.push(`data: ${JSON.stringify(frame)}\n\n`);
      const paint = paintTimes[paintTimes.length - 1];
      expect(paint.seq).toBe(frame.seq);
      expect(paint.at - receivedAt).toBeLessThanOrEqual(200);
      expect(paint.at - receivedAt).toBe(0); // synchronous paint
    }
    expect(state.inFlight).toBe(false); // terminal event re-enabled input
  });
});
