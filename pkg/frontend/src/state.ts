import type {
  DraftPayload,
  Exemplar,
  PerceptionPayload,
  RetrievalPayload,
  StageEvent,
  Transcript,
  VerdictPayload,
} from "./types.js";

// One turn = one question and the staged events answering it. The UI does
// no computation on payloads; it stores them exactly as received.

export interface Turn {
  question: string;
  perception: PerceptionPayload | null;
  retrieval: RetrievalPayload | null;
  drafts: DraftPayload[];
  verdicts: VerdictPayload[];
  finalAnswer: string | null;
  resolved: boolean | null;
  aborted: boolean;
  error: string | null;
  lastSeq: number;
  done: boolean;
}

export interface SessionState {
  sessionId: string;
  turns: Turn[];
  inFlight: boolean;
}

export function newSession(sessionId: string): SessionState {
  return { sessionId, turns: [], inFlight: false };
}

export function beginTurn(state: SessionState, question: string): Turn {
  if (state.inFlight) {
    throw new Error("a turn is already in flight");
  }
  const turn: Turn = {
    question,
    perception: null,
    retrieval: null,
    drafts: [],
    verdicts: [],
    finalAnswer: null,
    resolved: null,
    aborted: false,
    error: null,
    lastSeq: 0,
    done: false,
  };
  state.turns.push(turn);
  state.inFlight = true;
  return turn;
}

export function applyEvent(state: SessionState, event: StageEvent): Turn {
  const turn = state.turns[state.turns.length - 1];
  if (!turn || turn.done) {
    throw new Error("no turn in flight");
  }
  if (event.seq <= turn.lastSeq) {
    return turn; // duplicate or stale event: render order is seq order
  }
  turn.lastSeq = event.seq;
  switch (event.kind) {
    case "perception_note":
      turn.perception = event.payload as unknown as PerceptionPayload;
      break;
    case "retrieval_results":
      turn.retrieval = event.payload as unknown as RetrievalPayload;
      break;
    case "draft":
      turn.drafts.push(event.payload as unknown as DraftPayload);
      break;
    case "reflection_verdict":
      turn.verdicts.push(event.payload as unknown as VerdictPayload);
      break;
    case "final_answer": {
      const payload = event.payload as { final_answer?: string; resolved?: boolean | null };
      turn.finalAnswer = payload.final_answer ?? "";
      turn.resolved = payload.resolved ?? null;
      turn.done = true;
      state.inFlight = false;
      break;
    }
    case "aborted": {
      const payload = event.payload as { error?: string };
      turn.aborted = true;
      turn.error = payload.error ?? "aborted";
      turn.done = true;
      state.inFlight = false;
      break;
    }
  }
  return turn;
}

export function failTurn(state: SessionState, message: string): Turn | null {
  const turn = state.turns[state.turns.length - 1];
  if (!turn || turn.done) {
    state.inFlight = false;
    return turn ?? null;
  }
  turn.error = message;
  turn.done = true;
  state.inFlight = false;
  return turn;
}

// Replay: a stored transcript unfolds into the same event sequence the
// live stream would have produced, so both paths share the render code.
export function transcriptToEvents(transcript: Transcript): StageEvent[] {
  const events: StageEvent[] = [];
  let seq = 0;
  const push = (kind: StageEvent["kind"], payload: Record<string, unknown>) => {
    seq += 1;
    events.push({ session_id: transcript.session_id, seq, kind, payload, timestamp: 0 });
  };
  if (transcript.perception) {
    push("perception_note", transcript.perception as unknown as Record<string, unknown>);
  }
  push("retrieval_results", {
    query: transcript.query,
    exemplars: transcript.exemplars as unknown as Exemplar[],
  });
  const drafts = transcript.drafts;
  const verdicts = transcript.verdicts;
  for (let i = 0; i < drafts.length; i += 1) {
    push("draft", drafts[i] as unknown as Record<string, unknown>);
    if (i < verdicts.length) {
      push("reflection_verdict", {
        iteration: drafts[i].iteration,
        ...(verdicts[i] as unknown as Record<string, unknown>),
      });
    }
  }
  if (transcript.aborted) {
    push("aborted", { error: transcript.error ?? "aborted" });
  } else {
    push("final_answer", {
      final_answer: transcript.final_answer,
      resolved: transcript.resolved,
    });
  }
  return events;
}
