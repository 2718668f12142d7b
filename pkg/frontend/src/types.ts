export type EventKind =
  | "perception_note"
  | "retrieval_results"
  | "draft"
  | "reflection_verdict"
  | "final_answer"
  | "aborted";

export interface StageEvent {
  session_id: string;
  seq: number;
  kind: EventKind;
  payload: Record<string, unknown>;
  timestamp: number;
}

export interface PerceptionPayload {
  teacher_analysis: string;
  student_verdict: { addresses: boolean; critique: string };
  rounds_used: number;
  summary: string;
}

export interface Exemplar {
  entry_id: string;
  question: string;
  answer: string;
  score: number;
}

export interface RetrievalPayload {
  query: string;
  exemplars: Exemplar[];
}

export interface DraftPayload {
  iteration: number;
  answer_text: string;
}

export interface DimensionVerdict {
  pass: boolean;
  comment: string;
}

export interface VerdictPayload {
  iteration?: number;
  rationality: DimensionVerdict;
  code_correctness: DimensionVerdict;
  usefulness: DimensionVerdict;
  revision_instructions: string;
}

export interface Transcript {
  session_id: string;
  question: string;
  perception: PerceptionPayload | null;
  query: string;
  exemplars: Exemplar[];
  drafts: DraftPayload[];
  verdicts: VerdictPayload[];
  final_answer: string;
  resolved: boolean | null;
  aborted: boolean;
  error: string | null;
}
