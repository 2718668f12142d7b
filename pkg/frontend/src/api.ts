import { createSseParser, type EventHandler } from "./sse.js";
import type { Transcript } from "./types.js";

export interface StreamHandlers {
  onEvent: EventHandler;
  onError: (message: string) => void;
  onClose: () => void;
}

// POST the question and feed the chunked response through the SSE parser.
// Each event is handed to onEvent synchronously as soon as its bytes arrive.
export async function askStream(
  baseUrl: string,
  sessionId: string,
  question: string,
  handlers: StreamHandlers,
): Promise<void> {
  let response: Response;
  try {
    response = await fetch(`${baseUrl}/v1/ask`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ session_id: sessionId, question }),
    });
  } catch (error) {
    handlers.onError(String(error));
    return;
  }
  if (!response.ok || !response.body) {
    handlers.onError(`HTTP ${response.status}`);
    return;
  }
  const parser = createSseParser(handlers.onEvent);
  const reader = response.body.getReader();
  const decoder = new TextDecoder();
  try {
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      parser.push(decoder.decode(value, { stream: true }));
    }
    parser.flush();
    handlers.onClose();
  } catch (error) {
    handlers.onError(String(error));
  }
}

export async function fetchTranscript(baseUrl: string, sessionId: string): Promise<Transcript> {
  const response = await fetch(`${baseUrl}/v1/transcripts/${encodeURIComponent(sessionId)}`);
  if (!response.ok) {
    throw new Error(`HTTP ${response.status}`);
  }
  return (await response.json()) as Transcript;
}
