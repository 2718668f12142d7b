import type { StageEvent } from "./types.js";

// Incremental parser for the service's event stream: one `data: {json}`
// record per event, records separated by a blank line. Chunk boundaries
// can fall anywhere, so input is buffered until a full record arrives.

export type EventHandler = (event: StageEvent) => void;

export interface SseParser {
  push(chunk: string): void;
  flush(): void;
}

export function createSseParser(onEvent: EventHandler): SseParser {
  let buffer = "";

  function emitFrom(block: string): void {
    for (const line of block.split("\n")) {
      if (!line.startsWith("data: ")) continue; // keepalives, comments
      const body = line.slice("data: ".length).trim();
      if (!body) continue;
      let parsed: StageEvent;
      try {
        parsed = JSON.parse(body) as StageEvent;
      } catch {
        continue; // tolerate malformed keepalive frames
      }
      onEvent(parsed);
    }
  }

  return {
    push(chunk: string): void {
      buffer += chunk;
      let cut = buffer.indexOf("\n\n");
      while (cut !== -1) {
        const block = buffer.slice(0, cut);
        buffer = buffer.slice(cut + 2);
        emitFrom(block);
        cut = buffer.indexOf("\n\n");
      }
    },
    flush(): void {
      if (buffer.trim()) emitFrom(buffer);
      buffer = "";
    },
  };
}
