import { describe, expect, it } from "vitest";

import { createSseParser } from "../src/sse.js";
import type { StageEvent } from "../src/types.js";

function frame(event: Partial<StageEvent>): string {
  return `data: ${JSON.stringify(event)}\n\n`;
}

describe("createSseParser", () => {
  it("parses one event per data frame", () => {
    const seen: StageEvent[] = [];
    const parser = createSseParser((e) => seen.push(e));
    parser.push(frame({ seq: 1, kind: "draft" }));
    parser.push(frame({ seq: 2, kind: "final_answer" }));
    expect(seen.map((e) => e.seq)).toEqual([1, 2]);
  });

  it("handles events split across arbitrary chunk boundaries", () => {
    const seen: StageEvent[] = [];
    const parser = createSseParser((e) => seen.push(e));
    const whole = frame({ seq: 1, kind: "perception_note" }) + frame({ seq: 2, kind: "draft" });
    for (const ch of whole) {
      parser.push(ch); // worst case: one character at a time
    }
    expect(seen.map((e) => e.seq)).toEqual([1, 2]);
  });

  it("handles several events arriving in a single chunk", () => {
    const seen: StageEvent[] = [];
    const parser = createSseParser((e) => seen.push(e));
    parser.push(
      frame({ seq: 1, kind: "draft" }) +
        frame({ seq: 2, kind: "reflection_verdict" }) +
        frame({ seq: 3, kind: "final_answer" }),
    );
    expect(seen.length).toBe(3);
  });

  it("ignores keepalive comments and malformed frames", () => {
    const seen: StageEvent[] = [];
    const parser = createSseParser((e) => seen.push(e));
    parser.push(": keepalive\n\n");
    parser.push("data: {broken json\n\n");
    parser.push(frame({ seq: 1, kind: "draft" }));
    expect(seen.length).toBe(1);
  });

  it("flush drains a trailing record without a blank line", () => {
    const seen: StageEvent[] = [];
    const parser = createSseParser((e) => seen.push(e));
    parser.push(`data: ${JSON.stringify({ seq: 9, kind: "aborted" })}`);
    expect(seen.length).toBe(0);
    parser.flush();
    expect(seen.map((e) => e.seq)).toEqual([9]);
  });

  it("preserves non-ascii payload content", () => {
    const seen: StageEvent[] = [];
    const parser = createSseParser((e) => seen.push(e));
    parser.push(frame({ seq: 1, kind: "draft", payload: { answer_text: "列表是有序容器" } }));
    expect((seen[0].payload as { answer_text: string }).answer_text).toBe("列表是有序容器");
  });
});
