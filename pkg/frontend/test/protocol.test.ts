import { describe, expect, it } from "vitest";

import { MessageDecoder, encodeMessage, PoseMessage } from "../src/protocol.js";

describe("message framing", () => {
  it("round-trips a message", () => {
    const msg: PoseMessage = { type: "pose", t: 1.25, position: [0.01, 0, 0] };
    const decoder = new MessageDecoder();
    const out = decoder.push(encodeMessage(msg));
    expect(out).toEqual([msg]);
    expect(decoder.pending).toBe(0);
  });

  it("handles split frames across arbitrary chunk boundaries", () => {
    const msgs: PoseMessage[] = [
      { type: "pose", t: 0.1, position: [1, 2, 3] },
      { type: "pose", t: 0.2, position: [4, 5, 6] },
      { type: "pose", t: 0.3, position: [7, 8, 9] },
    ];
    const wire = Buffer.concat(msgs.map(encodeMessage));
    for (const chunkSize of [1, 2, 3, 5, 7, wire.length]) {
      const decoder = new MessageDecoder();
      const got: unknown[] = [];
      for (let off = 0; off < wire.length; off += chunkSize) {
        got.push(...decoder.push(wire.subarray(off, off + chunkSize)));
      }
      expect(got).toEqual(msgs);
      expect(decoder.pending).toBe(0);
    }
  });

  it("keeps incomplete frames pending", () => {
    const wire = encodeMessage({ type: "pose", t: 0, position: [0, 0, 0] });
    const decoder = new MessageDecoder();
    expect(decoder.push(wire.subarray(0, 6))).toEqual([]);
    expect(decoder.pending).toBe(6);
    expect(decoder.push(wire.subarray(6))).toHaveLength(1);
  });

  it("preserves float timestamps exactly", () => {
    const t = 2.3444444444444446;
    const decoder = new MessageDecoder();
    const [msg] = decoder.push(
      encodeMessage({ type: "pose", t, position: [0, 0, 0] })
    );
    expect((msg as PoseMessage).t).toBe(t);
  });
});
