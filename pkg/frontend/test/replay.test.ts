// Replay parity: every snapshot the CLI exported must render identically
// through the client-side replay implementation.

import { readdirSync, readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { applyEvent, replayTo, snapshots, ReplayCorruptionError } from "../src/replay.js";
import { loadReplayExport, type ReplayEvent } from "../src/types.js";

const REPLAY_DIR = join(__dirname, "..", "fixtures", "replay");

function fixtureNames(): string[] {
  return readdirSync(REPLAY_DIR).filter((name) => name.endsWith(".json"));
}

function loadFixture(name: string) {
  return loadReplayExport(JSON.parse(readFileSync(join(REPLAY_DIR, name), "utf-8")));
}

describe("replay parity with CLI exports", () => {
  const names = fixtureNames();

  it("has fixtures to check", () => {
    expect(names.length).toBeGreaterThan(0);
  });

  for (const name of names) {
    it(`renders every exported snapshot identically: ${name}`, () => {
      const replay = loadFixture(name);
      expect(replay.snapshots.length).toBe(replay.events.length);
      for (const snapshot of replay.snapshots) {
        expect(replayTo(replay.events, snapshot.seq)).toBe(snapshot.buffer);
      }
    });

    it(`walks the full timeline incrementally: ${name}`, () => {
      const replay = loadFixture(name);
      const walked = [...snapshots(replay.events)];
      expect(walked.map((s) => s.seq)).toEqual(replay.snapshots.map((s) => s.seq));
      expect(walked.map((s) => s.buffer)).toEqual(replay.snapshots.map((s) => s.buffer));
      expect(walked[walked.length - 1]?.buffer).toBe(replay.final_buffer);
    });
  }
});

describe("replay semantics", () => {
  const insert = (seq: number, offset: number, text: string): ReplayEvent => ({
    seq,
    timestamp: seq,
    kind: "insert",
    offset,
    text,
  });

  it("starts empty and cursor -1 yields the pre-open state", () => {
    expect(replayTo([], null)).toBe("");
    expect(replayTo([insert(0, 0, "hi")], -1)).toBe("");
  });

  it("open with content seeds the buffer; empty open is a reopen", () => {
    const events: ReplayEvent[] = [
      { seq: 0, timestamp: 0, kind: "open", offset: 0, text: "seed" },
      insert(1, 4, "!"),
    ];
    expect(replayTo(events, 1)).toBe("seed!");
    expect(applyEvent(Array.from("keep"), { seq: 2, timestamp: 0, kind: "open", offset: 0, text: "" })).toEqual(
      Array.from("keep"),
    );
  });

  it("counts offsets in code points, not UTF-16 units", () => {
    const events: ReplayEvent[] = [
      insert(0, 0, "a\u{1f600}b"), // astral char: 2 UTF-16 units, 1 code point
      insert(1, 2, "X"),
    ];
    expect(replayTo(events, 1)).toBe("a\u{1f600}Xb");
  });

  it("applies delete, cut and copy with content verification", () => {
    const events: ReplayEvent[] = [
      insert(0, 0, "abcdef"),
      { seq: 1, timestamp: 1, kind: "copy", offset: 1, text: "bcd" },
      { seq: 2, timestamp: 2, kind: "delete", offset: 0, text: "ab" },
      { seq: 3, timestamp: 3, kind: "cut", offset: 1, text: "de" },
    ];
    expect(replayTo(events, 3)).toBe("cf");
  });

  it("raises a corruption error naming the seq on bad offsets", () => {
    const events = [insert(0, 0, "ab"), insert(1, 99, "x")];
    try {
      replayTo(events, null);
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(ReplayCorruptionError);
      expect((err as ReplayCorruptionError).seq).toBe(1);
    }
  });

  it("raises on content mismatch and seq gaps", () => {
    expect(() =>
      replayTo(
        [insert(0, 0, "abc"), { seq: 1, timestamp: 1, kind: "delete", offset: 0, text: "zzz" }],
        null,
      ),
    ).toThrow(ReplayCorruptionError);
    expect(() => replayTo([insert(0, 0, "a"), insert(5, 0, "b")], null)).toThrow(/non-contiguous/);
  });
});
