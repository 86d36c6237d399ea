// Client-side re-implementation of event replay, verified against the
// CLI's exported snapshots. Offsets count Unicode code points, so the
// buffer is held as a code-point array rather than a UTF-16 string.

import type { ReplayEvent } from "./types.js";

export class ReplayCorruptionError extends Error {
  constructor(
    public readonly seq: number,
    message: string,
  ) {
    super(`event ${seq}: ${message}`);
  }
}

function toPoints(text: string): string[] {
  return Array.from(text);
}

export function applyEvent(buffer: string[], ev: ReplayEvent): string[] {
  switch (ev.kind) {
    case "open":
      // non-empty open seeds the buffer (external file); empty is a reopen
      return ev.text ? toPoints(ev.text) : buffer;
    case "insert":
    case "paste": {
      if (ev.offset < 0 || ev.offset > buffer.length) {
        throw new ReplayCorruptionError(ev.seq, `offset ${ev.offset} out of bounds (length ${buffer.length})`);
      }
      return [...buffer.slice(0, ev.offset), ...toPoints(ev.text), ...buffer.slice(ev.offset)];
    }
    case "delete":
    case "cut":
    case "copy": {
      const span = toPoints(ev.text);
      const end = ev.offset + span.length;
      if (ev.offset < 0 || end > buffer.length) {
        throw new ReplayCorruptionError(ev.seq, `range [${ev.offset}, ${end}) out of bounds (length ${buffer.length})`);
      }
      if (buffer.slice(ev.offset, end).join("") !== ev.text) {
        throw new ReplayCorruptionError(ev.seq, "recorded content does not match the reconstructed buffer");
      }
      return ev.kind === "copy" ? buffer : [...buffer.slice(0, ev.offset), ...buffer.slice(end)];
    }
    default:
      throw new ReplayCorruptionError(ev.seq, `unknown event kind '${ev.kind}'`);
  }
}

/** Buffer state after event `seq` (null = before anything happened). */
export function replayTo(events: ReplayEvent[], seq: number | null): string {
  let buffer: string[] = [];
  let prev: number | null = null;
  for (const ev of events) {
    if (prev !== null && ev.seq !== prev + 1) {
      throw new ReplayCorruptionError(ev.seq, `non-contiguous seq after ${prev}`);
    }
    prev = ev.seq;
    if (seq !== null && ev.seq > seq) {
      break;
    }
    buffer = applyEvent(buffer, ev);
  }
  return buffer.join("");
}

export function* snapshots(events: ReplayEvent[]): Generator<{ seq: number; buffer: string }> {
  let buffer: string[] = [];
  let prev: number | null = null;
  for (const ev of events) {
    if (prev !== null && ev.seq !== prev + 1) {
      throw new ReplayCorruptionError(ev.seq, `non-contiguous seq after ${prev}`);
    }
    prev = ev.seq;
    buffer = applyEvent(buffer, ev);
    yield { seq: ev.seq, buffer: buffer.join("") };
  }
}
