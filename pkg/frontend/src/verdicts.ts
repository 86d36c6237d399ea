// Instructor decisions. The only thing this dashboard ever writes: a
// versioned verdict file that re-loads into the same state.

import type { Report } from "./types.js";

export const VERDICTS_VERSION = 1;

export type Decision = "confirmed" | "dismissed" | "undecided";

export interface DecisionEntry {
  verdict: Decision;
  note: string;
}

export interface ReviewState {
  decisions: Map<string, DecisionEntry>;
}

const DECISIONS: readonly Decision[] = ["confirmed", "dismissed", "undecided"];

export function newReviewState(report: Report): ReviewState {
  const decisions = new Map<string, DecisionEntry>();
  for (const sub of report.submissions) {
    decisions.set(sub.label, { verdict: "undecided", note: "" });
  }
  return { decisions };
}

export function recordVerdict(state: ReviewState, label: string, verdict: Decision, note = ""): ReviewState {
  if (!DECISIONS.includes(verdict)) {
    throw new Error(`unknown verdict '${verdict}'`);
  }
  state.decisions.set(label, { verdict, note });
  return state;
}

export function summaryCounts(state: ReviewState): Record<Decision, number> {
  const counts: Record<Decision, number> = { confirmed: 0, dismissed: 0, undecided: 0 };
  for (const entry of state.decisions.values()) {
    counts[entry.verdict] += 1;
  }
  return counts;
}

export function exportVerdicts(state: ReviewState): string {
  const decisions: Record<string, DecisionEntry> = {};
  for (const label of [...state.decisions.keys()].sort()) {
    const entry = state.decisions.get(label);
    if (entry) {
      decisions[label] = { verdict: entry.verdict, note: entry.note };
    }
  }
  return JSON.stringify({ verdicts_version: VERDICTS_VERSION, decisions }, null, 2) + "\n";
}

export function loadVerdicts(state: ReviewState, text: string): ReviewState {
  const data: unknown = JSON.parse(text);
  if (typeof data !== "object" || data === null) {
    throw new Error("verdict file: not a JSON object");
  }
  const doc = data as { verdicts_version?: unknown; decisions?: unknown };
  if (doc.verdicts_version !== VERDICTS_VERSION) {
    throw new Error(
      `verdict file: unsupported version ${String(doc.verdicts_version)} (expected ${VERDICTS_VERSION})`,
    );
  }
  if (typeof doc.decisions !== "object" || doc.decisions === null) {
    throw new Error("verdict file: missing decisions");
  }
  for (const [label, entry] of Object.entries(doc.decisions)) {
    const cast = entry as Partial<DecisionEntry>;
    if (!cast.verdict || !DECISIONS.includes(cast.verdict)) {
      throw new Error(`verdict file: bad decision for '${label}'`);
    }
    state.decisions.set(label, { verdict: cast.verdict, note: cast.note ?? "" });
  }
  return state;
}
