// Shapes of the evidence files the dashboard consumes. The UI is strictly
// read-only over these; only the verdict file (see verdicts.ts) is written.

export const REPORT_VERSION = 1;
export const REPLAY_VERSION = 1;

export interface OriginInfo {
  kind: string;
  install_id?: string;
  project_id?: string;
}

export interface ReplayEvent {
  seq: number;
  timestamp: number;
  kind: string;
  offset: number;
  text: string;
  origin?: OriginInfo;
  line_count?: number;
}

export interface FileSummary {
  path: string;
  has_meta: boolean;
  event_count: number;
  diagnostics: string[];
}

export interface Flag {
  category: string;
  file: string;
  excerpt: string;
  line_count: number;
  char_count: number;
  event_seq: number | null;
  origin_install: string | null;
  origin_project: string | null;
  cross_refs: string[];
  note: string;
}

export interface Signal {
  kind: string;
  detail: string;
  file: string | null;
  event_seq: number | null;
}

export interface SubmissionReport {
  label: string;
  verdict: string;
  files: FileSummary[];
  flags: Flag[];
  signals: Signal[];
  edits_after_last_flag: number | null;
  typing_linearity: number | null;
}

export interface Report {
  report_version: number;
  shared_machines: string[];
  known_machines: string[];
  submissions: SubmissionReport[];
}

export interface SnapshotEntry {
  seq: number;
  buffer: string;
}

export interface ReplayExport {
  replay_version: number;
  file: string;
  install_id: string;
  project_id: string;
  diagnostics: string[];
  infection_stack: Record<string, unknown>[];
  events: ReplayEvent[];
  snapshots: SnapshotEntry[];
  final_buffer: string;
}

// lower = worse; drives row and flag ordering in the table
const CATEGORY_SEVERITY: Record<string, number> = {
  file_shared: 0,
  foreign_turned_in: 0,
  same_machine_other_project: 1,
  unassociated_machine: 2,
  external: 3,
};

const VERDICT_SEVERITY: Record<string, number> = {
  plagiarism_detected: 0,
  likely_plagiarized: 1,
  no_metacomment: 2,
  no_plagiarism_detected: 3,
};

export function categorySeverity(category: string): number {
  return CATEGORY_SEVERITY[category] ?? 4;
}

export function verdictSeverity(verdict: string): number {
  return VERDICT_SEVERITY[verdict] ?? 4;
}

export function sortFlagsBySeverity(flags: Flag[]): Flag[] {
  return [...flags].sort(
    (a, b) => categorySeverity(a.category) - categorySeverity(b.category) || b.line_count - a.line_count,
  );
}

function isObject(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

export function loadReport(data: unknown): Report {
  if (!isObject(data)) {
    throw new Error("report: not a JSON object");
  }
  if (data.report_version !== REPORT_VERSION) {
    throw new Error(
      `report: unsupported version ${String(data.report_version)} (this dashboard reads version ${REPORT_VERSION})`,
    );
  }
  if (!Array.isArray(data.submissions)) {
    throw new Error("report: missing submissions array");
  }
  const report = data as unknown as Report;
  for (const sub of report.submissions) {
    if (typeof sub.label !== "string" || typeof sub.verdict !== "string") {
      throw new Error("report: malformed submission entry");
    }
  }
  return {
    ...report,
    submissions: [...report.submissions]
      .map((sub) => ({ ...sub, flags: sortFlagsBySeverity(sub.flags ?? []) }))
      .sort(
        (a, b) =>
          verdictSeverity(a.verdict) - verdictSeverity(b.verdict) ||
          b.flags.length - a.flags.length ||
          a.label.localeCompare(b.label),
      ),
  };
}

export function loadReplayExport(data: unknown): ReplayExport {
  if (!isObject(data)) {
    throw new Error("replay export: not a JSON object");
  }
  if (data.replay_version !== REPLAY_VERSION) {
    throw new Error(
      `replay export: unsupported version ${String(data.replay_version)} (expected ${REPLAY_VERSION})`,
    );
  }
  if (!Array.isArray(data.events) || !Array.isArray(data.snapshots)) {
    throw new Error("replay export: missing events or snapshots");
  }
  return data as unknown as ReplayExport;
}
