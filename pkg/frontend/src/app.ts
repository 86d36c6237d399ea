// Dashboard wiring. Evidence files come in through file pickers and stay
// local; nothing leaves the page. Only the verdict file is ever produced.

import { replayTo, ReplayCorruptionError } from "./replay.js";
import {
  categorySeverity,
  loadReplayExport,
  loadReport,
  type Flag,
  type Report,
  type ReplayExport,
  type SubmissionReport,
} from "./types.js";
import {
  exportVerdicts,
  loadVerdicts,
  newReviewState,
  recordVerdict,
  summaryCounts,
  type Decision,
  type ReviewState,
} from "./verdicts.js";

interface AppState {
  report: Report | null;
  review: ReviewState | null;
  replays: Map<string, ReplayExport>;
  selected: string | null;
  activeReplay: string | null;
  cursor: number;
  playing: number | null; // interval handle
  speed: number;
}

const state: AppState = {
  report: null,
  review: null,
  replays: new Map(),
  selected: null,
  activeReplay: null,
  cursor: -1,
  playing: null,
  speed: 1,
};

const CATEGORY_COLORS: Record<string, string> = {
  file_shared: "#ff5c77",
  foreign_turned_in: "#ff5c77",
  same_machine_other_project: "#ffd166",
  unassociated_machine: "#e1a84a",
  external: "#59a6ff",
};

const VERDICT_LABELS: Record<string, string> = {
  plagiarism_detected: "Plagiarism Detected",
  likely_plagiarized: "Likely Plagiarized",
  no_metacomment: "No metaComment",
  no_plagiarism_detected: "No Plagiarism Detected",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function setStatus(message: string, isError = false): void {
  const status = el<HTMLElement>("status");
  status.textContent = message;
  status.classList.toggle("error", isError);
}

async function readFileText(file: File): Promise<string> {
  return await file.text();
}

// ---------------------------------------------------------------- report

function onReportLoaded(text: string): void {
  const parsed = loadReport(JSON.parse(text));
  state.report = parsed;
  state.review = newReviewState(parsed);
  state.selected = parsed.submissions[0]?.label ?? null;
  renderAll();
  setStatus(`report loaded: ${parsed.submissions.length} submissions`);
}

function flaggedSummary(sub: SubmissionReport): string {
  if (!sub.flags.length) {
    return "—";
  }
  const categories = [...new Set(sub.flags.map((f) => f.category))];
  categories.sort((a, b) => categorySeverity(a) - categorySeverity(b));
  return categories.join(", ");
}

function renderTable(): void {
  const report = state.report;
  const tbody = el<HTMLTableSectionElement>("submission-rows");
  tbody.textContent = "";
  if (!report || !state.review) {
    return;
  }
  for (const sub of report.submissions) {
    const row = document.createElement("tr");
    row.classList.toggle("selected", sub.label === state.selected);
    const decision = state.review.decisions.get(sub.label)?.verdict ?? "undecided";
    row.innerHTML = `
      <td>${sub.label}</td>
      <td class="verdict-${sub.verdict}">${VERDICT_LABELS[sub.verdict] ?? sub.verdict}</td>
      <td>${flaggedSummary(sub)}</td>
      <td>${sub.edits_after_last_flag ?? "—"}</td>
      <td>${sub.typing_linearity === null ? "n/a" : sub.typing_linearity.toFixed(2)}</td>
      <td class="decision-${decision}">${decision}</td>`;
    row.addEventListener("click", () => {
      state.selected = sub.label;
      stopPlayback();
      state.activeReplay = null;
      state.cursor = -1;
      renderAll();
    });
    tbody.appendChild(row);
  }
  const counts = summaryCounts(state.review);
  el<HTMLElement>("counts").textContent =
    `${counts.confirmed} confirmed · ${counts.dismissed} dismissed · ${counts.undecided} undecided`;
}

// ---------------------------------------------------------------- detail

function currentSubmission(): SubmissionReport | null {
  if (!state.report || !state.selected) {
    return null;
  }
  return state.report.submissions.find((s) => s.label === state.selected) ?? null;
}

function flagBlock(flag: Flag): HTMLElement {
  const div = document.createElement("div");
  div.className = "flag";
  div.style.borderLeftColor = CATEGORY_COLORS[flag.category] ?? "#888";
  const refs = flag.cross_refs.length ? ` · origin: ${flag.cross_refs.join(", ")}` : "";
  const where = flag.event_seq !== null ? ` · event ${flag.event_seq}` : "";
  const note = flag.note ? ` · ${flag.note}` : "";
  const header = document.createElement("div");
  header.className = "flag-head";
  header.textContent = `${flag.category} · ${flag.line_count} lines · ${flag.file}${where}${refs}${note}`;
  const code = document.createElement("pre");
  code.className = "excerpt";
  code.textContent = flag.excerpt;
  div.append(header, code);
  return div;
}

function renderDetail(): void {
  const panel = el<HTMLElement>("detail");
  const sub = currentSubmission();
  if (!sub) {
    panel.hidden = true;
    return;
  }
  panel.hidden = false;
  el<HTMLElement>("detail-title").textContent = sub.label;
  el<HTMLElement>("detail-verdict").textContent = VERDICT_LABELS[sub.verdict] ?? sub.verdict;

  const flags = el<HTMLElement>("detail-flags");
  flags.textContent = "";
  for (const flag of sub.flags) {
    flags.appendChild(flagBlock(flag));
  }
  if (!sub.flags.length) {
    flags.textContent = "No flagged evidence.";
  }

  const signals = el<HTMLElement>("detail-signals");
  signals.textContent = sub.signals.length
    ? sub.signals.map((s) => `${s.kind}${s.file ? ` (${s.file})` : ""}: ${s.detail}`).join("\n")
    : "No advisory signals.";

  const note = state.review?.decisions.get(sub.label)?.note ?? "";
  el<HTMLTextAreaElement>("note").value = note;

  renderReplayControls();
  renderReplayView();
}

// ---------------------------------------------------------------- replay

function replayChoices(): string[] {
  return [...state.replays.keys()].sort();
}

function activeEvents(): ReplayExport | null {
  if (!state.activeReplay) {
    return null;
  }
  return state.replays.get(state.activeReplay) ?? null;
}

function renderReplayControls(): void {
  const select = el<HTMLSelectElement>("replay-select");
  select.textContent = "";
  const names = replayChoices();
  for (const name of names) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    select.appendChild(option);
  }
  if (!names.length) {
    el<HTMLElement>("replay-panel").classList.add("empty");
    return;
  }
  el<HTMLElement>("replay-panel").classList.remove("empty");
  if (!state.activeReplay || !state.replays.has(state.activeReplay)) {
    state.activeReplay = names[0] ?? null;
    state.cursor = -1;
  }
  if (state.activeReplay) {
    select.value = state.activeReplay;
  }
  const replay = activeEvents();
  const slider = el<HTMLInputElement>("cursor");
  const maxSeq = replay && replay.events.length ? replay.events.length - 1 : 0;
  slider.min = "-1";
  slider.max = String(maxSeq);
  slider.value = String(state.cursor);
}

function pasteCategoryFor(file: string, seq: number): string | null {
  const sub = currentSubmission();
  if (!sub) {
    return null;
  }
  for (const flag of sub.flags) {
    if (flag.event_seq === seq && file.endsWith(flag.file)) {
      return flag.category;
    }
  }
  return null;
}

function renderReplayView(): void {
  const replay = activeEvents();
  const buffer = el<HTMLElement>("buffer");
  const timeline = el<HTMLElement>("timeline");
  timeline.textContent = "";
  if (!replay) {
    buffer.textContent = "Load replay exports to animate the coding process.";
    return;
  }
  let text: string;
  try {
    text = state.cursor < 0 ? "" : replayTo(replay.events, state.cursor);
  } catch (err) {
    if (err instanceof ReplayCorruptionError) {
      buffer.textContent = `log corrupt at event ${err.seq}: ${err.message}`;
      return;
    }
    throw err;
  }

  buffer.textContent = "";
  const current = replay.events.find((ev) => ev.seq === state.cursor);
  if (current && (current.kind === "insert" || current.kind === "paste") && current.text) {
    const points = Array.from(text);
    const before = points.slice(0, current.offset).join("");
    const inserted = points.slice(current.offset, current.offset + Array.from(current.text).length).join("");
    const after = points.slice(current.offset + Array.from(current.text).length).join("");
    const span = document.createElement("span");
    span.className = "inserted";
    if (current.kind === "paste") {
      const category = pasteCategoryFor(replay.file, current.seq);
      span.style.background = category ? (CATEGORY_COLORS[category] ?? "#2dd4bf") : "#2dd4bf33";
    }
    span.textContent = inserted;
    buffer.append(document.createTextNode(before), span, document.createTextNode(after));
  } else {
    buffer.textContent = text;
  }
  el<HTMLElement>("cursor-label").textContent =
    state.cursor < 0 ? "before first event" : `event ${state.cursor} of ${replay.events.length - 1}`;

  for (const ev of replay.events) {
    const row = document.createElement("div");
    row.className = "event";
    row.classList.toggle("current", ev.seq === state.cursor);
    if (ev.kind === "paste") {
      const category = pasteCategoryFor(replay.file, ev.seq);
      row.style.color = category ? (CATEGORY_COLORS[category] ?? "") : "#59a6ff";
    }
    const preview = ev.text.length > 36 ? `${ev.text.slice(0, 36)}…` : ev.text;
    row.textContent = `#${ev.seq} ${ev.kind} @${ev.offset} ${JSON.stringify(preview)}`;
    row.addEventListener("click", () => {
      stopPlayback();
      state.cursor = ev.seq;
      renderReplayControls();
      renderReplayView();
    });
    timeline.appendChild(row);
  }
  const currentRow = timeline.querySelector(".current");
  currentRow?.scrollIntoView({ block: "nearest" });
}

function stopPlayback(): void {
  if (state.playing !== null) {
    clearInterval(state.playing);
    state.playing = null;
    el<HTMLButtonElement>("play").textContent = "Play";
  }
}

function togglePlayback(): void {
  if (state.playing !== null) {
    stopPlayback();
    return;
  }
  const replay = activeEvents();
  if (!replay || !replay.events.length) {
    return;
  }
  el<HTMLButtonElement>("play").textContent = "Pause";
  state.playing = window.setInterval(() => {
    const maxSeq = replay.events.length - 1;
    if (state.cursor >= maxSeq) {
      stopPlayback();
      return;
    }
    state.cursor += 1;
    renderReplayControls();
    renderReplayView();
  }, 250 / state.speed);
}

// ---------------------------------------------------------------- wiring

function renderAll(): void {
  renderTable();
  renderDetail();
}

function download(filename: string, text: string): void {
  const blob = new Blob([text], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const link = document.createElement("a");
  link.href = url;
  link.download = filename;
  link.click();
  URL.revokeObjectURL(url);
}

function wire(): void {
  el<HTMLInputElement>("report-input").addEventListener("change", async (event) => {
    const file = (event.target as HTMLInputElement).files?.[0];
    if (!file) {
      return;
    }
    try {
      onReportLoaded(await readFileText(file));
    } catch (err) {
      setStatus(String(err), true);
    }
  });

  el<HTMLInputElement>("replay-input").addEventListener("change", async (event) => {
    const files = (event.target as HTMLInputElement).files;
    if (!files) {
      return;
    }
    let loaded = 0;
    for (const file of Array.from(files)) {
      try {
        const parsed = loadReplayExport(JSON.parse(await readFileText(file)));
        state.replays.set(file.name, parsed);
        loaded += 1;
      } catch (err) {
        setStatus(`${file.name}: ${String(err)}`, true);
      }
    }
    if (loaded) {
      setStatus(`${loaded} replay export(s) loaded`);
    }
    renderDetail();
  });

  el<HTMLInputElement>("verdict-input").addEventListener("change", async (event) => {
    const file = (event.target as HTMLInputElement).files?.[0];
    if (!file || !state.review) {
      return;
    }
    try {
      loadVerdicts(state.review, await readFileText(file));
      setStatus("verdicts loaded");
      renderAll();
    } catch (err) {
      setStatus(String(err), true);
    }
  });

  el<HTMLButtonElement>("export-verdicts").addEventListener("click", () => {
    if (state.review) {
      download("verdicts.json", exportVerdicts(state.review));
    }
  });

  for (const decision of ["confirmed", "dismissed", "undecided"] as Decision[]) {
    el<HTMLButtonElement>(`mark-${decision}`).addEventListener("click", () => {
      if (state.review && state.selected) {
        recordVerdict(state.review, state.selected, decision, el<HTMLTextAreaElement>("note").value);
        renderAll();
      }
    });
  }

  el<HTMLSelectElement>("replay-select").addEventListener("change", (event) => {
    stopPlayback();
    state.activeReplay = (event.target as HTMLSelectElement).value;
    state.cursor = -1;
    renderReplayControls();
    renderReplayView();
  });

  el<HTMLInputElement>("cursor").addEventListener("input", (event) => {
    stopPlayback();
    state.cursor = Number((event.target as HTMLInputElement).value);
    renderReplayView();
  });

  el<HTMLButtonElement>("play").addEventListener("click", togglePlayback);

  el<HTMLSelectElement>("speed").addEventListener("change", (event) => {
    state.speed = Number((event.target as HTMLSelectElement).value);
    if (state.playing !== null) {
      stopPlayback();
      togglePlayback();
    }
  });
}

wire();
setStatus("load a structured report to begin");
