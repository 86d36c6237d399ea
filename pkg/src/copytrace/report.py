"""Verdict report: structured (machine-readable, versioned) and human table."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

REPORT_VERSION = 1

VERDICTS = ("plagiarism_detected", "likely_plagiarized", "no_plagiarism_detected", "no_metacomment")

# Paste categories plus the graph-derived finding for duplicated projects.
FLAG_CATEGORIES = (
    "foreign_turned_in",
    "same_machine_other_project",
    "unassociated_machine",
    "external",
    "file_shared",
)

HUMAN_EXCERPT_LINE_LIMIT = 200


@dataclass(frozen=True, slots=True)
class FileSummary:
    path: str
    has_meta: bool
    event_count: int
    diagnostics: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "has_meta": self.has_meta,
            "event_count": self.event_count,
            "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FileSummary":
        return cls(d["path"], d["has_meta"], d["event_count"], tuple(d["diagnostics"]))


@dataclass(frozen=True, slots=True)
class Flag:
    """One piece of flagged evidence; always carries the code in question."""

    category: str
    file: str
    excerpt: str
    line_count: int
    char_count: int
    event_seq: int | None = None
    origin_install: str | None = None
    origin_project: str | None = None
    cross_refs: tuple[str, ...] = ()
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "file": self.file,
            "excerpt": self.excerpt,
            "line_count": self.line_count,
            "char_count": self.char_count,
            "event_seq": self.event_seq,
            "origin_install": self.origin_install,
            "origin_project": self.origin_project,
            "cross_refs": list(self.cross_refs),
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Flag":
        return cls(
            category=d["category"],
            file=d["file"],
            excerpt=d["excerpt"],
            line_count=d["line_count"],
            char_count=d["char_count"],
            event_seq=d["event_seq"],
            origin_install=d["origin_install"],
            origin_project=d["origin_project"],
            cross_refs=tuple(d["cross_refs"]),
            note=d["note"],
        )


@dataclass(frozen=True, slots=True)
class Signal:
    """Advisory evidence for human review; never drives a flag by itself."""

    kind: str
    detail: str
    file: str | None = None
    event_seq: int | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail, "file": self.file, "event_seq": self.event_seq}

    @classmethod
    def from_dict(cls, d: dict) -> "Signal":
        return cls(d["kind"], d["detail"], d["file"], d["event_seq"])


@dataclass(slots=True)
class SubmissionReport:
    label: str
    verdict: str
    files: list[FileSummary] = field(default_factory=list)
    flags: list[Flag] = field(default_factory=list)
    signals: list[Signal] = field(default_factory=list)
    edits_after_last_flag: int | None = None
    typing_linearity: float | None = None

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "verdict": self.verdict,
            "files": [f.to_dict() for f in self.files],
            "flags": [f.to_dict() for f in self.flags],
            "signals": [s.to_dict() for s in self.signals],
            "edits_after_last_flag": self.edits_after_last_flag,
            "typing_linearity": self.typing_linearity,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SubmissionReport":
        return cls(
            label=d["label"],
            verdict=d["verdict"],
            files=[FileSummary.from_dict(x) for x in d["files"]],
            flags=[Flag.from_dict(x) for x in d["flags"]],
            signals=[Signal.from_dict(x) for x in d["signals"]],
            edits_after_last_flag=d["edits_after_last_flag"],
            typing_linearity=d["typing_linearity"],
        )


@dataclass(slots=True)
class Report:
    submissions: list[SubmissionReport] = field(default_factory=list)
    shared_machines: list[str] = field(default_factory=list)
    known_machines: list[str] = field(default_factory=list)
    report_version: int = REPORT_VERSION

    def submission(self, label: str) -> SubmissionReport:
        for sub in self.submissions:
            if sub.label == label:
                return sub
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "report_version": self.report_version,
            "shared_machines": self.shared_machines,
            "known_machines": self.known_machines,
            "submissions": [s.to_dict() for s in self.submissions],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        version = d.get("report_version")
        if version != REPORT_VERSION:
            raise ValueError(f"unsupported report version {version!r} (expected {REPORT_VERSION})")
        return cls(
            submissions=[SubmissionReport.from_dict(x) for x in d["submissions"]],
            shared_machines=list(d["shared_machines"]),
            known_machines=list(d["known_machines"]),
            report_version=version,
        )


def render_structured(report: Report) -> str:
    return json.dumps(report.to_dict(), ensure_ascii=False, indent=2) + "\n"


def parse_structured(text: str) -> Report:
    return Report.from_dict(json.loads(text))


def _check_output(sub: SubmissionReport) -> str:
    paste_flags = [f for f in sub.flags if f.category != "file_shared"]
    shares = [f for f in sub.flags if f.category == "file_shared"]
    edits = sub.edits_after_last_flag
    if shares and not paste_flags:
        origins = sorted({ref for f in shares for ref in f.cross_refs})
        return f"Copied Directly from {', '.join(origins)}" if origins else "Copied File Detected"
    if sub.verdict == "plagiarism_detected":
        return f"Plagiarism Detected, {edits} Edits"
    if sub.verdict == "likely_plagiarized":
        return f"Likely Plagiarized, {edits} Edits"
    if sub.verdict == "no_metacomment":
        if not sub.files:
            return ""
        return "No metaComment"
    return "No Plagiarism Detected"


def _visible_summary(sub: SubmissionReport) -> str:
    if not sub.files:
        return "Blank Submission"
    if all(not f.has_meta for f in sub.files):
        return "No metaComment"
    infected_from = sorted(
        {ref for f in sub.flags if f.category in ("file_shared", "foreign_turned_in") for ref in f.cross_refs}
    )
    large = [f for f in sub.flags if f.category != "file_shared" and f.line_count > 50]
    if sub.flags and infected_from and any(f.category == "file_shared" for f in sub.flags):
        return f"Infected by {', '.join(infected_from)} InstallID"
    if len(large) > 1:
        return "Records multiple large pastes"
    if large:
        return "Records large paste"
    if sub.flags:
        return "Records flagged paste"
    if any(s.kind == "history_destroying_internal_paste" for s in sub.signals):
        return "Large internal paste"
    if any(s.kind == "linear_typing" for s in sub.signals):
        return "Visible Linear Coding"
    if any(s.kind == "collaboration_signal" for s in sub.signals):
        return "Mutual infection entries"
    return "No Warning Signs"


def _truncate_excerpt(excerpt: str) -> str:
    lines = excerpt.split("\n")
    if len(lines) <= HUMAN_EXCERPT_LINE_LIMIT:
        return excerpt
    kept = lines[:HUMAN_EXCERPT_LINE_LIMIT]
    omitted = len(lines) - HUMAN_EXCERPT_LINE_LIMIT
    return "\n".join(kept) + f"\n… [{omitted} more lines in structured report]"


def render_human(report: Report) -> str:
    """Instructor-facing table plus, per flag, the pasted code for review."""
    headers = ("Student", "Visible in metaComment", "Automated Check output")
    rows = [(sub.label, _visible_summary(sub), _check_output(sub)) for sub in report.submissions]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    sep = "-+-".join("-" * w for w in widths)
    out = [
        " | ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        sep,
    ]
    for r in rows:
        out.append(" | ".join(r[i].ljust(widths[i]) for i in range(3)))
    if report.shared_machines:
        out.append("")
        out.append("Shared machines: " + ", ".join(report.shared_machines))
    for sub in report.submissions:
        if not sub.flags:
            continue
        out.append("")
        out.append(f"== {sub.label} ==")
        for flag in sub.flags:
            where = f" at event {flag.event_seq}" if flag.event_seq is not None else ""
            refs = f" (origin: {', '.join(flag.cross_refs)})" if flag.cross_refs else ""
            note = f" [{flag.note}]" if flag.note else ""
            out.append(f"-- {flag.category}, {flag.line_count} lines, {flag.file}{where}{refs}{note}")
            out.append(_truncate_excerpt(flag.excerpt))
    return "\n".join(out) + "\n"
