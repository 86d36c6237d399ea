"""Batch forensics over a directory of submissions.

Builds the ownership/infection graph from the turned-in metaComments,
classifies every paste event against it, applies the line thresholds, and
assembles the verdict report. Pure function of the directory contents.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

from . import metacomment
from .model import EditEvent, InstallId, MetaComment, ProjectId
from .report import FileSummary, Flag, Report, Signal, SubmissionReport
from .session import effective_install, typing_linearity
from .stego import MIN_EMBED_CHARS

EXTERNAL_LINE_THRESHOLD = 3
UNASSOCIATED_LINE_THRESHOLD = 20
SAME_MACHINE_LINE_THRESHOLD = 50

LINEARITY_SIGNAL_MIN = 0.95
LINEARITY_SIGNAL_MIN_INSERTS = 100


@dataclass(slots=True)
class SubmissionFile:
    path: str
    body: str
    meta: MetaComment | None
    diagnostics: list[str] = field(default_factory=list)


@dataclass(slots=True)
class Submission:
    label: str
    files: list[SubmissionFile] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


@dataclass(frozen=True, slots=True)
class FileShare:
    """Two submissions turned in files carrying the same ProjectId."""

    project_id: ProjectId
    label_a: str
    path_a: str
    events_a: int
    label_b: str
    path_b: str
    events_b: int
    common_prefix: int


@dataclass(frozen=True, slots=True)
class InfectionEdge:
    """project -> foreign identifier, via one InfectionStack entry."""

    label: str
    path: str
    project_id: ProjectId
    kind: str
    install_id: InstallId | None
    other_project_id: ProjectId | None
    event_seq: int


@dataclass(frozen=True, slots=True)
class PasteEdge:
    """paste event -> the origin node its watermark named."""

    label: str
    path: str
    event_seq: int
    origin_kind: str
    install_id: InstallId | None
    project_id: ProjectId | None


@dataclass(slots=True)
class SubmissionGraph:
    project_owners: dict[ProjectId, tuple[str, ...]] = field(default_factory=dict)
    install_carriers: dict[InstallId, tuple[str, ...]] = field(default_factory=dict)
    shared_installs: frozenset[InstallId] = frozenset()
    file_shares: list[FileShare] = field(default_factory=list)
    infected_by: list[InfectionEdge] = field(default_factory=list)
    pasted_from: list[PasteEdge] = field(default_factory=list)

    def owners_of(self, project: ProjectId | None) -> tuple[str, ...]:
        if project is None:
            return ()
        return self.project_owners.get(project, ())

    def carriers_of(self, install: InstallId | None) -> tuple[str, ...]:
        if install is None:
            return ()
        return self.install_carriers.get(install, ())


@dataclass(frozen=True, slots=True)
class PasteClassification:
    category: str | None  # None when ignored
    ignored_reason: str | None  # "internal" or "too_short"
    flagged: bool
    cross_refs: tuple[str, ...] = ()
    note: str = ""


def ingest(directory: str | Path) -> list[Submission]:
    """Parse every file of every student subdirectory; damage is recorded
    per file, never fatal. Subdirectory name = student label."""
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"submission directory does not exist: {root}")
    cohort: list[Submission] = []
    for sub_dir in sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith(".")):
        submission = Submission(label=sub_dir.name)
        for path in sorted(sub_dir.rglob("*")):
            rel = path.relative_to(sub_dir)
            if not path.is_file() or any(part.startswith(".") for part in rel.parts):
                continue
            try:
                text = path.read_text(encoding="utf-8")
                extra: list[str] = []
            except UnicodeDecodeError:
                text = path.read_text(encoding="utf-8", errors="replace")
                extra = ["file is not valid UTF-8; undecodable bytes replaced"]
            except OSError as exc:
                submission.files.append(
                    SubmissionFile(str(rel), "", None, [f"unreadable file: {exc}"])
                )
                continue
            body, meta, diagnostics = metacomment.parse(text)
            submission.files.append(SubmissionFile(str(rel), body, meta, extra + diagnostics))
        if not submission.files:
            submission.diagnostics.append("blank submission: no files")
        cohort.append(submission)
    return cohort


def _carried_installs(meta: MetaComment) -> list[InstallId]:
    installs = [meta.install_id]
    for entry in meta.infection_stack:
        if entry.kind == "machine_change" and entry.install_id is not None:
            if entry.install_id not in installs:
                installs.append(entry.install_id)
    return installs


def _common_prefix(a: list[EditEvent], b: list[EditEvent]) -> int:
    n = 0
    for ev_a, ev_b in zip(a, b):
        if ev_a != ev_b:
            break
        n += 1
    return n


def build_graph(cohort: list[Submission]) -> SubmissionGraph:
    project_owners: dict[ProjectId, list[str]] = {}
    project_files: dict[ProjectId, list[tuple[str, SubmissionFile]]] = {}
    install_carriers: dict[InstallId, list[str]] = {}
    infected_by: list[InfectionEdge] = []
    pasted_from: list[PasteEdge] = []
    for submission in cohort:
        for file in submission.files:
            if file.meta is None:
                continue
            owners = project_owners.setdefault(file.meta.project_id, [])
            if submission.label not in owners:
                owners.append(submission.label)
            project_files.setdefault(file.meta.project_id, []).append((submission.label, file))
            for install in _carried_installs(file.meta):
                carriers = install_carriers.setdefault(install, [])
                if submission.label not in carriers:
                    carriers.append(submission.label)
            for entry in file.meta.infection_stack:
                infected_by.append(
                    InfectionEdge(
                        label=submission.label,
                        path=file.path,
                        project_id=file.meta.project_id,
                        kind=entry.kind,
                        install_id=entry.install_id,
                        other_project_id=entry.project_id,
                        event_seq=entry.event_seq,
                    )
                )
            for ev in file.meta.events:
                if ev.kind == "paste" and ev.origin is not None and ev.origin.kind != "internal":
                    pasted_from.append(
                        PasteEdge(
                            label=submission.label,
                            path=file.path,
                            event_seq=ev.seq,
                            origin_kind=ev.origin.kind,
                            install_id=ev.origin.install_id,
                            project_id=ev.origin.project_id,
                        )
                    )

    shares: list[FileShare] = []
    for project, owner_files in sorted(project_files.items(), key=lambda kv: str(kv[0])):
        if len({label for label, _ in owner_files}) < 2:
            continue
        for (la, fa), (lb, fb) in itertools.combinations(owner_files, 2):
            if la == lb:
                continue
            ea = fa.meta.events if fa.meta else []
            eb = fb.meta.events if fb.meta else []
            shares.append(
                FileShare(
                    project_id=project,
                    label_a=la,
                    path_a=fa.path,
                    events_a=len(ea),
                    label_b=lb,
                    path_b=fb.path,
                    events_b=len(eb),
                    common_prefix=_common_prefix(ea, eb),
                )
            )

    return SubmissionGraph(
        project_owners={p: tuple(sorted(ls)) for p, ls in project_owners.items()},
        install_carriers={i: tuple(sorted(ls)) for i, ls in install_carriers.items()},
        shared_installs=frozenset(i for i, ls in install_carriers.items() if len(ls) >= 2),
        file_shares=shares,
        infected_by=infected_by,
        pasted_from=pasted_from,
    )


def classify_paste(
    event: EditEvent,
    label: str,
    meta: MetaComment,
    graph: SubmissionGraph,
    known_machines: frozenset[InstallId] = frozenset(),
) -> PasteClassification:
    """The ordered decision procedure for one paste event.

    All line thresholds are strict-greater. Flag rules, in order:
    internal pastes and untrackably short pastes are ignored; pastes
    traced to another submission are flagged at any size; same-machine
    pastes flag when the machine is shared/known or above 50 lines;
    unassociated machines above 20 lines; external above 3 lines.
    """
    if event.kind != "paste":
        raise ValueError("classify_paste requires a paste event")
    origin = event.origin
    if origin is None or origin.kind == "internal":
        return PasteClassification(None, "internal", False)
    lines = event.line_count if event.line_count is not None else event.text.count("\n") + 1

    if origin.kind == "external":
        if len(event.text) < MIN_EMBED_CHARS:
            return PasteClassification(None, "too_short", False)
        return PasteClassification("external", None, lines > EXTERNAL_LINE_THRESHOLD)

    if origin.kind == "foreign":
        refs = sorted(
            {l for l in graph.owners_of(origin.project_id) if l != label}
            | {l for l in graph.carriers_of(origin.install_id) if l != label}
        )
        if refs:
            return PasteClassification("foreign_turned_in", None, True, tuple(refs))
        own_ids = label in graph.carriers_of(origin.install_id) or label in graph.owners_of(origin.project_id)
        if own_ids:
            # The student's own ids on another machine: same-machine semantics.
            flagged = origin.install_id in known_machines or lines > SAME_MACHINE_LINE_THRESHOLD
            return PasteClassification(
                "same_machine_other_project", None, flagged, note="own identifiers via another machine"
            )
        if origin.install_id in known_machines:
            return PasteClassification(
                "same_machine_other_project", None, True, note="origin machine in known-machines list"
            )
        return PasteClassification("unassociated_machine", None, lines > UNASSOCIATED_LINE_THRESHOLD)

    # same_machine: which machine depends on where the file was at that seq.
    machine = effective_install(meta, event.seq)
    shared = machine in graph.shared_installs or machine in known_machines
    refs = tuple(l for l in graph.owners_of(origin.project_id) if l != label)
    note = "shared machine" if shared else ""
    return PasteClassification(
        "same_machine_other_project",
        None,
        shared or lines > SAME_MACHINE_LINE_THRESHOLD,
        refs,
        note,
    )


def _all_events(submission: Submission) -> list[tuple[int, str, EditEvent]]:
    """Every event of the submission in (timestamp, path, seq) order."""
    out = []
    for file in submission.files:
        if file.meta is None:
            continue
        for ev in file.meta.events:
            out.append((ev.timestamp, file.path, ev))
    out.sort(key=lambda t: (t[0], t[1], t[2].seq))
    return out


def _events_after(submission: Submission, path: str, event: EditEvent) -> int:
    anchor = (event.timestamp, path, event.seq)
    count = 0
    for ts, p, ev in _all_events(submission):
        if (ts, p, ev.seq) > anchor:
            count += 1
    return count


def _ids_of(submission: Submission) -> set:
    ids = set()
    for file in submission.files:
        if file.meta is None:
            continue
        ids.add(file.meta.project_id)
        ids.update(_carried_installs(file.meta))
    return ids


def _referenced_ids(submission: Submission) -> set:
    refs = set()
    for file in submission.files:
        if file.meta is None:
            continue
        for entry in file.meta.infection_stack:
            if entry.install_id is not None:
                refs.add(entry.install_id)
            if entry.project_id is not None:
                refs.add(entry.project_id)
    return refs


def _time_range(submission: Submission) -> tuple[int, int] | None:
    stamps = [ev.timestamp for _, _, ev in _all_events(submission)]
    if not stamps:
        return None
    return min(stamps), max(stamps)


def _collaboration_pairs(cohort: list[Submission]) -> list[tuple[str, str]]:
    pairs = []
    for a, b in itertools.combinations(cohort, 2):
        ids_a, ids_b = _ids_of(a), _ids_of(b)
        if not (_referenced_ids(a) & ids_b and _referenced_ids(b) & ids_a):
            continue
        ra, rb = _time_range(a), _time_range(b)
        if ra is None or rb is None:
            continue
        if ra[0] <= rb[1] and rb[0] <= ra[1]:
            pairs.append((a.label, b.label))
    return pairs


def analyze(
    cohort: list[Submission],
    known_machines: tuple[InstallId, ...] = (),
) -> Report:
    """Classify every paste in the cohort and emit the verdict report."""
    graph = build_graph(cohort)
    known = frozenset(known_machines)
    report = Report(
        shared_machines=sorted(str(i) for i in graph.shared_installs),
        known_machines=sorted(str(i) for i in known),
    )

    origin_refs: dict[str, list[str]] = {}
    subreports: dict[str, SubmissionReport] = {}

    for submission in sorted(cohort, key=lambda s: s.label):
        flags: list[Flag] = []
        signals: list[Signal] = []
        edits_after: list[int] = []
        likely_edits_after: list[int] = []

        for diag in submission.diagnostics:
            signals.append(Signal(kind="blank_submission" if "blank" in diag else "ingest", detail=diag))

        for file in submission.files:
            if file.meta is None:
                signals.append(
                    Signal(
                        kind="no_metacomment",
                        detail="file has no metaComment; never opened in the tracking IDE",
                        file=file.path,
                    )
                )
                continue
            if file.diagnostics:
                signals.append(
                    Signal(kind="parse_diagnostics", detail="; ".join(file.diagnostics), file=file.path)
                )
            first = file.meta.events[0] if file.meta.events else None
            if first is not None and first.kind == "open" and first.text:
                signals.append(
                    Signal(
                        kind="external_file_open",
                        detail=f"file arrived from outside the IDE with {first.text.count(chr(10)) + 1} lines",
                        file=file.path,
                        event_seq=first.seq,
                    )
                )
            for ev in file.meta.events:
                if ev.kind != "paste":
                    continue
                cls = classify_paste(ev, submission.label, file.meta, graph, known)
                if cls.ignored_reason == "internal" and (ev.line_count or 0) > SAME_MACHINE_LINE_THRESHOLD:
                    signals.append(
                        Signal(
                            kind="history_destroying_internal_paste",
                            detail=f"internal paste of {ev.line_count} lines",
                            file=file.path,
                            event_seq=ev.seq,
                        )
                    )
                    likely_edits_after.append(_events_after(submission, file.path, ev))
                if not cls.flagged:
                    continue
                flags.append(
                    Flag(
                        category=cls.category or "external",
                        file=file.path,
                        excerpt=ev.text,
                        line_count=ev.line_count or 0,
                        char_count=len(ev.text),
                        event_seq=ev.seq,
                        origin_install=str(ev.origin.install_id) if ev.origin and ev.origin.install_id else None,
                        origin_project=str(ev.origin.project_id) if ev.origin and ev.origin.project_id else None,
                        cross_refs=cls.cross_refs,
                        note=cls.note,
                    )
                )
                edits_after.append(_events_after(submission, file.path, ev))
                for ref in cls.cross_refs:
                    origin_refs.setdefault(ref, []).append(submission.label)

        # Duplicate-project evidence: flag whoever extended the shared log,
        # or both parties when the logs are indistinguishable.
        for share in graph.file_shares:
            if submission.label == share.label_a:
                mine, theirs = (share.events_a, share.path_a), (share.events_b, share.label_b)
            elif submission.label == share.label_b:
                mine, theirs = (share.events_b, share.path_b), (share.events_a, share.label_a)
            else:
                continue
            my_events, my_path = mine
            other_events, other_label = theirs
            extended = my_events > share.common_prefix
            identical = my_events == share.common_prefix and other_events == share.common_prefix
            if not (extended or identical):
                origin_refs.setdefault(submission.label, []).append(other_label)
                continue
            file = next(f for f in submission.files if f.path == my_path)
            flags.append(
                Flag(
                    category="file_shared",
                    file=my_path,
                    excerpt=file.body,
                    line_count=file.body.count("\n") + 1 if file.body else 0,
                    char_count=len(file.body),
                    origin_project=str(share.project_id),
                    cross_refs=(other_label,),
                    note="identical event logs" if identical else "extends the other submission's event log",
                )
            )
            edits_after.append(my_events - share.common_prefix)
            origin_refs.setdefault(other_label, []).append(submission.label)

        # per-file scores weighted by insert count: insertion points are
        # only meaningful within one file's log
        scored = [
            (typing_linearity(f.meta.events), sum(1 for ev in f.meta.events if ev.kind == "insert"))
            for f in submission.files
            if f.meta is not None
        ]
        scored = [(s, n) for s, n in scored if s is not None and n]
        inserts = sum(n for _, n in scored)
        linearity = sum(s * n for s, n in scored) / inserts if inserts else None
        if linearity is not None and linearity >= LINEARITY_SIGNAL_MIN and inserts >= LINEARITY_SIGNAL_MIN_INSERTS:
            signals.append(
                Signal(
                    kind="linear_typing",
                    detail=f"{linearity:.2f} of {inserts} inserts extend the previous insertion point",
                )
            )

        if flags:
            verdict = "plagiarism_detected"
            total_after = min(edits_after)
        elif likely_edits_after:
            verdict = "likely_plagiarized"
            total_after = min(likely_edits_after)
        elif not submission.files or all(f.meta is None for f in submission.files):
            verdict = "no_metacomment"
            total_after = None
        elif any(f.meta is None for f in submission.files):
            verdict = "no_metacomment"
            total_after = None
        else:
            verdict = "no_plagiarism_detected"
            total_after = None

        flags.sort(key=lambda f: (f.file, f.event_seq if f.event_seq is not None else -1, f.category))
        subreports[submission.label] = SubmissionReport(
            label=submission.label,
            verdict=verdict,
            files=[
                FileSummary(
                    path=f.path,
                    has_meta=f.meta is not None,
                    event_count=len(f.meta.events) if f.meta else 0,
                    diagnostics=tuple(f.diagnostics),
                )
                for f in submission.files
            ],
            flags=flags,
            signals=signals,
            edits_after_last_flag=total_after,
            typing_linearity=linearity,
        )

    for a, b in _collaboration_pairs(cohort):
        for label, other in ((a, b), (b, a)):
            subreports[label].signals.append(
                Signal(
                    kind="collaboration_signal",
                    detail=f"mutual infection entries with {other} and overlapping edit timestamps",
                )
            )

    for ref, sources in sorted(origin_refs.items()):
        if ref not in subreports:
            continue
        for source in sorted(set(sources)):
            if source == ref:
                continue
            subreports[ref].signals.append(
                Signal(kind="appears_as_origin", detail=f"origin of flagged evidence in {source}")
            )

    report.submissions = [subreports[label] for label in sorted(subreports)]
    return report


def load_known_machines(path: str | Path) -> tuple[InstallId, ...]:
    """Instructor-supplied machine list: one install id per line, # comments."""
    import uuid

    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        out.append(uuid.UUID(line))
    return tuple(out)
