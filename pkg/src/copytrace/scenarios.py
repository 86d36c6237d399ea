"""Scenario cohort generators with ground-truth manifests.

Each generator scripts a small class through the session engine and writes
a submissions directory plus a manifest naming who should be flagged and
why. Same (kind, seed, params) always produces byte-identical output:
identifiers, timestamps, and code text all come from the seeded state.

Paste sizes deliberately straddle the decision thresholds (3/4 external
lines, 20/21 unassociated, 50/51 same-machine) across the kinds.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .report import Report
from .session import ClipboardPayload, ManualClock, Session
from .stego import strip_zwsp

SCENARIO_KINDS = ("p2p", "collaboration", "theft", "search", "expert", "organic")
MANIFEST_NAME = "manifest.json"
SUBMISSIONS_DIR = "submissions"
MANIFEST_VERSION = 1

_LABELS = ("alma", "boris", "chandra", "dilan", "edie", "farid", "gwen", "hiro")
_NOUNS = (
    "grid", "pixel", "frame", "shape", "cursor", "index", "window", "counter",
    "sprite", "vector", "angle", "radius", "offset", "bounds", "color", "step",
    "scale", "tick", "trail", "widget",
)

_KIND_SALT = {kind: i + 1 for i, kind in enumerate(SCENARIO_KINDS)}


def _code_line(rng: random.Random, min_len: int = 0) -> str:
    a, b = rng.choice(_NOUNS), rng.choice(_NOUNS)
    n1, n2 = rng.randrange(100), rng.randrange(100)
    forms = (
        f"int {a}_{n1} = {b}_{n2} + {rng.randrange(10)};",
        f"float {a}_{n1} = {b}_{n2} * 0.{rng.randrange(10, 99)}f;",
        f"{a}_{n1} = ({a}_{n1} + {n2}) % {rng.randrange(2, 40)};",
        f"if ({a}_{n1} > {n2}) {{ {b}_{n2} -= {rng.randrange(1, 9)}; }}",
        f"draw_{a}({b}_{n2}, {n1}, {rng.randrange(255)});",
    )
    line = forms[rng.randrange(len(forms))]
    while len(line) < min_len:
        line += f" // {rng.choice(_NOUNS)} {rng.choice(_NOUNS)}"
    return line


def gen_code(rng: random.Random, lines: int, min_chars: int = 0) -> str:
    """Deterministic pseudo-code with exactly `lines` lines and at least
    `min_chars` characters in total."""
    per_line = (min_chars // lines + 1) if lines and min_chars else 0
    return "\n".join(_code_line(rng, per_line) for _ in range(lines))


def type_code(session: Session, text: str, rng: random.Random) -> None:
    """Append text the way a person would: mostly keystrokes, some bursts."""
    i = 0
    while i < len(text):
        if rng.random() < 0.35:
            chunk = text[i : i + rng.randrange(2, 7)]
        else:
            chunk = text[i]
        session.type_text(len(session.buffer), chunk)
        i += len(chunk)


def tweak(session: Session, rng: random.Random, count: int) -> None:
    """Exactly `count` small edit events, scattered over the buffer."""
    for _ in range(count):
        if session.buffer and rng.random() < 0.4:
            session.delete_text(rng.randrange(len(session.buffer)), 1)
        else:
            session.type_text(rng.randrange(len(session.buffer) + 1), rng.choice("xyz0123456789"))


@dataclass
class _Expected:
    verdict: str = "no_plagiarism_detected"
    flag_categories: list[str] = field(default_factory=list)
    required_signals: list[str] = field(default_factory=list)
    edits_after: int | None = None

    def to_dict(self) -> dict:
        d: dict = {
            "verdict": self.verdict,
            "flag_categories": sorted(set(self.flag_categories)),
            "required_signals": sorted(set(self.required_signals)),
        }
        if self.edits_after is not None:
            d["edits_after"] = self.edits_after
        return d


class _Cohort:
    def __init__(self, out_dir: Path, rng: random.Random, clock: ManualClock):
        self.out = out_dir
        self.rng = rng
        self.clock = clock
        self.expected: dict[str, _Expected] = {}

    def machine(self, name: str) -> Path:
        path = self.out / "_machines" / name
        path.mkdir(parents=True, exist_ok=True)
        return path

    def session(self, machine_name: str, project_name: str) -> Session:
        return Session.create(self.machine(machine_name), project_name, clock=self.clock, rng=self.rng)

    def submit(self, label: str, filename: str, text: str) -> None:
        path = self.out / SUBMISSIONS_DIR / label / filename
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")

    def expect(self, label: str, **kwargs) -> _Expected:
        exp = _Expected(**kwargs)
        self.expected[label] = exp
        return exp


def _organic_member(cohort: _Cohort, label: str, extra_file: bool = False) -> None:
    rng = cohort.rng
    session = cohort.session(label, "assignment")
    type_code(session, gen_code(rng, rng.randrange(12, 22)), rng)
    if len(session.buffer) > 260:
        start = rng.randrange(0, len(session.buffer) - 220)
        payload = session.copy(start, start + rng.randrange(180, 220))
        session.paste(payload, len(session.buffer))
    # a line or two off a docs page: permissible online copying
    session.paste(
        ClipboardPayload(text=gen_code(rng, rng.randrange(1, 4)), source_tag="docs page"),
        len(session.buffer),
    )
    tweak(session, rng, rng.randrange(3, 8))
    cohort.submit(label, "main.src", session.save())
    if extra_file:
        helper = cohort.session(label, "assignment helper")
        type_code(helper, gen_code(rng, rng.randrange(4, 8)), rng)
        cohort.submit(label, "helper.src", helper.save())
    cohort.expect(label)


def _gen_organic(cohort: _Cohort, students: int) -> None:
    labels = _LABELS[: max(2, min(students, len(_LABELS)))]
    for i, label in enumerate(labels):
        _organic_member(cohort, label, extra_file=(i == 1))
    # hard negative: a 50-line self-paste from a second project stays clean
    rng = cohort.rng
    label = labels[0]
    session = cohort.session(label, "assignment extra")
    scratch = cohort.session(label, "scratch project")
    type_code(scratch, gen_code(rng, 50), rng)
    payload = scratch.copy(0, len(scratch.buffer))
    type_code(session, gen_code(rng, 3), rng)
    session.paste(payload, len(session.buffer))
    tweak(session, rng, 3)
    cohort.submit(label, "extra.src", session.save())


def _gen_p2p(cohort: _Cohort) -> None:
    rng = cohort.rng
    author, file_copier, paste_copier, loophole, by1 = _LABELS[:5]

    session_a = cohort.session(author, "assignment")
    type_code(session_a, gen_code(rng, rng.randrange(60, 90)), rng)
    shared_payload = session_a.copy(0, len(session_a.buffer))
    author_saved = session_a.save()
    cohort.submit(author, "main.src", author_saved)
    cohort.expect(author)

    # whole-file sharing: the peer opens the author's file on their own
    # machine, edits the header, and submits the same project
    session_f = Session.open_file(
        cohort.machine(file_copier), author_saved, clock=cohort.clock, rng=cohort.rng
    )
    tweak(session_f, rng, 4)
    cohort.submit(file_copier, "main.src", session_f.save())
    cohort.expect(
        file_copier,
        verdict="plagiarism_detected",
        flag_categories=["file_shared"],
        edits_after=5,  # the open event plus four edits past the shared log
    )

    # snippet sharing: even seeds over messaging (watermark survives);
    # odd seeds over email (zero-width characters stripped in transit,
    # so the paste decodes as external)
    emailed = rng.randrange(2) == 1
    text = strip_zwsp(shared_payload.text) if emailed else shared_payload.text
    session_c = cohort.session(paste_copier, "assignment")
    session_c.paste(ClipboardPayload(text=text, source_tag="p2p transfer"), 0)
    tweak(session_c, rng, 5)
    cohort.submit(paste_copier, "main.src", session_c.save())
    cohort.expect(
        paste_copier,
        verdict="plagiarism_detected",
        flag_categories=["external" if emailed else "foreign_turned_in"],
        edits_after=5,
    )

    # the keystroke-log loophole: finish elsewhere, paste the whole project in
    scratch = cohort.session(loophole, "warmup project")
    type_code(scratch, gen_code(rng, 51), rng)
    payload = scratch.copy(0, len(scratch.buffer))
    session_l = cohort.session(loophole, "assignment")
    type_code(session_l, gen_code(rng, 2), rng)
    session_l.paste(payload, len(session_l.buffer))
    tweak(session_l, rng, 2)
    cohort.submit(loophole, "main.src", session_l.save())
    cohort.expect(
        loophole,
        verdict="plagiarism_detected",
        flag_categories=["same_machine_other_project"],
        edits_after=2,
    )

    _organic_member(cohort, by1)


def _gen_collaboration(cohort: _Cohort) -> None:
    rng = cohort.rng
    partner_a, partner_b, by1, by2 = _LABELS[:4]
    session_a = cohort.session(partner_a, "assignment")
    session_b = cohort.session(partner_b, "assignment")

    for _ in range(2):
        type_code(session_a, gen_code(rng, rng.randrange(6, 10)), rng)
        type_code(session_b, gen_code(rng, rng.randrange(6, 10)), rng)
        session_b.paste(session_a.copy(0, len(session_a.buffer)), len(session_b.buffer))
        type_code(session_b, gen_code(rng, 2), rng)
        session_a.paste(session_b.copy(0, len(session_b.buffer)), len(session_a.buffer))
        type_code(session_a, gen_code(rng, 2), rng)

    cohort.submit(partner_a, "main.src", session_a.save())
    cohort.submit(partner_b, "main.src", session_b.save())
    for label in (partner_a, partner_b):
        cohort.expect(
            label,
            verdict="plagiarism_detected",
            flag_categories=["foreign_turned_in"],
            required_signals=["collaboration_signal"],
        )
    for label in (by1, by2):
        _organic_member(cohort, label)


def _gen_theft(cohort: _Cohort) -> None:
    rng = cohort.rng
    author, thief, bystander = _LABELS[:3]
    lab_machine = "lab_pc"

    session_a = Session.create(cohort.machine(lab_machine), "assignment", clock=cohort.clock, rng=cohort.rng)
    type_code(session_a, gen_code(rng, rng.randrange(35, 50)), rng)
    saved = session_a.save()
    cohort.submit(author, "main.src", saved)
    cohort.expect(author)

    # the thief finds the file on the shared machine, lifts the code, and
    # pastes it into their own project on that same machine
    found = Session.open_file(cohort.machine(lab_machine), saved, clock=cohort.clock, rng=cohort.rng)
    lifted = found.copy(0, len(found.buffer))
    session_t = Session.create(cohort.machine(lab_machine), "assignment", clock=cohort.clock, rng=cohort.rng)
    session_t.paste(lifted, 0)
    tweak(session_t, rng, rng.randrange(4, 9))
    cohort.submit(thief, "main.src", session_t.save())
    cohort.expect(
        thief,
        verdict="plagiarism_detected",
        flag_categories=["same_machine_other_project"],
    )

    _organic_member(cohort, bystander)


def _gen_search(cohort: _Cohort) -> None:
    rng = cohort.rng
    finder, edge3, edge4, raw_submitter, bystander = _LABELS[:5]
    solution = gen_code(rng, rng.randrange(40, 80))

    session_f = cohort.session(finder, "assignment")
    session_f.paste(ClipboardPayload(text=solution, source_tag="search result"), 0)
    tweak(session_f, rng, rng.randrange(2, 12))
    cohort.submit(finder, "main.src", session_f.save())
    cohort.expect(finder, verdict="plagiarism_detected", flag_categories=["external"])

    # exactly at the threshold: three pasted lines stay permissible
    session_3 = cohort.session(edge3, "assignment")
    type_code(session_3, gen_code(rng, rng.randrange(8, 14)), rng)
    session_3.paste(
        ClipboardPayload(text=gen_code(rng, 3, min_chars=220), source_tag="docs page"),
        len(session_3.buffer),
    )
    tweak(session_3, rng, 4)
    cohort.submit(edge3, "main.src", session_3.save())
    cohort.expect(edge3)

    # one past it: four lines could be an entire function
    session_4 = cohort.session(edge4, "assignment")
    type_code(session_4, gen_code(rng, rng.randrange(8, 14)), rng)
    session_4.paste(
        ClipboardPayload(text=gen_code(rng, 4, min_chars=220), source_tag="forum answer"),
        len(session_4.buffer),
    )
    tweak(session_4, rng, 4)
    cohort.submit(edge4, "main.src", session_4.save())
    cohort.expect(edge4, verdict="plagiarism_detected", flag_categories=["external"])

    # downloaded and submitted without ever opening the tracking IDE
    cohort.submit(raw_submitter, "main.src", solution + "\n")
    cohort.expect(raw_submitter, verdict="no_metacomment")

    _organic_member(cohort, bystander)


def _gen_expert(cohort: _Cohort) -> None:
    rng = cohort.rng
    client21, client20, ext_client, bystander = _LABELS[:4]
    tutor_machine = "tutor_laptop"

    for label, lines, flagged in ((client21, 21, True), (client20, 20, False)):
        tutor = Session.create(
            cohort.machine(tutor_machine), f"commission {label}", clock=cohort.clock, rng=cohort.rng
        )
        type_code(tutor, gen_code(rng, lines, min_chars=640), rng)
        payload = tutor.copy(0, len(tutor.buffer))
        client = cohort.session(label, "assignment")
        type_code(client, gen_code(rng, 3), rng)
        client.paste(payload, len(client.buffer))
        tweak(client, rng, rng.randrange(2, 7))
        cohort.submit(label, "main.src", client.save())
        if flagged:
            cohort.expect(label, verdict="plagiarism_detected", flag_categories=["unassociated_machine"])
        else:
            cohort.expect(label)

    session_e = cohort.session(ext_client, "assignment")
    session_e.paste(
        ClipboardPayload(text=gen_code(rng, rng.randrange(25, 60)), source_tag="answer site"),
        0,
    )
    tweak(session_e, rng, rng.randrange(1, 6))
    cohort.submit(ext_client, "main.src", session_e.save())
    cohort.expect(ext_client, verdict="plagiarism_detected", flag_categories=["external"])

    _organic_member(cohort, bystander)


def generate(kind: str, seed: int, out_dir: str | Path, students: int = 5) -> dict:
    """Write a cohort directory plus its ground-truth manifest; returns the
    manifest. Byte-identical for identical (kind, seed, students)."""
    if kind not in SCENARIO_KINDS:
        raise ValueError(f"unknown scenario kind {kind!r} (choose from {', '.join(SCENARIO_KINDS)})")
    out = Path(out_dir)
    (out / SUBMISSIONS_DIR).mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed * 1_000_003 + _KIND_SALT[kind])
    clock = ManualClock(start_ms=1_700_000_000_000, step_ms=700)
    cohort = _Cohort(out, rng, clock)

    if kind == "organic":
        _gen_organic(cohort, students)
    elif kind == "p2p":
        _gen_p2p(cohort)
    elif kind == "collaboration":
        _gen_collaboration(cohort)
    elif kind == "theft":
        _gen_theft(cohort)
    elif kind == "search":
        _gen_search(cohort)
    else:
        _gen_expert(cohort)

    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "kind": kind,
        "seed": seed,
        "students": students,
        "submissions_dir": SUBMISSIONS_DIR,
        "expected": {label: exp.to_dict() for label, exp in sorted(cohort.expected.items())},
    }
    (out / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest


def verify_against_manifest(analysis: Report, manifest: dict) -> list[str]:
    """Compare analyzer output to the manifest; returns mismatch messages."""
    mismatches: list[str] = []
    expected = manifest["expected"]
    report_labels = {sub.label for sub in analysis.submissions}
    for missing in sorted(set(expected) - report_labels):
        mismatches.append(f"{missing}: expected in report but absent")
    for extra in sorted(report_labels - set(expected)):
        mismatches.append(f"{extra}: present in report but not in manifest")
    for label, exp in sorted(expected.items()):
        if label not in report_labels:
            continue
        sub = analysis.submission(label)
        if sub.verdict != exp["verdict"]:
            mismatches.append(f"{label}: verdict {sub.verdict} != expected {exp['verdict']}")
        got_categories = sorted({f.category for f in sub.flags})
        if got_categories != exp["flag_categories"]:
            mismatches.append(
                f"{label}: flag categories {got_categories} != expected {exp['flag_categories']}"
            )
        have_signals = {s.kind for s in sub.signals}
        for sig in exp["required_signals"]:
            if sig not in have_signals:
                mismatches.append(f"{label}: missing required signal {sig}")
        if "edits_after" in exp and sub.edits_after_last_flag != exp["edits_after"]:
            mismatches.append(
                f"{label}: edits_after {sub.edits_after_last_flag} != expected {exp['edits_after']}"
            )
    return mismatches
