"""Shared data model: identities, edit events, infection entries, metadata records.

The dict shapes produced here are the wire shapes used by the PASTETRACE1
payload (see docs/format.md) and by the replay-export / report files, minus
the integrity fields the metacomment codec adds on top.
"""
from __future__ import annotations

import uuid
from dataclasses import dataclass, field

InstallId = uuid.UUID
ProjectId = uuid.UUID

FORMAT_VERSION = 1

EVENT_KINDS = ("open", "insert", "delete", "copy", "cut", "paste")
ORIGIN_KINDS = ("internal", "same_machine", "foreign", "external")
INFECTION_KINDS = ("machine_change", "paste_foreign", "paste_same_machine", "paste_external")


def parse_id(value: str) -> uuid.UUID:
    """Parse a canonical lowercase hyphenated identifier, strictly."""
    if not isinstance(value, str):
        raise ValueError(f"identifier must be a string, got {type(value).__name__}")
    u = uuid.UUID(value)
    if str(u) != value:
        raise ValueError(f"identifier not in canonical form: {value!r}")
    return u


def render_id(value: uuid.UUID) -> str:
    return str(value)


@dataclass(frozen=True, slots=True)
class PasteOrigin:
    """Provenance of one paste, derived solely from the decoded watermark."""

    kind: str  # one of ORIGIN_KINDS
    install_id: InstallId | None = None
    project_id: ProjectId | None = None

    def __post_init__(self) -> None:
        if self.kind not in ORIGIN_KINDS:
            raise ValueError(f"unknown origin kind {self.kind!r}")

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.install_id is not None:
            d["install_id"] = render_id(self.install_id)
        if self.project_id is not None:
            d["project_id"] = render_id(self.project_id)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PasteOrigin":
        if not isinstance(d, dict):
            raise ValueError("origin must be an object")
        install = d.get("install_id")
        project = d.get("project_id")
        return cls(
            kind=d["kind"],
            install_id=parse_id(install) if install is not None else None,
            project_id=parse_id(project) if project is not None else None,
        )


@dataclass(frozen=True, slots=True)
class EditEvent:
    """One timestamped buffer mutation (or copy) in a session's log."""

    seq: int
    timestamp: int  # milliseconds since epoch
    kind: str  # one of EVENT_KINDS
    offset: int
    text: str
    origin: PasteOrigin | None = None  # paste only
    line_count: int | None = None  # paste only

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.seq < 0 or self.offset < 0:
            raise ValueError("seq and offset must be non-negative")

    def to_dict(self) -> dict:
        d: dict = {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "kind": self.kind,
            "offset": self.offset,
            "text": self.text,
        }
        if self.origin is not None:
            d["origin"] = self.origin.to_dict()
        if self.line_count is not None:
            d["line_count"] = self.line_count
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EditEvent":
        if not isinstance(d, dict):
            raise ValueError("event must be an object")
        for key in ("seq", "timestamp", "offset"):
            if not isinstance(d.get(key), int) or isinstance(d.get(key), bool):
                raise ValueError(f"event field {key!r} must be an integer")
        if not isinstance(d.get("text"), str):
            raise ValueError("event field 'text' must be a string")
        origin = d.get("origin")
        line_count = d.get("line_count")
        if line_count is not None and (not isinstance(line_count, int) or isinstance(line_count, bool)):
            raise ValueError("event field 'line_count' must be an integer")
        return cls(
            seq=d["seq"],
            timestamp=d["timestamp"],
            kind=d["kind"],
            offset=d["offset"],
            text=d["text"],
            origin=PasteOrigin.from_dict(origin) if origin is not None else None,
            line_count=line_count,
        )


@dataclass(frozen=True, slots=True)
class InfectionEntry:
    """One provenance observation: a machine change or a tracked foreign paste."""

    kind: str  # one of INFECTION_KINDS
    event_seq: int
    timestamp: int
    install_id: InstallId | None = None
    project_id: ProjectId | None = None

    def __post_init__(self) -> None:
        if self.kind not in INFECTION_KINDS:
            raise ValueError(f"unknown infection kind {self.kind!r}")
        if self.kind in ("machine_change", "paste_foreign") and (
            self.install_id is None and self.project_id is None
        ):
            raise ValueError(f"{self.kind} entry must carry at least one identifier")

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "event_seq": self.event_seq, "timestamp": self.timestamp}
        if self.install_id is not None:
            d["install_id"] = render_id(self.install_id)
        if self.project_id is not None:
            d["project_id"] = render_id(self.project_id)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InfectionEntry":
        if not isinstance(d, dict):
            raise ValueError("infection entry must be an object")
        for key in ("event_seq", "timestamp"):
            if not isinstance(d.get(key), int) or isinstance(d.get(key), bool):
                raise ValueError(f"infection entry field {key!r} must be an integer")
        install = d.get("install_id")
        project = d.get("project_id")
        return cls(
            kind=d["kind"],
            event_seq=d["event_seq"],
            timestamp=d["timestamp"],
            install_id=parse_id(install) if install is not None else None,
            project_id=parse_id(project) if project is not None else None,
        )


@dataclass(slots=True)
class MetaComment:
    """The hidden per-file record: identities, infection stack, full edit log."""

    install_id: InstallId
    project_id: ProjectId
    infection_stack: list[InfectionEntry] = field(default_factory=list)
    events: list[EditEvent] = field(default_factory=list)
    format_version: int = FORMAT_VERSION

    def next_seq(self) -> int:
        return len(self.events)

    def validate(self) -> None:
        """Check the structural invariants: dense seq numbering from zero."""
        for i, ev in enumerate(self.events):
            if ev.seq != i:
                raise ValueError(f"event seq {ev.seq} at position {i}: log must be dense from 0")
        for entry in self.infection_stack:
            if not 0 <= entry.event_seq < len(self.events):
                raise ValueError(f"infection entry references unknown event seq {entry.event_seq}")
