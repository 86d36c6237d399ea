"""Headless editing session: a text buffer with full event logging.

Stands in for the instrumented IDE. Every mutation is appended to the
file's event log, copies leave through the watermark channel, and pastes
are classified by what their watermark decodes to, never by where the
caller claims the clipboard came from.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

from . import metacomment
from .identity import load_or_create_install_id, new_project
from .model import EditEvent, InfectionEntry, InstallId, MetaComment, PasteOrigin
from .stego import ZWSP, StegoRecord, embed, extract, strip_zwsp

Clock = Callable[[], int]


def system_clock() -> int:
    return time.time_ns() // 1_000_000


class ManualClock:
    """Deterministic clock for scripts and scenario generators.

    Each read returns the current time and advances it by `step`, so
    event timestamps are reproducible and strictly ordered.
    """

    def __init__(self, start_ms: int = 0, step_ms: int = 1000):
        self.now = start_ms
        self.step = step_ms

    def set(self, ms: int) -> None:
        self.now = ms

    def __call__(self) -> int:
        t = self.now
        self.now += self.step
        return t


class ReplayError(Exception):
    """An event log cannot be replayed; names the offending seq."""

    def __init__(self, seq: int, message: str):
        super().__init__(f"event {seq}: {message}")
        self.seq = seq


@dataclass(frozen=True, slots=True)
class ClipboardPayload:
    """Copied text, watermark included. source_tag is test diagnostics only;
    paste logic never consults it."""

    text: str
    source_tag: str = ""


def effective_install(meta: MetaComment, upto_seq: int | None = None) -> InstallId:
    """The machine a file last lived on: creator id, overridden by
    machine_change entries (optionally only those at or before a seq)."""
    install = meta.install_id
    for entry in meta.infection_stack:
        if entry.kind != "machine_change":
            continue
        if upto_seq is not None and entry.event_seq > upto_seq:
            continue
        if entry.install_id is not None:
            install = entry.install_id
    return install


class Session:
    """One live editing session over one file on one machine."""

    def __init__(
        self,
        install_id: InstallId,
        meta: MetaComment,
        buffer: str,
        clock: Clock,
        warnings: list[str] | None = None,
    ):
        self.install_id = install_id
        self.meta = meta
        self._buffer = buffer
        self.clock = clock
        self.warnings: list[str] = list(warnings or [])

    @property
    def buffer(self) -> str:
        return self._buffer

    @property
    def events(self) -> list[EditEvent]:
        return self.meta.events

    @classmethod
    def create(
        cls,
        machine_state_dir: str | Path,
        name: str,
        clock: Clock | None = None,
        rng: random.Random | None = None,
    ) -> "Session":
        """Start a brand-new project with an empty buffer."""
        install = load_or_create_install_id(machine_state_dir, rng)
        return cls(install, new_project(install, name, rng), "", clock or system_clock)

    @classmethod
    def open_file(
        cls,
        machine_state_dir: str | Path,
        file_text: str,
        clock: Clock | None = None,
        rng: random.Random | None = None,
    ) -> "Session":
        """Open existing file text on this machine.

        A file without a metaComment gets a fresh one and its whole initial
        state logged as the first edit. A file last saved on a different
        machine gains a machine_change entry naming this machine.
        """
        install = load_or_create_install_id(machine_state_dir, rng)
        body, meta, diagnostics = metacomment.parse(file_text)
        warnings = list(diagnostics)
        buffer = strip_zwsp(body)
        if buffer != body:
            warnings.append("zero-width characters removed from loaded file")
        if meta is None:
            meta = new_project(install, "imported", rng)
            session = cls(install, meta, buffer, clock or system_clock, warnings)
            session._log("open", 0, buffer)
            return session
        session = cls(install, meta, buffer, clock or system_clock, warnings)
        ev = session._log("open", 0, "")
        if effective_install(meta) != install:
            meta.infection_stack.append(
                InfectionEntry(
                    kind="machine_change",
                    event_seq=ev.seq,
                    timestamp=ev.timestamp,
                    install_id=install,
                )
            )
        return session

    def _log(
        self,
        kind: str,
        offset: int,
        text: str,
        origin: PasteOrigin | None = None,
        line_count: int | None = None,
    ) -> EditEvent:
        ev = EditEvent(
            seq=self.meta.next_seq(),
            timestamp=self.clock(),
            kind=kind,
            offset=offset,
            text=text,
            origin=origin,
            line_count=line_count,
        )
        self.meta.events.append(ev)
        return ev

    def _check_range(self, start: int, end: int) -> None:
        if not (0 <= start < end <= len(self._buffer)):
            raise ValueError(f"range [{start}, {end}) out of bounds for buffer of length {len(self._buffer)}")

    def type_text(self, offset: int, text: str) -> EditEvent:
        if not 0 <= offset <= len(self._buffer):
            raise ValueError(f"offset {offset} out of bounds for buffer of length {len(self._buffer)}")
        # U+200B is reserved for the watermark channel and never enters the buffer.
        clean = text.replace(ZWSP, "")
        if not clean:
            raise ValueError("typed text must be non-empty")
        ev = self._log("insert", offset, clean)
        self._buffer = self._buffer[:offset] + clean + self._buffer[offset:]
        return ev

    def delete_text(self, offset: int, length: int) -> EditEvent:
        if length < 1:
            raise ValueError("delete length must be at least 1")
        self._check_range(offset, offset + length)
        removed = self._buffer[offset : offset + length]
        ev = self._log("delete", offset, removed)
        self._buffer = self._buffer[:offset] + self._buffer[offset + length :]
        return ev

    def _stego_record(self) -> StegoRecord:
        tail: list = []
        for entry in reversed(self.meta.infection_stack):
            ident = entry.install_id or entry.project_id
            if ident is not None and ident not in tail:
                tail.append(ident)
        return StegoRecord(
            install_id=self.install_id,
            project_id=self.meta.project_id,
            stack_tail=tuple(tail),
        )

    def copy(self, start: int, end: int) -> ClipboardPayload:
        """Copy a region; the returned clipboard text carries the watermark."""
        self._check_range(start, end)
        segment = self._buffer[start:end]
        self._log("copy", start, segment)
        return ClipboardPayload(
            text=embed(segment, self._stego_record()),
            source_tag=f"{self.install_id}/{self.meta.project_id}",
        )

    def cut(self, start: int, end: int) -> ClipboardPayload:
        """Copy + delete, logged as a single cut event."""
        self._check_range(start, end)
        segment = self._buffer[start:end]
        record = self._stego_record()
        self._log("cut", start, segment)
        self._buffer = self._buffer[:start] + self._buffer[end:]
        return ClipboardPayload(
            text=embed(segment, record),
            source_tag=f"{self.install_id}/{self.meta.project_id}",
        )

    def _classify(self, payload_text: str) -> PasteOrigin:
        extraction = extract(payload_text)
        if not extraction.records:
            return PasteOrigin(kind="external")
        rec = extraction.records[0]
        if rec.install_id == self.install_id:
            # A minimal record omits the project id; without it, same-project
            # vs other-project is undecidable, so give benefit of the doubt.
            if rec.project_id is None or rec.project_id == self.meta.project_id:
                return PasteOrigin(kind="internal")
            return PasteOrigin(kind="same_machine", project_id=rec.project_id)
        return PasteOrigin(kind="foreign", install_id=rec.install_id, project_id=rec.project_id)

    def paste(self, payload: ClipboardPayload, offset: int) -> EditEvent:
        """Insert clipboard text, classifying its origin from the watermark.

        The watermark is consumed: the buffer receives the stripped text,
        and same-machine/foreign provenance goes onto the InfectionStack.
        """
        if not 0 <= offset <= len(self._buffer):
            raise ValueError(f"offset {offset} out of bounds for buffer of length {len(self._buffer)}")
        clean = strip_zwsp(payload.text)
        origin = self._classify(payload.text)
        ev = self._log("paste", offset, clean, origin=origin, line_count=clean.count("\n") + 1)
        self._buffer = self._buffer[:offset] + clean + self._buffer[offset:]
        if origin.kind == "same_machine":
            self.meta.infection_stack.append(
                InfectionEntry(
                    kind="paste_same_machine",
                    event_seq=ev.seq,
                    timestamp=ev.timestamp,
                    project_id=origin.project_id,
                )
            )
        elif origin.kind == "foreign":
            self.meta.infection_stack.append(
                InfectionEntry(
                    kind="paste_foreign",
                    event_seq=ev.seq,
                    timestamp=ev.timestamp,
                    install_id=origin.install_id,
                    project_id=origin.project_id,
                )
            )
        return ev

    def save(self) -> str:
        return metacomment.render(self.meta, self._buffer)


def _apply(buffer: str, ev: EditEvent) -> str:
    if ev.kind == "open":
        # Non-empty open seeds the buffer (external file); empty is a reopen.
        return ev.text if ev.text else buffer
    if ev.kind in ("insert", "paste"):
        if not 0 <= ev.offset <= len(buffer):
            raise ReplayError(ev.seq, f"offset {ev.offset} out of bounds (buffer length {len(buffer)})")
        return buffer[: ev.offset] + ev.text + buffer[ev.offset :]
    if ev.kind in ("delete", "cut", "copy"):
        end = ev.offset + len(ev.text)
        if not 0 <= ev.offset <= end <= len(buffer):
            raise ReplayError(ev.seq, f"range [{ev.offset}, {end}) out of bounds (buffer length {len(buffer)})")
        if buffer[ev.offset : end] != ev.text:
            raise ReplayError(ev.seq, "recorded content does not match the reconstructed buffer")
        if ev.kind == "copy":
            return buffer
        return buffer[: ev.offset] + buffer[end:]
    raise ReplayError(ev.seq, f"unknown event kind {ev.kind!r}")


def replay(events: list[EditEvent], upto: int | None = None) -> str:
    """Rebuild the buffer from the log; errors name the corrupt seq."""
    buffer = ""
    prev_seq: int | None = None
    for ev in events:
        if prev_seq is not None and ev.seq != prev_seq + 1:
            raise ReplayError(ev.seq, f"non-contiguous seq after {prev_seq}")
        prev_seq = ev.seq
        if upto is not None and ev.seq > upto:
            break
        buffer = _apply(buffer, ev)
    return buffer


def replay_snapshots(events: list[EditEvent]) -> Iterator[tuple[int, str]]:
    """Buffer state after each event, for timeline review."""
    buffer = ""
    prev_seq: int | None = None
    for ev in events:
        if prev_seq is not None and ev.seq != prev_seq + 1:
            raise ReplayError(ev.seq, f"non-contiguous seq after {prev_seq}")
        prev_seq = ev.seq
        buffer = _apply(buffer, ev)
        yield ev.seq, buffer


def typing_linearity(events: list[EditEvent]) -> float | None:
    """Share of typed inserts that extend the previous insertion point.

    Advisory review signal only. None when the log has no insert events
    (nothing was ever typed, e.g. a single giant paste).
    """
    inserts = [ev for ev in events if ev.kind == "insert"]
    if not inserts:
        return None
    linear = 0
    prev_end: int | None = None
    for ev in inserts:
        if len(ev.text) == 1 and (prev_end is None or abs(ev.offset - prev_end) <= 1):
            linear += 1
        prev_end = ev.offset + len(ev.text)
    return linear / len(inserts)
