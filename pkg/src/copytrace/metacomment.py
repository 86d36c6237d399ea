"""PASTETRACE1 file format: render, parse, strip.

A tracked source file is the program body followed by one trailing marker
line, `/*@PASTETRACE1 <base64 payload> @*/`, holding the canonical JSON
serialization of the MetaComment. Layout and field order are normative
(docs/format.md); rendering identical inputs yields identical bytes.

Parsing is fault-tolerant: a damaged payload never raises. Whatever prefix
of the infection stack and event log still decodes cleanly is salvaged and
the damage is reported through diagnostics. Integrity fields (a payload
crc32 plus one crc per event/entry) exist so a spliced payload cannot
masquerade as an undamaged one or salvage a non-prefix.
"""
from __future__ import annotations

import base64
import binascii
import json
import re
import zlib
from dataclasses import dataclass, field

from .model import (
    FORMAT_VERSION,
    EditEvent,
    InfectionEntry,
    MetaComment,
    parse_id,
    render_id,
)

MARKER_NAME = "PASTETRACE1"
MARKER_PREFIX = "/*@PASTETRACE1 "
MARKER_SUFFIX = " @*/"

ZWSP = "​"

_ESCAPE_RE = re.compile(r"(@+PASTETRACE1)")
_UNESCAPE_RE = re.compile(r"@(@+PASTETRACE1)")
_ID_VALUE = r"[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}"
_INSTALL_RE = re.compile(r'"install_id":"(%s)"' % _ID_VALUE)
_PROJECT_RE = re.compile(r'"project_id":"(%s)"' % _ID_VALUE)
_VERSION_RE = re.compile(r'"format_version":(\d+)')
_B64_JUNK_RE = re.compile(r"[^A-Za-z0-9+/]")


@dataclass
class ParseResult:
    body: str
    meta: MetaComment | None
    diagnostics: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter((self.body, self.meta, self.diagnostics))


def _canonical(obj: dict) -> str:
    # Insertion order of the dict is the canonical field order.
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _crc(obj: dict) -> int:
    return zlib.crc32(_canonical(obj).encode("utf-8"))


def _with_crc(obj: dict) -> dict:
    out = dict(obj)
    out["crc"] = _crc(obj)
    return out


def _pop_and_check_crc(obj: dict) -> dict:
    if not isinstance(obj, dict):
        raise ValueError("expected an object")
    inner = dict(obj)
    got = inner.pop("crc", None)
    if not isinstance(got, int) or isinstance(got, bool):
        raise ValueError("missing integrity field")
    if _crc(inner) != got:
        raise ValueError("integrity check failed")
    return inner


def encode_payload(meta: MetaComment) -> str:
    """Canonical payload serialization, base64 of UTF-8 JSON."""
    body = {
        "format_version": meta.format_version,
        "install_id": render_id(meta.install_id),
        "project_id": render_id(meta.project_id),
        "infection_stack": [_with_crc(e.to_dict()) for e in meta.infection_stack],
        "events": [_with_crc(e.to_dict()) for e in meta.events],
    }
    body["crc32"] = zlib.crc32(_canonical(body).encode("utf-8"))
    return base64.b64encode(_canonical(body).encode("utf-8")).decode("ascii")


def _decode_payload_clean(payload_b64: str) -> MetaComment:
    data = base64.b64decode(payload_b64.encode("ascii"), validate=True)
    doc = json.loads(data.decode("utf-8"))
    if not isinstance(doc, dict):
        raise ValueError("payload is not an object")
    inner = dict(doc)
    crc_got = inner.pop("crc32", None)
    if not isinstance(crc_got, int) or isinstance(crc_got, bool):
        raise ValueError("payload missing crc32")
    if zlib.crc32(_canonical(inner).encode("utf-8")) != crc_got:
        raise ValueError("payload crc32 mismatch")
    version = inner["format_version"]
    if not isinstance(version, int) or isinstance(version, bool):
        raise ValueError("bad format_version")
    meta = MetaComment(
        install_id=parse_id(inner["install_id"]),
        project_id=parse_id(inner["project_id"]),
        infection_stack=[InfectionEntry.from_dict(_pop_and_check_crc(e)) for e in inner["infection_stack"]],
        events=[EditEvent.from_dict(_pop_and_check_crc(e)) for e in inner["events"]],
        format_version=version,
    )
    meta.validate()
    return meta


def _salvage_array(text: str, key: str) -> tuple[list[dict], bool]:
    """Decode a prefix of the array under `key` from possibly damaged JSON.

    Returns (items, truncated). Each returned item passed its own crc.
    Stops at the first entry that fails to decode or verify; never raises.
    """
    anchor = f'"{key}":['
    start = text.find(anchor)
    if start == -1:
        return [], True
    idx = start + len(anchor)
    decoder = json.JSONDecoder()
    items: list[dict] = []
    while True:
        if idx >= len(text):
            return items, True
        if text[idx] == "]":
            return items, False
        try:
            obj, end = decoder.raw_decode(text, idx)
            items.append(_pop_and_check_crc(obj))
        except (ValueError, IndexError):
            return items, True
        idx = end
        if idx < len(text) and text[idx] == ",":
            idx += 1
        elif idx < len(text) and text[idx] == "]":
            return items, False
        else:
            return items, True


def _salvage_payload(payload_b64: str, diagnostics: list[str]) -> MetaComment | None:
    # Base64 padding marks end-of-stream; a deletion can drag it inward,
    # so decode only up to the first '=' and to a whole number of groups.
    cleaned = _B64_JUNK_RE.sub("", payload_b64.split("=", 1)[0])
    data = base64.b64decode(cleaned[: len(cleaned) // 4 * 4].encode("ascii"))
    text = data.decode("utf-8", errors="replace")

    install_m = _INSTALL_RE.search(text)
    project_m = _PROJECT_RE.search(text)
    if install_m is None or project_m is None:
        diagnostics.append("payload truncated: identity fields unrecoverable, metaComment dropped")
        return None
    version_m = _VERSION_RE.search(text)

    raw_stack, stack_truncated = _salvage_array(text, "infection_stack")
    stack: list[InfectionEntry] = []
    last_seq = -1
    for d in raw_stack:
        try:
            entry = InfectionEntry.from_dict(d)
        except ValueError:
            stack_truncated = True
            break
        if entry.event_seq <= last_seq:  # entries are chronological, one per event
            stack_truncated = True
            break
        stack.append(entry)
        last_seq = entry.event_seq

    raw_events, events_truncated = _salvage_array(text, "events")
    events: list[EditEvent] = []
    for d in raw_events:
        try:
            ev = EditEvent.from_dict(d)
        except ValueError:
            events_truncated = True
            break
        if ev.seq != len(events):
            events_truncated = True
            break
        events.append(ev)

    parts = []
    if stack_truncated:
        parts.append(f"salvaged {len(stack)} infection entries")
    if events_truncated:
        parts.append(f"salvaged {len(events)} events")
    detail = "; ".join(parts) if parts else "identities intact"
    diagnostics.append(f"payload truncated: {detail}")

    return MetaComment(
        install_id=parse_id(install_m.group(1)),
        project_id=parse_id(project_m.group(1)),
        infection_stack=stack,
        events=events,
        format_version=int(version_m.group(1)) if version_m else FORMAT_VERSION,
    )


def _escape_body(body: str) -> str:
    return _ESCAPE_RE.sub(r"@\1", body)


def _unescape_body(body: str) -> str:
    return _UNESCAPE_RE.sub(r"\1", body)


def _find_marker(text: str) -> int:
    """Offset of the marker token at the start of a line, or -1."""
    pos = text.rfind(MARKER_PREFIX)
    while pos > 0 and text[pos - 1] != "\n":
        pos = text.rfind(MARKER_PREFIX, 0, pos)
    return pos


def render(meta: MetaComment, body: str) -> str:
    """Append the metadata marker line to the program body.

    Total and deterministic. Occurrences of the marker token inside the
    body are escaped (and transparently unescaped by parse) so the real
    marker stays unambiguous.
    """
    return _escape_body(body) + "\n" + MARKER_PREFIX + encode_payload(meta) + MARKER_SUFFIX + "\n"


def parse(file_text: str) -> ParseResult:
    """Split a file into (body, MetaComment, diagnostics). Never raises.

    No marker: meta is None and the body is the whole text (external
    origin). Damaged payload: salvage whatever prefix verifies.
    """
    pos = _find_marker(file_text)
    if pos == -1:
        return ParseResult(file_text, None, ["no metaComment"])

    diagnostics: list[str] = []
    line_end = file_text.find("\n", pos)
    if line_end == -1:
        line_end = len(file_text)
        diagnostics.append("metaComment marker line is not newline-terminated")
    elif line_end != len(file_text) - 1:
        diagnostics.append("content after the metaComment marker line was ignored")
    marker_line = file_text[pos:line_end]

    if marker_line.endswith(MARKER_SUFFIX):
        payload_b64 = marker_line[len(MARKER_PREFIX) : -len(MARKER_SUFFIX)]
    else:
        payload_b64 = marker_line[len(MARKER_PREFIX) :]
        diagnostics.append("metaComment marker terminator damaged")

    body = _unescape_body(file_text[: pos - 1] if pos > 0 else "")

    try:
        meta = _decode_payload_clean(payload_b64)
    except (ValueError, binascii.Error, UnicodeDecodeError):
        meta = _salvage_payload(payload_b64, diagnostics)
    return ParseResult(body, meta, diagnostics)


def strip(file_text: str) -> str:
    """Drop the marker line and every zero-width space; idempotent.

    This is the form handed to outside tools: plain program text with no
    provenance data.
    """
    result = parse(file_text)
    return result.body.replace(ZWSP, "")
