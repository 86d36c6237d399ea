"""Zero-width-space watermark channel for copied text.

Every gap between two visible characters carries one bit: a U+200B in the
gap means 1, no U+200B means 0. The provenance record is framed (sync
word, length byte, payload, CRC-16/CCITT) and the frame is written
back-to-back into the channel until capacity runs out, so any
sufficiently long contiguous slice of a watermarked copy still contains a
whole frame. Removing every U+200B recovers the visible text exactly.

Frame and record layout are normative; see docs/format.md.
"""
from __future__ import annotations

import uuid
from dataclasses import dataclass

ZWSP = "​"

SYNC = 0xB7A5
SYNC_BITS = format(SYNC, "016b")

# sync(16) + length(8) + smallest record (install id, 16 bytes) + crc(16)
MIN_FRAME_BITS = 16 + 8 + 128 + 16
MIN_EMBED_CHARS = MIN_FRAME_BITS + 1

_ID_BYTES = 16
_MAX_STACK_IDS = (255 - 2 * _ID_BYTES) // _ID_BYTES  # length field is one byte


def _build_crc_table() -> list[int]:
    table = []
    for byte in range(256):
        crc = byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021) & 0xFFFF if crc & 0x8000 else (crc << 1) & 0xFFFF
        table.append(crc)
    return table


_CRC_TABLE = _build_crc_table()


def crc16_ccitt(data: bytes, crc: int = 0xFFFF) -> int:
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection."""
    for b in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC_TABLE[(crc >> 8) ^ b]
    return crc


@dataclass(frozen=True, slots=True)
class StegoRecord:
    """Provenance carried by a copy: machine id, then best-effort extras."""

    install_id: uuid.UUID
    project_id: uuid.UUID | None = None
    stack_tail: tuple[uuid.UUID, ...] = ()


@dataclass(frozen=True, slots=True)
class Extraction:
    records: tuple[StegoRecord, ...]
    verdict: str  # "decoded" or "none"


def strip_zwsp(text: str) -> str:
    """Remove every zero-width space; what hostile channels (email) do."""
    return text.replace(ZWSP, "")


def capacity(visible_text: str) -> int:
    """Bit capacity of a text: one bit per gap between visible characters."""
    visible = len(visible_text) - visible_text.count(ZWSP)
    return max(0, visible - 1)


def _frame_bits(payload: bytes) -> str:
    crc = crc16_ccitt(bytes([len(payload)]) + payload)
    raw = SYNC.to_bytes(2, "big") + bytes([len(payload)]) + payload + crc.to_bytes(2, "big")
    return "".join(format(b, "08b") for b in raw)


def _choose_payload(record: StegoRecord, bit_capacity: int) -> bytes | None:
    """Largest record tier whose frame fits: ids from the stack tail are
    dropped first, then the project id; the install id is all-or-nothing."""

    def fits(n_bytes: int) -> bool:
        return 16 + 8 + 8 * n_bytes + 16 <= bit_capacity

    if record.project_id is not None:
        tail = record.stack_tail[:_MAX_STACK_IDS]
        for k in range(len(tail), -1, -1):
            n = 2 * _ID_BYTES + k * _ID_BYTES
            if fits(n):
                parts = [record.install_id.bytes, record.project_id.bytes]
                parts.extend(u.bytes for u in tail[:k])
                return b"".join(parts)
    if fits(_ID_BYTES):
        return record.install_id.bytes
    return None


def embed(visible_text: str, record: StegoRecord) -> str:
    """Watermark a copy, repeating the frame until the gaps are exhausted.

    Texts too short for even the minimal frame are returned unchanged
    (the copy is untrackable). Stripping all U+200B recovers the input.
    """
    if ZWSP in visible_text:
        raise ValueError("text already contains zero-width spaces; strip before embedding")
    gaps = capacity(visible_text)
    payload = _choose_payload(record, gaps)
    if payload is None:
        return visible_text
    frame = _frame_bits(payload)
    channel = (frame * (gaps // len(frame) + 1))[:gaps]
    out = [visible_text[0]]
    for bit, ch in zip(channel, visible_text[1:]):
        if bit == "1":
            out.append(ZWSP)
        out.append(ch)
    return "".join(out)


def _gap_bits(text: str) -> str:
    # Visible runs separated by >= 1 ZWSP: zeros inside a run, a one at
    # each join. Leading/trailing/stacked ZWSPs carry no extra bits.
    runs = [seg for seg in text.split(ZWSP) if seg]
    if not runs:
        return ""
    parts = ["0" * (len(runs[0]) - 1)]
    for seg in runs[1:]:
        parts.append("1")
        parts.append("0" * (len(seg) - 1))
    return "".join(parts)


def _record_from_payload(payload: bytes) -> StegoRecord | None:
    if len(payload) < _ID_BYTES or len(payload) % _ID_BYTES != 0:
        return None
    chunks = [payload[i : i + _ID_BYTES] for i in range(0, len(payload), _ID_BYTES)]
    return StegoRecord(
        install_id=uuid.UUID(bytes=chunks[0]),
        project_id=uuid.UUID(bytes=chunks[1]) if len(chunks) > 1 else None,
        stack_tail=tuple(uuid.UUID(bytes=c) for c in chunks[2:]),
    )


def _try_frame(bits: str, i: int) -> StegoRecord | None:
    if i + 24 > len(bits):
        return None
    length = int(bits[i + 16 : i + 24], 2)
    if length < _ID_BYTES or length % _ID_BYTES != 0:
        return None
    end = i + 24 + 8 * length + 16
    if end > len(bits):
        return None
    payload = int(bits[i + 24 : end - 16], 2).to_bytes(length, "big")
    if crc16_ccitt(bytes([length]) + payload) != int(bits[end - 16 : end], 2):
        return None
    return _record_from_payload(payload)


def extract(text: str) -> Extraction:
    """Decode every validating frame in the gap channel, at any bit offset.

    Off-by-anything slices still decode: the scan does not assume frame
    alignment. A channel with no validating frame yields verdict "none";
    nothing here ever raises on malformed input.
    """
    bits = _gap_bits(text)
    records: list[StegoRecord] = []
    seen: set[StegoRecord] = set()
    pos = 0
    while True:
        i = bits.find(SYNC_BITS, pos)
        if i == -1:
            break
        rec = _try_frame(bits, i)
        if rec is not None and rec not in seen:
            seen.add(rec)
            records.append(rec)
        pos = i + 1
    return Extraction(records=tuple(records), verdict="decoded" if records else "none")
