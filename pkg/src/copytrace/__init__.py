"""copytrace: single-source code plagiarism forensics.

Copies made inside the tracked editor carry an invisible zero-width-space
watermark; every file carries a hidden metadata comment with its machine
and project identities, infection stack, and complete edit-event log; a
batch analyzer traces paste origins across a whole class and emits
verdicts for human review.
"""

from .analyzer import (
    PasteClassification,
    Submission,
    SubmissionFile,
    SubmissionGraph,
    analyze,
    build_graph,
    classify_paste,
    ingest,
)
from .identity import CorruptIdentityError, load_or_create_install_id, new_project
from .metacomment import ParseResult, parse, render, strip
from .model import EditEvent, InfectionEntry, MetaComment, PasteOrigin
from .report import Report, parse_structured, render_human, render_structured
from .scenarios import SCENARIO_KINDS, generate, verify_against_manifest
from .session import (
    ClipboardPayload,
    ManualClock,
    ReplayError,
    Session,
    replay,
    replay_snapshots,
    typing_linearity,
)
from .stego import Extraction, StegoRecord, capacity, embed, extract, strip_zwsp

__version__ = "0.1.0"

__all__ = [
    "CorruptIdentityError",
    "ClipboardPayload",
    "EditEvent",
    "Extraction",
    "InfectionEntry",
    "ManualClock",
    "MetaComment",
    "ParseResult",
    "PasteClassification",
    "PasteOrigin",
    "Report",
    "ReplayError",
    "SCENARIO_KINDS",
    "Session",
    "StegoRecord",
    "Submission",
    "SubmissionFile",
    "SubmissionGraph",
    "analyze",
    "build_graph",
    "capacity",
    "classify_paste",
    "embed",
    "extract",
    "generate",
    "ingest",
    "load_or_create_install_id",
    "new_project",
    "parse",
    "parse_structured",
    "render",
    "render_human",
    "render_structured",
    "replay",
    "replay_snapshots",
    "strip",
    "strip_zwsp",
    "typing_linearity",
    "verify_against_manifest",
]
