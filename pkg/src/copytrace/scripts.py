"""Line-oriented edit scripts: a reproducible way to drive a session.

One command per line. String arguments are JSON string literals, so text
with newlines or quotes stays on one script line. Blank lines and lines
starting with # are skipped.

    CLOCK 1700000000000
    OPEN new "hw1"              (or: OPEN file "main.src")
    TYPE 0 "int x = 1;\\n"
    DELETE 4 3
    COPY 0 10                   (optional slot name, optional TO "clip.txt")
    CUT 0 4
    PASTE 10 SLOT clip          (or: PASTE 10 TEXT "..." / PASTE 10 FILE "clip.txt")
    SAVE "main.src"

COPY/CUT fill a named clipboard slot (default "clip"); TO also writes the
watermarked clipboard text to a file so a later script on another machine
can PASTE ... FILE it.
"""
from __future__ import annotations

import json
import random
from pathlib import Path

from .session import ClipboardPayload, Clock, ManualClock, Session


class ScriptError(Exception):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_DECODER = json.JSONDecoder()


def _tokenize(line: str, lineno: int) -> list:
    tokens = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        if line[i] == '"':
            try:
                value, end = _DECODER.raw_decode(line, i)
            except ValueError as exc:
                raise ScriptError(lineno, f"bad string literal: {exc}") from exc
            if not isinstance(value, str):
                raise ScriptError(lineno, "expected a string literal")
            tokens.append(value)
            i = end
        else:
            j = i
            while j < len(line) and not line[j].isspace():
                j += 1
            tokens.append(line[i:j])
            i = j
    return tokens


def _int_arg(tokens: list, idx: int, lineno: int, what: str) -> int:
    try:
        return int(tokens[idx])
    except (IndexError, ValueError):
        raise ScriptError(lineno, f"expected integer {what}") from None


class ScriptRunner:
    """Executes one script against one machine/project directory pair."""

    def __init__(
        self,
        machine_dir: str | Path,
        project_dir: str | Path,
        clock: Clock | None = None,
        rng: random.Random | None = None,
    ):
        self.machine_dir = Path(machine_dir)
        self.project_dir = Path(project_dir)
        self.clock = clock if clock is not None else ManualClock()
        self.rng = rng
        self.session: Session | None = None
        self.slots: dict[str, ClipboardPayload] = {}
        self.saved: dict[str, str] = {}

    def _need_session(self, lineno: int) -> Session:
        if self.session is None:
            raise ScriptError(lineno, "no session: OPEN must come first")
        return self.session

    def run(self, script_text: str) -> dict[str, str]:
        for lineno, raw in enumerate(script_text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = _tokenize(line, lineno)
            command = tokens[0]
            try:
                self._execute(command, tokens, lineno)
            except ScriptError:
                raise
            except (ValueError, OSError) as exc:
                raise ScriptError(lineno, str(exc)) from exc
        return dict(self.saved)

    def _execute(self, command: str, tokens: list, lineno: int) -> None:
        if command == "CLOCK":
            ms = _int_arg(tokens, 1, lineno, "milliseconds")
            if isinstance(self.clock, ManualClock):
                self.clock.set(ms)
            else:
                raise ScriptError(lineno, "CLOCK requires a manual clock")
        elif command == "OPEN":
            if self.session is not None:
                raise ScriptError(lineno, "session already open; one OPEN per script")
            if len(tokens) < 3:
                raise ScriptError(lineno, "usage: OPEN new <name> | OPEN file <path>")
            mode, arg = tokens[1], tokens[2]
            if mode == "new":
                self.session = Session.create(self.machine_dir, arg, clock=self.clock, rng=self.rng)
            elif mode == "file":
                text = (self.project_dir / arg).read_text(encoding="utf-8")
                self.session = Session.open_file(self.machine_dir, text, clock=self.clock, rng=self.rng)
            else:
                raise ScriptError(lineno, f"unknown OPEN mode {mode!r}")
        elif command == "TYPE":
            offset = _int_arg(tokens, 1, lineno, "offset")
            if len(tokens) < 3:
                raise ScriptError(lineno, "usage: TYPE <offset> <text>")
            self._need_session(lineno).type_text(offset, tokens[2])
        elif command == "DELETE":
            offset = _int_arg(tokens, 1, lineno, "offset")
            length = _int_arg(tokens, 2, lineno, "length")
            self._need_session(lineno).delete_text(offset, length)
        elif command in ("COPY", "CUT"):
            start = _int_arg(tokens, 1, lineno, "start")
            end = _int_arg(tokens, 2, lineno, "end")
            rest = tokens[3:]
            slot = "clip"
            to_path = None
            if rest and rest[0] != "TO":
                slot = rest.pop(0)
            if rest:
                if rest[0] != "TO" or len(rest) < 2:
                    raise ScriptError(lineno, "usage: COPY <start> <end> [slot] [TO <path>]")
                to_path = rest[1]
            session = self._need_session(lineno)
            payload = session.copy(start, end) if command == "COPY" else session.cut(start, end)
            self.slots[slot] = payload
            if to_path is not None:
                target = self.project_dir / to_path
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(payload.text, encoding="utf-8")
        elif command == "PASTE":
            offset = _int_arg(tokens, 1, lineno, "offset")
            if len(tokens) < 4:
                raise ScriptError(lineno, "usage: PASTE <offset> SLOT|TEXT|FILE <arg>")
            source, arg = tokens[2], tokens[3]
            if source == "SLOT":
                if arg not in self.slots:
                    raise ScriptError(lineno, f"empty clipboard slot {arg!r}")
                payload = self.slots[arg]
            elif source == "TEXT":
                payload = ClipboardPayload(text=arg, source_tag="script literal")
            elif source == "FILE":
                payload = ClipboardPayload(
                    text=(self.project_dir / arg).read_text(encoding="utf-8"),
                    source_tag=f"script file {arg}",
                )
            else:
                raise ScriptError(lineno, f"unknown PASTE source {source!r}")
            self._need_session(lineno).paste(payload, offset)
        elif command == "SAVE":
            if len(tokens) < 2:
                raise ScriptError(lineno, "usage: SAVE <path>")
            session = self._need_session(lineno)
            rendered = session.save()
            target = self.project_dir / tokens[1]
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(rendered, encoding="utf-8")
            self.saved[tokens[1]] = rendered
        else:
            raise ScriptError(lineno, f"unknown command {command!r}")


def run_script(
    script_text: str,
    machine_dir: str | Path,
    project_dir: str | Path,
    clock: Clock | None = None,
    rng: random.Random | None = None,
) -> dict[str, str]:
    """Run a script; returns {relative path: rendered text} for every SAVE."""
    runner = ScriptRunner(machine_dir, project_dir, clock=clock, rng=rng)
    return runner.run(script_text)
