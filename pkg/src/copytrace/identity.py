"""Machine and project identities.

A "machine" is modelled as a state directory holding a persistent
`install_id` file, so tests and scenario generators can simulate many
machines on one host. Project identities are minted once, at creation,
and never regenerated.
"""
from __future__ import annotations

import random
import uuid
from pathlib import Path

from .model import InstallId, MetaComment, parse_id, render_id

INSTALL_ID_FILENAME = "install_id"


class CorruptIdentityError(Exception):
    """The persistent identity file exists but does not parse.

    Never silently regenerate: the machine identity is assumed constant,
    and replacing it would detach every file authored on that machine.
    """


def _new_uuid(rng: random.Random | None) -> uuid.UUID:
    if rng is None:
        return uuid.uuid4()
    return uuid.UUID(int=rng.getrandbits(128), version=4)


def load_or_create_install_id(machine_state_dir: str | Path, rng: random.Random | None = None) -> InstallId:
    """Return the machine's identity, minting and persisting one on first use.

    Idempotent: repeat calls on the same directory return the same value.
    A malformed identity file is a hard error.
    """
    directory = Path(machine_state_dir)
    if not directory.is_dir():
        raise FileNotFoundError(f"machine state directory does not exist: {directory}")
    path = directory / INSTALL_ID_FILENAME
    if path.exists():
        try:
            raw = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise CorruptIdentityError(f"corrupt identity file {path}: {exc}") from exc
        line = raw[:-1] if raw.endswith("\n") else raw
        if raw != line + "\n":
            raise CorruptIdentityError(f"corrupt identity file {path}: missing trailing newline")
        try:
            return parse_id(line)
        except ValueError as exc:
            raise CorruptIdentityError(f"corrupt identity file {path}: {exc}") from exc
    install = _new_uuid(rng)
    path.write_text(render_id(install) + "\n", encoding="utf-8")
    return install


def new_project(install: InstallId, name: str, rng: random.Random | None = None) -> MetaComment:
    """Create a project record: fresh ProjectId, empty stack and event log."""
    if not name:
        raise ValueError("project name must be non-empty")
    return MetaComment(install_id=install, project_id=_new_uuid(rng))
