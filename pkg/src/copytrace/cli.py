"""Command-line interface.

Exit codes: 0 = ran clean, 1 = error, 2 = analysis flagged plagiarism
(so CI-style wrappers can branch on the result).
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import uuid
from pathlib import Path

from . import analyzer, metacomment, report, scenarios, scripts, stego
from .identity import CorruptIdentityError, load_or_create_install_id
from .session import ClipboardPayload, ManualClock, Session, replay_snapshots

REPLAY_EXPORT_VERSION = 1


def _read_text_arg(args) -> str:
    if getattr(args, "text", None) is not None:
        return args.text
    return Path(args.file).read_text(encoding="utf-8")


def _write_out(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_init(args) -> int:
    Path(args.machine).mkdir(parents=True, exist_ok=True)
    install = load_or_create_install_id(Path(args.machine))
    print(install)
    return 0


def _cmd_run(args) -> int:
    rng = random.Random(args.seed) if args.seed is not None else None
    saved = scripts.run_script(
        Path(args.script).read_text(encoding="utf-8"),
        machine_dir=args.machine,
        project_dir=args.project,
        clock=ManualClock(),
        rng=rng,
    )
    for path in sorted(saved):
        print(f"saved {path}")
    return 0


def _cmd_copy(args) -> int:
    text = Path(args.source).read_text(encoding="utf-8")
    session = Session.open_file(args.machine, text)
    payload = session.copy(args.start, args.end)
    _write_out(payload.text, args.out)
    return 0


def _cmd_paste(args) -> int:
    target = Path(args.target)
    session = Session.open_file(args.machine, target.read_text(encoding="utf-8"))
    clip = args.text if args.text is not None else Path(getattr(args, "from")).read_text(encoding="utf-8")
    session.paste(ClipboardPayload(text=clip, source_tag="cli"), args.offset)
    rendered = session.save()
    _write_out(rendered, args.out if args.out else str(target))
    return 0


def _cmd_encode(args) -> int:
    record = stego.StegoRecord(
        install_id=uuid.UUID(args.install),
        project_id=uuid.UUID(args.project) if args.project else None,
        stack_tail=tuple(uuid.UUID(s) for s in args.stack_id),
    )
    _write_out(stego.embed(_read_text_arg(args), record), args.out)
    return 0


def _cmd_decode(args) -> int:
    extraction = stego.extract(_read_text_arg(args))
    doc = {
        "verdict": extraction.verdict,
        "records": [
            {
                "install_id": str(r.install_id),
                "project_id": str(r.project_id) if r.project_id else None,
                "stack_tail": [str(u) for u in r.stack_tail],
            }
            for r in extraction.records
        ],
    }
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_analyze(args) -> int:
    known = analyzer.load_known_machines(args.known_machines) if args.known_machines else ()
    cohort = analyzer.ingest(args.directory)
    result = analyzer.analyze(cohort, known_machines=known)
    rendered = (
        report.render_structured(result) if args.format == "structured" else report.render_human(result)
    )
    _write_out(rendered, args.out)
    flagged = any(
        sub.verdict in ("plagiarism_detected", "likely_plagiarized") for sub in result.submissions
    )
    return 2 if flagged else 0


def _cmd_scenario_gen(args) -> int:
    manifest = scenarios.generate(args.kind, args.seed, args.out, students=args.students)
    print(f"generated {args.kind} cohort (seed {args.seed}) in {args.out}")
    print(f"submissions: {len(manifest['expected'])}")
    return 0


def _cmd_replay_export(args) -> int:
    text = Path(args.source).read_text(encoding="utf-8")
    body, meta, diagnostics = metacomment.parse(text)
    if meta is None:
        print("file has no metaComment; nothing to replay", file=sys.stderr)
        return 1
    snapshots = []
    for seq, buffer in replay_snapshots(meta.events):
        if args.stride <= 1 or seq % args.stride == 0 or seq == len(meta.events) - 1:
            snapshots.append({"seq": seq, "buffer": buffer})
    doc = {
        "replay_version": REPLAY_EXPORT_VERSION,
        "file": Path(args.source).name,
        "install_id": str(meta.install_id),
        "project_id": str(meta.project_id),
        "diagnostics": diagnostics,
        "infection_stack": [e.to_dict() for e in meta.infection_stack],
        "events": [e.to_dict() for e in meta.events],
        "snapshots": snapshots,
        "final_buffer": body,
    }
    _write_out(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copytrace",
        description="Code provenance forensics: watermark copies, log edits, trace paste origins.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create or show a machine identity")
    p.add_argument("machine", help="machine state directory")
    p.set_defaults(func=_cmd_init)

    p = sub.add_parser("run", help="run an edit script against a project directory")
    p.add_argument("script")
    p.add_argument("--machine", required=True, help="machine state directory")
    p.add_argument("--project", required=True, help="project directory for file I/O")
    p.add_argument("--seed", type=int, help="seed identifier minting for reproducible output")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("copy", help="copy a range from a tracked file; prints watermarked text")
    p.add_argument("source")
    p.add_argument("start", type=int)
    p.add_argument("end", type=int)
    p.add_argument("--machine", required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(func=_cmd_copy)

    p = sub.add_parser("paste", help="paste text into a tracked file and save it")
    p.add_argument("target")
    p.add_argument("offset", type=int)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text")
    src.add_argument("--from", dest="from")
    p.add_argument("--machine", required=True)
    p.add_argument("-o", "--out", help="write result here instead of overwriting the target")
    p.set_defaults(func=_cmd_paste)

    p = sub.add_parser("encode", help="embed a provenance record into text (stego utility)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text")
    src.add_argument("--file")
    p.add_argument("--install", required=True)
    p.add_argument("--project")
    p.add_argument("--stack-id", action="append", default=[])
    p.add_argument("-o", "--out")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="extract provenance records from text (stego utility)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text")
    src.add_argument("--file")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("analyze", help="analyze a directory of student submissions")
    p.add_argument("directory")
    p.add_argument("--known-machines", help="file listing known shared machine ids, one per line")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("structured", "human"), default="human")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("scenario", help="scenario utilities")
    scen = p.add_subparsers(dest="scenario_command", required=True)
    g = scen.add_parser("gen", help="generate a ground-truth cohort")
    g.add_argument("--kind", required=True, choices=scenarios.SCENARIO_KINDS)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--students", type=int, default=5, help="cohort size (organic only)")
    g.set_defaults(func=_cmd_scenario_gen)

    p = sub.add_parser("replay", help="replay utilities")
    rep = p.add_subparsers(dest="replay_command", required=True)
    e = rep.add_parser("export", help="dump a file's event timeline and buffer snapshots")
    e.add_argument("source")
    e.add_argument("--out")
    e.add_argument("--stride", type=int, default=1, help="keep every Nth snapshot (last always kept)")
    e.set_defaults(func=_cmd_replay_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, CorruptIdentityError, scripts.ScriptError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
