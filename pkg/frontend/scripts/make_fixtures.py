#!/usr/bin/env python3
"""Regenerate the dashboard test fixtures from a deterministic cohort.

Produces fixtures/report.json plus one replay export per submission file
(stride 1, so every event's snapshot is present for the parity tests).
Requires the copytrace package to be installed (pip install -e ..).
"""
import shutil
import tempfile
from pathlib import Path

from copytrace import analyzer
from copytrace.cli import main as cli_main
from copytrace.report import render_structured
from copytrace.scenarios import SUBMISSIONS_DIR, generate

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
KIND = "p2p"
SEED = 7


def run() -> None:
    replay_dir = FIXTURES / "replay"
    if replay_dir.exists():
        shutil.rmtree(replay_dir)
    replay_dir.mkdir(parents=True)

    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "cohort"
        generate(KIND, SEED, out)
        submissions = out / SUBMISSIONS_DIR
        report = analyzer.analyze(analyzer.ingest(submissions))
        (FIXTURES / "report.json").write_text(render_structured(report), encoding="utf-8")

        for source in sorted(submissions.rglob("*.src")):
            label = source.parent.name
            target = replay_dir / f"{label}__{source.name}.json"
            code = cli_main(["replay", "export", str(source), "--out", str(target)])
            if code != 0:
                raise SystemExit(f"replay export failed for {source}")
            print(f"wrote {target.relative_to(FIXTURES.parent)}")
    print(f"wrote {(FIXTURES / 'report.json').relative_to(FIXTURES.parent)}")


if __name__ == "__main__":
    run()
