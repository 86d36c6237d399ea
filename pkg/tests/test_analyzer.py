import pytest

from _support import Rig, build_threshold_cohort, padded_lines

from copytrace import analyzer
from copytrace.report import parse_structured, render_human, render_structured
from copytrace.session import ClipboardPayload, Session


@pytest.fixture
def rig(tmp_path):
    return Rig(tmp_path)


@pytest.fixture
def cohort_dir(tmp_path):
    d = tmp_path / "cohort"
    d.mkdir()
    return d


def _organic(rig, cohort_dir, label, lines=6):
    session = rig.session()
    session.type_text(0, padded_lines(lines, 30))
    rig.submit(cohort_dir, label, "main.src", session.save())
    return session


def test_ingest_organic_cohort(rig, cohort_dir):
    for label in ("ann", "bob", "cid"):
        _organic(rig, cohort_dir, label)
    cohort = analyzer.ingest(cohort_dir)
    assert [s.label for s in cohort] == ["ann", "bob", "cid"]
    assert all(s.files[0].meta is not None for s in cohort)


def test_ingest_plain_file_and_blank_dir(rig, cohort_dir):
    rig.submit(cohort_dir, "norma", "main.src", "plain text, never opened\n")
    (cohort_dir / "empty_kid").mkdir()
    cohort = analyzer.ingest(cohort_dir)
    by_label = {s.label: s for s in cohort}
    assert by_label["norma"].files[0].meta is None
    assert by_label["empty_kid"].files == []
    assert by_label["empty_kid"].diagnostics

    report = analyzer.analyze(cohort)
    assert report.submission("norma").verdict == "no_metacomment"
    assert report.submission("empty_kid").verdict == "no_metacomment"
    assert any(s.kind == "no_metacomment" for s in report.submission("norma").signals)
    assert any(s.kind == "blank_submission" for s in report.submission("empty_kid").signals)


def test_ingest_missing_directory():
    with pytest.raises(FileNotFoundError):
        analyzer.ingest("/nonexistent/cohort/path")


def test_graph_duplicate_project_is_file_share(rig, cohort_dir):
    session = _organic(rig, cohort_dir, "author", lines=8)
    rig.submit(cohort_dir, "mirror", "main.src", session.save())
    graph = analyzer.build_graph(analyzer.ingest(cohort_dir))
    assert len(graph.file_shares) == 1
    share = graph.file_shares[0]
    assert {share.label_a, share.label_b} == {"author", "mirror"}
    assert share.common_prefix == share.events_a == share.events_b


def test_graph_shared_machine(rig, cohort_dir):
    lab = rig.machine("lab")
    for label in ("kay", "lee"):
        session = rig.session(lab, name=f"{label} work")
        session.type_text(0, padded_lines(4, 30))
        rig.submit(cohort_dir, label, "main.src", session.save())
    graph = analyzer.build_graph(analyzer.ingest(cohort_dir))
    assert len(graph.shared_installs) == 1


def test_graph_disjoint_cohort_has_no_cross_edges(rig, cohort_dir):
    for label in ("pia", "quinn"):
        _organic(rig, cohort_dir, label)
    graph = analyzer.build_graph(analyzer.ingest(cohort_dir))
    assert graph.file_shares == []
    assert graph.shared_installs == frozenset()
    assert graph.infected_by == []
    assert graph.pasted_from == []


def test_graph_materializes_infection_and_paste_edges(rig, cohort_dir):
    author = rig.session()
    author.type_text(0, padded_lines(10, 40))
    payload = author.copy(0, len(author.buffer))
    rig.submit(cohort_dir, "giver", "main.src", author.save())
    taker = rig.session()
    taker.paste(payload, 0)
    rig.submit(cohort_dir, "taker", "main.src", taker.save())

    graph = analyzer.build_graph(analyzer.ingest(cohort_dir))
    assert len(graph.infected_by) == 1
    edge = graph.infected_by[0]
    assert edge.label == "taker"
    assert edge.kind == "paste_foreign"
    assert edge.install_id == author.install_id
    assert len(graph.pasted_from) == 1
    paste = graph.pasted_from[0]
    assert paste.origin_kind == "foreign"
    assert paste.project_id == author.meta.project_id
    assert paste.event_seq == edge.event_seq


def test_threshold_boundaries(rig, cohort_dir):
    expectations = build_threshold_cohort(rig, cohort_dir)
    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    for label, expected in expectations.items():
        sub = report.submission(label)
        assert sub.verdict == expected["verdict"], label
        assert sorted({f.category for f in sub.flags}) == expected["categories"], label


def test_scripted_p2p_counts_edits_after(rig, cohort_dir):
    author = rig.session()
    author.type_text(0, padded_lines(80, 40))
    payload = author.copy(0, len(author.buffer))
    rig.submit(cohort_dir, "yve", "main.src", author.save())

    copier = rig.session()
    copier.paste(payload, 0)
    for i in range(5):
        copier.type_text(i, "z")
    rig.submit(cohort_dir, "xan", "main.src", copier.save())

    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    xan = report.submission("xan")
    assert xan.verdict == "plagiarism_detected"
    assert xan.flags[0].category == "foreign_turned_in"
    assert xan.flags[0].cross_refs == ("yve",)
    assert xan.flags[0].line_count == 80
    assert xan.flags[0].excerpt  # pasted code logged for human validation
    assert xan.edits_after_last_flag == 5

    yve = report.submission("yve")
    assert yve.verdict == "no_plagiarism_detected"
    assert any(s.kind == "appears_as_origin" for s in yve.signals)


def test_verbatim_copy_flags_both_with_zero_edits(rig, cohort_dir):
    session = rig.session()
    session.type_text(0, padded_lines(12, 40))
    saved = session.save()
    rig.submit(cohort_dir, "orig", "main.src", saved)
    rig.submit(cohort_dir, "dupe", "main.src", saved)
    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    for label in ("orig", "dupe"):
        sub = report.submission(label)
        assert sub.verdict == "plagiarism_detected"
        assert sub.flags[0].category == "file_shared"
        assert sub.edits_after_last_flag == 0
    human = render_human(report)
    assert "Copied Directly from orig" in human


def test_edited_copy_flags_only_the_extender(rig, cohort_dir):
    machine_a, machine_b = rig.machine(), rig.machine()
    author = rig.session(machine_a)
    author.type_text(0, padded_lines(10, 40))
    saved = author.save()
    rig.submit(cohort_dir, "writer", "main.src", saved)

    stolen = Session.open_file(machine_b, saved, clock=rig.clock, rng=rig.rng)
    stolen.type_text(0, "// my header\n")
    stolen.delete_text(20, 2)
    stolen.type_text(5, "y")
    rig.submit(cohort_dir, "taker", "main.src", stolen.save())

    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    taker = report.submission("taker")
    assert taker.verdict == "plagiarism_detected"
    assert taker.flags[0].category == "file_shared"
    assert taker.flags[0].cross_refs == ("writer",)
    # divergence = open event + 3 edits
    assert taker.edits_after_last_flag == 4
    writer = report.submission("writer")
    assert writer.verdict == "no_plagiarism_detected"
    assert any(s.kind == "appears_as_origin" for s in writer.signals)


def test_large_internal_paste_is_likely_plagiarized(rig, cohort_dir):
    session = rig.session()
    session.type_text(0, padded_lines(60, 40))
    payload = session.copy(0, len(session.buffer))
    session.paste(payload, len(session.buffer))
    session.type_text(0, "x")
    rig.submit(cohort_dir, "mel", "main.src", session.save())
    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    mel = report.submission("mel")
    assert mel.verdict == "likely_plagiarized"
    assert mel.flags == []
    assert any(s.kind == "history_destroying_internal_paste" for s in mel.signals)
    assert mel.edits_after_last_flag == 1
    assert "Likely Plagiarized, 1 Edits" in render_human(report)


def test_short_untrackable_pastes_ignored_despite_line_count(rig, cohort_dir):
    session = rig.session()
    session.type_text(0, padded_lines(4, 30))
    # ten lines but far below the 169-char watermark minimum: too short
    # to track, so it cannot be held against the student
    snippet = "\n".join(f"x{i};" for i in range(10))
    assert len(snippet) < 169
    session.paste(ClipboardPayload(text=snippet, source_tag="web"), len(session.buffer))
    rig.submit(cohort_dir, "sam", "main.src", session.save())
    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    assert report.submission("sam").verdict == "no_plagiarism_detected"
    assert report.submission("sam").flags == []


def test_classify_requires_paste_event(rig):
    session = rig.session()
    session.type_text(0, "abc")
    graph = analyzer.build_graph([])
    with pytest.raises(ValueError):
        analyzer.classify_paste(session.events[0], "who", session.meta, graph)


def test_own_ids_via_second_machine_use_same_machine_rules(rig, cohort_dir):
    # the student's own laptop + desktop: a foreign-looking origin whose ids
    # belong to the same submission falls under the 50-line rule
    laptop, desktop = rig.machine(), rig.machine()
    for lines, label, flagged in ((10, "tina_small", False), (60, "tina_large", True)):
        first = rig.session(laptop, name="draft")
        first.type_text(0, padded_lines(lines, 40))
        payload = first.copy(0, len(first.buffer))
        second = Session.open_file(desktop, "", clock=rig.clock, rng=rig.rng)
        second.paste(payload, 0)
        rig.submit(cohort_dir / label, label, "draft.src", first.save())
        rig.submit(cohort_dir / label, label, "final.src", second.save())
        report = analyzer.analyze(analyzer.ingest(cohort_dir / label))
        sub = report.submission(label)
        if flagged:
            assert sub.verdict == "plagiarism_detected"
            assert sub.flags[0].category == "same_machine_other_project"
            assert "another machine" in sub.flags[0].note
        else:
            assert sub.verdict == "no_plagiarism_detected"


def test_known_machines_file_parsing(tmp_path):
    import uuid

    ids = [uuid.uuid4(), uuid.uuid4()]
    listing = tmp_path / "machines.txt"
    listing.write_text(f"# lab machines\n{ids[0]}\n\n{ids[1]}\n", encoding="utf-8")
    assert analyzer.load_known_machines(listing) == tuple(ids)


def test_known_machine_origin_flags_any_size(rig, cohort_dir):
    lab = rig.machine("known_lab")
    outsider = rig.session(lab, name="lab work")
    outsider.type_text(0, padded_lines(2, 110))
    payload = outsider.copy(0, len(outsider.buffer))
    student = rig.session()
    student.type_text(0, padded_lines(3, 30))
    student.paste(payload, len(student.buffer))
    rig.submit(cohort_dir, "stu", "main.src", student.save())

    clean = analyzer.analyze(analyzer.ingest(cohort_dir))
    assert clean.submission("stu").verdict == "no_plagiarism_detected"  # 2 lines, unassociated

    from copytrace.identity import load_or_create_install_id

    lab_id = load_or_create_install_id(lab)
    flagged = analyzer.analyze(analyzer.ingest(cohort_dir), known_machines=(lab_id,))
    stu = flagged.submission("stu")
    assert stu.verdict == "plagiarism_detected"
    assert stu.flags[0].category == "same_machine_other_project"
    assert "known-machines" in stu.flags[0].note


def test_collaboration_signal_for_mutual_pastes(rig, cohort_dir):
    sess_a = rig.session()
    sess_b = rig.session()
    sess_a.type_text(0, padded_lines(6, 40))
    sess_b.type_text(0, padded_lines(6, 40))
    sess_b.paste(sess_a.copy(0, len(sess_a.buffer)), len(sess_b.buffer))
    sess_a.paste(sess_b.copy(0, len(sess_b.buffer)), len(sess_a.buffer))
    rig.submit(cohort_dir, "ami", "main.src", sess_a.save())
    rig.submit(cohort_dir, "ben", "main.src", sess_b.save())
    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    for label in ("ami", "ben"):
        sub = report.submission(label)
        assert sub.verdict == "plagiarism_detected"
        assert any(s.kind == "collaboration_signal" for s in sub.signals)


def test_organic_cohort_is_clean_and_monotone(rig, cohort_dir):
    for label in ("uri", "vic", "wes"):
        _organic(rig, cohort_dir, label)
    before = analyzer.analyze(analyzer.ingest(cohort_dir))
    assert all(s.verdict == "no_plagiarism_detected" for s in before.submissions)

    _organic(rig, cohort_dir, "zed")
    after = analyzer.analyze(analyzer.ingest(cohort_dir))
    for sub in before.submissions:
        assert after.submission(sub.label).verdict == sub.verdict
        assert after.submission(sub.label).flags == sub.flags


def test_external_open_surfaces_signal(rig, cohort_dir):
    session = rig.open(rig.machine(), "downloaded solution\n" * 10)
    rig.submit(cohort_dir, "finder", "main.src", session.save())
    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    finder = report.submission("finder")
    assert finder.verdict == "no_plagiarism_detected"
    assert any(s.kind == "external_file_open" for s in finder.signals)


def test_linear_typing_signal(rig, cohort_dir):
    session = rig.session()
    for i in range(120):
        session.type_text(i, "a")
    rig.submit(cohort_dir, "tess", "main.src", session.save())
    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    tess = report.submission("tess")
    assert tess.typing_linearity == 1.0
    assert any(s.kind == "linear_typing" for s in tess.signals)
    assert "Visible Linear Coding" in render_human(report)


def test_structured_report_round_trip(rig, cohort_dir):
    build_threshold_cohort(rig, cohort_dir)
    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    assert parse_structured(render_structured(report)) == report


def test_report_version_checked():
    with pytest.raises(ValueError, match="version"):
        parse_structured('{"report_version": 99, "submissions": [], "shared_machines": [], "known_machines": []}')


def test_empty_cohort_renders_valid_documents():
    report = analyzer.analyze([])
    assert report.submissions == []
    assert parse_structured(render_structured(report)) == report
    human = render_human(report)
    assert "Student" in human


def test_human_table_has_expected_rows(rig, cohort_dir):
    author = rig.session()
    author.type_text(0, padded_lines(80, 40))
    payload = author.copy(0, len(author.buffer))
    rig.submit(cohort_dir, "first", "main.src", author.save())
    copier = rig.session()
    copier.paste(payload, 0)
    for i in range(35):
        copier.type_text(i, "q")
    rig.submit(cohort_dir, "second", "main.src", copier.save())
    human = render_human(analyzer.analyze(analyzer.ingest(cohort_dir)))
    assert "Plagiarism Detected, 35 Edits" in human
    assert "No Plagiarism Detected" in human
    assert "Records large paste" in human


def test_human_excerpts_truncate_at_200_lines(rig, cohort_dir):
    session = rig.session()
    session.paste(ClipboardPayload(text=padded_lines(250, 20), source_tag="web"), 0)
    rig.submit(cohort_dir, "ines", "main.src", session.save())
    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    flag = report.submission("ines").flags[0]
    assert flag.line_count == 250
    assert flag.excerpt.count("\n") == 249  # structured output is complete
    human = render_human(report)
    assert "more lines in structured report" in human
    shown = human.split("-- external", 1)[1]
    assert "v199" in shown  # the 200th line is the last one kept
    assert "v200 " not in shown


def test_analyze_is_pure_function_of_directory_contents(tmp_path):
    from copytrace.scenarios import SUBMISSIONS_DIR, generate

    renders = []
    for name in ("one", "two"):
        out = tmp_path / name
        generate("collaboration", 6, out)
        report = analyzer.analyze(analyzer.ingest(out / SUBMISSIONS_DIR))
        renders.append(render_structured(report))
    assert renders[0] == renders[1]


def test_binary_file_gets_diagnostic_not_crash(rig, cohort_dir):
    (cohort_dir / "glitch").mkdir()
    (cohort_dir / "glitch" / "main.src").write_bytes(b"\xff\xfe\x00\x01 binary junk")
    report = analyzer.analyze(analyzer.ingest(cohort_dir))
    glitch = report.submission("glitch")
    assert glitch.verdict == "no_metacomment"
    assert any("UTF-8" in d for f in glitch.files for d in f.diagnostics)
