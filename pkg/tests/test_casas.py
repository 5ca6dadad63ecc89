"""Ambient smart-home dataset loading."""

import pytest

from causalgar import ParseError, SmartObjectKind
from causalgar.casas import (
    build_registry,
    load_dataset,
    load_dataset_dir,
    parse_sensor_lines,
)

MARKER_LINES = [
    "2009-06-10 08:45:00.000000 M01 ON Meeting begin",
    "2009-06-10 08:45:05.000000 M02 ON",
    "2009-06-10 08:45:09.000000 A1 42.5",
    "2009-06-10 08:46:00.000000 M01 OFF Meeting end",
    "2009-06-10 09:00:00.000000 M02 OFF Cleanup begin",
    "2009-06-10 09:01:00.000000 A1 17.0",
    "2009-06-10 09:02:00.000000 M02 ON Cleanup end",
]

BARE_LINES = [
    "2009-06-10 08:45:00.000000 M01 ON R1.Meeting",
    "2009-06-10 08:45:30.000000 M01 OFF R1.Meeting",
    "2009-06-10 08:46:00.000000 M01 ON r2_Cleanup",
    "2009-06-10 08:47:00.000000 M01 OFF r2_Cleanup",
    "2009-06-10 08:48:00.000000 M01 ON R1.Meeting",
    "2009-06-10 08:48:30.000000 M01 OFF R1.Meeting",
]


def test_marker_lines_parse():
    rows = parse_sensor_lines(MARKER_LINES)
    assert rows[0][1:] == ("M01", "ON", "Meeting", "begin")
    assert rows[1][3:] == (None, None)
    assert rows[3][3:] == ("Meeting", "end")
    assert rows[0][0] < rows[1][0] < rows[2][0]


def test_comments_and_blanks_are_skipped():
    rows = parse_sensor_lines(["# header", "", *MARKER_LINES[:1]])
    assert len(rows) == 1


def test_multiword_activity_and_user_prefix():
    rows = parse_sensor_lines(
        ["2009-06-10 08:45:00 M01 ON R1.Watch TV begin"])
    assert rows[0][3] == "Watch_TV"
    assert rows[0][4] == "begin"
    bare = parse_sensor_lines(BARE_LINES)
    assert {r[3] for r in bare} == {"Meeting", "Cleanup"}


def test_short_line_raises_with_position():
    with pytest.raises(ParseError) as exc:
        parse_sensor_lines(["2009-06-10 08:45:00 M01"], path="feed.txt")
    assert exc.value.line == 1
    assert "feed.txt" in str(exc.value)


def test_bad_timestamp_raises():
    with pytest.raises(ParseError):
        parse_sensor_lines(["someday 08:45:00 M01 ON"])


def test_registry_kinds_follow_value_shapes():
    rows = parse_sensor_lines(MARKER_LINES)
    registry = build_registry(rows)
    m01 = registry.specs["M01"]
    assert m01.kind is SmartObjectKind.ACTUATOR
    assert set(m01.labels()) == {"M01_ON", "M01_OFF"}
    a1 = registry.specs["A1"]
    assert a1.kind is SmartObjectKind.PERVASIVE_SENSOR
    # median of 42.5 and 17.0
    assert a1.thresholds == (29.75,)
    assert a1.labels() == ("A1_Level1", "A1_Level2")


def test_marker_dataset_yields_labeled_episodes(tmp_path):
    data = tmp_path / "day1.txt"
    data.write_text("".join(line + "\n" for line in MARKER_LINES))
    corpus = load_dataset([data], window=1)
    assert corpus.activity_names() == ("Cleanup", "Meeting")
    meeting = corpus.episodes["Meeting"][0]
    assert meeting.ga_label == "Meeting"
    labels = {e.label for e in meeting.events}
    assert "M01_ON" in labels
    # the mid-episode M02 reading lands inside the open Meeting run
    assert any(l.startswith("M02") for l in labels)


def test_bare_label_dataset_segments_consecutive_runs(tmp_path):
    data = tmp_path / "day1.txt"
    data.write_text("".join(line + "\n" for line in BARE_LINES))
    corpus = load_dataset([data], window=1)
    assert corpus.activity_names() == ("Cleanup", "Meeting")
    assert len(corpus.episodes["Meeting"]) == 2
    assert len(corpus.episodes["Cleanup"]) == 1


def test_multi_file_dataset_merges_by_timestamp(tmp_path):
    (tmp_path / "a.txt").write_text(
        "".join(line + "\n" for line in MARKER_LINES[:4]))
    (tmp_path / "b.txt").write_text(
        "".join(line + "\n" for line in MARKER_LINES[4:]))
    merged = load_dataset_dir(tmp_path, window=1)
    single = load_dataset([tmp_path / "a.txt", tmp_path / "b.txt"], window=1)
    assert merged.activity_names() == single.activity_names() == (
        "Cleanup", "Meeting")
    assert merged.episodes == single.episodes


def test_empty_directory_rejected(tmp_path):
    with pytest.raises(ParseError):
        load_dataset_dir(tmp_path)
