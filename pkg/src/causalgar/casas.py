"""Loader for public smart-home datasets in the common ambient-sensor line
format: `date time sensor value [activity [begin|end]]`.

The loader builds a source registry from the data itself: a sensor whose
values all parse as numbers becomes a pervasive sensor with a median-split
level threshold, anything else an actuator over its observed values. Activity
annotations in both styles are understood (begin/end markers delimiting an
episode, or a bare per-line label forming episodes from consecutive runs),
and user-id prefixes such as ``R1_`` on activity names are stripped so
episodes are anonymous.
"""

from __future__ import annotations

import re
import statistics
from datetime import datetime
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ParseError
from .events import (Corpus, RawRecord, SmartObjectKind, SourceRegistry,
                     SourceSpec, convert_streams)

_USER_PREFIX = re.compile(r"^[Rr]\d+[._]?")
_NON_IDENT = re.compile(r"[^A-Za-z0-9_]")


def _sanitize(token: str) -> str:
    clean = _NON_IDENT.sub("_", token)
    return clean or "X"


def _strip_user(activity: str) -> str:
    return _USER_PREFIX.sub("", activity) or activity


def _parse_timestamp(path, lineno: int, date: str, time_of_day: str) -> int:
    try:
        dt = datetime.fromisoformat(f"{date} {time_of_day}")
    except ValueError:
        raise ParseError(path, lineno,
                         f"bad timestamp {date!r} {time_of_day!r}") from None
    return int(dt.timestamp() * 1000)


def parse_sensor_lines(lines: Iterable[str], path="<memory>",
                       ) -> list[tuple[int, str, str, str | None, str | None]]:
    """Rows of (timestamp_ms, sensor, value, activity, marker). marker is
    'begin'/'end' when present, activity already user-id-stripped."""
    rows = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 4:
            raise ParseError(path, lineno,
                             f"expected at least 4 fields, got {len(parts)}")
        ts = _parse_timestamp(path, lineno, parts[0], parts[1])
        sensor, value = parts[2], parts[3]
        activity: str | None = None
        marker: str | None = None
        if len(parts) >= 5:
            tail = parts[4:]
            if tail[-1].lower() in ("begin", "end"):
                marker = tail[-1].lower()
                tail = tail[:-1]
            if tail:
                activity = _strip_user("_".join(tail))
        rows.append((ts, sensor, value, activity, marker))
    return rows


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def build_registry(rows: Sequence[tuple[int, str, str, str | None, str | None]],
                   ) -> SourceRegistry:
    observed: dict[str, list[str]] = {}
    for _, sensor, value, _, _ in rows:
        observed.setdefault(sensor, []).append(value)
    specs = []
    for sensor in sorted(observed):
        values = observed[sensor]
        sid = _sanitize(sensor)
        context = _sanitize(re.match(r"[A-Za-z]*", sensor).group() or sensor)
        if all(_is_number(v) for v in values):
            numbers = sorted(float(v) for v in values)
            threshold = statistics.median(numbers)
            specs.append(SourceSpec(sid, SmartObjectKind.PERVASIVE_SENSOR,
                                    context, sid, thresholds=(threshold,)))
        else:
            distinct = tuple(sorted({_sanitize(v) for v in values}))
            specs.append(SourceSpec(sid, SmartObjectKind.ACTUATOR, context,
                                    f"{sid}_", values=distinct))
    return SourceRegistry(tuple(specs))


def _segment_episodes(rows: Sequence[tuple[int, str, str, str | None, str | None]],
                      ) -> list[tuple[str, list[tuple[int, str, str]]]]:
    """(activity, records) segments from either annotation style."""
    has_markers = any(marker for _, _, _, _, marker in rows)
    segments: list[tuple[str, list[tuple[int, str, str]]]] = []
    if has_markers:
        open_runs: dict[str, list[tuple[int, str, str]]] = {}
        for ts, sensor, value, activity, marker in rows:
            record = (ts, sensor, value)
            if marker == "begin" and activity:
                open_runs[activity] = [record]
            elif marker == "end" and activity:
                run = open_runs.pop(activity, None)
                if run is not None:
                    run.append(record)
                    segments.append((activity, run))
            else:
                for run in open_runs.values():
                    run.append(record)
        return segments
    current: str | None = None
    run: list[tuple[int, str, str]] = []
    for ts, sensor, value, activity, _ in rows:
        if activity != current:
            if current is not None and run:
                segments.append((current, run))
            current = activity
            run = []
        if activity is not None:
            run.append((ts, sensor, value))
    if current is not None and run:
        segments.append((current, run))
    return segments


def load_sensor_file(path) -> list[tuple[int, str, str, str | None, str | None]]:
    text = Path(path).read_text(encoding="utf-8", errors="replace")
    return parse_sensor_lines(text.splitlines(), path)


def load_dataset(paths: Sequence, window: int = 5) -> Corpus:
    """Build a labeled corpus from one or more annotated sensor files."""
    rows: list[tuple[int, str, str, str | None, str | None]] = []
    for path in paths:
        rows.extend(load_sensor_file(path))
    rows.sort(key=lambda r: r[0])
    registry = build_registry(rows)
    episodes: dict[str, list] = {}
    for activity, records in _segment_episodes(rows):
        raw = [RawRecord(_sanitize(sensor),
                         _sanitize(value) if not _is_number(value) else value,
                         ts)
               for ts, sensor, value in records]
        episode = convert_streams(raw, registry, window, ga_label=activity)
        episodes.setdefault(activity, []).append(episode)
    return Corpus(registry,
                  {ga: tuple(eps) for ga, eps in sorted(episodes.items())})


def load_dataset_dir(directory, window: int = 5) -> Corpus:
    root = Path(directory)
    paths = sorted(p for p in root.iterdir()
                   if p.is_file() and not p.name.startswith("."))
    if not paths:
        raise ParseError(root, 0, "no data files in directory")
    return load_dataset(paths, window)
