"""Event model: raw sensor records and their conversion to labeled interval events.

Two kinds of smart object feed the pipeline. Actuators report sparse state
changes ("On", "Off") and each maximal run of one state becomes one event.
Pervasive sensors report a continuous reading; a moving average is mapped to
discrete levels by per-sensor thresholds and each maximal run of one level
becomes one event. Events carry millisecond timestamps and an episode is a
finite, time-sorted collection of them.
"""

from __future__ import annotations

import math
import re
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum

from .errors import NonFiniteValue, UnknownSource, UnknownValue

_IDENT = re.compile(r"^[A-Za-z0-9_]+$")


class SmartObjectKind(Enum):
    ACTUATOR = "Actuator"
    PERVASIVE_SENSOR = "PervasiveSensor"


@dataclass(frozen=True)
class RawRecord:
    """One reading from one source at one millisecond timestamp."""

    source_id: str
    value: str
    timestamp: int

    def __post_init__(self):
        if self.timestamp < 0:
            raise ValueError(f"negative timestamp {self.timestamp}")


@dataclass(frozen=True)
class Event:
    label: str
    start_time: int
    end_time: int
    source_kind: SmartObjectKind

    def __post_init__(self):
        if self.end_time < self.start_time:
            raise ValueError(f"event {self.label} ends before it starts")

    @property
    def duration(self) -> int:
        return self.end_time - self.start_time


def event_sort_key(event: Event) -> tuple[int, int, str]:
    return (event.start_time, event.end_time, event.label)


@dataclass(frozen=True)
class Episode:
    """A finite stream of events, optionally tagged with its group activity."""

    events: tuple[Event, ...]
    ga_label: str | None = None

    def __len__(self) -> int:
        return len(self.events)

    def span(self) -> tuple[int, int]:
        if not self.events:
            return (0, 0)
        return (min(e.start_time for e in self.events),
                max(e.end_time for e in self.events))


def build_episode(events: list[Event] | tuple[Event, ...],
                  ga_label: str | None = None) -> Episode:
    """Assemble an episode, enforcing the (start, end, label) sort order."""
    return Episode(tuple(sorted(events, key=event_sort_key)), ga_label)


@dataclass(frozen=True)
class SourceSpec:
    """Registration for one smart object.

    Actuators declare the state values they can emit; each value v publishes
    the label ``{prefix}{v}``. Pervasive sensors declare ascending level
    thresholds; readings map to labels ``{prefix}_Level1`` (below the first
    threshold) through ``{prefix}_Level{n+1}`` (at or above the last).
    """

    source_id: str
    kind: SmartObjectKind
    context: str
    prefix: str
    values: tuple[str, ...] = ()
    thresholds: tuple[float, ...] = ()

    def __post_init__(self):
        if not _IDENT.match(self.source_id):
            raise ValueError(f"invalid source id {self.source_id!r}")
        if not _IDENT.match(self.prefix):
            raise ValueError(f"invalid label prefix {self.prefix!r}")
        if not _IDENT.match(self.context):
            raise ValueError(f"invalid context name {self.context!r}")
        if self.kind is SmartObjectKind.ACTUATOR:
            if not self.values:
                raise ValueError(f"actuator {self.source_id} declares no values")
            for v in self.values:
                if not _IDENT.match(v):
                    raise ValueError(f"invalid actuator value {v!r}")
        else:
            if list(self.thresholds) != sorted(self.thresholds):
                raise ValueError(f"thresholds of {self.source_id} not ascending")
            if len(set(self.thresholds)) != len(self.thresholds):
                raise ValueError(f"duplicate thresholds on {self.source_id}")

    def labels(self) -> tuple[str, ...]:
        if self.kind is SmartObjectKind.ACTUATOR:
            return tuple(f"{self.prefix}{v}" for v in self.values)
        return tuple(f"{self.prefix}_Level{i + 1}"
                     for i in range(len(self.thresholds) + 1))

    def actuator_label(self, value: str) -> str:
        if value not in self.values:
            raise UnknownValue(
                f"source {self.source_id} has no declared value {value!r}")
        return f"{self.prefix}{value}"

    def level_label(self, reading: float) -> str:
        level = bisect_right(self.thresholds, reading) + 1
        return f"{self.prefix}_Level{level}"


class SourceRegistry:
    """All registered sources plus the label maps derived from them.

    Every published label must be unique across sources so that each label has
    exactly one publisher and one context.
    """

    def __init__(self, specs: list[SourceSpec] | tuple[SourceSpec, ...]):
        self.specs: dict[str, SourceSpec] = {}
        self._publisher: dict[str, str] = {}
        for spec in specs:
            if spec.source_id in self.specs:
                raise ValueError(f"duplicate source id {spec.source_id}")
            self.specs[spec.source_id] = spec
        for spec in self.specs.values():
            for label in spec.labels():
                other = self._publisher.get(label)
                if other is not None:
                    raise ValueError(
                        f"label {label} published by both {other} and {spec.source_id}")
                self._publisher[label] = spec.source_id

    def __contains__(self, source_id: str) -> bool:
        return source_id in self.specs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SourceRegistry):
            return NotImplemented
        return self.specs == other.specs

    def spec(self, source_id: str) -> SourceSpec:
        try:
            return self.specs[source_id]
        except KeyError:
            raise UnknownSource(f"unregistered source {source_id!r}") from None

    def kind_of(self, source_id: str) -> SmartObjectKind:
        return self.spec(source_id).kind

    def publisher_of(self, label: str) -> str:
        return self._publisher[label]

    def is_about(self) -> dict[str, str]:
        return {label: self.specs[src].context
                for label, src in self._publisher.items()}

    def publishes(self) -> dict[str, frozenset[str]]:
        return {sid: frozenset(spec.labels()) for sid, spec in self.specs.items()}

    def kinds(self) -> dict[str, SmartObjectKind]:
        return {sid: spec.kind for sid, spec in self.specs.items()}

    def contexts(self) -> frozenset[str]:
        return frozenset(spec.context for spec in self.specs.values())

    def vocabulary(self) -> frozenset[str]:
        return frozenset(self._publisher)

    def kind_of_label(self, label: str) -> SmartObjectKind:
        return self.specs[self._publisher[label]].kind

    def with_thresholds(self, overrides: dict[str, tuple[float, ...]]) -> "SourceRegistry":
        """Copy of this registry with some sensors' thresholds replaced."""
        specs = []
        for sid, spec in self.specs.items():
            if sid in overrides:
                if spec.kind is not SmartObjectKind.PERVASIVE_SENSOR:
                    raise ValueError(f"{sid} is not a pervasive sensor")
                spec = SourceSpec(sid, spec.kind, spec.context, spec.prefix,
                                  spec.values, tuple(overrides[sid]))
            specs.append(spec)
        return SourceRegistry(specs)


def _sorted_records(records: list[RawRecord]) -> list[RawRecord]:
    # Out-of-order feeds are sorted rather than rejected; ties keep feed order.
    return sorted(records, key=lambda r: r.timestamp)


def convert_actuator_stream(records: list[RawRecord],
                            spec: SourceSpec) -> list[Event]:
    """One event per maximal run of one state value.

    A run starts at its first record's timestamp and ends where the next run
    starts; the final run ends at the stream's last timestamp, so a trailing
    single-record run yields a zero-length event.
    """
    if not records:
        return []
    recs = _sorted_records(records)
    events: list[Event] = []
    run_value = recs[0].value
    run_start = recs[0].timestamp
    for rec in recs[1:]:
        if rec.value != run_value:
            events.append(Event(spec.actuator_label(run_value), run_start,
                                rec.timestamp, SmartObjectKind.ACTUATOR))
            run_value = rec.value
            run_start = rec.timestamp
    events.append(Event(spec.actuator_label(run_value), run_start,
                        recs[-1].timestamp, SmartObjectKind.ACTUATOR))
    return events


def convert_sensor_stream(records: list[RawRecord], spec: SourceSpec,
                          window: int = 5) -> list[Event]:
    """Moving-average the readings, map to levels, merge equal-level runs.

    The average is taken over full windows of the last `window` readings
    (clamped to the stream length), so the first emitted level is backfilled
    to the first timestamp and the level sequence starts once the window
    fills. Run boundaries follow the actuator rule: a run ends where the next
    one starts, the last run at the last timestamp.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if not records:
        return []
    recs = _sorted_records(records)
    readings: list[float] = []
    for rec in recs:
        try:
            x = float(rec.value)
        except ValueError:
            raise NonFiniteValue(
                f"source {spec.source_id}: unreadable value {rec.value!r}") from None
        if not math.isfinite(x):
            raise NonFiniteValue(
                f"source {spec.source_id}: non-finite reading {rec.value!r}")
        readings.append(x)

    w = min(window, len(readings))
    levels: list[tuple[str, int]] = []  # (label, timestamp of this reading)
    for i in range(w - 1, len(readings)):
        mean = sum(readings[i - w + 1:i + 1]) / w
        levels.append((spec.level_label(mean), recs[i].timestamp))

    events: list[Event] = []
    run_label = levels[0][0]
    run_start = recs[0].timestamp  # backfill to stream start for full coverage
    for label, ts in levels[1:]:
        if label != run_label:
            events.append(Event(run_label, run_start, ts,
                                SmartObjectKind.PERVASIVE_SENSOR))
            run_label = label
            run_start = ts
    events.append(Event(run_label, run_start, recs[-1].timestamp,
                        SmartObjectKind.PERVASIVE_SENSOR))
    return events


def convert_streams(records: list[RawRecord], registry: SourceRegistry,
                    window: int = 5, ga_label: str | None = None) -> Episode:
    """Convert a mixed multi-source record stream into one sorted episode."""
    by_source: dict[str, list[RawRecord]] = {}
    for rec in records:
        if rec.source_id not in registry:
            raise UnknownSource(f"unregistered source {rec.source_id!r}")
        by_source.setdefault(rec.source_id, []).append(rec)
    events: list[Event] = []
    for source_id in sorted(by_source):
        spec = registry.spec(source_id)
        if spec.kind is SmartObjectKind.ACTUATOR:
            events.extend(convert_actuator_stream(by_source[source_id], spec))
        else:
            events.extend(convert_sensor_stream(by_source[source_id], spec, window))
    return build_episode(events, ga_label)


@dataclass(frozen=True)
class Corpus:
    """A labeled episode collection plus the registry that explains its labels.

    declared_affects / declared_related_to carry administrator knowledge-base
    statements alongside the data so experiment pipelines can rebuild the KB
    per training split.
    """

    registry: SourceRegistry
    episodes: "dict[str, tuple[Episode, ...]]"
    declared_affects: "dict[str, frozenset[str]] | None" = None
    declared_related_to: "frozenset[tuple[str, str]] | None" = None

    def total_episodes(self) -> int:
        return sum(len(eps) for eps in self.episodes.values())

    def activity_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.episodes))
