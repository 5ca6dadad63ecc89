"""Seeded synthetic corpora for experiments and acceptance runs.

The real testbed recordings behind the original experiments are not
available, so the harness plants the phenomena it needs to measure: activity
pairs distinguished only by event order, heavy non-causal sensor chatter
around a tiny causal signal, and an activity marked by one rare actuator
event among many ambient level events. All builders are deterministic in
their seed.
"""

from __future__ import annotations

import random
from typing import Mapping, Sequence

from .events import (Corpus, Episode, Event, SmartObjectKind, SourceRegistry,
                     SourceSpec, build_episode)

_ACT = SmartObjectKind.ACTUATOR
_PERV = SmartObjectKind.PERVASIVE_SENSOR


def _chain(rng: random.Random, labels: Sequence[tuple[str, SmartObjectKind]],
           dur: int = 8, dur_jitter: int = 4,
           gap: int = 3, gap_jitter: int = 3) -> list[Event]:
    """Pairwise disjoint events in the given order with jittered timing."""
    events = []
    t = rng.randrange(0, 5)
    for label, kind in labels:
        length = dur + rng.randrange(0, dur_jitter + 1)
        events.append(Event(label, t, t + length, kind))
        t += length + gap + rng.randrange(0, gap_jitter + 1)
    return events


def two_actuator_registry() -> SourceRegistry:
    return SourceRegistry((
        SourceSpec("seat", _ACT, "SeatState", "Seat", values=("Busy", "Free")),
        SourceSpec("door", _ACT, "DoorState", "Door", values=("Open", "Closed")),
    ))


def order_distinguished_corpus(episodes_per_ga: int = 100,
                               seed: int = 7) -> Corpus:
    """Two activities over the same four event pairs, differing only in the
    order the pairs occur. Co-occurrence sets are identical by construction;
    only order separates the classes."""
    rng = random.Random(seed)
    registry = two_actuator_registry()
    x = ("SeatBusy", _ACT)
    y = ("DoorOpen", _ACT)
    motifs = {
        "Assembly": [x, y, y, x],
        "Briefing": [y, x, x, y],
    }
    episodes = {}
    for ga in sorted(motifs):
        episodes[ga] = tuple(
            build_episode(_chain(rng, motifs[ga]), ga)
            for _ in range(episodes_per_ga))
    return Corpus(registry, episodes)


def noise_pair_registry() -> SourceRegistry:
    return SourceRegistry((
        SourceSpec("projector", _ACT, "ProjectorStatus", "Projector",
                   values=("On", "Off")),
        SourceSpec("window", _ACT, "WindowState", "Window",
                   values=("Open", "Closed")),
        SourceSpec("mic", _PERV, "Sound", "Sound",
                   thresholds=(25.0, 50.0, 75.0)),
    ))


def noise_pair_corpus(episodes_per_ga: int = 20, noise_events: int = 10,
                      seed: int = 11) -> Corpus:
    """One causal actuator pair per activity (opposite orders) drowned in
    ambient sound-level events with no class information. Ships declared
    related_to entries for the actuator contexts so the causality filter can
    strip every sound pair."""
    rng = random.Random(seed)
    registry = noise_pair_registry()
    signal = {
        "Lecture": [("ProjectorOn", _ACT), ("WindowOpen", _ACT)],
        "Workshop": [("WindowOpen", _ACT), ("ProjectorOn", _ACT)],
    }
    episodes = {}
    for ga in sorted(signal):
        eps = []
        for _ in range(episodes_per_ga):
            n_slots = noise_events + 2
            slots = sorted(rng.sample(range(n_slots), 2))
            labels: list[tuple[str, SmartObjectKind]] = []
            sig = iter(signal[ga])
            for slot in range(n_slots):
                if slot in slots:
                    labels.append(next(sig))
                else:
                    labels.append((f"Sound_Level{rng.randrange(1, 5)}", _PERV))
            eps.append(build_episode(_chain(rng, labels), ga))
        episodes[ga] = tuple(eps)
    return Corpus(
        registry, episodes,
        declared_related_to=frozenset({("ProjectorStatus", "WindowState"),
                                       ("WindowState", "ProjectorStatus")}),
    )


def rare_actuator_registry() -> SourceRegistry:
    return SourceRegistry((
        SourceSpec("pager", _ACT, "PagerState", "Pager", values=("On", "Off")),
        SourceSpec("mic", _PERV, "Sound", "Sound",
                   thresholds=(30.0, 60.0)),
    ))


def rare_actuator_corpus(episodes_per_ga: int = 20, ambient_events: int = 50,
                         seed: int = 13) -> Corpus:
    """Two activities sharing the same ambient sound-level stream; one also
    carries a single brief actuator event, a 1:50 count ratio against the
    ambient events."""
    rng = random.Random(seed)
    registry = rare_actuator_registry()
    episodes: dict[str, tuple[Episode, ...]] = {}
    for ga, with_pager in (("Huddle", True), ("Standup", False)):
        eps = []
        for _ in range(episodes_per_ga):
            labels = [(f"Sound_Level{rng.randrange(1, 4)}", _PERV)
                      for _ in range(ambient_events)]
            events = _chain(rng, labels, dur=40, dur_jitter=20,
                            gap=4, gap_jitter=4)
            if with_pager:
                host = rng.randrange(len(events))
                anchor = events[host].start_time
                events.append(Event("PagerOn", anchor, anchor + 10, _ACT))
            eps.append(build_episode(events, ga))
        episodes[ga] = tuple(eps)
    return Corpus(registry, episodes)


def script_corpus(registry: SourceRegistry,
                  scripts: Mapping[str, Sequence[str]],
                  episodes_per_ga: int = 10, seed: int = 3,
                  **chain_kwargs) -> Corpus:
    """Corpus from fixed label scripts, one per activity, timing jittered."""
    rng = random.Random(seed)
    vocabulary = registry.vocabulary()
    episodes = {}
    for ga in sorted(scripts):
        for label in scripts[ga]:
            if label not in vocabulary:
                raise ValueError(f"script label {label!r} not in registry")
        labeled = [(lbl, registry.kind_of_label(lbl)) for lbl in scripts[ga]]
        episodes[ga] = tuple(
            build_episode(_chain(rng, labeled, **chain_kwargs), ga)
            for _ in range(episodes_per_ga))
    return Corpus(registry, episodes)
