"""Preprocessing: event pairs become a time-sorted sequence of causal relations.

Every pair of events in an episode (ordered so the earlier-starting event
comes first) is classified into one of seven temporal relations. Relations
that imply togetherness (Meets, Overlaps, Starts, During, Finishes, Equals)
are always kept; After, which holds between disjoint events, is kept only
when the knowledge base says the two contexts are related, since an arbitrary
gap between unrelated events carries no causal signal. Before extraction, the
training phase may emphasize an activity's specific actuator events by
splitting each into equal contiguous parts so that patterns around them
survive frequency-based mining.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import MissingLabel
from .events import Episode, Event, build_episode
from .knowledge import KnowledgeBase


class AllenRelation(Enum):
    AFTER = "After"
    MEETS = "Meets"
    OVERLAPS = "Overlaps"
    STARTS = "Starts"
    DURING = "During"
    FINISHES = "Finishes"
    EQUALS = "Equals"


def order_pair(a: Event, b: Event) -> tuple[Event, Event]:
    """Order two events by (start, end, label) so classification is canonical."""
    ka = (a.start_time, a.end_time, a.label)
    kb = (b.start_time, b.end_time, b.label)
    return (a, b) if ka <= kb else (b, a)


def classify_allen(first: Event, second: Event) -> AllenRelation:
    """Relation of an ordered event pair; `first` must sort before `second`.

    Inverse relations never arise because of the ordering, which collapses the
    classical thirteen relations to these seven. Zero-length events are legal
    and fall out of the same boundary comparisons.
    """
    s1, e1 = first.start_time, first.end_time
    s2, e2 = second.start_time, second.end_time
    if s1 == s2:
        return AllenRelation.EQUALS if e1 == e2 else AllenRelation.STARTS
    if e1 < s2:
        return AllenRelation.AFTER
    if e1 == s2:
        return AllenRelation.MEETS
    if e2 < e1:
        return AllenRelation.DURING
    if e2 == e1:
        return AllenRelation.FINISHES
    return AllenRelation.OVERLAPS


@dataclass(frozen=True)
class CausalRelation:
    """One classified event pair, spanning both events' extents."""

    relation: AllenRelation
    first: str
    second: str
    start_time: int
    end_time: int

    @property
    def symbol(self) -> str:
        """Canonical rendering; this string is the mining alphabet symbol."""
        return f"{self.relation.value}({self.first}, {self.second})"


def relation_sort_key(rel: CausalRelation) -> tuple[int, int, str, str, str]:
    return (rel.start_time, rel.end_time, rel.relation.value, rel.first, rel.second)


@dataclass(frozen=True)
class RelationEpisode:
    relations: tuple[CausalRelation, ...]
    ga_label: str | None = None


def split_event(event: Event, n_split: int) -> list[Event]:
    """Replace an event by n_split equal contiguous sub-events.

    Boundaries are rounded to integer milliseconds; rounding a monotone
    sequence keeps the parts ordered, and the union always equals the
    original interval.
    """
    if n_split < 1:
        raise ValueError(f"n_split must be >= 1, got {n_split}")
    if n_split == 1:
        return [event]
    length = event.end_time - event.start_time
    bounds = [event.start_time + round(k * length / n_split)
              for k in range(n_split + 1)]
    return [Event(event.label, bounds[k], bounds[k + 1], event.source_kind)
            for k in range(n_split)]


def emphasize_ga_specific(episode: Episode, kb: KnowledgeBase,
                          n_split: int = 10) -> Episode:
    """Split each activity-specific event of a labeled training episode.

    Inference-time episodes have no label and are never emphasized.
    """
    if episode.ga_label is None:
        raise MissingLabel("emphasis requires a labeled training episode")
    specific = kb.ga_specific_events(episode.ga_label)
    if not specific or n_split == 1:
        return episode
    events: list[Event] = []
    for e in episode.events:
        if e.label in specific:
            events.extend(split_event(e, n_split))
        else:
            events.append(e)
    return build_episode(events, episode.ga_label)


def extract_causal_relations(episode: Episode, kb: KnowledgeBase,
                             pairing_horizon: int | None = None,
                             filter_after: bool = True) -> RelationEpisode:
    """Classify all event pairs of an episode and keep the causal ones.

    Pairs are enumerated between distinct events only, ordered earlier-start
    first. With a pairing horizon H, a pair is considered only when the gap
    second.start - first.end is at most H (a negative H therefore restricts
    pairing to overlapping events). After pairs survive only when the ordered
    context pair is in related_to; with filter_after=False they are all kept,
    which is the unfiltered ablation behavior.
    """
    events = sorted(episode.events, key=lambda e: (e.start_time, e.end_time, e.label))
    relations: list[CausalRelation] = []
    for i in range(len(events)):
        first = events[i]
        for j in range(i + 1, len(events)):
            second = events[j]
            if (pairing_horizon is not None
                    and second.start_time - first.end_time > pairing_horizon):
                continue
            rel = classify_allen(first, second)
            if (rel is AllenRelation.AFTER and filter_after
                    and not kb.causally_related(first.label, second.label)):
                continue
            relations.append(CausalRelation(
                rel, first.label, second.label,
                first.start_time, max(first.end_time, second.end_time)))
    relations.sort(key=relation_sort_key)
    return RelationEpisode(tuple(relations), episode.ga_label)
