"""Knowledge base: what each group activity affects and which contexts relate.

Every event label is about exactly one context (the state of the world it
describes). From labeled training episodes the package induces, per activity,
which contexts the activity affects, and globally, which ordered context
pairs are related closely enough that a disjoint-in-time event pair between
them can be treated as causal. Both inductions score a context (or ordered
context pair) with frequency-times-rarity: the within-activity frequency
ratio multiplied by log10(N / number-of-activities-containing-it). An
administrator can declare entries directly; declared entries always survive
induction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import EmptyGA, UnknownContext, UnknownEvent, UnknownGA
from .events import Episode, SmartObjectKind, SourceRegistry

Context = str
GaName = str


@dataclass(frozen=True)
class ImportanceScore:
    """Score of one context (or ordered context pair) for one activity.

    value = f * log10(n_activities / containing_activities), and is zero
    exactly when f is zero or every activity contains the item.
    """

    value: float
    f: float
    containing_activities: int
    n_activities: int


def _score(f: float, gaf: int, n: int) -> ImportanceScore:
    if f == 0.0 or gaf == n:
        return ImportanceScore(0.0, f, gaf, n)
    return ImportanceScore(f * math.log10(n / gaf), f, gaf, n)


def _context_of(is_about: Mapping[str, str], label: str) -> str:
    try:
        return is_about[label]
    except KeyError:
        raise UnknownEvent(f"no context registered for event label {label!r}") from None


def context_importance(training: Mapping[GaName, Iterable[Episode]],
                       registry: SourceRegistry, context: Context,
                       ga: GaName) -> ImportanceScore:
    """How characteristic `context` is of activity `ga` in the training set."""
    if context not in registry.contexts():
        raise UnknownContext(f"context {context!r} is not registered")
    if ga not in training:
        raise UnknownGA(f"no training episodes for activity {ga!r}")
    is_about = registry.is_about()
    n = len(training)
    gaf = 0
    for z, episodes in training.items():
        if any(_context_of(is_about, e.label) == context
               for ep in episodes for e in ep.events):
            gaf += 1
    total = 0
    hits = 0
    for ep in training[ga]:
        for e in ep.events:
            total += 1
            if _context_of(is_about, e.label) == context:
                hits += 1
    if total == 0:
        raise EmptyGA(f"activity {ga!r} has no events")
    return _score(hits / total, gaf, n)


def induce_affects(training: Mapping[GaName, Iterable[Episode]],
                   registry: SourceRegistry) -> dict[GaName, frozenset[Context]]:
    """Per activity, the contexts with strictly positive importance."""
    result: dict[GaName, frozenset[Context]] = {}
    for ga in sorted(training):
        if not any(ep.events for ep in training[ga]):
            result[ga] = frozenset()
            continue
        kept = {ctx for ctx in registry.contexts()
                if context_importance(training, registry, ctx, ga).value > 0.0}
        result[ga] = frozenset(kept)
    return result


def _episode_ordered_pairs(episode: Episode,
                           is_about: Mapping[str, str]) -> frozenset[tuple[Context, Context]]:
    """Ordered context pairs present in an episode, counted once each.

    (x, y) is present when some event about x starts strictly before some
    event about y starts.
    """
    starts: dict[Context, list[int]] = {}
    for e in episode.events:
        starts.setdefault(_context_of(is_about, e.label), []).append(e.start_time)
    pairs = set()
    for x, xs in starts.items():
        first_x = min(xs)
        for y, ys in starts.items():
            if any(first_x < t for t in ys):
                pairs.add((x, y))
    return frozenset(pairs)


def ordered_set_importance(training: Mapping[GaName, Iterable[Episode]],
                           registry: SourceRegistry,
                           pair: tuple[Context, Context],
                           ga: GaName) -> ImportanceScore:
    """How characteristic the ordered context pair is of activity `ga`.

    Occurrences are type-level: each episode contributes at most one
    occurrence per ordered pair, and the frequency ratio is taken against the
    activity's total ordered-pair occurrence count.
    """
    for ctx in pair:
        if ctx not in registry.contexts():
            raise UnknownContext(f"context {ctx!r} is not registered")
    if ga not in training:
        raise UnknownGA(f"no training episodes for activity {ga!r}")
    is_about = registry.is_about()
    n = len(training)
    per_ga_pairs = {z: [_episode_ordered_pairs(ep, is_about) for ep in episodes]
                    for z, episodes in training.items()}
    gaf = sum(1 for z, eps in per_ga_pairs.items()
              if any(pair in p for p in eps))
    total = sum(len(p) for p in per_ga_pairs[ga])
    hits = sum(1 for p in per_ga_pairs[ga] if pair in p)
    if total == 0:
        return _score(0.0, gaf, n)
    return _score(hits / total, gaf, n)


def induce_related_to(training: Mapping[GaName, Iterable[Episode]],
                      registry: SourceRegistry,
                      aggregation: str = "min") -> frozenset[tuple[Context, Context]]:
    """Ordered context pairs that survive the cross-activity importance filter.

    With the default "min" aggregation a pair is kept only when its importance
    is positive in every activity; this is deliberately severe (a pair missing
    from any one activity, or present in all of them, scores zero somewhere)
    and typically keeps nothing, which is why installations declare related
    pairs by hand. The "max" aggregation keeps any pair that is positive for
    at least one activity.
    """
    if aggregation not in ("min", "max"):
        raise ValueError(f"unknown aggregation {aggregation!r}")
    is_about = registry.is_about()
    universe: set[tuple[Context, Context]] = set()
    for episodes in training.values():
        for ep in episodes:
            universe |= _episode_ordered_pairs(ep, is_about)
    agg = min if aggregation == "min" else max
    kept = set()
    for pair in universe:
        scores = [ordered_set_importance(training, registry, pair, ga).value
                  for ga in training]
        if scores and agg(scores) > 0.0:
            kept.add(pair)
    return frozenset(kept)


@dataclass(frozen=True)
class KnowledgeBase:
    """Label maps plus the affects / related_to relations and their corollary:
    per activity, the actuator-published labels whose context it affects."""

    is_about: Mapping[str, Context]
    publishes: Mapping[str, frozenset[str]]
    kind_of: Mapping[str, SmartObjectKind]
    affects: Mapping[GaName, frozenset[Context]]
    related_to: frozenset[tuple[Context, Context]]
    ga_specific: Mapping[GaName, frozenset[str]]

    def context_of(self, label: str) -> Context:
        return _context_of(self.is_about, label)

    def contexts(self) -> frozenset[Context]:
        return frozenset(self.is_about.values())

    def activities(self) -> tuple[GaName, ...]:
        return tuple(sorted(self.affects))

    def causally_related(self, label_first: str, label_second: str) -> bool:
        """Whether the ordered context pair of two labels is a related pair."""
        return (self.context_of(label_first),
                self.context_of(label_second)) in self.related_to

    def ga_specific_events(self, ga: GaName) -> frozenset[str]:
        try:
            return self.ga_specific[ga]
        except KeyError:
            raise UnknownGA(f"activity {ga!r} is not in the knowledge base") from None


def _ga_specific(registry: SourceRegistry,
                 affects: Mapping[GaName, frozenset[Context]]) -> dict[GaName, frozenset[str]]:
    is_about = registry.is_about()
    result = {}
    for ga, contexts in affects.items():
        result[ga] = frozenset(
            label for label, ctx in is_about.items()
            if ctx in contexts
            and registry.kind_of_label(label) is SmartObjectKind.ACTUATOR)
    return result


def build_knowledge_base(registry: SourceRegistry,
                         training: Mapping[GaName, Iterable[Episode]] | None = None,
                         declared_affects: Mapping[GaName, Iterable[Context]] | None = None,
                         declared_related_to: Iterable[tuple[Context, Context]] | None = None,
                         aggregation: str = "min") -> KnowledgeBase:
    """Assemble a knowledge base from declarations plus optional induction.

    Declared entries are kept verbatim; induction fills only what was not
    declared. For affects that is per activity (a declared activity's context
    set is the administrator's complete statement), for related_to per pair.
    """
    contexts = registry.contexts()
    affects: dict[GaName, set[Context]] = {}
    for ga, ctxs in (declared_affects or {}).items():
        for ctx in ctxs:
            if ctx not in contexts:
                raise UnknownContext(f"declared affects names unknown context {ctx!r}")
        affects[ga] = set(ctxs)
    related: set[tuple[Context, Context]] = set()
    for x, y in (declared_related_to or ()):
        for ctx in (x, y):
            if ctx not in contexts:
                raise UnknownContext(f"declared related_to names unknown context {ctx!r}")
        related.add((x, y))

    if training is not None:
        declared_gas = set(affects)
        for ga, ctxs in induce_affects(training, registry).items():
            if ga not in declared_gas:
                affects.setdefault(ga, set()).update(ctxs)
        related |= induce_related_to(training, registry, aggregation)

    affects_frozen = {ga: frozenset(ctxs) for ga, ctxs in affects.items()}
    return KnowledgeBase(
        is_about=registry.is_about(),
        publishes=registry.publishes(),
        kind_of=registry.kinds(),
        affects=affects_frozen,
        related_to=frozenset(related),
        ga_specific=_ga_specific(registry, affects_frozen),
    )
