"""Scoring unlabeled episodes against per-activity pattern stores.

An episode is converted to the same itemset-sequence form the miner consumes.
Each trained activity is scored by how much of its pattern weight the episode
fails to reproduce: likelihood = exp(matched_weight - total_weight), which is
1.0 when every pattern of the activity occurs in the episode and decays
exponentially with the support mass left unmatched. The predicted activity is
the likelihood argmax, ties broken toward the lexicographically smallest name
so results never depend on dict order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyStore
from .mining import (Itemset, PatternStore, build_sequence_database,
                     flatten_database)
from .relations import RelationEpisode


def pattern_matches(elements: Sequence[Itemset], row: Sequence[Itemset]) -> bool:
    """True when the pattern's itemsets embed into strictly increasing row
    positions, each a subset of the row itemset there. Greedy leftmost
    placement is exact for subset embeddings."""
    pos = 0
    for itemset in elements:
        while pos < len(row) and not itemset <= row[pos]:
            pos += 1
        if pos == len(row):
            return False
        pos += 1
    return True


@dataclass(frozen=True)
class ActivityScore:
    activity: str
    matched: tuple[int, ...]
    weight_matched: float
    weight_total: float

    @property
    def log_likelihood(self) -> float:
        return self.weight_matched - self.weight_total

    @property
    def likelihood(self) -> float:
        return math.exp(self.log_likelihood)


@dataclass(frozen=True)
class Recognition:
    predicted: str
    scores: tuple[ActivityScore, ...]

    def score_of(self, activity: str) -> ActivityScore:
        for s in self.scores:
            if s.activity == activity:
                return s
        raise KeyError(activity)


def episode_row(episode: RelationEpisode, flatten: bool = False) -> tuple[Itemset, ...]:
    db = build_sequence_database([episode])
    if flatten:
        db = flatten_database(db)
    return db.sequences[0]


def score_activity(name: str, patterns, row: Sequence[Itemset]) -> ActivityScore:
    matched = []
    w_matched = 0.0
    w_total = 0.0
    for idx, pat in enumerate(patterns):
        w_total += pat.support
        if pattern_matches(pat.elements, row):
            matched.append(idx)
            w_matched += pat.support
    return ActivityScore(name, tuple(matched), w_matched, w_total)


def recognize(store: PatternStore, episode: RelationEpisode,
              flatten: bool = False) -> Recognition:
    if not store.activities:
        raise EmptyStore("pattern store holds no activities")
    row = episode_row(episode, flatten)
    scores = tuple(score_activity(ga, store.activities[ga].patterns, row)
                   for ga in store.names())
    best = min(scores, key=lambda s: (-s.log_likelihood, s.activity))
    return Recognition(best.activity, scores)
