"""Frequent sequence-pattern mining over causal-relation episodes.

Each episode becomes one row of a sequence database: relations sharing an
identical (start, end) extent form one co-occurrence itemset, distinct
extents form successive positions. A pattern is an ordered list of itemsets;
it is contained in a row when its itemsets embed into strictly increasing row
positions, each itemset a subset of its position. Support is the fraction of
rows containing the pattern, counted once per row.

The miner grows a lexicographic tree depth-first: a node's pattern extends
either by adding a lexicographically greater symbol to its last itemset or by
appending a fresh single-symbol itemset, candidate symbols in both cases
coming from the frequent siblings of the node (plus itself for sequence
extension). Every node reached is a frequent pattern. Occurrences are tracked
as per-row position bitmaps, so support counting is a few integer operations
per row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import InsufficientData, InvalidThreshold
from .relations import RelationEpisode

Itemset = frozenset[str]
Row = "tuple[Itemset, ...]"


@dataclass(frozen=True)
class SequenceDatabase:
    sequences: tuple[tuple[Itemset, ...], ...]
    alphabet: frozenset[str]


def build_sequence_database(episodes: Iterable[RelationEpisode]) -> SequenceDatabase:
    rows = []
    alphabet: set[str] = set()
    for ep in episodes:
        row: list[set[str]] = []
        extent: tuple[int, int] | None = None
        for rel in ep.relations:
            key = (rel.start_time, rel.end_time)
            if key != extent:
                row.append(set())
                extent = key
            row[-1].add(rel.symbol)
            alphabet.add(rel.symbol)
        rows.append(tuple(frozenset(s) for s in row))
    return SequenceDatabase(tuple(rows), frozenset(alphabet))


def flatten_database(db: SequenceDatabase) -> SequenceDatabase:
    """Collapse each row to a single itemset, discarding order: the
    association-rule ablation mines plain co-occurrence sets on this."""
    rows = tuple((frozenset().union(*row),) if row else () for row in db.sequences)
    return SequenceDatabase(rows, db.alphabet)


@dataclass(frozen=True)
class Pattern:
    elements: tuple[Itemset, ...]
    support: float
    depth: int

    def render(self) -> str:
        return render_pattern(self.elements)


def render_pattern(elements: Sequence[Itemset]) -> str:
    """Co-occurring symbols in parentheses, precedence between parentheses."""
    return ",".join("(" + ",".join(sorted(itemset)) + ")" for itemset in elements)


def parse_pattern(text: str) -> tuple[Itemset, ...]:
    """Inverse of render_pattern. Symbols may themselves contain one level of
    parentheses with commas inside, so separators only count at itemset depth."""
    elements: list[frozenset[str]] = []
    symbols: list[str] = []
    buf: list[str] = []
    depth = 0
    closed = False  # an itemset just ended; "," or end-of-text must follow
    for ch in text:
        if depth == 0:
            if ch == "(":
                if closed:
                    raise ValueError(f"missing ',' in pattern {text!r}")
                depth = 1
                symbols = []
                buf = []
            elif ch == ",":
                if not closed:
                    raise ValueError(f"unexpected ',' in pattern {text!r}")
                closed = False
            else:
                raise ValueError(f"unexpected {ch!r} in pattern {text!r}")
        elif depth == 1:
            if ch == ")":
                if not buf:
                    raise ValueError(f"empty symbol in pattern {text!r}")
                symbols.append("".join(buf))
                elements.append(frozenset(symbols))
                depth = 0
                closed = True
            elif ch == ",":
                if not buf:
                    raise ValueError(f"empty symbol in pattern {text!r}")
                symbols.append("".join(buf))
                buf = []
            else:
                if ch == "(":
                    depth = 2
                buf.append(ch)
        else:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            buf.append(ch)
    if depth != 0 or not elements or not closed:
        raise ValueError(f"unbalanced pattern {text!r}")
    return tuple(elements)


def _min_count(threshold: float, n: int) -> int:
    # smallest k with k / n >= threshold, robust at float boundaries
    k = max(1, math.ceil(threshold * n))
    if k > 1 and (k - 1) / n >= threshold:
        k -= 1
    return k


class _Cap(Exception):
    pass


def mine(db: SequenceDatabase, threshold: float,
         max_depth: int | None = None,
         stop_after: int | None = None) -> list[Pattern]:
    """All patterns with support >= threshold, one per lexicographic-tree node.

    stop_after truncates enumeration once that many patterns have been found;
    threshold calibration uses it to ask "are there at least N?" cheaply.
    """
    if not 0.0 < threshold <= 1.0:
        raise InvalidThreshold(f"support threshold {threshold} outside (0, 1]")
    n = len(db.sequences)
    if n == 0:
        return []
    need = _min_count(threshold, n)

    # position bitmap per row per symbol
    masks: list[dict[str, int]] = []
    for row in db.sequences:
        m: dict[str, int] = {}
        for pos, itemset in enumerate(row):
            for sym in itemset:
                m[sym] = m.get(sym, 0) | (1 << pos)
        masks.append(m)

    found: list[Pattern] = []

    def emit(elements: tuple[tuple[str, ...], ...], count: int, depth: int) -> None:
        found.append(Pattern(tuple(frozenset(e) for e in elements),
                             count / n, depth))
        if stop_after is not None and len(found) >= stop_after:
            raise _Cap

    def i_extend(state: list[tuple[int, int]], sym: str) -> list[tuple[int, int]]:
        out = []
        for i, bm in state:
            nm = bm & masks[i].get(sym, 0)
            if nm:
                out.append((i, nm))
        return out

    def s_extend(state: list[tuple[int, int]], sym: str) -> list[tuple[int, int]]:
        out = []
        for i, bm in state:
            low = bm & -bm
            nm = masks[i].get(sym, 0) & (-1 << low.bit_length())
            if nm:
                out.append((i, nm))
        return out

    def grow(elements: tuple[tuple[str, ...], ...], state: list[tuple[int, int]],
             depth: int, seq_candidates: list[str], item_candidates: list[str]) -> None:
        emit(elements, len(state), depth)
        if max_depth is not None and depth >= max_depth:
            return
        freq_items = [(sym, st) for sym in item_candidates
                      if len(st := i_extend(state, sym)) >= need]
        freq_seqs = [(sym, st) for sym in seq_candidates
                     if len(st := s_extend(state, sym)) >= need]
        seq_names = [sym for sym, _ in freq_seqs]
        item_names = [sym for sym, _ in freq_items]
        for k, (sym, st) in enumerate(freq_items):
            grow(elements[:-1] + (elements[-1] + (sym,),), st, depth + 1,
                 seq_names, item_names[k + 1:])
        for k, (sym, st) in enumerate(freq_seqs):
            grow(elements + ((sym,),), st, depth + 1,
                 seq_names, seq_names[k + 1:])

    roots = []
    for sym in sorted(db.alphabet):
        st = [(i, m[sym]) for i, m in enumerate(masks) if sym in m]
        if len(st) >= need:
            roots.append((sym, st))
    root_names = [sym for sym, _ in roots]
    try:
        for k, (sym, st) in enumerate(roots):
            grow(((sym,),), st, 1, root_names, root_names[k + 1:])
    except _Cap:
        pass
    return found


@dataclass(frozen=True)
class CalibrationResult:
    threshold: float
    patterns: tuple[Pattern, ...]
    target: int

    @property
    def reached(self) -> bool:
        return len(self.patterns) >= self.target


def calibrate_threshold(db: SequenceDatabase, target: int,
                        max_depth: int | None = None) -> CalibrationResult:
    """Largest threshold that still yields at least `target` patterns.

    Candidate thresholds are the realizable supports k/n, searched by
    bisection and floored at 2/n (a pattern seen once proves nothing). When
    even the floor cannot reach the target, the floor is returned with
    whatever the database holds.
    """
    if target < 1:
        raise ValueError(f"target pattern count must be >= 1, got {target}")
    n = len(db.sequences)
    if n < 2:
        raise InsufficientData("calibration needs at least two sequences")

    def at_least_target(k: int) -> bool:
        return len(mine(db, k / n, max_depth, stop_after=target)) >= target

    if not at_least_target(2):
        floor_patterns = mine(db, 2 / n, max_depth)
        return CalibrationResult(2 / n, _store_order(floor_patterns), target)
    lo, hi = 2, n
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if at_least_target(mid):
            lo = mid
        else:
            hi = mid - 1
    return CalibrationResult(lo / n, _store_order(mine(db, lo / n, max_depth)), target)


def _store_order(patterns: list[Pattern]) -> tuple[Pattern, ...]:
    return tuple(sorted(patterns, key=lambda p: (-p.support, p.depth, p.render())))


@dataclass(frozen=True)
class TrainedActivity:
    patterns: tuple[Pattern, ...]
    threshold: float


@dataclass(frozen=True)
class PatternStore:
    activities: Mapping[str, TrainedActivity]

    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self.activities))


def train(per_ga: Mapping[str, Sequence[RelationEpisode]],
          target_pattern_count: int = 2700,
          max_depth: int | None = None,
          flatten: bool = False) -> PatternStore:
    """Calibrate and mine one pattern set per activity."""
    activities: dict[str, TrainedActivity] = {}
    for ga in sorted(per_ga):
        episodes = per_ga[ga]
        if len(episodes) < 2:
            raise InsufficientData(
                f"activity {ga!r} has {len(episodes)} episodes; need at least 2")
        db = build_sequence_database(episodes)
        if flatten:
            db = flatten_database(db)
        result = calibrate_threshold(db, target_pattern_count, max_depth)
        activities[ga] = TrainedActivity(result.patterns, result.threshold)
    return PatternStore(activities)
