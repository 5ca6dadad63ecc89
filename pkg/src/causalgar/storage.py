"""Plain-text artifact files: registries, episodes, relation episodes,
knowledge bases, pattern stores, predictions, and corpus directories.

Writers emit canonical form (sorted where the domain object is unordered,
floats via repr), so loading a written file and writing it again reproduces
the bytes exactly. Readers raise ParseError naming file and line.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ParseError
from .events import (Corpus, Episode, Event, RawRecord, SmartObjectKind,
                     SourceRegistry, SourceSpec, build_episode)
from .knowledge import KnowledgeBase
from .mining import (Pattern, PatternStore, TrainedActivity, parse_pattern,
                     render_pattern)
from .recognize import Recognition
from .relations import AllenRelation, CausalRelation, RelationEpisode

PathLike = "str | Path"


def _lines(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    return text.splitlines()


def _write(path, lines: Iterable[str]) -> None:
    Path(path).write_text("".join(line + "\n" for line in lines),
                          encoding="utf-8")


def _int(path, lineno: int, token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(path, lineno, f"bad {what} {token!r}") from None


def _float(path, lineno: int, token: str, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(path, lineno, f"bad {what} {token!r}") from None


def _kind(path, lineno: int, token: str) -> SmartObjectKind:
    try:
        return SmartObjectKind(token)
    except ValueError:
        raise ParseError(path, lineno, f"unknown source kind {token!r}") from None


# -- source registry ---------------------------------------------------------

def write_registry(registry: SourceRegistry, path) -> None:
    lines = []
    for source_id in sorted(registry.specs):
        spec = registry.specs[source_id]
        if spec.kind is SmartObjectKind.ACTUATOR:
            tail = "|".join(spec.values)
        else:
            tail = "|".join(repr(t) for t in spec.thresholds)
        lines.append(f"{spec.source_id},{spec.kind.value},{spec.context},"
                     f"{spec.prefix},{tail}")
    _write(path, lines)


def read_registry(path) -> SourceRegistry:
    specs = []
    for lineno, line in enumerate(_lines(path), 1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(path, lineno,
                             f"expected 5 comma fields, got {len(parts)}")
        source_id, kind_token, context, prefix, tail = parts
        kind = _kind(path, lineno, kind_token)
        try:
            if kind is SmartObjectKind.ACTUATOR:
                spec = SourceSpec(source_id, kind, context, prefix,
                                  values=tuple(tail.split("|")))
            else:
                thresholds = tuple(_float(path, lineno, t, "threshold")
                                   for t in tail.split("|"))
                spec = SourceSpec(source_id, kind, context, prefix,
                                  thresholds=thresholds)
        except ValueError as exc:
            raise ParseError(path, lineno, str(exc)) from None
        specs.append(spec)
    try:
        return SourceRegistry(tuple(specs))
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from None


# -- raw record streams ------------------------------------------------------

def write_raw_records(records: Sequence[RawRecord], path) -> None:
    # one record per line: timestamp<TAB>source_id<TAB>value
    _write(path, [f"{r.timestamp}\t{r.source_id}\t{r.value}" for r in records])


def read_raw_records(path) -> list[RawRecord]:
    records = []
    for lineno, line in enumerate(_lines(path), 1):
        if not line.strip():
            continue  # an empty feed is a valid, empty stream
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(path, lineno,
                             f"expected timestamp<TAB>source<TAB>value, got {line!r}")
        ts = _int(path, lineno, parts[0], "timestamp")
        try:
            records.append(RawRecord(parts[1], parts[2], ts))
        except ValueError as exc:
            raise ParseError(path, lineno, str(exc)) from None
    return records


# -- episodes ----------------------------------------------------------------

def write_episode(episode: Episode, path) -> None:
    lines = [f"ga_label:{episode.ga_label or ''}", "events:"]
    lines += [f"{e.label},{e.start_time},{e.end_time},{e.source_kind.value}"
              for e in episode.events]
    _write(path, lines)


def read_episode(path) -> Episode:
    lines = _lines(path)
    if not lines or not lines[0].startswith("ga_label:"):
        raise ParseError(path, 1, "expected 'ga_label:' header")
    if len(lines) < 2 or lines[1] != "events:":
        raise ParseError(path, 2, "expected 'events:' header")
    ga_label = lines[0][len("ga_label:"):] or None
    events = []
    for lineno, line in enumerate(lines[2:], 3):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError(path, lineno,
                             f"expected label,start,end,kind, got {line!r}")
        start = _int(path, lineno, parts[1], "start time")
        end = _int(path, lineno, parts[2], "end time")
        kind = _kind(path, lineno, parts[3])
        try:
            events.append(Event(parts[0], start, end, kind))
        except ValueError as exc:
            raise ParseError(path, lineno, str(exc)) from None
    return build_episode(events, ga_label)


# -- relation episodes -------------------------------------------------------

def write_relation_episode(rel_episode: RelationEpisode, path) -> None:
    lines = [f"ga_label:{rel_episode.ga_label or ''}", "relations:"]
    lines += [f"{r.relation.value},{r.first},{r.second},"
              f"{r.start_time},{r.end_time}"
              for r in rel_episode.relations]
    _write(path, lines)


def read_relation_episode(path) -> RelationEpisode:
    lines = _lines(path)
    if not lines or not lines[0].startswith("ga_label:"):
        raise ParseError(path, 1, "expected 'ga_label:' header")
    if len(lines) < 2 or lines[1] != "relations:":
        raise ParseError(path, 2, "expected 'relations:' header")
    ga_label = lines[0][len("ga_label:"):] or None
    relations = []
    for lineno, line in enumerate(lines[2:], 3):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(
                path, lineno,
                f"expected relation,first,second,start,end, got {line!r}")
        try:
            relation = AllenRelation(parts[0])
        except ValueError:
            raise ParseError(path, lineno,
                             f"unknown relation {parts[0]!r}") from None
        start = _int(path, lineno, parts[3], "start time")
        end = _int(path, lineno, parts[4], "end time")
        relations.append(CausalRelation(relation, parts[1], parts[2],
                                        start, end))
    return RelationEpisode(tuple(relations), ga_label)


# -- knowledge base ----------------------------------------------------------

def _mapping_lines(mapping: Mapping[str, Iterable[str]]) -> list[str]:
    return [f"{key},{';'.join(sorted(values))}"
            for key, values in sorted(mapping.items())]


def write_knowledge_base(kb: KnowledgeBase, path) -> None:
    lines = ["is_about:"]
    lines += [f"{label},{ctx}" for label, ctx in sorted(kb.is_about.items())]
    lines.append("publishes:")
    lines += _mapping_lines(kb.publishes)
    lines.append("kind_of:")
    lines += [f"{src},{kind.value}" for src, kind in sorted(kb.kind_of.items())]
    lines.append("affects:")
    lines += _mapping_lines(kb.affects)
    lines.append("related_to:")
    lines += [f"{x},{y}" for x, y in sorted(kb.related_to)]
    lines.append("ga_specific_events:")
    lines += _mapping_lines(kb.ga_specific)
    _write(path, lines)


_KB_SECTIONS = ("is_about", "publishes", "kind_of", "affects", "related_to",
                "ga_specific_events")


def read_knowledge_base(path) -> KnowledgeBase:
    sections: dict[str, list[tuple[int, str]]] = {s: [] for s in _KB_SECTIONS}
    current: str | None = None
    for lineno, line in enumerate(_lines(path), 1):
        if not line.strip():
            continue
        if line.endswith(":") and line[:-1] in sections:
            current = line[:-1]
            continue
        if current is None:
            raise ParseError(path, lineno, f"content before any section: {line!r}")
        sections[current].append((lineno, line))

    def split2(lineno: int, line: str) -> tuple[str, str]:
        if "," not in line:
            raise ParseError(path, lineno, f"expected 'key,value', got {line!r}")
        key, _, rest = line.partition(",")
        return key, rest

    def as_set_mapping(name: str) -> dict[str, frozenset[str]]:
        out = {}
        for lineno, line in sections[name]:
            key, rest = split2(lineno, line)
            out[key] = frozenset(v for v in rest.split(";") if v)
        return out

    is_about = dict(split2(ln, line) for ln, line in sections["is_about"])
    kind_of = {}
    for lineno, line in sections["kind_of"]:
        src, token = split2(lineno, line)
        kind_of[src] = _kind(path, lineno, token)
    related = set()
    for lineno, line in sections["related_to"]:
        x, y = split2(lineno, line)
        related.add((x, y))
    return KnowledgeBase(
        is_about=is_about,
        publishes=as_set_mapping("publishes"),
        kind_of=kind_of,
        affects=as_set_mapping("affects"),
        related_to=frozenset(related),
        ga_specific=as_set_mapping("ga_specific_events"),
    )


# -- pattern stores ----------------------------------------------------------

def write_pattern_store(store: PatternStore, path) -> None:
    lines = []
    for ga in store.names():
        trained = store.activities[ga]
        lines.append(f"ga:{ga}")
        lines.append(f"threshold:{trained.threshold!r}")
        lines += [f"{p.support!r}\t{p.depth}\t{p.render()}"
                  for p in trained.patterns]
    _write(path, lines)


def read_pattern_store(path) -> PatternStore:
    activities: dict[str, TrainedActivity] = {}
    ga: str | None = None
    threshold: float | None = None
    patterns: list[Pattern] = []

    def flush(lineno: int) -> None:
        if ga is None:
            return
        if threshold is None:
            raise ParseError(path, lineno, f"activity {ga!r} has no threshold")
        activities[ga] = TrainedActivity(tuple(patterns), threshold)

    lines = _lines(path)
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        if line.startswith("ga:"):
            flush(lineno)
            ga = line[len("ga:"):]
            threshold = None
            patterns = []
        elif line.startswith("threshold:"):
            if ga is None:
                raise ParseError(path, lineno, "threshold before any activity")
            threshold = _float(path, lineno, line[len("threshold:"):],
                               "threshold")
        else:
            if ga is None:
                raise ParseError(path, lineno, "pattern before any activity")
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(
                    path, lineno,
                    f"expected support<TAB>depth<TAB>pattern, got {line!r}")
            support = _float(path, lineno, parts[0], "support")
            depth = _int(path, lineno, parts[1], "depth")
            try:
                elements = parse_pattern(parts[2])
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
            if depth != sum(len(e) for e in elements):
                raise ParseError(path, lineno,
                                 f"depth {depth} does not match pattern "
                                 f"{render_pattern(elements)!r}")
            patterns.append(Pattern(elements, support, depth))
    flush(len(lines) + 1)
    return PatternStore(activities)


# -- predictions -------------------------------------------------------------

def write_predictions(rows: Sequence[tuple[str, Recognition]], path) -> None:
    lines = []
    for episode_id, rec in rows:
        pairs = " ".join(f"{s.activity}={s.likelihood!r}" for s in rec.scores)
        lines.append(f"{episode_id}\t{rec.predicted}\t{pairs}")
    _write(path, lines)


def read_predictions(path) -> list[tuple[str, str, dict[str, float]]]:
    out = []
    for lineno, line in enumerate(_lines(path), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(path, lineno, "expected 3 tab-separated fields")
        likelihoods = {}
        for token in parts[2].split():
            if "=" not in token:
                raise ParseError(path, lineno, f"bad likelihood pair {token!r}")
            name, _, value = token.partition("=")
            likelihoods[name] = _float(path, lineno, value, "likelihood")
        out.append((parts[0], parts[1], likelihoods))
    return out


# -- corpus directories ------------------------------------------------------

def write_corpus_dir(corpus: Corpus, directory) -> None:
    root = Path(directory)
    (root / "episodes").mkdir(parents=True, exist_ok=True)
    write_registry(corpus.registry, root / "registry.txt")
    if corpus.declared_affects is not None:
        _write(root / "affects.txt", _mapping_lines(corpus.declared_affects))
    if corpus.declared_related_to is not None:
        _write(root / "related_to.txt",
               [f"{x},{y}" for x, y in sorted(corpus.declared_related_to)])
    counter = 0
    for ga in sorted(corpus.episodes):
        for episode in corpus.episodes[ga]:
            counter += 1
            write_episode(episode, root / "episodes" / f"e{counter:04d}.txt")


def load_corpus_dir(directory) -> Corpus:
    root = Path(directory)
    registry = read_registry(root / "registry.txt")
    declared_affects = None
    affects_path = root / "affects.txt"
    if affects_path.exists():
        declared_affects = {}
        for lineno, line in enumerate(_lines(affects_path), 1):
            if not line.strip():
                continue
            if "," not in line:
                raise ParseError(affects_path, lineno,
                                 f"expected 'ga,ctx;ctx', got {line!r}")
            ga, _, rest = line.partition(",")
            declared_affects[ga] = frozenset(v for v in rest.split(";") if v)
    declared_related = None
    related_path = root / "related_to.txt"
    if related_path.exists():
        pairs = set()
        for lineno, line in enumerate(_lines(related_path), 1):
            if not line.strip():
                continue
            if "," not in line:
                raise ParseError(related_path, lineno,
                                 f"expected 'ctx,ctx', got {line!r}")
            x, _, y = line.partition(",")
            pairs.add((x, y))
        declared_related = frozenset(pairs)
    episodes: dict[str, list[Episode]] = {}
    ep_dir = root / "episodes"
    if not ep_dir.is_dir():
        raise ParseError(ep_dir, 0, "missing episodes directory")
    for ep_path in sorted(ep_dir.glob("*.txt")):
        episode = read_episode(ep_path)
        if episode.ga_label is None:
            raise ParseError(ep_path, 1, "corpus episode lacks a ga_label")
        episodes.setdefault(episode.ga_label, []).append(episode)
    return Corpus(registry,
                  {ga: tuple(eps) for ga, eps in sorted(episodes.items())},
                  declared_affects, declared_related)
