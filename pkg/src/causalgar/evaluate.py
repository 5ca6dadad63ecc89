"""Experiment harness: cross validation, ablations, sweeps, noise, runtime.

Pipeline per training episode: optional emphasis of activity-specific
actuator events, pairwise temporal-relation extraction with optional
causality filtering, then per-activity pattern mining at a calibrated support
threshold. Test episodes skip emphasis (their label is what recognition must
produce) but share the same relation extraction.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

from .errors import InsufficientData
from .events import Corpus, Episode, Event, SmartObjectKind, build_episode
from .knowledge import KnowledgeBase, build_knowledge_base
from .metrics import EvaluationReport, evaluate_predictions
from .mining import PatternStore, train
from .recognize import recognize
from .relations import (RelationEpisode, emphasize_ga_specific,
                        extract_causal_relations)


class AblationMode(Enum):
    ASSOC_RULE = "assoc_rule"
    SEQ_PATTERN = "seq_pattern"
    SEQ_PATTERN_FT = "seq_pattern_ft"
    SEQ_PATTERN_GA = "seq_pattern_ga"
    SEQ_PATTERN_FT_GA = "seq_pattern_ft_ga"

    @property
    def filters_after(self) -> bool:
        return self in (AblationMode.SEQ_PATTERN_FT,
                        AblationMode.SEQ_PATTERN_FT_GA)

    @property
    def emphasizes(self) -> bool:
        return self in (AblationMode.SEQ_PATTERN_GA,
                        AblationMode.SEQ_PATTERN_FT_GA)

    @property
    def flattens(self) -> bool:
        # co-occurrence itemsets only, no sequence structure
        return self is AblationMode.ASSOC_RULE

    @classmethod
    def from_name(cls, name: str) -> "AblationMode":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown ablation mode {name!r}; choose from "
                f"{', '.join(m.value for m in cls)}") from None


@dataclass(frozen=True)
class HarnessSettings:
    mode: AblationMode = AblationMode.SEQ_PATTERN
    target_pattern_count: int = 50
    max_depth: int | None = 6
    n_split: int | str = 10  # count, or "auto"
    pairing_horizon: int | None = None
    kb_aggregation: str = "min"
    # rebuild the knowledge base inside every fold instead of once per corpus
    kb_per_fold: bool = False


def build_kb(corpus: Corpus, settings: HarnessSettings,
             training: Mapping[str, Sequence[Episode]] | None = None) -> KnowledgeBase:
    return build_knowledge_base(
        corpus.registry,
        training=corpus.episodes if training is None else training,
        declared_affects=corpus.declared_affects,
        declared_related_to=corpus.declared_related_to,
        aggregation=settings.kb_aggregation,
    )


def resolve_n_split(corpus: Corpus, kb: KnowledgeBase,
                    setting: int | str) -> dict[str, int]:
    """Per-activity split factor. "auto" uses the ratio of mean ambient-event
    count to mean activity-specific event count, clamped to [1, 50]."""
    if isinstance(setting, int):
        if setting < 1:
            raise ValueError(f"n_split must be >= 1, got {setting}")
        return {ga: setting for ga in corpus.episodes}
    if setting != "auto":
        raise ValueError(f"n_split must be a count or 'auto', got {setting!r}")
    out = {}
    for ga, eps in corpus.episodes.items():
        specific = kb.ga_specific_events(ga) if ga in kb.affects else frozenset()
        n_perv = sum(1 for ep in eps for e in ep.events
                     if e.source_kind is SmartObjectKind.PERVASIVE_SENSOR)
        n_spec = sum(1 for ep in eps for e in ep.events if e.label in specific)
        if n_spec == 0 or not eps:
            out[ga] = 1
            continue
        ratio = (n_perv / len(eps)) / (n_spec / len(eps))
        out[ga] = min(50, max(1, round(ratio)))
    return out


def preprocess_corpus(corpus: Corpus, kb: KnowledgeBase, settings: HarnessSettings,
                ) -> tuple[dict[str, list[RelationEpisode]],
                           dict[str, list[RelationEpisode]]]:
    """Relation episodes for training (with emphasis when the mode asks for
    it) and for testing (never emphasized), aligned by index."""
    n_split = resolve_n_split(corpus, kb, settings.n_split)
    train_rels: dict[str, list[RelationEpisode]] = {}
    test_rels: dict[str, list[RelationEpisode]] = {}
    for ga in sorted(corpus.episodes):
        train_rels[ga] = []
        test_rels[ga] = []
        for ep in corpus.episodes[ga]:
            trainable = ep
            if settings.mode.emphasizes:
                trainable = emphasize_ga_specific(ep, kb, n_split[ga])
            train_rels[ga].append(extract_causal_relations(
                trainable, kb, settings.pairing_horizon,
                filter_after=settings.mode.filters_after))
            test_rels[ga].append(extract_causal_relations(
                ep, kb, settings.pairing_horizon,
                filter_after=settings.mode.filters_after))
    return train_rels, test_rels


def train_store(corpus: Corpus, settings: HarnessSettings) -> PatternStore:
    """Full-corpus training: the non-cross-validated pipeline."""
    kb = build_kb(corpus, settings)
    train_rels, _ = preprocess_corpus(corpus, kb, settings)
    return train(train_rels, settings.target_pattern_count,
                 settings.max_depth, flatten=settings.mode.flattens)


def _fold_prediction(train_rels: Mapping[str, Sequence[RelationEpisode]],
                     test_rel: RelationEpisode, held: tuple[str, int],
                     settings: HarnessSettings) -> str:
    ga, idx = held
    per_ga = {g: [r for j, r in enumerate(rels) if (g, j) != (ga, idx)]
              for g, rels in train_rels.items()}
    store = train(per_ga, settings.target_pattern_count, settings.max_depth,
                  flatten=settings.mode.flattens)
    return recognize(store, test_rel, flatten=settings.mode.flattens).predicted


_WORKER: dict = {}


def _init_worker(train_rels, test_rels, settings) -> None:
    _WORKER["train_rels"] = train_rels
    _WORKER["test_rels"] = test_rels
    _WORKER["settings"] = settings


def _run_worker(fold: tuple[str, int]) -> str:
    ga, idx = fold
    return _fold_prediction(_WORKER["train_rels"],
                            _WORKER["test_rels"][ga][idx], fold,
                            _WORKER["settings"])


def _loocv_prepared(train_rels: dict[str, list[RelationEpisode]],
                    test_rels: dict[str, list[RelationEpisode]],
                    settings: HarnessSettings, jobs: int = 1) -> EvaluationReport:
    folds = [(ga, idx) for ga in sorted(test_rels)
             for idx in range(len(test_rels[ga]))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(train_rels, test_rels, settings)) as pool:
            preds = list(pool.map(_run_worker, folds, chunksize=4))
    else:
        preds = [_fold_prediction(train_rels, test_rels[ga][idx], (ga, idx),
                                  settings)
                 for ga, idx in folds]
    truths = [ga for ga, _ in folds]
    return evaluate_predictions(truths, preds)


def loocv(corpus: Corpus, settings: HarnessSettings = HarnessSettings(),
          jobs: int = 1) -> EvaluationReport:
    """Leave-one-out cross validation over every episode of the corpus."""
    for ga, eps in corpus.episodes.items():
        if len(eps) < 2:
            raise InsufficientData(
                f"activity {ga!r} has {len(eps)} episodes; need at least 2")
    if settings.kb_per_fold:
        return _loocv_kb_per_fold(corpus, settings)
    kb = build_kb(corpus, settings)
    train_rels, test_rels = preprocess_corpus(corpus, kb, settings)
    return _loocv_prepared(train_rels, test_rels, settings, jobs)


def _loocv_kb_per_fold(corpus: Corpus,
                       settings: HarnessSettings) -> EvaluationReport:
    truths, preds = [], []
    for ga in sorted(corpus.episodes):
        for idx in range(len(corpus.episodes[ga])):
            held_out = corpus.episodes[ga][idx]
            fold_eps = {g: tuple(e for j, e in enumerate(eps)
                                 if (g, j) != (ga, idx))
                        for g, eps in corpus.episodes.items()}
            fold_corpus = replace(corpus, episodes=fold_eps)
            kb = build_kb(fold_corpus, settings)
            train_rels, _ = preprocess_corpus(fold_corpus, kb, settings)
            store = train(train_rels, settings.target_pattern_count,
                          settings.max_depth, flatten=settings.mode.flattens)
            test_rel = extract_causal_relations(
                held_out, kb, settings.pairing_horizon,
                filter_after=settings.mode.filters_after)
            preds.append(recognize(store, test_rel,
                                   flatten=settings.mode.flattens).predicted)
            truths.append(ga)
    return evaluate_predictions(truths, preds)


def run_ablation(corpus: Corpus, mode: AblationMode,
                 settings: HarnessSettings = HarnessSettings(),
                 jobs: int = 1) -> EvaluationReport:
    return loocv(corpus, replace(settings, mode=mode), jobs)


def ablation_table(corpus: Corpus,
                   settings: HarnessSettings = HarnessSettings(),
                   jobs: int = 1) -> dict[AblationMode, EvaluationReport]:
    return {mode: run_ablation(corpus, mode, settings, jobs)
            for mode in AblationMode}


@dataclass(frozen=True)
class SweepRow:
    target_count: int
    thresholds: Mapping[str, float]
    macro_f1: float
    report: EvaluationReport


def sweep_pattern_count(corpus: Corpus, counts: Sequence[int],
                        settings: HarnessSettings = HarnessSettings(),
                        jobs: int = 1) -> list[SweepRow]:
    for c in counts:
        if c < 1:
            raise ValueError(f"pattern counts must be positive, got {c}")
    rows = []
    for count in counts:
        at = replace(settings, target_pattern_count=count)
        report = loocv(corpus, at, jobs)
        store = train_store(corpus, at)
        thresholds = {ga: act.threshold
                      for ga, act in sorted(store.activities.items())}
        rows.append(SweepRow(count, thresholds, report.macro_f1, report))
    return rows


@dataclass(frozen=True)
class NoiseSpec:
    noisy_episode_ratio: float
    missing_probability: float = 0.1
    false_probability: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("noisy_episode_ratio", "missing_probability",
                     "false_probability"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


def _corrupt_episode(ep: Episode, corpus: Corpus, rng: random.Random,
                     spec: NoiseSpec) -> Episode:
    kept = [e for e in ep.events if rng.random() >= spec.missing_probability]
    lo, hi = ep.span() if len(ep) else (0, 1)
    vocabulary = sorted(corpus.registry.vocabulary())
    inserted = []
    for _ in range(len(ep.events)):
        if rng.random() < spec.false_probability:
            label = rng.choice(vocabulary)
            a = rng.randint(lo, hi)
            b = rng.randint(lo, hi)
            inserted.append(Event(label, min(a, b), max(a, b),
                                  corpus.registry.kind_of_label(label)))
    return build_episode(kept + inserted, ep.ga_label)


def inject_noise(corpus: Corpus, spec: NoiseSpec) -> Corpus:
    """Corrupt ceil(ratio * N) episodes chosen uniformly by the seed: each
    event independently dropped, and false events drawn from the registry
    vocabulary inserted, at the configured probabilities."""
    rng = random.Random(spec.seed)
    keys = [(ga, idx) for ga in sorted(corpus.episodes)
            for idx in range(len(corpus.episodes[ga]))]
    n_noisy = math.ceil(spec.noisy_episode_ratio * len(keys))
    chosen = set(rng.sample(keys, n_noisy)) if n_noisy else set()
    episodes = {}
    for ga in sorted(corpus.episodes):
        eps = []
        for idx, ep in enumerate(corpus.episodes[ga]):
            if (ga, idx) in chosen:
                eps.append(_corrupt_episode(ep, corpus, rng, spec))
            else:
                eps.append(ep)
        episodes[ga] = tuple(eps)
    return replace(corpus, episodes=episodes)


def loocv_noisy_training(corpus: Corpus, spec: NoiseSpec,
                         settings: HarnessSettings = HarnessSettings(),
                         jobs: int = 1) -> EvaluationReport:
    """LOOCV where folds train on the corrupted corpus but every held-out
    episode is tested in its clean form: noise burdens only training."""
    noisy = inject_noise(corpus, spec)
    kb = build_kb(noisy, settings)
    train_rels, _ = preprocess_corpus(noisy, kb, settings)
    _, test_rels = preprocess_corpus(corpus, kb, settings)
    return _loocv_prepared(train_rels, test_rels, settings, jobs)


def noise_trend(corpus: Corpus, ratios: Sequence[float],
                settings: HarnessSettings = HarnessSettings(),
                missing: float = 0.1, false: float = 0.1, seed: int = 0,
                jobs: int = 1) -> list[tuple[float, EvaluationReport]]:
    out = []
    for ratio in ratios:
        spec = NoiseSpec(ratio, missing, false, seed)
        out.append((ratio, loocv_noisy_training(corpus, spec, settings, jobs)))
    return out


@dataclass(frozen=True)
class RuntimeRow:
    size: int
    mean_seconds: float
    rep_seconds: tuple[float, ...] = field(repr=False, default=())


def _subsample(corpus: Corpus, size: int, rng: random.Random) -> Corpus:
    total = corpus.total_episodes()
    gas = sorted(corpus.episodes)
    avail = {ga: len(corpus.episodes[ga]) for ga in gas}
    # proportional allocation, at least 2 episodes per activity
    alloc = {ga: min(avail[ga], max(2, round(size * avail[ga] / total)))
             for ga in gas}
    diff = sum(alloc.values()) - size
    while diff > 0:
        ga = max(gas, key=lambda g: alloc[g])
        if alloc[ga] <= 2:
            break
        alloc[ga] -= 1
        diff -= 1
    while diff < 0:
        ga = max(gas, key=lambda g: avail[g] - alloc[g])
        if alloc[ga] >= avail[ga]:
            break
        alloc[ga] += 1
        diff += 1
    episodes = {}
    for ga in gas:
        idx = sorted(rng.sample(range(avail[ga]), alloc[ga]))
        episodes[ga] = tuple(corpus.episodes[ga][i] for i in idx)
    return replace(corpus, episodes=episodes)


def measure_runtime(corpus: Corpus, sizes: Sequence[int],
                    settings: HarnessSettings = HarnessSettings(),
                    reps: int = 3, seed: int = 0) -> list[RuntimeRow]:
    """Wall-clock of train-plus-recognize on random subsamples, averaged over
    at least `reps` repetitions with fresh subsamples each time."""
    total = corpus.total_episodes()
    for size in sizes:
        if size > total:
            raise ValueError(f"size {size} exceeds corpus ({total} episodes)")
        if size < 2 * len(corpus.episodes):
            raise ValueError(f"size {size} cannot cover 2 episodes per activity")
    reps = max(3, reps)
    rng = random.Random(seed)
    rows = []
    for size in sizes:
        times = []
        for _ in range(reps):
            sub = _subsample(corpus, size, rng)
            t0 = time.perf_counter()
            kb = build_kb(sub, settings)
            train_rels, test_rels = preprocess_corpus(sub, kb, settings)
            store = train(train_rels, settings.target_pattern_count,
                          settings.max_depth, flatten=settings.mode.flattens)
            for ga in sorted(test_rels):
                for rel in test_rels[ga]:
                    recognize(store, rel, flatten=settings.mode.flattens)
            times.append(time.perf_counter() - t0)
        rows.append(RuntimeRow(size, sum(times) / len(times), tuple(times)))
    return rows
