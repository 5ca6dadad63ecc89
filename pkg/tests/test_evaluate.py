"""Cross-validation harness, ablations, noise and runtime experiments."""

import pytest

from causalgar import (
    AblationMode,
    HarnessSettings,
    InsufficientData,
    NoiseSpec,
    ablation_table,
    build_kb,
    inject_noise,
    loocv,
    loocv_noisy_training,
    measure_runtime,
    noise_trend,
    preprocess_corpus,
    resolve_n_split,
    run_ablation,
    sweep_pattern_count,
    synthetic,
)

FAST = HarnessSettings(target_pattern_count=10, max_depth=3)


def disjoint_corpus(episodes_per_ga=6, seed=3):
    # two activities that never share an actuator label
    registry = synthetic.two_actuator_registry()
    scripts = {
        "Alpha": ["SeatBusy", "SeatBusy", "SeatFree"],
        "Beta": ["DoorOpen", "DoorClosed", "DoorOpen"],
    }
    return synthetic.script_corpus(registry, scripts,
                                   episodes_per_ga=episodes_per_ga, seed=seed)


def twin_corpus():
    # both activities replay the same script, so folds are pure ties
    registry = synthetic.two_actuator_registry()
    scripts = {"A": ["SeatBusy", "DoorOpen"], "B": ["SeatBusy", "DoorOpen"]}
    return synthetic.script_corpus(registry, scripts, episodes_per_ga=5,
                                   seed=4, dur_jitter=0, gap_jitter=0)


# -- ablation modes --------------------------------------------------------------

def test_mode_flags():
    # the order-blind baseline flattens itemset order away; the ft variants
    # drop weakly informative gap relations; the ga variants split events
    assert AblationMode.ASSOC_RULE.flattens
    assert not AblationMode.ASSOC_RULE.filters_after
    assert not AblationMode.SEQ_PATTERN.filters_after
    assert not AblationMode.SEQ_PATTERN.flattens
    assert AblationMode.SEQ_PATTERN_FT.filters_after
    assert AblationMode.SEQ_PATTERN_GA.emphasizes
    assert not AblationMode.SEQ_PATTERN_GA.filters_after
    assert AblationMode.SEQ_PATTERN_FT_GA.filters_after
    assert AblationMode.SEQ_PATTERN_FT_GA.emphasizes


def test_mode_from_name():
    assert AblationMode.from_name("seq_pattern_ga") is AblationMode.SEQ_PATTERN_GA
    with pytest.raises(ValueError):
        AblationMode.from_name("bogus")


# -- fold layout ------------------------------------------------------------------

def test_resolve_n_split_constant():
    corpus = disjoint_corpus()
    kb = build_kb(corpus, HarnessSettings())
    assert resolve_n_split(corpus, kb, 7) == {"Alpha": 7, "Beta": 7}
    with pytest.raises(ValueError):
        resolve_n_split(corpus, kb, 0)
    with pytest.raises(ValueError):
        resolve_n_split(corpus, kb, "weird")


def test_resolve_n_split_auto_tracks_duration_ratio():
    # the pager fires briefly inside long ambient runs, so its activity
    # earns a large split count while the other collapses to 1
    corpus = synthetic.rare_actuator_corpus(4, 12, seed=2)
    kb = build_kb(corpus, HarnessSettings())
    assert resolve_n_split(corpus, kb, "auto") == {"Huddle": 12, "Standup": 1}


def test_preprocessing_emphasis_touches_training_only():
    corpus = synthetic.rare_actuator_corpus(4, 12, seed=2)
    kb = build_kb(corpus, HarnessSettings())

    def symbols(rels_by_ga):
        return {r.symbol for eps in rels_by_ga.values()
                for ep in eps for r in ep.relations}

    plain_train, plain_test = preprocess_corpus(
        corpus, kb, HarnessSettings(mode=AblationMode.SEQ_PATTERN))
    ga_train, ga_test = preprocess_corpus(
        corpus, kb, HarnessSettings(mode=AblationMode.SEQ_PATTERN_GA))
    assert ga_test == plain_test
    extra = symbols(ga_train) - symbols(plain_train)
    assert extra, "splitting the rare actuator must add fragment relations"
    assert any("PagerOn" in s for s in extra)


# -- leave-one-out ----------------------------------------------------------------

def test_loocv_separates_disjoint_alphabets():
    report = loocv(disjoint_corpus(), FAST)
    assert report.macro_f1 == 1.0
    assert report.accuracy == 1.0


def test_loocv_on_identical_activities_halves_recall():
    # every fold is an exact tie, broken the same way each time
    report = loocv(twin_corpus(), FAST)
    assert report.macro_recall == pytest.approx(0.5)
    assert report.accuracy == pytest.approx(0.5)


def test_loocv_needs_two_episodes_per_activity():
    registry = synthetic.two_actuator_registry()
    corpus = synthetic.script_corpus(registry, {"Solo": ["SeatBusy"]},
                                     episodes_per_ga=1, seed=1)
    with pytest.raises(InsufficientData):
        loocv(corpus, FAST)


def test_kb_per_fold_matches_shared_kb_here():
    corpus = disjoint_corpus()
    shared = loocv(corpus, FAST)
    per_fold = loocv(corpus, HarnessSettings(
        target_pattern_count=10, max_depth=3, kb_per_fold=True))
    assert per_fold.confusion == shared.confusion


def test_parallel_loocv_matches_serial():
    corpus = disjoint_corpus()
    assert loocv(corpus, FAST, jobs=2) == loocv(corpus, FAST, jobs=1)


# -- ablations and sweeps ---------------------------------------------------------

def test_ablation_table_covers_every_mode():
    table = ablation_table(disjoint_corpus(), FAST)
    assert set(table) == set(AblationMode)
    assert table[AblationMode.SEQ_PATTERN].macro_f1 == 1.0
    direct = run_ablation(disjoint_corpus(), AblationMode.ASSOC_RULE, FAST)
    assert table[AblationMode.ASSOC_RULE].confusion == direct.confusion


def test_sweep_rows_align_with_requested_counts():
    corpus = disjoint_corpus()
    rows = sweep_pattern_count(corpus, [5, 10], FAST)
    assert [r.target_count for r in rows] == [5, 10]
    for row in rows:
        assert set(row.thresholds) == {"Alpha", "Beta"}
        assert row.macro_f1 == row.report.macro_f1
    assert sweep_pattern_count(corpus, [], FAST) == []
    with pytest.raises(ValueError):
        sweep_pattern_count(corpus, [5, 0], FAST)


# -- noise ------------------------------------------------------------------------

def test_noise_spec_validates_probabilities():
    for bad in (-0.1, 1.5):
        with pytest.raises(ValueError):
            NoiseSpec(bad)
    with pytest.raises(ValueError):
        NoiseSpec(0.5, missing_probability=2.0)
    with pytest.raises(ValueError):
        NoiseSpec(0.5, false_probability=-1.0)


def test_inject_noise_zero_ratio_is_identity():
    corpus = disjoint_corpus()
    assert inject_noise(corpus, NoiseSpec(0.0)).episodes == corpus.episodes


def test_inject_noise_is_seed_deterministic():
    corpus = disjoint_corpus()
    a = inject_noise(corpus, NoiseSpec(0.5, seed=9))
    b = inject_noise(corpus, NoiseSpec(0.5, seed=9))
    assert a.episodes == b.episodes


def test_inject_noise_with_zero_probabilities_changes_nothing():
    corpus = disjoint_corpus()
    spec = NoiseSpec(1.0, missing_probability=0.0, false_probability=0.0)
    assert inject_noise(corpus, spec).episodes == corpus.episodes


def test_false_events_double_episode_length():
    corpus = disjoint_corpus()
    spec = NoiseSpec(1.0, missing_probability=0.0, false_probability=1.0)
    noisy = inject_noise(corpus, spec)
    for ga, episodes in corpus.episodes.items():
        for clean, dirty in zip(episodes, noisy.episodes[ga]):
            assert len(dirty.events) == 2 * len(clean.events)
            vocab = corpus.registry.vocabulary()
            assert all(e.label in vocab for e in dirty.events)


def test_noisy_training_still_evaluates_clean_episodes():
    corpus = disjoint_corpus()
    report = loocv_noisy_training(
        corpus, NoiseSpec(0.0, seed=1), FAST)
    assert report.confusion == loocv(corpus, FAST).confusion


def test_noise_trend_rows_align_with_ratios():
    trend = noise_trend(disjoint_corpus(4), [0.0, 0.5], FAST, seed=2)
    assert [r for r, _ in trend] == [0.0, 0.5]
    assert all(0.0 <= rep.macro_f1 <= 1.0 for _, rep in trend)


# -- runtime ----------------------------------------------------------------------

def test_measure_runtime_validates_sizes():
    corpus = disjoint_corpus(4)  # 8 episodes, 2 activities
    with pytest.raises(ValueError):
        measure_runtime(corpus, [100], FAST)
    with pytest.raises(ValueError):
        measure_runtime(corpus, [3], FAST)


def test_measure_runtime_repeats_at_least_three_times():
    corpus = disjoint_corpus(4)
    rows = measure_runtime(corpus, [4, 8], FAST, reps=1)
    assert [r.size for r in rows] == [4, 8]
    for row in rows:
        assert len(row.rep_seconds) == 3
        assert row.mean_seconds == pytest.approx(
            sum(row.rep_seconds) / 3)
        assert row.mean_seconds >= 0.0
