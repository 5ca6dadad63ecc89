"""Group-activity recognition from anonymous smart-space sensor streams.

Pipeline: raw source records become labeled event episodes, event pairs
become temporal-relation symbols filtered by a causality knowledge base,
frequent relation patterns are mined per activity at a calibrated support
threshold, and unlabeled episodes are recognized by exponentially penalizing
each activity's unmatched pattern mass.
"""

from .errors import (CausalgarError, ConfigError, EmptyGA, EmptyStore,
                     InsufficientData, InvalidThreshold, MissingLabel,
                     NonFiniteValue, ParseError, UnknownContext, UnknownEvent,
                     UnknownGA, UnknownSource, UnknownValue)
from .events import (Corpus, Episode, Event, RawRecord, SmartObjectKind,
                     SourceRegistry, SourceSpec, build_episode,
                     convert_actuator_stream, convert_sensor_stream,
                     convert_streams)
from .knowledge import (ImportanceScore, KnowledgeBase, build_knowledge_base,
                        context_importance, induce_affects, induce_related_to,
                        ordered_set_importance)
from .relations import (AllenRelation, CausalRelation, RelationEpisode,
                        classify_allen, emphasize_ga_specific,
                        extract_causal_relations, split_event)
from .mining import (CalibrationResult, Pattern, PatternStore,
                     SequenceDatabase, TrainedActivity,
                     build_sequence_database, calibrate_threshold,
                     flatten_database, mine, parse_pattern, render_pattern,
                     train)
from .recognize import (ActivityScore, Recognition, episode_row,
                        pattern_matches, recognize, score_activity)
from .metrics import ClassMetrics, EvaluationReport, evaluate_predictions
from .evaluate import (AblationMode, HarnessSettings, NoiseSpec, RuntimeRow,
                       SweepRow, ablation_table, build_kb, inject_noise,
                       loocv, loocv_noisy_training, measure_runtime,
                       noise_trend, preprocess_corpus, resolve_n_split,
                       run_ablation, sweep_pattern_count, train_store)
from .config import Config, load_config, with_overrides

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
