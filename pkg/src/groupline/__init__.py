"""groupline: build, score, and audit headline-grouping datasets from annotated timelines."""

from .corpus import (
    AnnotationSet,
    Headline,
    LabeledPair,
    Partition,
    Timeline,
    day_difference,
    parse_annotation_set,
    parse_timeline,
    read_hlgd,
    read_partition_csv,
    write_annotation_csv,
    write_hlgd,
    write_partition_csv,
)
from .merging import (
    AgreementReport,
    CoGroupGraph,
    adjusted_mutual_information,
    build_cogroup_graph,
    leave_one_out_agreement,
    louvain_partition,
    merge_annotations,
    modularity,
)
from .pairs import CorpusStats, PairBuildConfig, corpus_stats, generate_labeled_pairs
from .scoring import (
    ConditionalLM,
    LevenshteinScorer,
    NgramLM,
    PairScorer,
    PairView,
    SubprocessLM,
    SwapScorer,
    SymmetrizedScorer,
    TimeLogistic,
    TimeOnlyScorer,
    fit_time_logistic,
    levenshtein_distance,
    levenshtein_ratio,
    load_preset,
    swap_score,
    symmetrize,
    time_decay,
    train_ngram_backend,
    tune_threshold,
)
from .evaluation import EvalReport, MetricBlock, evaluate_scorer, f1_score, human_performance
from .consistency import (
    CommutativeReport,
    TransitiveReport,
    commutative_audit,
    transitive_audit,
)

__version__ = "0.1.0"
