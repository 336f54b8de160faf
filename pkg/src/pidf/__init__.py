"""Per-feature information decomposition for tabular data.

Estimates, for every feature of a dataset, its mutual information with the
target, the extra information it unlocks jointly with other features
(synergy), and the portion of its information other features already carry
(redundancy), then selects a minimal feature subset from those quantities.
"""

from .types import (
    BITS,
    NATS,
    TARGET,
    ColumnKind,
    Confusion,
    ConfigError,
    Dataset,
    DatasetError,
    EstimateEnsemble,
    EstimatorError,
    FeatureSubset,
    InfoValue,
    OracleUnsupportedError,
    PidfError,
    PidfFeatureResult,
    PidfReport,
    SelectionResult,
    SubsetCapError,
    convert_units,
    infer_kinds,
    validate_dataset,
)
from .estimators import (
    Binned,
    EstimatorConfig,
    ExactDiscrete,
    Ksg,
    Mine,
    MineConfig,
    estimate_entropy,
    estimate_mi,
)
from .pidf import (
    DEFAULT_ALPHA,
    DEFAULT_EPS_ZERO,
    FeatureTrace,
    MiCache,
    PidfTrace,
    ThetaEvaluation,
    brute_force_fws,
    default_config,
    is_redundant,
    run_pidf,
    significantly_positive,
    theta,
)
from .selection import confusion_counts, select_features
from .oracle import (
    ExactOracle,
    OracleFeature,
    OraclePidf,
    TheoremReport,
    check_theorems,
    oracle_entropy,
    oracle_mi,
    oracle_pidf,
    oracle_theta,
)
from .datasets import (
    BENCHMARK_IDS,
    DATASET_IDS,
    GROUND_TRUTH,
    GeneratorSpec,
    duplicate_feature,
    generate,
    population_table,
)
from .report import (
    dataset_fingerprint,
    read_csv,
    render_json,
    render_svg,
    report_payload,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BENCHMARK_IDS",
    "BITS",
    "Binned",
    "ColumnKind",
    "Confusion",
    "ConfigError",
    "DATASET_IDS",
    "DEFAULT_ALPHA",
    "DEFAULT_EPS_ZERO",
    "Dataset",
    "DatasetError",
    "EstimateEnsemble",
    "EstimatorConfig",
    "EstimatorError",
    "ExactDiscrete",
    "ExactOracle",
    "FeatureSubset",
    "FeatureTrace",
    "MiCache",
    "GROUND_TRUTH",
    "GeneratorSpec",
    "InfoValue",
    "Ksg",
    "Mine",
    "MineConfig",
    "NATS",
    "OracleFeature",
    "OraclePidf",
    "OracleUnsupportedError",
    "PidfError",
    "PidfFeatureResult",
    "PidfReport",
    "PidfTrace",
    "SelectionResult",
    "SubsetCapError",
    "TARGET",
    "TheoremReport",
    "ThetaEvaluation",
    "brute_force_fws",
    "check_theorems",
    "confusion_counts",
    "convert_units",
    "dataset_fingerprint",
    "default_config",
    "duplicate_feature",
    "estimate_entropy",
    "estimate_mi",
    "generate",
    "infer_kinds",
    "is_redundant",
    "oracle_entropy",
    "oracle_mi",
    "oracle_pidf",
    "oracle_theta",
    "population_table",
    "read_csv",
    "render_json",
    "render_svg",
    "report_payload",
    "run_pidf",
    "select_features",
    "significantly_positive",
    "theta",
    "validate_dataset",
    "write_csv",
]
