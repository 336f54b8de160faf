"""Core value types shared across the library.

Everything here is estimator-agnostic: units, feature subsets, ensembles of
repeated estimates, dataset containers, and the per-feature result records
produced by the decomposition. All information values are stored in nats;
conversion to bits happens only at presentation time.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

LN2 = math.log(2.0)

NATS = "nats"
BITS = "bits"
_UNITS = (NATS, BITS)


class PidfError(Exception):
    """Base class for library errors."""


class ConfigError(PidfError):
    """Invalid configuration or argument combination."""


class DatasetError(PidfError):
    """Malformed, inconsistent, or unsupported input data."""


class EstimatorError(PidfError):
    """An estimator could not produce a finite estimate."""


class SubsetCapError(PidfError):
    """Exhaustive subset enumeration refused: too many features."""


class OracleUnsupportedError(PidfError):
    """Exact enumeration requested on data it cannot handle."""


class _TargetMarker:
    """Singleton marker naming the target column in group arguments."""

    _instance: "_TargetMarker | None" = None

    def __new__(cls) -> "_TargetMarker":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TARGET"


TARGET = _TargetMarker()


def convert_units(value_nats: float, unit: str) -> float:
    """Convert a value in nats to the requested output unit."""
    if unit == NATS:
        return value_nats
    if unit == BITS:
        return value_nats / LN2
    raise ConfigError(f"unknown unit {unit!r}; expected one of {_UNITS}")


@dataclass(frozen=True)
class ColumnKind:
    """Type tag for one column: discrete with a known cardinality, or continuous."""

    is_discrete: bool
    cardinality: int | None = None

    def __post_init__(self) -> None:
        if self.is_discrete:
            if self.cardinality is None or self.cardinality < 1:
                raise ConfigError("discrete columns need a cardinality >= 1")
        elif self.cardinality is not None:
            raise ConfigError("continuous columns take no cardinality")

    @staticmethod
    def discrete(cardinality: int) -> "ColumnKind":
        return ColumnKind(True, cardinality)

    @staticmethod
    def continuous() -> "ColumnKind":
        return ColumnKind(False, None)


@dataclass(frozen=True)
class FeatureSubset:
    """Immutable set of feature indices with set algebra and canonical order.

    Canonical form is a sorted tuple of unique non-negative ints, so equal
    subsets hash equally and iterate deterministically.
    """

    indices: tuple[int, ...]

    def __init__(self, indices: Iterable[int] = ()) -> None:
        canonical = tuple(sorted({int(i) for i in indices}))
        if canonical and canonical[0] < 0:
            raise ConfigError("feature indices must be non-negative")
        object.__setattr__(self, "indices", canonical)

    def __contains__(self, index: object) -> bool:
        return index in self.indices

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __bool__(self) -> bool:
        return bool(self.indices)

    def __or__(self, other: "FeatureSubset | Iterable[int]") -> "FeatureSubset":
        return FeatureSubset((*self.indices, *tuple(other)))

    def __sub__(self, other: "FeatureSubset | Iterable[int]") -> "FeatureSubset":
        drop = set(other)
        return FeatureSubset(i for i in self.indices if i not in drop)

    def __and__(self, other: "FeatureSubset | Iterable[int]") -> "FeatureSubset":
        keep = set(other)
        return FeatureSubset(i for i in self.indices if i in keep)

    def issubset(self, other: "FeatureSubset | Iterable[int]") -> bool:
        pool = set(other)
        return all(i in pool for i in self.indices)

    def add(self, index: int) -> "FeatureSubset":
        return FeatureSubset((*self.indices, index))

    def remove(self, index: int) -> "FeatureSubset":
        return FeatureSubset(i for i in self.indices if i != index)

    @staticmethod
    def of(*indices: int) -> "FeatureSubset":
        return FeatureSubset(indices)

    @staticmethod
    def full(n_features: int) -> "FeatureSubset":
        return FeatureSubset(range(n_features))

    def __repr__(self) -> str:
        inner = ", ".join(str(i) for i in self.indices)
        return f"FeatureSubset({{{inner}}})"


@dataclass(frozen=True)
class InfoValue:
    """A scalar information quantity tagged with its unit."""

    value: float
    unit: str = NATS

    def __post_init__(self) -> None:
        if self.unit not in _UNITS:
            raise ConfigError(f"unknown unit {self.unit!r}; expected one of {_UNITS}")

    def to(self, unit: str) -> "InfoValue":
        if unit == self.unit:
            return self
        if self.unit == NATS:
            return InfoValue(convert_units(self.value, unit), unit)
        return InfoValue(convert_units(self.value * LN2, unit), unit)

    @property
    def nats(self) -> float:
        return self.value if self.unit == NATS else self.value * LN2

    @property
    def bits(self) -> float:
        return self.value if self.unit == BITS else self.value / LN2


@dataclass(frozen=True)
class EstimateEnsemble:
    """Repeated estimates of one quantity, one per repetition seed.

    Deterministic estimators repeat the identical value; ``std`` is then
    exactly 0.0 and ``mean`` is exactly that value (the all-equal case is
    special-cased so float summation cannot smear the mean by an ulp).
    """

    estimates: tuple[float, ...]
    seeds: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.estimates) != len(self.seeds):
            raise ConfigError("estimates and seeds must have equal length")
        if not self.estimates:
            raise ConfigError("an ensemble needs at least one estimate")
        if not all(math.isfinite(e) for e in self.estimates):
            raise EstimatorError(f"non-finite estimate in ensemble: {self.estimates}")

    @property
    def n(self) -> int:
        return len(self.estimates)

    @property
    def mean(self) -> float:
        first = self.estimates[0]
        if all(e == first for e in self.estimates):
            return first
        return float(np.mean(self.estimates))

    @property
    def std(self) -> float:
        first = self.estimates[0]
        if all(e == first for e in self.estimates):
            return 0.0
        return float(np.std(self.estimates, ddof=1))

    @property
    def is_deterministic(self) -> bool:
        return self.n == 1 or self.std == 0.0

    @staticmethod
    def constant(value: float, seeds: Sequence[int]) -> "EstimateEnsemble":
        return EstimateEnsemble((float(value),) * len(seeds), tuple(seeds))

    @staticmethod
    def linear(
        terms: Sequence[tuple[float, "EstimateEnsemble"]],
    ) -> "EstimateEnsemble":
        """Per-seed linear combination ``sum(coef * ensemble)``.

        All ensembles must share the same seed tuple so that per-repetition
        values combine coherently.
        """
        if not terms:
            raise ConfigError("linear combination needs at least one term")
        seeds = terms[0][1].seeds
        for _, ens in terms:
            if ens.seeds != seeds:
                raise ConfigError("ensembles in a linear combination must share seeds")
        values = tuple(
            float(sum(coef * ens.estimates[r] for coef, ens in terms))
            for r in range(len(seeds))
        )
        return EstimateEnsemble(values, seeds)

    def map(self, fn: Any) -> "EstimateEnsemble":
        return EstimateEnsemble(tuple(float(fn(e)) for e in self.estimates), self.seeds)


@dataclass(frozen=True)
class Dataset:
    """A tabular dataset: feature matrix, target vector, and column kinds."""

    feature_names: tuple[str, ...]
    features: np.ndarray
    target: np.ndarray
    kinds: tuple[ColumnKind, ...]
    target_kind: ColumnKind
    target_name: str = "target"
    seed: int | None = None
    source: str = "memory"

    def __post_init__(self) -> None:
        feats = np.asarray(self.features, dtype=np.float64)
        tgt = np.asarray(self.target, dtype=np.float64)
        if feats.ndim != 2:
            raise DatasetError("features must be a 2-d array (n_samples, n_features)")
        if tgt.ndim != 1:
            raise DatasetError("target must be a 1-d array")
        if feats.shape[0] != tgt.shape[0]:
            raise DatasetError(
                f"row mismatch: {feats.shape[0]} feature rows vs {tgt.shape[0]} targets"
            )
        if feats.shape[0] == 0:
            raise DatasetError("dataset has no rows")
        if len(self.feature_names) != feats.shape[1]:
            raise DatasetError("feature_names length must match feature count")
        if len(self.kinds) != feats.shape[1]:
            raise DatasetError("kinds length must match feature count")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise DatasetError("feature names must be unique")
        if self.target_name in self.feature_names:
            raise DatasetError("target name collides with a feature name")
        if not np.all(np.isfinite(feats)):
            raise DatasetError("features contain non-finite values")
        if not np.all(np.isfinite(tgt)):
            raise DatasetError("target contains non-finite values")
        for name, kind, col in zip(self.feature_names, self.kinds, feats.T):
            _check_kind(name, kind, col)
        _check_kind(self.target_name, self.target_kind, tgt)
        feats = feats.copy()
        tgt = tgt.copy()
        feats.setflags(write=False)
        tgt.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "kinds", tuple(self.kinds))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def all_discrete(self) -> bool:
        return self.target_kind.is_discrete and all(k.is_discrete for k in self.kinds)

    def feature_matrix(self, subset: FeatureSubset) -> np.ndarray:
        """Columns of ``subset`` in canonical (ascending-index) order."""
        for i in subset:
            if i >= self.n_features:
                raise DatasetError(f"feature index {i} out of range")
        return self.features[:, list(subset)]

    def column(self, index: int) -> np.ndarray:
        if not 0 <= index < self.n_features:
            raise DatasetError(f"feature index {index} out of range")
        return self.features[:, index]


def _check_kind(name: str, kind: ColumnKind, col: np.ndarray) -> None:
    if not kind.is_discrete:
        return
    rounded = np.rint(col)
    if not np.array_equal(rounded, col):
        raise DatasetError(f"column {name!r} declared discrete but has non-integers")
    if col.size and (col.min() < 0 or col.max() >= kind.cardinality):
        raise DatasetError(
            f"column {name!r} has values outside [0, {kind.cardinality})"
        )


def infer_kinds(
    table: np.ndarray, discrete_cap: int = 32
) -> tuple[ColumnKind, ...]:
    """Guess a kind per column: small non-negative integer columns are discrete."""
    kinds = []
    for col in np.asarray(table, dtype=np.float64).T:
        distinct = np.unique(col)
        integral = np.array_equal(np.rint(distinct), distinct)
        if integral and distinct.size <= discrete_cap and (
            distinct.size == 0 or distinct.min() >= 0
        ):
            card = int(distinct.max()) + 1 if distinct.size else 1
            kinds.append(ColumnKind.discrete(card))
        else:
            kinds.append(ColumnKind.continuous())
    return tuple(kinds)


def validate_dataset(
    table: np.ndarray,
    names: Sequence[str],
    target: str = "target",
    kinds: Sequence[ColumnKind] | None = None,
    target_kind: ColumnKind | None = None,
    seed: int | None = None,
    source: str = "memory",
    discrete_cap: int = 32,
) -> Dataset:
    """Build a Dataset from a combined table whose columns include the target."""
    table = np.asarray(table, dtype=np.float64)
    if table.ndim != 2:
        raise DatasetError("table must be 2-d")
    names = list(names)
    if len(names) != table.shape[1]:
        raise DatasetError("names length must match column count")
    if target not in names:
        raise DatasetError(f"target column {target!r} not found in {names}")
    t_idx = names.index(target)
    feat_idx = [i for i in range(table.shape[1]) if i != t_idx]
    feats = table[:, feat_idx]
    tgt = table[:, t_idx]
    feat_names = tuple(names[i] for i in feat_idx)
    if kinds is None:
        kinds = infer_kinds(feats, discrete_cap)
    if target_kind is None:
        target_kind = infer_kinds(tgt.reshape(-1, 1), discrete_cap)[0]
    return Dataset(
        feature_names=feat_names,
        features=feats,
        target=tgt,
        kinds=tuple(kinds),
        target_kind=target_kind,
        target_name=target,
        seed=seed,
        source=source,
    )


@dataclass(frozen=True)
class PidfFeatureResult:
    """Decomposition output for one feature.

    ``fwr_contributions`` maps a removed-or-redundant partner index to the
    theta-derived redundancy ensemble attributed to that partner (already
    negated, so positive means redundancy). ``max_synergy_set`` is the
    surviving partner set the synergy estimate was measured against, and
    ``related_set`` holds the partners with significantly positive pairwise
    MI (only these can ever substitute for the feature).
    """

    index: int
    name: str
    mi: EstimateEnsemble
    fws: EstimateEnsemble
    fwr_contributions: tuple[tuple[int, EstimateEnsemble], ...]
    max_synergy_set: FeatureSubset
    related_set: FeatureSubset

    @property
    def mi_value(self) -> float:
        return self.mi.mean

    @property
    def fws_value(self) -> float:
        return self.fws.mean

    @property
    def fwr_total(self) -> float:
        return float(sum(max(0.0, ens.mean) for _, ens in self.fwr_contributions))

    @property
    def mci(self) -> float:
        """Maximum conditional information: mi + fws."""
        return self.mi_value + self.fws_value

    @property
    def oci(self) -> float:
        """Overall conditional information: mci - fwr."""
        return self.mci - self.fwr_total

    @property
    def fws_noise_flag(self) -> bool:
        """True when the synergy estimate is within 2 std of zero."""
        return abs(self.fws.mean) < 2.0 * self.fws.std

    def net_ensemble(self) -> EstimateEnsemble:
        """Per-seed mci minus raw (unclamped) redundancy, for significance
        testing; the report-level clamp on fwr_total cannot bias this."""
        terms: list[tuple[float, EstimateEnsemble]] = [(1.0, self.mi), (1.0, self.fws)]
        terms.extend((-1.0, ens) for _, ens in self.fwr_contributions)
        return EstimateEnsemble.linear(terms)


@dataclass(frozen=True)
class PidfReport:
    """Full decomposition output for a dataset run."""

    results: tuple[PidfFeatureResult, ...]
    feature_names: tuple[str, ...]
    target_name: str
    n_samples: int
    estimator: Any
    repetitions: int
    alpha: float
    eps_zero: float
    dataset_seed: int | None = None
    dataset_source: str = "memory"
    trace: Any = None

    def __post_init__(self) -> None:
        if len(self.results) != len(self.feature_names):
            raise ConfigError("one result per feature required")
        for i, res in enumerate(self.results):
            if res.index != i:
                raise ConfigError("results must be ordered by feature index")

    @property
    def n_features(self) -> int:
        return len(self.results)

    def result(self, index: int) -> PidfFeatureResult:
        return self.results[index]


@dataclass(frozen=True)
class SelectionResult:
    """Output of minimal-subset selection over a PidfReport."""

    selected: FeatureSubset
    phase1: FeatureSubset
    rationales: tuple[str, ...]
    n_features: int

    def mask(self) -> tuple[bool, ...]:
        return tuple(i in self.selected for i in range(self.n_features))


@dataclass(frozen=True)
class Confusion:
    """Selection-vs-ground-truth counts."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.tp, self.fp, self.tn, self.fn)


def require_number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{name} must be a real number, got {value!r}")
    return float(value)


def require_probability(value: Any, name: str) -> float:
    value = require_number(value, name)
    if not 0.0 < value < 1.0:
        raise ConfigError(f"{name} must lie strictly between 0 and 1, got {value}")
    return value
