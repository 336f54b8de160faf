"""Pluggable mutual-information estimators over column groups.

Every estimator maps (dataset, left group, right group) to an
EstimateEnsemble of `repetitions` values in nats. The exact and binned
estimators are deterministic (all repetitions identical); the k-NN and
neural estimators draw their per-repetition randomness from counter-based
streams keyed by a repetition seed, so a given (config, base seed) is
bit-reproducible and every term estimated within one repetition shares the
same row subsample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .types import (
    TARGET,
    ColumnKind,
    ConfigError,
    Dataset,
    EstimateEnsemble,
    EstimatorError,
    FeatureSubset,
    _TargetMarker,
)

_TARGET_ID = -1

# Purpose words mixed into the second Philox key word so the row-subsample
# stream and each column's jitter stream never collide.
_PURPOSE_SUBSAMPLE = 0xA5 << 32
_PURPOSE_JITTER = 0xB6 << 32
_SEED_STRIDE = 1000003


@dataclass(frozen=True)
class ExactDiscrete:
    """Plug-in MI from exact joint frequencies; discrete columns only."""


@dataclass(frozen=True)
class Binned:
    """Equal-frequency binning of continuous columns, then plug-in MI."""

    bins: int = 8

    def __post_init__(self) -> None:
        if self.bins < 2:
            raise ConfigError("binned estimator needs at least 2 bins")


@dataclass(frozen=True)
class Ksg:
    """k-nearest-neighbor MI estimator (variant 1, Chebyshev metric).

    Each repetition works on a row subsample of the given fraction and
    adds tiny seeded jitter per column to break ties; the subsample is
    shared by every estimate within the repetition.
    """

    k: int = 3
    subsample: float = 0.3
    jitter: float = 1e-9

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ConfigError("ksg estimator needs k >= 1")
        if not 0.0 < self.subsample <= 1.0:
            raise ConfigError("ksg subsample fraction must be in (0, 1]")
        if self.jitter < 0.0:
            raise ConfigError("ksg jitter must be >= 0")


@dataclass(frozen=True)
class MineConfig:
    """Training hyperparameters for the neural estimator."""

    batch_size: int = 1000
    iterations: int = 20000
    learning_rate: float = 1e-4
    hidden: int = 50
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ConfigError("mine batch size must be >= 1")
        if self.iterations < 0:
            raise ConfigError("mine iterations must be >= 0")
        if self.learning_rate <= 0:
            raise ConfigError("mine learning rate must be positive")
        if self.hidden < 1:
            raise ConfigError("mine hidden width must be >= 1")


@dataclass(frozen=True)
class Mine:
    """Neural lower-bound MI estimator trained by minibatch gradient ascent."""

    config: MineConfig = field(default_factory=MineConfig)


EstimatorKind = Union[ExactDiscrete, Binned, Ksg, Mine]

_KIND_NAMES = {ExactDiscrete: "exact", Binned: "binned", Ksg: "ksg", Mine: "mine"}


@dataclass(frozen=True)
class EstimatorConfig:
    """Estimator kind plus the repetition protocol."""

    kind: EstimatorKind = field(default_factory=ExactDiscrete)
    repetitions: int = 5
    base_seed: int = 0

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not isinstance(self.kind, (ExactDiscrete, Binned, Ksg, Mine)):
            raise ConfigError(f"unknown estimator kind {self.kind!r}")

    @property
    def kind_name(self) -> str:
        return _KIND_NAMES[type(self.kind)]

    def seeds(self) -> tuple[int, ...]:
        """One derived seed per repetition."""
        return tuple(self.base_seed * _SEED_STRIDE + r for r in range(self.repetitions))

    @property
    def is_deterministic(self) -> bool:
        return isinstance(self.kind, (ExactDiscrete, Binned))


GroupLike = Union[FeatureSubset, _TargetMarker, Iterable[int]]


def _resolve_group(data: Dataset, group: GroupLike) -> tuple[int, ...]:
    """Normalize a group argument to sorted column ids (-1 = target)."""
    if isinstance(group, _TargetMarker):
        return (_TARGET_ID,)
    if isinstance(group, FeatureSubset):
        ids = group.indices
    else:
        ids = tuple(sorted({int(i) for i in group}))
    for i in ids:
        if i == _TARGET_ID:
            raise ConfigError("use the TARGET marker, not index -1")
        if not 0 <= i < data.n_features:
            raise ConfigError(f"feature index {i} out of range")
    return ids


def _columns(data: Dataset, ids: tuple[int, ...]) -> np.ndarray:
    cols = [
        data.target if i == _TARGET_ID else data.features[:, i] for i in ids
    ]
    return np.column_stack(cols) if cols else np.empty((data.n_samples, 0))


def _kinds(data: Dataset, ids: tuple[int, ...]) -> tuple[ColumnKind, ...]:
    return tuple(
        data.target_kind if i == _TARGET_ID else data.kinds[i] for i in ids
    )


def _check_groups(left: tuple[int, ...], right: tuple[int, ...]) -> None:
    if left == right:
        return
    if set(left) & set(right):
        raise ConfigError(
            f"column groups must be disjoint or identical, got {left} vs {right}"
        )


def _discrete_codes(matrix: np.ndarray) -> np.ndarray:
    """Map each row of an integer-valued matrix to a dense code."""
    if matrix.shape[1] == 0:
        return np.zeros(matrix.shape[0], dtype=np.int64)
    _, codes = np.unique(matrix, axis=0, return_inverse=True)
    return codes.ravel()


def _entropy_from_codes(codes: np.ndarray) -> float:
    n = codes.shape[0]
    counts = np.bincount(codes)
    # Sort so the summation order depends only on the count multiset, never
    # on column order; information-identical column sets then get bitwise
    # identical entropies and downstream ties break canonically.
    counts = np.sort(counts[counts > 0])
    return max(0.0, math.log(n) - float(counts @ np.log(counts)) / n)


def _plugin_mi(left: np.ndarray, right: np.ndarray) -> float:
    codes_l = _discrete_codes(left)
    codes_r = _discrete_codes(right)
    joint = np.column_stack([codes_l, codes_r])
    h_l = _entropy_from_codes(codes_l)
    h_r = _entropy_from_codes(codes_r)
    h_lr = _entropy_from_codes(_discrete_codes(joint))
    return max(0.0, h_l + h_r - h_lr)


def _require_discrete(kinds: Iterable[ColumnKind], estimator: str) -> None:
    if not all(k.is_discrete for k in kinds):
        raise EstimatorError(
            f"{estimator} estimator requires discrete columns; "
            "declare bins or use a continuous-capable estimator"
        )


def _bin_column(col: np.ndarray, kind: ColumnKind, bins: int) -> np.ndarray:
    if kind.is_discrete:
        return col
    edges = np.quantile(col, np.linspace(0, 1, bins + 1)[1:-1])
    return np.digitize(col, edges).astype(np.float64)


def _stream(rep_seed: int, purpose: int, column: int = 0) -> np.random.Generator:
    key = [
        np.uint64(rep_seed & 0xFFFFFFFFFFFFFFFF),
        np.uint64((purpose | (column + 1)) & 0xFFFFFFFFFFFFFFFF),
    ]
    return np.random.Generator(np.random.Philox(key=key))


def subsample_rows(n: int, fraction: float, rep_seed: int) -> np.ndarray:
    """Row indices of one repetition's subsample (sorted, without replacement).

    Keyed only by the repetition seed, so every estimate computed within a
    repetition sees the same rows and differences of estimates cancel their
    shared sampling noise.
    """
    m = max(1, int(round(fraction * n)))
    if m >= n:
        return np.arange(n)
    rng = _stream(rep_seed, _PURPOSE_SUBSAMPLE)
    return np.sort(rng.choice(n, size=m, replace=False))


def _jittered(matrix: np.ndarray, ids: tuple[int, ...], jitter: float,
              rep_seed: int) -> np.ndarray:
    """Add per-column tie-breaking noise keyed by (repetition, column id)."""
    if jitter == 0.0:
        return matrix
    out = matrix.astype(np.float64, copy=True)
    for pos, col_id in enumerate(ids):
        col = out[:, pos]
        scale = float(np.std(col))
        if scale == 0.0:
            scale = 1.0
        rng = _stream(rep_seed, _PURPOSE_JITTER, col_id)
        out[:, pos] = col + jitter * scale * rng.standard_normal(col.shape[0])
    return out


def ksg_mi(x: np.ndarray, y: np.ndarray, k: int) -> float:
    """k-NN MI estimate (variant 1) on continuous matrices, in nats.

    Uses the Chebyshev metric; neighbor counts in the marginal spaces are
    taken strictly inside each point's k-th joint-space distance.
    """
    n = x.shape[0]
    if k >= n:
        raise EstimatorError(f"ksg needs more than k={k} rows, got {n}")
    joint = np.hstack([x, y])
    tree = cKDTree(joint)
    dist, _ = tree.query(joint, k=k + 1, p=np.inf)
    eps = dist[:, -1]
    radius = np.nextafter(eps, 0.0)
    nx = cKDTree(x).query_ball_point(x, radius, p=np.inf, return_length=True) - 1
    ny = cKDTree(y).query_ball_point(y, radius, p=np.inf, return_length=True) - 1
    value = (
        digamma(k)
        + digamma(n)
        - float(np.mean(digamma(nx + 1) + digamma(ny + 1)))
    )
    return float(value)


def _estimate_once(
    data: Dataset,
    left_ids: tuple[int, ...],
    right_ids: tuple[int, ...],
    kind: EstimatorKind,
    rep_seed: int,
) -> float:
    left = _columns(data, left_ids)
    right = _columns(data, right_ids)
    left_kinds = _kinds(data, left_ids)
    right_kinds = _kinds(data, right_ids)

    if isinstance(kind, ExactDiscrete):
        _require_discrete((*left_kinds, *right_kinds), "exact discrete")
        return _plugin_mi(left, right)

    if isinstance(kind, Binned):
        left_b = np.column_stack(
            [_bin_column(left[:, i], left_kinds[i], kind.bins)
             for i in range(left.shape[1])]
        ) if left.shape[1] else left
        right_b = np.column_stack(
            [_bin_column(right[:, i], right_kinds[i], kind.bins)
             for i in range(right.shape[1])]
        ) if right.shape[1] else right
        return _plugin_mi(left_b, right_b)

    if isinstance(kind, Ksg):
        rows = subsample_rows(data.n_samples, kind.subsample, rep_seed)
        left_j = _jittered(left, left_ids, kind.jitter, rep_seed)[rows]
        right_j = _jittered(right, right_ids, kind.jitter, rep_seed)[rows]
        return ksg_mi(left_j, right_j, kind.k)

    if isinstance(kind, Mine):
        from . import mine

        return mine.mine_estimate(left, right, kind.config, rep_seed)

    raise ConfigError(f"unknown estimator kind {kind!r}")


def estimate_mi(
    data: Dataset, left: GroupLike, right: GroupLike, cfg: EstimatorConfig
) -> EstimateEnsemble:
    """Ensemble estimate of I(left; right) in nats.

    Groups must be disjoint or identical. An empty group on either side
    yields an exactly-zero ensemble without invoking the estimator.
    """
    left_ids = _resolve_group(data, left)
    right_ids = _resolve_group(data, right)
    _check_groups(left_ids, right_ids)
    seeds = cfg.seeds()
    if not left_ids or not right_ids:
        return EstimateEnsemble.constant(0.0, seeds)
    if cfg.is_deterministic:
        value = _estimate_once(data, left_ids, right_ids, cfg.kind, seeds[0])
        return EstimateEnsemble.constant(value, seeds)
    estimates = tuple(
        _estimate_once(data, left_ids, right_ids, cfg.kind, seed) for seed in seeds
    )
    return EstimateEnsemble(estimates, seeds)


def estimate_entropy(
    data: Dataset, group: GroupLike, cfg: EstimatorConfig
) -> EstimateEnsemble:
    """Plug-in Shannon entropy of a discrete column group, in nats."""
    if not isinstance(cfg.kind, ExactDiscrete):
        raise ConfigError("entropy estimation supports the exact estimator only")
    ids = _resolve_group(data, group)
    seeds = cfg.seeds()
    if not ids:
        return EstimateEnsemble.constant(0.0, seeds)
    _require_discrete(_kinds(data, ids), "exact discrete")
    codes = _discrete_codes(_columns(data, ids))
    return EstimateEnsemble.constant(_entropy_from_codes(codes), seeds)
