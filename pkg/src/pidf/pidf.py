"""Per-feature synergy/redundancy decomposition (the main algorithm).

For each feature the pass estimates its MI with the target, screens the
other features for significant pairwise MI, walks those candidates in
descending pairwise-MI order evaluating the candidate-effect measure
theta against the current surviving context, removes candidates judged
redundant with 95% certainty, and finally measures synergy against the
pruned surviving set. All decisions run on EstimateEnsembles so both
deterministic and stochastic estimators share one significance rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, combinations
from typing import Iterable, Sequence

from scipy.stats import t as student_t

from .estimators import (
    EstimatorConfig,
    ExactDiscrete,
    Ksg,
    _resolve_group,
)
from .types import (
    TARGET,
    ConfigError,
    Dataset,
    EstimateEnsemble,
    EstimatorError,
    FeatureSubset,
    PidfFeatureResult,
    PidfReport,
    SubsetCapError,
    require_probability,
)
from . import estimators

DEFAULT_ALPHA = 0.05

# Smallest estimated effect (nats) that a deterministic estimator treats as
# real. Plug-in MI of an independent pair fluctuates at the chi-squared
# scale df/(2n), about 5e-4 at n=1000, so the default sits far above that
# noise floor while staying far below the smallest genuine effect in the
# bundled benchmark datasets (~0.039 nats). Scale it down for much larger n.
DEFAULT_EPS_ZERO = 0.01


def default_config(
    data: Dataset, repetitions: int = 5, base_seed: int = 0
) -> EstimatorConfig:
    """Exact plug-in estimation for all-discrete data, k-NN otherwise."""
    kind = ExactDiscrete() if data.all_discrete else Ksg()
    return EstimatorConfig(kind=kind, repetitions=repetitions, base_seed=base_seed)


def is_redundant(
    ensemble: EstimateEnsemble,
    alpha: float = DEFAULT_ALPHA,
    eps_zero: float = DEFAULT_EPS_ZERO,
) -> bool:
    """True when the ensemble is negative with the required certainty.

    Deterministic ensembles compare the value against -eps_zero directly
    (a value of exactly 0 is not redundant). Stochastic ensembles run a
    one-sided Student-t test of mean < 0 at level alpha.
    """
    require_probability(alpha, "alpha")
    if ensemble.is_deterministic:
        return ensemble.mean < -eps_zero
    stat = ensemble.mean / (ensemble.std / ensemble.n**0.5)
    return float(student_t.cdf(stat, df=ensemble.n - 1)) < alpha


def significantly_positive(
    ensemble: EstimateEnsemble,
    alpha: float = DEFAULT_ALPHA,
    eps_zero: float = DEFAULT_EPS_ZERO,
) -> bool:
    """Mirror of is_redundant for the positive direction."""
    require_probability(alpha, "alpha")
    if ensemble.is_deterministic:
        return ensemble.mean > eps_zero
    stat = ensemble.mean / (ensemble.std / ensemble.n**0.5)
    return float(student_t.sf(stat, df=ensemble.n - 1)) < alpha


class MiCache:
    """Memoizes MI ensembles per column-group pair for one (data, cfg) run.

    Keys are canonicalized so I(A;B) and I(B;A) share one entry computed in
    one fixed orientation, making symmetry bit-exact even for estimators
    that are only statistically symmetric.
    """

    def __init__(self, data: Dataset, cfg: EstimatorConfig):
        self.data = data
        self.cfg = cfg
        self._cache: dict[tuple[tuple[int, ...], tuple[int, ...]], EstimateEnsemble] = {}

    @staticmethod
    def _as_group(ids: tuple[int, ...]):
        return TARGET if ids == (-1,) else FeatureSubset(ids)

    def mi(self, left, right) -> EstimateEnsemble:
        left_ids = _resolve_group(self.data, left)
        right_ids = _resolve_group(self.data, right)
        key = (
            (left_ids, right_ids) if left_ids <= right_ids else (right_ids, left_ids)
        )
        hit = self._cache.get(key)
        if hit is None:
            hit = estimators.estimate_mi(
                self.data, self._as_group(key[0]), self._as_group(key[1]), self.cfg
            )
            self._cache[key] = hit
        return hit


@dataclass(frozen=True)
class ThetaEvaluation:
    """One candidate decision inside a feature's pass."""

    feature: int
    candidate: int
    context: FeatureSubset
    theta: EstimateEnsemble
    redundant: bool

    def __post_init__(self) -> None:
        if self.feature in self.context or self.candidate in self.context:
            raise ConfigError("evaluation context must exclude feature and candidate")


@dataclass(frozen=True)
class FeatureTrace:
    """Audit record of one feature's pass."""

    feature: int
    candidate_order: tuple[int, ...]
    evaluations: tuple[ThetaEvaluation, ...]
    removed: tuple[int, ...]


@dataclass(frozen=True)
class PidfTrace:
    features: tuple[FeatureTrace, ...]


def theta(
    data: Dataset,
    feature: int,
    candidate: int,
    context: "FeatureSubset | Iterable[int]",
    cfg: EstimatorConfig,
    cache: MiCache | None = None,
) -> EstimateEnsemble:
    """Per-seed effect of the candidate on the feature's target information.

    theta_r = [I(Y; feature, context, candidate) - I(Y; context, candidate)]
            - [I(Y; feature, context) - I(Y; context)], each term estimated
    under repetition seed r. Negative values mean the candidate already
    carries the feature's contribution (redundancy); positive values mean
    the pair is synergistic.
    """
    ctx = FeatureSubset(context) if not isinstance(context, FeatureSubset) else context
    if feature == candidate:
        raise ConfigError("feature and candidate must differ")
    if feature in ctx or candidate in ctx:
        raise ConfigError("context must exclude feature and candidate")
    for idx in (feature, candidate):
        if not 0 <= idx < data.n_features:
            raise ConfigError(f"feature index {idx} out of range")
    if cache is None:
        cache = MiCache(data, cfg)
    feat = FeatureSubset.of(feature)
    cand = FeatureSubset.of(candidate)
    with_candidate = cache.mi(TARGET, feat | ctx | cand)
    base_candidate = cache.mi(TARGET, ctx | cand)
    with_feature = cache.mi(TARGET, feat | ctx)
    base = cache.mi(TARGET, ctx)
    return EstimateEnsemble.linear(
        [(1.0, with_candidate), (-1.0, base_candidate), (-1.0, with_feature), (1.0, base)]
    )


def run_pidf(
    data: Dataset,
    cfg: EstimatorConfig | None = None,
    alpha: float = DEFAULT_ALPHA,
    eps_zero: float = DEFAULT_EPS_ZERO,
) -> PidfReport:
    """Full decomposition pass over every feature.

    Returns a PidfReport whose ``trace`` field carries the full audit trail
    (candidate orders, every theta evaluation, removals applied).
    """
    if cfg is None:
        cfg = default_config(data)
    require_probability(alpha, "alpha")
    if data.n_features < 1:
        raise ConfigError("need at least one feature")
    cache = MiCache(data, cfg)
    results = []
    traces = []
    for i in range(data.n_features):
        name = data.feature_names[i]
        try:
            mi_i = cache.mi(TARGET, FeatureSubset.of(i))
            pairwise = {
                j: cache.mi(FeatureSubset.of(i), FeatureSubset.of(j))
                for j in range(data.n_features)
                if j != i
            }
        except EstimatorError as err:
            raise EstimatorError(f"feature {name!r}: {err}") from err
        order = tuple(sorted(pairwise, key=lambda j: (-pairwise[j].mean, j)))
        related = FeatureSubset(
            j for j in order if significantly_positive(pairwise[j], alpha, eps_zero)
        )
        surviving = {j for j in range(data.n_features) if j != i}
        evaluations = []
        removed = []
        contributions = []
        for j in order:
            if j not in related:
                continue
            context = FeatureSubset(surviving - {j})
            try:
                th = theta(data, i, j, context, cfg, cache)
            except EstimatorError as err:
                raise EstimatorError(
                    f"feature {name!r}, candidate {data.feature_names[j]!r}: {err}"
                ) from err
            verdict = is_redundant(th, alpha, eps_zero)
            evaluations.append(
                ThetaEvaluation(
                    feature=i, candidate=j, context=context, theta=th,
                    redundant=verdict,
                )
            )
            if verdict:
                surviving.discard(j)
                removed.append(j)
                contributions.append((j, th.map(lambda e: -e)))
        pms = FeatureSubset(surviving)
        try:
            joint = cache.mi(TARGET, pms.add(i))
            partners_only = cache.mi(TARGET, pms)
        except EstimatorError as err:
            raise EstimatorError(f"feature {name!r}: {err}") from err
        fws = EstimateEnsemble.linear(
            [(1.0, joint), (-1.0, partners_only), (-1.0, mi_i)]
        )
        contributions.sort(key=lambda pair: pair[0])
        results.append(
            PidfFeatureResult(
                index=i,
                name=name,
                mi=mi_i,
                fws=fws,
                fwr_contributions=tuple(contributions),
                max_synergy_set=pms,
                related_set=related,
            )
        )
        traces.append(
            FeatureTrace(
                feature=i,
                candidate_order=order,
                evaluations=tuple(evaluations),
                removed=tuple(removed),
            )
        )
    return PidfReport(
        results=tuple(results),
        feature_names=data.feature_names,
        target_name=data.target_name,
        n_samples=data.n_samples,
        estimator=cfg,
        repetitions=cfg.repetitions,
        alpha=alpha,
        eps_zero=eps_zero,
        dataset_seed=data.seed,
        dataset_source=data.source,
        trace=PidfTrace(tuple(traces)),
    )


def brute_force_fws(
    data: Dataset,
    feature: int,
    cfg: EstimatorConfig | None = None,
    cap: int = 15,
    tie_tol: float = 1e-9,
) -> tuple[EstimateEnsemble, tuple[FeatureSubset, ...]]:
    """Exhaustive synergy maximum over the power set of the other features.

    Returns the maximizing ensemble and every subset whose mean ties the
    maximum within ``tie_tol``, ordered by subset size then lexicographic
    order. The empty set always competes, so the maximum mean is >= 0 for
    estimators without negative noise.
    """
    if cfg is None:
        cfg = default_config(data)
    if data.n_features > cap:
        raise SubsetCapError(
            f"exhaustive search over {data.n_features} features exceeds the cap "
            f"of {cap}"
        )
    if not 0 <= feature < data.n_features:
        raise ConfigError(f"feature index {feature} out of range")
    cache = MiCache(data, cfg)
    rest = [j for j in range(data.n_features) if j != feature]
    mi_i = cache.mi(TARGET, FeatureSubset.of(feature))
    scored: list[tuple[FeatureSubset, EstimateEnsemble]] = []
    for subset in chain.from_iterable(
        combinations(rest, size) for size in range(len(rest) + 1)
    ):
        partners = FeatureSubset(subset)
        joint = cache.mi(TARGET, partners.add(feature))
        partners_only = cache.mi(TARGET, partners)
        interaction = EstimateEnsemble.linear(
            [(1.0, joint), (-1.0, partners_only), (-1.0, mi_i)]
        )
        scored.append((partners, interaction))
    best_mean = max(ens.mean for _, ens in scored)
    maximizers = tuple(
        subset
        for subset, ens in sorted(scored, key=lambda se: (len(se[0]), se[0].indices))
        if ens.mean >= best_mean - tie_tol
    )
    best_ens = next(
        ens for subset, ens in scored if subset == maximizers[0]
    )
    return best_ens, maximizers
