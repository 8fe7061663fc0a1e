"""Run ranking policies over repeated impressions of a single query."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .browsing import DEFAULT_PARAMS, CascadeParams, examination_matrix, ideal_err, normalized_err_rows
from .errors import DomainError
from .fairness import ExposureLedger, unfairness
from .policies import (
    Greedy,
    PlackettLuce,
    PolicyConfig,
    RandomSource,
    StaticRelevance,
    _argmax_first,
    greedy_scores,
    permutation_table,
    pl_sample_batch,
    static_relevance,
)
from .scenario import ItemCatalog


@dataclass(frozen=True)
class RunResult:
    policy: PolicyConfig
    catalog: ItemCatalog
    attention: np.ndarray
    relevance: np.ndarray
    utilities: tuple[float, ...]
    final_unfairness: float
    mean_utility: float
    seed: int | None = None

    @property
    def impressions(self) -> int:
        return len(self.utilities)


@dataclass(frozen=True)
class EnsembleSummary:
    utility_p5: float
    utility_median: float
    utility_p95: float
    unfairness_p5: float
    unfairness_median: float
    unfairness_p95: float
    repetitions: int


def _attention_by_item(rankings: np.ndarray, rel: np.ndarray, params: CascadeParams):
    ranked_rel = rel[rankings]
    by_position = examination_matrix(ranked_rel, params)
    by_item = np.empty_like(by_position)
    np.put_along_axis(by_item, rankings, by_position, axis=-1)
    return by_item, ranked_rel


def run(
    policy: PolicyConfig,
    catalog: ItemCatalog,
    impressions: int,
    params: CascadeParams = DEFAULT_PARAMS,
    rng: RandomSource | None = None,
) -> RunResult:
    """Simulate ``impressions`` rankings of one query and return the totals."""
    if impressions < 1:
        raise DomainError(f"impressions must be positive, got {impressions}")
    rel = catalog.relevances
    ledger = ExposureLedger.empty(len(catalog))

    if isinstance(policy, Greedy):
        table = permutation_table(catalog, params)
        for _ in range(impressions):
            best = _argmax_first(greedy_scores(ledger, catalog, policy.lam, params))
            ledger.record(table.attention[best], rel, table.utility[best])
    elif isinstance(policy, StaticRelevance):
        order = np.array(static_relevance(catalog).order)
        by_item, ranked_rel = _attention_by_item(order, rel, params)
        utility = float(normalized_err_rows(ranked_rel, ideal_err(catalog, params), params))
        for _ in range(impressions):
            ledger.record(by_item, rel, utility)
    elif isinstance(policy, PlackettLuce):
        if rng is None:
            raise DomainError("Plackett-Luce runs need a RandomSource")
        rankings = pl_sample_batch(catalog, rng, impressions)
        by_item, ranked_rel = _attention_by_item(rankings, rel, params)
        utilities = normalized_err_rows(ranked_rel, ideal_err(catalog, params), params)
        ledger.record_many(by_item, rel, utilities)
    else:
        raise DomainError(f"unknown policy {policy!r}")

    return RunResult(
        policy=policy,
        catalog=catalog,
        attention=ledger.attention,
        relevance=ledger.relevance,
        utilities=tuple(ledger.utilities),
        final_unfairness=ledger.unfairness(),
        mean_utility=ledger.mean_utility,
        seed=rng.seed if rng is not None else None,
    )


def nearest_rank(values: Sequence[float], pct: float) -> float:
    """Nearest-rank percentile: the ceil(pct/100 * n)-th smallest value."""
    if not values:
        raise DomainError("no values to summarize")
    if not 0.0 < pct <= 100.0:
        raise DomainError(f"percentile must lie in (0, 100], got {pct}")
    ordered = sorted(values)
    rank = max(1, math.ceil(pct / 100.0 * len(ordered)))
    return ordered[rank - 1]


def pl_runs(
    catalog: ItemCatalog,
    impressions: int,
    repetitions: int,
    base_seed: int,
    params: CascadeParams = DEFAULT_PARAMS,
) -> list[RunResult]:
    """Independent Plackett-Luce runs; repetition ``m`` uses seed ``base_seed + m``."""
    if repetitions < 1:
        raise DomainError(f"repetitions must be positive, got {repetitions}")
    base = RandomSource(base_seed)
    return [
        run(PlackettLuce(), catalog, impressions, params, base.derive(m))
        for m in range(repetitions)
    ]


def summarize(runs: Sequence[RunResult]) -> EnsembleSummary:
    utils = [r.mean_utility for r in runs]
    unfair = [r.final_unfairness for r in runs]
    return EnsembleSummary(
        utility_p5=nearest_rank(utils, 5),
        utility_median=nearest_rank(utils, 50),
        utility_p95=nearest_rank(utils, 95),
        unfairness_p5=nearest_rank(unfair, 5),
        unfairness_median=nearest_rank(unfair, 50),
        unfairness_p95=nearest_rank(unfair, 95),
        repetitions=len(runs),
    )


def pl_ensemble(
    catalog: ItemCatalog,
    impressions: int,
    repetitions: int,
    base_seed: int,
    params: CascadeParams = DEFAULT_PARAMS,
) -> EnsembleSummary:
    return summarize(pl_runs(catalog, impressions, repetitions, base_seed, params))


def pair_sum_attention(dup_result: RunResult, target: int) -> float:
    """Attention of ``target`` plus that of its copy in a duplicated run."""
    dup = dup_result.catalog.duplicate
    if dup is None or dup.duplicate_of != target:
        raise DomainError(f"run does not contain a duplicate of item {target}")
    return float(dup_result.attention[target] + dup_result.attention[dup.item_id])


def duplication_gain(dup_result: RunResult, base_result: RunResult, target: int) -> float:
    """Extra attention item ``target`` collects by being duplicated."""
    if base_result.catalog.duplicate is not None:
        raise DomainError("baseline run must not contain a duplicate")
    if dup_result.policy != base_result.policy:
        raise DomainError("runs were produced by different policies")
    if dup_result.impressions != base_result.impressions:
        raise DomainError("runs cover different numbers of impressions")
    originals = [i.relevance for i in dup_result.catalog if not i.is_duplicate]
    if originals != [i.relevance for i in base_result.catalog]:
        raise DomainError("runs use different base catalogs")
    return pair_sum_attention(dup_result, target) - float(base_result.attention[target])
