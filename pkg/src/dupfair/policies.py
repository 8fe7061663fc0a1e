"""Ranking policies: exhaustive greedy, Plackett-Luce sampling, static sort.

``Greedy(lam)`` weighs fairness by ``lam`` and mean utility by ``1 - lam``:
``lam = 0`` ranks purely by utility and larger values trade utility for a
fairer split of attention.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Union

import numpy as np

from .browsing import DEFAULT_PARAMS, CascadeParams, examination_matrix, ideal_err, normalized_err_rows
from .errors import CapacityError, DomainError
from .fairness import ExposureLedger
from .scenario import ItemCatalog

MAX_ENUMERATION = 8
# scores closer than this count as tied; the lexicographically first permutation wins
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Ranking:
    """Item ids in rank order, position 1 first."""

    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise DomainError(f"{self.order} is not a permutation")

    def __iter__(self):
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def position_of(self, item_id: int) -> int:
        """1-based position of ``item_id``."""
        return self.order.index(item_id) + 1


@dataclass(frozen=True)
class Greedy:
    lam: float
    tag = "greedy"

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError(f"lambda must lie in [0, 1], got {self.lam}")


@dataclass(frozen=True)
class PlackettLuce:
    tag = "plackett_luce"


@dataclass(frozen=True)
class StaticRelevance:
    tag = "static_relevance"


PolicyConfig = Union[Greedy, PlackettLuce, StaticRelevance]


@dataclass
class RandomSource:
    """Seeded generator; the same seed gives the same draws on any platform."""

    seed: int
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def derive(self, offset: int) -> RandomSource:
        return RandomSource((self.seed + offset) % 2**64)


def enumerate_permutations(n: int) -> Iterator[tuple[int, ...]]:
    """All permutations of ``range(n)`` in lexicographic order."""
    if not 1 <= n <= MAX_ENUMERATION:
        raise CapacityError(f"can enumerate 1..{MAX_ENUMERATION} items, got {n}")
    return itertools.permutations(range(n))


@dataclass(frozen=True)
class PermutationTable:
    """Per-permutation attention and utility for one catalog.

    ``attention[p, i]`` is the attention item ``i`` receives under
    permutation ``p``; ``utility[p]`` is that permutation's normalized ERR.
    """

    perms: np.ndarray
    attention: np.ndarray
    utility: np.ndarray


@lru_cache(maxsize=64)
def _table(relevances: tuple[float, ...], params: CascadeParams) -> PermutationTable:
    rel = np.array(relevances)
    perms = np.array(list(enumerate_permutations(len(rel))), dtype=np.intp)
    ranked_rel = rel[perms]
    by_position = examination_matrix(ranked_rel, params)
    attention = np.empty_like(by_position)
    np.put_along_axis(attention, perms, by_position, axis=1)
    ideal = ideal_err(ItemCatalog.from_relevances(relevances), params)
    utility = normalized_err_rows(ranked_rel, ideal, params)
    for arr in (perms, attention, utility):
        arr.flags.writeable = False
    return PermutationTable(perms, attention, utility)


def permutation_table(catalog: ItemCatalog, params: CascadeParams = DEFAULT_PARAMS) -> PermutationTable:
    if len(catalog) > MAX_ENUMERATION:
        raise CapacityError(
            f"catalog of {len(catalog)} items exceeds the enumeration bound of {MAX_ENUMERATION}"
        )
    return _table(tuple(catalog.relevances.tolist()), params)


def greedy_scores(
    ledger: ExposureLedger,
    catalog: ItemCatalog,
    lam: float,
    params: CascadeParams = DEFAULT_PARAMS,
) -> np.ndarray:
    """Objective after one more impression, for every permutation in lexicographic order."""
    if ledger.n_items != len(catalog):
        raise DomainError(f"ledger tracks {ledger.n_items} items, catalog has {len(catalog)}")
    table = permutation_table(catalog, params)
    rel_next = ledger.relevance_after(catalog.relevances)
    rel_share = rel_next / rel_next.sum()
    att_next = ledger.attention + table.attention
    att_share = att_next / att_next.sum(axis=1, keepdims=True)
    unfair = np.sqrt(((att_share - rel_share) ** 2).sum(axis=1))
    mean_utility = (ledger.utility_sum + table.utility) / (ledger.impressions + 1)
    return (1.0 - lam) * mean_utility - lam * unfair


def _argmax_first(scores: np.ndarray) -> int:
    return int(np.flatnonzero(scores >= scores.max() - TIE_TOLERANCE)[0])


def greedy_next(
    ledger: ExposureLedger,
    catalog: ItemCatalog,
    lam: float,
    params: CascadeParams = DEFAULT_PARAMS,
) -> Ranking:
    """Ranking that maximizes the objective once this impression is added."""
    Greedy(lam)
    scores = greedy_scores(ledger, catalog, lam, params)
    best = _argmax_first(scores)
    return Ranking(tuple(int(i) for i in permutation_table(catalog, params).perms[best]))


def pl_sample_batch(catalog: ItemCatalog, rng: RandomSource, size: int) -> np.ndarray:
    """Draw ``size`` Plackett-Luce rankings as rows of item ids.

    Uses Gumbel-perturbed log relevance, which orders items exactly like
    sequential draws proportional to remaining relevance. Zero-relevance
    items come after all positive ones in uniformly random order.
    """
    rel = catalog.relevances
    gumbel = rng.generator.gumbel(size=(size, len(rel)))
    positive = rel > 0.0
    log_rel = np.where(positive, np.log(np.where(positive, rel, 1.0)), 0.0)
    keys = gumbel + log_rel
    return np.lexsort((-keys, np.broadcast_to(~positive, keys.shape)), axis=-1)


def pl_sample(catalog: ItemCatalog, rng: RandomSource) -> Ranking:
    return Ranking(tuple(int(i) for i in pl_sample_batch(catalog, rng, 1)[0]))


def static_relevance(catalog: ItemCatalog) -> Ranking:
    """Sort by decreasing relevance; equal relevance keeps the lower id first."""
    rel = catalog.relevances
    return Ranking(tuple(sorted(range(len(rel)), key=lambda i: (-rel[i], i))))
