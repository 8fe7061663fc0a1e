"""Item catalogs, duplication, and the grid of experimental settings."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Item:
    item_id: int
    relevance: float
    duplicate_of: int | None = None

    @property
    def is_duplicate(self) -> bool:
        return self.duplicate_of is not None


@dataclass(frozen=True)
class ItemCatalog:
    """Items competing for exposure. ``item_id`` always equals list position."""

    items: tuple[Item, ...]

    def __post_init__(self):
        if not self.items:
            raise DomainError("catalog is empty")
        originals = set()
        duplicates = 0
        for pos, item in enumerate(self.items):
            if item.item_id != pos:
                raise DomainError(f"item at position {pos} has id {item.item_id}")
            if not 0.0 <= item.relevance <= 1.0:
                raise DomainError(f"item {pos} relevance {item.relevance} outside [0, 1]")
            if item.duplicate_of is None:
                originals.add(item.item_id)
            else:
                duplicates += 1
        for item in self.items:
            if item.duplicate_of is not None and item.duplicate_of not in originals:
                raise DomainError(f"item {item.item_id} duplicates missing original {item.duplicate_of}")
        if duplicates > 1:
            raise DomainError("at most one duplicate per catalog is supported")

    @classmethod
    def from_relevances(cls, relevances: Sequence[float]) -> ItemCatalog:
        return cls(tuple(Item(i, float(r)) for i, r in enumerate(relevances)))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[Item]:
        return iter(self.items)

    @property
    def relevances(self) -> np.ndarray:
        return np.array([item.relevance for item in self.items], dtype=np.float64)

    @property
    def duplicate(self) -> Item | None:
        for item in self.items:
            if item.is_duplicate:
                return item
        return None


@dataclass(frozen=True)
class RelevanceProfile:
    delta: float
    item_count: int = 5

    def __post_init__(self):
        if not 0.0 < self.delta <= 0.25:
            raise DomainError(f"delta must lie in (0, 0.25], got {self.delta}")
        if self.item_count < 1:
            raise DomainError(f"item_count must be positive, got {self.item_count}")
        if 1.0 - (self.item_count - 1) * self.delta < 0.0:
            raise DomainError(
                f"delta={self.delta} with {self.item_count} items gives negative relevance"
            )


@dataclass(frozen=True)
class DuplicationSpec:
    target: int | None = None
    cost: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.cost <= 1.0:
            raise DomainError(f"duplication cost k must lie in (0, 1], got {self.cost}")


def build_catalog(profile: RelevanceProfile) -> ItemCatalog:
    """Linearly decreasing relevance ``1 - i * delta``."""
    return ItemCatalog.from_relevances(
        [1.0 - i * profile.delta for i in range(profile.item_count)]
    )


def duplicate(catalog: ItemCatalog, spec: DuplicationSpec) -> ItemCatalog:
    """Append a copy of ``spec.target`` whose relevance is scaled by ``spec.cost``."""
    if spec.target is None:
        return catalog
    if not 0 <= spec.target < len(catalog):
        raise DomainError(f"duplication target {spec.target} outside catalog of {len(catalog)}")
    original = catalog.items[spec.target]
    if original.is_duplicate:
        raise DomainError(f"item {spec.target} is itself a duplicate")
    if catalog.duplicate is not None:
        raise DomainError("catalog already holds a duplicate")
    copy = Item(len(catalog), spec.cost * original.relevance, duplicate_of=original.item_id)
    return ItemCatalog(catalog.items + (copy,))


@dataclass(frozen=True)
class Scenario:
    """Everything needed to run one simulation, minus the policy."""

    delta: float
    impressions: int
    cost: float
    duplicated_item: int | None
    lam: float | None = None
    item_count: int = 5

    def catalog(self) -> ItemCatalog:
        base = build_catalog(RelevanceProfile(self.delta, self.item_count))
        return duplicate(base, DuplicationSpec(self.duplicated_item, self.cost))


def settings_grid(
    deltas: Sequence[float],
    costs: Sequence[float],
    impressions: Sequence[int],
    lambdas: Sequence[float] = (),
    item_count: int = 5,
) -> list[Scenario]:
    """Cartesian product of the parameters with every duplication setting.

    Each (delta, cost) pair gets ``item_count`` single-item duplications and
    one setting with no duplicate. An empty ``lambdas`` drops that dimension.
    """
    if not deltas or not costs or not impressions:
        raise DomainError("deltas, costs and impressions must be non-empty")
    for d in deltas:
        RelevanceProfile(d, item_count)
    for k in costs:
        DuplicationSpec(None, k)
    for j in impressions:
        if j < 1:
            raise DomainError(f"impressions must be positive, got {j}")
    for lam in lambdas:
        if not 0.0 <= lam <= 1.0:
            raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    targets: list[int | None] = [*range(item_count), None]
    lam_axis: Sequence[float | None] = list(lambdas) or [None]
    return [
        Scenario(d, j, k, t, lam, item_count)
        for j, lam, d, k, t in itertools.product(impressions, lam_axis, deltas, costs, targets)
    ]
