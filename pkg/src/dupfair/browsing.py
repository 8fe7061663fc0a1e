"""Cascade user model shared by exposure and utility.

The user scans a ranking top to bottom. At position p they stop with
probability ``c * r_p``; if they do not stop they continue to the next
position with probability ``gamma``. Attention credited to an item is the
probability that its position is examined.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import DegenerateCatalogError, DomainError

if TYPE_CHECKING:
    from .policies import Ranking
    from .scenario import ItemCatalog


@dataclass(frozen=True)
class CascadeParams:
    click_scale: float = 0.7
    persistence: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.click_scale <= 1.0:
            raise DomainError(f"click_scale must lie in [0, 1], got {self.click_scale}")
        if not 0.0 < self.persistence <= 1.0:
            raise DomainError(f"persistence must lie in (0, 1], got {self.persistence}")


DEFAULT_PARAMS = CascadeParams()


def _as_relevances(relevances: Sequence[float] | np.ndarray) -> np.ndarray:
    rel = np.asarray(relevances, dtype=np.float64)
    if rel.size == 0:
        raise DomainError("relevance sequence is empty")
    if np.any(~np.isfinite(rel)) or np.any(rel < 0.0) or np.any(rel > 1.0):
        raise DomainError(f"relevances must lie in [0, 1], got {rel.tolist()}")
    return rel


def examination_matrix(rel: np.ndarray, params: CascadeParams = DEFAULT_PARAMS) -> np.ndarray:
    """Examination probabilities for a batch of rankings.

    ``rel`` has shape ``(..., n)`` holding relevances in rank order along the
    last axis. No validation; callers pass catalog relevances.
    """
    rel = np.asarray(rel, dtype=np.float64)
    factors = params.persistence * (1.0 - params.click_scale * rel[..., :-1])
    out = np.ones(rel.shape, dtype=np.float64)
    np.cumprod(factors, axis=-1, out=out[..., 1:])
    return out


def examination_vector(relevances, params: CascadeParams = DEFAULT_PARAMS) -> np.ndarray:
    """Probability that each position (in rank order) is examined.

    >>> examination_vector([0.0, 0.0, 0.0]).tolist()
    [1.0, 0.5, 0.25]
    """
    return examination_matrix(_as_relevances(relevances), params)


def stop_distribution(relevances, params: CascadeParams = DEFAULT_PARAMS) -> np.ndarray:
    """Probability that the user stops at each position.

    The mass missing from the total is the probability of abandoning
    without stopping on any item.
    """
    rel = _as_relevances(relevances)
    return examination_matrix(rel, params) * params.click_scale * rel


def _err_rows(rel: np.ndarray, params: CascadeParams) -> np.ndarray:
    stops = examination_matrix(rel, params) * params.click_scale * rel
    inv_rank = 1.0 / np.arange(1, rel.shape[-1] + 1, dtype=np.float64)
    return (stops * inv_rank).sum(axis=-1)


def err(relevances, params: CascadeParams = DEFAULT_PARAMS) -> float:
    """Expected reciprocal rank: sum over positions of stop(p) / p."""
    return float(_err_rows(_as_relevances(relevances), params))


def ideal_err(catalog: ItemCatalog, params: CascadeParams = DEFAULT_PARAMS) -> float:
    """ERR of the catalog sorted by decreasing relevance."""
    best = err(np.sort(catalog.relevances)[::-1], params)
    if best <= 0.0:
        raise DegenerateCatalogError("catalog has zero total relevance; ERR cannot be normalized")
    return best


def normalized_err(
    ranking: Ranking, catalog: ItemCatalog, params: CascadeParams = DEFAULT_PARAMS
) -> float:
    """ERR of ``ranking`` divided by the ERR of the relevance-sorted catalog."""
    order = list(ranking)
    if sorted(order) != list(range(len(catalog))):
        raise DomainError(f"ranking {order} is not a permutation of the catalog")
    return err(catalog.relevances[order], params) / ideal_err(catalog, params)


def normalized_err_rows(
    rel: np.ndarray, ideal: float, params: CascadeParams = DEFAULT_PARAMS
) -> np.ndarray:
    """Vectorised normalized ERR for rows of rank-ordered relevances."""
    return _err_rows(np.asarray(rel, dtype=np.float64), params) / ideal
