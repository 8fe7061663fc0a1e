"""Cumulative exposure bookkeeping and the amortized fairness measures."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNormalizationError, DomainError

SQRT2 = float(np.sqrt(2.0))


def normalized_shares(values) -> np.ndarray:
    """Divide a nonnegative vector by its sum."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DomainError("expected a non-empty 1-d vector")
    if np.any(v < 0.0):
        raise DomainError(f"values must be nonnegative, got {v.tolist()}")
    total = v.sum()
    if not total > 0.0:
        raise DegenerateNormalizationError("cannot normalize a vector with zero total")
    return v / total


def unfairness(attention, relevance) -> float:
    """L2 distance between attention shares and relevance shares."""
    a = np.asarray(attention, dtype=np.float64)
    r = np.asarray(relevance, dtype=np.float64)
    if a.shape != r.shape:
        raise DomainError(f"length mismatch: {a.shape} vs {r.shape}")
    return float(np.linalg.norm(normalized_shares(a) - normalized_shares(r)))


def fairness(attention, relevance) -> float:
    return -unfairness(attention, relevance)


@dataclass
class ExposureLedger:
    """Running totals for one simulated query.

    ``attention`` and ``relevance`` are the cumulative per-item sums ``A``
    and ``R``; ``utility_sum`` adds up the normalized utility of every
    committed impression.
    """

    attention: np.ndarray
    relevance: np.ndarray
    impressions: int = 0
    utility_sum: float = 0.0
    utilities: list[float] = field(default_factory=list)
    # per-impression relevance while it has stayed constant; lets R be J * r exactly
    _constant: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def empty(cls, n_items: int) -> ExposureLedger:
        return cls(np.zeros(n_items), np.zeros(n_items))

    @property
    def n_items(self) -> int:
        return self.attention.shape[0]

    @property
    def mean_utility(self) -> float:
        if self.impressions == 0:
            raise DomainError("no impressions recorded yet")
        return self.utility_sum / self.impressions

    def record(self, attention, relevance, utility: float) -> None:
        """Commit one impression. ``attention`` is indexed by item, not position."""
        attention = np.asarray(attention, dtype=np.float64)
        relevance = np.asarray(relevance, dtype=np.float64)
        if attention.shape != self.attention.shape or relevance.shape != self.relevance.shape:
            raise DomainError("impression vectors do not match the ledger size")
        self.attention = self.attention + attention
        self.relevance = self.relevance_after(relevance)
        self._track_constant(relevance)
        self.impressions += 1
        self.utility_sum += float(utility)
        self.utilities.append(float(utility))

    def record_many(self, attention_rows, relevance, utilities) -> None:
        """Commit several impressions; ``attention_rows`` has one row per impression."""
        rows = np.asarray(attention_rows, dtype=np.float64)
        utilities = [float(u) for u in utilities]
        if rows.ndim != 2 or rows.shape[1] != self.n_items or rows.shape[0] != len(utilities):
            raise DomainError("impression batch does not match the ledger size")
        relevance = np.asarray(relevance, dtype=np.float64)
        self.attention = self.attention + rows.sum(axis=0)
        self.relevance = self.relevance_after(relevance, rows.shape[0])
        self._track_constant(relevance)
        self.impressions += rows.shape[0]
        self.utility_sum += sum(utilities)
        self.utilities.extend(utilities)

    def relevance_after(self, relevance, count: int = 1) -> np.ndarray:
        """Cumulative relevance once ``count`` more impressions of ``relevance`` are added."""
        relevance = np.asarray(relevance, dtype=np.float64)
        if self.impressions == 0 or (
            self._constant is not None and np.array_equal(self._constant, relevance)
        ):
            return relevance * (self.impressions + count)
        return self.relevance + relevance * count

    def _track_constant(self, relevance: np.ndarray) -> None:
        if self.impressions == 0:
            self._constant = relevance.copy()
        elif self._constant is not None and not np.array_equal(self._constant, relevance):
            self._constant = None

    def copy(self) -> ExposureLedger:
        return ExposureLedger(
            self.attention.copy(),
            self.relevance.copy(),
            self.impressions,
            self.utility_sum,
            list(self.utilities),
            None if self._constant is None else self._constant.copy(),
        )

    def unfairness(self) -> float:
        return unfairness(self.attention, self.relevance)


def objective(utility_weight: float, ledger: ExposureLedger) -> float:
    """Weighted sum of mean utility and fairness.

    ``utility_weight * mean_utility + (1 - utility_weight) * fairness``.
    """
    if not 0.0 <= utility_weight <= 1.0:
        raise DomainError(f"weight must lie in [0, 1], got {utility_weight}")
    return utility_weight * ledger.mean_utility + (1.0 - utility_weight) * fairness(
        ledger.attention, ledger.relevance
    )
