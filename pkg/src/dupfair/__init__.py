"""Simulator for fair ranking policies in the presence of duplicated items."""

from .browsing import (
    CascadeParams,
    err,
    examination_vector,
    normalized_err,
    stop_distribution,
)
from .errors import CapacityError, DegenerateCatalogError, DegenerateNormalizationError, DomainError
from .fairness import ExposureLedger, fairness, normalized_shares, objective, unfairness
from .policies import (
    Greedy,
    PlackettLuce,
    RandomSource,
    Ranking,
    StaticRelevance,
    enumerate_permutations,
    greedy_next,
    pl_sample,
    static_relevance,
)
from .scenario import DuplicationSpec, Item, ItemCatalog, RelevanceProfile, build_catalog, duplicate, settings_grid
from .simulation import EnsembleSummary, RunResult, duplication_gain, pair_sum_attention, pl_ensemble, run

__version__ = "0.1.0"
