import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from dupfair.errors import CapacityError, DomainError
from dupfair.fairness import ExposureLedger
from dupfair.policies import (
    Greedy,
    RandomSource,
    Ranking,
    enumerate_permutations,
    greedy_next,
    greedy_scores,
    permutation_table,
    pl_sample,
    pl_sample_batch,
    static_relevance,
)
from dupfair.scenario import DuplicationSpec, ItemCatalog, RelevanceProfile, build_catalog, duplicate

D25 = build_catalog(RelevanceProfile(0.25))
D05 = build_catalog(RelevanceProfile(0.05))


@pytest.mark.parametrize("n", [1, 2, 5, 6, 8])
def test_enumerate_permutations(n):
    perms = list(enumerate_permutations(n))
    assert len(perms) == math.factorial(n) == len(set(perms))
    assert perms == sorted(perms)


@pytest.mark.parametrize("n", [0, 9])
def test_enumerate_permutations_bounds(n):
    with pytest.raises(CapacityError):
        enumerate_permutations(n)


def test_capacity_error_for_large_catalog():
    cat = ItemCatalog.from_relevances([0.5] * 9)
    with pytest.raises(CapacityError):
        greedy_next(ExposureLedger.empty(9), cat, 0.5)


def test_ranking_validation():
    with pytest.raises(DomainError):
        Ranking((0, 0, 1))
    assert Ranking((2, 0, 1)).position_of(0) == 2


def test_static_relevance():
    assert static_relevance(D05).order == (0, 1, 2, 3, 4)
    dup = duplicate(D25, DuplicationSpec(0, 1.0))
    assert static_relevance(dup).order[:2] == (0, 5)
    assert static_relevance(ItemCatalog.from_relevances([0.3] * 4)).order == (0, 1, 2, 3)
    assert static_relevance(D05) == static_relevance(D05)


def test_greedy_lambda_zero_is_relevance_sort():
    led = ExposureLedger.empty(5)
    led.record([0.1, 3.0, 0.2, 0.0, 1.0], D25.relevances, 0.3)
    assert greedy_next(led, D25, 0.0).order == (0, 1, 2, 3, 4)
    assert greedy_next(ExposureLedger.empty(5), D25, 0.0).order == (0, 1, 2, 3, 4)


def test_greedy_demotes_top_item_on_second_impression():
    # expected rankings computed with tests/oracle.py brute force over 120 permutations
    led = ExposureLedger.empty(5)
    first = greedy_next(led, D05, 0.5)
    assert first.order == (0, 1, 2, 3, 4)
    table = permutation_table(D05)
    idx = list(enumerate_permutations(5)).index(first.order)
    led.record(table.attention[idx], D05.relevances, table.utility[idx])
    second = greedy_next(led, D05, 0.5)
    assert second.order[0] != 0
    assert second.order == (2, 3, 4, 1, 0)


def test_greedy_rejects_bad_inputs():
    with pytest.raises(DomainError):
        greedy_next(ExposureLedger.empty(4), D25, 0.5)
    with pytest.raises(DomainError):
        greedy_next(ExposureLedger.empty(5), D25, 1.5)


def test_greedy_tie_breaks_to_lexicographic_first():
    flat = ItemCatalog.from_relevances([0.5, 0.5, 0.5])
    assert greedy_next(ExposureLedger.empty(3), flat, 0.0).order == (0, 1, 2)


@st.composite
def ledger_instances(draw):
    n = draw(st.integers(2, 5))
    rel = draw(st.lists(st.sampled_from([0.0, 0.25, 0.5, 0.8, 1.0]) | st.floats(0.0, 1.0), min_size=n, max_size=n))
    if max(rel) == 0:
        rel[0] = 1.0
    j = draw(st.integers(0, 30))
    att = draw(st.lists(st.floats(0.0, 20.0), min_size=n, max_size=n)) if j else [0.0] * n
    usum = draw(st.floats(0.0, float(j))) if j else 0.0
    lam = draw(st.sampled_from([0.0, 0.1, 0.2, 0.5, 1.0]) | st.floats(0.0, 1.0))
    return rel, att, j, usum, lam


@settings(max_examples=150, deadline=None)
@given(ledger_instances())
def test_greedy_attains_brute_force_maximum(inst):
    rel, att, j, usum, lam = inst
    cat = ItemCatalog.from_relevances(rel)
    led = ExposureLedger(np.array(att), np.array(rel) * j, j, usum)
    chosen = greedy_next(led, cat, lam)
    scores = greedy_scores(led, cat, lam)
    assert scores[list(enumerate_permutations(len(rel))).index(chosen.order)] >= scores.max() - 1e-12
    assert chosen.order == oracle.greedy_argmax(att, list(np.array(rel) * j), j, usum, rel, lam)


def test_greedy_utility_component_non_increasing_in_fairness_weight():
    rng = np.random.default_rng(5)
    for _ in range(30):
        rel = rng.uniform(0.05, 1.0, 5)
        cat = ItemCatalog.from_relevances(rel)
        led = ExposureLedger(rng.uniform(0, 10, 5), rel * 7, 7, 6.0)
        table = permutation_table(cat)
        perms = list(enumerate_permutations(5))
        utils = [table.utility[perms.index(greedy_next(led, cat, lam).order)] for lam in np.linspace(0, 1, 11)]
        assert all(a >= b - 1e-12 for a, b in zip(utils, utils[1:]))


def test_pl_first_draw_probability_example():
    assert D25.relevances[0] / D25.relevances.sum() == pytest.approx(0.4)


def test_pl_single_item_and_zero_relevance():
    rng = RandomSource(3)
    assert pl_sample(ItemCatalog.from_relevances([0.4]), rng).order == (0,)
    cat = ItemCatalog.from_relevances([1.0, 0.0])
    assert {tuple(r) for r in pl_sample_batch(cat, rng, 500)} == {(0, 1)}


def test_pl_all_zero_remainder_is_uniform():
    cat = ItemCatalog.from_relevances([1.0, 0.0, 0.0, 0.0])
    rows = pl_sample_batch(cat, RandomSource(11), 40_000)
    assert np.all(rows[:, 0] == 0)
    counts = Counter(rows[:, 1].tolist())
    for item in (1, 2, 3):
        assert abs(counts[item] / 40_000 - 1 / 3) < 4 * math.sqrt((1 / 3) * (2 / 3) / 40_000)


def _sequential_pl_second_position(rel, first, second):
    # P(second | first) under sequential sampling without replacement
    rest = sum(rel) - rel[first]
    return rel[first] / sum(rel) * rel[second] / rest


def test_pl_second_position_matches_sequential_sampling():
    rel = D25.relevances
    rows = pl_sample_batch(D25, RandomSource(21), 100_000)
    n = len(rows)
    for a, b in [(0, 1), (1, 0), (2, 0), (0, 3)]:
        p = _sequential_pl_second_position(rel, a, b)
        freq = np.mean((rows[:, 0] == a) & (rows[:, 1] == b))
        assert abs(freq - p) < 4 * math.sqrt(p * (1 - p) / n)


def test_pl_determinism():
    a = pl_sample_batch(D05, RandomSource(42), 50)
    b = pl_sample_batch(D05, RandomSource(42), 50)
    np.testing.assert_array_equal(a, b)
    rng = RandomSource(42)
    singles = np.array([pl_sample(D05, rng).order for _ in range(50)])
    np.testing.assert_array_equal(singles, a)
    assert not np.array_equal(a, pl_sample_batch(D05, RandomSource(43), 50))


def test_random_source_bounds():
    with pytest.raises(DomainError):
        RandomSource(-1)
    assert RandomSource(2**64 - 1).derive(1).seed == 0
