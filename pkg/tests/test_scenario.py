import numpy as np
import pytest

from dupfair.errors import DomainError
from dupfair.scenario import (
    DuplicationSpec,
    Item,
    ItemCatalog,
    RelevanceProfile,
    build_catalog,
    duplicate,
    settings_grid,
)


@pytest.mark.parametrize(
    "delta, expected",
    [
        (0.25, [1, 0.75, 0.5, 0.25, 0]),
        (0.05, [1, 0.95, 0.9, 0.85, 0.8]),
        (0.125, [1, 0.875, 0.75, 0.625, 0.5]),
    ],
)
def test_build_catalog(delta, expected):
    cat = build_catalog(RelevanceProfile(delta))
    np.testing.assert_allclose(cat.relevances, expected, rtol=1e-15)
    assert all(not item.is_duplicate for item in cat)
    np.testing.assert_allclose(np.diff(cat.relevances), -delta, rtol=1e-12)


def test_profile_rejects_negative_relevance():
    with pytest.raises(DomainError):
        RelevanceProfile(0.25, item_count=6)
    with pytest.raises(DomainError):
        RelevanceProfile(0.0)


@pytest.mark.parametrize("k, expected", [(1.0, 1.0), (0.5, 0.5)])
def test_duplicate_appends_scaled_copy(k, expected):
    cat = build_catalog(RelevanceProfile(0.25))
    before = [(i.item_id, i.relevance, i.duplicate_of) for i in cat]
    dup = duplicate(cat, DuplicationSpec(0, k))
    assert len(dup) == 6
    assert dup.items[-1] == Item(5, expected, duplicate_of=0)
    assert [(i.item_id, i.relevance, i.duplicate_of) for i in cat] == before
    assert dup.items[:5] == cat.items


def test_duplicate_none_is_identity():
    cat = build_catalog(RelevanceProfile(0.05))
    assert duplicate(cat, DuplicationSpec(None, 0.5)) is cat


def test_duplicate_errors():
    cat = duplicate(build_catalog(RelevanceProfile(0.25)), DuplicationSpec(1, 1.0))
    with pytest.raises(DomainError):
        duplicate(cat, DuplicationSpec(5, 1.0))
    with pytest.raises(DomainError):
        duplicate(cat, DuplicationSpec(2, 1.0))
    with pytest.raises(DomainError):
        DuplicationSpec(0, 0.0)
    with pytest.raises(DomainError):
        duplicate(build_catalog(RelevanceProfile(0.25)), DuplicationSpec(7, 1.0))


def test_catalog_validation():
    with pytest.raises(DomainError):
        ItemCatalog((Item(0, 0.5), Item(1, 0.5, duplicate_of=3)))
    with pytest.raises(DomainError):
        ItemCatalog((Item(1, 0.5),))
    with pytest.raises(DomainError):
        ItemCatalog(())


def test_zero_relevance_duplicate_is_allowed():
    dup = duplicate(build_catalog(RelevanceProfile(0.25)), DuplicationSpec(4, 1.0))
    assert dup.items[-1].relevance == 0.0


def test_settings_grid_sizes():
    grid = settings_grid([0.25, 0.125, 0.05], [1.0, 0.5], [100])
    assert len(grid) == 36
    assert sum(s.duplicated_item is None for s in grid) == 6
    assert len(settings_grid([0.05], [1.0], [100])) == 6
    assert all(s.lam is None for s in grid)
    assert len(settings_grid([0.25, 0.05], [1.0, 0.5], [20, 100], [0.0, 0.5])) == 2 * 2 * 6 * 2 * 2


def test_settings_grid_descriptors_build_catalogs():
    for s in settings_grid([0.25], [0.5], [20]):
        cat = s.catalog()
        assert len(cat) == (5 if s.duplicated_item is None else 6)


def test_settings_grid_validation():
    with pytest.raises(DomainError):
        settings_grid([], [1.0], [100])
    with pytest.raises(DomainError):
        settings_grid([0.05], [1.0], [100], [1.5])
