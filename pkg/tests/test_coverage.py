from __future__ import annotations

import itertools
import random

import networkx as nx
import pytest

from cayley.algebra import GroupElement, cyclic_group, enumerate_elements, galois_product, unrestricted_product
from cayley.connection import CYCLIC_GALOIS, ConnectionSet, SubscriptFamily, assemble, standard_extras
from cayley.coverage import INFINITE, check_two_coverage, complete, diameter, eccentricity, two_step_mask
from cayley.errors import CompletionFailure, ShapeMismatch


def circulant(n: int, residues) -> ConnectionSet:
    return ConnectionSet.from_elements(cyclic_group(n), (GroupElement((r % n,)) for r in residues))


def _random_connection_set(spec, rng: random.Random, size: int) -> ConnectionSet:
    elements = list(enumerate_elements(spec))
    return ConnectionSet.from_elements(spec, rng.sample(elements, size))


def _cayley_graph(spec, X: ConnectionSet) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(spec.order))
    idx = X.indices()
    for i in range(spec.order):
        for j in spec.compose_indices(i, idx):
            g.add_edge(i, int(j))
    return g


# ---------------------------------------------------------------------------
# Two-step coverage
# ---------------------------------------------------------------------------


def test_circulant_13_is_diameter_2():
    report = check_two_coverage(cyclic_group(13), circulant(13, [1, 5]))
    assert report.is_diameter_2
    assert report.covered == report.order == 13
    assert report.uncovered == ()


def test_circulant_14_misses_residues():
    report = check_two_coverage(cyclic_group(14), circulant(14, [1, 5]), limit=None)
    assert not report.is_diameter_2
    assert {3, 7, 11} <= {a[0] for a in report.uncovered}
    assert report.covered + len(report.uncovered) == 14
    assert report.to_dict()["uncovered_count"] == report.uncovered_count


def test_complete_graph_is_diameter_2():
    spec = galois_product(3, 4)
    X = ConnectionSet.from_elements(spec, enumerate_elements(spec))
    assert X.degree == spec.order - 1
    assert check_two_coverage(spec, X).is_diameter_2
    assert diameter(spec, X) == 1


def test_uncovered_sample_is_capped():
    report = check_two_coverage(cyclic_group(200), circulant(200, [1]), limit=5)
    assert len(report.uncovered) == 5
    assert report.uncovered_count == 200 - 5


def test_foreign_connection_set():
    with pytest.raises(ShapeMismatch):
        check_two_coverage(cyclic_group(14), circulant(13, [1, 5]))


def test_coverage_is_monotone():
    rng = random.Random(11)
    spec = galois_product(5, 6)
    X = _random_connection_set(spec, rng, 6)
    before = two_step_mask(spec, X.indices())
    bigger = X.with_elements(rng.sample(list(enumerate_elements(spec)), 4))
    after = two_step_mask(spec, bigger.indices())
    assert (after >= before).all()


# ---------------------------------------------------------------------------
# Diameter
# ---------------------------------------------------------------------------


def test_diameter_examples():
    assert diameter(cyclic_group(5), circulant(5, [1])) == 2
    assert diameter(cyclic_group(8), circulant(8, [1, 4])) == 2
    assert diameter(cyclic_group(6), circulant(6, [2])) == INFINITE
    assert diameter(cyclic_group(9), circulant(9, [1])) == 4


@pytest.mark.parametrize("seed", range(100))
def test_coverage_agrees_with_networkx(seed):
    rng = random.Random(seed)
    spec = rng.choice([cyclic_group(rng.randrange(5, 80)), galois_product(rng.choice([3, 5, 7]), rng.randrange(1, 9)), unrestricted_product(2, 3, rng.randrange(2, 9))])
    X = _random_connection_set(spec, rng, rng.randrange(1, 6))
    g = _cayley_graph(spec, X)
    expected = nx.diameter(g) if nx.is_connected(g) else INFINITE
    assert diameter(spec, X) == expected
    assert check_two_coverage(spec, X).is_diameter_2 == (expected <= 2)


@pytest.mark.parametrize("seed", range(10))
def test_eccentricity_is_vertex_independent(seed):
    rng = random.Random(1000 + seed)
    spec = galois_product(rng.choice([3, 5]), rng.randrange(2, 7))
    X = _random_connection_set(spec, rng, 4)
    base = eccentricity(spec, X)
    for _ in range(5):
        source = spec.element_at(rng.randrange(spec.order))
        assert eccentricity(spec, X, source) == base


# ---------------------------------------------------------------------------
# Completion
# ---------------------------------------------------------------------------


def test_complete_nothing_to_do():
    assert complete(cyclic_group(13), circulant(13, [1, 5]), 0) == frozenset()


def test_complete_fails_with_zero_budget():
    with pytest.raises(CompletionFailure) as err:
        complete(cyclic_group(14), circulant(14, [1]), 0)
    assert err.value.budget == 0
    assert err.value.uncovered > 0


def test_complete_l5_family_without_standard_extras():
    fam = SubscriptFamily.from_table(CYCLIC_GALOIS, 9, [1], [3], [0])
    base = assemble(fam, 5)
    assert base.degree == 20
    extras = complete(base.spec, base, 2)
    assert len(extras) == 2
    X = base.with_elements(extras)
    assert X.degree == 22
    assert check_two_coverage(base.spec, X).is_diameter_2


def test_complete_with_standard_extras_needs_nothing_for_l5():
    fam = SubscriptFamily.from_table(CYCLIC_GALOIS, 9, [1], [3], [0])
    base = assemble(fam, 5, standard_extras(fam))
    assert complete(base.spec, base, 2) == frozenset()


def test_complete_needs_two_pairs():
    spec = cyclic_group(15)
    base = circulant(15, [1])
    with pytest.raises(CompletionFailure):
        complete(spec, base, 1)
    extras = complete(spec, base, 2)
    X = base.with_elements(extras)
    assert X.degree == 6
    assert check_two_coverage(spec, X).is_diameter_2


def test_complete_is_minimal_on_small_circulants():
    # one pair suffices for n <= 13, two are needed from 15 on
    for n, pairs in ((11, 1), (13, 1), (17, 2), (19, 2)):
        spec = cyclic_group(n)
        base = circulant(n, [1])
        extras = complete(spec, base, 3)
        assert len(extras) == 2 * pairs
        assert check_two_coverage(spec, base.with_elements(extras)).is_diameter_2


def test_complete_rejects_large_budget():
    with pytest.raises(ValueError):
        complete(cyclic_group(14), circulant(14, [1]), 7)


def _least_by_brute_force(n: int, budget: int) -> tuple[int, ...] | None:
    spec = cyclic_group(n)
    reps = range(2, n // 2 + 1)
    for k in range(1, budget + 1):
        for combo in itertools.combinations(reps, k):
            if check_two_coverage(spec, circulant(n, [1, *combo])).is_diameter_2:
                return combo
    return None


@pytest.mark.parametrize("n", range(8, 36))
def test_complete_returns_lexicographically_least_pairs(n):
    expected = _least_by_brute_force(n, 3)
    if expected is None:
        with pytest.raises(CompletionFailure):
            complete(cyclic_group(n), circulant(n, [1]), 3)
        return
    extras = complete(cyclic_group(n), circulant(n, [1]), 3)
    assert tuple(sorted({min(a[0], n - a[0]) for a in extras})) == expected
