from __future__ import annotations

import random
import time
from fractions import Fraction

import pytest

from cayley.connection import ABELIAN_GALOIS, CYCLIC_GALOIS, UNRESTRICTED_CYCLIC, SubscriptFamily, Variant
from cayley.errors import CompletionFailure, InadmissiblePrime, TimeBudgetExceeded, VariantError
from cayley.events import N_REFUTED, N_START, SEARCH_DONE, SEARCH_START, WITNESS, EventBus
from search.family_search import (
    closed_form_cap,
    integer_cap,
    is_degree_exact,
    pair_count,
    residue_coverage,
    residue_multiset,
    search_max_n,
    verify_family_instance,
)

# (l, n, U, V, W) as published: 0 in W is C_0, n/2 in V is B_{n/2}
CYCLIC_ROWS = [
    (5, 9, [1], [3], [0]),
    (6, 13, [1], [3], [4]),
    (7, 17, [1, 8], [3], [0]),
    (8, 21, [2, 9], [3], [1]),
    (9, 27, [5, 11], [12, 13], [0]),
    (10, 35, [13, 16], [7, 8], [9]),
    (11, 41, [7, 17], [2, 13], [0, 1]),
]

ABELIAN_ROWS = [
    (4, 6, [1], [3], [0]),
    (5, 8, [1], [4], [3]),
    (6, 12, [1], [6], [0, 3]),
    (7, 16, [1, 6], [8], [2]),
    (8, 22, [2, 7], [11], [0, 1]),
    (9, 26, [2, 9], [13], [1, 4]),
    (10, 34, [1, 8], [2, 17], [0, 13]),
]

# two smallest admissible primes for each cyclic row: gcd(p(p - 1), n) = 1
CYCLIC_PRIMES = {9: (2, 5), 13: (2, 3), 17: (2, 3), 21: (2, 5), 27: (2, 5), 35: (2, 3), 41: (2, 3)}


def _row(kind, row) -> SubscriptFamily:
    _, n, U, V, W = row
    return SubscriptFamily.from_table(kind, n, U, V, W)


# ---------------------------------------------------------------------------
# Residue coverage
# ---------------------------------------------------------------------------


def test_l5_family_covers_perfectly():
    cov = residue_coverage(_row(CYCLIC_GALOIS, CYCLIC_ROWS[0]))
    assert cov.is_complete
    assert cov.is_perfect
    assert cov.total == 9
    assert sorted(residue_multiset(_row(CYCLIC_GALOIS, CYCLIC_ROWS[0]))) == list(range(9))


def test_l6_family_covers_perfectly():
    cov = residue_coverage(_row(CYCLIC_GALOIS, CYCLIC_ROWS[1]))
    assert cov.is_perfect
    assert cov.excess == 0


def test_l8_family_has_two_duplicates():
    cov = residue_coverage(_row(CYCLIC_GALOIS, CYCLIC_ROWS[3]))
    assert cov.is_complete
    assert cov.total == 23
    assert cov.duplicates == (1, 20)
    assert cov.excess == 2


def test_abelian_l5_family():
    fam = _row(ABELIAN_GALOIS, ABELIAN_ROWS[1])
    assert fam.V == ()
    cov = residue_coverage(fam)
    assert cov.is_complete
    assert cov.duplicates == (4,)
    assert sorted(residue_multiset(fam)) == [0, 1, 2, 3, 4, 4, 5, 6, 7]


def test_incomplete_family_reports_missing():
    fam = SubscriptFamily(Variant.of(CYCLIC_GALOIS, include_C0=True), 11, (1,), (3,), (0,))
    cov = residue_coverage(fam)
    assert not cov.is_complete
    assert len(cov.missing) == 2
    assert cov.total == 9


@pytest.mark.parametrize("kind, rows", [(CYCLIC_GALOIS, CYCLIC_ROWS), (ABELIAN_GALOIS, ABELIAN_ROWS)])
def test_published_rows_are_complete(kind, rows):
    for row in rows:
        fam = _row(kind, row)
        assert fam.l == row[0]
        cov = residue_coverage(fam)
        assert cov.is_complete, row
        assert cov.total == pair_count(fam.variant, fam.g_a, fam.g_b, fam.g_c)


def _spread_family(variant: Variant, n: int, a: int, b: int, c: int) -> SubscriptFamily:
    values = [s for s in range(1, n) if 2 * s != n]
    U, V, W = values[:a], values[a:a + b], values[a + b:a + b + c]
    return SubscriptFamily(variant, n, tuple(U), tuple(V), tuple(W) + ((0,) if variant.include_C0 else ()))


@pytest.mark.parametrize(
    "variant, n",
    [
        (Variant.of(CYCLIC_GALOIS), 101),
        (Variant.of(CYCLIC_GALOIS, include_C0=True), 101),
        (Variant.of(ABELIAN_GALOIS), 102),
        (Variant.of(ABELIAN_GALOIS, include_C0=True), 102),
        (Variant.of(UNRESTRICTED_CYCLIC), 101),
        (Variant.of(UNRESTRICTED_CYCLIC, include_C0=True), 101),
    ],
    ids=lambda v: getattr(v, "label", str(v)),
)
def test_pair_count_matches_multiset(variant, n):
    for m in range(1, 9):
        for a in range(m + 1):
            if variant.kind == UNRESTRICTED_CYCLIC and a:
                continue
            for b in range(m - a + 1):
                c = m - a - b
                fam = _spread_family(variant, n, a, b, c)
                assert len(residue_multiset(fam)) == pair_count(variant, a, b, c), (m, a, b, c)


GALOIS_VARIANTS = [
    Variant.of(CYCLIC_GALOIS),
    Variant.of(CYCLIC_GALOIS, include_C0=True),
    Variant.of(ABELIAN_GALOIS),
    Variant.of(ABELIAN_GALOIS, include_C0=True),
]


def _random_family(variant: Variant, rng: random.Random) -> SubscriptFamily:
    even = variant.kind == ABELIAN_GALOIS
    n = rng.choice([k for k in range(5, 46) if k % 2 == int(not even)])
    pool = [s for s in range(1, n) if 2 * s != n]
    a, b, c = (rng.randint(1, 2), rng.randint(1, 2), rng.randint(0, 2))
    picked = rng.sample(pool, min(len(pool), a + b + c))
    U, V, W = picked[:a], picked[a:a + b], picked[a + b:]
    return SubscriptFamily(variant, n, tuple(U), tuple(V), tuple(W) + ((0,) if variant.include_C0 else ()))


@pytest.mark.parametrize("variant", GALOIS_VARIANTS, ids=lambda v: v.label)
def test_residue_coverage_is_negation_symmetric(variant):
    rng = random.Random(11)
    for _ in range(300):
        fam = _random_family(variant, rng)
        assert residue_coverage(fam) == residue_coverage(fam.negated()), fam


@pytest.mark.parametrize("variant", GALOIS_VARIANTS, ids=lambda v: v.label)
def test_perfect_coverage_stays_under_cap(variant):
    rng = random.Random(13)
    families = [_random_family(variant, rng) for _ in range(300)]
    kind = variant.kind
    rows = CYCLIC_ROWS if kind == CYCLIC_GALOIS else ABELIAN_ROWS
    families += [f for f in (_row(kind, r) for r in rows) if f.variant == variant]
    perfect = 0
    for fam in families:
        if residue_coverage(fam).is_perfect:
            perfect += 1
            assert fam.n <= closed_form_cap(fam.m, variant).value, fam
    # the l=5 and l=6 circulant rows are perfect
    if kind == CYCLIC_GALOIS:
        assert perfect


# ---------------------------------------------------------------------------
# Degree exactness
# ---------------------------------------------------------------------------


def test_degree_exact_examples():
    assert not is_degree_exact(_row(CYCLIC_GALOIS, CYCLIC_ROWS[2]))
    assert not is_degree_exact(_row(CYCLIC_GALOIS, CYCLIC_ROWS[4]))
    shared = SubscriptFamily(Variant.of(CYCLIC_GALOIS, include_C0=True), 9, (1, 2), (1,), (0,))
    assert is_degree_exact(shared)


def test_single_u_is_always_degree_exact():
    for kind, rows in ((CYCLIC_GALOIS, CYCLIC_ROWS), (ABELIAN_GALOIS, ABELIAN_ROWS)):
        for row in rows:
            fam = _row(kind, row)
            if fam.g_a <= 1:
                assert is_degree_exact(fam)


# ---------------------------------------------------------------------------
# Caps
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "kind, include_C0, m, value",
    [
        (CYCLIC_GALOIS, False, 2, Fraction(49, 8)),
        (CYCLIC_GALOIS, True, 2, Fraction(37, 4)),
        (CYCLIC_GALOIS, True, 1, Fraction(15, 4)),
        (ABELIAN_GALOIS, True, 1, Fraction(49, 8)),
        (ABELIAN_GALOIS, False, 2, Fraction(35, 4)),
        (UNRESTRICTED_CYCLIC, False, 3, Fraction(9)),
    ],
)
def test_closed_form_cap(kind, include_C0, m, value):
    assert closed_form_cap(m, Variant.of(kind, include_C0=include_C0)).value == value


def test_cap_split_sums_to_m():
    for kind in (CYCLIC_GALOIS, ABELIAN_GALOIS, UNRESTRICTED_CYCLIC):
        for c0 in (False, True):
            for m in range(1, 12):
                cap = closed_form_cap(m, Variant.of(kind, include_C0=c0))
                assert cap.g_a + cap.g_b + cap.g_c == m


CYCLIC_REAL = [3.75, 6.125, 9.25, 13.125, 17.75, 23.125, 29.25, 36.125, 43.75, 52.125, 61.25, 71.125, 81.75, 93.125, 105.25]
CYCLIC_INT = [3, 5, 9, 13, 17, 23, 29, 35, 43, 51, 61, 71, 81, 93, 105]
ABELIAN_REAL = [6.125, 8.75, 13.125, 17.25, 23.125, 28.75, 36.125, 43.25, 52.125, 60.75, 71.125, 81.25, 93.125]
ABELIAN_INT = [6, 8, 12, 16, 22, 28, 36, 42, 52, 60, 70, 80, 92]


def test_cyclic_caps_by_l():
    for l, real, whole in zip(range(3, 18), CYCLIC_REAL, CYCLIC_INT):
        variant, m = Variant.for_l(CYCLIC_GALOIS, l)
        assert float(closed_form_cap(m, variant).value) == real
        assert integer_cap(m, variant) == whole


def test_abelian_caps_by_l():
    for l, real, whole in zip(range(4, 17), ABELIAN_REAL, ABELIAN_INT):
        variant, m = Variant.for_l(ABELIAN_GALOIS, l)
        assert float(closed_form_cap(m, variant).value) == real
        assert integer_cap(m, variant) == whole


def test_cap_rejects_zero_pairs():
    with pytest.raises(ValueError):
        closed_form_cap(0, Variant.of(CYCLIC_GALOIS))


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

CYCLIC_MAX = {3: 3, 4: 5, 5: 9, 6: 13, 7: 17, 8: 21, 9: 27, 10: 35, 11: 41}
ABELIAN_MAX = {4: 6, 5: 8, 6: 12, 7: 16, 8: 22, 9: 26, 10: 34}


@pytest.mark.parametrize(
    "l",
    [pytest.param(l, marks=pytest.mark.slow) if l >= 10 else l for l in CYCLIC_MAX],
)
def test_search_cyclic(l):
    result = search_max_n(l, CYCLIC_GALOIS)
    assert result.n == CYCLIC_MAX[l]
    assert result.witnesses
    for w in result.witnesses:
        assert residue_coverage(w).is_complete
        assert w.l == l
        assert w == w.canonical()


@pytest.mark.parametrize(
    "l",
    [pytest.param(l, marks=pytest.mark.slow) if l >= 9 else l for l in ABELIAN_MAX],
)
def test_search_abelian(l):
    result = search_max_n(l, ABELIAN_GALOIS)
    assert result.n == ABELIAN_MAX[l]
    assert all(residue_coverage(w).is_complete for w in result.witnesses)


def test_search_finds_published_witness():
    for row in CYCLIC_ROWS[:3]:
        result = search_max_n(row[0], CYCLIC_GALOIS)
        assert _row(CYCLIC_GALOIS, row).canonical() in result.witnesses


def test_search_records_refuted_values():
    result = search_max_n(8, CYCLIC_GALOIS)
    assert result.refuted == (23,)
    assert result.n == 21
    assert result.coefficient == Fraction(21, 64)


def test_search_unrestricted():
    result = search_max_n(4, UNRESTRICTED_CYCLIC)
    assert result.refuted == (4,)
    assert result.n == 3


def test_search_start_keeps_parity():
    result = search_max_n(5, CYCLIC_GALOIS, n_start=10)
    assert result.n == 9
    assert result.refuted == ()


def test_search_degree_exact_filter():
    plain = search_max_n(7, CYCLIC_GALOIS)
    exact = search_max_n(7, CYCLIC_GALOIS, require_degree_exact=True)
    assert all(is_degree_exact(w) for w in exact.witnesses)
    assert exact.n is None or exact.n <= plain.n


def test_search_is_schedule_independent():
    serial = search_max_n(7, CYCLIC_GALOIS, jobs=1)
    parallel = search_max_n(7, CYCLIC_GALOIS, jobs=3)
    assert serial == parallel


def test_search_events():
    bus = EventBus()
    witnesses = []
    bus.on(WITNESS, witnesses.append)
    result = search_max_n(8, CYCLIC_GALOIS, events=bus)
    types = [e["type"] for e in bus.get_log()]
    assert types == [SEARCH_START, N_START, N_REFUTED, N_START, SEARCH_DONE]
    assert bus.get_log()[2]["n"] == 23
    assert len(witnesses) == len(result.witnesses)


def test_search_deadline():
    with pytest.raises(TimeBudgetExceeded) as err:
        search_max_n(9, CYCLIC_GALOIS, deadline=time.time() - 1)
    assert err.value.frontier == 29


def test_search_rejects_small_l():
    with pytest.raises(VariantError):
        search_max_n(2, CYCLIC_GALOIS)


# ---------------------------------------------------------------------------
# Verification over GF(p)
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "kind, row, p, order, degree, pairs",
    [
        (CYCLIC_GALOIS, CYCLIC_ROWS[0], 5, 180, 22, 0),
        (CYCLIC_GALOIS, CYCLIC_ROWS[0], 11, 990, 52, 0),
        (CYCLIC_GALOIS, CYCLIC_ROWS[1], 7, 546, 40, 0),
        (CYCLIC_GALOIS, CYCLIC_ROWS[3], 5, 420, 44, 1),
        (CYCLIC_GALOIS, CYCLIC_ROWS[5], 3, 210, 30, 0),
        (ABELIAN_GALOIS, ABELIAN_ROWS[0], 3, 36, 10, 0),
        (ABELIAN_GALOIS, ABELIAN_ROWS[0], 5, 120, 18, 0),
        (ABELIAN_GALOIS, ABELIAN_ROWS[3], 5, 320, 38, 0),
        (ABELIAN_GALOIS, ABELIAN_ROWS[4], 5, 440, 42, 1),
    ],
)
def test_verify_family_instance(kind, row, p, order, degree, pairs):
    result = verify_family_instance(_row(kind, row), p)
    assert result.verified
    assert result.order == order
    assert result.degree == degree
    assert len(result.completion) == 2 * pairs
    assert result.base_degree == degree - 2 * pairs


def test_verified_construction_offsets():
    l5 = verify_family_instance(_row(CYCLIC_GALOIS, CYCLIC_ROWS[0]), 5)
    assert l5.delta == -3
    assert l5.coefficient == Fraction(9, 25)
    l6 = verify_family_instance(_row(CYCLIC_GALOIS, CYCLIC_ROWS[1]), 7)
    assert l6.delta == -2
    l4 = verify_family_instance(_row(ABELIAN_GALOIS, ABELIAN_ROWS[0]), 5)
    assert l4.delta == -2
    assert l4.to_dict()["V"] == [3]


def test_verify_unrestricted_family():
    fam = SubscriptFamily.from_table(UNRESTRICTED_CYCLIC, 4, [], [1], [1, 2])
    result = verify_family_instance(fam, (3, 3))
    assert result.verified
    assert (result.order, result.degree) == (36, 13)
    assert result.completion == ()
    assert result.delta is None
    assert result.to_dict()["p"] == [3, 3]


def test_verify_rejects_inadmissible_primes():
    fam = _row(CYCLIC_GALOIS, CYCLIC_ROWS[0])
    with pytest.raises(InadmissiblePrime):
        verify_family_instance(fam, 7)
    with pytest.raises(InadmissiblePrime):
        verify_family_instance(fam, 9)
    with pytest.raises(VariantError):
        verify_family_instance(fam, (5, 5))


def test_verify_budget_exhausted():
    fam = _row(CYCLIC_GALOIS, CYCLIC_ROWS[3])
    with pytest.raises(CompletionFailure) as err:
        verify_family_instance(fam, 5, budget=0)
    assert err.value.uncovered > 0


def _table_cases():
    for row in CYCLIC_ROWS:
        for p in CYCLIC_PRIMES[row[1]]:
            yield pytest.param(CYCLIC_GALOIS, row, p, marks=pytest.mark.slow, id=f"cyclic-l{row[0]}-p{p}")
    for row in ABELIAN_ROWS:
        for p in (2, 3):
            yield pytest.param(ABELIAN_GALOIS, row, p, marks=pytest.mark.slow, id=f"abelian-l{row[0]}-p{p}")


@pytest.mark.parametrize("kind, row, p", list(_table_cases()))
def test_every_published_row_verifies(kind, row, p):
    result = verify_family_instance(_row(kind, row), p)
    assert result.verified
    assert result.order == row[1] * p * (p - 1)
