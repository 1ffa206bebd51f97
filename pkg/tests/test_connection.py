from __future__ import annotations

import pytest

from cayley.algebra import GroupElement, cyclic_group, galois_product, inverse, is_prime, unrestricted_product
from cayley.connection import (
    ABELIAN_GALOIS,
    BLOCK_A,
    BLOCK_B,
    BLOCK_CPLUS,
    BLOCK_CSTAR,
    CYCLIC_GALOIS,
    UNRESTRICTED_CYCLIC,
    ConnectionSet,
    SubscriptFamily,
    Variant,
    assemble,
    build_block,
    canonical_key,
    group_for,
    standard_extras,
)
from cayley.errors import BadSubscript, EmptyConnectionSet, MissingW, NotPrime, ShapeMismatch, VariantError

PRIMES = (3, 5, 7, 11, 13, 17, 19, 23)


def _l5() -> SubscriptFamily:
    return SubscriptFamily.from_table(CYCLIC_GALOIS, 9, [1], [3], [0])


# ---------------------------------------------------------------------------
# Variants
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "kind, l, include_C0, m",
    [
        (CYCLIC_GALOIS, 4, False, 2),
        (CYCLIC_GALOIS, 5, True, 2),
        (CYCLIC_GALOIS, 8, False, 4),
        (ABELIAN_GALOIS, 4, True, 1),
        (ABELIAN_GALOIS, 5, False, 2),
        (ABELIAN_GALOIS, 10, True, 4),
        (UNRESTRICTED_CYCLIC, 3, True, 1),
        (UNRESTRICTED_CYCLIC, 6, False, 3),
    ],
)
def test_variant_for_l_round_trip(kind, l, include_C0, m):
    variant, got_m = Variant.for_l(kind, l)
    assert (variant.include_C0, got_m) == (include_C0, m)
    assert variant.include_Bhalf is (kind == ABELIAN_GALOIS)
    assert variant.l_for(m) == l


def test_variant_validation():
    with pytest.raises(VariantError):
        Variant(ABELIAN_GALOIS)
    with pytest.raises(VariantError):
        Variant(CYCLIC_GALOIS, include_Bhalf=True)
    with pytest.raises(VariantError):
        Variant("dihedral")
    with pytest.raises(VariantError):
        Variant.for_l(CYCLIC_GALOIS, 2)


def test_variant_parse_and_label():
    v = Variant.parse("abelian-c0")
    assert v == Variant.of(ABELIAN_GALOIS, include_C0=True)
    assert v.label == "abelian-c0"
    assert Variant.parse("cyclic").label == "cyclic"
    with pytest.raises(VariantError):
        Variant.parse("cyclic-x")


def test_modulus_parity():
    with pytest.raises(VariantError):
        SubscriptFamily.from_table(CYCLIC_GALOIS, 10, [1], [3], [0])
    with pytest.raises(VariantError):
        SubscriptFamily.from_table(ABELIAN_GALOIS, 9, [1], [], [0])


# ---------------------------------------------------------------------------
# Subscript families
# ---------------------------------------------------------------------------


def test_family_sizes_and_l():
    fam = _l5()
    assert fam.variant.include_C0
    assert (fam.g_a, fam.g_b, fam.g_c, fam.m, fam.l) == (1, 1, 0, 2, 5)
    assert fam.W_nonzero == ()

    fam = SubscriptFamily.from_table(CYCLIC_GALOIS, 13, [1], [3], [4])
    assert not fam.variant.include_C0
    assert fam.l == 6


def test_abelian_table_row_keeps_half_in_v():
    fam = SubscriptFamily.from_table(ABELIAN_GALOIS, 34, [1, 8], [2, 17], [0, 13])
    assert fam.V == (2,)
    assert fam.variant.include_Bhalf and fam.variant.include_C0
    assert fam.l == 10
    assert fam.table_row() == {"U": [1, 8], "V": [2, 17], "W": [0, 13]}


def test_family_validation():
    variant = Variant.of(CYCLIC_GALOIS)
    with pytest.raises(BadSubscript):
        SubscriptFamily(variant, 13, (0,), (3,), (4,))
    with pytest.raises(BadSubscript):
        SubscriptFamily(variant, 13, (1,), (0,), (4,))
    with pytest.raises(BadSubscript):
        SubscriptFamily(variant, 13, (1,), (3,), (0,))  # 0 in W without C_0
    with pytest.raises(BadSubscript):
        SubscriptFamily(variant, 13, (1, 14), (3,), (4,))
    with pytest.raises(BadSubscript):
        SubscriptFamily(Variant.of(ABELIAN_GALOIS), 8, (4,), (), (3,))
    with pytest.raises(VariantError):
        SubscriptFamily(Variant.of(UNRESTRICTED_CYCLIC), 5, (1,), (2,), (3,))


def test_roles_may_share_residues():
    fam = SubscriptFamily.from_table(UNRESTRICTED_CYCLIC, 4, [], [1], [1, 2])
    assert fam.V == (1,) and fam.W == (1, 2)


def test_scaling_and_canonical_form():
    fam = SubscriptFamily.from_table(CYCLIC_GALOIS, 13, [1], [3], [4])
    assert fam.negated().key == ((12,), (10,), (9,))
    assert fam.scaled(2).key == ((2,), (6,), (8,))
    for k in (2, 5, 12):
        assert fam.scaled(k).canonical() == fam.canonical()
    assert fam.canonical().key == canonical_key(13, fam.key)
    assert fam.canonical().key <= fam.key
    with pytest.raises(BadSubscript):
        fam.scaled(13)


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------


def test_block_sizes_worked_examples():
    spec = galois_product(5, 9)
    assert len(build_block(spec, BLOCK_A, 1)) == 8
    assert len(build_block(spec, BLOCK_CPLUS, 0)) == 5
    assert spec.identity in build_block(spec, BLOCK_CPLUS, 0)

    half = build_block(galois_product(5, 6), BLOCK_B, 3)
    assert len(half) == 4
    spec6 = galois_product(5, 6)
    assert {a for a in half if inverse(spec6, a) == a} == {GroupElement((1, 0, 3)), GroupElement((4, 0, 3))}


@pytest.mark.slow
@pytest.mark.parametrize("p", [p for p in range(2, 51) if is_prime(p)])
def test_block_sizes_closed_forms(p):
    for n in range(2, 51):
        spec = galois_product(p, n)
        for s in range(1, n):
            if 2 * s == n:
                assert len(build_block(spec, BLOCK_B, s)) == p - 1
                continue
            assert len(build_block(spec, BLOCK_A, s)) == 2 * (p - 1)
            assert len(build_block(spec, BLOCK_B, s)) == 2 * (p - 1)
            assert len(build_block(spec, BLOCK_CSTAR, s)) == 2 * (p - 1)
            assert len(build_block(spec, BLOCK_CPLUS, s)) == 2 * p
        assert len(build_block(spec, BLOCK_CPLUS, 0)) == p


def test_unrestricted_block_sizes():
    spec = unrestricted_product(3, 4, 10)
    assert len(build_block(spec, BLOCK_B, 2)) == 6
    assert len(build_block(spec, BLOCK_CPLUS, 3)) == 8
    assert len(build_block(spec, BLOCK_CPLUS, 0)) == 4
    with pytest.raises(BadSubscript):
        build_block(spec, BLOCK_A, 1)


def test_block_errors():
    with pytest.raises(BadSubscript):
        build_block(galois_product(5, 9), BLOCK_A, 0)
    with pytest.raises(ShapeMismatch):
        build_block(cyclic_group(9), BLOCK_B, 1)
    with pytest.raises(ValueError):
        build_block(galois_product(5, 9), "D", 1)


# ---------------------------------------------------------------------------
# Extras and assembly
# ---------------------------------------------------------------------------


def test_standard_extras_single_u():
    assert standard_extras(_l5()) == {GroupElement((1, 0, 1)), GroupElement((1, 0, 8))}


def test_standard_extras_pairs_of_u():
    fam = SubscriptFamily.from_table(CYCLIC_GALOIS, 17, [1, 8], [3], [0])
    assert standard_extras(fam) == {GroupElement((1, 0, t)) for t in (1, 16, 8, 9, 7, 10)}


def test_standard_extras_empty_u():
    fam = SubscriptFamily.from_table(UNRESTRICTED_CYCLIC, 4, [], [1], [1, 2])
    assert standard_extras(fam) == frozenset()


def test_standard_extras_needs_w():
    fam = SubscriptFamily(Variant.of(CYCLIC_GALOIS), 17, (1, 8), (3,), ())
    with pytest.raises(MissingW):
        standard_extras(fam)


@pytest.mark.parametrize(
    "kind, n, U, V, W, p, degree",
    [
        (CYCLIC_GALOIS, 9, [1], [3], [0], 5, 22),  # 5p - 3
        (CYCLIC_GALOIS, 13, [1], [3], [4], 7, 40),  # 6p - 2
        (ABELIAN_GALOIS, 6, [1], [3], [0], 5, 18),  # 4p - 2
    ],
)
def test_assemble_known_degrees(kind, n, U, V, W, p, degree):
    fam = SubscriptFamily.from_table(kind, n, U, V, W)
    X = assemble(fam, p, standard_extras(fam))
    assert X.degree == degree
    assert X.is_inverse_closed()
    assert not X.contains_identity()


def test_assemble_degree_formula_without_collisions():
    fam = SubscriptFamily.from_table(CYCLIC_GALOIS, 13, [1], [3], [4])
    for p in (3, 5, 7, 11):
        extras = standard_extras(fam)
        X = assemble(fam, p, extras)
        blocks = 2 * fam.g_a * (p - 1) + 2 * fam.g_b * (p - 1) + 2 * fam.g_c * p
        assert X.degree == blocks + len(extras)

    fam = _l5()
    X = assemble(fam, 11, standard_extras(fam))
    # C_0^+ loses the identity
    assert X.degree == 2 * 10 + 2 * 10 + (11 - 1) + 2


def test_assemble_rejects_empty():
    fam = SubscriptFamily(Variant.of(CYCLIC_GALOIS), 9, (), (), ())
    with pytest.raises(EmptyConnectionSet):
        assemble(fam, 5)


def test_group_for_admissibility():
    fam = _l5()
    assert group_for(fam, 5).order == 180
    with pytest.raises(VariantError):
        group_for(fam, 7)
    with pytest.raises(NotPrime):
        group_for(fam, 9)
    with pytest.raises(VariantError):
        group_for(fam, (3, 3))
    fam_u = SubscriptFamily.from_table(UNRESTRICTED_CYCLIC, 4, [], [1], [1, 2])
    assert group_for(fam_u, (3, 5)).order == 60


def test_connection_set_from_elements():
    spec = cyclic_group(10)
    X = ConnectionSet.from_elements(spec, [GroupElement((1,)), GroupElement((0,)), GroupElement((5,))])
    assert X.elements == {GroupElement((1,)), GroupElement((9,)), GroupElement((5,))}
    assert X.degree == 3
    assert X.with_elements([GroupElement((3,))]).degree == 5
