"""Connection-set building blocks and their assembly.

Galois variants live in F* x F+ x Z_n over GF(p):

    a_u(x) = (x, x, u)     b_v(x) = (x, 0, v)     c_w(y) = (1, y, w)

The unrestricted variant lives in Z_s x Z_t x Z_n with b_v(x) = (x, 0, v)
and c_w(y) = (0, y, w). Every block is closed under inverse.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from cayley.algebra import (
    CYCLIC,
    GroupElement,
    GroupSpec,
    galois_product,
    inverse,
    is_cyclic_product,
    make_prime_field,
    unrestricted_product,
)
from cayley.errors import BadSubscript, EmptyConnectionSet, MissingW, ShapeMismatch, VariantError

logger = logging.getLogger(__name__)

# Variant kinds
CYCLIC_GALOIS = "cyclic"
ABELIAN_GALOIS = "abelian"
UNRESTRICTED_CYCLIC = "unrestricted"
VARIANT_KINDS = (CYCLIC_GALOIS, ABELIAN_GALOIS, UNRESTRICTED_CYCLIC)

# Block kinds
BLOCK_A = "A"
BLOCK_B = "B"
BLOCK_CSTAR = "Cstar"
BLOCK_CPLUS = "Cplus"
BLOCK_KINDS = (BLOCK_A, BLOCK_B, BLOCK_CSTAR, BLOCK_CPLUS)


# ---------------------------------------------------------------------------
# Variant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Variant:
    kind: str
    include_C0: bool = False
    include_Bhalf: bool = False

    def __post_init__(self) -> None:
        if self.kind not in VARIANT_KINDS:
            raise VariantError(f"Unknown variant kind: {self.kind}")
        if self.kind == ABELIAN_GALOIS and not self.include_Bhalf:
            raise VariantError("the Abelian variant always includes B_{n/2}")
        if self.kind != ABELIAN_GALOIS and self.include_Bhalf:
            raise VariantError("B_{n/2} belongs to the Abelian variant only")

    @classmethod
    def of(cls, kind: str, include_C0: bool = False) -> Variant:
        return cls(kind, include_C0=include_C0, include_Bhalf=kind == ABELIAN_GALOIS)

    @classmethod
    def for_l(cls, kind: str, l: int) -> tuple[Variant, int]:
        """Return the variant and pair count m for a set count l.

        Circulant families include C_0 for odd l, Abelian ones for even l
        (B_{n/2} already takes one slot), unrestricted ones for odd l.
        """
        if kind == CYCLIC_GALOIS:
            if l < 3:
                raise VariantError(f"cyclic families need l >= 3, got {l}")
            return cls.of(kind, include_C0=l % 2 == 1), l // 2
        if kind == ABELIAN_GALOIS:
            if l < 4:
                raise VariantError(f"Abelian families need l >= 4, got {l}")
            with_c0 = l % 2 == 0
            return cls.of(kind, include_C0=with_c0), (l - 2) // 2 if with_c0 else (l - 1) // 2
        if kind == UNRESTRICTED_CYCLIC:
            if l < 2:
                raise VariantError(f"unrestricted families need l >= 2, got {l}")
            return cls.of(kind, include_C0=l % 2 == 1), l // 2
        raise VariantError(f"Unknown variant kind: {kind}")

    @classmethod
    def parse(cls, label: str) -> Variant:
        """Parse ``cyclic``, ``cyclic-c0``, ``abelian``, ``abelian-c0``, ..."""
        kind, _, suffix = label.lower().partition("-")
        if suffix not in ("", "c0"):
            raise VariantError(f"Unknown variant label: {label}")
        return cls.of(kind, include_C0=suffix == "c0")

    @property
    def label(self) -> str:
        return self.kind + ("-c0" if self.include_C0 else "")

    def l_for(self, m: int) -> int:
        base = 2 * m + 1 if self.kind == ABELIAN_GALOIS else 2 * m
        return base + int(self.include_C0)

    def check_modulus(self, n: int) -> None:
        if n < 1:
            raise VariantError(f"modulus must be positive, got {n}")
        if self.kind == CYCLIC_GALOIS and n % 2 == 0:
            raise VariantError(f"cyclic Galois families need odd n, got {n}")
        if self.kind == ABELIAN_GALOIS and n % 2 == 1:
            raise VariantError(f"Abelian Galois families need even n, got {n}")


# ---------------------------------------------------------------------------
# Subscript families
# ---------------------------------------------------------------------------


def _normalize(values: Iterable[int], n: int) -> tuple[int, ...]:
    return tuple(sorted({v % n for v in values}))


FamilyKey = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]


def canonical_key(n: int, key: FamilyKey) -> FamilyKey:
    """Least (U, V, W) over all unit multipliers mod n, negation included."""
    units = [k for k in range(1, n) if math.gcd(k, n) == 1]
    return min(
        (tuple(tuple(sorted(s * k % n for s in part)) for part in key) for k in units),
        default=key,
    )


@dataclass(frozen=True)
class SubscriptFamily:
    """Index sets (U, V, W) mod n for one variant.

    ``W`` holds 0 exactly when the variant includes C_0. For the Abelian
    variant the self-inverse subscript n/2 is carried by ``include_Bhalf`` and
    never appears in ``V``.
    """

    variant: Variant
    n: int
    U: tuple[int, ...]
    V: tuple[int, ...]
    W: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.n
        self.variant.check_modulus(n)
        for name in ("U", "V", "W"):
            raw = tuple(getattr(self, name))
            norm = _normalize(raw, n)
            if len(norm) != len(raw):
                raise BadSubscript(f"{name}={raw} has repeated subscripts mod {n}")
            object.__setattr__(self, name, norm)
        if 0 in self.U:
            raise BadSubscript("A_0 adds nothing; 0 is not a valid U subscript")
        if 0 in self.V:
            raise BadSubscript("B_0 is not a valid V subscript")
        if (0 in self.W) != self.variant.include_C0:
            raise BadSubscript(
                f"0 in W must match include_C0={self.variant.include_C0} (W={self.W})"
            )
        if self.variant.kind == ABELIAN_GALOIS:
            half = n // 2
            for name in ("U", "V", "W"):
                if half in getattr(self, name):
                    raise BadSubscript(f"n/2={half} may not appear in {name} for the Abelian variant")
        if self.variant.kind == UNRESTRICTED_CYCLIC and self.U:
            raise VariantError("the unrestricted variant has no A-sets; U must be empty")

    @classmethod
    def from_table(
        cls,
        kind: str,
        n: int,
        U: Iterable[int],
        V: Iterable[int],
        W: Iterable[int],
    ) -> SubscriptFamily:
        """Build a family from a table row: 0 in W selects C_0, n/2 in V is B_{n/2}."""
        W = _normalize(W, n)
        V = _normalize(V, n)
        if kind == ABELIAN_GALOIS:
            V = tuple(v for v in V if 2 * v != n)
        return cls(Variant.of(kind, include_C0=0 in W), n, tuple(U), V, W)

    @property
    def W_nonzero(self) -> tuple[int, ...]:
        return tuple(w for w in self.W if w != 0)

    @property
    def g_a(self) -> int:
        return len(self.U)

    @property
    def g_b(self) -> int:
        return len(self.V)

    @property
    def g_c(self) -> int:
        return len(self.W_nonzero)

    @property
    def m(self) -> int:
        return self.g_a + self.g_b + self.g_c

    @property
    def l(self) -> int:
        return self.variant.l_for(self.m)

    @property
    def key(self) -> FamilyKey:
        return self.U, self.V, self.W_nonzero

    @classmethod
    def from_key(cls, variant: Variant, n: int, key: FamilyKey) -> SubscriptFamily:
        U, V, W = key
        return cls(variant, n, U, V, tuple(W) + ((0,) if variant.include_C0 else ()))

    def scaled(self, factor: int) -> SubscriptFamily:
        """Multiply every subscript by ``factor`` (a unit mod n, or -1)."""
        n = self.n
        if math.gcd(factor, n) != 1:
            raise BadSubscript(f"{factor} is not a unit mod {n}")
        return SubscriptFamily(
            self.variant,
            n,
            tuple(u * factor for u in self.U),
            tuple(v * factor for v in self.V),
            tuple(w * factor for w in self.W),
        )

    def negated(self) -> SubscriptFamily:
        return self.scaled(-1)

    def canonical(self) -> SubscriptFamily:
        """Lexicographically least representative under unit scaling."""
        n = self.n
        return SubscriptFamily.from_key(self.variant, n, canonical_key(n, self.key))

    def table_row(self) -> dict[str, list[int]]:
        """U, V, W as a published table shows them (n/2 in V, 0 in W)."""
        V = list(self.V)
        if self.variant.include_Bhalf:
            V = sorted(V + [self.n // 2])
        return {"U": list(self.U), "V": V, "W": list(self.W)}


# ---------------------------------------------------------------------------
# Connection sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConnectionSet:
    spec: GroupSpec
    elements: frozenset[GroupElement]

    @classmethod
    def from_elements(cls, spec: GroupSpec, elements: Iterable[GroupElement]) -> ConnectionSet:
        """Close ``elements`` under inverse and drop the identity."""
        closed: set[GroupElement] = set()
        for a in elements:
            a = spec.check(a)
            closed.add(a)
            closed.add(inverse(spec, a))
        closed.discard(spec.identity)
        return cls(spec, frozenset(closed))

    @property
    def degree(self) -> int:
        return len(self.elements)

    def contains_identity(self) -> bool:
        return self.spec.identity in self.elements

    def is_inverse_closed(self) -> bool:
        return all(inverse(self.spec, a) in self.elements for a in self.elements)

    def indices(self) -> np.ndarray:
        return self.spec.indices(self.elements)

    def with_elements(self, extra: Iterable[GroupElement]) -> ConnectionSet:
        return ConnectionSet.from_elements(self.spec, set(self.elements) | set(extra))


def _galois_parts(spec: GroupSpec) -> tuple[int, int]:
    p, n = spec.components[0].modulus, spec.components[2].modulus
    return p, n


def _is_unrestricted(spec: GroupSpec) -> bool:
    return len(spec.components) == 3 and all(c.kind == CYCLIC for c in spec.components)


def build_block(spec: GroupSpec, kind: str, subscript: int) -> frozenset[GroupElement]:
    """Return one inverse-closed block, identity included where the block has it."""
    if kind not in BLOCK_KINDS:
        raise ValueError(f"Unknown block kind: {kind}")
    if spec.is_galois:
        p, n = _galois_parts(spec)
        s = subscript % n
        if kind == BLOCK_A:
            if s == 0:
                raise BadSubscript("A_0 adds nothing; it is never built")
            gens = [GroupElement((x, x, s)) for x in range(1, p)]
        elif kind == BLOCK_B:
            gens = [GroupElement((x, 0, s)) for x in range(1, p)]
        elif kind == BLOCK_CSTAR:
            gens = [GroupElement((1, y, s)) for y in range(1, p)]
        else:
            gens = [GroupElement((1, y, s)) for y in range(p)]
    elif _is_unrestricted(spec):
        st, tt, n = (c.modulus for c in spec.components)
        s = subscript % n
        if kind in (BLOCK_A, BLOCK_CSTAR):
            raise BadSubscript(f"block {kind} does not exist over Z_s x Z_t x Z_n")
        if kind == BLOCK_B:
            gens = [GroupElement((x, 0, s)) for x in range(st)]
        else:
            gens = [GroupElement((0, y, s)) for y in range(tt)]
    else:
        raise ShapeMismatch(f"no building blocks are defined over {spec.label}")
    return frozenset(gens) | frozenset(inverse(spec, g) for g in gens)


def standard_extras(family: SubscriptFamily) -> frozenset[GroupElement]:
    """b_u(1) for u in U and b_{u-u'-w'}(1) for ordered pairs u != u', with inverses.

    The identity (when u - u' - w' = 0) is skipped.
    """
    U, n = family.U, family.n
    if not U:
        return frozenset()
    if len(U) >= 2 and not family.W:
        raise MissingW(f"|U|={len(U)} needs a fixed w' but W is empty")
    subscripts = set(U)
    if len(U) >= 2:
        w0 = min(family.W)
        subscripts |= {(u - u2 - w0) % n for u in U for u2 in U if u != u2}
    extras: set[GroupElement] = set()
    for t in subscripts:
        if t == 0:
            continue
        # b_t(1) = (1, 0, t); its inverse is (1, 0, -t)
        extras.add(GroupElement((1, 0, t)))
        extras.add(GroupElement((1, 0, -t % n)))
    return frozenset(extras)


def group_for(family: SubscriptFamily, p_or_st: int | tuple[int, int]) -> GroupSpec:
    """The ambient group of a family, checking variant admissibility."""
    kind, n = family.variant.kind, family.n
    if kind == UNRESTRICTED_CYCLIC:
        if isinstance(p_or_st, int):
            s = t = p_or_st
        else:
            s, t = p_or_st
        if s < 1 or t < 1:
            raise VariantError(f"component orders must be positive, got s={s}, t={t}")
        return unrestricted_product(s, t, n)
    if not isinstance(p_or_st, int):
        raise VariantError(f"the {kind} variant takes a prime p, not {p_or_st}")
    p = p_or_st
    make_prime_field(p)
    if kind == CYCLIC_GALOIS and not is_cyclic_product(p, n):
        raise VariantError(f"F*({p}) x F+({p}) x Z{n} is not cyclic: gcd(p(p-1), n) > 1")
    return galois_product(p, n)


def family_blocks(
    family: SubscriptFamily,
    spec: GroupSpec,
    c_kind: str = BLOCK_CPLUS,
) -> frozenset[GroupElement]:
    """Union of the family's blocks (identity not yet removed)."""
    blocks: set[GroupElement] = set()
    for u in family.U:
        blocks |= build_block(spec, BLOCK_A, u)
    for v in family.V:
        blocks |= build_block(spec, BLOCK_B, v)
    for w in family.W_nonzero:
        blocks |= build_block(spec, c_kind, w)
    if family.variant.include_C0:
        blocks |= build_block(spec, BLOCK_CPLUS, 0)
    if family.variant.include_Bhalf:
        blocks |= build_block(spec, BLOCK_B, family.n // 2)
    return frozenset(blocks)


def assemble(
    family: SubscriptFamily,
    p_or_st: int | tuple[int, int],
    extras: Iterable[GroupElement] | None = None,
    c_kind: str = BLOCK_CPLUS,
) -> ConnectionSet:
    """Union of blocks and extras, closed under inverse, identity removed."""
    spec = group_for(family, p_or_st)
    blocks = family_blocks(family, spec, c_kind)
    extras = frozenset(spec.check(e) for e in (extras or ()))
    overlap = extras & blocks
    if overlap:
        logger.debug("%d extra element(s) already present in the blocks", len(overlap))
    conn = ConnectionSet.from_elements(spec, blocks | extras)
    if not conn.elements:
        raise EmptyConnectionSet(f"family {family.key} over {spec.label} yields no elements")
    logger.debug(
        "assembled %s family n=%d over %s: degree %d (%d extras)",
        family.variant.label, family.n, spec.label, conn.degree, len(extras),
    )
    return conn
