"""Prime fields, cyclic components and their direct products.

A group is described by a :class:`GroupSpec`, an ordered tuple of cyclic
components. Elements are plain coordinate tuples wrapped in
:class:`GroupElement`; every group also carries a dense index bijection onto
``[0, |G|)`` (mixed radix, first component most significant) which the
coverage code uses for flat bitsets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from cayley.errors import NotPrime, ShapeMismatch, TooLarge

# Component kinds
MULTIPLICATIVE = "mul"  # F* of GF(p), stored as residues 1..p-1
FIELD_ADDITIVE = "add"  # F+ of GF(p)
CYCLIC = "cyclic"  # Z_n
COMPONENT_KINDS = (MULTIPLICATIVE, FIELD_ADDITIVE, CYCLIC)

MAX_ORDER = 2**31

# Deterministic Miller-Rabin for every n below 3.317e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in _MR_WITNESSES:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise NotPrime(self.p)

    @property
    def multiplicative_order(self) -> int:
        return self.p - 1

    @property
    def additive_order(self) -> int:
        return self.p

    def inv(self, x: int) -> int:
        return pow(x % self.p, -1, self.p)


def make_prime_field(p: int) -> PrimeField:
    return PrimeField(p)


# ---------------------------------------------------------------------------
# Components
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    kind: str
    modulus: int

    def __post_init__(self) -> None:
        if self.kind not in COMPONENT_KINDS:
            raise ValueError(f"Unknown component kind: {self.kind}")
        if self.kind == CYCLIC:
            if self.modulus < 1:
                raise ValueError(f"cyclic modulus must be >= 1, got {self.modulus}")
        else:
            make_prime_field(self.modulus)

    @cached_property
    def field(self) -> PrimeField:
        return make_prime_field(self.modulus)

    @property
    def order(self) -> int:
        return self.modulus - 1 if self.kind == MULTIPLICATIVE else self.modulus

    @property
    def identity(self) -> int:
        return 1 if self.kind == MULTIPLICATIVE else 0

    @property
    def label(self) -> str:
        if self.kind == MULTIPLICATIVE:
            return f"F*({self.modulus})"
        if self.kind == FIELD_ADDITIVE:
            return f"F+({self.modulus})"
        return f"Z{self.modulus}"

    def values(self) -> range:
        if self.kind == MULTIPLICATIVE:
            return range(1, self.modulus)
        return range(self.modulus)

    def contains(self, x: int) -> bool:
        if self.kind == MULTIPLICATIVE:
            return 1 <= x < self.modulus
        return 0 <= x < self.modulus

    def compose(self, x: int, y: int) -> int:
        if self.kind == MULTIPLICATIVE:
            return x * y % self.modulus
        return (x + y) % self.modulus

    def inverse(self, x: int) -> int:
        if self.kind == MULTIPLICATIVE:
            return self.field.inv(x)
        return -x % self.modulus

    def power(self, x: int, k: int) -> int:
        if self.kind == MULTIPLICATIVE:
            return pow(x, k, self.modulus)
        return x * k % self.modulus

    def element_order(self, x: int) -> int:
        if self.kind != MULTIPLICATIVE:
            return self.modulus // math.gcd(x, self.modulus)
        k, y = 1, x
        while y != 1:
            y = y * x % self.modulus
            k += 1
        return k

    # -- dense digits: value - 1 for F*, value otherwise -------------------

    def digit(self, x: int) -> int:
        return x - 1 if self.kind == MULTIPLICATIVE else x

    def value(self, digit: int) -> int:
        return digit + 1 if self.kind == MULTIPLICATIVE else digit

    @cached_property
    def _inverse_digits(self) -> np.ndarray:
        return np.array([self.field.inv(r) - 1 for r in range(1, self.modulus)], dtype=np.int64)

    def compose_digits(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.kind == MULTIPLICATIVE:
            return (x + 1) * (y + 1) % self.modulus - 1
        return (x + y) % self.modulus

    def inverse_digits(self, x: np.ndarray) -> np.ndarray:
        if self.kind == MULTIPLICATIVE:
            return self._inverse_digits[x]
        return -x % self.modulus


def multiplicative_of_field(p: int) -> Component:
    return Component(MULTIPLICATIVE, p)


def additive_of_field(p: int) -> Component:
    return Component(FIELD_ADDITIVE, p)


def cyclic_additive(n: int) -> Component:
    return Component(CYCLIC, n)


# ---------------------------------------------------------------------------
# Elements and products
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class GroupElement:
    coords: tuple[int, ...]

    def __iter__(self) -> Iterator[int]:
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, i: int) -> int:
        return self.coords[i]

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class GroupSpec:
    components: tuple[Component, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("a group needs at least one component")

    @property
    def order(self) -> int:
        return math.prod(c.order for c in self.components)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(c.order for c in self.components)

    @property
    def identity(self) -> GroupElement:
        return GroupElement(tuple(c.identity for c in self.components))

    @property
    def label(self) -> str:
        return " x ".join(c.label for c in self.components)

    @property
    def is_galois(self) -> bool:
        """True for F* x F+ x Z_n over a prime field."""
        kinds = tuple(c.kind for c in self.components)
        return kinds == (MULTIPLICATIVE, FIELD_ADDITIVE, CYCLIC)

    def element(self, *coords: int) -> GroupElement:
        return self.check(GroupElement(tuple(coords)))

    def check(self, a: GroupElement | Sequence[int]) -> GroupElement:
        if not isinstance(a, GroupElement):
            a = GroupElement(tuple(int(x) for x in a))
        if len(a) != len(self.components):
            raise ShapeMismatch(
                f"element {a} has {len(a)} coordinates, group {self.label} has {len(self.components)}"
            )
        for comp, x in zip(self.components, a):
            if not comp.contains(x):
                raise ShapeMismatch(f"coordinate {x} out of range for component {comp.label}")
        return a

    def check_size(self) -> None:
        if self.order > MAX_ORDER:
            raise TooLarge(self.order, MAX_ORDER)

    # -- dense index bijection ------------------------------------------------

    def index(self, a: GroupElement) -> int:
        a = self.check(a)
        i = 0
        for comp, x in zip(self.components, a):
            i = i * comp.order + comp.digit(x)
        return i

    def element_at(self, i: int) -> GroupElement:
        if not 0 <= i < self.order:
            raise ShapeMismatch(f"index {i} outside [0, {self.order})")
        digits = []
        for comp in reversed(self.components):
            i, d = divmod(i, comp.order)
            digits.append(comp.value(d))
        return GroupElement(tuple(reversed(digits)))

    def indices(self, elements: Iterable[GroupElement]) -> np.ndarray:
        return np.array(sorted(self.index(a) for a in elements), dtype=np.int64)

    def elements_at(self, idx: Iterable[int]) -> list[GroupElement]:
        return [self.element_at(int(i)) for i in idx]

    def compose_indices(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Vectorised composition on dense indices (broadcasts like numpy)."""
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        da = np.unravel_index(a, self.shape)
        db = np.unravel_index(b, self.shape)
        out = [c.compose_digits(x, y) for c, x, y in zip(self.components, da, db)]
        return np.ravel_multi_index(out, self.shape).astype(np.int64)

    def inverse_indices(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        da = np.unravel_index(a, self.shape)
        out = [c.inverse_digits(x) for c, x in zip(self.components, da)]
        return np.ravel_multi_index(out, self.shape).astype(np.int64)


def compose(spec: GroupSpec, a: GroupElement, b: GroupElement) -> GroupElement:
    a, b = spec.check(a), spec.check(b)
    return GroupElement(tuple(c.compose(x, y) for c, x, y in zip(spec.components, a, b)))


def inverse(spec: GroupSpec, a: GroupElement) -> GroupElement:
    a = spec.check(a)
    return GroupElement(tuple(c.inverse(x) for c, x in zip(spec.components, a)))


def power(spec: GroupSpec, a: GroupElement, k: int) -> GroupElement:
    a = spec.check(a)
    return GroupElement(tuple(c.power(x, k) for c, x in zip(spec.components, a)))


def element_order(spec: GroupSpec, a: GroupElement) -> int:
    a = spec.check(a)
    return math.lcm(*(c.element_order(x) for c, x in zip(spec.components, a)))


def enumerate_elements(spec: GroupSpec) -> Iterator[GroupElement]:
    """Every element once, in dense index order. Raises TooLarge before iterating."""
    spec.check_size()
    return (GroupElement(coords) for coords in itertools.product(*(c.values() for c in spec.components)))


def is_cyclic_product(p: int, n: int) -> bool:
    make_prime_field(p)
    return math.gcd(p, n) == 1 and math.gcd(p - 1, n) == 1


def galois_product(p: int, n: int) -> GroupSpec:
    """F* x F+ x Z_n over GF(p)."""
    return GroupSpec((multiplicative_of_field(p), additive_of_field(p), cyclic_additive(n)))


def unrestricted_product(s: int, t: int, n: int) -> GroupSpec:
    """Z_s x Z_t x Z_n."""
    return GroupSpec((cyclic_additive(s), cyclic_additive(t), cyclic_additive(n)))


def cyclic_group(n: int) -> GroupSpec:
    return GroupSpec((cyclic_additive(n),))
