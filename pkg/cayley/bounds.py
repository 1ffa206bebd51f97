"""Closed-form bounds on diameter-2 Abelian Cayley graphs.

Rationals are exact ``Fraction`` values throughout; decimals are only for
presentation (see :func:`decimal`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from cayley.algebra import is_cyclic_product, is_prime
from cayley.connection import ABELIAN_GALOIS, CYCLIC_GALOIS
from cayley.errors import InadmissiblePrime, MissingDelta


def decimal(x: Fraction | float, places: int = 5) -> str:
    return f"{float(x):.{places}f}"


def mac_upper(d: int, k: int = 2) -> int:
    """Upper bound on the order of an Abelian Cayley graph of degree d, diameter k."""
    if d < 2 or k < 1:
        raise ValueError(f"mac_upper needs d >= 2 and k >= 1, got d={d}, k={k}")
    if d % 2 == 0:
        f = d // 2
        return sum(2**i * math.comb(f, i) * math.comb(k, i) for i in range(f + 1))
    f = (d - 1) // 2
    return sum(
        2**i * math.comb(f, i) * (math.comb(k, i) + math.comb(k - 1, i)) for i in range(f + 1)
    )


def lac_lower(d: int, delta_table: Mapping[int, int] | None) -> int:
    """floor(d^2/4) + 2d + delta(d mod 4), with delta supplied by the caller."""
    residue = d % 4
    if not delta_table or residue not in delta_table:
        raise MissingDelta(residue)
    return d * d // 4 + 2 * d + delta_table[residue]


def quadratic_coefficient(n: int, l: int) -> Fraction:
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    return Fraction(n, l * l)


def uac_coefficient(s: int, t: int) -> Fraction:
    """Leading coefficient st/(s+t)^2 of the Z_s x Z_t x Z_n bound."""
    if s < 1 or t < 1:
        raise ValueError(f"s and t must be >= 1, got s={s}, t={t}")
    return Fraction(s * t, (s + t) ** 2)


# ---------------------------------------------------------------------------
# Prime-interval triples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CongruencePrimeTriple:
    """(k, x0, epsilon): for x > x0 a prime of each unit class mod k lies in (x, x(1+delta)]."""

    k: int
    x0_mantissa: int
    x0_exponent: int
    epsilon: Fraction

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"modulus k must be >= 1, got {self.k}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    @property
    def x0(self) -> str:
        return f"{self.x0_mantissa}e{self.x0_exponent}"

    @property
    def delta(self) -> Fraction:
        return 2 * self.epsilon / (1 - self.epsilon)


@dataclass(frozen=True)
class IntervalAdjustment:
    delta: Fraction
    adjusted: Fraction
    threshold: tuple[int, int] | None = None  # degree threshold as (mantissa, exponent)


def cullinan_hajir_coefficient(
    base: Fraction,
    triple: CongruencePrimeTriple,
    l: int | None = None,
) -> IntervalAdjustment:
    """Coefficient valid for every degree past the threshold: base / (1 + delta)^2."""
    base = Fraction(base)
    if base <= 0:
        raise ValueError(f"base coefficient must be positive, got {base}")
    delta = triple.delta
    threshold = None
    if l is not None:
        threshold = (l * triple.x0_mantissa, triple.x0_exponent)
    return IntervalAdjustment(delta=delta, adjusted=base / (1 + delta) ** 2, threshold=threshold)


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Construction:
    key: str
    kind: str  # variant kind of the underlying family
    l: int
    delta: int  # degree = l*p + delta
    n: int
    triple: CongruencePrimeTriple | None = None
    description: str = ""

    @property
    def coefficient(self) -> Fraction:
        return quadratic_coefficient(self.n, self.l)

    def degree(self, p: int) -> int:
        return self.l * p + self.delta

    def order(self, p: int) -> int:
        return self.n * p * (p - 1)

    def order_from_degree(self, d: int) -> Fraction:
        return Fraction(self.n * (d - self.delta) * (d - self.delta - self.l), self.l**2)

    def inadmissible(self, p: int) -> str | None:
        """Why GF(p) cannot carry this construction, or None."""
        if not is_prime(p):
            return "not prime"
        if self.kind == CYCLIC_GALOIS and not is_cyclic_product(p, self.n):
            if self.n % p == 0:
                return f"p divides n={self.n}"
            return f"p = 1 (mod {math.gcd(p - 1, self.n)})"
        return None


_EPS_1310 = CongruencePrimeTriple(3, 1, 100, Fraction("0.001310"))
_EPS_2020 = CongruencePrimeTriple(13, 1, 100, Fraction("0.002020"))
_EPS_0001 = CongruencePrimeTriple(1, 1, 100, Fraction("0.000001"))

MSS_CIRCULANT = Construction(
    key="MSS-circulant",
    kind=CYCLIC_GALOIS,
    l=5,
    delta=-3,
    n=9,
    triple=_EPS_1310,
    description="circulant, d = 5p-3, p = 2 (mod 3), order 9p(p-1)",
)

VETRIK = Construction(
    key="Vetrik",
    kind=CYCLIC_GALOIS,
    l=6,
    delta=-2,
    n=13,
    triple=_EPS_2020,
    description="circulant, d = 6p-2, p != 13 and p != 1 (mod 13), order 13p(p-1)",
)

MSS_ABELIAN = Construction(
    key="MSS-abelian",
    kind=ABELIAN_GALOIS,
    l=4,
    delta=-2,
    n=6,
    triple=_EPS_0001,
    description="Abelian, d = 4p-2, any prime, order 6p(p-1)",
)

CONSTRUCTIONS: dict[str, Construction] = {
    c.key: c for c in (MSS_CIRCULANT, VETRIK, MSS_ABELIAN)
}


def generalized(l: int, n: int, delta: int, kind: str = CYCLIC_GALOIS) -> Construction:
    return Construction(key=f"generalized({l})", kind=kind, l=l, delta=delta, n=n)


def get_construction(key: str | Construction) -> Construction:
    if isinstance(key, Construction):
        return key
    if key not in CONSTRUCTIONS:
        raise ValueError(f"Unknown construction: {key}")
    return CONSTRUCTIONS[key]


def construction_order(
    key: str | Construction,
    d: int | None = None,
    p: int | None = None,
) -> tuple[int, int]:
    """(degree, order) of a construction, from either its degree or its prime."""
    c = get_construction(key)
    if (d is None) == (p is None):
        raise ValueError("give exactly one of d or p")
    if d is not None:
        p, rem = divmod(d - c.delta, c.l)
        if rem:
            raise InadmissiblePrime(p, f"degree {d} is not of the form {c.l}p{c.delta:+d}")
    reason = c.inadmissible(p)
    if reason:
        raise InadmissiblePrime(p, f"{c.key}: {reason}")
    degree, order = c.degree(p), c.order(p)
    if c.order_from_degree(degree) != order:
        raise ArithmeticError(f"{c.key}: degree and prime forms disagree at p={p}")
    return degree, order


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


@dataclass
class BoundReport:
    d: int
    k: int
    mac_upper: int
    construction_orders: dict[str, int] = field(default_factory=dict)
    quadratic_coefficient: Fraction | None = None
    lac_lower: int | None = None

    def to_dict(self) -> dict:
        coeff = self.quadratic_coefficient
        return {
            "d": self.d,
            "k": self.k,
            "mac_upper": self.mac_upper,
            "lac_lower": self.lac_lower,
            "construction_orders": dict(self.construction_orders),
            "quadratic_coefficient": None if coeff is None else str(coeff),
        }


def bound_report(
    d: int,
    k: int = 2,
    delta_table: Mapping[int, int] | None = None,
    constructions: Iterable[Construction] | None = None,
) -> BoundReport:
    """Upper bound plus the order of every construction realised at degree d."""
    report = BoundReport(d=d, k=k, mac_upper=mac_upper(d, k))
    if delta_table:
        report.lac_lower = lac_lower(d, delta_table)
    if k != 2:
        return report
    best: Fraction | None = None
    for c in constructions if constructions is not None else CONSTRUCTIONS.values():
        try:
            _, order = construction_order(c, d=d)
        except InadmissiblePrime:
            continue
        report.construction_orders[c.key] = order
        best = c.coefficient if best is None else max(best, c.coefficient)
    report.quadratic_coefficient = best
    return report
