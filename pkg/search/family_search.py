"""Subscript-family residue coverage and the search for the largest modulus n.

A family (U, V, W) mod n is feasible when the residues produced by its
pairwise block products cover Z_n. Which residues a family produces is
table-driven: each variant has a contribution schedule whose rows say which
role combinations emit which residues.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from cayley.bounds import quadratic_coefficient
from cayley.connection import (
    ABELIAN_GALOIS,
    CYCLIC_GALOIS,
    UNRESTRICTED_CYCLIC,
    FamilyKey,
    SubscriptFamily,
    Variant,
    assemble,
    canonical_key,
    group_for,
    standard_extras,
)
from cayley.coverage import CoverageReport, check_two_coverage, complete
from cayley.errors import InadmissiblePrime, VariantError
from cayley.events import (
    N_REFUTED,
    N_START,
    SEARCH_DONE,
    SEARCH_START,
    WITNESS,
    EventBus,
    emit,
)
from cayley.algebra import is_cyclic_product, is_prime
from search.pool import WorkerPool, check_deadline

logger = logging.getLogger(__name__)

DEFAULT_COMPLETION_BUDGET = 4

# ---------------------------------------------------------------------------
# Contribution schedules
# ---------------------------------------------------------------------------

ZERO = "zero"  # residue 0 once (two elements of one A-set)
HALF = "half"  # residue n/2 once
CROSS = "cross"  # +-s +-t for s, t in two different roles
DIFF = "diff"  # +-(s - t) for unordered pairs inside one role
SINGLE = "single"  # +-s (product with C_0)
HALF_SHIFT = "half_shift"  # n/2 +- s (product with B_{n/2})

ROLES = ("U", "V", "W")

_GALOIS_BASE = (
    (ZERO, ()),
    (CROSS, ("U", "V")),
    (CROSS, ("U", "W")),
    (CROSS, ("V", "W")),
    (DIFF, ("U",)),
)
_WITH_C0 = ((SINGLE, ("U",)), (SINGLE, ("V",)))
_ABELIAN_SHIFTS = ((HALF_SHIFT, ("U",)), (HALF_SHIFT, ("W",)))

SCHEDULES: dict[tuple[str, bool], tuple[tuple[str, tuple[str, ...]], ...]] = {
    (CYCLIC_GALOIS, False): _GALOIS_BASE,
    (CYCLIC_GALOIS, True): _GALOIS_BASE + _WITH_C0,
    (ABELIAN_GALOIS, False): _GALOIS_BASE + _ABELIAN_SHIFTS,
    (ABELIAN_GALOIS, True): _GALOIS_BASE + _ABELIAN_SHIFTS + _WITH_C0 + ((HALF, ()),),
    (UNRESTRICTED_CYCLIC, False): ((CROSS, ("V", "W")),),
    (UNRESTRICTED_CYCLIC, True): ((CROSS, ("V", "W")), (SINGLE, ("V",))),
}


def contribution_schedule(variant: Variant) -> tuple[tuple[str, tuple[str, ...]], ...]:
    return SCHEDULES[(variant.kind, variant.include_C0)]


def _constant_residues(rows, n: int) -> list[int]:
    out = []
    for rule, _ in rows:
        if rule == ZERO:
            out.append(0)
        elif rule == HALF:
            out.append(n // 2)
    return out


def _element_residues(rows, n: int, role: str, s: int, chosen: dict[str, list[int]]) -> list[int]:
    """Residues gained by adding subscript s to ``role`` given the ``chosen`` ones."""
    out: list[int] = []
    for rule, roles in rows:
        if rule == CROSS:
            if role == roles[0]:
                others = chosen[roles[1]]
            elif role == roles[1]:
                others = chosen[roles[0]]
            else:
                continue
            for t in others:
                out += [(s + t) % n, (s - t) % n, (t - s) % n, (-s - t) % n]
        elif role not in roles:
            continue
        elif rule == DIFF:
            for t in chosen[role]:
                out += [(s - t) % n, (t - s) % n]
        elif rule == SINGLE:
            out += [s % n, -s % n]
        elif rule == HALF_SHIFT:
            out += [(n // 2 + s) % n, (n // 2 - s) % n]
    return out


def residue_multiset(family: SubscriptFamily) -> list[int]:
    """Every designated pair-combination residue of ``family``, with repeats."""
    rows = contribution_schedule(family.variant)
    n = family.n
    chosen: dict[str, list[int]] = {role: [] for role in ROLES}
    out = _constant_residues(rows, n)
    for role, values in zip(ROLES, family.key):
        for s in values:
            out += _element_residues(rows, n, role, s, chosen)
            chosen[role].append(s)
    return out


def pair_count(variant: Variant, g_a: int, g_b: int, g_c: int) -> int:
    """Closed-form size of the residue multiset for a split (g_a, g_b, g_c)."""
    a, b, c = g_a, g_b, g_c
    cross = 4 * (a * b + b * c + a * c)
    if variant.kind == CYCLIC_GALOIS:
        count = cross + a * (a - 1) + 1
        return count + (2 * a + 2 * b if variant.include_C0 else 0)
    if variant.kind == ABELIAN_GALOIS:
        if variant.include_C0:
            return cross + 4 * a + 2 * b + 2 * c + a * (a - 1) + 2
        return cross + a * (a - 1) + 2 * a + 2 * c + 1
    return 4 * b * c + (2 * b if variant.include_C0 else 0)


@dataclass(frozen=True)
class ResidueCoverage:
    n: int
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def duplicates(self) -> tuple[int, ...]:
        return tuple(r for r, k in enumerate(self.counts) if k > 1)

    @property
    def missing(self) -> tuple[int, ...]:
        return tuple(r for r, k in enumerate(self.counts) if k == 0)

    @property
    def excess(self) -> int:
        """Combinations spent on residues already covered."""
        return sum(k - 1 for k in self.counts if k > 1)

    @property
    def is_complete(self) -> bool:
        return not self.missing

    @property
    def is_perfect(self) -> bool:
        return all(k == 1 for k in self.counts)


def residue_coverage(family: SubscriptFamily) -> ResidueCoverage:
    tally = Counter(residue_multiset(family))
    return ResidueCoverage(family.n, tuple(tally.get(r, 0) for r in range(family.n)))


def is_degree_exact(family: SubscriptFamily) -> bool:
    """True iff every difference u - u' lies in +-V or +-V +-V mod n.

    For the Abelian variant n/2 counts as a member of V (B_{n/2} is in X).
    """
    n = family.n
    V = list(family.V) + ([n // 2] if family.variant.include_Bhalf else [])
    signed = {v % n for v in V} | {-v % n for v in V}
    reach = signed | {(s + t) % n for s in signed for t in signed}
    return all((u - u2) % n in reach for u in family.U for u2 in family.U if u != u2)


# ---------------------------------------------------------------------------
# Caps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cap:
    m: int
    variant: Variant
    value: Fraction
    g_a: Fraction
    g_b: Fraction
    g_c: Fraction


def closed_form_cap(m: int, variant: Variant) -> Cap:
    """Real upper bound on n for m pairs, with the optimising real split."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    F = Fraction
    if variant.kind == CYCLIC_GALOIS:
        if variant.include_C0:
            return Cap(m, variant, F(6 * m * m + 4 * m + 5, 4), F(m, 2), F(m + 1, 4), F(m - 1, 4))
        return Cap(m, variant, F(12 * m * m - 4 * m + 9, 8), F(2 * m - 1, 4), F(2 * m + 1, 8), F(2 * m + 1, 8))
    if variant.kind == ABELIAN_GALOIS:
        if variant.include_C0:
            return Cap(m, variant, F(12 * m * m + 20 * m + 17, 8), F(2 * m + 1, 4), F(2 * m - 1, 8), F(2 * m - 1, 8))
        return Cap(m, variant, F(6 * m * m + 4 * m + 3, 4), F(m, 2), F(m - 1, 4), F(m + 1, 4))
    if variant.include_C0:
        return Cap(m, variant, F(m * m + m) + F(1, 4), F(0), F(2 * m + 1, 4), m - F(2 * m + 1, 4))
    return Cap(m, variant, F(m * m), F(0), F(m, 2), F(m, 2))


def integer_cap(m: int, variant: Variant) -> int:
    """Largest n not above the real cap with the variant's parity."""
    n = math.floor(closed_form_cap(m, variant).value)
    if variant.kind == CYCLIC_GALOIS and n % 2 == 0:
        n -= 1
    elif variant.kind == ABELIAN_GALOIS and n % 2 == 1:
        n -= 1
    return n


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _ScanTask:
    kind: str
    include_C0: bool
    n: int
    split: tuple[int, int, int]
    first: int
    require_exact: bool
    deadline: float | None


# nodes between deadline checks
_CHECK_EVERY = 4096


def _scan_task(task: _ScanTask) -> list[FamilyKey]:
    """Canonical keys of every complete family for one (split, first subscript)."""
    variant = Variant.of(task.kind, include_C0=task.include_C0)
    rows = contribution_schedule(variant)
    n, (a, b, c) = task.n, task.split
    roles = ("U",) * a + ("V",) * b + ("W",) * c
    abelian = variant.kind == ABELIAN_GALOIS
    slack = pair_count(variant, a, b, c) - n

    counts = [0] * n
    dup = 0
    for r in _constant_residues(rows, n):
        dup += counts[r] > 0
        counts[r] += 1
    if dup > slack:
        return []

    chosen: dict[str, list[int]] = {role: [] for role in ROLES}
    first_role, g0 = roles[0], task.first
    found: set[FamilyKey] = set()
    nodes = 0

    def place(pos: int, lo: int) -> None:
        nonlocal dup, nodes
        if pos == len(roles):
            if dup != slack:
                return
            key = (tuple(chosen["U"]), tuple(chosen["V"]), tuple(chosen["W"]))
            if task.require_exact and not is_degree_exact(SubscriptFamily.from_key(variant, n, key)):
                return
            found.add(canonical_key(n, key))
            return
        nodes += 1
        if nodes % _CHECK_EVERY == 0:
            check_deadline(task.deadline, n)
        role = roles[pos]
        if pos == 0:
            candidates = range(g0, g0 + 1)
        else:
            candidates = range(lo if roles[pos - 1] == role else 1, n)
        for s in candidates:
            if abelian and 2 * s == n:
                continue
            if pos and role == first_role and math.gcd(s, n) < g0:
                continue
            gained = _element_residues(rows, n, role, s, chosen)
            for r in gained:
                dup += counts[r] > 0
                counts[r] += 1
            if dup <= slack:
                chosen[role].append(s)
                place(pos + 1, s + 1)
                chosen[role].pop()
            for r in gained:
                counts[r] -= 1
                dup -= counts[r] > 0
        return

    place(0, 1)
    return sorted(found)


def _splits(variant: Variant, m: int, n: int) -> list[tuple[int, int, int]]:
    """Splits whose pair count can reach n, nearest the real optimum first."""
    cap = closed_form_cap(m, variant)
    splits = []
    for a in range(m + 1):
        for b in range(m - a + 1):
            c = m - a - b
            if variant.kind == UNRESTRICTED_CYCLIC and a:
                continue
            # two A-sets need a fixed w' from W
            if a >= 2 and c == 0 and not variant.include_C0:
                continue
            if pair_count(variant, a, b, c) >= n:
                splits.append((a, b, c))
    return sorted(splits, key=lambda s: (abs(s[0] - cap.g_a), abs(s[1] - cap.g_b), s))


def _first_values(variant: Variant, n: int) -> list[int]:
    """Candidate least subscripts of the first role: proper divisors of n."""
    return [
        g for g in range(1, n)
        if n % g == 0 and not (variant.kind == ABELIAN_GALOIS and 2 * g == n)
    ]


def _tasks(variant: Variant, m: int, n: int, require_exact: bool, deadline: float | None) -> list[_ScanTask]:
    return [
        _ScanTask(variant.kind, variant.include_C0, n, split, g, require_exact, deadline)
        for split in _splits(variant, m, n)
        for g in _first_values(variant, n)
    ]


@dataclass(frozen=True)
class FamilySearchResult:
    l: int
    variant: Variant
    m: int
    n: int | None
    witnesses: tuple[SubscriptFamily, ...]
    refuted: tuple[int, ...]

    @property
    def coefficient(self) -> Fraction | None:
        return None if self.n is None else quadratic_coefficient(self.n, self.l)


def search_max_n(
    l: int,
    kind: str,
    n_start: int | None = None,
    require_degree_exact: bool = False,
    jobs: int = 1,
    deadline: float | None = None,
    events: EventBus | None = None,
) -> FamilySearchResult:
    """Largest n admitting a complete family for set count l, with every canonical witness.

    Descends from ``n_start`` (default: the integer cap) in steps that keep
    the variant's parity. ``require_degree_exact`` additionally demands
    :func:`is_degree_exact` of each witness.
    """
    variant, m = Variant.for_l(kind, l)
    n = integer_cap(m, variant) if n_start is None else n_start
    step = 1 if kind == UNRESTRICTED_CYCLIC else 2
    if kind == CYCLIC_GALOIS and n % 2 == 0 or kind == ABELIAN_GALOIS and n % 2 == 1:
        n -= 1
    floor = 2 if kind == ABELIAN_GALOIS else 1
    emit(events, SEARCH_START, l=l, variant=variant.label, m=m, n_start=n)
    logger.info("family search l=%d %s (m=%d) from n=%d", l, variant.label, m, n)

    refuted: list[int] = []
    with WorkerPool(jobs) as pool:
        while n >= floor:
            check_deadline(deadline, n)
            tasks = _tasks(variant, m, n, require_degree_exact, deadline)
            emit(events, N_START, n=n, tasks=len(tasks))
            keys = sorted(set().union(*pool.run(_scan_task, tasks, deadline, n))) if tasks else []
            if keys:
                witnesses = tuple(SubscriptFamily.from_key(variant, n, key) for key in keys)
                for w in witnesses:
                    emit(events, WITNESS, n=n, U=list(w.U), V=list(w.V), W=list(w.W))
                emit(events, SEARCH_DONE, n=n, witnesses=len(witnesses))
                logger.info("l=%d %s: n=%d with %d canonical witness(es)", l, variant.label, n, len(witnesses))
                return FamilySearchResult(l, variant, m, n, witnesses, tuple(refuted))
            emit(events, N_REFUTED, n=n)
            logger.debug("l=%d %s: n=%d refuted", l, variant.label, n)
            refuted.append(n)
            n -= step
    emit(events, SEARCH_DONE, n=None, witnesses=0)
    return FamilySearchResult(l, variant, m, None, (), tuple(refuted))


# ---------------------------------------------------------------------------
# End-to-end verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerificationResult:
    family: SubscriptFamily
    p: int | tuple[int, int]
    order: int
    degree: int
    base_degree: int
    completion: tuple
    coverage: CoverageReport

    @property
    def verified(self) -> bool:
        return self.coverage.is_diameter_2

    @property
    def delta(self) -> int | None:
        """Degree offset from l*p (Galois variants only)."""
        if isinstance(self.p, int) and self.family.variant.kind != UNRESTRICTED_CYCLIC:
            return self.degree - self.family.l * self.p
        return None

    @property
    def coefficient(self) -> Fraction:
        return quadratic_coefficient(self.family.n, self.family.l)

    def to_dict(self) -> dict:
        return {
            "variant": self.family.variant.label,
            "l": self.family.l,
            "n": self.family.n,
            **self.family.table_row(),
            "p": list(self.p) if isinstance(self.p, tuple) else self.p,
            "order": self.order,
            "degree": self.degree,
            "base_degree": self.base_degree,
            "delta": self.delta,
            "completion": [list(e.coords) for e in self.completion],
            "verified": self.verified,
        }


def admissibility(family: SubscriptFamily, p: int) -> str | None:
    """Why GF(p) cannot carry ``family``, or None."""
    if not is_prime(p):
        return "not prime"
    if family.variant.kind == CYCLIC_GALOIS and not is_cyclic_product(p, family.n):
        return f"gcd(p(p-1), {family.n}) > 1, the product is not cyclic"
    return None


def verify_family_instance(
    family: SubscriptFamily,
    p: int | tuple[int, int],
    budget: int = DEFAULT_COMPLETION_BUDGET,
) -> VerificationResult:
    """Assemble the family over GF(p) (or Z_s x Z_t), complete it, and check diameter 2.

    Raises CompletionFailure when no completion fits the budget.
    """
    if family.variant.kind != UNRESTRICTED_CYCLIC:
        if not isinstance(p, int):
            raise VariantError(f"the {family.variant.kind} variant takes a prime p, not {p}")
        reason = admissibility(family, p)
        if reason:
            raise InadmissiblePrime(p, reason)
    spec = group_for(family, p)
    base = assemble(family, p, standard_extras(family))
    extras = complete(spec, base, budget)
    X = base.with_elements(extras)
    report = check_two_coverage(spec, X)
    logger.info(
        "%s family n=%d over %s: degree %d (base %d), order %d",
        family.variant.label, family.n, spec.label, X.degree, base.degree, spec.order,
    )
    return VerificationResult(
        family=family,
        p=p,
        order=spec.order,
        degree=X.degree,
        base_degree=base.degree,
        completion=tuple(sorted(extras)),
        coverage=report,
    )
