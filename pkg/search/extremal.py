"""Extremal diameter-2 circulant graphs: record checks, exhaustive search, quadratic fit."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from cayley.algebra import GroupElement, cyclic_group
from cayley.bounds import mac_upper
from cayley.connection import ConnectionSet
from cayley.coverage import check_two_coverage, diameter
from cayley.errors import DegenerateSystem, MalformedRecord
from cayley.events import N_REFUTED, N_START, SEARCH_DONE, SEARCH_START, WITNESS, EventBus, emit
from search.pool import WorkerPool, check_deadline

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtremalRecord:
    """A circulant graph given by degree, order and generators in [1, n/2].

    Generators keep the order they were given in; odd degrees add n/2 when
    ``self_inverse_included`` is set.
    """

    d: int
    n: int
    generators: tuple[int, ...]
    self_inverse_included: bool = False

    @property
    def sorted_generators(self) -> tuple[int, ...]:
        return tuple(sorted(self.generators))

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "generators": list(self.generators),
            "self_inverse_included": self.self_inverse_included,
        }


def check_record(rec: ExtremalRecord) -> None:
    n, gens = rec.n, rec.generators
    if rec.d < 1:
        raise MalformedRecord(f"degree must be positive, got {rec.d}")
    if n < 3:
        raise MalformedRecord(f"order must be >= 3, got {n}")
    if len(set(gens)) != len(gens):
        raise MalformedRecord(f"repeated generators in {list(gens)}")
    for g in gens:
        if not 1 <= g <= n // 2:
            raise MalformedRecord(f"generator {g} outside [1, {n // 2}] for n={n}")
    if rec.self_inverse_included and n % 2:
        raise MalformedRecord(f"n={n} is odd; Z_n has no self-inverse element n/2")


def connection_residues(rec: ExtremalRecord) -> tuple[int, ...]:
    """Generators, their negatives and (if flagged) n/2."""
    check_record(rec)
    n = rec.n
    res = {g % n for g in rec.generators} | {-g % n for g in rec.generators}
    if rec.self_inverse_included:
        res.add(n // 2)
    return tuple(sorted(res))


def circulant_connection_set(n: int, residues: Iterable[int]) -> ConnectionSet:
    return ConnectionSet.from_elements(cyclic_group(n), (GroupElement((r % n,)) for r in residues))


@dataclass(frozen=True)
class RecordAudit:
    record: ExtremalRecord
    degree: int
    diameter: int | float
    uncovered_count: int
    in_order: bool

    @property
    def degree_ok(self) -> bool:
        return self.degree == self.record.d

    @property
    def is_valid(self) -> bool:
        return self.degree_ok and self.diameter == 2

    @property
    def flags(self) -> list[str]:
        out = []
        if not self.degree_ok:
            out.append(f"degree {self.degree} != {self.record.d}")
        if self.diameter != 2:
            out.append(f"diameter {self.diameter} ({self.uncovered_count} uncovered)")
        if not self.in_order:
            out.append("generators not sorted")
        return out


def audit_record(rec: ExtremalRecord) -> RecordAudit:
    residues = connection_residues(rec)
    spec = cyclic_group(rec.n)
    X = circulant_connection_set(rec.n, residues)
    report = check_two_coverage(spec, X, limit=0)
    audit = RecordAudit(
        record=rec,
        degree=X.degree,
        diameter=diameter(spec, X),
        uncovered_count=report.uncovered_count,
        in_order=list(rec.generators) == sorted(rec.generators),
    )
    if audit.flags:
        logger.warning("record d=%d n=%d flagged: %s", rec.d, rec.n, "; ".join(audit.flags))
    return audit


def verify_record(rec: ExtremalRecord) -> bool:
    return audit_record(rec).is_valid


def canonical_generators(n: int, generators: Sequence[int]) -> tuple[int, ...]:
    """Least sorted generator set over all multipliers u with gcd(u, n) = 1."""
    best = None
    for u in range(1, n):
        if math.gcd(u, n) != 1:
            continue
        image = tuple(sorted(min(g * u % n, -g * u % n) for g in generators))
        if best is None or image < best:
            best = image
    return best if best is not None else tuple(sorted(generators))


# ---------------------------------------------------------------------------
# Exhaustive search
# ---------------------------------------------------------------------------


def covers_two_step(n: int, residues: Iterable[int]) -> bool:
    """Z_n = {0} + S + S + S with S given as residues, on an int bitmask."""
    full = (1 << n) - 1
    base = 1
    residues = list(residues)
    for r in residues:
        base |= 1 << r
    cov = base
    for r in residues:
        cov |= ((base << r) | (base >> (n - r))) & full
        if cov == full:
            return True
    return cov == full


@dataclass(frozen=True)
class _ExtremalTask:
    n: int
    size: int  # generators to choose (excluding n/2)
    odd: bool
    prefix: tuple[int, ...]  # fixed leading generators
    deadline: float | None


_CHECK_EVERY = 20000


def _generator_top(n: int, odd: bool) -> int:
    return n // 2 - 1 if odd else (n - 1) // 2


def _scan_extremal(task: _ExtremalTask) -> tuple[int, ...] | None:
    """Lexicographically first covering generator set extending ``task.prefix``."""
    n, prefix = task.n, task.prefix
    g0 = prefix[0]
    pool = [s for s in range(prefix[-1] + 1, _generator_top(n, task.odd) + 1) if math.gcd(s, n) >= g0]
    fixed = set()
    for g in prefix:
        fixed |= {g, n - g}
    if task.odd:
        fixed.add(n // 2)
    for i, rest in enumerate(itertools.combinations(pool, task.size - len(prefix))):
        if i % _CHECK_EVERY == 0:
            check_deadline(task.deadline, n)
        residues = set(fixed)
        for s in rest:
            residues |= {s, n - s}
        if covers_two_step(n, residues):
            return prefix + rest
    return None


def _extremal_tasks(n: int, size: int, odd: bool, deadline: float | None) -> list[_ExtremalTask]:
    top = _generator_top(n, odd)
    tasks = []
    for g in range(1, top + 1):
        if n % g:
            continue
        if size == 1:
            tasks.append(_ExtremalTask(n, size, odd, (g,), deadline))
            continue
        for s in range(g + 1, top + 1):
            if math.gcd(s, n) >= g:
                tasks.append(_ExtremalTask(n, size, odd, (g, s), deadline))
    return tasks


def _first_witness(n: int, size: int, odd: bool, pool: WorkerPool, deadline: float | None) -> tuple[int, ...] | None:
    tasks = _extremal_tasks(n, size, odd, deadline)
    # tasks are in lexicographic order; a wave's minimum success is the global first
    wave = pool.jobs * 4 if pool.jobs > 1 else 1
    for lo in range(0, len(tasks), wave):
        hits = [h for h in pool.run(_scan_extremal, tasks[lo:lo + wave], deadline, n) if h]
        if hits:
            return min(hits)
    return None


def search_extremal(
    d: int,
    n_max: int | None = None,
    jobs: int = 1,
    deadline: float | None = None,
    events: EventBus | None = None,
) -> ExtremalRecord:
    """Largest n with a diameter-2 circulant of degree d, and its first canonical witness.

    Generator sets are enumerated in multiplier-canonical form only: the least
    generator divides n and no other has a smaller gcd with n.
    """
    if d < 2:
        raise ValueError(f"degree must be >= 2, got {d}")
    odd = d % 2 == 1
    size = d // 2
    n = mac_upper(d, 2) if n_max is None else n_max
    emit(events, SEARCH_START, d=d, n_start=n)
    logger.info("extremal search d=%d from n=%d", d, n)
    with WorkerPool(jobs) as pool:
        while n >= 3:
            if odd and n % 2:
                n -= 1
                continue
            check_deadline(deadline, n)
            emit(events, N_START, n=n)
            gens = _first_witness(n, size, odd, pool, deadline)
            if gens:
                rec = ExtremalRecord(d, n, gens, odd)
                emit(events, WITNESS, n=n, generators=list(gens))
                emit(events, SEARCH_DONE, n=n)
                logger.info("d=%d: n=%d generators %s", d, n, list(gens))
                return rec
            emit(events, N_REFUTED, n=n)
            n -= 1
    raise ValueError(f"no diameter-2 circulant of degree {d} at or below n={n_max}")


# ---------------------------------------------------------------------------
# Quadratic fit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticFit:
    """Least-squares n = a d^2 + b d + c, kept exact."""

    a: Fraction
    b: Fraction
    c: Fraction
    residual: Fraction

    def evaluate(self, d: int) -> Fraction:
        return self.a * d * d + self.b * d + self.c

    def to_dict(self) -> dict:
        return {
            "a": float(self.a),
            "b": float(self.b),
            "c": float(self.c),
            "residual": float(self.residual),
        }


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over the rationals."""
    size = len(rhs)
    rows = [row[:] + [r] for row, r in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((i for i in range(col, size) if rows[i][col] != 0), None)
        if pivot is None:
            raise DegenerateSystem("normal equations are singular")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        lead = rows[col][col]
        rows[col] = [x / lead for x in rows[col]]
        for i in range(size):
            if i != col and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[col])]
    return [rows[i][size] for i in range(size)]


def fit_residual(records: Iterable[ExtremalRecord], a, b, c) -> Fraction:
    """Sum of squared errors of n = a d^2 + b d + c over the records."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    return sum(((rec.n - (a * rec.d**2 + b * rec.d + c)) ** 2 for rec in records), Fraction(0))


def quadratic_fit(records: Sequence[ExtremalRecord]) -> QuadraticFit:
    points = [(rec.d, rec.n) for rec in records]
    if len({d for d, _ in points}) < 3:
        raise DegenerateSystem(f"need at least 3 distinct degrees, got {len({d for d, _ in points})}")
    # power sums are exact integers
    s = [sum(d**k for d, _ in points) for k in range(5)]
    t = [sum(n * d**k for d, n in points) for k in range(3)]
    matrix = [[Fraction(s[4 - i - j]) for j in range(3)] for i in range(3)]
    a, b, c = _solve(matrix, [Fraction(t[2]), Fraction(t[1]), Fraction(t[0])])
    fit = QuadraticFit(a, b, c, fit_residual(records, a, b, c))
    logger.info("fit over %d records: a=%.6f b=%.6f c=%.6f", len(points), a, b, c)
    return fit
