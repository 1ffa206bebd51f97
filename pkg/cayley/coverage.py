"""Diameter-2 coverage, BFS diameter and connection-set completion.

All three work on the dense index bijection of :class:`GroupSpec`: the
covered set is a flat numpy bool array of length |G|.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from cayley.algebra import GroupElement, GroupSpec
from cayley.connection import ConnectionSet
from cayley.errors import CompletionFailure, ShapeMismatch

logger = logging.getLogger(__name__)

DEFAULT_UNCOVERED_LIMIT = 20
MAX_COMPLETION_BUDGET = 6
INFINITE = math.inf

# rows of X composed against X per partition
_ROW_CHUNK = 256
_FRONTIER_CHUNK = 4096


@dataclass(frozen=True)
class CoverageReport:
    order: int
    covered: int
    uncovered: tuple[GroupElement, ...]
    uncovered_count: int

    @property
    def is_diameter_2(self) -> bool:
        return self.uncovered_count == 0

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "covered": self.covered,
            "uncovered_count": self.uncovered_count,
            "uncovered_sample": [list(a.coords) for a in self.uncovered],
            "is_diameter_2": self.is_diameter_2,
        }


def _check_set(spec: GroupSpec, X: ConnectionSet) -> np.ndarray:
    spec.check_size()
    if X.spec != spec:
        raise ShapeMismatch(f"connection set lives in {X.spec.label}, not {spec.label}")
    return X.indices()


def _mark_rows(spec: GroupSpec, idx: np.ndarray, start: int, stop: int) -> np.ndarray:
    """Private bitset of x_i * x_j for rows start <= i < stop and j >= i."""
    partial = np.zeros(spec.order, dtype=bool)
    block = spec.compose_indices(idx[start:stop, None], idx[None, start:])
    keep = np.arange(start, idx.size)[None, :] >= np.arange(start, stop)[:, None]
    partial[block[keep]] = True
    return partial


def two_step_mask(spec: GroupSpec, idx: np.ndarray) -> np.ndarray:
    """Bitset of identity, X and X*X over dense indices ``idx`` of X."""
    covered = np.zeros(spec.order, dtype=bool)
    covered[spec.index(spec.identity)] = True
    if idx.size == 0:
        return covered
    covered[idx] = True
    for start in range(0, idx.size, _ROW_CHUNK):
        covered |= _mark_rows(spec, idx, start, min(start + _ROW_CHUNK, idx.size))
    return covered


def check_two_coverage(
    spec: GroupSpec,
    X: ConnectionSet,
    limit: int | None = DEFAULT_UNCOVERED_LIMIT,
) -> CoverageReport:
    covered = two_step_mask(spec, _check_set(spec, X))
    missing = np.flatnonzero(~covered)
    sample = missing if limit is None else missing[:limit]
    report = CoverageReport(
        order=spec.order,
        covered=int(covered.sum()),
        uncovered=tuple(spec.elements_at(sample)),
        uncovered_count=int(missing.size),
    )
    logger.debug(
        "2-coverage over %s, degree %d: %d/%d covered",
        spec.label, X.degree, report.covered, report.order,
    )
    return report


def eccentricity(spec: GroupSpec, X: ConnectionSet, source: GroupElement | None = None) -> int | float:
    """BFS eccentricity of ``source`` in Cay(G, X); INFINITE if X does not generate."""
    idx = _check_set(spec, X)
    start = spec.index(spec.identity if source is None else source)
    dist = np.full(spec.order, -1, dtype=np.int64)
    dist[start] = 0
    frontier = np.array([start], dtype=np.int64)
    level, reached = 0, 1
    while frontier.size and idx.size:
        found = []
        for lo in range(0, frontier.size, _FRONTIER_CHUNK):
            step = spec.compose_indices(frontier[lo:lo + _FRONTIER_CHUNK, None], idx[None, :]).ravel()
            found.append(step[dist[step] < 0])
        nxt = np.unique(np.concatenate(found))
        if nxt.size == 0:
            break
        level += 1
        dist[nxt] = level
        reached += nxt.size
        frontier = nxt
    return level if reached == spec.order else INFINITE


def diameter(spec: GroupSpec, X: ConnectionSet) -> int | float:
    # Cayley graphs are vertex-transitive: the identity's eccentricity is the diameter.
    return eccentricity(spec, X)


# ---------------------------------------------------------------------------
# Completion
# ---------------------------------------------------------------------------


class _Completion:
    """Depth-first search for extra inverse pairs that finish 2-coverage."""

    def __init__(self, spec: GroupSpec) -> None:
        every = np.arange(spec.order, dtype=np.int64)
        self.spec = spec
        self.inv = spec.inverse_indices(every)
        self.squares = spec.compose_indices(every, every)
        self.identity = spec.index(spec.identity)
        self.reps = np.flatnonzero(every <= self.inv)
        self.nodes = 0
        self.seen: set[frozenset[int]] = set()

    def candidates(self, z: int, xs: np.ndarray) -> list[int]:
        """Pair representatives e (e <= e^-1) whose addition covers z."""
        inv, compose = self.inv, self.spec.compose_indices
        via = compose(np.int64(z), inv[xs]) if xs.size else np.empty(0, dtype=np.int64)
        roots = np.flatnonzero(self.squares == z)
        cands = np.concatenate(([z, inv[z]], via, inv[via], roots, inv[roots])).astype(np.int64)
        reps = np.unique(np.minimum(cands, inv[cands]))
        reps = reps[reps != self.identity]
        return [int(e) for e in np.setdiff1d(reps, xs)]

    def gain(self, e: int, xs: np.ndarray) -> np.ndarray:
        compose, inv = self.spec.compose_indices, self.inv
        pair = np.array([e, inv[e]], dtype=np.int64)
        parts = [pair, self.squares[pair], [self.identity]]
        if xs.size:
            parts += [compose(pair[0], xs), compose(pair[1], xs)]
        return np.concatenate(parts).astype(np.int64)

    def partners(self, z: int, e: int, xs: np.ndarray) -> list[int]:
        """Representatives f with z in {e, e^-1} * {f, f^-1}, f a new pair other than e's."""
        compose, inv = self.spec.compose_indices, self.inv
        fs = np.array([compose(np.int64(z), inv[e]), compose(np.int64(z), np.int64(e))], dtype=np.int64)
        reps = np.unique(np.minimum(fs, inv[fs]))
        reps = reps[(reps != self.identity) & (reps > e)]
        return [int(f) for f in np.setdiff1d(reps, xs)]

    def add(self, covered: np.ndarray, xs: np.ndarray, e: int) -> tuple[np.ndarray, np.ndarray]:
        step = covered.copy()
        step[self.gain(e, xs)] = True
        return step, np.union1d(xs, [e, self.inv[e]])

    def solutions(self, covered: np.ndarray, xs: np.ndarray, remaining: int, chosen: frozenset[int]) -> Iterator[frozenset[int]]:
        """Every set of at most ``remaining`` further pairs finishing coverage."""
        if chosen in self.seen:
            return
        self.seen.add(chosen)
        self.nodes += 1
        missing = np.flatnonzero(~covered)
        if missing.size == 0:
            yield chosen
            return
        if remaining == 0:
            return
        # one pair covers at most its 2 elements, 2 squares, the identity and 2|X| products
        most = remaining * (5 + 2 * (xs.size + 2 * remaining))
        if missing.size > most:
            return
        z = int(missing[0])
        singles = self.candidates(z, xs)
        for e in singles:
            step, grown = self.add(covered, xs, e)
            yield from self.solutions(step, grown, remaining - 1, chosen | {e})
        if remaining < 2:
            return
        # z only reachable as a product of two new elements
        single_set = set(singles)
        for e in np.setdiff1d(self.reps, xs):
            e = int(e)
            if e == self.identity or e in single_set:
                continue
            for f in self.partners(z, e, xs):
                if f in single_set:
                    continue
                step, grown = self.add(covered, xs, e)
                step, grown = self.add(step, grown, f)
                yield from self.solutions(step, grown, remaining - 2, chosen | {e, f})

    def least(self, covered: np.ndarray, xs: np.ndarray, size: int) -> tuple[int, ...] | None:
        """Lexicographically least sorted representative tuple among completions of ``size`` pairs."""
        self.seen = set()
        found = [tuple(sorted(s)) for s in self.solutions(covered, xs, size, frozenset())]
        return min(found) if found else None


def complete(spec: GroupSpec, base: ConnectionSet, budget: int) -> frozenset[GroupElement]:
    """Extra elements (inverse-closed) that make ``base`` diameter 2.

    Iterative deepening over the number of added inverse pairs, so the
    result uses as few pairs as possible. Among completions of that size the
    one whose sorted pair representatives (dense index, e <= e^-1) come first
    lexicographically wins. Raises CompletionFailure when nothing within
    ``budget`` pairs works.
    """
    if not 0 <= budget <= MAX_COMPLETION_BUDGET:
        raise ValueError(f"completion budget must be in [0, {MAX_COMPLETION_BUDGET}], got {budget}")
    idx = _check_set(spec, base)
    covered = two_step_mask(spec, idx)
    if covered.all():
        return frozenset()
    search = _Completion(spec)
    for size in range(1, budget + 1):
        found = search.least(covered, idx, size)
        if found is not None:
            extras = {int(e) for e in found} | {int(search.inv[e]) for e in found}
            logger.info(
                "completed %s with %d pair(s) after %d node(s)", spec.label, len(found), search.nodes,
            )
            return frozenset(spec.elements_at(sorted(extras)))
        logger.debug("no completion with %d pair(s)", size)
    raise CompletionFailure(budget, int((~covered).sum()))
