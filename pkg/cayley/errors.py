"""Exception hierarchy shared by every ddx2 module."""

from __future__ import annotations

from typing import Any


class Ddx2Error(Exception):
    """Base class for all toolkit errors."""


class NotPrime(Ddx2Error, ValueError):
    def __init__(self, p: int) -> None:
        self.p = p
        super().__init__(f"{p} is not prime")


class ShapeMismatch(Ddx2Error, ValueError):
    pass


class TooLarge(Ddx2Error, ValueError):
    def __init__(self, order: int, limit: int) -> None:
        self.order = order
        self.limit = limit
        super().__init__(f"group order {order} exceeds the enumeration limit {limit}")


class BadSubscript(Ddx2Error, ValueError):
    pass


class MissingW(Ddx2Error, ValueError):
    pass


class VariantError(Ddx2Error, ValueError):
    pass


class EmptyConnectionSet(Ddx2Error, ValueError):
    pass


class CompletionFailure(Ddx2Error):
    """No completion of the base connection set exists within the budget."""

    def __init__(self, budget: int, uncovered: int) -> None:
        self.budget = budget
        self.uncovered = uncovered
        super().__init__(
            f"no diameter-2 completion within {budget} extra pair(s); "
            f"{uncovered} element(s) uncovered by the base set"
        )


class InadmissiblePrime(Ddx2Error, ValueError):
    def __init__(self, p: int, reason: str) -> None:
        self.p = p
        self.reason = reason
        super().__init__(f"prime {p} is inadmissible: {reason}")


class MissingDelta(Ddx2Error, ValueError):
    def __init__(self, residue: int) -> None:
        self.residue = residue
        super().__init__(f"no delta supplied for d mod 4 = {residue}")


class MalformedRecord(Ddx2Error, ValueError):
    pass


class DegenerateSystem(Ddx2Error, ValueError):
    pass


class TimeBudgetExceeded(Ddx2Error):
    """Raised when a search runs past its deadline.

    ``frontier`` is the value being examined when time ran out; every value
    above it (in search order) has been refuted. ``best`` holds whatever
    partial result the search had, or None.
    """

    def __init__(self, frontier: int, best: Any = None) -> None:
        self.frontier = frontier
        self.best = best
        super().__init__(f"time budget exhausted at frontier {frontier}")

    # raised inside pool workers; must survive the trip back to the parent
    def __reduce__(self):
        return (type(self), (self.frontier, self.best))
