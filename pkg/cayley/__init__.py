from cayley.algebra import GroupElement, GroupSpec, cyclic_group, galois_product, unrestricted_product
from cayley.connection import ConnectionSet, SubscriptFamily, Variant, assemble, build_block
from cayley.coverage import CoverageReport, check_two_coverage, complete, diameter, eccentricity
from cayley.bounds import CONSTRUCTIONS, bound_report, mac_upper
from cayley.events import EventBus
from cayley.errors import Ddx2Error

__all__ = [
    "GroupElement",
    "GroupSpec",
    "cyclic_group",
    "galois_product",
    "unrestricted_product",
    "ConnectionSet",
    "SubscriptFamily",
    "Variant",
    "assemble",
    "build_block",
    "CoverageReport",
    "check_two_coverage",
    "complete",
    "diameter",
    "eccentricity",
    "CONSTRUCTIONS",
    "bound_report",
    "mac_upper",
    "EventBus",
    "Ddx2Error",
]
