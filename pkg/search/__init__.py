from search.family_search import FamilySearchResult, residue_coverage, search_max_n, verify_family_instance
from search.extremal import ExtremalRecord, audit_record, quadratic_fit, search_extremal
from search.pool import WorkerPool, run_tasks

__all__ = [
    "FamilySearchResult",
    "residue_coverage",
    "search_max_n",
    "verify_family_instance",
    "ExtremalRecord",
    "audit_record",
    "quadratic_fit",
    "search_extremal",
    "WorkerPool",
    "run_tasks",
]
