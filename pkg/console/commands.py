"""Subcommand handlers. Each takes the parsed arguments and config and returns an exit code."""

from __future__ import annotations

import argparse
import logging
from fractions import Fraction
from typing import Any, Sequence

from cayley.bounds import (
    CongruencePrimeTriple,
    bound_report,
    construction_order,
    cullinan_hajir_coefficient,
    decimal,
    generalized,
    get_construction,
    quadratic_coefficient,
    uac_coefficient,
)
from cayley.connection import UNRESTRICTED_CYCLIC, SubscriptFamily, Variant
from cayley.coverage import check_two_coverage
from cayley.algebra import cyclic_group
from cayley.errors import BadSubscript, CompletionFailure, TimeBudgetExceeded
from cayley.events import (
    BUDGET_EXHAUSTED,
    N_REFUTED,
    N_START,
    SEARCH_DONE,
    SEARCH_START,
    WITNESS,
    EventBus,
)
from console.catalog import FAMILY_COLUMNS, family_rows, read_catalog, to_csv, write_lines
from console.manifest import RunManifest, write_manifest
from console.report import key_values, render, table
from console.settings import resolve_jobs, resolve_path
from search.extremal import (
    audit_record,
    circulant_connection_set,
    fit_residual,
    quadratic_fit,
    search_extremal,
)
from search.family_search import closed_form_cap, integer_cap, search_max_n, verify_family_instance
from search.pool import deadline_after

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

RECORD_COLUMNS = ("d", "n", "generators", "self_inverse_included")
AUDIT_COLUMNS = ("d", "n", "generators", "degree", "diameter", "uncovered", "valid", "flags")
BOUND_COLUMNS = ("d", "k", "mac_upper", "lac_lower", "constructions", "quadratic_coefficient")


def int_list(text: str) -> list[int]:
    """Parse ``"1,5,8"`` (or an empty string) into integers."""
    text = text.strip()
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational like 9/25 or 0.0013, got {text!r}") from None


def fraction_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(part) for part in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _parameters(args: argparse.Namespace) -> dict[str, Any]:
    params = {}
    for k, v in sorted(vars(args).items()):
        if k in ("func", "output"):
            continue
        params[k] = str(v) if isinstance(v, Fraction) else v
    return params


def _publish(
    args: argparse.Namespace,
    result: Any,
    rows: Sequence[dict] | None = None,
    columns: Sequence[str] | None = None,
    text: str | None = None,
) -> None:
    """Print the result and, with --output, write it plus its manifest sidecar."""
    if args.format == "table" and text is not None:
        print(text)
    else:
        print(render(result, args.format, rows, columns))
    if not args.output:
        return
    manifest = RunManifest(command=args.command, parameters=_parameters(args))
    if rows is None:
        rows = [result] if isinstance(result, dict) else list(result)
    if args.format == "csv":
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(to_csv(rows, columns or (list(rows[0]) if rows else [])))
    else:
        write_lines(args.output, rows)
    path = write_manifest(args.output, manifest.finish(result))
    logger.info("wrote %s and %s", args.output, path)


def _progress_bus() -> EventBus:
    """Event bus whose listener logs search progress to standard error."""
    bus = EventBus()

    def log_event(entry: dict) -> None:
        level = logging.DEBUG if entry["type"] == WITNESS else logging.INFO
        fields = " ".join(f"{k}={v}" for k, v in entry.items() if k != "type")
        logger.log(level, "%s %s", entry["type"], fields)

    bus.on_all(log_event, (SEARCH_START, N_START, N_REFUTED, WITNESS, SEARCH_DONE, BUDGET_EXHAUSTED))
    return bus


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace, config: dict[str, Any]) -> int:
    if args.target == "circulant":
        return _verify_circulant(args, config)
    if args.target == "family":
        return _verify_family(args, config)
    return _verify_catalog(args, config)


def _verify_circulant(args: argparse.Namespace, config: dict[str, Any]) -> int:
    n = args.n
    if n < 2:
        raise BadSubscript(f"n must be >= 2, got {n}")
    for g in args.gens:
        if g % n == 0:
            raise BadSubscript(f"generator {g} is 0 mod {n}")
    residues = {g % n for g in args.gens} | {-g % n for g in args.gens}
    if args.half:
        if n % 2:
            raise BadSubscript(f"n={n} is odd; there is no n/2")
        residues.add(n // 2)
    spec = cyclic_group(n)
    X = circulant_connection_set(n, residues)
    report = check_two_coverage(spec, X, limit=config["uncovered_limit"])
    result = {"n": n, "generators": args.gens, "degree": X.degree, **report.to_dict()}
    sample = [a.coords[0] for a in report.uncovered]
    text = key_values([
        ("circulant", f"Z_{n} generators {args.gens}"),
        ("degree", X.degree),
        ("diameter 2", report.is_diameter_2),
        ("uncovered", report.uncovered_count),
        ("uncovered sample", sample),
    ])
    _publish(args, result, text=text)
    return EXIT_OK if report.is_diameter_2 else EXIT_REFUTED


def _verify_family(args: argparse.Namespace, config: dict[str, Any]) -> int:
    family = SubscriptFamily.from_table(args.variant, args.n, args.U, args.V, args.W)
    if family.variant.kind == UNRESTRICTED_CYCLIC:
        if args.s is None or args.t is None:
            raise BadSubscript("the unrestricted variant needs --s and --t")
        p: int | tuple[int, int] = (args.s, args.t)
    else:
        if args.p is None:
            raise BadSubscript(f"the {family.variant.kind} variant needs --p")
        p = args.p
    budget = config["completion_budget"] if args.budget is None else args.budget
    try:
        res = verify_family_instance(family, p, budget)
    except CompletionFailure as e:
        result = {**family.table_row(), "n": family.n, "p": list(p) if isinstance(p, tuple) else p, "verified": False,
                  "uncovered_count": e.uncovered, "budget": e.budget}
        text = key_values([
            ("family", f"{family.variant.label} n={family.n} {family.table_row()}"),
            ("verified", False),
            ("reason", str(e)),
        ])
        _publish(args, result, text=text)
        return EXIT_REFUTED
    result = res.to_dict()
    text = key_values([
        ("family", f"{family.variant.label} n={family.n} {family.table_row()}"),
        ("group order", res.order),
        ("degree", res.degree),
        ("base degree", res.base_degree),
        ("delta", res.delta),
        ("completion", [str(e) for e in res.completion]),
        ("verified", res.verified),
        ("uncovered sample", [str(e) for e in res.coverage.uncovered]),
    ])
    _publish(args, result, text=text)
    return EXIT_OK if res.verified else EXIT_REFUTED


def _verify_catalog(args: argparse.Namespace, config: dict[str, Any]) -> int:
    path = resolve_path(args.path or config["catalog"])
    audits = [audit_record(rec) for rec in read_catalog(path)]
    rows = [
        {
            **a.record.to_dict(),
            "degree": a.degree,
            "diameter": a.diameter if a.diameter != float("inf") else "inf",
            "uncovered": a.uncovered_count,
            "valid": a.is_valid,
            "flags": "; ".join(a.flags),
        }
        for a in audits
    ]
    _publish(args, rows, rows, AUDIT_COLUMNS)
    bad = [a for a in audits if not a.is_valid]
    if bad:
        logger.warning("%d of %d record(s) failed verification", len(bad), len(audits))
        return EXIT_REFUTED
    return EXIT_OK


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


def cmd_search(args: argparse.Namespace, config: dict[str, Any]) -> int:
    jobs = resolve_jobs(args.jobs, config)
    deadline = deadline_after(args.time_budget)
    bus = _progress_bus()
    try:
        if args.target == "family":
            return _search_family(args, jobs, deadline, bus)
        return _search_extremal(args, jobs, deadline, bus)
    except TimeBudgetExceeded as e:
        refuted = [entry["n"] for entry in bus.get_log() if entry["type"] == N_REFUTED]
        bus.emit(BUDGET_EXHAUSTED, {"frontier": e.frontier})
        result = {"status": "budget_exhausted", "frontier": e.frontier, "refuted": refuted}
        text = key_values([
            ("status", "time budget exhausted"),
            ("frontier", e.frontier),
            ("refuted", refuted),
        ])
        _publish(args, result, text=text)
        return EXIT_BUDGET


def _search_family(args: argparse.Namespace, jobs: int, deadline: float | None, bus: EventBus) -> int:
    res = search_max_n(
        args.l,
        args.variant,
        n_start=args.n_start,
        require_degree_exact=args.degree_exact,
        jobs=jobs,
        deadline=deadline,
        events=bus,
    )
    if res.n is None:
        print(f"no complete family for l={args.l} ({res.variant.label})")
        return EXIT_REFUTED
    rows = family_rows(res)
    summary = key_values([
        ("variant", res.variant.label),
        ("l", res.l),
        ("m", res.m),
        ("n", res.n),
        ("coefficient", f"{res.coefficient} = {decimal(res.coefficient)}"),
        ("refuted", list(res.refuted)),
        ("witnesses", len(res.witnesses)),
    ])
    text = summary + "\n\n" + table(rows, ("U", "V", "W"))
    _publish(args, rows, rows, FAMILY_COLUMNS, text=text)
    return EXIT_OK


def _search_extremal(args: argparse.Namespace, jobs: int, deadline: float | None, bus: EventBus) -> int:
    rec = search_extremal(args.d, n_max=args.n_max, jobs=jobs, deadline=deadline, events=bus)
    rows = [rec.to_dict()]
    _publish(args, rows, rows, RECORD_COLUMNS)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def _delta_table(pairs: list[int] | None) -> dict[int, int] | None:
    """--delta a,b,c,d gives delta for d = 0, 1, 2, 3 (mod 4)."""
    if pairs is None:
        return None
    if len(pairs) != 4:
        raise BadSubscript(f"--delta takes four values (d mod 4 = 0..3), got {len(pairs)}")
    return dict(enumerate(pairs))


def cmd_bounds(args: argparse.Namespace, config: dict[str, Any]) -> int:
    topic = args.topic or "report"
    handler = _BOUND_TOPICS[topic]
    return handler(args)


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise BadSubscript(f"bounds {args.topic or 'report'} needs {', '.join(missing)}")


def _bounds_report(args: argparse.Namespace) -> int:
    _require(args, "d")
    rep = bound_report(args.d, args.k, _delta_table(args.delta))
    result = rep.to_dict()
    row = {**result, "constructions": [f"{k}={v}" for k, v in rep.construction_orders.items()]}
    _publish(args, result, [row], BOUND_COLUMNS, text=key_values((c, row[c]) for c in BOUND_COLUMNS))
    return EXIT_OK


def _bounds_cap(args: argparse.Namespace) -> int:
    _require(args, "m", "variant")
    variant = Variant.parse(args.variant)
    cap = closed_form_cap(args.m, variant)
    result = {
        "m": args.m,
        "variant": variant.label,
        "l": variant.l_for(args.m),
        "cap": str(cap.value),
        "cap_decimal": float(cap.value),
        "integer_cap": integer_cap(args.m, variant),
        "split": [str(cap.g_a), str(cap.g_b), str(cap.g_c)],
    }
    text = key_values([
        ("variant", variant.label),
        ("m", args.m),
        ("l", result["l"]),
        ("cap", f"{cap.value} = {decimal(cap.value, 3)}"),
        ("integer cap", result["integer_cap"]),
        ("optimal split", result["split"]),
    ])
    _publish(args, result, text=text)
    return EXIT_OK


def _bounds_cullinan_hajir(args: argparse.Namespace) -> int:
    if args.name:
        c = get_construction(args.name)
        base, triple, l = c.coefficient, c.triple, c.l
    else:
        _require(args, "base", "epsilon")
        base, triple, l = args.base, CongruencePrimeTriple(args.modulus, 1, 100, args.epsilon), args.l
    adj = cullinan_hajir_coefficient(base, triple, l)
    result = {
        "base": str(Fraction(base)),
        "epsilon": str(triple.epsilon),
        "delta": float(adj.delta),
        "adjusted": float(adj.adjusted),
        "threshold": None if adj.threshold is None else f"{adj.threshold[0]}e{adj.threshold[1]}",
    }
    text = key_values([
        ("base", f"{Fraction(base)} = {decimal(base)}"),
        ("epsilon", str(triple.epsilon)),
        ("delta", decimal(adj.delta, 7)),
        ("adjusted", decimal(adj.adjusted)),
        ("threshold", result["threshold"]),
    ])
    _publish(args, result, text=text)
    return EXIT_OK


def _bounds_construction(args: argparse.Namespace) -> int:
    if args.name:
        c = get_construction(args.name)
    else:
        _require(args, "l", "n", "offset")
        kind = Variant.parse(args.variant).kind if args.variant else "cyclic"
        c = generalized(args.l, args.n, args.offset, kind)
    if (args.p is None) == (args.d is None):
        raise BadSubscript("bounds construction needs exactly one of --p or --d")
    degree, order = construction_order(c, d=args.d, p=args.p)
    result = {"construction": c.key, "degree": degree, "order": order, "coefficient": str(c.coefficient)}
    text = key_values([
        ("construction", c.key),
        ("description", c.description or "-"),
        ("degree", degree),
        ("order", order),
        ("coefficient", f"{c.coefficient} = {decimal(c.coefficient)}"),
    ])
    _publish(args, result, text=text)
    return EXIT_OK


def _bounds_uac(args: argparse.Namespace) -> int:
    _require(args, "s", "t")
    coeff = uac_coefficient(args.s, args.t)
    result = {"s": args.s, "t": args.t, "coefficient": str(coeff), "decimal": float(coeff)}
    _publish(args, result, text=key_values([("s", args.s), ("t", args.t), ("coefficient", f"{coeff} = {decimal(coeff)}")]))
    return EXIT_OK


def _bounds_coefficient(args: argparse.Namespace) -> int:
    _require(args, "n", "l")
    coeff = quadratic_coefficient(args.n, args.l)
    result = {"n": args.n, "l": args.l, "coefficient": str(coeff), "decimal": float(coeff)}
    _publish(args, result, text=key_values([("n", args.n), ("l", args.l), ("coefficient", f"{coeff} = {decimal(coeff)}")]))
    return EXIT_OK


_BOUND_TOPICS = {
    "report": _bounds_report,
    "cap": _bounds_cap,
    "cullinan-hajir": _bounds_cullinan_hajir,
    "construction": _bounds_construction,
    "uac": _bounds_uac,
    "coefficient": _bounds_coefficient,
}
BOUND_TOPICS = tuple(_BOUND_TOPICS)


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


def cmd_fit(args: argparse.Namespace, config: dict[str, Any]) -> int:
    path = resolve_path(args.catalog or config["catalog"])
    records = read_catalog(path)
    fit = quadratic_fit(records)
    result = {"records": len(records), **fit.to_dict()}
    pairs = [
        ("records", len(records)),
        ("a", f"{float(fit.a):.6f}"),
        ("b", f"{float(fit.b):.6f}"),
        ("c", f"{float(fit.c):.6f}"),
        ("residual", f"{float(fit.residual):.6f}"),
    ]
    if args.compare:
        if len(args.compare) != 3:
            raise BadSubscript(f"--compare takes a,b,c, got {len(args.compare)} value(s)")
        residual = fit_residual(records, *args.compare)
        result["compare"] = {"coefficients": [str(x) for x in args.compare], "residual": float(residual)}
        pairs.append((f"residual of {', '.join(str(float(x)) for x in args.compare)}", f"{float(residual):.6f}"))
    _publish(args, result, text=key_values(pairs))
    return EXIT_OK

