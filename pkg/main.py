"""Entry point for the ddx2 command line."""

from __future__ import annotations

import argparse
import logging
import sys

from dotenv import load_dotenv

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    from cayley.connection import VARIANT_KINDS
    from console.commands import (
        BOUND_TOPICS,
        cmd_bounds,
        cmd_fit,
        cmd_search,
        cmd_verify,
        fraction,
        fraction_list,
        int_list,
    )
    from console.report import FORMATS

    parser = argparse.ArgumentParser(
        prog="ddx2",
        description="Diameter-2 circulant and Abelian Cayley graphs: verify, search, bound, fit",
    )
    parser.add_argument("--config", default=None, help="Config YAML path (default: config/ddx2.yaml)")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None, help="Output format")
    common.add_argument("--output", default=None, help="Write the result here (plus a .manifest.json sidecar)")
    common.add_argument("--jobs", type=int, default=None, help="Worker processes (default: DDX2_JOBS or CPU count)")
    common.add_argument("--time-budget", type=float, default=None, help="Wall-clock budget in seconds")
    common.add_argument("--seed", type=int, default=None, help="Recorded in the manifest; nothing samples yet")

    sub = parser.add_subparsers(dest="command", required=True)

    # verify
    verify = sub.add_parser("verify", help="Check diameter 2 of a circulant, a family instance or a catalog")
    vsub = verify.add_subparsers(dest="target", required=True)
    circ = vsub.add_parser("circulant", parents=[common], help="Circulant graph on Z_n")
    circ.add_argument("--n", type=int, required=True)
    circ.add_argument("--gens", type=int_list, required=True, help="Generators, e.g. 1,5")
    circ.add_argument("--half", action="store_true", help="Also include the involution n/2")
    fam = vsub.add_parser("family", parents=[common], help="Subscript family over a product group")
    fam.add_argument("--variant", choices=VARIANT_KINDS, required=True)
    fam.add_argument("--n", type=int, required=True)
    fam.add_argument("--U", type=int_list, default=[])
    fam.add_argument("--V", type=int_list, default=[])
    fam.add_argument("--W", type=int_list, default=[])
    fam.add_argument("--p", type=int, default=None, help="Prime for the Galois variants")
    fam.add_argument("--s", type=int, default=None, help="Z_s for the unrestricted variant")
    fam.add_argument("--t", type=int, default=None, help="Z_t for the unrestricted variant")
    fam.add_argument("--budget", type=int, default=None, help="Completion budget in inverse pairs")
    cat = vsub.add_parser("catalog", parents=[common], help="Every record of a catalog file")
    cat.add_argument("path", nargs="?", default=None, help="Catalog (default: the bundled one)")
    verify.set_defaults(func=cmd_verify)

    # search
    search = sub.add_parser("search", help="Exhaustive searches")
    ssub = search.add_subparsers(dest="target", required=True)
    sfam = ssub.add_parser("family", parents=[common], help="Largest n with a complete subscript family")
    sfam.add_argument("--l", type=int, required=True, help="Number of block sets")
    sfam.add_argument("--variant", choices=VARIANT_KINDS, required=True)
    sfam.add_argument("--n-start", type=int, default=None, help="Start below the integer cap")
    sfam.add_argument("--degree-exact", action="store_true", help="Only accept degree-exact families")
    sext = ssub.add_parser("extremal", parents=[common], help="Largest diameter-2 circulant of degree d")
    sext.add_argument("--d", type=int, required=True)
    sext.add_argument("--n-max", type=int, default=None, help="Start below the Abelian Moore bound")
    search.set_defaults(func=cmd_search)

    # bounds
    bounds = sub.add_parser("bounds", parents=[common], help="Closed-form bounds and constructions")
    bounds.add_argument("topic", nargs="?", choices=BOUND_TOPICS, default=None)
    bounds.add_argument("--d", type=int, default=None, help="Degree")
    bounds.add_argument("--k", type=int, default=2, help="Diameter")
    bounds.add_argument("--delta", type=int_list, default=None, help="Lower-bound offsets for d = 0..3 mod 4")
    bounds.add_argument("--m", type=int, default=None, help="Number of subscripts")
    bounds.add_argument("--variant", default=None, help="cyclic, cyclic-c0, abelian, abelian-c0, ...")
    bounds.add_argument("--base", type=fraction, default=None, help="Base coefficient, e.g. 9/25")
    bounds.add_argument("--epsilon", type=fraction, default=None, help="Prime-interval epsilon")
    bounds.add_argument("--modulus", type=int, default=1, help="Congruence modulus of the prime triple")
    bounds.add_argument("--name", default=None, help="Construction: MSS-circulant, Vetrik, MSS-abelian")
    bounds.add_argument("--l", type=int, default=None)
    bounds.add_argument("--n", type=int, default=None)
    bounds.add_argument("--offset", type=int, default=None, help="Degree offset of a generalized construction")
    bounds.add_argument("--p", type=int, default=None, help="Prime")
    bounds.add_argument("--s", type=int, default=None)
    bounds.add_argument("--t", type=int, default=None)
    bounds.set_defaults(func=cmd_bounds)

    # fit
    fit = sub.add_parser("fit", parents=[common], help="Least-squares quadratic over a record catalog")
    fit.add_argument("catalog", nargs="?", default=None, help="Catalog (default: the bundled one)")
    fit.add_argument("--compare", type=fraction_list, default=None, help="Residual of given a,b,c as well")
    fit.set_defaults(func=cmd_fit)

    return parser


def main(argv: list[str] | None = None) -> int:
    load_dotenv()

    from cayley.errors import Ddx2Error
    from console.commands import EXIT_USAGE
    from console.settings import load_config

    parser = build_parser()
    args = parser.parse_args(argv)

    root = logging.getLogger()
    if args.verbose:
        root.setLevel(logging.DEBUG)
    elif args.quiet:
        root.setLevel(logging.WARNING)

    try:
        config = load_config(args.config)
        if args.format is None:
            args.format = config["format"]
        return args.func(args, config)
    except (Ddx2Error, ValueError, OSError) as e:
        print(f"ddx2: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
