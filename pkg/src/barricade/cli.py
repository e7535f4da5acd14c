"""Command-line front end: ``barricade analyze|solve <scenario> | gallery [name|--all]``."""
import argparse
import sys

from .report import (GALLERY, ScenarioError, all_match, dumps, gallery, gallery_all_match,
                     parse_scenario, run)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

ANALYSIS_KINDS = ("analyze", "separate", "ssp", "conditions")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _common(p):
    p.add_argument("--tol", type=float, help="override every numeric tolerance")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--max-iter", type=int, help="iteration budget for distance computations")
    p.add_argument("--parallel", action="store_true", help="run tasks concurrently")
    p.add_argument("--no-meta", action="store_true", help="omit timings and metadata")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser():
    parser = _Parser(prog="barricade", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (("analyze", "run support, barrier, SSP and separation tasks"),
                        ("solve", "run existence certification tasks")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("scenario")
        _common(p)
    g = sub.add_parser("gallery", help="run built-in example scenarios")
    g.add_argument("name", nargs="?", help=f"one of: {', '.join(GALLERY)}")
    g.add_argument("--all", action="store_true", help="run every gallery item")
    g.add_argument("--n", type=int, default=6, help="dimension of the slice truncations")
    g.add_argument("--list", action="store_true", help="list gallery items and exit")
    _common(g)
    return parser


def _apply_overrides(sc, args):
    if args.tol is not None:
        for key in ("support", "cone", "separation", "solve"):
            sc.tolerances[key] = args.tol
    if args.max_iter is not None:
        sc.tolerances["max_iter"] = args.max_iter
    if args.seed is not None:
        sc.seed = args.seed
    return sc


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_gallery(args):
    if args.list:
        for it in GALLERY.values():
            print(f"{it.name:20s} {it.anchor:28s} {it.expected}")
        return EXIT_OK
    if args.all == (args.name is not None):
        print("barricade gallery: give exactly one of NAME or --all", file=sys.stderr)
        return EXIT_USAGE
    if args.name is not None and args.name not in GALLERY:
        print(f"barricade gallery: unknown item {args.name!r}", file=sys.stderr)
        return EXIT_USAGE
    if args.n < 2:
        print("barricade gallery: --n must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    names = None if args.all else [args.name]
    rep = gallery(names, n=args.n, parallel=args.parallel, meta=not args.no_meta,
                  configure=lambda sc: _apply_overrides(sc, args))
    _emit(dumps(rep), args.out)
    return EXIT_OK if gallery_all_match(rep) else EXIT_MISMATCH


def _run_scenario(args):
    try:
        sc = _apply_overrides(parse_scenario(args.scenario), args)
    except OSError as exc:
        print(f"barricade: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"barricade: {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    kinds = ("solve",) if args.command == "solve" else ANALYSIS_KINDS
    rep = run(sc, kinds=kinds, parallel=args.parallel, meta=not args.no_meta)
    _emit(dumps(rep), args.out)
    return EXIT_OK if all_match(rep) else EXIT_MISMATCH


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gallery":
            return _run_gallery(args)
        return _run_scenario(args)
    except MemoryError:
        print("barricade: out of memory", file=sys.stderr)
        return EXIT_RESOURCE
    except RecursionError:
        print("barricade: recursion limit exceeded", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
