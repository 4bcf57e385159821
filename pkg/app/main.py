import argparse
import json
import logging
import sys
from typing import Any, List, Optional, Sequence, Tuple

from app import __version__
from app.config import get_settings, setup_logging
from app.docx_writer import create_report_docx
from app.errors import CanonConvError, DefectError, InputError, PackingError
from app.gadgets import (
    SHAPES,
    build_gadget_base,
    check_grid_representation,
    find_gadget_for_type,
    grid_string_search,
    gadget_vertex,
    save_golden,
    verify_hub_pattern,
)
from app.graph import Graph, from_graph6, read_graph6_lines, to_graph6
from app.lab import (
    count_canonical_exact,
    great_partition_ratio_experiment,
    partition_count_check,
    pstar_statistics,
    render_text,
    speed_lower_bound_check,
)
from app.models import (
    Invocation,
    PartitionModel,
    RepresentationModel,
    certificate_to_model,
    dump,
    load,
    packing_to_model,
    partition_from_model,
    partition_to_model,
    representation_from_model,
    representation_to_model,
)
from app.packing import PlanarEmbedding, pack
from app.partition import (
    count_great_partitions,
    find_great_partition,
    pstar_check,
    reconstruct_by_common_neighbors,
)
from app.representation import represent_canonical, strings_from_convex, verify_representation
from app.svg_writer import packing_svg, representation_svg, strings_svg

logger = logging.getLogger("canonconv.main")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_DEFECT = 3


# --------------------------
# Helper: input and output
# --------------------------
def _read_text(path: Optional[str]) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="ascii") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"Cannot read {path}: {exc}") from exc


def _read_graph(path: Optional[str]) -> Graph:
    graphs = read_graph6_lines(_read_text(path))
    if len(graphs) != 1:
        raise InputError(f"Expected exactly one graph6 line, found {len(graphs)}")
    return graphs[0]


def _emit(payload: Any) -> None:
    if hasattr(payload, "model_dump"):
        text = dump(payload)
    else:
        text = json.dumps(payload, sort_keys=True, indent=2)
    sys.stdout.write(text + "\n")


def _parse_optional(text: str) -> List[Tuple[int, int]]:
    """'1,2-1,3;2,4-4,5' -> connector vertex pairs."""
    edges = []
    for item in filter(None, (s.strip() for s in text.split(";"))):
        try:
            left, right = item.split("-")
            a = gadget_vertex(*(int(x) for x in left.split(",")))
            b = gadget_vertex(*(int(x) for x in right.split(",")))
        except (TypeError, ValueError) as exc:
            raise InputError(f"Bad optional edge {item!r}; expected 'i,j-i,k'") from exc
        edges.append((a, b))
    return edges


# --------------------------
# Verb handlers
# --------------------------
def _partition_find(args) -> int:
    g = _read_graph(args.input)
    p = find_great_partition(g)
    if p is None:
        _emit({"graph6": to_graph6(g), "great": False})
        return EXIT_NEGATIVE
    _emit(partition_to_model(g, p))
    return EXIT_OK


def _partition_count(args) -> int:
    g = _read_graph(args.input)
    count = count_great_partitions(g, mode=args.mode)
    _emit({"graph6": to_graph6(g), "mode": args.mode, "count": count})
    return EXIT_OK if count else EXIT_NEGATIVE


def _pstar_check(args) -> int:
    g = _read_graph(args.input)
    if args.partition:
        p = partition_from_model(load(PartitionModel, _read_text(args.partition)), g.n)
    else:
        p = find_great_partition(g) if g.n <= 16 else reconstruct_by_common_neighbors(g)
    if p is None:
        _emit({"graph6": to_graph6(g), "great": False})
        return EXIT_NEGATIVE
    report = pstar_check(g, p)
    _emit(report.as_dict())
    return EXIT_OK if report.holds else EXIT_NEGATIVE


def _pack(args) -> int:
    g = _read_graph(args.input)
    try:
        embedding = PlanarEmbedding.from_graph(g)
    except PackingError as exc:
        logger.warning(f"⚠️ {exc}")
        return EXIT_NEGATIVE
    p = pack(embedding, tol=args.tol)
    if args.svg:
        packing_svg(p, args.svg)
    _emit(packing_to_model(p))
    return EXIT_OK


def _represent(args) -> int:
    g = _read_graph(args.input)
    rep = represent_canonical(g)
    if rep is None:
        _emit({"graph6": to_graph6(g), "great": False})
        return EXIT_NEGATIVE
    if args.svg:
        representation_svg(rep, args.svg)
    _emit(representation_to_model(g, rep))
    return EXIT_OK


def _verify(args) -> int:
    model = load(RepresentationModel, _read_text(args.input))
    g = _read_graph(args.graph) if args.graph else from_graph6(model.graph6)
    report = verify_representation(representation_from_model(model), g)
    _emit(report.as_dict())
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def _strings(args) -> int:
    g = _read_graph(args.input)
    rep = represent_canonical(g)
    if rep is None:
        _emit({"graph6": to_graph6(g), "great": False})
        return EXIT_NEGATIVE
    strings = strings_from_convex(rep)
    if args.svg:
        strings_svg(strings, args.svg)
    _emit(
        {
            "graph6": to_graph6(g),
            "curves": [[[str(x), str(y)] for x, y in curve] for curve in strings.curves],
            "crossings": [[i, j, c] for (i, j), c in sorted(strings.crossings.items())],
            "max_crossings": strings.max_crossings(),
        }
    )
    return EXIT_OK


def _gadget_build(args) -> int:
    g = build_gadget_base(_parse_optional(args.optional or ""))
    witness = verify_hub_pattern(g)
    if witness is None:
        raise DefectError("A freshly built base graph has no pattern witness")
    _emit({"graph6": to_graph6(g), "edges": g.edge_count(), "witness": witness.as_dict()})
    return EXIT_OK


def _gadget_find(args) -> int:
    g, cert = find_gadget_for_type(args.type, use_cache=not args.no_cache, jobs=args.jobs)
    if args.save:
        save_golden(args.type, g, cert)
    _emit(certificate_to_model(g, cert, verify_hub_pattern(g)))
    return EXIT_OK


def _certify_string(args) -> int:
    g = _read_graph(args.input)
    rep = grid_string_search(g, args.k)
    if rep is None:
        _emit({"graph6": to_graph6(g), "string": None, "k": args.k})
        return EXIT_NEGATIVE
    problems = check_grid_representation(g, rep)
    if problems:
        raise DefectError(f"Grid search returned an invalid representation: {problems[0]}")
    _emit({"graph6": to_graph6(g), "string": True, "grid": rep.as_dict()})
    return EXIT_OK


def _certify_nonstring(args) -> int:
    g = _read_graph(args.input)
    witness = verify_hub_pattern(g)
    if witness is None:
        _emit({"graph6": to_graph6(g), "string": None})
        return EXIT_NEGATIVE
    _emit({"graph6": to_graph6(g), "string": False, "witness": witness.as_dict()})
    return EXIT_OK


def _lab(args) -> int:
    timing = args.timing
    if args.experiment == "count":
        count = count_canonical_exact(args.n, args.jobs)
        _emit({"n": args.n, "canonical_graphs": count})
        return EXIT_OK
    if args.experiment == "speed":
        report = speed_lower_bound_check(args.n, args.jobs, timing)
    elif args.experiment == "ratio":
        report = great_partition_ratio_experiment(
            args.n, args.samples, args.seed, args.jobs, timing, hinted=not args.unhinted
        )
    elif args.experiment == "pstar":
        report = pstar_statistics(args.n, args.samples, args.seed, args.jobs, timing)
    else:
        sizes = [int(s) for s in args.sizes.split(",")]
        report = partition_count_check(sizes, timing)
    if args.docx:
        create_report_docx([report], args.docx)
        logger.info(f"📝 Wrote report to {args.docx}")
    if args.text:
        sys.stdout.write(render_text(report) + "\n")
    else:
        _emit(report)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


# --------------------------
# Parser
# --------------------------
def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in", dest="input", default=None, help="graph6 file (default: stdin)")


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="canonconv", description="Canonical graphs and convex-set representations")
    parser.add_argument("--seed", type=int, default=settings.seed)
    parser.add_argument("--jobs", type=int, default=settings.jobs)
    parser.add_argument("--tol", type=float, default=None, help="packing tolerance override")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=__version__)
    verbs = parser.add_subparsers(dest="verb", required=True)

    partition = verbs.add_parser("partition").add_subparsers(dest="action", required=True)
    p = partition.add_parser("find")
    _add_input(p)
    p.set_defaults(handler=_partition_find)
    p = partition.add_parser("count")
    _add_input(p)
    p.add_argument("--mode", choices=("exact", "candidates"), default="exact")
    p.set_defaults(handler=_partition_count)

    pstar = verbs.add_parser("pstar").add_subparsers(dest="action", required=True)
    p = pstar.add_parser("check")
    _add_input(p)
    p.add_argument("--partition", default=None, help="partition JSON (default: solve)")
    p.set_defaults(handler=_pstar_check)

    for name, handler in (("pack", _pack), ("represent", _represent), ("strings", _strings)):
        p = verbs.add_parser(name)
        _add_input(p)
        p.add_argument("--svg", default=None)
        p.set_defaults(handler=handler)

    p = verbs.add_parser("verify")
    p.add_argument("--in", dest="input", default=None, help="representation JSON (default: stdin)")
    p.add_argument("--graph", default=None, help="graph6 file (default: the graph stored with the representation)")
    p.set_defaults(handler=_verify)

    gadget = verbs.add_parser("gadget").add_subparsers(dest="action", required=True)
    p = gadget.add_parser("build")
    p.add_argument("--optional", default="", help="connector pairs 'i,j-i,k;...'")
    p.set_defaults(handler=_gadget_build)
    p = gadget.add_parser("find")
    p.add_argument("--type", choices=sorted(SHAPES), required=True)
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--save", action="store_true", help="write the result as golden files")
    p.set_defaults(handler=_gadget_find)

    certify = verbs.add_parser("certify").add_subparsers(dest="action", required=True)
    p = certify.add_parser("string")
    _add_input(p)
    p.add_argument("--k", type=int, default=3)
    p.set_defaults(handler=_certify_string)
    p = certify.add_parser("nonstring")
    _add_input(p)
    p.set_defaults(handler=_certify_nonstring)

    lab = verbs.add_parser("lab").add_subparsers(dest="experiment", required=True)
    for name, defaults in (
        ("count", {"n": 5}),
        ("speed", {"n": 6}),
        ("ratio", {"n": 64, "samples": 200}),
        ("pstar", {"n": 128, "samples": 100}),
        ("partitions", {"sizes": "2,2,1,1"}),
    ):
        p = lab.add_parser(name)
        if "n" in defaults:
            p.add_argument("--n", type=int, default=defaults["n"])
        if "samples" in defaults:
            p.add_argument("--samples", type=int, default=defaults["samples"])
        if "sizes" in defaults:
            p.add_argument("--sizes", default=defaults["sizes"])
        if name == "ratio":
            p.add_argument("--unhinted", action="store_true", help="seed candidates only by reconstruction")
        p.add_argument("--docx", default=None)
        p.add_argument("--text", action="store_true", help="human-readable output")
        p.add_argument("--timing", action="store_true", help="include runtime in the report")
        p.set_defaults(handler=_lab)
    return parser


# --------------------------
# Entry point
# --------------------------
def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except InputError as exc:
        logging.getLogger("canonconv").error(f"❌ {exc}")
        return EXIT_USAGE

    setup_logging("DEBUG" if args.verbose else None)
    invocation = Invocation(
        verb=" ".join(filter(None, [args.verb, getattr(args, "action", None), getattr(args, "experiment", None)])),
        arguments={k: v for k, v in sorted(vars(args).items()) if k not in ("handler", "verbose")},
        seed=args.seed,
        jobs=args.jobs,
        tol=args.tol,
    )
    logger.debug(f"Invocation: {invocation.model_dump_json()}")

    try:
        return args.handler(args)
    except InputError as exc:
        logger.error(f"❌ {exc}")
        return EXIT_USAGE
    except DefectError as exc:
        logger.error(f"💥 Defect: {exc}")
        return EXIT_DEFECT
    except CanonConvError as exc:
        logger.error(f"❌ {type(exc).__name__}: {exc}")
        return EXIT_DEFECT
    except Exception as exc:
        logger.exception(f"💥 Unexpected error: {exc}")
        return EXIT_DEFECT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
