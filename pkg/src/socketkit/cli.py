"""Command-line front end.

Exit codes: 0 success, 1 negative verdict, 2 input error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .errors import (
    DegreeOverflow,
    InvalidGraph,
    InvalidSpec,
    NotConnected,
    NotTransitive,
    NoWitness,
    ParseError,
    RelatorNotKilled,
    SocketKitError,
    TooLarge,
    UnknownGenerator,
    UnsupportedSurface,
)
from .gog import (
    INF,
    JsjGraph,
    bongpe_pipeline,
    girth,
    girth_certified_cover,
    homology_cover,
    identified_socket_graph,
    large_girth,
    socket_graph,
    step2_certificate,
    validate,
    vrai_family,
)
from .presentation import (
    DehnSolver,
    abelianization,
    coset_table_from_cyclic_hom,
    has_infinite_abelian_image,
    image_in_abelianization,
    parse_presentation,
    reidemeister_schreier,
)
from .sockets import (
    IdentifiedSocketSpec,
    SocketSpec,
    classify,
    classify_identified,
    identified_presentation,
    identified_weak_witness,
    iter_socket_specs,
    parse_orders,
    socket_presentation,
    weak_preretraction_witness,
)
from .surface import format_surface, orientable, parse_surface
from .word import Word

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3

SWEEP_LIMITS = {"g": 10, "b": 10, "n": 12}
SWEEP_ROW_CAP = 200_000


class Negative(Exception):
    """Carries a report whose verdict is negative (exit code 1)."""

    def __init__(self, report: dict):
        self.report = report


# --- helpers ---------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _surface_arg(text: str):
    return parse_surface(text)


def _socket_from(args) -> SocketSpec:
    return SocketSpec(_surface_arg(args.surface), parse_orders(args.orders))


def _identified_from(args) -> IdentifiedSocketSpec:
    return IdentifiedSocketSpec(_surface_arg(args.surface), parse_orders(args.orders))


def _graph_from(args) -> JsjGraph:
    if not args.file:
        raise ParseError("a graph file is required (--file)")
    return JsjGraph.from_json(_read(args.file))


def _presentation_from(args):
    if getattr(args, "file", None):
        return parse_presentation(_read(args.file))
    if getattr(args, "socket", None):
        if args.orders is None:
            raise ParseError("--socket needs --orders")
        return socket_presentation(SocketSpec(parse_surface(args.socket), parse_orders(args.orders)))
    if getattr(args, "identified", None):
        if args.orders is None:
            raise ParseError("--identified needs --orders")
        return identified_presentation(IdentifiedSocketSpec(parse_surface(args.identified), parse_orders(args.orders)))
    raise ParseError("give --file, --socket or --identified")


def _num(x):
    return "inf" if x == INF else int(x)


def _parse_range(text: str, what: str) -> range:
    """``a..b``, ``a-b``, a single integer, or ``..b`` (from 0)."""
    m = re.fullmatch(r"\s*(\d*)\s*(?:\.\.|-)\s*(\d+)\s*|\s*(\d+)\s*", text)
    if m is None:
        raise ParseError(f"bad {what} range {text!r}")
    if m.group(3) is not None:
        lo = hi = int(m.group(3))
    else:
        lo = int(m.group(1)) if m.group(1) else 0
        hi = int(m.group(2))
    return range(lo, hi + 1)


def _parse_order_set(text: str) -> list[int]:
    if ".." in text:
        r = _parse_range(text, "order")
        return list(r)
    return list(parse_orders(text))


# --- commands --------------------------------------------------------------


def cmd_classify_socket(args) -> dict:
    spec = _socket_from(args)
    out = {"spec": str(spec), **classify(spec)}
    if args.witness and out["weak_preretraction"]:
        out["witness"] = weak_preretraction_witness(spec).to_json()
    return out


def cmd_classify_identified(args) -> dict:
    spec = _identified_from(args)
    out = {"spec": str(spec), **classify_identified(spec)}
    if args.witness and out["weak_preretraction"]:
        out["witness"] = identified_weak_witness(spec).to_json()
    return out


def cmd_witness(args) -> dict:
    try:
        if args.identified:
            spec = _identified_from(args)
            cert = identified_weak_witness(spec)
        else:
            spec = _socket_from(args)
            cert = weak_preretraction_witness(spec)
    except NoWitness as exc:
        raise Negative({"status": "NO_WITNESS", "reason": str(exc)}) from None
    out = {"spec": str(spec), **cert.to_json()}
    if not cert.valid:
        raise Negative(out)
    return out


def cmd_abelianize(args) -> dict:
    p = _presentation_from(args)
    inv = abelianization(p)
    out = {"free_rank": inv.free_rank, "torsion": list(inv.torsion), "group": str(inv)}
    if args.word:
        w = Word.parse(args.word)
        out["word"] = str(w)
        out["image"] = list(image_in_abelianization(p, w))
        out["infinite_image"] = has_infinite_abelian_image(p, w)
    return out


def _parse_hom(text: str) -> tuple[int, dict[str, int]]:
    k = None
    values: dict[str, int] = {}
    col = 1
    for part in text.split(","):
        m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(-?\d+)\s*", part)
        if m is None:
            raise ParseError(f"bad assignment {part!r} in --cyclic-hom", column=col)
        if m.group(1) == "k":
            k = int(m.group(2))
        else:
            values[m.group(1)] = int(m.group(2))
        col += len(part) + 1
    if k is None:
        raise ParseError("--cyclic-hom needs k=<modulus>")
    return k, values


def cmd_subgroup(args) -> dict:
    p = _presentation_from(args)
    k, values = _parse_hom(args.cyclic_hom)
    table = coset_table_from_cyclic_hom(p, k, values)
    sub = reidemeister_schreier(p, table)
    out = {
        "index": k,
        "generators": len(sub.generators),
        "relators": len(sub.relators),
    }
    if args.show:
        out["presentation"] = sub.to_text()
    if args.abelianize:
        inv = abelianization(sub)
        out["abelianization"] = {"free_rank": inv.free_rank, "torsion": list(inv.torsion), "group": str(inv)}
    return out


def cmd_dehn(args) -> dict:
    s = orientable(args.genus, 0)
    w = Word.parse(args.word)
    trivial = DehnSolver(s).is_trivial(w)
    out = {"surface": format_surface(s), "word": str(w), "trivial": trivial}
    if not trivial:
        raise Negative(out)
    return out


def cmd_graph_validate(args) -> dict:
    g = _graph_from(args)
    violations = validate(g)
    out = {"valid": not violations, "violations": violations}
    if violations:
        raise Negative(out)
    return out


def cmd_graph_girth(args) -> dict:
    g = _graph_from(args)
    if not g.is_connected():
        raise NotConnected("graph is not connected")
    gv = girth(g)
    return {"girth": _num(gv), "large_girth": large_girth(g, gv), "valid": not validate(g)}


def cmd_graph_cover(args) -> dict:
    g = _graph_from(args)
    if (args.k is None) == (args.threshold is None):
        raise ParseError("give exactly one of --k and --threshold")
    if args.k is not None:
        cov = homology_cover(g, args.k, cap=args.cap)
        gv = cov.girth()
        notes = []
    else:
        cert = girth_certified_cover(g, args.threshold, cap=args.cap)
        cov, gv, notes = cert.cover, cert.girth, cert.notes
    out = {"cover": {**cov.summary(), "girth": _num(gv), "vertices": cov.vertex_count}, "notes": notes}
    if args.emit:
        out["graph"] = cov.to_graph().to_json()
    return out


def cmd_bongpe(args) -> dict:
    if args.socket or args.identified:
        surf = args.socket or args.identified
        if args.orders is None:
            raise ParseError("--socket/--identified need --orders")
        if args.socket:
            spec = SocketSpec(parse_surface(surf), parse_orders(args.orders))
            g, words = socket_graph(spec)
            p = socket_presentation(spec)
        else:
            spec = IdentifiedSocketSpec(parse_surface(surf), parse_orders(args.orders))
            g, words = identified_socket_graph(spec)
            p = identified_presentation(spec)
    else:
        if not (args.file and args.presentation):
            raise ParseError("give --socket/--identified, or --file with --presentation and --edge-word")
        g = JsjGraph.from_json(_read(args.file))
        p = parse_presentation(_read(args.presentation))
        words = {}
        for item in args.edge_word or []:
            eid, _, text = item.partition("=")
            words[_edge_key(g, eid.strip())] = Word.parse(text)
    report = bongpe_pipeline(g, p, words, cap=args.cap)
    verdict = step2_certificate(report.final_graph, report.edge_ab, args.surface_group)
    out = {**report.to_json(), "step2": verdict.to_json()}
    if not verdict.positive:
        raise Negative(out)
    return out


def _edge_key(g: JsjGraph, text: str):
    for e in g.edges:
        if str(e.id) == text:
            return e.id
    raise ParseError(f"no edge with id {text!r}")


def cmd_vrai_family(args) -> dict:
    g = _graph_from(args)
    fam = vrai_family(g, args.count, cap=args.cap)
    surfaces = sorted(format_surface(v.surface) for v in g.surface_vertices())
    return {
        "covers": [
            {
                **c.cover.summary(),
                "girth": _num(c.girth),
                "surfaces_unchanged": sorted(
                    format_surface(v.surface) for v in c.cover.root.surface_vertices()
                )
                == surfaces,
                "notes": c.notes,
            }
            for c in fam
        ]
    }


def sweep_rows(orientability: str, genera: range, boundaries: range, orders: Sequence[int], ordered: bool = True):
    if genera and genera[-1] > SWEEP_LIMITS["g"] or boundaries and boundaries[-1] > SWEEP_LIMITS["b"]:
        raise TooLarge(f"sweep ranges are capped at g <= {SWEEP_LIMITS['g']}, b <= {SWEEP_LIMITS['b']}")
    if any(n > SWEEP_LIMITS["n"] for n in orders):
        raise TooLarge(f"sweep orders are capped at n <= {SWEEP_LIMITS['n']}")
    kind = {"or": True, "nor": False, "both": None}[orientability]
    rows = []
    for spec in iter_socket_specs(kind, genera, boundaries, orders, ordered=ordered):
        if len(rows) >= SWEEP_ROW_CAP:
            raise TooLarge(f"sweep exceeds {SWEEP_ROW_CAP} rows")
        rows.append({"spec": str(spec), **classify(spec)})
    return rows


def cmd_sweep(args) -> dict:
    orders = [n for n in _parse_order_set(args.orders) if n >= 3]
    rows = sweep_rows(
        args.orientability,
        _parse_range(args.g, "genus"),
        _parse_range(args.b, "boundary"),
        orders,
        ordered=not args.unordered,
    )
    return {"rows": rows, "count": len(rows)}


# --- plumbing --------------------------------------------------------------


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("surface", help="surface, e.g. 'S(or,g=2,b=1)'")
    p.add_argument("--orders", required=True, help="comma-separated orders, e.g. 3,5")


def _add_group_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--file", help="presentation file (gens:/rel: lines)")
    p.add_argument("--socket", metavar="SURFACE", help="use a socket group")
    p.add_argument("--identified", metavar="SURFACE", help="use an identified-socket group")
    p.add_argument("--orders", help="orders for --socket/--identified")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized tooling (default 0)")

    parser = argparse.ArgumentParser(prog="socketkit", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"socketkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_, parents=[common])
        p.set_defaults(func=func)
        return p

    p = add("classify-socket", cmd_classify_socket, "limit group / elementary freeness of a socket group")
    _add_spec_args(p)
    p.add_argument("--witness", action="store_true", help="attach a weak preretraction witness when one exists")

    p = add("classify-identified", cmd_classify_identified, "classify an identified-socket group")
    _add_spec_args(p)
    p.add_argument("--witness", action="store_true")

    p = add("witness", cmd_witness, "certified weak preretraction witness")
    _add_spec_args(p)
    p.add_argument("--identified", action="store_true", help="identified-socket group")

    p = add("abelianize", cmd_abelianize, "abelian invariants of a presentation")
    _add_group_source(p)
    p.add_argument("--word", help="also report the image of this word")

    p = add("subgroup", cmd_subgroup, "Reidemeister-Schreier for the kernel of a map to Z/k")
    _add_group_source(p)
    p.add_argument("--cyclic-hom", required=True, help="k=<modulus>,<gen>=<value>,...")
    p.add_argument("--abelianize", action="store_true")
    p.add_argument("--show", action="store_true", help="include the subgroup presentation")

    p = add("dehn", cmd_dehn, "word problem in a closed orientable surface group")
    p.add_argument("word")
    p.add_argument("--genus", type=int, default=2)

    for name, func, help_ in (
        ("graph-validate", cmd_graph_validate, "check JSJ graph invariants"),
        ("graph-girth", cmd_graph_girth, "girth and the large-girth predicate"),
    ):
        p = add(name, func, help_)
        p.add_argument("file", nargs="?")
        p.add_argument("--file", dest="file_opt")

    p = add("graph-cover", cmd_graph_cover, "homology cover of a graph")
    p.add_argument("file", nargs="?")
    p.add_argument("--file", dest="file_opt")
    p.add_argument("--k", type=int)
    p.add_argument("--threshold", type=int)
    p.add_argument("--cap", type=int, default=10**6)
    p.add_argument("--emit", action="store_true", help="include the cover graph")

    p = add("bongpe", cmd_bongpe, "orientation cover, edge abelianization test, large-girth cover")
    p.add_argument("--socket", metavar="SURFACE")
    p.add_argument("--identified", metavar="SURFACE")
    p.add_argument("--orders")
    p.add_argument("--file", help="graph JSON")
    p.add_argument("--presentation", help="presentation file")
    p.add_argument("--edge-word", action="append", metavar="EDGE=WORD")
    p.add_argument("--surface-group", action="store_true", help="the group is a surface group")
    p.add_argument("--cap", type=int, default=10**6)

    p = add("vrai-family", cmd_vrai_family, "covers of strictly increasing girth")
    p.add_argument("file", nargs="?")
    p.add_argument("--file", dest="file_opt")
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--cap", type=int, default=10**6)

    p = add("sweep", cmd_sweep, "classification table over a range of socket specs")
    p.add_argument("--orientability", choices=["or", "nor", "both"], default="both")
    p.add_argument("--g", default="0..2", help="genus range, e.g. 0..2")
    p.add_argument("--b", default="1..2", help="boundary range, e.g. 1..2")
    p.add_argument("--orders", default="3..4", help="order set, e.g. 3,4 or 3..10")
    p.add_argument("--unordered", action="store_true", help="one row per multiset of orders")
    return parser


def _input_hash(args) -> str:
    payload = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "json")}
    for key in ("file", "presentation"):
        path = payload.get(key)
        if path:
            try:
                payload[f"{key}_content"] = Path(path).read_text()
            except OSError:
                pass
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)


def _format_text(report: dict, indent: int = 0) -> list[str]:
    lines = []
    keys = [k for k in report if k not in ("version", "input_hash")]
    width = max((len(str(k)) for k in keys), default=0)
    pad = " " * indent
    for k in keys:
        v = report[k]
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines += _format_text(v, indent + 2)
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}:")
            for item in v:
                lines.append(f"{pad}  -")
                lines += _format_text(item, indent + 4)
        else:
            if isinstance(v, list):
                v = ", ".join(map(str, v)) if v else "-"
            elif v == "":
                v = "1"  # the empty word
            lines.append(f"{pad}{str(k).ljust(width)}  {v}")
    return lines


def _emit(report: dict, args, stream) -> None:
    report = {**report, "version": __version__, "input_hash": _input_hash(args)}
    if args.json:
        stream.write(dumps(report) + "\n")
    else:
        stream.write("\n".join(_format_text(report)) + "\n")


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with exit 2
        return int(exc.code or 0)
    if getattr(args, "file_opt", None) and not getattr(args, "file", None):
        args.file = args.file_opt
    try:
        report = args.func(args)
    except Negative as neg:
        _emit(neg.report, args, stdout)
        return EXIT_NEGATIVE
    except (DegreeOverflow, TooLarge) as exc:
        stderr.write(f"error: resource cap: {exc}\n")
        return EXIT_CAP
    except ParseError as exc:
        if exc.line is None and exc.column is not None:
            exc = ParseError(exc.message, line=1, column=exc.column)
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (
        InvalidSpec,
        InvalidGraph,
        UnknownGenerator,
        UnsupportedSurface,
        RelatorNotKilled,
        NotTransitive,
        NotConnected,
        ValueError,
    ) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except SocketKitError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    _emit(report, args, stdout)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
