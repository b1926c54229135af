"""``meshkit`` command line: one command per invocation, text or JSON reports.

Exit status: 0 on success, 1 on domain errors (failed validation, inexact
region, broken precondition), 2 on parse and usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path as FsPath

from meshkit import covering, criteria, generators, mesh, oracle, quiver, textio
from meshkit.errors import MeshkitError, ParseError, QuiverError
from meshkit.quiver import Path, TranslationQuiver

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 already; keep the message on stderr
        raise UsageError(message)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return FsPath(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_quiver(path: str) -> TranslationQuiver:
    return textio.parse_quiver(_read(path))


def _load_cover(path: str) -> covering.CoveringBall:
    return textio.parse_covering(_read(path))


def parse_path_arg(q: TranslationQuiver, text: str) -> Path:
    """Comma-separated arrows in traversal order.

    A list that only composes when read right to left (composition
    notation, ``b0,a0`` for ``a0`` then ``b0``) is accepted as well.
    """
    arrows = tuple(a.strip() for a in text.split(",") if a.strip())
    if not arrows:
        raise UsageError("--path needs at least one arrow")
    try:
        return q.path(arrows)
    except (QuiverError, MeshkitError) as first:
        try:
            return q.path(tuple(reversed(arrows)))
        except (QuiverError, MeshkitError):
            raise first from None


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _normal_form(cls: mesh.ClassVector) -> list[list[str]]:
    return [[p.label(), str(c)] for p, c in cls.terms()]


# ---------------------------------------------------------------------------
# commands: each returns (exit code, report dict, text lines)


def cmd_validate(args):
    q = _load_quiver(args.quiver)
    rep = quiver.validate(q)
    data = {"quiver": q.name, **rep.to_dict()}
    lines = [f"{q.name}: {'valid' if rep.ok else 'INVALID'} (max degree {rep.max_degree})"]
    lines += [f"  violation {v.kind} at {v.location}: {v.message}" for v in rep.violations]
    lines += [f"  warning   {v.kind} at {v.location}: {v.message}" for v in rep.warnings]
    return (EXIT_OK if rep.ok else EXIT_DOMAIN), data, lines


def cmd_generate(args):
    fam = args.family
    if fam == "ztree":
        i0, i1 = _int_pair(args.window)
        q = generators.gen_ztree(generators.TreeSpec.dynkin(args.tree), (i0, i1))
    elif fam == "tube":
        q = generators.gen_tube(args.rank, args.height)
    elif fam == "triangle":
        q = generators.gen_triangle_An(args.n)
    else:
        q = generators.gen_kronecker(args.m)
    text = textio.emit_quiver(q)
    return EXIT_OK, {"quiver": text}, [text.rstrip("\n")]


def _int_pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"expected two comma-separated integers, got {text!r}") from None
    return a, b


def cmd_collapse(args):
    q = _load_quiver(args.quiver)
    c, mult = quiver.collapse(q)
    text = textio.emit_quiver(c)
    return EXIT_OK, {"quiver": text, "multiplicity": dict(sorted(mult.items()))}, [text.rstrip("\n")]


def cmd_cover(args):
    q = _load_quiver(args.quiver)
    ball = covering.build_covering_ball(q, args.base, args.radius, args.kind, args.slack)
    text = textio.emit_covering(ball)
    data = {
        "cover": text,
        "vertices": len(ball.delta.vertices),
        "arrows": len(ball.delta.arrows),
        "stable": ball.stable,
        "exact": ball.stable,
    }
    return EXIT_OK, data, [text.rstrip("\n")]


def cmd_check_cover(args):
    ball = _load_cover(args.cover)
    q = _load_quiver(args.base)
    rep = covering.check_covering(ball, q)
    data = {"stable": ball.stable, **rep.to_dict()}
    lines = [f"covering of {q.name}: {'ok' if rep.ok else 'BROKEN'} (stable: {ball.stable})"]
    lines += [f"  violation {v.kind} at {v.location}: {v.message}" for v in rep.violations]
    return (EXIT_OK if rep.ok else EXIT_DOMAIN), data, lines


def cmd_lift(args):
    ball = _load_cover(args.cover)
    q = _load_quiver(args.base)
    p = parse_path_arg(q, args.path)
    lifted = covering.lift_path(ball, p, args.start)
    data = {"path": p.label(), "lift": list(lifted.arrows), "vertices": list(lifted.vertices), "end": lifted.end}
    return EXIT_OK, data, [" -> ".join(lifted.vertices)]


def cmd_mesh_dim(args):
    q = _load_quiver(args.quiver)
    hs = mesh.hom_space(q, args.source, args.target, args.deg)
    data = {
        "from": args.source,
        "to": args.target,
        "deg": args.deg,
        "dim": hs.quotient_dim,
        "paths": len(hs.path_basis),
        "relations_rank": hs.relations.rank,
        "exact": hs.exact,
        "exactness": hs.exactness,
    }
    if args.oracle:
        data["oracle_dim"] = oracle.oracle_hom_dim(q, args.source, args.target, args.deg)
    lines = [
        f"dim k({q.name})_{args.deg}({args.source}, {args.target}) = {hs.quotient_dim}"
        f"  [{hs.exactness}; {len(hs.path_basis)} paths, rank {hs.relations.rank}]"
    ]
    return _oracle_status(data, "dim", "oracle_dim"), data, lines


def _oracle_status(data: dict, mine: str, theirs: str) -> int:
    if theirs in data and data[theirs] != data[mine]:
        data["oracle_mismatch"] = True
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_compose(args):
    q = _load_quiver(args.quiver)
    p = parse_path_arg(q, args.path)
    factors = [mesh.class_of_path(q, q.path((a,))) for a in p.arrows]
    if factors:
        cls = factors[0]
        for nxt in factors[1:]:
            cls = mesh.compose_classes(nxt, cls)
    else:
        cls = mesh.class_of_path(q, p)
    hs = cls.hom
    data = {
        "path": p.label(),
        "deg": p.length,
        "dim": hs.quotient_dim,
        "exact": hs.exact,
        "class": "zero" if cls.is_zero else "nonzero",
        "normal_form": _normal_form(cls),
    }
    if args.oracle:
        data["oracle_class"] = "zero" if oracle.oracle_class_is_zero(q, p.arrows, p.start) else "nonzero"
    lines = [f"{p.label()}: class {data['class']} in a space of dim {hs.quotient_dim} [{hs.exactness}]"]
    lines += [f"  {c} * {lab}" for lab, c in data["normal_form"]]
    return _oracle_status(data, "class", "oracle_class"), data, lines


def cmd_verdict(args):
    q = _load_quiver(args.quiver)
    p = parse_path_arg(q, args.path)
    v = criteria.radical_verdict(q, p)
    data = v.to_dict()
    if args.oracle:
        zero = oracle.oracle_class_is_zero(q, p.arrows, p.start)
        data["oracle_verdict"] = criteria.IN_RAD_N_PLUS_1 if zero else criteria.EXACTLY_RAD_N
    lines = [f"{p.label()}: {v.verdict} (n = {v.n}, sectional: {v.sectional})"]
    return _oracle_status(data, "verdict", "oracle_verdict"), data, lines


def cmd_depth(args):
    q = _load_quiver(args.quiver)
    p = parse_path_arg(q, args.path)
    cert = criteria.depth_certificate(q, p, args.max_extra, args.cap)
    data = {
        "path": p.label(),
        "max_extra": args.max_extra,
        "cap": args.cap,
        "certificate": None if cert is None else cert.to_dict(),
        "exact": True,
    }
    if args.oracle:
        found = oracle.oracle_depth_search(q, p.start, p.arrows, args.max_extra, args.cap)
        data["oracle_total_degree"] = None if found is None else found[0]
        data["total_degree"] = None if cert is None else cert.total_degree
    if cert is None:
        lines = [f"{p.label()}: no mesh-level certificate with total degree <= {p.length + args.max_extra}"]
    else:
        subs = ", ".join(f"{s.position}: {s.path.label()}" for s in cert.substitutions)
        lines = [f"{p.label()}: mesh-level certificate of total degree {cert.total_degree} ({subs})"]
    return _oracle_status(data, "total_degree", "oracle_total_degree"), data, lines


def cmd_fiber_sum(args):
    ball = _load_cover(args.cover)
    fs = criteria.theoremB_fiber_sum(ball, args.x, args.Y, args.deg)
    data = {"x": args.x, "Y": args.Y, **fs.to_dict()}
    lines = [f"sum over fiber of {args.Y}: {fs.total}"]
    lines += [f"  {z}: {d}" for z, d in sorted(fs.breakdown.items())]
    return EXIT_OK, data, lines


def cmd_mesh2(args):
    q = _load_quiver(args.quiver)
    res = criteria.n2_mesh_analysis(q, args.vertex, args.cap)
    data = res.to_dict()
    lines = [f"mesh at {args.vertex} (cap {args.cap}): cond3 = {res.cond3}, cond4 = {res.cond4}"]
    return EXIT_OK, data, lines


def cmd_dims_table(args):
    q = _load_quiver(args.quiver)
    targets = [args.target] if args.target else sorted(q.vertices)
    rows = []
    for y in targets:
        dims = mesh.graded_dims(q, args.source, y, args.max_deg)
        rows.append({"to": y, "dims": [d.dim for d in dims], "exact": [d.exact for d in dims]})
    data = {"from": args.source, "max_deg": args.max_deg, "rows": rows, "exact": all(all(r["exact"]) for r in rows)}
    width = max(len(r["to"]) for r in rows)
    header = " " * width + " | " + " ".join(f"{n:>3}" for n in range(args.max_deg + 1))
    lines = [f"graded dims from {args.source} (* = frontier-tainted)", header]
    for r in rows:
        cells = " ".join(f"{d:>2}{' ' if e else '*'}" for d, e in zip(r["dims"], r["exact"]))
        lines.append(f"{r['to']:>{width}} | {cells}")
    return EXIT_OK, data, lines


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="meshkit", description="Translation quivers, mesh categories and coverings.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, func, help_text, quiver_arg=True):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        if quiver_arg:
            sp.add_argument("quiver", help="quiver file ('-' for stdin)")
        sp.add_argument("--json", action="store_true", help="emit one JSON document")
        sp.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
        return sp

    command("validate", cmd_validate, "check the translation-quiver axioms")

    g = command("generate", cmd_generate, "emit a standard family", quiver_arg=False)
    g.add_argument("family", choices=["ztree", "tube", "triangle", "kronecker"])
    g.add_argument("--tree", default="A3", help="Dynkin type for ztree (A<n>, D<n>, E6-8)")
    g.add_argument("--window", default="0,4", help="column window i0,i1 for ztree")
    g.add_argument("--rank", type=int, default=1)
    g.add_argument("--height", type=int, default=4)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--m", type=int, default=4)

    command("collapse", cmd_collapse, "identify parallel arrows")

    c = command("cover", cmd_cover, "build a covering ball")
    c.add_argument("--base", required=True, help="basepoint vertex")
    c.add_argument("--radius", type=int, required=True)
    c.add_argument("--kind", choices=["universal", "generic"], default="universal")
    c.add_argument("--slack", type=int, default=None, help="closure slack (default 2*radius)")

    cc = command("check-cover", cmd_check_cover, "check covering axioms", quiver_arg=False)
    cc.add_argument("cover", help="covering file")
    cc.add_argument("--base", required=True, help="base quiver file")

    lf = command("lift", cmd_lift, "lift a path into a covering ball", quiver_arg=False)
    lf.add_argument("cover", help="covering file")
    lf.add_argument("--base", required=True, help="base quiver file")
    lf.add_argument("--path", required=True)
    lf.add_argument("--start", required=True, help="ball vertex over the path's start")

    md = command("mesh-dim", cmd_mesh_dim, "dimension of a graded hom space")
    md.add_argument("--from", dest="source", required=True)
    md.add_argument("--to", dest="target", required=True)
    md.add_argument("--deg", type=int, required=True)

    cp = command("compose", cmd_compose, "class of a composite of arrows")
    cp.add_argument("--path", required=True)

    vd = command("verdict", cmd_verdict, "radical-power verdict for a path")
    vd.add_argument("--path", required=True)

    dp = command("depth", cmd_depth, "search for a depth certificate")
    dp.add_argument("--path", required=True)
    dp.add_argument("--max-extra", type=int, required=True)
    dp.add_argument("--cap", type=int, required=True)

    fs = command("fiber-sum", cmd_fiber_sum, "sum of covering dims over a fiber", quiver_arg=False)
    fs.add_argument("--cover", required=True, help="covering file")
    fs.add_argument("--x", required=True, help="ball vertex")
    fs.add_argument("--Y", required=True, help="base vertex")
    fs.add_argument("--deg", type=int, required=True)

    m2 = command("mesh2", cmd_mesh2, "length-two mesh conditions at a vertex")
    m2.add_argument("--vertex", required=True)
    m2.add_argument("--cap", type=int, default=None, help="degree cap (default 8)")

    dt = command("dims-table", cmd_dims_table, "graded dimensions from a vertex")
    dt.add_argument("--from", dest="source", required=True)
    dt.add_argument("--to", dest="target", default=None)
    dt.add_argument("--max-deg", type=int, default=6)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "cap", 0) is None:
            args.cap = 8
        code, data, lines = args.func(args)
    except UsageError as exc:
        print(f"meshkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"meshkit: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MeshkitError as exc:
        if "--json" in (argv if argv is not None else sys.argv[1:]):
            print(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True, indent=2))
        print(f"meshkit: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.json:
        print(json.dumps(_jsonable(data), sort_keys=True, indent=2))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
