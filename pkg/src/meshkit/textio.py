"""Line-oriented text format for quivers and covering balls.

Quiver statements::

    quiver <name>
    vertex <id> [proj] [inj] [frontier]
    arrow <id> : <src> -> <tgt>
    tau <x> -> <y>
    sigma <arrow> -> <arrow>

A covering file is a quiver file (the covering window) followed by::

    ball <universal|generic> <basepoint> <radius> <slack> <stable|unstable>
    base <name>
    pi <delta-vertex> -> <base-vertex>
    pi-arrow <delta-arrow> -> <base-arrow>

``#`` starts a comment.  :func:`emit_quiver` is the exact inverse of
:func:`parse_quiver` up to comments, blank lines and spacing.
"""
from __future__ import annotations

from typing import TYPE_CHECKING

from meshkit.errors import ParseError
from meshkit.quiver import Arrow, TranslationQuiver, Vertex

if TYPE_CHECKING:
    from meshkit.covering import CoveringBall

_FLAGS = ("proj", "inj", "frontier")


def _statements(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def normalize_text(text: str) -> str:
    """Drop comments and blank lines and collapse runs of whitespace."""
    return "".join(" ".join(toks) + "\n" for _, toks in _statements(text))


class _QuiverBuilder:
    def __init__(self) -> None:
        self.name: str | None = None
        self.vertices: dict[str, Vertex] = {}
        self.arrows: dict[str, Arrow] = {}
        self.tau: dict[str, str] = {}
        self.sigma: dict[str, str] = {}
        self._pending: list[tuple[int, str, str]] = []  # (line, kind, id) refs to check

    def feed(self, lineno: int, toks: list[str]) -> bool:
        kw = toks[0]
        if kw == "quiver":
            if len(toks) != 2:
                raise ParseError(lineno, "expected: quiver <name>")
            if self.name is not None:
                raise ParseError(lineno, "duplicate quiver header")
            self.name = toks[1]
        elif kw == "vertex":
            if len(toks) < 2:
                raise ParseError(lineno, "expected: vertex <id> [proj] [inj] [frontier]")
            vid, flags = toks[1], toks[2:]
            bad = [f for f in flags if f not in _FLAGS]
            if bad:
                raise ParseError(lineno, f"unknown vertex flag {bad[0]}")
            if len(set(flags)) != len(flags):
                raise ParseError(lineno, "repeated vertex flag")
            if vid in self.vertices:
                raise ParseError(lineno, f"duplicate vertex {vid}")
            self.vertices[vid] = Vertex(vid, "proj" in flags, "inj" in flags, "frontier" in flags)
        elif kw == "arrow":
            if len(toks) != 6 or toks[2] != ":" or toks[4] != "->":
                raise ParseError(lineno, "expected: arrow <id> : <src> -> <tgt>")
            aid = toks[1]
            if aid in self.arrows:
                raise ParseError(lineno, f"duplicate arrow {aid}")
            self.arrows[aid] = Arrow(aid, toks[3], toks[5])
            self._pending += [(lineno, "vertex", toks[3]), (lineno, "vertex", toks[5])]
        elif kw in ("tau", "sigma"):
            if len(toks) != 4 or toks[2] != "->":
                raise ParseError(lineno, f"expected: {kw} <a> -> <b>")
            table = self.tau if kw == "tau" else self.sigma
            if toks[1] in table:
                raise ParseError(lineno, f"{kw} of {toks[1]} given twice")
            table[toks[1]] = toks[3]
            kind = "vertex" if kw == "tau" else "arrow"
            self._pending += [(lineno, kind, toks[1]), (lineno, kind, toks[3])]
        else:
            return False
        return True

    def build(self) -> TranslationQuiver:
        if self.name is None:
            raise ParseError(1, "missing 'quiver <name>' header")
        for lineno, kind, ident in self._pending:
            known = self.vertices if kind == "vertex" else self.arrows
            if ident not in known:
                raise ParseError(lineno, f"unknown {kind} {ident}")
        return TranslationQuiver(
            self.name, self.vertices.values(), self.arrows.values(), self.tau, self.sigma
        )


def parse_quiver(text: str) -> TranslationQuiver:
    b = _QuiverBuilder()
    for lineno, toks in _statements(text):
        if not b.feed(lineno, toks):
            raise ParseError(lineno, f"unknown statement {toks[0]!r}")
    return b.build()


def emit_quiver(q: TranslationQuiver) -> str:
    lines = [f"quiver {q.name}"]
    for v in q.vertices.values():
        flags = [f for f, on in zip(_FLAGS, (v.projective, v.injective, v.frontier)) if on]
        lines.append(" ".join(["vertex", v.id, *flags]))
    for a in q.arrows.values():
        lines.append(f"arrow {a.id} : {a.source} -> {a.target}")
    for x, y in q.tau.items():
        lines.append(f"tau {x} -> {y}")
    for a, b in q.sigma.items():
        lines.append(f"sigma {a} -> {b}")
    return "\n".join(lines) + "\n"


def emit_covering(ball: CoveringBall) -> str:
    lines = [emit_quiver(ball.delta).rstrip("\n")]
    stable = "stable" if ball.stable else "unstable"
    lines.append(f"ball {ball.kind} {ball.basepoint} {ball.radius} {ball.slack} {stable}")
    lines.append(f"base {ball.base_name}")
    for v, w in ball.pi_vertices.items():
        lines.append(f"pi {v} -> {w}")
    for a, b in ball.pi_arrows.items():
        lines.append(f"pi-arrow {a} -> {b}")
    return "\n".join(lines) + "\n"


def parse_covering(text: str) -> CoveringBall:
    from meshkit.covering import CoveringBall

    b = _QuiverBuilder()
    meta: tuple[int, list[str]] | None = None
    base_name = None
    pi_v: dict[str, str] = {}
    pi_a: dict[str, str] = {}
    for lineno, toks in _statements(text):
        if b.feed(lineno, toks):
            continue
        kw = toks[0]
        if kw == "ball":
            if len(toks) != 6 or toks[1] not in ("universal", "generic"):
                raise ParseError(
                    lineno, "expected: ball <universal|generic> <basepoint> <radius> <slack> <stable|unstable>"
                )
            if toks[5] not in ("stable", "unstable"):
                raise ParseError(lineno, "stability must be 'stable' or 'unstable'")
            try:
                int(toks[3]), int(toks[4])
            except ValueError:
                raise ParseError(lineno, "radius and slack must be integers") from None
            meta = (lineno, toks)
        elif kw == "base":
            if len(toks) != 2:
                raise ParseError(lineno, "expected: base <name>")
            base_name = toks[1]
        elif kw in ("pi", "pi-arrow"):
            if len(toks) != 4 or toks[2] != "->":
                raise ParseError(lineno, f"expected: {kw} <a> -> <b>")
            table = pi_v if kw == "pi" else pi_a
            if toks[1] in table:
                raise ParseError(lineno, f"{kw} of {toks[1]} given twice")
            table[toks[1]] = toks[3]
        else:
            raise ParseError(lineno, f"unknown statement {kw!r}")
    delta = b.build()
    if meta is None:
        raise ParseError(1, "missing 'ball ...' line")
    lineno, toks = meta
    if toks[2] not in delta.vertices:
        raise ParseError(lineno, f"unknown vertex {toks[2]}")
    for v in pi_v:
        if v not in delta.vertices:
            raise ParseError(lineno, f"pi given for unknown vertex {v}")
    for a in pi_a:
        if a not in delta.arrows:
            raise ParseError(lineno, f"pi-arrow given for unknown arrow {a}")
    return CoveringBall(
        delta=delta,
        basepoint=toks[2],
        radius=int(toks[3]),
        slack=int(toks[4]),
        kind=toks[1],
        stable=toks[5] == "stable",
        pi_vertices=dict(pi_v),
        pi_arrows=dict(pi_a),
        base_name=base_name or "",
    )
