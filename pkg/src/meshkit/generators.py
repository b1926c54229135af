"""Generators for the standard translation-quiver families.

All outputs are deterministic and pass :func:`meshkit.quiver.validate`
(frontier-excused warnings aside).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from meshkit.errors import PreconditionError
from meshkit.quiver import Arrow, TranslationQuiver, Vertex


@dataclass(frozen=True)
class TreeSpec:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        if not self.vertices:
            raise PreconditionError("a tree needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise PreconditionError("duplicate tree vertex")
        if len(self.edges) != len(self.vertices) - 1:
            raise PreconditionError("a tree on k vertices has k-1 edges")
        known = set(self.vertices)
        for u, v in self.edges:
            if u not in known or v not in known or u == v:
                raise PreconditionError(f"bad tree edge {u}-{v}")
        if len(self._bfs_parents()) != len(self.vertices):
            raise PreconditionError("tree is not connected")

    @classmethod
    def linear(cls, n: int) -> TreeSpec:
        """The Dynkin tree A_n with nodes 1..n."""
        nodes = tuple(str(i) for i in range(1, n + 1))
        return cls(nodes, tuple(zip(nodes, nodes[1:])))

    @classmethod
    def star(cls, legs: int) -> TreeSpec:
        """Node 1 joined to nodes 2..legs+1; ``star(3)`` is D_4."""
        nodes = tuple(str(i) for i in range(1, legs + 2))
        return cls(nodes, tuple(("1", v) for v in nodes[1:]))

    @classmethod
    def dynkin(cls, name: str) -> TreeSpec:
        """``A<n>``, ``D<n>`` (n >= 4) or ``E6``/``E7``/``E8``."""
        kind, digits = name[:1].upper(), name[1:]
        if not digits.isdigit():
            raise PreconditionError(f"unknown Dynkin type {name!r}")
        n = int(digits)
        nodes = tuple(str(i) for i in range(1, n + 1))
        if kind == "A" and n >= 1:
            return cls.linear(n)
        if kind == "D" and n >= 4:
            chain = tuple(zip(nodes[: n - 1], nodes[1 : n - 1]))
            return cls(nodes, chain + ((nodes[n - 3], nodes[n - 1]),))
        if kind == "E" and n in (6, 7, 8):
            chain = tuple(zip(nodes[: n - 1], nodes[1 : n - 1]))
            return cls(nodes, chain + (("3", nodes[n - 1]),))
        raise PreconditionError(f"unknown Dynkin type {name!r}")

    def _bfs_parents(self) -> dict[str, str | None]:
        nbrs: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        root = min(self.vertices)
        parent: dict[str, str | None] = {root: None}
        todo = deque([root])
        while todo:
            u = todo.popleft()
            for v in sorted(nbrs[u]):
                if v not in parent:
                    parent[v] = u
                    todo.append(v)
        return parent

    def oriented_edges(self) -> list[tuple[str, str]]:
        """Edges oriented away from the least node, sorted."""
        parent = self._bfs_parents()
        return sorted((p, v) for v, p in parent.items() if p is not None)


def _vid(i: int, v: object) -> str:
    return f"({i},{v})"


def gen_ztree(t: TreeSpec, window: tuple[int, int], name: str | None = None) -> TranslationQuiver:
    """Window ``i0 <= i <= i1`` of the repetition quiver Z t.

    Every oriented tree edge u -> v gives arrows (i,u) -> (i,v) and
    (i,v) -> (i+1,u); tau(i,v) = (i-1,v).  Both boundary columns are frontier.
    """
    i0, i1 = window
    if i0 > i1:
        raise PreconditionError("empty window")
    edges = t.oriented_edges()
    single = len(edges) == 1

    def names(i: int, u: str, v: str) -> tuple[str, str]:
        if single:
            return f"a{i}", f"b{i}"
        return f"a{i}_{u}_{v}", f"b{i}_{u}_{v}"

    vertices = [
        Vertex(_vid(i, v), frontier=i in (i0, i1)) for i in range(i0, i1 + 1) for v in t.vertices
    ]
    arrows: list[Arrow] = []
    sigma: dict[str, str] = {}
    for i in range(i0, i1 + 1):
        for u, v in edges:
            a, b = names(i, u, v)
            arrows.append(Arrow(a, _vid(i, u), _vid(i, v)))
            if i < i1:
                arrows.append(Arrow(b, _vid(i, v), _vid(i + 1, u)))
                sigma[b] = a
            if i > i0:
                sigma[a] = names(i - 1, u, v)[1]
    tau = {_vid(i, v): _vid(i - 1, v) for i in range(i0 + 1, i1 + 1) for v in t.vertices}
    return TranslationQuiver(name or f"Z{len(t.vertices)}[{i0},{i1}]", vertices, arrows, tau, sigma)


def gen_tube(p: int, h: int) -> TranslationQuiver:
    """Rows 1..h of the stable tube of rank p (Z A_infinity modulo tau^p).

    Row h is frontier.  Arrows ``u{c}_{j}: (c,j) -> (c,j+1)`` and
    ``d{c}_{j}: (c,j+1) -> (c+1,j)``.
    """
    if p < 1 or h < 2:
        raise PreconditionError("tube needs rank >= 1 and at least 2 rows")
    vertices = [Vertex(_vid(c, j), frontier=j == h) for c in range(p) for j in range(1, h + 1)]
    arrows: list[Arrow] = []
    sigma: dict[str, str] = {}
    for c in range(p):
        for j in range(1, h):
            arrows.append(Arrow(f"u{c}_{j}", _vid(c, j), _vid(c, j + 1)))
            arrows.append(Arrow(f"d{c}_{j}", _vid(c, j + 1), _vid((c + 1) % p, j)))
            sigma[f"u{c}_{j}"] = f"d{(c - 1) % p}_{j}"
            sigma[f"d{c}_{j}"] = f"u{c}_{j}"
    tau = {_vid(c, j): _vid((c - 1) % p, j) for c in range(p) for j in range(1, h + 1)}
    return TranslationQuiver(f"tube{p}x{h}", vertices, arrows, tau, sigma)


def gen_triangle_An(n: int) -> TranslationQuiver:
    """AR quiver of linearly oriented A_n: vertices (a,b) with 1 <= a <= b <= n."""
    if n < 1:
        raise PreconditionError("n must be at least 1")
    vertices = [
        Vertex(_vid(a, b), projective=b == n, injective=a == 1)
        for a in range(1, n + 1)
        for b in range(a, n + 1)
    ]
    arrows: list[Arrow] = []
    sigma: dict[str, str] = {}
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            if a > 1:
                arrows.append(Arrow(f"l{a}_{b}", _vid(a, b), _vid(a - 1, b)))
            if b > a:
                arrows.append(Arrow(f"d{a}_{b}", _vid(a, b), _vid(a, b - 1)))
    tau: dict[str, str] = {}
    for a in range(1, n + 1):
        for b in range(a, n):
            tau[_vid(a, b)] = _vid(a + 1, b + 1)
            # arrows into (a,b): l{a+1}_{b} from (a+1,b), d{a}_{b+1} from (a,b+1)
            if a + 1 <= b:
                sigma[f"l{a + 1}_{b}"] = f"d{a + 1}_{b + 1}"
            sigma[f"d{a}_{b + 1}"] = f"l{a + 1}_{b + 1}"
    return TranslationQuiver(f"triangleA{n}", vertices, arrows, tau, sigma)


def gen_kronecker(m: int) -> TranslationQuiver:
    """Window v0..vm of the preprojective Kronecker component.

    Two parallel arrows ``a{i}, b{i}: v{i} -> v{i+1}``; tau(v{i+2}) = v{i};
    v0 and v1 are projective; v{m-1} and v{m} are frontier.
    """
    if m < 2:
        raise PreconditionError("Kronecker window needs m >= 2")
    vertices = [
        Vertex(f"v{i}", projective=i < 2, frontier=i >= m - 1) for i in range(m + 1)
    ]
    arrows = []
    for i in range(m):
        arrows.append(Arrow(f"a{i}", f"v{i}", f"v{i + 1}"))
        arrows.append(Arrow(f"b{i}", f"v{i}", f"v{i + 1}"))
    tau = {f"v{i + 2}": f"v{i}" for i in range(m - 1)}
    sigma = {}
    for i in range(1, m):
        sigma[f"a{i}"] = f"a{i - 1}"
        sigma[f"b{i}"] = f"b{i - 1}"
    return TranslationQuiver(f"kronecker{m}", vertices, arrows, tau, sigma)
