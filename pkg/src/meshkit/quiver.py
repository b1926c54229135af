"""Translation quivers, walks, paths, meshes and their validation.

Vertex and arrow identifiers are opaque strings; every ordering used in
this package is the plain string order on them.  Paths and walks are
stored in traversal order (first arrow first).

Finite windows of infinite quivers are supported through the ``frontier``
flag.  A window is always a *full* subquiver: any arrow, translate or mesh
that is missing at a vertex lies outside the window, and only frontier
vertices may be missing such data.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from meshkit.errors import OutOfWindowError, PreconditionError, QuiverError

FORWARD = 1
INVERSE = -1


@dataclass(frozen=True)
class Vertex:
    id: str
    projective: bool = False
    injective: bool = False
    frontier: bool = False


@dataclass(frozen=True)
class Arrow:
    id: str
    source: str
    target: str


@dataclass(frozen=True)
class Walk:
    """A sequence of steps ``(arrow, FORWARD | INVERSE)`` starting at ``start``."""

    start: str
    steps: tuple[tuple[str, int], ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def inverse(self, q: TranslationQuiver) -> Walk:
        return Walk(q.walk_end(self), tuple((a, -d) for a, d in reversed(self.steps)))

    def then(self, other: Walk) -> Walk:
        return Walk(self.start, self.steps + other.steps)


@dataclass(frozen=True)
class Path:
    """A walk made of forward steps only; ``vertices`` has one more entry than ``arrows``."""

    vertices: tuple[str, ...]
    arrows: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.vertices) != len(self.arrows) + 1:
            raise QuiverError("path needs exactly one more vertex than arrows")

    @property
    def start(self) -> str:
        return self.vertices[0]

    @property
    def end(self) -> str:
        return self.vertices[-1]

    @property
    def length(self) -> int:
        return len(self.arrows)

    def __len__(self) -> int:
        return len(self.arrows)

    def as_walk(self) -> Walk:
        return Walk(self.start, tuple((a, FORWARD) for a in self.arrows))

    def then(self, other: Path) -> Path:
        if self.end != other.start:
            raise PreconditionError(f"cannot concatenate: {self.end} != {other.start}")
        return Path(self.vertices + other.vertices[1:], self.arrows + other.arrows)

    def label(self) -> str:
        return ",".join(self.arrows) if self.arrows else f"e[{self.start}]"


@dataclass(frozen=True)
class Mesh:
    end: str
    translate: str
    spokes: tuple[tuple[str, str], ...]  # (arrow into end, its sigma partner)


@dataclass(frozen=True)
class Violation:
    kind: str
    location: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[Violation] = field(default_factory=list)
    max_degree: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, location: str, message: str, *, excused: bool = False) -> None:
        target = self.warnings if excused else self.violations
        target.append(Violation(kind, location, message))

    def to_dict(self) -> dict:
        return {
            "valid": self.ok,
            "max_degree": self.max_degree,
            "violations": [v.__dict__ for v in self.violations],
            "warnings": [v.__dict__ for v in self.warnings],
        }


class TranslationQuiver:
    """Immutable translation quiver (possibly a frontier-flagged window).

    Construction checks only referential integrity; the translation-quiver
    axioms are checked by :func:`validate`.
    """

    def __init__(
        self,
        name: str,
        vertices: Iterable[Vertex],
        arrows: Iterable[Arrow],
        tau: Mapping[str, str] | None = None,
        sigma: Mapping[str, str] | None = None,
    ) -> None:
        verts: dict[str, Vertex] = {}
        for v in vertices:
            if v.id in verts:
                raise QuiverError(f"duplicate vertex {v.id}")
            verts[v.id] = v
        arrs: dict[str, Arrow] = {}
        for a in arrows:
            if a.id in arrs:
                raise QuiverError(f"duplicate arrow {a.id}")
            for end in (a.source, a.target):
                if end not in verts:
                    raise QuiverError(f"unknown vertex {end}")
            arrs[a.id] = a
        tau = dict(tau or {})
        for x, y in tau.items():
            for v in (x, y):
                if v not in verts:
                    raise QuiverError(f"unknown vertex {v}")
        sigma = dict(sigma or {})
        for a, b in sigma.items():
            for arr in (a, b):
                if arr not in arrs:
                    raise QuiverError(f"unknown arrow {arr}")

        self.name = name
        self._vertices = {k: verts[k] for k in sorted(verts)}
        self._arrows = {k: arrs[k] for k in sorted(arrs)}
        self._tau = {k: tau[k] for k in sorted(tau)}
        self._sigma = {k: sigma[k] for k in sorted(sigma)}
        out: dict[str, list[str]] = defaultdict(list)
        inc: dict[str, list[str]] = defaultdict(list)
        for a in self._arrows.values():
            out[a.source].append(a.id)
            inc[a.target].append(a.id)
        self._out = {v: tuple(out.get(v, ())) for v in self._vertices}
        self._in = {v: tuple(inc.get(v, ())) for v in self._vertices}
        inv: dict[str, str] = {}
        for x, y in self._tau.items():
            inv.setdefault(y, x)
        self._tau_inv = inv
        self._key = (
            name,
            tuple(self._vertices.values()),
            tuple(self._arrows.values()),
            tuple(self._tau.items()),
            tuple(self._sigma.items()),
        )

    # read-only views ---------------------------------------------------
    @property
    def vertices(self) -> Mapping[str, Vertex]:
        return MappingProxyType(self._vertices)

    @property
    def arrows(self) -> Mapping[str, Arrow]:
        return MappingProxyType(self._arrows)

    @property
    def tau(self) -> Mapping[str, str]:
        return MappingProxyType(self._tau)

    @property
    def sigma(self) -> Mapping[str, str]:
        return MappingProxyType(self._sigma)

    def tau_inverse(self, y: str) -> str | None:
        return self._tau_inv.get(y)

    def out_arrows(self, v: str) -> tuple[str, ...]:
        return self._out[v]

    def in_arrows(self, v: str) -> tuple[str, ...]:
        return self._in[v]

    def source(self, a: str) -> str:
        return self._arrows[a].source

    def target(self, a: str) -> str:
        return self._arrows[a].target

    def is_projective(self, v: str) -> bool:
        return self._vertices[v].projective

    def is_injective(self, v: str) -> bool:
        return self._vertices[v].injective

    def is_frontier(self, v: str) -> bool:
        return self._vertices[v].frontier

    def degree(self, v: str) -> int:
        return len(self._out[v]) + len(self._in[v])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TranslationQuiver) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"TranslationQuiver({self.name!r}, {len(self._vertices)} vertices, {len(self._arrows)} arrows)"

    # walks and paths ---------------------------------------------------
    def step_target(self, v: str, arrow: str, direction: int) -> str:
        a = self._arrows[arrow]
        if direction == FORWARD:
            if a.source != v:
                raise QuiverError(f"arrow {arrow} does not start at {v}")
            return a.target
        if a.target != v:
            raise QuiverError(f"arrow {arrow} does not end at {v}")
        return a.source

    def walk_end(self, w: Walk) -> str:
        if w.start not in self._vertices:
            raise QuiverError(f"unknown vertex {w.start}")
        v = w.start
        for arrow, direction in w.steps:
            if arrow not in self._arrows:
                raise QuiverError(f"unknown arrow {arrow}")
            v = self.step_target(v, arrow, direction)
        return v

    def path(self, arrows: Iterable[str], start: str | None = None) -> Path:
        """Build a checked path from arrow ids in traversal order."""
        arrows = tuple(arrows)
        for a in arrows:
            if a not in self._arrows:
                raise QuiverError(f"unknown arrow {a}")
        if not arrows:
            if start is None or start not in self._vertices:
                raise QuiverError("a trivial path needs a known start vertex")
            return Path((start,))
        verts = [self.source(arrows[0])]
        if start is not None and start != verts[0]:
            raise QuiverError(f"path starts at {verts[0]}, not {start}")
        for a in arrows:
            if self.source(a) != verts[-1]:
                raise QuiverError(f"arrow {a} does not start at {verts[-1]}")
            verts.append(self.target(a))
        return Path(tuple(verts), arrows)

    def trivial_path(self, v: str) -> Path:
        return self.path((), start=v)


# ---------------------------------------------------------------------------
# validation


def validate(q: TranslationQuiver) -> ValidationReport:
    """Check the translation-quiver axioms; problems are reported, never raised."""
    rep = ValidationReport()
    rep.max_degree = max((q.degree(v) for v in q.vertices), default=0)
    for a in q.arrows.values():
        if a.source == a.target:
            rep.add("loop", a.id, f"loop at {a.source}")

    seen: dict[str, str] = {}
    for x, y in q.tau.items():
        if q.is_projective(x):
            rep.add("tau-on-projective", x, f"tau defined on projective vertex {x}")
        if q.is_injective(y):
            rep.add("tau-onto-injective", y, f"tau({x}) = {y} is injective")
        if y in seen:
            rep.add("tau-not-injective", y, f"tau({seen[y]}) = tau({x}) = {y}")
        seen.setdefault(y, x)
    for v, vert in q.vertices.items():
        if not vert.projective and v not in q.tau:
            rep.add("tau-missing", v, f"non-projective {v} has no translate", excused=vert.frontier)
        if not vert.injective and v not in seen:
            rep.add("tau-not-onto", v, f"non-injective {v} is not a translate", excused=vert.frontier)

    sigma_domain: set[str] = set()
    for x, tx in q.tau.items():
        if q.is_projective(x):
            continue
        excused = q.is_frontier(x) or q.is_frontier(tx)
        images = []
        for a in q.in_arrows(x):
            sigma_domain.add(a)
            b = q.sigma.get(a)
            if b is None:
                rep.add("sigma-missing", a, f"sigma undefined on {a} (ends at {x})", excused=excused)
                continue
            if q.source(b) != tx or q.target(b) != q.source(a):
                rep.add(
                    "sigma-endpoints",
                    a,
                    f"sigma({a}) = {b} should go {tx} -> {q.source(a)}",
                )
            images.append(b)
        if len(set(images)) != len(images):
            rep.add("sigma-not-injective", x, f"sigma is not injective on arrows into {x}")
        missing = set(q.out_arrows(tx)) - set(images)
        if missing:
            rep.add(
                "sigma-not-onto",
                x,
                f"arrows {', '.join(sorted(missing))} out of {tx} are not sigma-images",
                excused=excused,
            )
    for a in q.sigma:
        if a not in sigma_domain:
            rep.add("sigma-stray", a, f"sigma defined on {a}, which ends at no translated vertex")
    return rep


def mesh_at(q: TranslationQuiver, x: str, *, allow_frontier: bool = False) -> Mesh:
    if x not in q.vertices:
        raise QuiverError(f"unknown vertex {x}")
    if q.is_projective(x):
        raise PreconditionError(f"{x} is projective: no mesh ends there")
    if q.is_frontier(x) and not allow_frontier:
        raise OutOfWindowError(f"{x} is a frontier vertex: its mesh may be incomplete")
    if x not in q.tau:
        raise OutOfWindowError(f"translate of {x} lies outside the window")
    spokes = []
    for a in q.in_arrows(x):
        if a not in q.sigma:
            raise OutOfWindowError(f"sigma({a}) lies outside the window")
        spokes.append((a, q.sigma[a]))
    return Mesh(x, q.tau[x], tuple(spokes))


def is_sectional(q: TranslationQuiver, p: Path) -> bool:
    verts = p.vertices
    for i in range(len(verts) - 2):
        z = verts[i + 2]
        if q.is_projective(z):
            continue
        tz = q.tau.get(z)
        if tz is None:
            raise OutOfWindowError(f"translate of {z} is unknown (outside the window)")
        if verts[i] == tz:
            return False
    return True


def paths_from(q: TranslationQuiver, x: str, max_len: int) -> Iterator[Path]:
    """All paths starting at ``x`` of length at most ``max_len``, depth first."""
    stack = [Path((x,))]
    while stack:
        p = stack.pop()
        yield p
        if p.length < max_len:
            for a in reversed(q.out_arrows(p.end)):
                stack.append(Path(p.vertices + (q.target(a),), p.arrows + (a,)))


def enumerate_paths(q: TranslationQuiver, x: str, y: str, n: int) -> list[Path]:
    """All paths ``x -> y`` of length exactly ``n`` in lexicographic arrow order."""
    if n < 0:
        raise PreconditionError("path length must be non-negative")
    for v in (x, y):
        if v not in q.vertices:
            raise QuiverError(f"unknown vertex {v}")
    # reach[k]: vertices with a length-k path to y
    reach = [{y}]
    for _ in range(n):
        reach.append({q.source(a) for v in reach[-1] for a in q.in_arrows(v)})
    if x not in reach[n]:
        return []
    result: list[Path] = []

    def extend(verts: list[str], arrows: list[str]) -> None:
        remaining = n - len(arrows)
        if remaining == 0:
            result.append(Path(tuple(verts), tuple(arrows)))
            return
        for a in q.out_arrows(verts[-1]):
            t = q.target(a)
            if t in reach[remaining - 1]:
                verts.append(t)
                arrows.append(a)
                extend(verts, arrows)
                verts.pop()
                arrows.pop()

    extend([x], [])
    return result


def parallel_classes(q: TranslationQuiver) -> dict[str, str]:
    """Map every arrow to the least arrow id with the same source and target."""
    rep: dict[tuple[str, str], str] = {}
    for a in q.arrows.values():
        rep.setdefault((a.source, a.target), a.id)
    return {a.id: rep[(a.source, a.target)] for a in q.arrows.values()}


def collapse(q: TranslationQuiver) -> tuple[TranslationQuiver, dict[str, int]]:
    """Replace each bundle of parallel arrows by its least-named member.

    Returns the collapsed quiver and the bundle size of every kept arrow.
    """
    cls = parallel_classes(q)
    mult: dict[str, int] = defaultdict(int)
    for a in cls.values():
        mult[a] += 1
    sigma: dict[str, str] = {}
    for a, b in q.sigma.items():
        ca, cb = cls[a], cls[b]
        if sigma.setdefault(ca, cb) != cb:
            raise PreconditionError(f"sigma does not respect the parallel class of {ca}")
    arrows = [q.arrows[a] for a in sorted(mult)]
    collapsed = TranslationQuiver(q.name, q.vertices.values(), arrows, q.tau, sigma)
    return collapsed, dict(sorted(mult.items()))


def is_connected(q: TranslationQuiver) -> bool:
    if not q.vertices:
        return True
    start = next(iter(q.vertices))
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for a in q.out_arrows(v):
            t = q.target(a)
            if t not in seen:
                seen.add(t)
                todo.append(t)
        for a in q.in_arrows(v):
            s = q.source(a)
            if s not in seen:
                seen.add(s)
                todo.append(s)
    return len(seen) == len(q.vertices)
