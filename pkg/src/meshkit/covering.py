"""Walk homotopy and truncated universal / generic coverings.

Homotopy classes of walks from a basepoint are computed by unfolding: a
coset-enumeration style congruence closure over a graph whose nodes stand
for walk classes and whose edges are labelled by steps ``(arrow, +-1)``.
Every mesh pair ``a (sigma a) ~ a' (sigma a')`` is a relator that must
close up at every node over the translate; the generic kind also closes
``a ~ b`` for parallel arrows.  Merging two nodes merges their
equally-labelled neighbours (folding), so a finished graph is a covering
of the base near the basepoint.

The closure is bounded: nodes deeper than ``radius + slack`` are never
expanded.  A ball is *stable* when adding two more units of slack does not
change it.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Literal

from meshkit.errors import OutOfWindowError, PreconditionError, QuiverError
from meshkit.quiver import (
    FORWARD,
    INVERSE,
    Arrow,
    Path,
    TranslationQuiver,
    ValidationReport,
    Vertex,
    Walk,
    collapse,
    is_connected,
    parallel_classes,
)

Kind = Literal["universal", "generic"]
Label = tuple[str, int]


def _kind(kind: str) -> str:
    if kind not in ("universal", "generic"):
        raise PreconditionError(f"homotopy kind must be 'universal' or 'generic', not {kind!r}")
    return kind


def _labels(q: TranslationQuiver, v: str) -> list[Label]:
    return sorted([(a, FORWARD) for a in q.out_arrows(v)] + [(a, INVERSE) for a in q.in_arrows(v)])


def _relators(q: TranslationQuiver, kind: str) -> dict[str, list[tuple[Label, ...]]]:
    """Closed walks that must lift to closed walks, keyed by their base vertex."""
    rel: dict[str, list[tuple[Label, ...]]] = {}
    for x, tx in q.tau.items():
        if q.is_projective(x):
            continue
        spokes = [a for a in q.in_arrows(x) if a in q.sigma]
        for a, b in zip(spokes, spokes[1:]):
            rel.setdefault(tx, []).append(
                ((q.sigma[a], FORWARD), (a, FORWARD), (b, INVERSE), (q.sigma[b], INVERSE))
            )
    if kind == "generic":
        bundles: dict[tuple[str, str], list[str]] = {}
        for arr in q.arrows.values():
            bundles.setdefault((arr.source, arr.target), []).append(arr.id)
        for (s, _), ids in bundles.items():
            for a, b in zip(ids, ids[1:]):
                rel.setdefault(s, []).append(((a, FORWARD), (b, INVERSE)))
    return rel


class _Unfolding:
    def __init__(self, q: TranslationQuiver, base: str, kind: str, bound: int) -> None:
        self.q = q
        self.bound = bound
        self.relators = _relators(q, kind)
        self.labels = {v: _labels(q, v) for v in q.vertices}
        self.parent: list[int] = []
        self.vertex: list[str] = []
        self.depth: list[int] = []
        self.edges: list[dict[Label, int]] = []
        self.queue: deque[int] = deque()
        self.root = self._new(base, 0)
        self._run()

    def _new(self, v: str, depth: int) -> int:
        n = len(self.parent)
        self.parent.append(n)
        self.vertex.append(v)
        self.depth.append(depth)
        self.edges.append({})
        self.queue.append(n)
        return n

    def find(self, n: int) -> int:
        root = n
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[n] != root:
            self.parent[n], n = root, self.parent[n]
        return root

    def step(self, n: int, label: Label) -> int | None:
        t = self.edges[self.find(n)].get(label)
        return None if t is None else self.find(t)

    def _target_vertex(self, n: int, label: Label) -> str:
        return self.q.step_target(self.vertex[n], *label)

    def _link(self, a: int, label: Label, b: int) -> None:
        a, b = self.find(a), self.find(b)
        inv = (label[0], -label[1])
        ea, eb = self.edges[a].get(label), self.edges[b].get(inv)
        if ea is not None:
            self._coincide(ea, b)
        if eb is not None:
            self._coincide(eb, a)
        a, b = self.find(a), self.find(b)
        self.edges[a].setdefault(label, b)
        self.edges[b].setdefault(inv, a)

    def _coincide(self, a: int, b: int) -> None:
        pending = [(a, b)]
        while pending:
            a, b = pending.pop()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            if (self.depth[b], b) < (self.depth[a], a):
                a, b = b, a
            self.parent[b] = a
            moved, self.edges[b] = self.edges[b], {}
            for label, t in moved.items():
                t = self.find(t)
                inv = (label[0], -label[1])
                have = self.edges[a].get(label)
                if have is None:
                    self.edges[a][label] = t
                    self.edges[t][inv] = a
                else:
                    pending.append((have, t))
            self.queue.append(a)

    def _scan(self, n: int, relator: tuple[Label, ...]) -> None:
        cur = n
        for label in relator[:-1]:
            nxt = self.step(cur, label)
            if nxt is None:
                nxt = self._new(self._target_vertex(cur, label), self.depth[cur] + 1)
                self._link(cur, label, nxt)
            cur = self.find(nxt)
        last = relator[-1]
        end = self.step(cur, last)
        if end is None:
            self._link(cur, last, self.find(n))
        elif end != self.find(n):
            self._coincide(end, n)

    def _run(self) -> None:
        while self.queue:
            n = self.find(self.queue.popleft())
            if self.depth[n] >= self.bound:
                continue
            for label in self.labels[self.vertex[n]]:
                if self.step(n, label) is None:
                    child = self._new(self._target_vertex(n, label), self.depth[n] + 1)
                    self._link(n, label, child)
            for relator in self.relators.get(self.vertex[n], ()):
                self._scan(self.find(n), relator)

    def canonical_ball(self, radius: int) -> dict[int, tuple[Label, ...]]:
        """Lexicographically least shortest walk for every node within ``radius``."""
        root = self.find(self.root)
        rep = {root: ()}
        layer = [root]
        for _ in range(radius):
            nxt: dict[int, tuple[Label, ...]] = {}
            for n in layer:
                for label, t in self.edges[n].items():
                    t = self.find(t)
                    if t in rep:
                        continue
                    cand = rep[n] + (label,)
                    if t not in nxt or cand < nxt[t]:
                        nxt[t] = cand
            rep.update(nxt)
            layer = list(nxt)
        return rep


def _walk_name(steps: tuple[Label, ...]) -> str:
    return "@" + ".".join(a if d == FORWARD else a + "^" for a, d in steps)


@dataclass(frozen=True, eq=False)
class CoveringBall:
    delta: TranslationQuiver
    basepoint: str
    radius: int
    slack: int
    kind: str
    stable: bool
    pi_vertices: dict[str, str]
    pi_arrows: dict[str, str]
    base_name: str = ""
    walks: dict[str, Walk] = field(default_factory=dict, repr=False)

    def fiber(self, base_vertex: str) -> list[str]:
        return [v for v, w in self.pi_vertices.items() if w == base_vertex]

    def arrow_with_label(self, v: str, base_arrow: str, direction: int) -> str | None:
        arrows = self.delta.out_arrows(v) if direction == FORWARD else self.delta.in_arrows(v)
        for a in arrows:
            if self.pi_arrows.get(a) == base_arrow:
                return a
        return None


def _assemble(q: TranslationQuiver, base: str, radius: int, kind: str, slack: int) -> CoveringBall:
    unf = _Unfolding(q, base, kind, radius + slack)
    reps = unf.canonical_ball(radius)
    name = {n: _walk_name(steps) for n, steps in reps.items()}
    nodes = sorted(reps, key=lambda n: name[n])

    arrows: list[Arrow] = []
    pi_arrows: dict[str, str] = {}
    by_label: dict[tuple[int, str], str] = {}  # (source node, base arrow) -> delta arrow
    for n in nodes:
        for a in q.out_arrows(unf.vertex[n]):
            t = unf.step(n, (a, FORWARD))
            if t is not None and t in reps:
                aid = f"{name[n]}/{a}"
                arrows.append(Arrow(aid, name[n], name[t]))
                pi_arrows[aid] = a
                by_label[(n, a)] = aid

    tau: dict[str, str] = {}
    for n in nodes:
        v = unf.vertex[n]
        if q.is_projective(v) or v not in q.tau or not q.in_arrows(v):
            continue
        a = q.in_arrows(v)[0]
        if a not in q.sigma:
            continue
        mid = unf.step(n, (a, INVERSE))
        t = None if mid is None else unf.step(mid, (q.sigma[a], INVERSE))
        if t is not None and t in reps:
            tau[name[n]] = name[t]
    sigma: dict[str, str] = {}
    node_of = {name[n]: n for n in nodes}
    for aid, a in pi_arrows.items():
        end = node_of[aid.rsplit("/", 1)[0]]
        tgt = unf.step(end, (a, FORWARD))
        if name.get(tgt) in tau and a in q.sigma:
            partner = by_label.get((node_of[tau[name[tgt]]], q.sigma[a]))
            if partner is not None:
                sigma[aid] = partner

    tau_image = set(tau.values())
    delta_out: dict[str, int] = {}
    delta_in: dict[str, int] = {}
    for arr in arrows:
        delta_out[arr.source] = delta_out.get(arr.source, 0) + 1
        delta_in[arr.target] = delta_in.get(arr.target, 0) + 1
    vertices = []
    for n in nodes:
        v, vid = unf.vertex[n], name[n]
        bv = q.vertices[v]
        complete = (
            len(reps[n]) < radius
            and not bv.frontier
            and delta_out.get(vid, 0) == len(q.out_arrows(v))
            and delta_in.get(vid, 0) == len(q.in_arrows(v))
            and (bv.projective or vid in tau)
            and (bv.injective or vid in tau_image)
            and (bv.projective or all(f"{name.get(unf.step(n, (a, INVERSE)))}/{a}" in sigma for a in q.in_arrows(v)))
        )
        vertices.append(Vertex(vid, bv.projective, bv.injective, not complete))

    delta = TranslationQuiver(f"{q.name}~{kind}", vertices, arrows, tau, sigma)
    return CoveringBall(
        delta=delta,
        basepoint=name[unf.find(unf.root)],
        radius=radius,
        slack=slack,
        kind=kind,
        stable=False,
        pi_vertices={name[n]: unf.vertex[n] for n in nodes},
        pi_arrows=pi_arrows,
        base_name=q.name,
        walks={name[n]: Walk(base, reps[n]) for n in nodes},
    )


def build_covering_ball(
    q: TranslationQuiver,
    base: str,
    radius: int,
    kind: str = "universal",
    slack: int | None = None,
) -> CoveringBall:
    """Ball of the universal (or generic) covering of ``q`` around ``base``."""
    _kind(kind)
    if base not in q.vertices:
        raise QuiverError(f"unknown vertex {base}")
    if radius < 0:
        raise PreconditionError("radius must be non-negative")
    slack = 2 * radius if slack is None else slack
    if slack < 0:
        raise PreconditionError("slack must be non-negative")
    if not is_connected(q):
        raise PreconditionError(f"{q.name} is not connected; coverings need a connected base")
    ball = _assemble(q, base, radius, kind, slack)
    wider = _assemble(q, base, radius, kind, slack + 2)
    # names are canonical walks, so equal windows mean equal identifications
    stable = ball.delta == wider.delta and ball.pi_arrows == wider.pi_arrows
    return CoveringBall(**{**ball.__dict__, "stable": stable})


# ---------------------------------------------------------------------------
# checks and comparisons


def check_covering(ball: CoveringBall, q: TranslationQuiver) -> ValidationReport:
    """Covering axioms of ``pi`` on the ball (local bijections only off the frontier)."""
    rep = ValidationReport()
    d = ball.delta
    for v, vert in d.vertices.items():
        bv = ball.pi_vertices.get(v)
        if bv is None or bv not in q.vertices:
            rep.add("pi-undefined", v, f"pi({v}) is undefined or unknown")
            continue
        if vert.projective != q.is_projective(bv) or vert.injective != q.is_injective(bv):
            rep.add("pi-flags", v, f"projective/injective flags of {v} differ from pi({v}) = {bv}")
    for a, arr in d.arrows.items():
        ba = ball.pi_arrows.get(a)
        if ba is None or ba not in q.arrows:
            rep.add("pi-arrow-undefined", a, f"pi({a}) is undefined or unknown")
            continue
        if (ball.pi_vertices.get(arr.source), ball.pi_vertices.get(arr.target)) != (q.source(ba), q.target(ba)):
            rep.add("pi-not-quiver-map", a, f"pi({a}) = {ba} does not match the images of its ends")
    if rep.violations:
        return rep
    for x, tx in d.tau.items():
        bx = ball.pi_vertices[x]
        if q.tau.get(bx) != ball.pi_vertices[tx]:
            rep.add("tau-commute", x, f"pi(tau {x}) = {ball.pi_vertices[tx]} but tau(pi {x}) = {q.tau.get(bx)}")
    for a, b in d.sigma.items():
        if q.sigma.get(ball.pi_arrows[a]) != ball.pi_arrows[b]:
            rep.add("sigma-commute", a, f"pi(sigma {a}) differs from sigma(pi {a})")
    for x, vert in d.vertices.items():
        if vert.frontier:
            continue
        bx = ball.pi_vertices[x]
        if not vert.projective and x not in d.tau and bx in q.tau:
            rep.add("tau-commute", x, f"tau({x}) is missing although tau({bx}) exists")
        for kind, mine, theirs in (
            ("out", d.out_arrows(x), q.out_arrows(bx)),
            ("in", d.in_arrows(x), q.in_arrows(bx)),
        ):
            images = sorted(ball.pi_arrows[a] for a in mine)
            if images != sorted(theirs):
                rep.add("arrow-bijection", x, f"{kind}-arrows of {x} do not map bijectively onto those of {bx}")
    dist = _undirected_distances(d, ball.basepoint)
    for v in d.vertices:
        if dist.get(v, ball.radius + 1) > ball.radius:
            rep.add("outside-radius", v, f"{v} is farther than {ball.radius} from the basepoint")
    return rep


def _undirected_distances(d: TranslationQuiver, start: str) -> dict[str, int]:
    dist = {start: 0}
    todo = deque([start])
    while todo:
        v = todo.popleft()
        for w in [d.target(a) for a in d.out_arrows(v)] + [d.source(a) for a in d.in_arrows(v)]:
            if w not in dist:
                dist[w] = dist[v] + 1
                todo.append(w)
    return dist


def ball_morphism(b1: CoveringBall, b2: CoveringBall) -> dict[str, str] | None:
    """The basepoint-preserving map ``b1 -> b2`` commuting with the projections, if any.

    Coverings are local bijections, so the map is forced by following
    equally-labelled arrows out of the basepoints.
    """
    if b1.pi_vertices.get(b1.basepoint) != b2.pi_vertices.get(b2.basepoint):
        return None
    f = {b1.basepoint: b2.basepoint}
    todo = deque([b1.basepoint])
    while todo:
        u = todo.popleft()
        d1 = b1.delta
        steps = [(a, FORWARD, d1.target(a)) for a in d1.out_arrows(u)]
        steps += [(a, INVERSE, d1.source(a)) for a in d1.in_arrows(u)]
        for a, direction, w in steps:
            image = b2.arrow_with_label(f[u], b1.pi_arrows[a], direction)
            if image is None:
                return None
            fw = b2.delta.target(image) if direction == FORWARD else b2.delta.source(image)
            if w not in f:
                f[w] = fw
                todo.append(w)
            elif f[w] != fw:
                return None
    return f


def ball_isomorphic(b1: CoveringBall, b2: CoveringBall) -> bool:
    """Is there a basepoint-preserving isomorphism commuting with the projections?"""
    f = ball_morphism(b1, b2)
    if f is None or len(set(f.values())) != len(f) or len(f) != len(b2.delta.vertices):
        return False
    if len(b1.delta.arrows) != len(b2.delta.arrows):
        return False
    d1, d2 = b1.delta, b2.delta
    for v, w in f.items():
        if d1.is_projective(v) != d2.is_projective(w) or d1.is_injective(v) != d2.is_injective(w):
            return False
        if d1.is_frontier(v) or d2.is_frontier(w):
            continue
        tv, tw = d1.tau.get(v), d2.tau.get(w)
        if (tv is None) != (tw is None) or (tv is not None and f.get(tv) != tw):
            return False
    return True


def collapse_ball(ball: CoveringBall, base: TranslationQuiver) -> CoveringBall:
    """Identify parallel arrows in the ball; the projection lands in ``collapse(base)``."""
    delta, _ = collapse(ball.delta)
    local = parallel_classes(ball.delta)
    base_cls = parallel_classes(base)
    pi_arrows = {local[a]: base_cls[b] for a, b in ball.pi_arrows.items() if local[a] == a}
    collapsed_base, _ = collapse(base)
    return CoveringBall(
        delta=delta,
        basepoint=ball.basepoint,
        radius=ball.radius,
        slack=ball.slack,
        kind=ball.kind,
        stable=ball.stable,
        pi_vertices=dict(ball.pi_vertices),
        pi_arrows=pi_arrows,
        base_name=collapsed_base.name,
        walks=dict(ball.walks),
    )


def lift_path(ball: CoveringBall, base_path: Path, start_lift: str) -> Path:
    """The unique path in the ball over ``base_path`` that starts at ``start_lift``."""
    if start_lift not in ball.delta.vertices:
        raise PreconditionError(f"{start_lift} is not a vertex of the ball")
    if ball.pi_vertices.get(start_lift) != base_path.start:
        raise PreconditionError(
            f"pi({start_lift}) = {ball.pi_vertices.get(start_lift)} is not the start {base_path.start} of the path"
        )
    verts = [start_lift]
    arrows = []
    for a in base_path.arrows:
        lifted = ball.arrow_with_label(verts[-1], a, FORWARD)
        if lifted is None:
            raise OutOfWindowError(f"lift leaves the ball at {verts[-1]} (no arrow over {a})")
        arrows.append(lifted)
        verts.append(ball.delta.target(lifted))
    return Path(tuple(verts), tuple(arrows))


# ---------------------------------------------------------------------------
# homotopy of explicit walks

Move = tuple[str, int, tuple[Label, ...], tuple[Label, ...]]  # (rule, position, removed, inserted)


@dataclass(frozen=True)
class HomotopyResult:
    verdict: str  # "yes" | "no_within_bound"
    bound: int
    witness: tuple[Move, ...] = ()
    explored: int = 0

    @property
    def homotopic(self) -> bool:
        return self.verdict == "yes"


def _rewrites(q: TranslationQuiver, kind: str) -> dict[tuple[Label, ...], list[tuple[str, tuple[Label, ...]]]]:
    """Length-preserving rewrite rules: subword -> [(rule, replacement)]."""
    rules: dict[tuple[Label, ...], list[tuple[str, tuple[Label, ...]]]] = {}
    for x in q.tau:
        if q.is_projective(x):
            continue
        spokes = [a for a in q.in_arrows(x) if a in q.sigma]
        for a in spokes:
            for b in spokes:
                if a != b:
                    fa, fb = ((q.sigma[a], FORWARD), (a, FORWARD)), ((q.sigma[b], FORWARD), (b, FORWARD))
                    rules.setdefault(fa, []).append(("mesh", fb))
                    ia, ib = ((a, INVERSE), (q.sigma[a], INVERSE)), ((b, INVERSE), (q.sigma[b], INVERSE))
                    rules.setdefault(ia, []).append(("mesh", ib))
    if kind == "generic":
        bundles: dict[tuple[str, str], list[str]] = {}
        for arr in q.arrows.values():
            bundles.setdefault((arr.source, arr.target), []).append(arr.id)
        for ids in bundles.values():
            for a in ids:
                for b in ids:
                    if a != b:
                        for d in (FORWARD, INVERSE):
                            rules.setdefault(((a, d),), []).append(("parallel", ((b, d),)))
    return rules


def _vertices_along(q: TranslationQuiver, start: str, steps: tuple[Label, ...]) -> list[str]:
    out = [start]
    for a, d in steps:
        out.append(q.step_target(out[-1], a, d))
    return out


def _neighbours(q, start, steps, bound, rules, labels):
    verts = _vertices_along(q, start, steps)
    n = len(steps)
    for i in range(n - 1):
        (a, d), (b, e) = steps[i], steps[i + 1]
        if a == b and d == -e:
            yield ("backtrack-", i, steps[i : i + 2], ()), steps[:i] + steps[i + 2 :]
    if n + 2 <= bound:
        for i, v in enumerate(verts):
            for lab in labels[v]:
                ins = (lab, (lab[0], -lab[1]))
                yield ("backtrack+", i, (), ins), steps[:i] + ins + steps[i:]
    for i in range(n):
        for width in (1, 2):
            word = steps[i : i + width]
            if len(word) == width:
                for rule, rep in rules.get(word, ()):
                    yield (rule, i, word, rep), steps[:i] + rep + steps[i + width :]


def _apply(steps: tuple[Label, ...], move: Move) -> tuple[Label, ...]:
    _, i, removed, inserted = move
    if steps[i : i + len(removed)] != removed:
        raise PreconditionError(f"move does not apply at position {i}")
    return steps[:i] + inserted + steps[i + len(removed) :]


def _invert(move: Move) -> Move:
    rule, i, removed, inserted = move
    flipped = {"backtrack-": "backtrack+", "backtrack+": "backtrack-"}.get(rule, rule)
    return (flipped, i, inserted, removed)


def walks_homotopic(
    q: TranslationQuiver, w1: Walk, w2: Walk, kind: str = "universal", bound: int | None = None
) -> HomotopyResult:
    """Search the elementary-move graph on walks of length <= ``bound``.

    A ``yes`` carries a witness chain that :func:`replay_witness` re-checks;
    ``no_within_bound`` means the bounded closure never joins the walks.
    """
    _kind(kind)
    q.walk_end(w1)
    q.walk_end(w2)
    if w1.start != w2.start or q.walk_end(w1) != q.walk_end(w2):
        raise PreconditionError("walks must share their start and end vertices")
    longest = max(len(w1.steps), len(w2.steps))
    bound = longest if bound is None else bound
    if bound < longest:
        raise PreconditionError(f"bound {bound} is shorter than a given walk ({longest})")
    rules = _rewrites(q, kind)
    labels = {v: _labels(q, v) for v in q.vertices}
    a, b = tuple(w1.steps), tuple(w2.steps)
    if a == b:
        return HomotopyResult("yes", bound, (), 1)
    # bidirectional breadth-first search; parents hold the move that reached a node
    sides = [{a: None}, {b: None}]
    frontiers = [[a], [b]]
    explored = 2
    while frontiers[0] and frontiers[1]:
        k = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        seen, other = sides[k], sides[1 - k]
        nxt = []
        for cur in frontiers[k]:
            for move, new in _neighbours(q, w1.start, cur, bound, rules, labels):
                if new in seen:
                    continue
                seen[new] = (cur, move)
                explored += 1
                if new in other:
                    return HomotopyResult("yes", bound, _join(sides, new, k), explored)
                nxt.append(new)
        frontiers[k] = nxt
    return HomotopyResult("no_within_bound", bound, (), explored)


def _trace(parents: dict, node) -> list[Move]:
    moves = []
    while parents[node] is not None:
        node, move = parents[node]
        moves.append(move)
    return moves[::-1]


def _join(sides: list[dict], meet, k: int) -> tuple[Move, ...]:
    # moves from side 0's root to meet, then reversed moves from meet back to side 1's root
    first = _trace(sides[0], meet)
    second = _trace(sides[1], meet)
    return tuple(first + [_invert(m) for m in reversed(second)])


def replay_witness(q: TranslationQuiver, w1: Walk, w2: Walk, witness, kind: str = "universal") -> bool:
    """Re-check a witness chain move by move against the rules of ``kind``."""
    rules = _rewrites(q, kind)
    steps = tuple(w1.steps)
    for move in witness:
        rule, i, removed, inserted = move
        if rule == "backtrack-":
            ok = len(removed) == 2 and removed[0][0] == removed[1][0] and removed[0][1] == -removed[1][1] and not inserted
        elif rule == "backtrack+":
            ok = len(inserted) == 2 and inserted[0][0] == inserted[1][0] and inserted[0][1] == -inserted[1][1] and not removed
        else:
            ok = (rule, inserted) in rules.get(removed, ())
        if not ok:
            return False
        try:
            steps = _apply(steps, move)
            q.walk_end(Walk(w1.start, steps))
        except (PreconditionError, QuiverError):
            return False
    return steps == tuple(w2.steps)
