"""Radical-power analysis of composites of irreducibles, read off the mesh category.

A path ``x0 -> ... -> xn`` stands for a composite of ``n`` irreducible maps.
The composite lies in the next radical power exactly when the class of the
path in ``k(Q)_n`` is zero, so everything here reduces to class computations
in :mod:`meshkit.mesh`.  Results are mesh-level; lifting them to module
maps needs a well-behaved functor, which is not constructed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from meshkit.covering import CoveringBall
from meshkit.errors import OutOfWindowError, PreconditionError
from meshkit.linalg import FieldSpec
from meshkit.mesh import ClassVector, class_of_path, hom_space
from meshkit.quiver import Path, TranslationQuiver, enumerate_paths, is_sectional, mesh_at

EXACTLY_RAD_N = "exactly_rad_n"
IN_RAD_N_PLUS_1 = "in_rad_n_plus_1"


@dataclass(frozen=True)
class RadicalVerdict:
    path: Path
    n: int
    verdict: str
    sectional: bool

    def to_dict(self) -> dict:
        return {
            "path": self.path.label(),
            "n": self.n,
            "verdict": self.verdict,
            "sectional": self.sectional,
            "exact": True,
        }


def radical_verdict(q: TranslationQuiver, p: Path, field: FieldSpec | None = None) -> RadicalVerdict:
    cls = class_of_path(q, p, field)
    verdict = IN_RAD_N_PLUS_1 if cls.is_zero else EXACTLY_RAD_N
    return RadicalVerdict(p, p.length, verdict, is_sectional(q, p))


def find_shortcut_targets(q: TranslationQuiver, p: Path, max_len: int) -> list[Path]:
    """Longer paths with the endpoints of ``p``: those for which ``p`` is a shortcut."""
    if max_len <= p.length:
        raise PreconditionError(f"max length {max_len} must exceed the path length {p.length}")
    out: list[Path] = []
    for n in range(p.length + 1, max_len + 1):
        out.extend(enumerate_paths(q, p.start, p.end, n))
    return out


@dataclass(frozen=True)
class Substitution:
    position: int  # 1-based index of the replaced arrow
    path: Path  # basis representative, length >= 2


@dataclass(frozen=True)
class DepthCertificate:
    """Mesh-level certificate: substitutes at ``positions`` give a nonzero composite."""

    base: Path
    substitutions: tuple[Substitution, ...]
    total_degree: int
    witness: ClassVector = field(repr=False, compare=False)

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(s.position for s in self.substitutions)

    def composite(self) -> Path:
        return substituted_path(self.base, self.substitutions)

    def to_dict(self) -> dict:
        return {
            "kind": "mesh-level certificate",
            "path": self.base.label(),
            "positions": list(self.positions),
            "substitutes": [s.path.label() for s in self.substitutions],
            "total_degree": self.total_degree,
            "witness": [[p.label(), str(c)] for p, c in self.witness.terms()],
            "exact": True,
        }


def substituted_path(base: Path, subs: tuple[Substitution, ...]) -> Path:
    by_pos = {s.position: s.path for s in subs}
    out = Path((base.start,))
    for i, a in enumerate(base.arrows, start=1):
        piece = by_pos.get(i) or Path(base.vertices[i - 1 : i + 1], (a,))
        if piece.start != out.end or piece.end != base.vertices[i]:
            raise PreconditionError(f"substitute at position {i} has the wrong endpoints")
        out = out.then(piece)
    return out


def _degree_vectors(k: int, extra: int, cap: int):
    """Degrees d_1..d_k in [2, cap] with sum(d_i - 1) == extra, lexicographically."""
    ranges = [range(2, cap + 1)] * k
    for ds in itertools.product(*ranges):
        if sum(d - 1 for d in ds) == extra:
            yield ds


def depth_certificate(
    q: TranslationQuiver, p: Path, max_extra: int, cap: int, field: FieldSpec | None = None
) -> DepthCertificate | None:
    """Minimal-degree substitution making the zero composite ``p`` nonzero.

    Order: total degree, then position tuple, then degree vector, then
    basis order of the substitutes.  Basis classes suffice because
    composition is multilinear.
    """
    if max_extra < 0 or cap < 2:
        raise PreconditionError("max_extra must be >= 0 and the per-position cap >= 2")
    if not class_of_path(q, p, field).is_zero:
        raise PreconditionError(f"class of {p.label()} is nonzero; nothing to certify")
    n = p.length
    verts = p.vertices
    basis_cache: dict[tuple[int, int], list[Path]] = {}

    def substitutes(i: int, d: int) -> list[Path]:
        if (i, d) not in basis_cache:
            hs = hom_space(q, verts[i - 1], verts[i], d, field)
            basis_cache[(i, d)] = hs.quotient_basis()
        return basis_cache[(i, d)]

    for extra in range(1, max_extra + 1):
        target = hom_space(q, p.start, p.end, n + extra, field)
        candidates = []
        for k in range(1, min(n, extra) + 1):
            candidates.extend(itertools.combinations(range(1, n + 1), k))
        for positions in sorted(candidates):
            for ds in _degree_vectors(len(positions), extra, cap):
                pools = [substitutes(i, d) for i, d in zip(positions, ds)]
                if not all(pools):
                    continue
                if not target.exact:
                    raise OutOfWindowError(
                        f"hom space {p.start} -> {p.end} in degree {n + extra} is frontier-tainted"
                    )
                for choice in itertools.product(*pools):
                    subs = tuple(Substitution(i, s) for i, s in zip(positions, choice))
                    cls = class_of_path(q, substituted_path(p, subs), field)
                    if not cls.is_zero:
                        return DepthCertificate(p, subs, n + extra, cls)
    return None


def replay_certificate(q: TranslationQuiver, cert: DepthCertificate, field: FieldSpec | None = None) -> bool:
    if any(s.path.length < 2 for s in cert.substitutions):
        return False
    composite = cert.composite()
    if composite.length != cert.total_degree:
        return False
    expected = cert.base.length + sum(s.path.length - 1 for s in cert.substitutions)
    return expected == cert.total_degree and not class_of_path(q, composite, field).is_zero


@dataclass(frozen=True)
class FiberSum:
    total: int
    breakdown: dict[str, int]
    degree: int

    def to_dict(self) -> dict:
        return {"sum": self.total, "degree": self.degree, "fibers": dict(sorted(self.breakdown.items())), "exact": True}


def theoremB_fiber_sum(ball: CoveringBall, x: str, Y: str, n: int, field: FieldSpec | None = None) -> FiberSum:
    """Sum of ``dim k(D)_n(x, z)`` over the fiber of ``Y`` in the ball."""
    d = ball.delta
    if x not in d.vertices:
        raise PreconditionError(f"{x} is not a vertex of the ball")
    if n < 0:
        raise PreconditionError("degree must be non-negative")
    # every forward path of length < n from x must stay off the frontier,
    # otherwise fiber vertices could hide outside the ball
    layer = {x}
    for step in range(n):
        bad = sorted(v for v in layer if d.is_frontier(v))
        if bad:
            raise OutOfWindowError(f"{bad[0]} is a frontier vertex {step} steps after {x}")
        layer = {d.target(a) for v in layer for a in d.out_arrows(v)}
    breakdown = {}
    for z in ball.fiber(Y):
        hs = hom_space(d, x, z, n, field)
        if not hs.path_basis:
            continue
        if not hs.exact:
            raise OutOfWindowError(f"hom space {x} -> {z} in degree {n} is frontier-tainted")
        breakdown[z] = hs.quotient_dim
    return FiberSum(sum(breakdown.values()), breakdown, n)


@dataclass(frozen=True)
class MeshAnalysis:
    vertex: str
    cap: int
    cond3: bool
    cond4: bool
    cond3_witness: Path | None = None
    cond4_degree: int | None = None

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "cap": self.cap,
            "cond3": self.cond3,
            "cond4": self.cond4,
            "cond3_witness": None if self.cond3_witness is None else self.cond3_witness.label(),
            "cond4_degree": self.cond4_degree,
            "exact": True,
        }


def n2_mesh_analysis(q: TranslationQuiver, z: str, cap: int, field: FieldSpec | None = None) -> MeshAnalysis:
    """Two length-two conditions on the mesh ending at ``z``, swept up to degree ``cap``.

    cond3: some ``(sigma a_i) . phi . a_j`` is nonzero with ``phi`` of degree
    2..cap-2 between middles.  cond4: ``k(Q)_d(tau z, z) != 0`` for some
    4 <= d <= cap.
    """
    if cap < 4:
        raise PreconditionError("cap must be at least 4")
    mesh = mesh_at(q, z)
    tz = mesh.translate
    for d in range(2, cap + 1):
        hs = hom_space(q, tz, z, d, field)
        if not hs.exact:
            raise OutOfWindowError(f"hom space {tz} -> {z} in degree {d} is frontier-tainted")
    cond4_degree = None
    for d in range(4, cap + 1):
        if hom_space(q, tz, z, d, field).quotient_dim > 0:
            cond4_degree = d
            break
    witness = next(_cond3_witnesses(q, mesh, cap, field), None)
    return MeshAnalysis(z, cap, witness is not None, cond4_degree is not None, witness, cond4_degree)


def _cond3_witnesses(q: TranslationQuiver, mesh, cap: int, field: FieldSpec | None):
    for d in range(2, cap - 1):
        for _, s_i in mesh.spokes:
            y_i = q.target(s_i)
            for a_j, _ in mesh.spokes:
                for phi in hom_space(q, y_i, q.source(a_j), d, field).quotient_basis():
                    path = q.path((s_i,)).then(phi).then(q.path((a_j,)))
                    if not class_of_path(q, path, field).is_zero:
                        yield path
