"""Graded hom spaces of the mesh category.

``k(Q)_n(x, y)`` is the span of the length-``n`` paths ``x -> y`` modulo
the degree-``n`` part of the ideal generated by the mesh relations
``sum over spokes of (sigma a) then a``, all with coefficient +1.

On a truncated window a hom space is *exact* when truncation provably
cannot change it:

* every vertex at position >= 2 on a counted path is non-frontier, so
  every mesh that can end there is complete, and
* no length-``n`` path of the untruncated quiver can leave the window.
  Such a path would exit through a frontier vertex ``f`` and re-enter
  through a frontier vertex ``f'``, costing at least
  ``dist(x, f) + 2 + dist(f', y)`` arrows.
"""
from __future__ import annotations

import os
import threading
import weakref
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from meshkit.errors import OutOfWindowError, PreconditionError, QuiverError
from meshkit.linalg import Basis, Echelon, FieldSpec, VectorInBasis, reduce_vector, row_reduce
from meshkit.quiver import Path, TranslationQuiver, enumerate_paths, mesh_at


def default_field() -> FieldSpec:
    """Scalar backend chosen by ``MESHKIT_FIELD`` (``rational`` or ``fp``)."""
    choice = os.environ.get("MESHKIT_FIELD", "rational").strip().lower()
    if choice == "rational":
        return "rational"
    if choice == "fp":
        from meshkit.linalg import DEFAULT_PRIME

        return DEFAULT_PRIME
    raise PreconditionError(f"MESHKIT_FIELD must be 'rational' or 'fp', not {choice!r}")


@dataclass(frozen=True, eq=False)
class HomSpace:
    quiver: TranslationQuiver = field(repr=False)
    source: str
    target: str
    degree: int
    path_basis: tuple[Path, ...]
    basis: Basis = field(repr=False)
    relations: Echelon = field(repr=False)
    exact: bool

    @property
    def quotient_dim(self) -> int:
        return len(self.path_basis) - self.relations.rank

    @property
    def exactness(self) -> str:
        return "exact" if self.exact else "frontier-tainted"

    def reduce(self, v: VectorInBasis) -> VectorInBasis:
        return reduce_vector(v, self.relations)

    def vector(self, terms: dict[Path, object]) -> VectorInBasis:
        coords: dict[int, object] = {}
        for p, c in terms.items():
            i = self.basis.index.get(p)
            if i is None:
                raise PreconditionError(f"path {p.label()} is not in this hom space")
            coords[i] = coords.get(i, 0) + c
        return VectorInBasis(self.basis, coords)

    def class_of(self, v: VectorInBasis) -> ClassVector:
        return ClassVector(self, v, self.reduce(v))

    def quotient_basis(self) -> list[Path]:
        """Paths whose classes form a basis of the quotient (non-pivot columns)."""
        pivots = set(self.relations.pivots)
        return [p for i, p in enumerate(self.path_basis) if i not in pivots]


@dataclass(frozen=True, eq=False)
class ClassVector:
    hom: HomSpace
    representative: VectorInBasis
    normal_form: VectorInBasis

    @property
    def is_zero(self) -> bool:
        return self.normal_form.is_zero()

    @property
    def degree(self) -> int:
        return self.hom.degree

    def terms(self) -> list[tuple[Path, object]]:
        return self.normal_form.items()


class GradedDim(NamedTuple):
    degree: int
    dim: int
    exact: bool


def _layers(q: TranslationQuiver, start: str, n: int, forward: bool) -> list[set[str]]:
    layers = [{start}]
    for _ in range(n):
        nxt = set()
        for v in layers[-1]:
            if forward:
                nxt.update(q.target(a) for a in q.out_arrows(v))
            else:
                nxt.update(q.source(a) for a in q.in_arrows(v))
        layers.append(nxt)
    return layers


def _frontier_distance(q: TranslationQuiver, start: str, limit: int, forward: bool) -> int | None:
    dist = {start: 0}
    todo = deque([start])
    while todo:
        v = todo.popleft()
        if q.is_frontier(v):
            return dist[v]
        if dist[v] == limit:
            continue
        nbrs = (q.target(a) for a in q.out_arrows(v)) if forward else (q.source(a) for a in q.in_arrows(v))
        for w in nbrs:
            if w not in dist:
                dist[w] = dist[v] + 1
                todo.append(w)
    return None


def is_exact(q: TranslationQuiver, x: str, y: str, n: int) -> bool:
    """Safe-region rule: can truncation have changed ``k(Q)_n(x, y)``?"""
    if n == 0:
        return True
    fwd = _layers(q, x, n, True)
    bwd = _layers(q, y, n, False)
    for i in range(2, n + 1):
        if any(q.is_frontier(v) for v in fwd[i] & bwd[n - i]):
            return False
    dx = _frontier_distance(q, x, n - 2, True)
    dy = _frontier_distance(q, y, n - 2, False)
    if dx is not None and dy is not None and dx + 2 + dy <= n:
        return False
    return True


def relation_generators(q: TranslationQuiver, x: str, y: str, n: int) -> list[VectorInBasis]:
    """Degree-``n`` generators ``p . mesh(z) . q'`` of the relation subspace."""
    if n < 2:
        raise PreconditionError("mesh relations live in degree >= 2")
    basis = Basis(enumerate_paths(q, x, y, n))
    return _generators(q, x, y, n, basis)


def _generators(q: TranslationQuiver, x: str, y: str, n: int, basis: Basis) -> list[VectorInBasis]:
    if n < 2 or not len(basis):
        return []
    fwd = _layers(q, x, n, True)
    bwd = _layers(q, y, n, False)
    heads: dict[tuple[str, int], list[Path]] = {}
    tails: dict[tuple[str, int], list[Path]] = {}
    out: list[VectorInBasis] = []
    for a in range(n - 1):
        b = n - 2 - a
        for z in sorted(fwd[a + 2] & bwd[b]):
            if q.is_projective(z) or q.is_frontier(z):
                continue
            mesh = mesh_at(q, z)
            if mesh.translate not in fwd[a]:
                continue
            if (mesh.translate, a) not in heads:
                heads[(mesh.translate, a)] = enumerate_paths(q, x, mesh.translate, a)
            if (z, b) not in tails:
                tails[(z, b)] = enumerate_paths(q, z, y, b)
            for p in heads[(mesh.translate, a)]:
                for p2 in tails[(z, b)]:
                    coords: dict[int, int] = {}
                    for alpha, sig in mesh.spokes:
                        mid = q.path((sig, alpha))
                        coords[basis.index[p.then(mid).then(p2)]] = 1
                    out.append(VectorInBasis(basis, coords))
    return out


class MeshCategory:
    """Memoized hom spaces over one quiver; safe to query from several threads."""

    def __init__(self, q: TranslationQuiver, field: FieldSpec = "rational") -> None:
        self.quiver = q
        self.field = field
        self._memo: dict[tuple[str, str, int], HomSpace] = {}
        self._lock = threading.Lock()

    def hom_space(self, x: str, y: str, n: int) -> HomSpace:
        key = (x, y, n)
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        hs = self._compute(x, y, n)
        with self._lock:
            return self._memo.setdefault(key, hs)

    def _compute(self, x: str, y: str, n: int) -> HomSpace:
        q = self.quiver
        if n < 0:
            raise PreconditionError("degree must be non-negative")
        for v in (x, y):
            if v not in q.vertices:
                raise QuiverError(f"unknown vertex {v}")
        basis = Basis(enumerate_paths(q, x, y, n))
        gens = _generators(q, x, y, n, basis)
        ech = row_reduce(gens, self.field, basis=basis)
        return HomSpace(q, x, y, n, basis.keys, basis, ech, is_exact(q, x, y, n))


_categories: "weakref.WeakKeyDictionary[TranslationQuiver, dict]" = weakref.WeakKeyDictionary()
_categories_lock = threading.Lock()


def mesh_category(q: TranslationQuiver, field: FieldSpec | None = None) -> MeshCategory:
    field = default_field() if field is None else field
    with _categories_lock:
        per_field = _categories.setdefault(q, {})
        cat = per_field.get(field)
        if cat is None:
            cat = per_field[field] = MeshCategory(q, field)
        return cat


def hom_space(q: TranslationQuiver, x: str, y: str, n: int, field: FieldSpec | None = None) -> HomSpace:
    return mesh_category(q, field).hom_space(x, y, n)


def class_of_path(q: TranslationQuiver, p: Path, field: FieldSpec | None = None) -> ClassVector:
    hs = hom_space(q, p.start, p.end, p.length, field)
    if not hs.exact:
        raise OutOfWindowError(
            f"hom space {p.start} -> {p.end} in degree {p.length} is frontier-tainted"
        )
    return hs.class_of(VectorInBasis.unit(hs.basis, p))


def compose_classes(c2: ClassVector, c1: ClassVector) -> ClassVector:
    """``c2 . c1``: first ``c1`` (x -> y), then ``c2`` (y -> z)."""
    h1, h2 = c1.hom, c2.hom
    if h1.quiver is not h2.quiver and h1.quiver != h2.quiver:
        raise PreconditionError("classes live over different quivers")
    if h1.target != h2.source:
        raise PreconditionError(f"cannot compose: {h1.target} != {h2.source}")
    field = h1.relations.field
    target = hom_space(h1.quiver, h1.source, h2.target, h1.degree + h2.degree, field)
    if not target.exact:
        raise OutOfWindowError(
            f"hom space {target.source} -> {target.target} in degree {target.degree} is frontier-tainted"
        )
    terms: dict[Path, object] = {}
    for p1, a in c1.terms():
        for p2, b in c2.terms():
            p = p1.then(p2)
            terms[p] = terms.get(p, 0) + a * b
    return target.class_of(target.vector(terms))


def graded_dims(q: TranslationQuiver, x: str, y: str, max_deg: int, field: FieldSpec | None = None) -> list[GradedDim]:
    if max_deg < 0:
        raise PreconditionError("max degree must be non-negative")
    out = []
    for n in range(max_deg + 1):
        hs = hom_space(q, x, y, n, field)
        out.append(GradedDim(n, hs.quotient_dim, hs.exact))
    return out


def mesh_relation_class(q: TranslationQuiver, x: str, field: FieldSpec | None = None) -> ClassVector:
    """Class of the mesh relation ending at ``x`` (regardless of exactness)."""
    mesh = mesh_at(q, x)
    hs = hom_space(q, mesh.translate, x, 2, field)
    terms = {q.path((sig, alpha)): Fraction(1) for alpha, sig in mesh.spokes}
    return hs.class_of(hs.vector(terms))
