"""Brute-force reference computations for cross-checking the main engine.

Nothing here touches the engine's path enumeration or elimination code:
paths are built recursively from the target backwards, relations are found
by scanning each path for a length-two segment that sits on a mesh, and
ranks come from dense Gaussian elimination over ``Fraction``.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from meshkit.errors import OracleTooLarge
from meshkit.quiver import TranslationQuiver

PATH_CAP = 200


class DenseMatrix:
    def __init__(self, rows: list[list[Fraction]], cols: int) -> None:
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        self.rows = [list(r) for r in rows]
        self.cols = cols

    def rank(self) -> int:
        m = [list(r) for r in self.rows]
        rank = 0
        for c in range(self.cols):
            pivot = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
            if pivot is None:
                continue
            m[rank], m[pivot] = m[pivot], m[rank]
            for i in range(len(m)):
                if i != rank and m[i][c] != 0:
                    f = m[i][c] / m[rank][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
            rank += 1
        return rank


def _paths_into(q: TranslationQuiver, x: str, y: str, n: int) -> list[tuple[str, ...]]:
    """Arrow tuples of length ``n`` from ``x`` to ``y``, built from the end."""
    if n == 0:
        return [()] if x == y else []
    out = []
    for a in q.in_arrows(y):
        for head in _paths_into(q, x, q.source(a), n - 1):
            out.append(head + (a,))
            if len(out) > PATH_CAP:
                raise OracleTooLarge(f"more than {PATH_CAP} paths {x} -> {y} of length {n}")
    return out


def oracle_paths(q: TranslationQuiver, x: str, y: str, n: int) -> list[tuple[str, ...]]:
    return sorted(_paths_into(q, x, y, n))


def _relation_rows(q: TranslationQuiver, paths: list[tuple[str, ...]]) -> list[list[Fraction]]:
    col = {p: i for i, p in enumerate(paths)}
    seen = set()
    rows = []
    for p in paths:
        for i in range(len(p) - 1):
            z = q.target(p[i + 1])
            if q.is_projective(z) or q.is_frontier(z) or q.tau.get(z) != q.source(p[i]):
                continue
            key = (p[:i], p[i + 2 :])
            if key in seen:
                continue
            seen.add(key)
            row = [Fraction(0)] * len(paths)
            for alpha in q.in_arrows(z):
                row[col[p[:i] + (q.sigma[alpha], alpha) + p[i + 2 :]]] += 1
            rows.append(row)
    return rows


def oracle_hom_dim(q: TranslationQuiver, x: str, y: str, n: int) -> int:
    paths = oracle_paths(q, x, y, n)
    rows = _relation_rows(q, paths)
    return len(paths) - DenseMatrix(rows, len(paths)).rank()


def _span(q: TranslationQuiver, x: str, y: str, n: int, cache: dict | None = None):
    key = (x, y, n)
    if cache is not None and key in cache:
        return cache[key]
    paths = oracle_paths(q, x, y, n)
    rows = _relation_rows(q, paths)
    out = (paths, rows, DenseMatrix(rows, len(paths)).rank())
    if cache is not None:
        cache[key] = out
    return out


def oracle_class_is_zero(q: TranslationQuiver, arrows: tuple[str, ...], start: str, cache: dict | None = None) -> bool:
    """Is the path in the span of the relations?  Compares two ranks."""
    end = start
    for a in arrows:
        end = q.target(a)
    paths, rows, rank = _span(q, start, end, len(arrows), cache)
    unit = [Fraction(int(p == tuple(arrows))) for p in paths]
    return rank == DenseMatrix(rows + [unit], len(paths)).rank()


def oracle_depth_search(
    q: TranslationQuiver, start: str, arrows: tuple[str, ...], max_extra: int, cap: int
) -> tuple[int, tuple[str, ...]] | None:
    """Smallest total degree reachable by substituting paths of length 2..cap.

    Tries every position subset and every path (not just basis paths) at
    each chosen position.  Returns ``(total_degree, composite arrows)`` or None.
    """
    verts = [start]
    for a in arrows:
        verts.append(q.target(a))
    n = len(arrows)
    zero_cache: dict[tuple[str, ...], bool] = {}
    spans: dict = {}
    for total in range(n + 1, n + max_extra + 1):
        for k in range(1, n + 1):
            for positions in itertools.combinations(range(n), k):
                for degrees in itertools.product(range(2, cap + 1), repeat=k):
                    if n + sum(d - 1 for d in degrees) != total:
                        continue
                    pools = []
                    for i, d in zip(positions, degrees):
                        pools.append(oracle_paths(q, verts[i], verts[i + 1], d))
                    for choice in itertools.product(*pools):
                        pieces = [(a,) for a in arrows]
                        for i, sub in zip(positions, choice):
                            pieces[i] = sub
                        composite = tuple(itertools.chain.from_iterable(pieces))
                        if composite not in zero_cache:
                            zero_cache[composite] = oracle_class_is_zero(q, composite, start, spans)
                        if not zero_cache[composite]:
                            return total, composite
    return None
