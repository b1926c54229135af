"""Exact sparse linear algebra over the rationals or a prime field.

Vectors are sparse maps ``column -> value`` over a shared :class:`Basis`.
Rational elimination is fraction-free: reduced rows are primitive integer
vectors with a positive pivot, which makes the reduced echelon form unique.
Over ``F_p`` rows are scaled to a unit pivot.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Hashable, Iterable, Sequence, Union

from meshkit.errors import PreconditionError

DEFAULT_PRIME = 32003
FieldSpec = Union[str, int]  # "rational" or a prime


class Basis:
    """An ordered list of hashable keys (paths, usually) with an index."""

    def __init__(self, keys: Iterable[Hashable]) -> None:
        self.keys = tuple(keys)
        self.index = {k: i for i, k in enumerate(self.keys)}
        if len(self.index) != len(self.keys):
            raise PreconditionError("basis keys must be distinct")

    def __len__(self) -> int:
        return len(self.keys)


@dataclass(frozen=True)
class VectorInBasis:
    basis: Basis
    coords: dict[int, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.basis)
        for i in self.coords:
            if not 0 <= i < n:
                raise PreconditionError(f"coordinate {i} outside basis of size {n}")
        object.__setattr__(self, "coords", {i: c for i, c in self.coords.items() if c != 0})

    @classmethod
    def unit(cls, basis: Basis, key: Hashable) -> VectorInBasis:
        return cls(basis, {basis.index[key]: 1})

    def is_zero(self) -> bool:
        return not self.coords

    def __add__(self, other: VectorInBasis) -> VectorInBasis:
        _same_basis(self.basis, other.basis)
        out = dict(self.coords)
        for i, c in other.coords.items():
            out[i] = out.get(i, 0) + c
        return VectorInBasis(self.basis, out)

    def scaled(self, c: object) -> VectorInBasis:
        return VectorInBasis(self.basis, {i: c * v for i, v in self.coords.items()})

    def items(self) -> list[tuple[Hashable, object]]:
        return [(self.basis.keys[i], self.coords[i]) for i in sorted(self.coords)]


def _same_basis(a: Basis, b: Basis) -> None:
    if a is not b and a.keys != b.keys:
        raise PreconditionError("vectors live over different bases")


def _check_field(f: FieldSpec) -> FieldSpec:
    if f == "rational":
        return f
    if isinstance(f, int) and f > 1:
        return f
    raise PreconditionError(f"unknown field {f!r}")


@dataclass(frozen=True)
class Echelon:
    """Reduced row-echelon form: ``rows[k]`` has its pivot at ``pivots[k]``."""

    basis: Basis
    field: FieldSpec
    pivots: tuple[int, ...]
    rows: tuple[dict[int, int], ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


@dataclass(frozen=True)
class Membership:
    inside: bool
    residual: VectorInBasis


def _to_integer_row(coords: dict[int, object]) -> dict[int, int]:
    den = 1
    for c in coords.values():
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    return {i: int(Fraction(c) * den) for i, c in coords.items() if c != 0}


def _primitive(row: dict[int, int], pivot: int) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
    if row[pivot] < 0:
        g = -g
    return {i: v // g for i, v in row.items()}


def _reduce_int(row: dict[int, int], prow: dict[int, int], col: int) -> dict[int, int]:
    """Eliminate ``col`` from ``row`` using ``prow`` (pivot at ``col``) fraction-free."""
    a = prow[col]
    b = row[col]
    g = gcd(a, b)
    ma, mb = a // g, b // g
    out = {i: ma * v for i, v in row.items()}
    for i, v in prow.items():
        out[i] = out.get(i, 0) - mb * v
    return {i: v for i, v in out.items() if v}


def _reduce_mod(row: dict[int, int], prow: dict[int, int], col: int, p: int) -> dict[int, int]:
    b = row[col]
    out = dict(row)
    for i, v in prow.items():
        out[i] = (out.get(i, 0) - b * v) % p
    return {i: v for i, v in out.items() if v}


def row_reduce(rows: Sequence[VectorInBasis], field: FieldSpec = "rational", basis: Basis | None = None) -> Echelon:
    """Reduced row-echelon form of the span of ``rows``."""
    field = _check_field(field)
    if basis is None:
        if not rows:
            basis = Basis(())
        else:
            basis = rows[0].basis
    for r in rows:
        _same_basis(basis, r.basis)
    pivot_rows: dict[int, dict[int, int]] = {}
    for vec in rows:
        if field == "rational":
            row = _to_integer_row(vec.coords)
        else:
            row = {i: int(Fraction(c).numerator * pow(Fraction(c).denominator, -1, field)) % field
                   for i, c in vec.coords.items()}
            row = {i: v for i, v in row.items() if v}
        for col in sorted(set(row) & set(pivot_rows)):
            if col in row:
                if field == "rational":
                    row = _reduce_int(row, pivot_rows[col], col)
                else:
                    row = _reduce_mod(row, pivot_rows[col], col, field)
        if not row:
            continue
        lead = min(row)
        if field == "rational":
            row = _primitive(row, lead)
        else:
            inv = pow(row[lead], -1, field)
            row = {i: v * inv % field for i, v in row.items()}
        for col, prow in list(pivot_rows.items()):
            if lead in prow:
                if field == "rational":
                    pivot_rows[col] = _primitive(_reduce_int(prow, row, lead), col)
                else:
                    pivot_rows[col] = _reduce_mod(prow, row, lead, field)
        pivot_rows[lead] = row
    pivots = tuple(sorted(pivot_rows))
    return Echelon(basis, field, pivots, tuple(pivot_rows[c] for c in pivots))


def reduce_vector(v: VectorInBasis, span: Echelon) -> VectorInBasis:
    """Normal form of ``v`` modulo ``span``: zero on every pivot column."""
    _same_basis(v.basis, span.basis)
    if span.field == "rational":
        out = {i: Fraction(c) for i, c in v.coords.items()}
        for col, prow in zip(span.pivots, span.rows):
            c = out.get(col)
            if c:
                f = c / prow[col]
                for i, x in prow.items():
                    out[i] = out.get(i, 0) - f * x
        return VectorInBasis(v.basis, {i: c for i, c in out.items() if c})
    p = span.field
    out = {}
    for i, c in v.coords.items():
        c = Fraction(c)
        out[i] = c.numerator * pow(c.denominator, -1, p) % p
    for col, prow in zip(span.pivots, span.rows):
        c = out.get(col)
        if c:
            for i, x in prow.items():
                out[i] = (out.get(i, 0) - c * x) % p
    return VectorInBasis(v.basis, {i: c for i, c in out.items() if c})


def membership(v: VectorInBasis, span: Echelon) -> Membership:
    residual = reduce_vector(v, span)
    return Membership(residual.is_zero(), residual)
