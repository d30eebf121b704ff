"""Points of the compactified building as classes of diagonalizable norms.

A :class:`NormPoint` with basis ``f_1..f_m`` of a subspace ``W`` and weights
``k_1..k_m`` is the additive norm

    nu(sum c_i f_i) = min_i (v(c_i) - k_i)

on W, up to an additive constant.  Its unit ball is the lattice
``(+) p^{k_i} Z_(p) f_i``, so integer weights are exactly the vertices and
``to_lattice`` is the unit-ball map.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .apartment import ApartmentPoint
from .errors import PreconditionError
from .lattice_building import LatticeClass
from .local_arith import (
    INF,
    Matrix,
    as_matrix,
    check_prime,
    columns,
    from_columns,
    hnf_local,
    identity,
    intersect_saturate,
    pivot_data,
    rank,
    solve,
    to_fraction,
    vval,
)


@dataclass(frozen=True)
class NormPoint:
    p: int
    basis: Matrix
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        check_prime(self.p)
        B = as_matrix(self.basis)
        w = tuple(to_fraction(x) for x in self.weights)
        if len(B[0]) != len(w):
            raise PreconditionError("one weight per basis vector is required")
        if rank(B) != len(w):
            raise PreconditionError("norm basis must be linearly independent")
        m = min(w)
        object.__setattr__(self, "basis", B)
        object.__setattr__(self, "weights", tuple(x - m for x in w))

    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def is_vertex(self) -> bool:
        return all(w.denominator == 1 for w in self.weights)


def np_eval(x: NormPoint, u: Sequence) -> object:
    u = tuple(to_fraction(c) for c in u)
    if len(u) != x.n:
        raise PreconditionError("vector has the wrong length")
    return _eval_columns(x, (u,))[0]


def _eval_columns(x: NormPoint, vectors) -> list:
    """Evaluate the norm on several vectors with a single linear solve."""
    vectors = list(vectors)
    nonzero = [u for u in vectors if any(u)]
    out = {}
    if nonzero:
        try:
            C = solve(x.basis, from_columns(nonzero))
        except PreconditionError:
            raise PreconditionError("vector is outside the subspace W of the norm") from None
        for col, u in zip(columns(C), nonzero):
            out[u] = min(vval(c, x.p) - k for c, k in zip(col, x.weights) if c != 0)
    return [out.get(u, INF) for u in vectors]


def _same_span(A, B) -> bool:
    return len(A[0]) == len(B[0]) and rank(tuple(a + b for a, b in zip(A, B))) == len(A[0])


def np_equal(x: NormPoint, y: NormPoint) -> bool:
    """Equality of norm classes by two-sided domination on adapted bases.

    On a y-adapted basis, ``nu_x(f) >= nu_y(f) + c`` for every basis vector
    already forces ``nu_x >= nu_y + c`` everywhere (ultrametric inequality),
    so checking both bases decides ``nu_x = nu_y + c``.
    """
    if x.p != y.p or x.n != y.n or not _same_span(x.basis, y.basis):
        return False
    fy, fx = columns(y.basis), columns(x.basis)
    x_on_y, y_on_y = _eval_columns(x, fy), _eval_columns(y, fy)
    c = x_on_y[0] - y_on_y[0]
    if any(a != b + c for a, b in zip(x_on_y, y_on_y)):
        return False
    return all(b == a - c for a, b in zip(_eval_columns(x, fx), _eval_columns(y, fx)))


def from_apartment(x: ApartmentPoint, p: int) -> NormPoint:
    basis = columns(identity(x.n))
    cols = [basis[i - 1] for i in x.support]
    return NormPoint(p, from_columns(cols), tuple(-c for c in x.coords))


def to_apartment(x: NormPoint) -> ApartmentPoint:
    """Inverse of :func:`from_apartment` for norms diagonal in the standard basis."""
    support = []
    coords = []
    for col, k in zip(columns(x.basis), x.weights):
        nz = [i for i, v in enumerate(col) if v != 0]
        if len(nz) != 1:
            raise PreconditionError("norm is not diagonal in the standard basis")
        i = nz[0]
        support.append(i + 1)
        coords.append(-(k + vval(col[i], x.p)))
    return ApartmentPoint(x.n, tuple(support), tuple(coords))


def from_lattice(L: LatticeClass) -> NormPoint:
    """Gauge norm of the lattice, written on pivot-normalized basis vectors."""
    cols = []
    weights = []
    for col, (r, e) in zip(columns(L.basis), pivot_data(L.basis, L.p)):
        scale = Fraction(L.p) ** e
        cols.append([v / scale for v in col])
        weights.append(e)
    return NormPoint(L.p, from_columns(cols), tuple(weights))


def to_lattice(x: NormPoint) -> LatticeClass:
    if not x.is_vertex:
        raise PreconditionError("to_lattice needs integer weights")
    cols = [[v * Fraction(x.p) ** int(k) for v in col] for col, k in zip(columns(x.basis), x.weights)]
    return LatticeClass.from_basis(from_columns(cols), x.p)


def component_span(x: NormPoint) -> Matrix:
    """Canonical basis of W: the hnf_local basis of the saturated lattice Z_(p)^n ∩ W."""
    return hnf_local(intersect_saturate(identity(x.n), x.basis, x.p), x.p)


def is_building_point(x: NormPoint) -> bool:
    return x.dim == x.n
