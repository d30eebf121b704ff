"""Group elements of PGL_n(Q), the monomial subgroup and root groups, and their actions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .apartment import ApartmentPoint, act_monomial, f_value
from .errors import PreconditionError
from .lattice_building import LatticeClass
from .local_arith import (
    Matrix,
    as_matrix,
    det,
    identity,
    matmul,
    vval,
)
from .norm_points import NormPoint, np_equal


@dataclass(frozen=True)
class ProjElement:
    """Invertible matrix modulo rational scalars, stored as a primitive integer matrix."""

    matrix: Matrix

    def __post_init__(self):
        M = as_matrix(self.matrix)
        if len(M) != len(M[0]):
            raise PreconditionError("group elements are square matrices")
        if det(M) == 0:
            raise PreconditionError("matrix is singular")
        object.__setattr__(self, "matrix", _primitive(M))

    @property
    def n(self) -> int:
        return len(self.matrix)

    @classmethod
    def identity(cls, n: int) -> "ProjElement":
        return cls(identity(n))

    def __mul__(self, other: "ProjElement") -> "ProjElement":
        return ProjElement(matmul(self.matrix, other.matrix))


def _primitive(M: Matrix) -> Matrix:
    entries = [x for row in M for x in row]
    lcm = 1
    for x in entries:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in entries]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    first = next(v for v in ints if v != 0)
    if first < 0:
        g = -g
    n = len(M[0])
    return tuple(tuple(Fraction(ints[r * n + c] // g) for c in range(n)) for r in range(len(M)))


@dataclass(frozen=True)
class MonomialElement:
    """``v_i -> p^{t_i} v_{sigma(i)}`` with ``perm[i-1] = sigma(i)`` and ``vals[i-1] = t_i``."""

    perm: tuple[int, ...]
    vals: tuple[int, ...]

    def __post_init__(self):
        perm, vals = tuple(self.perm), tuple(self.vals)
        if sorted(perm) != list(range(1, len(perm) + 1)):
            raise PreconditionError("perm must be a permutation of 1..n")
        if len(vals) != len(perm) or any(not isinstance(t, int) for t in vals):
            raise PreconditionError("vals must be n integers")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "vals", vals)

    @property
    def n(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, n: int) -> "MonomialElement":
        return cls(tuple(range(1, n + 1)), (0,) * n)

    def to_matrix(self, p: int) -> Matrix:
        M = [[Fraction(0)] * self.n for _ in range(self.n)]
        for i, (s, t) in enumerate(zip(self.perm, self.vals)):
            M[s - 1][i] = Fraction(p) ** t
        return tuple(map(tuple, M))

    def to_proj(self, p: int) -> ProjElement:
        return ProjElement(self.to_matrix(p))

    def __mul__(self, other: "MonomialElement") -> "MonomialElement":
        # (self * other)(v_i) = self(p^{s_i} v_{tau(i)})
        perm = tuple(self.perm[other.perm[i] - 1] for i in range(self.n))
        vals = tuple(other.vals[i] + self.vals[other.perm[i] - 1] for i in range(self.n))
        return MonomialElement(perm, vals)

    def inverse(self) -> "MonomialElement":
        perm = [0] * self.n
        vals = [0] * self.n
        for i, (s, t) in enumerate(zip(self.perm, self.vals)):
            perm[s - 1] = i + 1
            vals[s - 1] = -t
        return MonomialElement(tuple(perm), tuple(vals))


@dataclass(frozen=True)
class RootGroupElement:
    """The unipotent matrix ``1 + omega E_ij``, sending v_j to v_j + omega v_i."""

    i: int
    j: int
    omega: Fraction

    def __post_init__(self):
        if self.i == self.j:
            raise PreconditionError("root group needs i != j")
        object.__setattr__(self, "omega", Fraction(self.omega))

    @property
    def root(self) -> tuple[int, int]:
        return (self.i, self.j)

    def to_matrix(self, n: int) -> Matrix:
        if not (1 <= self.i <= n and 1 <= self.j <= n):
            raise PreconditionError("root indices out of range")
        M = [list(r) for r in identity(n)]
        M[self.i - 1][self.j - 1] = self.omega
        return tuple(map(tuple, M))

    def to_proj(self, n: int) -> ProjElement:
        return ProjElement(self.to_matrix(n))


def psi(u: RootGroupElement, p: int):
    return vval(u.omega, p)


def act(g: ProjElement, x):
    """Left action on a LatticeClass or a NormPoint."""
    if isinstance(x, LatticeClass):
        if g.n != x.n:
            raise PreconditionError("dimension mismatch")
        return LatticeClass.from_basis(matmul(g.matrix, x.basis), x.p)
    if isinstance(x, NormPoint):
        if g.n != x.n:
            raise PreconditionError("dimension mismatch")
        return NormPoint(x.p, matmul(g.matrix, x.basis), x.weights)
    raise TypeError(f"cannot act on {type(x).__name__}")


def in_U_ax(u: RootGroupElement, x: ApartmentPoint, p: int) -> bool:
    return psi(u, p) >= f_value(u.root, x)


def stabilizes(g: ProjElement, x: NormPoint) -> bool:
    return np_equal(act(g, x), x)


def stabilizes_set(g: ProjElement, omega: Iterable[NormPoint]) -> bool:
    omega = list(omega)
    if not omega:
        raise PreconditionError("empty set of points")
    return all(stabilizes(g, x) for x in omega)


def star_condition(omega: Iterable[ApartmentPoint]) -> bool:
    """Whether the supports met by the set have a largest element under inclusion."""
    supports = {frozenset(x.support) for x in omega}
    if not supports:
        raise PreconditionError("empty set of points")
    top = max(supports, key=len)
    return all(s <= top for s in supports)


def conjugate_root_group(n_elt: MonomialElement, u: RootGroupElement, p: int) -> RootGroupElement:
    """``n u n^{-1}``: root (sigma(i), sigma(j)) and entry ``p^{t_i - t_j} omega``."""
    i, j = u.i, u.j
    t = n_elt.vals
    omega = u.omega * Fraction(p) ** (t[i - 1] - t[j - 1])
    return RootGroupElement(n_elt.perm[i - 1], n_elt.perm[j - 1], omega)


def act_on_apartment(n_elt: MonomialElement, x: ApartmentPoint) -> ApartmentPoint:
    return act_monomial(n_elt, x)


def _index_set(I: Iterable[int], n: int) -> list[int]:
    I = sorted(set(I))
    if not I or any(not 1 <= i <= n for i in I):
        raise PreconditionError(f"index set must be a nonempty subset of 1..{n}")
    return I


def preserves_subspace(g: ProjElement, I: Iterable[int]) -> bool:
    """Whether g maps V_I = span(v_i : i in I) onto itself."""
    I = _index_set(I, g.n)
    rows_out = [r for r in range(g.n) if r + 1 not in I]
    return all(g.matrix[r][c - 1] == 0 for c in I for r in rows_out)


def restrict(g: ProjElement, I: Iterable[int]) -> ProjElement:
    I = _index_set(I, g.n)
    if not preserves_subspace(g, I):
        raise PreconditionError("g does not preserve V_I")
    return ProjElement(tuple(tuple(g.matrix[r - 1][c - 1] for c in I) for r in I))


def as_root_element(g: ProjElement) -> RootGroupElement | None:
    """Read g as a root-group element (up to scalars), or None if it is not one."""
    M = g.matrix
    d = M[0][0]
    if d == 0:
        return None
    off = []
    for r in range(g.n):
        for c in range(g.n):
            v = M[r][c] / d
            if r == c and v != 1:
                return None
            if r != c and v != 0:
                off.append((r + 1, c + 1, v))
    if len(off) != 1:
        return None
    i, j, w = off[0]
    return RootGroupElement(i, j, w)


def matrix_of(elements: Sequence, n: int, p: int) -> ProjElement:
    """Product of a word of group elements of any supported kind."""
    out = ProjElement.identity(n)
    for e in elements:
        if isinstance(e, RootGroupElement):
            e = e.to_proj(n)
        elif isinstance(e, MonomialElement):
            e = e.to_proj(p)
        out = out * e
    return out
