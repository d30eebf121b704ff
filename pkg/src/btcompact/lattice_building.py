"""Lattice classes of any rank and the vertex graph of the building."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .apartment import ApartmentPoint
from .errors import PreconditionError
from .local_arith import (
    Matrix,
    check_prime,
    columns,
    complete,
    elementary_divisors,
    from_columns,
    hnf_local,
    hstack,
    intersect_saturate,
    inverse,
    matmul,
    pivot_data,
    rank,
    scale,
    smith_local,
    solve,
    vval,
)

MAX_N = 4
MAX_P = 7


@dataclass(frozen=True)
class LatticeClass:
    """Homothety class of a Z_(p)-lattice in Q^n, held in canonical form.

    Build instances with :meth:`from_basis`; the stored basis is the
    hnf_local form scaled so the smallest pivot exponent is 0, hence two
    classes are equal iff their stored bases are identical.
    """

    p: int
    n: int
    basis: Matrix

    @classmethod
    def from_basis(cls, basis, p: int) -> "LatticeClass":
        check_prime(p)
        B = hnf_local(basis, p)
        shift = min(e for _, e in pivot_data(B, p))
        if shift:
            B = hnf_local(scale(B, Fraction(p) ** -shift), p)
        return cls(p, len(B), B)

    @classmethod
    def standard(cls, n: int, p: int, support: Iterable[int] | None = None) -> "LatticeClass":
        return cls.diagonal(n, p, {i: 0 for i in (support or range(1, n + 1))})

    @classmethod
    def diagonal(cls, n: int, p: int, exponents: dict[int, int]) -> "LatticeClass":
        """Class of ``(+)_{i} p^{k_i} R v_i`` over the given indices (1-based)."""
        check_prime(p)
        idx = sorted(exponents)
        if not idx or any(not 1 <= i <= n for i in idx):
            raise PreconditionError(f"support must be a nonempty subset of 1..{n}")
        shift = min(exponents.values())
        B = [[Fraction(0)] * len(idx) for _ in range(n)]
        for c, i in enumerate(idx):
            B[i - 1][c] = Fraction(p) ** (exponents[i] - shift)
        # already canonical: p-power pivots, nothing to reduce
        return cls(p, n, tuple(map(tuple, B)))

    @property
    def rank(self) -> int:
        return len(self.basis[0])

    def sort_key(self):
        return (self.rank, self.basis)

    def diagonal_exponents(self) -> dict[int, int] | None:
        """``{i: k_i}`` if the class is ``(+) p^{k_i} R v_i``, else None."""
        out = {}
        for col in columns(self.basis):
            nz = [i for i, x in enumerate(col) if x != 0]
            if len(nz) != 1:
                return None
            i = nz[0]
            v = col[i]
            e = vval(v, self.p)
            if v != Fraction(self.p) ** e:
                return None
            out[i + 1] = e
        return out


def same_span(L: LatticeClass, M: LatticeClass) -> bool:
    if L.n != M.n or L.rank != M.rank:
        return False
    return rank(hstack(L.basis, M.basis)) == L.rank


def rel_pos(L: LatticeClass, M: LatticeClass) -> list[int]:
    """Elementary divisors of M relative to L, shifted to minimum 0."""
    if L.p != M.p:
        raise PreconditionError("lattice classes over different primes")
    if not same_span(L, M):
        raise PreconditionError("rel_pos needs lattices with the same span")
    X = solve(L.basis, M.basis)
    d = elementary_divisors(X, L.p)
    return [x - d[0] for x in d]


def adjacent(L: LatticeClass, M: LatticeClass) -> bool:
    if L.p != M.p or L.n != M.n or not same_span(L, M) or L == M:
        return False
    return set(rel_pos(L, M)) <= {0, 1}


def is_simplex(classes: Iterable[LatticeClass]) -> bool:
    cl = list(dict.fromkeys(classes))
    if not cl:
        raise PreconditionError("a simplex must be nonempty")
    return all(adjacent(a, b) for a, b in itertools.combinations(cl, 2))


def gaussian_binomial(m: int, k: int, q: int) -> int:
    if k < 0 or k > m:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def neighbor_count(m: int, p: int) -> int:
    return sum(gaussian_binomial(m, k, p) for k in range(1, m))


def subspaces_rref(m: int, k: int, p: int):
    """All k-dimensional subspaces of F_p^m as reduced row echelon matrices."""
    for pivots in itertools.combinations(range(m), k):
        free = [(r, c) for r in range(k) for c in range(pivots[r] + 1, m) if c not in pivots]
        for values in itertools.product(range(p), repeat=len(free)):
            rows = [[0] * m for _ in range(k)]
            for r, c in enumerate(pivots):
                rows[r][c] = 1
            for (r, c), v in zip(free, values):
                rows[r][c] = v
            yield rows, pivots


def check_guardrails(n: int, p: int, override: bool = False):
    if override or os.environ.get("BTCOMPACT_NO_GUARDRAILS"):
        return
    if n > MAX_N or p > MAX_P:
        raise PreconditionError(
            f"guardrail: neighbour enumeration limited to n <= {MAX_N}, p <= {MAX_P} "
            "(pass override=True / --override-guardrails)"
        )


def neighbors(L: LatticeClass, override: bool = False) -> list[LatticeClass]:
    """Every class M adjacent to L, i.e. pN ⊂ M ⊂ N for suitable representatives.

    M/pN runs over the nonzero proper subspaces of N/pN = F_p^m.
    """
    m, p = L.rank, L.p
    if m < 2:
        raise PreconditionError("rank-1 classes have no neighbours")
    check_guardrails(L.n, p, override)
    out = []
    for k in range(1, m):
        for rows, pivots in subspaces_rref(m, k, p):
            cols = [[Fraction(x) for x in r] for r in rows]
            for c in range(m):
                if c not in pivots:
                    cols.append([Fraction(p) if i == c else Fraction(0) for i in range(m)])
            C = from_columns(cols)
            out.append(LatticeClass.from_basis(matmul(L.basis, C), p))
    return out


@dataclass(frozen=True)
class BuildingGraph:
    vertices: tuple[LatticeClass, ...]
    edges: tuple[tuple[int, int], ...]
    center: int
    radius: int
    layers: tuple[int, ...] = ()

    def to_dot(self, labels: Sequence[str] | None = None) -> str:
        labels = labels or [str(i) for i in range(len(self.vertices))]
        lines = ["graph building {"]
        for i, lab in enumerate(labels):
            extra = ", shape=doublecircle" if i == self.center else ""
            lines.append(f'  v{i} [label="{lab}"{extra}];')
        for a, b in self.edges:
            lines.append(f"  v{a} -- v{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def ball(center: LatticeClass, radius: int, override: bool = False) -> BuildingGraph:
    """Breadth-first ball; vertices ordered by layer, then by canonical form."""
    if radius < 0:
        raise PreconditionError("radius must be nonnegative")
    if center.rank < 2:
        return BuildingGraph((center,), (), 0, radius, (0,))
    check_guardrails(center.n, center.p, override)
    dist = {center: 0}
    order = [center]
    layer = [center]
    nbr_cache: dict[LatticeClass, list[LatticeClass]] = {}
    for r in range(1, radius + 1):
        fresh = set()
        for v in layer:
            nbr_cache[v] = neighbors(v, override=True)
            for w in nbr_cache[v]:
                if w not in dist:
                    fresh.add(w)
        layer = sorted(fresh, key=LatticeClass.sort_key)
        for w in layer:
            dist[w] = r
        order.extend(layer)
        if not layer:
            break
    index = {v: i for i, v in enumerate(order)}
    edges = set()
    for v in order:
        nb = nbr_cache.get(v)
        if nb is None:
            nb = neighbors(v, override=True)
        for w in nb:
            j = index.get(w)
            if j is not None:
                a, b = sorted((index[v], j))
                edges.add((a, b))
    return BuildingGraph(tuple(order), tuple(sorted(edges)), 0, radius, tuple(dist[v] for v in order))


# --- apartment vertices ----------------------------------------------------

def phi(L: LatticeClass) -> ApartmentPoint:
    """Vertex of the compactified standard apartment attached to a diagonal class."""
    ex = L.diagonal_exponents()
    if ex is None:
        raise PreconditionError("phi needs a lattice diagonal in the standard basis")
    return ApartmentPoint.from_dict(L.n, {i: -k for i, k in sorted(ex.items())})


def phi_inv(x: ApartmentPoint, p: int) -> LatticeClass:
    if not x.is_vertex():
        raise PreconditionError("phi_inv needs integer coordinates (a vertex)")
    return LatticeClass.diagonal(x.n, p, {i: -int(c) for i, c in x.as_dict().items()})


# --- common apartments -----------------------------------------------------

@dataclass(frozen=True)
class Frame:
    """Basis f_1..f_n with exponents; y = [(+) p^{b_j} f_j], x = [(+)_{j in S} p^{a_j} f_j]."""

    vectors: Matrix
    subset: tuple[int, ...]
    x_exponents: tuple[int, ...]
    y_exponents: tuple[int, ...]

    def x_class(self, p: int) -> LatticeClass:
        cols = columns(self.vectors)
        return LatticeClass.from_basis(
            from_columns([[c * Fraction(p) ** a for c in cols[j]] for j, a in zip(self.subset, self.x_exponents)]), p
        )

    def y_class(self, p: int) -> LatticeClass:
        cols = columns(self.vectors)
        return LatticeClass.from_basis(
            from_columns([[c * Fraction(p) ** b for c in col] for col, b in zip(cols, self.y_exponents)]), p
        )


def common_frame(x: LatticeClass, y: LatticeClass) -> Frame:
    """A frame whose compactified apartment contains both x and the full-rank class y."""
    if x.p != y.p or x.n != y.n:
        raise PreconditionError("classes over different primes or dimensions")
    if y.rank != y.n:
        raise PreconditionError("y must be a full-rank class")
    p = x.p
    N = y.basis
    sat = intersect_saturate(N, x.basis, p)
    X = solve(sat, x.basis)
    U, D, V = smith_local(X, p)
    m = x.rank
    # x.basis = sat X and U X V = D, so x = sat U^{-1} D as lattices.
    g = matmul(sat, inverse(U))
    a = tuple(vval(D[i][i], p) for i in range(m))
    rest = complete(N, g, p)
    vectors = hstack(g, rest) if rest else g
    return Frame(vectors, tuple(range(m)), a, (0,) * y.n)


def verify_frame(frame: Frame, x: LatticeClass, y: LatticeClass) -> bool:
    p = x.p
    F = frame.vectors
    if rank(F) != len(F):
        return False
    return frame.y_class(p) == y and frame.x_class(p) == x
