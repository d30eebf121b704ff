"""Exact rational arithmetic over the local ring Z_(p).

Scalars are :class:`fractions.Fraction`.  Matrices are tuples of row tuples.
Valuations take values in the integers extended by :data:`INF` and
:data:`NEG_INF`; finite values stay plain ``int``/``Fraction`` so that the
usual comparison and addition operators work on mixed values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PreconditionError

Matrix = tuple[tuple[Fraction, ...], ...]


class _Infinity:
    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __repr__(self):
        return "inf" if self.sign > 0 else "-inf"

    __str__ = __repr__

    def __hash__(self):
        return hash(("btcompact-inf", self.sign))

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __le__(self, other):
        return self == other or self < other

    def __ge__(self, other):
        return self == other or self > other

    def __neg__(self):
        return NEG_INF if self.sign > 0 else INF

    def __add__(self, other):
        if isinstance(other, _Infinity) and other.sign != self.sign:
            raise ArithmeticError("inf + (-inf) is undefined")
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other


INF = _Infinity(1)
NEG_INF = _Infinity(-1)


def is_finite(value) -> bool:
    return not isinstance(value, _Infinity)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise PreconditionError(f"p must be prime (got {p!r})")
    return p


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point input is not accepted; use int, str or Fraction")
    return Fraction(x)


def _int_val(a: int, p: int) -> int:
    k = 0
    while a % p == 0:
        a //= p
        k += 1
    return k


def vval(q, p: int):
    """p-adic valuation of a rational; ``vval(0) == INF``."""
    q = to_fraction(q)
    if q == 0:
        return INF
    return _int_val(q.numerator, p) - _int_val(q.denominator, p)


def unit_part(q: Fraction, p: int) -> Fraction:
    """The unit ``u`` with ``q = p**vval(q) * u``."""
    return q / Fraction(p) ** vval(q, p)


def residue(q: Fraction, p: int, e: int) -> Fraction:
    """Canonical representative of ``q`` modulo ``p**e Z_(p)``.

    The result lies in ``[0, p**e)`` and in ``Z[1/p]``; it is an integer
    whenever ``q`` is p-integral and ``e >= 0``.
    """
    if q == 0:
        return Fraction(0)
    s = max(0, -vval(q, p))
    if e + s <= 0:
        return Fraction(0)
    mod = p ** (e + s)
    scaled = q * p**s
    n = (scaled.numerator * pow(scaled.denominator, -1, mod)) % mod
    return Fraction(n, p**s)


# --- plain matrix helpers -------------------------------------------------

def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(tuple(to_fraction(x) for x in row) for row in rows)
    if not out or not out[0]:
        raise PreconditionError("matrix dimensions must be positive")
    width = len(out[0])
    if any(len(r) != width for r in out):
        raise PreconditionError("ragged matrix")
    return out


def shape(A: Matrix) -> tuple[int, int]:
    return len(A), len(A[0])


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def diagonal(entries: Sequence) -> Matrix:
    n = len(entries)
    return tuple(
        tuple(to_fraction(entries[i]) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def transpose(A) -> Matrix:
    return tuple(zip(*A))


def matmul(A, B) -> Matrix:
    cols = list(zip(*B))
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols) for row in A)


def matvec(A, v) -> tuple[Fraction, ...]:
    return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in A)


def columns(A) -> list[tuple[Fraction, ...]]:
    return list(zip(*A))


def from_columns(cols: Sequence[Sequence[Fraction]]) -> Matrix:
    return tuple(zip(*cols))


def _row_reduce(A):
    """Reduced row echelon form of a copy of A; returns (R, pivot_columns)."""
    R = [list(r) for r in A]
    rows, cols = len(R), len(R[0])
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if pr is None:
            continue
        R[r], R[pr] = R[pr], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def rank(A) -> int:
    return len(_row_reduce(A)[1])


def det(A) -> Fraction:
    M = [list(r) for r in A]
    n = len(M)
    d = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if M[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            M[c], M[pr] = M[pr], M[c]
            d = -d
        d *= M[c][c]
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c] / M[c][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return d


def inverse(A) -> Matrix:
    n = len(A)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A)]
    R, piv = _row_reduce(aug)
    if piv[:n] != list(range(n)):
        raise PreconditionError("matrix is singular")
    return tuple(tuple(r[n:]) for r in R)


def solve(A, B) -> Matrix:
    """The unique X with A X = B, for A of full column rank.

    Raises PreconditionError if some column of B is outside the column
    span of A.
    """
    n, m = shape(A)
    k = len(B[0])
    aug = [list(A[i]) + list(B[i]) for i in range(n)]
    R, piv = _row_reduce(aug)
    if any(c >= m for c in piv):
        raise PreconditionError("vectors are not in the span of the basis")
    if piv != list(range(m)):
        raise PreconditionError("basis columns are linearly dependent")
    return tuple(tuple(R[i][m + j] for j in range(k)) for i in range(m))


def scale(A, c) -> Matrix:
    c = to_fraction(c)
    return tuple(tuple(x * c for x in row) for row in A)


def hstack(A, B) -> Matrix:
    return tuple(tuple(a) + tuple(b) for a, b in zip(A, B))


def select_columns(A, idx: Sequence[int]) -> Matrix:
    return tuple(tuple(row[j] for j in idx) for row in A)


# --- normal forms over Z_(p) ----------------------------------------------

def _echelon_columns(cols: list[list[Fraction]], p: int, n: int):
    """Column echelon form over Z_(p) of a generating set; zero columns dropped."""
    remaining = [list(c) for c in cols if any(c)]
    done: list[tuple[int, int, list[Fraction]]] = []
    for r in range(n):
        if not remaining:
            break
        cand = [k for k, c in enumerate(remaining) if c[r] != 0]
        if not cand:
            continue
        best = min(cand, key=lambda k: (vval(remaining[k][r], p), k))
        col = remaining.pop(best)
        e = vval(col[r], p)
        u = unit_part(col[r], p)
        col = [x / u for x in col]
        piv = col[r]
        nxt = []
        for c in remaining:
            if c[r] != 0:
                f = c[r] / piv
                c = [x - f * y for x, y in zip(c, col)]
            if any(c):
                nxt.append(c)
        remaining = nxt
        done.append((r, e, col))
    for idx, (r, e, col) in enumerate(done):
        for prev in range(idx):
            pc = done[prev][2]
            q = pc[r]
            rep = residue(q, p, e)
            if q != rep:
                lam = (q - rep) / Fraction(p) ** e
                done[prev] = (done[prev][0], done[prev][1], [x - lam * y for x, y in zip(pc, col)])
    return done


def hnf_local(A, p: int) -> Matrix:
    """Canonical column echelon basis of the Z_(p)-span of the columns of A.

    Pivots are exact powers of p (lowest row first); entries of a column in
    the pivot rows of later columns are reduced into ``[0, p**e)``.
    """
    A = as_matrix(A)
    n, m = shape(A)
    if rank(A) != m:
        raise PreconditionError("columns must be linearly independent (rank-deficient input)")
    done = _echelon_columns(columns(A), p, n)
    return from_columns([c for _, _, c in done])


def lattice_from_generators(A, p: int) -> Matrix:
    """hnf_local basis of the Z_(p)-module generated by arbitrary columns."""
    A = as_matrix(A)
    n, _ = shape(A)
    done = _echelon_columns(columns(A), p, n)
    if not done:
        raise PreconditionError("generators span the zero module")
    return from_columns([c for _, _, c in done])


def pivot_data(B: Matrix, p: int) -> list[tuple[int, int]]:
    """(pivot row, pivot exponent) per column of an hnf_local basis."""
    out = []
    for col in columns(B):
        r = next(i for i, x in enumerate(col) if x != 0)
        out.append((r, vval(col[r], p)))
    return out


def smith_local(A, p: int):
    """Smith form over Z_(p): returns (U, D, V) with U A V = D.

    U and V are invertible over Z_(p); D is diagonal with entries
    ``p**d_1, p**d_2, ...`` in nondecreasing exponent order, then zeros.
    """
    A = as_matrix(A)
    r, c = shape(A)
    M = [list(row) for row in A]
    U = [list(row) for row in identity(r)]
    V = [list(row) for row in identity(c)]
    for t in range(min(r, c)):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if M[i][j] != 0:
                    key = (vval(M[i][j], p), i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        _, i, j = best
        M[t], M[i] = M[i], M[t]
        U[t], U[i] = U[i], U[t]
        for row in M:
            row[t], row[j] = row[j], row[t]
        for row in V:
            row[t], row[j] = row[j], row[t]
        u = unit_part(M[t][t], p)
        M[t] = [x / u for x in M[t]]
        U[t] = [x / u for x in U[t]]
        piv = M[t][t]
        for i in range(t + 1, r):
            if M[i][t] != 0:
                f = M[i][t] / piv
                M[i] = [x - f * y for x, y in zip(M[i], M[t])]
                U[i] = [x - f * y for x, y in zip(U[i], U[t])]
        for j in range(t + 1, c):
            if M[t][j] != 0:
                f = M[t][j] / piv
                for row in M:
                    row[j] -= f * row[t]
                for row in V:
                    row[j] -= f * row[t]
    return (tuple(map(tuple, U)), tuple(map(tuple, M)), tuple(map(tuple, V)))


def elementary_divisors(C, p: int) -> list[int]:
    """Valuations of the Smith invariants of a square invertible matrix over Z_(p)."""
    C = as_matrix(C)
    n, m = shape(C)
    if n != m:
        raise PreconditionError("elementary_divisors needs a square matrix")
    _, D, _ = smith_local(C, p)
    if any(D[i][i] == 0 for i in range(n)):
        raise PreconditionError("matrix is singular")
    return sorted(vval(D[i][i], p) for i in range(n))


def is_unimodular(C, p: int) -> bool:
    """True iff C is square with p-integral entries and a unit determinant."""
    C = as_matrix(C)
    if len(C) != len(C[0]):
        return False
    if any(x != 0 and vval(x, p) < 0 for row in C for x in row):
        return False
    d = det(C)
    return d != 0 and vval(d, p) == 0


def _coords_in(L, W) -> Matrix:
    L, W = as_matrix(L), as_matrix(W)
    if len(L) != len(W):
        raise PreconditionError("ambient dimensions differ")
    try:
        return solve(L, W)
    except PreconditionError:
        raise PreconditionError("W is not inside span(L)") from None


def intersect_saturate(L, W, p: int) -> Matrix:
    """A Z_(p)-basis of the saturated sublattice L ∩ W (W given by spanning columns)."""
    X = _coords_in(L, W)
    d = rank(X)
    if d == 0:
        raise PreconditionError("W must be a nonzero subspace")
    U, _, _ = smith_local(X, p)
    P = inverse(U)
    return matmul(as_matrix(L), select_columns(P, range(d)))


def complete(L, sub, p: int) -> Matrix:
    """Columns extending a saturated sub-basis ``sub`` to a Z_(p)-basis of L.

    Returns only the new columns; ``hstack(sub, complete(L, sub, p))`` is
    then a basis of L.
    """
    L = as_matrix(L)
    X = _coords_in(L, sub)
    d = len(X[0])
    if rank(X) != d:
        raise PreconditionError("sub-basis vectors are linearly dependent")
    U, D, _ = smith_local(X, p)
    if any(vval(D[i][i], p) != 0 for i in range(d)):
        raise PreconditionError("sub-basis is not saturated in L")
    m = len(L[0])
    if d == m:
        return ()
    P = inverse(U)
    return matmul(L, select_columns(P, range(d, m)))


def lattice_intersection(A, B, p: int) -> Matrix:
    """Intersection of two full-rank lattices, via duality (A ∩ B)* = A* + B*."""
    A, B = as_matrix(A), as_matrix(B)
    dual_a = transpose(inverse(A))
    dual_b = transpose(inverse(B))
    s = lattice_from_generators(hstack(dual_a, dual_b), p)
    return hnf_local(transpose(inverse(s)), p)


def format_rat(q) -> str:
    if not is_finite(q):
        return str(q)
    q = to_fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, bool):
        raise ValueError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise ValueError(f"not a rational: {s!r}")
    return Fraction(s.strip())


def parse_ext(s):
    if isinstance(s, str) and s.strip() in ("inf", "+inf"):
        return INF
    if isinstance(s, str) and s.strip() == "-inf":
        return NEG_INF
    return parse_rat(s)
