"""The compactified standard apartment.

A point lives in one stratum ``Lambda_I`` (``I`` a nonempty subset of
``{1..n}``) and is written ``sum_{i in I} x_i eta_i^I`` with rational
coordinates modulo a common constant; we store them normalized to
``min x_i = 0``.  Roots evaluate as ``a_ij(x) = x_i - x_j``.  The vertex
attached to the diagonal lattice ``(+) p^{k_i} R v_i`` has ``x_i = -k_i``.

Basic open sets are expressed in the chart ``(x_1 - x_n, ..., x_{n-1} - x_n)``
of the interior.  The corner ``D_I`` is the cone spanned by ``-eta_l`` for
``l`` outside ``I``; moving along it sends ``x_l`` to ``-infinity`` and the
point converges into ``Lambda_I``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import fme
from .errors import PreconditionError
from .fme import Constraint, Laurent
from .local_arith import INF, NEG_INF, is_finite, to_fraction


@dataclass(frozen=True)
class ApartmentPoint:
    n: int
    support: tuple[int, ...]
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        support = tuple(self.support)
        coords = tuple(to_fraction(c) for c in self.coords)
        if not support:
            raise PreconditionError("support must be nonempty")
        if len(support) != len(coords):
            raise PreconditionError("support and coords differ in length")
        if len(set(support)) != len(support) or any(not 1 <= i <= self.n for i in support):
            raise PreconditionError(f"support must be distinct indices in 1..{self.n}")
        order = sorted(range(len(support)), key=support.__getitem__)
        support = tuple(support[k] for k in order)
        coords = tuple(coords[k] for k in order)
        m = min(coords)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "coords", tuple(c - m for c in coords))

    @classmethod
    def from_dict(cls, n: int, coords: Mapping[int, object]) -> "ApartmentPoint":
        return cls(n, tuple(coords), tuple(coords.values()))

    @classmethod
    def interior(cls, coords: Sequence) -> "ApartmentPoint":
        n = len(coords)
        return cls(n, tuple(range(1, n + 1)), tuple(coords))

    @classmethod
    def origin(cls, n: int, support: Iterable[int] | None = None) -> "ApartmentPoint":
        support = tuple(range(1, n + 1)) if support is None else tuple(support)
        return cls(n, support, (0,) * len(support))

    def __getitem__(self, i: int) -> Fraction:
        try:
            return self.coords[self.support.index(i)]
        except ValueError:
            raise KeyError(i) from None

    def as_dict(self) -> dict[int, Fraction]:
        return dict(zip(self.support, self.coords))

    @property
    def is_interior(self) -> bool:
        return len(self.support) == self.n

    def is_vertex(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def chart(self) -> tuple[Fraction, ...]:
        """Coordinates ``x_m - x_n`` for m < n; interior points only."""
        if not self.is_interior:
            raise PreconditionError("chart coordinates exist only for interior points")
        last = self.coords[-1]
        return tuple(c - last for c in self.coords[:-1])

    @classmethod
    def from_chart(cls, chart: Sequence) -> "ApartmentPoint":
        return cls.interior(tuple(chart) + (0,))


def _full(n):
    return tuple(range(1, n + 1))


def project(x: ApartmentPoint, I: Iterable[int]) -> ApartmentPoint:
    I = tuple(sorted(set(I)))
    if not I:
        raise PreconditionError("projection target must be nonempty")
    if not set(I) <= set(x.support):
        raise PreconditionError(f"projection target {I} is not inside support {x.support}")
    return ApartmentPoint(x.n, I, tuple(x[i] for i in I))


def _check_root(a, n):
    i, j = a
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise PreconditionError(f"invalid root {a} for n={n}")
    return i, j


def root_eval(a, x: ApartmentPoint) -> Fraction:
    i, j = _check_root(a, x.n)
    if i not in x.support or j not in x.support:
        raise PreconditionError("root indices must lie in the support; use f_value")
    return x[i] - x[j]


def f_value(a, x: ApartmentPoint):
    """Closed-form level of the root-group filtration at x."""
    i, j = _check_root(a, x.n)
    if j not in x.support:
        return NEG_INF
    if i not in x.support:
        return INF
    return -(x[i] - x[j])


def f_set(a, omega: Iterable[ApartmentPoint]):
    omega = list(omega)
    if not omega:
        raise PreconditionError("f_set needs a nonempty set of points")
    return max((f_value(a, x) for x in omega), key=_ext_key)


def _ext_key(v):
    if v is INF:
        return (2, 0)
    if v is NEG_INF:
        return (0, 0)
    return (1, v)


# --- neighbourhoods -------------------------------------------------------

@dataclass(frozen=True)
class Box:
    """Open rational box in the chart of the interior."""

    intervals: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        iv = tuple((to_fraction(lo), to_fraction(hi)) for lo, hi in self.intervals)
        if any(lo >= hi for lo, hi in iv):
            raise PreconditionError("box intervals must be nonempty")
        object.__setattr__(self, "intervals", iv)

    @property
    def n(self) -> int:
        return len(self.intervals) + 1

    @classmethod
    def around(cls, center: Sequence, radius) -> "Box":
        r = to_fraction(radius)
        return cls(tuple((to_fraction(c) - r, to_fraction(c) + r) for c in center))


@dataclass(frozen=True)
class Corner:
    """The basic set ``C^I_U``: ``U + D_I`` plus its projections to every J ⊇ I."""

    I: tuple[int, ...]
    box: Box

    def __post_init__(self):
        I = tuple(sorted(set(self.I)))
        if not I or len(I) >= self.box.n:
            raise PreconditionError("corner index set must be a proper nonempty subset")
        object.__setattr__(self, "I", I)


NeighborhoodSpec = Box | Corner


def _cone_vector(l: int, n: int) -> list[int]:
    """Chart coordinates of -eta_l."""
    return [(-1 if m == l else 0) + (1 if l == n else 0) for m in range(1, n)]


def _corner_system(corner: Corner, extra: int = 0):
    """Constraints for ``u in U, mu >= 0``; variables u (n-1), mu, then ``extra`` more."""
    n = corner.box.n
    outside = [l for l in _full(n) if l not in corner.I]
    nv = n - 1 + len(outside) + extra
    cons = []
    for m, (lo, hi) in enumerate(corner.box.intervals):
        e = [0] * nv
        e[m] = 1
        cons.append(Constraint(tuple(e), -lo, True))
        e = [0] * nv
        e[m] = -1
        cons.append(Constraint(tuple(e), hi, True))
    for t in range(len(outside)):
        e = [0] * nv
        e[n - 1 + t] = 1
        cons.append(Constraint(tuple(e), 0))
    return cons, outside, nv


def _chart_expr(corner: Corner, outside, nv):
    """Linear forms (coeffs, const) for the chart coordinates of ``u + sum mu_l (-eta_l)``."""
    n = corner.box.n
    exprs = []
    for m in range(n - 1):
        e = [0] * nv
        e[m] = 1
        for t, l in enumerate(outside):
            e[n - 1 + t] += _cone_vector(l, n)[m]
        exprs.append(e)
    return exprs


def _equal(cons, coeffs, const):
    cons.append(Constraint(tuple(coeffs), const))
    cons.append(Constraint(tuple(-c for c in coeffs), -const))


def nbhd_contains(spec: NeighborhoodSpec, x: ApartmentPoint) -> bool:
    if isinstance(spec, Box):
        if spec.n != x.n:
            raise PreconditionError("dimension mismatch")
        if not x.is_interior:
            return False
        return all(lo < c < hi for c, (lo, hi) in zip(x.chart(), spec.intervals))
    n = spec.box.n
    if n != x.n:
        raise PreconditionError("dimension mismatch")
    J = x.support
    if not set(spec.I) <= set(J):
        return False
    cons, outside, nv = _corner_system(spec)
    exprs = _chart_expr(spec, outside, nv)
    exprs.append([0] * nv)  # chart coordinate of index n is identically 0
    if len(J) == n:
        for m, c in enumerate(x.chart()):
            _equal(cons, exprs[m], -c)
    else:
        j0 = J[0]
        for j in J[1:]:
            lhs = [a - b for a, b in zip(exprs[j - 1], exprs[j0 - 1])]
            _equal(cons, lhs, -(x[j] - x[j0]))
    return fme.feasible(cons)


def _lift(x: ApartmentPoint) -> ApartmentPoint:
    """The interior point agreeing with x on its support and 0 elsewhere."""
    vals = {i: Fraction(0) for i in _full(x.n)}
    vals.update(x.as_dict())
    return ApartmentPoint.interior(tuple(vals[i] for i in _full(x.n)))


def fundamental_nbhd(x: ApartmentPoint, k: int) -> NeighborhoodSpec:
    """k-th member (k >= 1) of the canonical countable neighbourhood basis of x."""
    if k < 1:
        raise PreconditionError("neighbourhood index starts at 1")
    z = _lift(x).chart()
    r = Fraction(1, k)
    if x.is_interior:
        return Box.around(z, r)
    n = x.n
    shift = [0] * (n - 1)
    for l in _full(n):
        if l not in x.support:
            shift = [s + k * g for s, g in zip(shift, _cone_vector(l, n))]
    return Corner(x.support, Box.around([a + b for a, b in zip(z, shift)], r))


def f_value_oracle(a, x: ApartmentPoint):
    """f_x(a) computed from the closure definition.

    The k-th canonical neighbourhood meets ``{a >= s}`` iff a linear system
    in the box offsets, cone multipliers and ``s`` is feasible.  The system
    is solved by Fourier-Motzkin with ``k`` kept symbolic (coefficients are
    Laurent polynomials in k), giving the exact supremum of admissible
    ``s`` as k grows; f is minus its limit.
    """
    i, j = _check_root(a, x.n)
    n = x.n
    z = _lift(x).chart()
    outside = [l for l in _full(n) if l not in x.support]
    nd, nm = n - 1, len(outside)
    nv = nd + nm + 1
    s_var = nv - 1
    eps = Laurent.k(-1)
    kk = Laurent.k(1)
    cons = []
    for m in range(nd):
        e = [0] * nv
        e[m] = 1
        cons.append(Constraint(tuple(e), eps, True))
        e = [0] * nv
        e[m] = -1
        cons.append(Constraint(tuple(e), eps, True))
    for t in range(nm):
        e = [0] * nv
        e[nd + t] = 1
        cons.append(Constraint(tuple(e), Fraction(0)))

    def chart_coord(m):  # 1-based m; returns (coeffs, const)
        e = [0] * nv
        if m == n:
            return e, Fraction(0)
        const = Laurent(z[m - 1])
        e[m - 1] = 1
        for t, l in enumerate(outside):
            g = _cone_vector(l, n)[m - 1]
            e[nd + t] += g
            const = const + kk * g
        return e, const

    ci, ki = chart_coord(i)
    cj, kj = chart_coord(j)
    coeffs = [u - v for u, v in zip(ci, cj)]
    coeffs[s_var] = -1
    cons.append(Constraint(tuple(coeffs), ki - kj))
    ok, _, uppers = fme.bounds(cons, s_var)
    if not ok:
        return INF
    if not uppers:
        return NEG_INF
    limits = [fme.ratio_limit(num, den) for num, den, _ in uppers]
    lim = min(limits, key=_ext_key)
    return -lim


# --- rays and limits -------------------------------------------------------

@dataclass(frozen=True)
class RaySpec:
    """The ray ``k -> base - k * direction`` (k >= 0) in the interior."""

    base: ApartmentPoint
    direction: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.base.is_interior:
            raise PreconditionError("ray base must be an interior point")
        d = tuple(to_fraction(c) for c in self.direction)
        if len(d) != self.base.n:
            raise PreconditionError("direction length must equal n")
        m = min(d)
        object.__setattr__(self, "direction", tuple(c - m for c in d))

    def point(self, k) -> ApartmentPoint:
        k = to_fraction(k)
        return ApartmentPoint.interior(tuple(b - k * d for b, d in zip(self.base.coords, self.direction)))


def ray_limit(r: RaySpec) -> ApartmentPoint:
    I = tuple(i for i, d in zip(_full(r.base.n), r.direction) if d == 0)
    return project(r.base, I)


def ray_tail_start(r: RaySpec, spec: NeighborhoodSpec):
    """Least integer k0 >= 0 with ray(k) in ``spec`` for every k >= k0, or None.

    Membership of the tail follows from membership at k0 because the ray
    direction lies in the recession cone of ``U + D_I`` whenever the ray's
    limit lies in ``Lambda_I``; :func:`ray_tail_certificate` checks both.
    """
    n = r.base.n
    if isinstance(spec, Box):
        if any(r.direction):
            return None
        return 0 if nbhd_contains(spec, r.base) else None
    cons, outside, nv = _corner_system(spec, extra=1)
    kv = nv - 1
    exprs = _chart_expr(spec, outside, nv)
    chart_b = r.base.chart()
    dn = r.direction[-1]
    for m in range(n - 1):
        lhs = list(exprs[m])
        lhs[kv] = r.direction[m] - dn
        _equal(cons, lhs, -chart_b[m])
    e = [0] * nv
    e[kv] = 1
    cons.append(Constraint(tuple(e), Fraction(0)))
    ok, lowers, uppers = fme.bounds(cons, kv)
    if not ok or uppers:
        return None
    k0 = 0
    for num, den, strict in lowers:
        b = Fraction(num) / Fraction(den)
        c = math.floor(b) + 1 if strict else math.ceil(b)
        k0 = max(k0, c)
    return k0


def ray_tail_certificate(r: RaySpec, spec: NeighborhoodSpec) -> int | None:
    """k0 together with an exact check that ray(k0) is in ``spec`` and the
    ray direction is a recession direction of the set."""
    k0 = ray_tail_start(r, spec)
    if k0 is None or not nbhd_contains(spec, r.point(k0)):
        return None
    if isinstance(spec, Corner):
        outside = set(_full(r.base.n)) - set(spec.I)
        if any(d != 0 for i, d in zip(_full(r.base.n), r.direction) if i not in outside):
            return None
    return k0


@dataclass(frozen=True)
class LatticeSeqSpec:
    """``M_k = (+) p^{b_i + k d_i} R v_i``; slopes nonnegative with minimum 0."""

    p: int
    base: tuple[int, ...]
    slopes: tuple[int, ...]

    def __post_init__(self):
        if len(self.base) != len(self.slopes):
            raise PreconditionError("base and slopes differ in length")
        if any(not isinstance(v, int) for v in self.base + self.slopes):
            raise PreconditionError("lattice sequence exponents must be integers")
        if any(d < 0 for d in self.slopes) or min(self.slopes) != 0:
            raise PreconditionError("slopes must be nonnegative with minimum 0")

    @property
    def n(self) -> int:
        return len(self.base)

    def exponents(self, k: int) -> tuple[int, ...]:
        return tuple(b + k * d for b, d in zip(self.base, self.slopes))

    def coordinate_ray(self) -> RaySpec:
        base = ApartmentPoint.interior(tuple(-b for b in self.base))
        return RaySpec(base, self.slopes)


def lattice_seq_limit(s: LatticeSeqSpec):
    from .lattice_building import LatticeClass

    I = [i for i, d in enumerate(s.slopes) if d == 0]
    basis = [[0] * len(I) for _ in range(s.n)]
    for c, i in enumerate(I):
        basis[i][c] = Fraction(s.p) ** s.base[i]
    return LatticeClass.from_basis(basis, s.p)


# --- corners, chart, contraction -----------------------------------------

def in_corner(i: int, x: ApartmentPoint) -> bool:
    """Membership in the closed corner E_i: i in the support with x_i maximal."""
    if i not in x.support:
        return False
    return x[i] == max(x.coords)


def corners_of(x: ApartmentPoint) -> list[int]:
    return [i for i in x.support if in_corner(i, x)]


def corner_chart(i: int, x: ApartmentPoint) -> dict[int, object]:
    """The chart of E_i into ``[0, inf]^{n-1}``, keyed by j != i."""
    if not in_corner(i, x):
        raise PreconditionError(f"point is not in the corner E_{i}")
    xi = x[i]
    return {j: (xi - x[j] if j in x.support else INF) for j in _full(x.n) if j != i}


def corner_chart_inv(i: int, chart: Mapping[int, object], n: int) -> ApartmentPoint:
    if set(chart) != set(_full(n)) - {i}:
        raise PreconditionError(f"chart must be keyed by all j != {i}")
    vals = {i: Fraction(0)}
    for j, v in chart.items():
        if is_finite(v):
            v = to_fraction(v)
            if v < 0:
                raise PreconditionError("chart entries must be nonnegative")
            vals[j] = -v
    return ApartmentPoint.from_dict(n, dict(sorted(vals.items())))


def _half_line_contraction(v, t: Fraction):
    if not is_finite(v):
        return INF if t == 0 else (1 - t) / t
    return (1 - t) * v / (1 + t * v)


def contract(x: ApartmentPoint, t) -> ApartmentPoint:
    """Contraction of the compactified apartment onto the origin, 0 <= t <= 1.

    Computed in the chart of the least corner containing x, applying the
    half-line contraction ``(1-t)v/(1+tv)`` (and ``(1-t)/t`` at infinity)
    coordinatewise.
    """
    t = to_fraction(t)
    if not 0 <= t <= 1:
        raise PreconditionError("contraction parameter must lie in [0, 1]")
    if t == 0:
        return x
    i = corners_of(x)[0]
    ch = corner_chart(i, x)
    vals = [Fraction(0)] * x.n
    for j, v in ch.items():
        vals[j - 1] = -_half_line_contraction(v, t)
    return ApartmentPoint.interior(tuple(vals))


# --- N-action ---------------------------------------------------------------

def act_monomial(elt, x: ApartmentPoint) -> ApartmentPoint:
    """Action of the monomial element ``v_i -> p^{t_i} v_{sigma(i)}``.

    ``elt`` needs ``perm`` (``perm[i-1] = sigma(i)``) and ``vals``.
    """
    perm, vals = elt.perm, elt.vals
    if len(perm) != x.n:
        raise PreconditionError("monomial element has the wrong size")
    new = {perm[i - 1]: x[i] - vals[i - 1] for i in x.support}
    return ApartmentPoint.from_dict(x.n, new)
