"""Randomized property suites with exact pass/fail outcomes.

Each ``criterion_*`` function takes a :class:`random.Random` and a sample
count and returns a :class:`SuiteResult`.  :func:`run_all` drives them in a
fixed order, so a fixed seed reproduces the report byte for byte.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .apartment import (
    ApartmentPoint,
    LatticeSeqSpec,
    RaySpec,
    act_monomial,
    contract,
    corner_chart,
    corner_chart_inv,
    corners_of,
    f_set,
    f_value,
    f_value_oracle,
    fundamental_nbhd,
    lattice_seq_limit,
    nbhd_contains,
    ray_limit,
    ray_tail_certificate,
)
from .group_action import (
    MonomialElement,
    RootGroupElement,
    conjugate_root_group,
    in_U_ax,
    psi,
    stabilizes,
)
from .lattice_building import (
    LatticeClass,
    ball,
    common_frame,
    neighbors,
    phi,
    phi_inv,
    verify_frame,
)
from .local_arith import (
    INF,
    NEG_INF,
    Matrix,
    columns,
    det,
    from_columns,
    inverse,
    is_finite,
    lattice_intersection,
    matmul,
    rank,
    smith_local,
    solve,
    vval,
)
from .norm_points import from_apartment, from_lattice, np_equal, to_lattice

PRIMES = (2, 3, 5)


@dataclass
class SuiteResult:
    number: int
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.failures

    def check(self, ok: bool, what: str):
        self.checked += 1
        if not ok and len(self.failures) < 10:
            self.failures.append(what)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] criterion {self.number:2d}: {self.name} ({self.checked} checks)"
        if self.failures:
            text += f"; first failure: {self.failures[0]}"
        return text


# --- samplers ----------------------------------------------------------------

def random_rational(rng: random.Random, bound: int = 4, dens=(1, 1, 2, 3)) -> Fraction:
    d = rng.choice(dens)
    return Fraction(rng.randint(-bound * d, bound * d), d)


def random_support(rng: random.Random, n: int, full: bool = False) -> tuple[int, ...]:
    if full:
        return tuple(range(1, n + 1))
    size = rng.randint(1, n)
    return tuple(sorted(rng.sample(range(1, n + 1), size)))


def random_point(rng: random.Random, n: int, support=None, integral: bool = False) -> ApartmentPoint:
    if support is None:
        support = random_support(rng, n)
    if integral:
        coords = tuple(rng.randint(-4, 4) for _ in support)
    else:
        coords = tuple(random_rational(rng) for _ in support)
    return ApartmentPoint(n, tuple(support), coords)


def random_unit(rng: random.Random, p: int) -> Fraction:
    def prime_to_p():
        while True:
            a = rng.randint(1, 3 * p)
            if a % p:
                return a

    return Fraction(rng.choice((1, -1)) * prime_to_p(), prime_to_p())


def random_diagonal_class(rng: random.Random, n: int, p: int, r: int) -> LatticeClass:
    support = sorted(rng.sample(range(1, n + 1), r))
    return LatticeClass.diagonal(n, p, {i: rng.randint(-3, 3) for i in support})


def random_full_rank(rng: random.Random, rows: int, cols: int, p: int) -> Matrix:
    """Random rational matrix of full column rank with p-power entries mixed in."""
    while True:
        M = tuple(
            tuple(Fraction(rng.randint(-3, 3)) * Fraction(p) ** rng.randint(-1, 2) for _ in range(cols))
            for _ in range(rows)
        )
        if rank(M) == cols:
            return M


def random_lattice(rng: random.Random, n: int, p: int, r: int) -> LatticeClass:
    return LatticeClass.from_basis(random_full_rank(rng, n, r, p), p)


def random_monomial(rng: random.Random, n: int, zero_vals: bool = False) -> MonomialElement:
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    vals = (0,) * n if zero_vals else tuple(rng.randint(-3, 3) for _ in range(n))
    return MonomialElement(tuple(perm), vals)


def random_root(rng: random.Random, n: int) -> tuple[int, int]:
    i, j = rng.sample(range(1, n + 1), 2)
    return i, j


def random_omega(rng: random.Random, p: int, center=0) -> Fraction:
    """Nonzero rational whose valuation lands near ``center``."""
    if not is_finite(center):
        center = 0
    e = int(center) + rng.randint(-2, 2)
    return random_unit(rng, p) * Fraction(p) ** e


# --- criteria ----------------------------------------------------------------

def criterion_tree(rng: random.Random, count: int = 3) -> SuiteResult:
    """Radius-``count`` balls of the tree for p in 2, 3, 5."""
    res = SuiteResult(1, "tree regularity and ball sizes")
    radius = count
    for p in PRIMES:
        g = ball(LatticeClass.standard(2, p), radius)
        for v in g.vertices:
            res.check(len(set(neighbors(v))) == p + 1, f"p={p}: vertex degree != {p + 1}")
        for r in range(radius + 1):
            size = sum(1 for d in g.layers if d <= r)
            expected = 1 + (p + 1) * (p**r - 1) // (p - 1)
            res.check(size == expected, f"p={p}, r={r}: ball size {size} != {expected}")
        degree = [0] * len(g.vertices)
        for a, b in g.edges:
            degree[a] += 1
            degree[b] += 1
        inner = [d for d, lay in zip(degree, g.layers) if lay < radius]
        res.check(all(d == p + 1 for d in inner), f"p={p}: inner vertex degree in graph")
        res.check(len(g.edges) == len(g.vertices) - 1, f"p={p}: ball is not a tree")
    return res


def criterion_bijection(rng: random.Random, count: int = 500) -> SuiteResult:
    res = SuiteResult(2, "vertex-lattice bijection")
    for n in (3, 4):
        p = rng.choice(PRIMES)
        for r in range(1, n + 1):
            for _ in range(count):
                L = random_diagonal_class(rng, n, p, r)
                x = phi(L)
                res.check(phi_inv(x, p) == L, f"phi_inv(phi(L)) != L for {L.basis}")
                y = random_point(rng, n, support=x.support, integral=True)
                res.check(phi(phi_inv(y, p)) == y, f"phi(phi_inv(y)) != y for {y}")
                M = random_lattice(rng, n, p, r)
                res.check(to_lattice(from_lattice(M)) == M, f"to_lattice(from_lattice(M)) != M for {M.basis}")
                nx = from_apartment(y, p)
                res.check(np_equal(from_lattice(to_lattice(nx)), nx), f"norm round trip failed for {y}")
                res.check(np_equal(from_lattice(phi_inv(y, p)), nx), f"from_lattice(phi_inv) vs from_apartment for {y}")
    return res


def stable_intersection(s: LatticeSeqSpec, K: int) -> LatticeClass:
    """Oracle: intersect M_0..M_{K+1} symbolically, keep the part that no longer shrinks."""
    def M(k):
        e = s.exponents(k)
        return tuple(tuple(Fraction(s.p) ** e[r] if r == c else Fraction(0) for c in range(s.n)) for r in range(s.n))

    N = M(0)
    for k in range(1, K + 1):
        N = lattice_intersection(N, M(k), s.p)
    N_next = lattice_intersection(N, M(K + 1), s.p)
    X = solve(N, N_next)
    U, D, _ = smith_local(X, s.p)
    frame = matmul(N, inverse(U))
    keep = [c for c in range(s.n) if vval(D[c][c], s.p) == 0]
    cols = columns(frame)
    return LatticeClass.from_basis(from_columns([cols[c] for c in keep]), s.p)


def random_seq(rng: random.Random, n: int, p: int) -> LatticeSeqSpec:
    slopes = [rng.randint(0, 3) for _ in range(n)]
    slopes[rng.randrange(n)] = 0
    return LatticeSeqSpec(p, tuple(rng.randint(-3, 3) for _ in range(n)), tuple(slopes))


def criterion_lattice_limits(rng: random.Random, count: int = 200) -> SuiteResult:
    res = SuiteResult(3, "lattice sequence limits")
    for _ in range(count):
        n = rng.randint(2, 4)
        s = random_seq(rng, n, rng.choice(PRIMES))
        L = lattice_seq_limit(s)
        K = rng.randint(1, 4)
        res.check(stable_intersection(s, K) == L, f"limit != stable intersection for {s}")
        res.check(stable_intersection(s, K + 1) == L, f"intersection not stabilized for {s}")
        res.check(phi(L) == ray_limit(s.coordinate_ray()), f"phi(limit) != ray_limit for {s}")
    return res


def criterion_f_oracle(rng: random.Random, count: int = 500) -> SuiteResult:
    res = SuiteResult(4, "f_value agrees with the closure oracle")
    for _ in range(count):
        n = rng.randint(2, 4)
        x = random_point(rng, n)
        for a in itertools.permutations(range(1, n + 1), 2):
            res.check(f_value(a, x) == f_value_oracle(a, x), f"root {a} at {x}")
    return res


def random_ray(rng: random.Random, n: int) -> RaySpec:
    base = random_point(rng, n, support=random_support(rng, n, full=True))
    d = [Fraction(rng.randint(0, 3), rng.choice((1, 2))) for _ in range(n)]
    if rng.random() < 0.1:
        d = [0] * n
    return RaySpec(base, tuple(d))


def criterion_ray_tails(rng: random.Random, count: int = 100) -> SuiteResult:
    res = SuiteResult(5, "ray tails inside basic neighbourhoods")
    for _ in range(count):
        r = random_ray(rng, rng.randint(2, 4))
        lim = ray_limit(r)
        for k in range(1, 6):
            spec = fundamental_nbhd(lim, k)
            k0 = ray_tail_certificate(r, spec)
            res.check(k0 is not None, f"no tail certificate for {r} in nbhd {k}")
            if k0 is not None:
                later = (k0, k0 + 1, k0 + 7, k0 + 100)
                res.check(all(nbhd_contains(spec, r.point(j)) for j in later), f"tail sample escapes for {r}")
    return res


def criterion_corners(rng: random.Random, count: int = 500) -> SuiteResult:
    res = SuiteResult(6, "corner cover and chart")
    for _ in range(count):
        n = rng.randint(2, 4)
        x = random_point(rng, n)
        cs = corners_of(x)
        res.check(bool(cs), f"{x} lies in no corner")
        for i in cs:
            ch = corner_chart(i, x)
            res.check(corner_chart_inv(i, ch, n) == x, f"chart round trip at {x}, i={i}")
            infinite = {j for j, v in ch.items() if v is INF}
            res.check(infinite == set(range(1, n + 1)) - set(x.support), f"infinity pattern at {x}")
        i = rng.randint(1, n)
        ch = {j: (INF if rng.random() < 0.3 else abs(random_rational(rng))) for j in range(1, n + 1) if j != i}
        y = corner_chart_inv(i, ch, n)
        res.check(corner_chart(i, y) == ch, f"inverse chart round trip for {ch}")
    return res


def criterion_contraction(rng: random.Random, count: int = 200) -> SuiteResult:
    res = SuiteResult(7, "contraction")
    for _ in range(count):
        n = rng.randint(2, 4)
        x = random_point(rng, n)
        res.check(contract(x, 0) == x, f"r(x,0) != x at {x}")
        res.check(contract(x, 1) == ApartmentPoint.origin(n), f"r(x,1) != origin at {x}")
        t = Fraction(rng.randint(1, 9), 10)
        y = contract(x, t)
        res.check(y.is_interior, f"r(x,{t}) not interior at {x}")
        w = random_monomial(rng, n, zero_vals=True)
        res.check(act_monomial(w, y) == contract(act_monomial(w, x), t), f"equivariance fails at {x}, t={t}")
    return res


def criterion_conjugation(rng: random.Random, count: int = 500) -> SuiteResult:
    res = SuiteResult(8, "conjugation covariance")
    for _ in range(count):
        n = rng.randint(2, 4)
        p = rng.choice(PRIMES)
        x = random_point(rng, n)
        a = random_root(rng, n)
        u = RootGroupElement(*a, random_omega(rng, p, f_value(a, x)))
        m = random_monomial(rng, n)
        before = in_U_ax(u, x, p)
        after = in_U_ax(conjugate_root_group(m, u, p), act_monomial(m, x), p)
        res.check(before == after, f"covariance fails for {m}, {u}, {x}")
        lhs = m.to_proj(p) * u.to_proj(n) * m.inverse().to_proj(p)
        res.check(lhs == conjugate_root_group(m, u, p).to_proj(n), f"conjugate differs from n u n^-1 for {m}, {u}")
    return res


def _point_for_case(rng, n, case):
    """Point and root realizing the requested closed-form case."""
    while True:
        x = random_point(rng, n)
        i, j = random_root(rng, n)
        I = x.support
        if case == "i" and j not in I:
            return x, (i, j)
        if case == "ii" and j in I and i not in I:
            return x, (i, j)
        if case == "iii" and i in I and j in I:
            return x, (i, j)


def criterion_stabilizers(rng: random.Random, count: int = 500) -> SuiteResult:
    res = SuiteResult(9, "stabilizer consistency")
    for case in ("i", "ii", "iii"):
        for _ in range(count):
            n = rng.randint(2, 4)
            p = rng.choice(PRIMES)
            x, a = _point_for_case(rng, n, case)
            u = RootGroupElement(*a, random_omega(rng, p, f_value(a, x)))
            stab = stabilizes(u.to_proj(n), from_apartment(x, p))
            res.check(in_U_ax(u, x, p) == stab, f"case ({case}): membership vs stabilizer for {u}, {x}")
            if case == "i":
                res.check(stab, f"case (i): {u} should fix {x}")
            elif case == "ii":
                res.check(not stab, f"case (ii): {u} should move {x}")
            else:
                res.check(stab == (psi(u, p) >= -(x[a[0]] - x[a[1]])), f"case (iii) threshold for {u}, {x}")
    return res


def criterion_subadditivity(rng: random.Random, count: int = 500) -> SuiteResult:
    """``count`` sets Omega on which at least one of the two clauses applies."""
    res = SuiteResult(10, "subadditivity of f_Omega")
    applicable = 0
    while applicable < count:
        n = rng.randint(3, 4)
        omega = [random_point(rng, n) for _ in range(rng.randint(1, 4))]
        i, j, k = rng.sample(range(1, n + 1), 3)
        a, b, ab = (i, j), (j, k), (i, k)
        fa, fb, fab = f_set(a, omega), f_set(b, omega), f_set(ab, omega)
        used = False
        if is_finite(fa) and is_finite(fb):
            used = True
            res.check(fab == NEG_INF or (is_finite(fab) and fab <= fa + fb), f"{fab} > {fa} + {fb} on {omega}")
        for s, t in ((fa, fb), (fb, fa)):
            if s == NEG_INF and t != INF:
                used = True
                res.check(fab == NEG_INF, f"expected -inf, got {fab} on {omega}")
        applicable += used
    return res


def criterion_common_apartment(rng: random.Random, count: int = 200) -> SuiteResult:
    res = SuiteResult(11, "common apartment frames")
    for _ in range(count):
        n = rng.choice((3, 4))
        p = rng.choice(PRIMES)
        x = random_lattice(rng, n, p, rng.randint(1, n - 1))
        y = random_lattice(rng, n, p, n)
        f = common_frame(x, y)
        res.check(verify_frame(f, x, y), f"frame fails for x={x.basis}, y={y.basis}")
        res.check(det(f.vectors) != 0, "frame vectors dependent")
    return res


CRITERIA = (
    (criterion_tree, 3),
    (criterion_bijection, 500),
    (criterion_lattice_limits, 200),
    (criterion_f_oracle, 500),
    (criterion_ray_tails, 100),
    (criterion_corners, 500),
    (criterion_contraction, 200),
    (criterion_conjugation, 500),
    (criterion_stabilizers, 500),
    (criterion_subadditivity, 500),
    (criterion_common_apartment, 200),
)


def run_criterion(number: int, seed: int, scale: float = 1.0) -> SuiteResult:
    fn, count = CRITERIA[number - 1]
    if number != 1:
        count = max(1, int(count * scale))
    return fn(random.Random(f"{seed}:{number}"), count)


def run_all(seed: int = 0, scale: float = 1.0) -> list[SuiteResult]:
    return [run_criterion(k, seed, scale) for k in range(1, len(CRITERIA) + 1)]
