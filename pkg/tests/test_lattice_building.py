import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from btcompact.apartment import ApartmentPoint
from btcompact.errors import PreconditionError
from btcompact.lattice_building import (
    LatticeClass,
    adjacent,
    ball,
    common_frame,
    gaussian_binomial,
    is_simplex,
    neighbor_count,
    neighbors,
    phi,
    phi_inv,
    rel_pos,
    verify_frame,
)
from btcompact.local_arith import det, matmul, scale, solve, vval
from btcompact.selftest import random_diagonal_class, random_full_rank, random_lattice
from conftest import mat

primes = st.sampled_from([2, 3, 5])


def D(p, *k):
    return LatticeClass.diagonal(len(k), p, {i + 1: e for i, e in enumerate(k)})


def _contained(X, Y, p):
    """Z_(p)-span of X inside that of Y."""
    return all(x == 0 or vval(x, p) >= 0 for row in solve(Y, X) for x in row)


def brute_adjacent(L, M):
    """Search representatives with pN ⊂ M' ⊂ N, N the stored basis of L."""
    if L == M:
        return False
    p = L.p
    N = L.basis
    for s in range(-8, 9):
        Mp = scale(M.basis, Fraction(p) ** s)
        try:
            if _contained(Mp, N, p) and _contained(scale(N, p), Mp, p):
                return True
        except PreconditionError:
            return False
    return False


def brute_subspace_count(m, p):
    """Number of nonzero proper subspaces of F_p^m, by closing spans of vector sets."""
    vecs = [v for v in itertools.product(range(p), repeat=m) if any(v)]
    spans = set()
    for k in range(1, m):
        for gens in itertools.combinations(vecs, k):
            span = {tuple(0 for _ in range(m))}
            for g in gens:
                span = {tuple((a + c * b) % p for a, b in zip(s, g)) for s in span for c in range(p)}
            if len(span) < p**m:
                spans.add(frozenset(span))
    return len(spans)


# --- examples ----------------------------------------------------------------

def test_rel_pos_examples():
    L = D(3, 0, 0)
    assert rel_pos(L, L) == [0, 0]
    assert rel_pos(L, D(3, 1, 0)) == [0, 1]
    assert rel_pos(L, LatticeClass.from_basis(mat([[3, 1], [0, 3]]), 3)) == [0, 2]


def test_rel_pos_needs_same_span():
    with pytest.raises(PreconditionError):
        rel_pos(D(3, 0, 0), LatticeClass.from_basis(mat([[1], [0]]), 3))


def test_adjacency_examples():
    assert adjacent(D(3, 0, 0), D(3, 1, 0))
    assert not adjacent(D(3, 0, 0), D(3, 2, 0))
    assert not adjacent(D(3, 0, 0), D(3, 0, 0))


def test_simplex_examples():
    assert is_simplex([D(3, 0, 0, 0)])
    assert is_simplex([D(3, 0, 0, 0), D(3, 1, 0, 0), D(3, 1, 1, 0)])
    assert not is_simplex([D(3, 0, 0), D(3, 2, 0)])
    with pytest.raises(PreconditionError):
        is_simplex([])


@pytest.mark.parametrize("m,p,count", [(2, 3, 4), (2, 2, 3), (3, 2, 14)])
def test_neighbor_count_examples(m, p, count):
    assert len(neighbors(LatticeClass.standard(m, p))) == count


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_neighbor_counts_match_brute_force(m, p):
    L = LatticeClass.standard(m, p)
    nb = neighbors(L)
    assert len(nb) == len(set(nb)) == neighbor_count(m, p) == brute_subspace_count(m, p)


def test_gaussian_binomial_values():
    assert gaussian_binomial(3, 1, 2) == 7
    assert gaussian_binomial(4, 2, 3) == 130
    assert gaussian_binomial(2, 3, 2) == 0


def test_neighbors_are_adjacent_and_symmetric():
    rng = random.Random(3)
    for _ in range(5):
        L = random_lattice(rng, 3, 2, 3)
        for M in neighbors(L):
            assert adjacent(L, M) and brute_adjacent(L, M)
            assert L in neighbors(M)


def test_adjacency_agrees_with_brute_force():
    rng = random.Random(11)
    for _ in range(1000):
        p = rng.choice([2, 3])
        n = rng.choice([2, 3])
        L = random_lattice(rng, n, p, n)
        if rng.random() < 0.5:
            M = rng.choice(neighbors(L))
            if rng.random() < 0.5:
                M = rng.choice(neighbors(M))
        else:
            M = random_lattice(rng, n, p, n)
        assert adjacent(L, M) == brute_adjacent(L, M) == adjacent(M, L)


def test_guardrails():
    with pytest.raises(PreconditionError):
        neighbors(LatticeClass.standard(2, 11))
    assert len(neighbors(LatticeClass.standard(2, 11), override=True)) == 12


@pytest.mark.parametrize("p,r,size", [(3, 0, 1), (3, 2, 17), (2, 3, 22)])
def test_ball_sizes(p, r, size):
    g = ball(LatticeClass.standard(2, p), r)
    assert len(g.vertices) == size
    assert len(g.edges) == size - 1
    assert all(adjacent(g.vertices[a], g.vertices[b]) for a, b in g.edges)


def test_ball_rank_three():
    g = ball(LatticeClass.standard(3, 2), 1)
    assert len(g.vertices) == 15
    # the 14 neighbours form the flag complex of F_2^3: 21 incidences
    assert len(g.edges) == 14 + 21


def test_ball_is_deterministic():
    a = ball(LatticeClass.standard(2, 3), 2)
    b = ball(LatticeClass.standard(2, 3), 2)
    assert a == b


def test_canonical_form_equivariance():
    rng = random.Random(5)
    for _ in range(100):
        p = rng.choice([2, 3, 5])
        n = rng.randint(2, 3)
        A = random_full_rank(rng, n, n, p)
        g = random_full_rank(rng, n, n, p)
        C = random_full_rank(rng, n, n, p)
        while det(C) == 0 or vval(det(C), p) != 0 or any(x != 0 and vval(x, p) < 0 for r in C for x in r):
            C = random_full_rank(rng, n, n, p)
        c = Fraction(p) ** rng.randint(-2, 2)
        L1 = LatticeClass.from_basis(matmul(g, A), p)
        L2 = LatticeClass.from_basis(matmul(g, scale(matmul(A, C), c)), p)
        assert L1 == L2


# --- phi ---------------------------------------------------------------------

def test_phi_examples():
    assert phi(D(3, 1, 0, 0)) == ApartmentPoint.interior((-1, 0, 0))
    L = LatticeClass.diagonal(3, 3, {1: 2, 3: 0})
    x = ApartmentPoint(3, (1, 3), (-2, 0))
    assert phi(L) == x and phi_inv(x, 3) == L
    assert phi(LatticeClass.standard(3, 5)) == ApartmentPoint.origin(3)
    assert phi_inv(ApartmentPoint.origin(3), 5) == LatticeClass.standard(3, 5)


def test_phi_rejects_non_diagonal_and_non_vertex():
    with pytest.raises(PreconditionError):
        phi(LatticeClass.from_basis(mat([[1, 0], [1, 3]]), 3))
    with pytest.raises(PreconditionError):
        phi_inv(ApartmentPoint.interior((Fraction(1, 2), 0)), 3)


def test_phi_round_trip():
    rng = random.Random(9)
    for _ in range(100):
        n = rng.randint(1, 4)
        L = random_diagonal_class(rng, n, rng.choice([2, 3, 5]), rng.randint(1, n))
        assert phi_inv(phi(L), L.p) == L
        pts = {i: rng.randint(-5, 5) for i in rng.sample(range(1, n + 1), rng.randint(1, n))}
        x = ApartmentPoint.from_dict(n, dict(sorted(pts.items())))
        assert phi(phi_inv(x, 3)) == x


# --- common frames -------------------------------------------------------------

def test_common_frame_examples():
    x = LatticeClass.from_basis(mat([[1, 0], [0, 1], [0, 0]]), 3)
    y = LatticeClass.standard(3, 3)
    f = common_frame(x, y)
    assert verify_frame(f, x, y)
    assert f.x_exponents == (0, 0) and f.y_exponents == (0, 0, 0)
    x = LatticeClass.from_basis(mat([[1], [3]]), 3)
    y = LatticeClass.standard(2, 3)
    f = common_frame(x, y)
    assert verify_frame(f, x, y)
    assert rel_pos(f.y_class(3), y) == [0, 0]


@given(st.data())
def test_common_frame_property(data):
    p = data.draw(primes)
    n = data.draw(st.integers(2, 4))
    m = data.draw(st.integers(1, n))
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    x = random_lattice(rng, n, p, m)
    y = random_lattice(rng, n, p, n)
    assert verify_frame(common_frame(x, y), x, y)


def test_common_frame_needs_full_rank_y():
    with pytest.raises(PreconditionError):
        common_frame(D(3, 0, 0), LatticeClass.from_basis(mat([[1], [0]]), 3))
