import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from btcompact.errors import PreconditionError
from btcompact.local_arith import (
    INF,
    NEG_INF,
    complete,
    det,
    elementary_divisors,
    hnf_local,
    hstack,
    intersect_saturate,
    is_unimodular,
    lattice_from_generators,
    lattice_intersection,
    matmul,
    format_rat,
    parse_ext,
    pivot_data,
    rank,
    residue,
    smith_local,
    solve,
    vval,
)
from conftest import mat

primes = st.sampled_from([2, 3, 5])
small = st.integers(-6, 6)
rationals = st.builds(
    lambda a, e, p: Fraction(a) * Fraction(p) ** e, st.integers(-20, 20), st.integers(-2, 2), primes
)


def square(n):
    return st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n).map(mat)


def unimodular(n, p):
    """Random matrices invertible over Z_(p): integer entries, unit determinant."""
    return (
        st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)
        .map(mat)
        .filter(lambda C: det(C) != 0 and vval(det(C), p) == 0)
    )


# --- valuations -------------------------------------------------------------

@pytest.mark.parametrize("q,p,expected", [(18, 3, 2), (0, 5, INF), (Fraction(5, 9), 3, -2), (7, 7, 1)])
def test_vval_examples(q, p, expected):
    assert vval(q, p) == expected


@given(st.integers(1, 10**6), st.integers(1, 10**6), primes)
def test_vval_is_additive(a, b, p):
    assert vval(Fraction(a) * b, p) == vval(a, p) + vval(b, p)
    assert vval(Fraction(a, b), p) == vval(a, p) - vval(b, p)


def test_ext_order_and_arithmetic():
    assert NEG_INF < -(10**9) < 10**9 < INF
    assert INF + 3 == INF and 3 + NEG_INF == NEG_INF
    with pytest.raises(ArithmeticError):
        INF + NEG_INF
    assert parse_ext("inf") is INF and parse_ext("-inf") is NEG_INF
    assert parse_ext("3/6") == Fraction(1, 2)
    assert format_rat(Fraction(-4, 6)) == "-2/3" and format_rat(INF) == "inf"


@given(rationals, primes, st.integers(0, 3))
def test_residue_is_a_representative(q, p, e):
    r = residue(q, p, e)
    assert 0 <= r < p**e or (e == 0 and r == 0)
    assert q == r or vval(q - r, p) >= e


# --- hnf_local --------------------------------------------------------------

def test_hnf_examples():
    assert hnf_local(mat([[1, 0], [0, 1]]), 3) == mat([[1, 0], [0, 1]])
    assert hnf_local(mat([[3, 0], [0, 1]]), 3) == mat([[3, 0], [0, 1]])
    A = mat([[1, 2], [1, 1]])
    B = hnf_local(A, 3)
    C = solve(A, B)
    assert is_unimodular(C, 3)
    assert hnf_local(B, 3) == B


def test_hnf_rejects_rank_deficiency():
    with pytest.raises(PreconditionError):
        hnf_local(mat([[1, 2], [2, 4]]), 3)


@given(st.data())
def test_hnf_canonical_under_unimodular_change(data):
    p = data.draw(primes)
    n = data.draw(st.integers(1, 3))
    A = data.draw(square(n).filter(lambda M: det(M) != 0))
    C = data.draw(unimodular(n, p))
    B = hnf_local(A, p)
    assert hnf_local(matmul(A, C), p) == B
    assert hnf_local(B, p) == B
    assert is_unimodular(solve(A, B), p)
    for (r, e), col in zip(pivot_data(B, p), zip(*B)):
        assert col[r] == Fraction(p) ** e
        assert all(x == 0 for x in col[:r])


# --- Smith form -------------------------------------------------------------

def _minors_valuation(C, k, p):
    """min valuation of k x k minors: the k-th determinantal divisor."""
    n = len(C)
    best = INF
    for rows in itertools.combinations(range(n), k):
        for cols in itertools.combinations(range(n), k):
            d = det(tuple(tuple(C[r][c] for c in cols) for r in rows))
            if d != 0:
                best = min(best, vval(d, p))
    return best


@pytest.mark.parametrize(
    "C,p,expected",
    [(mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), 3, [0, 0, 0]), (mat([[9, 0], [0, 1]]), 3, [0, 2]), (mat([[3, 1], [0, 3]]), 3, [0, 2])],
)
def test_elementary_divisor_examples(C, p, expected):
    assert elementary_divisors(C, p) == expected


@given(st.data())
def test_elementary_divisors_match_determinantal_divisors(data):
    p = data.draw(primes)
    n = data.draw(st.integers(1, 3))
    C = data.draw(square(n).filter(lambda M: det(M) != 0))
    d = elementary_divisors(C, p)
    assert sum(d) == vval(det(C), p)
    for k in range(1, n + 1):
        assert sum(d[:k]) == _minors_valuation(C, k, p)


@given(st.data())
def test_elementary_divisors_invariant(data):
    p = data.draw(primes)
    n = data.draw(st.integers(1, 3))
    C = data.draw(square(n).filter(lambda M: det(M) != 0))
    U = data.draw(unimodular(n, p))
    V = data.draw(unimodular(n, p))
    assert elementary_divisors(matmul(matmul(U, C), V), p) == elementary_divisors(C, p)


@given(st.data())
def test_smith_transforms(data):
    p = data.draw(primes)
    n = data.draw(st.integers(1, 3))
    A = data.draw(square(n))
    U, D, V = smith_local(A, p)
    assert matmul(matmul(U, A), V) == D
    assert is_unimodular(U, p) and is_unimodular(V, p)
    assert all(D[i][j] == 0 for i in range(n) for j in range(n) if i != j)


def test_singular_input_rejected():
    with pytest.raises(PreconditionError):
        elementary_divisors(mat([[1, 2], [2, 4]]), 3)


# --- subspace operations ----------------------------------------------------

def test_intersect_saturate_examples():
    I3 = mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    W = mat([[1, 0], [0, 1], [0, 0]])
    assert hnf_local(intersect_saturate(I3, W, 5), 5) == W
    I2 = mat([[1, 0], [0, 1]])
    sub = intersect_saturate(I2, mat([[1], [3]]), 3)
    assert hnf_local(sub, 3) == mat([[1], [3]])
    extra = complete(I2, sub, 3)
    assert vval(det(hstack(sub, extra)), 3) == 0


def test_complete_rejects_unsaturated():
    with pytest.raises(PreconditionError):
        complete(mat([[1, 0], [0, 1]]), mat([[3], [0]]), 3)


def test_intersect_saturate_outside_span():
    with pytest.raises(PreconditionError):
        intersect_saturate(mat([[1], [0]]), mat([[0], [1]]), 3)


@given(st.data())
def test_saturation_and_completion(data):
    p = data.draw(primes)
    L = data.draw(square(3).filter(lambda M: det(M) != 0))
    W = data.draw(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=2).map(
        lambda cols: tuple(zip(*[tuple(Fraction(x) for x in c) for c in cols]))))
    if rank(W) == 0:
        return
    S = intersect_saturate(L, W, p)
    assert rank(S) == rank(W) == rank(hstack(S, W))
    X = solve(L, S)
    assert all(x == 0 or vval(x, p) >= 0 for row in X for x in row)
    full = hstack(S, complete(L, S, p))
    assert is_unimodular(solve(L, full), p)


@given(st.data())
def test_lattice_intersection_membership(data):
    p = data.draw(primes)
    A = data.draw(square(2).filter(lambda M: det(M) != 0))
    B = data.draw(square(2).filter(lambda M: det(M) != 0))
    N = lattice_intersection(A, B, p)

    def inside(X, Y):
        return all(x == 0 or vval(x, p) >= 0 for row in solve(Y, X) for x in row)

    assert inside(N, A) and inside(N, B)
    # [A : A∩B] = [A+B : B], so the det valuations balance
    S = lattice_from_generators(hstack(A, B), p)
    assert vval(det(N), p) + vval(det(S), p) == vval(det(A), p) + vval(det(B), p)
