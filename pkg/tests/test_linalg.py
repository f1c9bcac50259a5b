from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeslice.errors import ParseError
from cubeslice.linalg import (
    RatMatrix,
    as_rational,
    charpoly,
    coords_in_basis,
    gram,
    inverse,
    is_contraction,
    is_isometry,
    is_psd,
    parse_matrix_text,
    parse_rational,
    parse_vector_text,
    rank,
)

from .helpers import M, matrices, small_rationals

ORTHO3 = RatMatrix.from_columns([
    [Fraction(1, 3), Fraction(2, 3), Fraction(2, 3)],
    [Fraction(2, 3), Fraction(1, 3), Fraction(-2, 3)],
    [Fraction(2, 3), Fraction(-2, 3), Fraction(1, 3)],
])


def test_rank_examples():
    assert rank(RatMatrix.identity(3)) == 3
    assert rank(M("1 1")) == 1
    assert rank(RatMatrix.from_columns([[1, 1, 0], [0, 1, 1], [1, 2, 1]])) == 2
    assert rank(RatMatrix.zeros(2, 3)) == 0


def test_coords_in_basis_examples():
    assert coords_in_basis([[1, 0], [0, 1]], [1, 1]) == (1, 1)
    assert coords_in_basis([[1, 1, 0], [0, 1, 1]], [1, 2, 1]) == (1, 1)
    assert coords_in_basis([[1, 0]], [0, 1]) is None


def test_coords_in_basis_errors():
    with pytest.raises(ValueError):
        coords_in_basis([[1, 0, 0]], [1, 0])
    with pytest.raises(ValueError):
        coords_in_basis([[1, 0], [2, 0]], [1, 0])


def test_gram_examples():
    assert gram(RatMatrix.identity(3)) == RatMatrix.identity(3)
    assert gram(ORTHO3) == RatMatrix.identity(3)
    assert gram(M("1 1")) == M("1 1", "1 1")


def test_isometry_examples():
    assert is_isometry(M("1 0 0", "0 -1 0", "0 0 -1"))
    assert is_isometry(ORTHO3)
    assert not is_isometry(M("1 1"))


def test_contraction_examples():
    assert is_contraction(RatMatrix.identity(4))
    assert not is_contraction(M("1 1"))
    assert is_contraction(M("0 -1/4 -1/4"))
    assert is_contraction(M("1/2 1/2", "1/2 1/2"))
    assert not is_contraction(M("1 0", "0 1", "1/100 0"))


def test_parse_rational():
    assert parse_rational("-3/6") == Fraction(-1, 2)
    assert parse_rational(" 7 ") == 7
    for bad in ("1/0", "x", "1.5", "", "1/2/3"):
        with pytest.raises(ValueError):
            parse_rational(bad)
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_parse_matrix_text_roundtrip():
    text = "# a comment\n2 3\n1 -1/2 0   # trailing\n\n3/4 2 -5\n"
    L = parse_matrix_text(text)
    assert L == M("1 -1/2 0", "3/4 2 -5")
    assert parse_matrix_text(L.to_text()) == L


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("2 2\n1 2\n1 1/0\n", 3, 3),
        ("2 2\n1 2\n", 3, 1),
        ("2 2\n1 2\n1 2 3\n", 3, 1),
        ("2\n1 2\n", 1, 1),
        ("2 x\n1 2\n", 1, 3),
        ("1 2\n1 abc\n", 2, 3),
        ("", 1, 1),
    ],
)
def test_parse_matrix_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_matrix_text(text, source="f.mat")
    assert (info.value.line, info.value.column) == (line, col)
    assert str(info.value).startswith(f"f.mat:{line}:{col}:")


def test_parse_vector_text():
    assert parse_vector_text("# c\n-1 1/2\n") == (Fraction(-1), Fraction(1, 2))
    with pytest.raises(ParseError):
        parse_vector_text("1\n2\n")


def test_inverse():
    A = M("2 1", "1 1")
    assert A @ inverse(A) == RatMatrix.identity(2)
    with pytest.raises(ZeroDivisionError):
        inverse(M("1 2", "2 4"))


def _principal_minor_sums(A):
    """Oracle: e_i = sum of all i x i principal minors, by cofactor expansion."""
    def det(B):
        if not B:
            return 1
        return sum((-1) ** j * B[0][j] * det([r[:j] + r[j + 1:] for r in B[1:]]) for j in range(len(B)))

    n = len(A)
    return [sum(det([[A[i][j] for j in S] for i in S]) for S in combinations(range(n), r)) for r in range(n + 1)]


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_charpoly_matches_principal_minors(A):
    coeffs = charpoly(A)
    sums = _principal_minor_sums(A)
    assert coeffs == [(-1) ** i * s for i, s in enumerate(sums)]


def _fraction_rank(rows):
    a = [list(map(Fraction, r)) for r in rows]
    r = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


@given(matrices(k_max=6, m_max=6))
def test_rank_matches_plain_elimination(L):
    assert rank(L) == _fraction_rank(L.rows)


@given(matrices(k_max=5, m_max=5), st.randoms(use_true_random=False), st.integers(1, 5), st.integers(-5, -1))
def test_rank_invariances(L, rnd, s, t):
    rows = list(L.rows)
    rnd.shuffle(rows)
    perm = list(range(L.k))
    rnd.shuffle(perm)
    P = RatMatrix(tuple(tuple(r[j] for j in perm) for r in rows))
    assert rank(P) == rank(L)
    scales = [Fraction(s if j % 2 else t, 1 + j) for j in range(L.k)]
    S = RatMatrix(tuple(tuple(x * c for x, c in zip(r, scales)) for r in L.rows))
    assert rank(S) == rank(L)


@given(small_rationals, small_rationals.filter(lambda b: b != 0))
def test_exact_arithmetic(a, b):
    assert (a + b) - b == a
    assert (a * b) / b == a


@given(matrices(k_max=5, m_max=6))
def test_gram_symmetric(L):
    G = gram(L)
    assert G == G.T


@given(matrices(k_max=4, m_max=5))
def test_isometry_implies_contraction(L):
    if is_isometry(L):
        assert is_contraction(L)
    # scaled-down versions of any map are contractions
    fro2 = sum(a * a for r in L.rows for a in r)
    if fro2:
        n = 1
        while n * n < fro2:
            n += 1
        assert is_contraction(L.scale(Fraction(1, n)))


@given(st.integers(1, 8), st.randoms(use_true_random=False))
def test_signed_permutation_is_isometry(k, rnd):
    perm = list(range(k))
    rnd.shuffle(perm)
    cols = [[(rnd.choice((1, -1)) if i == perm[j] else 0) for i in range(k)] for j in range(k)]
    L = RatMatrix.from_columns(cols)
    assert is_isometry(L) and is_contraction(L)


def test_psd_edge_cases():
    assert is_psd(M("0 0", "0 0"))
    assert not is_psd(M("0 1", "1 0"))
    assert is_psd(M("1 1", "1 1"))
    assert not is_psd(M("1 2", "2 1"))
    assert is_psd(M("2 -1 0", "-1 2 -1", "0 -1 2"))
