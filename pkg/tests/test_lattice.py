import itertools
import random
from fractions import Fraction

import pytest

from fibfactor.lattice import (
    LatticeError,
    cols_to_rows,
    det_int,
    det_lattice,
    dual_basis,
    dot,
    enumerate_short_vectors,
    format_matrix,
    gram_schmidt,
    hnf,
    hnf_with_transform,
    identity_cols,
    in_lattice,
    invert_rational,
    kernel_basis,
    lattices_equal,
    lll_reduce,
    lll_with_data,
    norm_sq,
    parse_matrix,
    rows_to_cols,
    shortest_vector,
    snf,
    snf_diagonal,
)


def random_cols(rng, dim, lo=-10, hi=10, square=True):
    while True:
        cols = [[rng.randint(lo, hi) for _ in range(dim)] for _ in range(dim)]
        if det_int(cols) != 0:
            return cols


def random_unimodular(rng, dim, steps=20):
    u = identity_cols(dim)
    for _ in range(steps):
        i, j = rng.sample(range(dim), 2)
        q = rng.randint(-2, 2)
        u[i] = [a + q * b for a, b in zip(u[i], u[j])]
    return u


def mat_mul_cols(a, b):
    """Columns of A*B given columns of A and of B."""
    rows_a = cols_to_rows(a)
    return [[dot(row, col) for row in rows_a] for col in b]


# ---------------------------------------------------------------------------
# Gram-Schmidt


def test_gram_schmidt_orthogonal_input():
    q, r = gram_schmidt([[3, 0], [0, 4]])
    assert q == [[3, 0], [0, 4]]
    assert r[0][1] == 0


def test_gram_schmidt_coefficient_half():
    q, r = gram_schmidt([[1, 1], [0, 1]])
    assert r[0][1] == Fraction(1, 2)
    assert dot(q[0], q[1]) == 0


def test_gram_schmidt_reconstructs():
    rng = random.Random(0)
    cols = random_cols(rng, 4)
    q, r = gram_schmidt(cols)
    for j in range(4):
        recon = [sum(r[i][j] * q[i][k] for i in range(4)) for k in range(4)]
        assert recon == [Fraction(x) for x in cols[j]]
    for i in range(4):
        for j in range(i + 1, 4):
            assert dot(q[i], q[j]) == 0


def test_gram_schmidt_rejects_dependent():
    with pytest.raises(LatticeError):
        gram_schmidt([[1, 2], [2, 4]])


# ---------------------------------------------------------------------------
# LLL


def test_lll_identity_fixed_point():
    eye = identity_cols(4)
    assert lll_reduce(eye) == eye


def test_lll_integral_state_matches_fraction_gso():
    rng = random.Random(1)
    for _ in range(20):
        dim = rng.randint(2, 5)
        cols = random_cols(rng, dim, -8, 8)
        out, u, gso = lll_with_data(cols)
        q, _ = gram_schmidt(out)
        assert gso == [norm_sq(qi) for qi in q]
        assert mat_mul_cols(cols, u) == out
        assert abs(det_int(u)) == 1


def check_reduced(cols, delta=Fraction(3, 4)):
    q, r = gram_schmidt(cols)
    bstar = [norm_sq(qi) for qi in q]
    n = len(cols)
    for j in range(n):
        for i in range(j):
            assert abs(r[i][j]) <= Fraction(1, 2), "not size-reduced"
    for k in range(1, n):
        assert bstar[k] >= (delta - r[k - 1][k] ** 2) * bstar[k - 1], "Lovasz fails"


def test_lll_output_reduced_and_same_lattice():
    rng = random.Random(2)
    for _ in range(50):
        dim = rng.randint(2, 4)
        cols = random_cols(rng, dim)
        out = lll_reduce(cols)
        check_reduced(out)
        assert lattices_equal(cols, out)


def test_lll_first_vector_against_box_enumeration():
    rng = random.Random(3)
    for _ in range(10):
        cols = random_cols(rng, 3)
        out = lll_reduce(cols)
        lam1_sq = min(
            norm_sq([sum(c * cols[j][k] for j, c in enumerate(coef)) for k in range(3)])
            for coef in itertools.product(range(-20, 21), repeat=3)
            if any(coef)
        )
        assert norm_sq(out[0]) <= 4 * lam1_sq  # 2^{(3-1)/2} squared


def test_lll_rejects_bad_delta_and_dependence():
    with pytest.raises(LatticeError):
        lll_reduce(identity_cols(2), delta=Fraction(1, 8))
    with pytest.raises(LatticeError):
        lll_reduce([[1, 0], [1, 0]])


# ---------------------------------------------------------------------------
# HNF / SNF


def test_hnf_identity():
    assert hnf(identity_cols(3)) == identity_cols(3)


def test_hnf_canonical_and_transform():
    rng = random.Random(4)
    for _ in range(20):
        dim = rng.randint(2, 4)
        cols = random_cols(rng, dim)
        h, v = hnf_with_transform(cols)
        assert abs(det_int(v)) == 1
        assert lattices_equal(cols, h)
        mixed = mat_mul_cols(cols, random_unimodular(rng, dim))
        assert hnf(mixed) == h  # canonical form is basis-independent


def test_kernel_basis():
    cols = [[1, 0], [0, 1], [1, 1]]  # columns of a 2x3 map
    ker = kernel_basis(cols)
    assert len(ker) == 1
    y = ker[0]
    combo = [sum(y[j] * cols[j][i] for j in range(3)) for i in range(2)]
    assert combo == [0, 0]


def test_snf_examples():
    _, s, _ = snf([[2, 0], [0, 4]])
    assert cols_to_rows(s) == [[2, 0], [0, 4]]
    u, s, v = snf([[4, 0], [0, 2]])
    assert cols_to_rows(s) == [[2, 0], [0, 4]]
    assert abs(det_int(u)) == 1 and abs(det_int(v)) == 1


def test_snf_random_properties():
    rng = random.Random(5)
    for _ in range(20):
        dim = rng.randint(2, 4)
        cols = random_cols(rng, dim, -6, 6)
        u, s, v = snf(cols)
        assert abs(det_int(u)) == 1 and abs(det_int(v)) == 1
        srows = cols_to_rows(s)
        diag = [srows[i][i] for i in range(dim)]
        for i in range(dim):
            for j in range(dim):
                if i != j:
                    assert srows[i][j] == 0
        for a, b in zip(diag, diag[1:]):
            assert b % a == 0
        prod = 1
        for x in diag:
            prod *= x
        assert prod == det_lattice(cols)
        # U*B*V = S
        ub = mat_mul_cols(u, cols)
        assert mat_mul_cols(ub, v) == s


# ---------------------------------------------------------------------------
# determinants and duals


def test_det_examples():
    assert det_lattice(identity_cols(3)) == 1
    assert det_lattice([[2, 0], [0, 3]]) == 6
    rng = random.Random(6)
    cols = mat_mul_cols(random_unimodular(rng, 2), [[2, 0], [0, 5]])
    assert det_lattice(cols) == 10
    with pytest.raises(LatticeError):
        det_lattice([[1, 1], [1, 1]])


def test_dual_examples():
    assert dual_basis(identity_cols(2)) == [[1, 0], [0, 1]]
    d = dual_basis([[2, 0], [0, 3]])
    assert d == [[Fraction(1, 2), 0], [0, Fraction(1, 3)]]
    rng = random.Random(7)
    for _ in range(5):
        cols = random_cols(rng, 4, -5, 5)
        d = dual_basis(cols)
        for dc in d:
            for pc in cols:
                val = dot(dc, pc)
                assert val.denominator == 1
    with pytest.raises(LatticeError):
        dual_basis([[1, 1], [1, 1]])


def test_inverse_rational():
    rng = random.Random(8)
    cols = random_cols(rng, 3, -5, 5)
    inv = invert_rational(cols)
    prod = mat_mul_cols(cols, inv)
    assert prod == [[Fraction(1) if i == j else Fraction(0) for i in range(3)] for j in range(3)]


# ---------------------------------------------------------------------------
# membership / enumeration / io


def test_in_lattice():
    gens = [[2, 0], [0, 3], [2, 3]]
    assert in_lattice(gens, [4, 3])
    assert in_lattice(gens, [0, 0])
    assert not in_lattice(gens, [1, 0])


def test_shortest_vector_matches_naive():
    rng = random.Random(9)
    for _ in range(10):
        cols = random_cols(rng, 3, -6, 6)
        vec, ns = shortest_vector(cols)
        naive = min(
            norm_sq([sum(c * cols[j][k] for j, c in enumerate(coef)) for k in range(3)])
            for coef in itertools.product(range(-15, 16), repeat=3)
            if any(coef)
        )
        assert ns == naive
        assert norm_sq(vec) == ns


def test_enumerate_short_vectors_complete():
    cols = [[2, 0], [1, 2]]
    found = {tuple(v) for _, v in enumerate_short_vectors(cols, 9)}
    expected = set()
    for a, b in itertools.product(range(-8, 9), repeat=2):
        v = (2 * a + b, 2 * b)
        if v != (0, 0) and v[0] ** 2 + v[1] ** 2 <= 9:
            expected.add(v)
    # one per +- pair
    assert len(found) * 2 == len(expected)
    for v in found:
        assert v in expected and (-v[0], -v[1]) in expected


def test_matrix_text_round_trip():
    cols = [[1, 2, 3], [4, 5, 6]]
    text = format_matrix(cols)
    assert text.splitlines()[0] == "3 2"
    assert parse_matrix(text) == cols
    with pytest.raises(LatticeError):
        parse_matrix("2 2\n1 2\n")
