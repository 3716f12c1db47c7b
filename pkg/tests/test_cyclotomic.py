import cmath
import random
from fractions import Fraction

import pytest

from prymkit import abelian as ab
from prymkit.cyclotomic import (
    CycMatrix,
    CycNum,
    I,
    NotPermutation,
    WeightDecomposition,
    analyze_permutation_matrix,
    cyclotomic_polynomial,
    euler_phi,
    exact_sqrt,
    principal_root,
    principal_sqrt,
    root_of_unity,
    sqrt_rational,
    standard_J,
    symplectic_defect,
    is_symplectic,
    zeta,
)


def rand_num(rng, N, terms=3):
    x = CycNum.rational(0, N)
    for _ in range(terms):
        x = x + root_of_unity(rng.randrange(N), N) * Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return x


def close(x, z):
    return abs(complex(x) - z) < 1e-9


# --- scalars --------------------------------------------------------------------------------------

def test_small_identities():
    assert zeta(4) * zeta(4) == -1
    assert 1 + zeta(3) + zeta(3) ** 2 == 0
    assert zeta(8) ** 2 == zeta(4)
    assert (zeta(8) ** 2).embed(8).coeffs == zeta(4).embed(8).coeffs
    assert zeta(6) ** 3 == -1


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    for n in range(1, 40):
        assert len(cyclotomic_polynomial(n)) - 1 == euler_phi(n)
        # every primitive root is a zero
        z = cmath.exp(2j * cmath.pi / n)
        val = sum(c * z ** k for k, c in enumerate(cyclotomic_polynomial(n)))
        assert abs(val) < 1e-8


@pytest.mark.parametrize("N", [1, 2, 3, 4, 8, 12])
def test_field_axioms_random(N):
    rng = random.Random(N)
    for _ in range(40):
        a, b, c = (rand_num(rng, N) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a and a * b == b * a
        assert a - a == 0
        if not a.is_zero():
            assert a * a.inverse() == 1
            assert (b / a) * a == b
        # numeric oracle, independent of the power-basis reduction
        assert close(a * b + c, complex(a) * complex(b) + complex(c))


def test_galois_action_matches_numeric():
    rng = random.Random(3)
    N = 12
    for _ in range(20):
        a = rand_num(rng, N)
        for k in (1, 5, 7, 11):
            s = a.galois(k)
            z = sum(complex(c) * cmath.exp(2j * cmath.pi * j * k / N) for j, c in enumerate(a.coeffs))
            assert close(s, z)
        assert close(a.conjugate(), complex(a).conjugate())


def test_embedding_preserves_arithmetic():
    rng = random.Random(11)
    for _ in range(20):
        a, b = rand_num(rng, 6), rand_num(rng, 6)
        assert (a * b).embed(24) == a.embed(24) * b.embed(24)
        assert (a + b).embed(24) == a.embed(24) + b.embed(24)


def test_principal_sqrt_examples():
    assert principal_sqrt(CycNum.rational(1)) == 1
    assert principal_sqrt(CycNum.rational(-1)) == I
    assert principal_sqrt(zeta(3)) == zeta(6)
    assert principal_sqrt(zeta(3)) ** 2 == zeta(3)


def test_principal_sqrt_all_roots():
    for N in range(1, 25):
        for k in range(N):
            u = root_of_unity(k, N)
            r = principal_sqrt(u)
            assert r * r == u
            # branch: argument in [0, pi)
            ang = cmath.phase(complex(r)) % (2 * cmath.pi)
            assert ang < cmath.pi + 1e-12


def test_principal_root_cubes():
    for k in range(6):
        u = root_of_unity(k, 6)
        assert principal_root(u, 3) ** 3 == u


def test_rational_square_roots():
    for q in [2, 3, 5, 6, 12, Fraction(1, 2), Fraction(9, 7), -3, -Fraction(5, 4)]:
        r = sqrt_rational(q)
        assert r * r == q
        assert close(r, cmath.sqrt(float(q)))
    u = CycNum.rational(3) * zeta(5)
    v = exact_sqrt(u)
    assert v * v == u


def test_root_exponent():
    assert (zeta(12) ** 4).root_exponent() == (1, 3)
    assert CycNum.rational(-1).root_exponent() == (1, 2)


def test_json_roundtrip_number():
    x = rand_num(random.Random(1), 8)
    assert CycNum.from_json(x.to_json()) == x


# --- matrices -------------------------------------------------------------------------------------

def rand_matrix(rng, n, N):
    return CycMatrix.from_rows([[rand_num(rng, N, 2) for _ in range(n)] for _ in range(n)], N)


def test_conjugation_axioms():
    rng = random.Random(5)
    B = rand_matrix(rng, 4, 4)
    assert B.conj_by(CycMatrix.identity(4)) == B
    for _ in range(5):
        A = rand_matrix(rng, 4, 4)
        if A.det().is_zero():
            continue
        assert B.conj_by(A.inverse()).conj_by(A) == B


def test_inverse_of_conjugator():
    P = CycMatrix.from_rows([[1, -I], [1, I]])
    Pi = P.inverse()
    assert P @ Pi == CycMatrix.identity(2)
    # the inverse is P^* / 2
    assert Pi == P.transpose().map_entries(lambda v: v.conjugate()).scale(Fraction(1, 2))


def test_det_and_inverse_random():
    rng = random.Random(9)
    for _ in range(5):
        A = rand_matrix(rng, 3, 3)
        B = rand_matrix(rng, 3, 3)
        assert (A @ B).det() == A.det() * B.det()
        if not A.det().is_zero():
            assert A @ A.inverse() == CycMatrix.identity(3)


def test_matrix_json_roundtrip():
    A = rand_matrix(random.Random(2), 3, 8)
    assert CycMatrix.from_json(A.to_json()) == A


# --- permutation matrices -------------------------------------------------------------------------

def regular_decomposition(r, m):
    G = ab.FinAbGroup((r,))
    dims = {ch: m for ch in G.dual().elements()}
    return WeightDecomposition.from_dims(G, G.dual(), dims)


def block_shift(r, m):
    # sends block k to block k - 1
    perm = [((j // m - 1) % r) * m + j % m for j in range(r * m)]
    return CycMatrix.monomial(perm, [1] * (r * m))


def test_identity_is_delta_matrix():
    W = regular_decomposition(3, 2)
    s = analyze_permutation_matrix(CycMatrix.identity(6), W)
    assert s.p_image == (0,)
    assert all(b == CycMatrix.identity(2) for _, _, b in s.block_maps)


@pytest.mark.parametrize("r,m", [(2, 1), (3, 2), (4, 1), (2, 3)])
def test_block_shift_structure(r, m):
    W = regular_decomposition(r, m)
    s = analyze_permutation_matrix(block_shift(r, m), W)
    assert ab.FinAbGroup((r,)).element_order(s.p_image) == r
    assert all(b == CycMatrix.identity(m) for _, _, b in s.block_maps)


def test_diagonal_sign_split():
    W = regular_decomposition(2, 1)
    s = analyze_permutation_matrix(CycMatrix.diag([1, -1]), W)
    assert s.p_image == (0,)
    assert [b[0, 0] for _, _, b in s.block_maps] == [1, -1]


def test_composition_of_shifts():
    rng = random.Random(4)
    for r, m in [(3, 1), (4, 2)]:
        W = regular_decomposition(r, m)
        G = ab.FinAbGroup((r,))
        mats = []
        for _ in range(4):
            k = rng.randrange(r)
            D = CycMatrix.diag([root_of_unity(rng.randrange(4), 4) for _ in range(r * m)])
            mats.append(block_shift(r, m) ** k @ D)
        for A in mats:
            for B in mats:
                pa = analyze_permutation_matrix(A, W).p_image
                pb = analyze_permutation_matrix(B, W).p_image
                assert analyze_permutation_matrix(A @ B, W).p_image == G.add(pa, pb)


def test_non_permutation_rejected():
    W = regular_decomposition(2, 1)
    with pytest.raises(NotPermutation):
        analyze_permutation_matrix(CycMatrix.from_rows([[1, 1], [0, 1]]), W)


# --- symplectic -----------------------------------------------------------------------------------

def test_symplectic_examples():
    J = standard_J(2)
    assert is_symplectic(J)
    assert J @ J == -CycMatrix.identity(4)
    assert is_symplectic(CycMatrix.diag([2, Fraction(1, 2)]))
    assert symplectic_defect(CycMatrix.diag([2, 3])) == 6
    assert not is_symplectic(CycMatrix.diag([2, 3]))


def test_symplectic_closure():
    rng = random.Random(8)
    n = 2
    J = standard_J(n)
    gens = [J]
    for _ in range(6):
        # transvections x -> x + c <x, v> v stay in Sp
        v = [rng.randint(-1, 1) for _ in range(2 * n)]
        vv = CycMatrix.from_rows([[x] for x in v])
        c = rng.choice([1, -1, I])
        T = CycMatrix.identity(2 * n) + (vv @ vv.transpose() @ J).scale(c)
        assert is_symplectic(T)
        gens.append(T)
    for A in gens:
        for B in gens:
            assert is_symplectic(A @ B)
