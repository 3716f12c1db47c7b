import itertools
import random

import pytest

from prymkit import clifford as cl
from prymkit import extensions as ext
from prymkit.cyclotomic import CycMatrix, CycNum, I


def naive_monomial_product(a, b):
    """Product of basis monomials by bubble sort, e_i e_j = -e_j e_i and e_i e_i = -1."""
    word = list(a) + list(b)
    sign = 1
    changed = True
    while changed:
        changed = False
        for k in range(len(word) - 1):
            if word[k] > word[k + 1]:
                word[k], word[k + 1] = word[k + 1], word[k]
                sign = -sign
                changed = True
            elif word[k] == word[k + 1]:
                del word[k:k + 2]
                sign = -sign
                changed = True
                break
    return sign, tuple(word)


def naive_product(x, y):
    out = {}
    for ma, ca in x.items():
        for mb, cb in y.items():
            s, m = naive_monomial_product(ma, mb)
            out[m] = out.get(m, CycNum.rational(0)) + ca * cb * s
    return {m: c for m, c in out.items() if not c.is_zero()}


def as_dict(x: cl.CliffordElem):
    return {cl._subset(m): c for m, c in x.terms.items()}


def random_elem(rng, n, k=4):
    terms = {}
    for _ in range(k):
        sub = tuple(sorted(rng.sample(range(1, n + 1), rng.randint(0, n))))
        terms[sub] = CycNum.rational(rng.randint(-3, 3)) + I * rng.randint(-2, 2)
    return cl.CliffordElem(n, terms)


# --- algebra --------------------------------------------------------------------------------------

def test_basic_products():
    e1 = cl.CliffordElem.basis(3, 1)
    e12 = cl.CliffordElem.basis(3, 1, 2)
    assert e1 * e1 == -1
    assert e12 * e12 == -1
    s = cl.CliffordElem.basis(4, 1, 3) * I
    assert s * s == 1
    assert cl.CliffordElem.basis(3, 2) * cl.CliffordElem.basis(3, 1) == -e12


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_product_matches_naive(n):
    rng = random.Random(n)
    for _ in range(20):
        x, y = random_elem(rng, n), random_elem(rng, n)
        assert as_dict(cl.clifford_product(x, y)) == naive_product(as_dict(x), as_dict(y))


def test_associativity_and_grades():
    rng = random.Random(1)
    for _ in range(20):
        x, y, z = (random_elem(rng, 4) for _ in range(3))
        assert (x * y) * z == x * (y * z)
        xe, ye = x.grade(0) + x.grade(2) + x.grade(4), y.grade(0) + y.grade(2)
        assert (xe * ye).is_even()
        assert sum((x.grade(k) for k in range(5)), cl.CliffordElem(4)) == x


def test_reverse_and_inverse():
    rng = random.Random(2)
    for _ in range(10):
        v = cl.CliffordElem.vector(cl.random_unit_vector(4, rng))
        w = cl.CliffordElem.vector(cl.random_unit_vector(4, rng))
        x = v * w
        assert x * x.inverse() == 1
        assert (x * v).reverse() == v.reverse() * x.reverse()
    with pytest.raises(cl.NotInvertible):
        (1 + cl.CliffordElem.basis(2, 1) * I).inverse()


def test_dimension_mismatch():
    with pytest.raises(cl.DimensionMismatch):
        cl.CliffordElem.basis(2, 1) * cl.CliffordElem.basis(3, 1)


def test_json_and_repr():
    x = cl.CliffordElem.basis(4, 1, 3) * I + 2
    assert cl.CliffordElem.from_json(x.to_json()) == x
    assert "e1e3" in repr(x)


# --- covering map ---------------------------------------------------------------------------------

def test_empty_word_is_identity():
    assert cl.covering_map(cl.SpinWord([], n=5)) == CycMatrix.identity(5)


def test_rotation_pair_by_pi():
    w = cl.SpinWord([cl.e_vec(4, 1), cl.e_vec(4, 2)])
    assert cl.covering_map(w) == CycMatrix.diag([-1, -1, 1, 1])


def test_reflection_pair_of_s():
    d = cl.build_spin_involution_data(4, 2, 2)
    assert cl.covering_map(d.s) == CycMatrix.diag([-1, 1, -1, 1])


def test_odd_word_rejected():
    with pytest.raises(cl.OddWord):
        cl.covering_map(cl.SpinWord([cl.e_vec(3, 1)]))


def test_kernel_and_membership():
    rng = random.Random(3)
    for n in (3, 4, 6):
        w = cl.random_spin_word(n, rng)
        M = cl.covering_map(w)
        assert (M.transpose() @ M).is_identity() and M.det() == 1
        assert cl.covering_map(-w) == M
    minus = cl.SpinWord([], CycNum.rational(-1), 3)
    assert cl.covering_map(minus).is_identity()
    assert minus.value != cl.CliffordElem.scalar(3, 1)


def test_adjoint_by_hand():
    # Ad(v1 v2) on e_j computed directly from the product
    rng = random.Random(4)
    n = 4
    for _ in range(5):
        w = cl.random_spin_word(n, rng, max_pairs=1)
        if not w.vectors:
            continue
        x, xi = w.value, w.inverse().value
        M = cl.covering_map(w)
        for j in range(n):
            y = x * cl.CliffordElem.basis(n, j + 1) * xi
            col = [y.terms.get(1 << i, CycNum.rational(0)) for i in range(n)]
            assert [M[i, j] for i in range(n)] == col


@pytest.mark.parametrize("n", [3, 4, 5])
def test_covering_homomorphism_small(n):
    assert cl.check_covering_homomorphism(n, trials=30, seed=n)


def test_spin_word_group_ops():
    rng = random.Random(5)
    w = cl.random_spin_word(4, rng)
    assert (w * w.inverse()).value == 1
    with pytest.raises(ValueError):
        cl.SpinWord([(1, 1, 0)])


# --- involutions ----------------------------------------------------------------------------------

def test_spin_involution_checks():
    d = cl.build_spin_involution_data(4, 2, 2)
    for k in ("s_squared_one", "s_inverse_is_s", "f_s_is_reflection_pair", "Ad_s_preserves_generators",
              "Ad_s_matches_reflections", "s_not_central"):
        assert d.checks[k], k
    # the generators mixing v_1 or v_{p+1} with another index anticommute with s
    assert sorted(d.checks["anticommuting_generators"]) == [[1, 2], [3, 4]]


def test_spin_involution_bad_parameters():
    with pytest.raises(ValueError):
        cl.build_spin_involution_data(5, 3, 2)


def test_j_prime_m1():
    Jp = cl.j_prime(1)
    half = CycNum.rational(1) / 2
    expected = cl.CliffordElem(4, {(): half, (1, 3): -half, (2, 4): -half, (1, 2, 3, 4): -half})
    assert Jp.value == expected
    assert cl.covering_map(Jp) == cl.block_J(4)


@pytest.mark.parametrize("m", [1, 2])
def test_j_prime_square_is_volume(m):
    Jp = cl.j_prime(m).value
    vol = cl.CliffordElem.basis(4 * m, *range(1, 4 * m + 1))
    sq = Jp * Jp
    assert sq == (-vol if m == 1 else vol)
    assert sq != -1


@pytest.mark.parametrize("m", [1, 2])
def test_spin4m_cocycle(m):
    S = cl.spin4m_cocycle(m)
    for k in ("f_J_prime_is_J", "J_prime_squared_over_minus_identity", "J_prime_squared_is_volume",
              "s_squared_one", "tau_a_exchanges_factors", "cocycle_verified", "normalized"):
        assert S.checks[k], k
    assert not S.checks["J_prime_squared_minus_one"]
    assert ext.verify_cocycle(S.cocycle)
    assert S.exception_set() == {("a", "a"), ("a", "ab"), ("ab", "a"), ("ab", "ab")}
    assert all(S.table()[("1", x)] == 1 for x in ("1", "a", "b", "ab"))


def test_spin4m_values_central():
    S = cl.spin4m_cocycle(1)
    vol = cl.CliffordElem.basis(4, 1, 2, 3, 4)
    centre = {cl.CliffordElem.scalar(4, 1), cl.CliffordElem.scalar(4, -1), vol, -vol}
    assert set(S.table().values()) <= centre
    for i, j in itertools.combinations(range(1, 5), 2):
        g = cl.CliffordElem.basis(4, i, j)
        assert all(v * g == g * v for v in S.table().values())
