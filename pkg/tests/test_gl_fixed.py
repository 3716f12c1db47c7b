import itertools
import random

import pytest

from prymkit import abelian as ab
from prymkit import extensions as ext
from prymkit import gl_fixed as gl
from prymkit.cyclotomic import CycMatrix, CycNum, I, analyze_permutation_matrix, root_of_unity

KLEIN = ab.make_group([2, 2])
NONDEG = ab.pairing_from_values(KLEIN, [[0, 1], [1, 0]])


def nondeg_klein_triple(n=2):
    D = ab.maximal_isotropic_subgroups(KLEIN, NONDEG)[0]
    return gl.construct_admissible_s(KLEIN, NONDEG, D, n)


def cyclic_triple(r, m):
    G = ab.FinAbGroup((r,))
    return gl.construct_admissible_s(G, ab.trivial_pairing(G), ab.whole_group(G), r * m)


def with_images(t, images):
    s = gl.extend_from_generators(t.group, images, t.n)
    return gl.RepTriple(t.group, t.pairing, t.delta, t.n, s, t.W, t.iso)


def commutator_scalar(A, B):
    C = A @ B @ A.inverse() @ B.inverse()
    return C.scalar_value()


def random_invertible(rng, n):
    while True:
        X = CycMatrix.from_rows([[rng.choice([0, 1, -1, I]) for _ in range(n)] for _ in range(n)])
        if not X.det().is_zero():
            return X


# --- induced pairing ------------------------------------------------------------------------------

def test_pairing_from_shift_and_clock():
    for r in (2, 3, 4):
        M, S = gl.cyclic_model(r, 1)
        G = ab.FinAbGroup((r, r))
        l = gl.induced_pairing(gl.extend_from_generators(G, [M, S], r), G)
        c = commutator_scalar(M, S)
        assert c ** r == 1 and c != 1
        assert l((1, 0), (0, 1)) == gl.scalar_exponent(c, r)


def test_commuting_images_give_trivial_pairing():
    G = KLEIN
    s = gl.extend_from_generators(G, [CycMatrix.diag([1, -1]), CycMatrix.diag([-1, 1])], 2)
    assert gl.induced_pairing(s, G).is_trivial()


def test_diag_and_antidiag_give_minus_one():
    a = CycMatrix.diag([1, -1])
    b = CycMatrix.from_rows([[0, 1], [1, 0]])
    assert commutator_scalar(a, b) == -1
    l = gl.induced_pairing(gl.extend_from_generators(KLEIN, [a, b], 2), KLEIN)
    assert l == NONDEG
    assert l((1, 0), (0, 1)) == 1  # exponent of zeta_2


# --- representative triples -----------------------------------------------------------------------

def test_constructed_klein_triple():
    t = nondeg_klein_triple()
    assert gl.check_representative_triple(t)
    d = t.delta.generators[0]
    x = next(x for x in KLEIN.elements() if x not in t.delta.elements)
    a, b = t.image(d), t.image(x)
    assert a.is_diagonal() and set(a.diagonal()) == {CycNum.rational(1), CycNum.rational(-1)}
    assert not b.is_diagonal() and b.is_monomial()
    assert commutator_scalar(a, b) == -1


@pytest.mark.parametrize("r,m", [(2, 1), (2, 3), (3, 2), (4, 1), (8, 1)])
def test_cyclic_triples_are_representatives(r, m):
    t = cyclic_triple(r, m)
    assert gl.check_representative_triple(t)
    assert sorted(t.W.dims().values()) == [m] * r


def test_rescaled_block_breaks_clause_four():
    t = nondeg_klein_triple(4)
    a, b = t.image((1, 0)), t.image((0, 1))
    rows = b.to_rows()
    # scale one entry of a 2x2 block: the block stops being scalar
    i, j = next((i, j) for i, r in enumerate(b.rows) for j in r)
    rows[i][j] = rows[i][j] * 2
    b2 = CycMatrix.from_rows(rows)
    rep = gl.check_representative_triple(with_images(t, [a, b2]))
    assert not rep and 4 in rep.failed


def test_non_diagonal_delta_breaks_clause_one():
    t = nondeg_klein_triple()
    x = next(x for x in KLEIN.elements() if x not in t.delta.elements)
    b = t.image(x)
    bad = with_images(t, [b, b])
    rep = gl.check_representative_triple(bad)
    assert not rep and 1 in rep.failed


# --- normalization --------------------------------------------------------------------------------

def test_normalized_input_needs_no_conjugation():
    t = cyclic_triple(2, 2)
    t2, g = gl.normalize_to_representative(t.group, t.s, t.delta)
    assert g.scalar_value() is not None
    assert gl.theta_class(t2) == gl.theta_class(t)


def test_swap_matrix_diagonalized():
    G = ab.FinAbGroup((2,))
    raw = {(0,): CycMatrix.identity(2), (1,): CycMatrix.from_rows([[0, 1], [1, 0]])}
    t, g = gl.normalize_to_representative(G, raw)
    assert t.delta.order == 2
    assert t.image((1,)) == CycMatrix.diag([1, -1])
    assert gl.verify_conjugation(raw, t, g)


@pytest.mark.parametrize("seed", range(4))
def test_random_conjugate_roundtrip(seed):
    rng = random.Random(seed)
    for t in (cyclic_triple(4, 1), nondeg_klein_triple(4)):
        X = random_invertible(rng, t.n)
        Xi = X.inverse()
        raw = {x: X @ A @ Xi for x, A in t.s.items()}
        t2, g = gl.normalize_to_representative(t.group, raw, t.delta)
        assert gl.check_representative_triple(t2)
        assert gl.verify_conjugation(raw, t2, g)
        assert gl.theta_class(t2) == gl.theta_class(t)


# --- c_theta and Sigma_theta ----------------------------------------------------------------------

def test_c_theta_examples():
    r = 4
    t = cyclic_triple(r, 1)
    M, S = gl.cyclic_model(r, 1)
    assert gl.c_theta(CycMatrix.identity(r).scale(root_of_unity(1, 8)), t) == (0,)
    ch = gl.c_theta(S, t)
    assert t.group.element_order(ch) == r
    # the value on the generator matches the commutator computed by hand
    c = commutator_scalar(t.image((1,)), S)
    assert t.group.char_eval(ch, (1,)) == gl.scalar_exponent(c, r)
    assert gl.c_theta(CycMatrix.diag([2, 3, 5, 7]), t) == (0,)


def test_c_theta_multiplicative_and_kernel():
    t = nondeg_klein_triple(4)
    gens = gl.g_theta_generators(t)
    Ms = [gl.build_M_gamma(t, g) for g in KLEIN.dual().elements()]
    pool = gens[:4] + Ms
    D = KLEIN.dual()
    for A, B in itertools.product(pool, repeat=2):
        assert gl.c_theta(A @ B, t) == D.add(gl.c_theta(A, t), gl.c_theta(B, t))
    for A in pool:
        assert (gl.c_theta(A, t) == D.zero) == gl.in_g_theta(A, t)


def test_sigma_theta_full_for_equal_multiplicities():
    for r, m in [(2, 2), (3, 1), (4, 2)]:
        t = cyclic_triple(r, m)
        assert gl.sigma_theta(t).order == r
        gen = (1,)
        Mg = gl.build_M_gamma(t, gen)
        st = analyze_permutation_matrix(Mg, t.W)
        assert st.all_scalar
        assert t.group.element_order(st.p_image) == r


def test_sigma_theta_unequal_multiplicities():
    G = ab.FinAbGroup((2,))
    l = ab.trivial_pairing(G)
    t = gl.triple_from_profile(G, l, ab.whole_group(G), {(0,): 1, (1,): 2})
    assert gl.sigma_theta(t).order == 1
    assert not gl.is_admissible(t)
    assert gl.is_admissible(t).agree


def test_defining_relation_all_gammas():
    t = nondeg_klein_triple(4)
    for gam in KLEIN.dual().elements():
        M = gl.build_M_gamma(t, gam)
        assert gl.check_defining_relation(t, gam, M)
        for lam in KLEIN.elements():
            lhs = t.image(lam) @ M @ t.image_inv(lam)
            val = root_of_unity(KLEIN.char_eval(gam, lam), 2)
            assert lhs == M.scale(val)


def test_identity_character_gives_identity():
    t = nondeg_klein_triple()
    M = gl.build_M_gamma(t, KLEIN.dual().zero)
    assert M.scalar_value() is not None


# --- admissibility --------------------------------------------------------------------------------

def test_admissibility_examples():
    t = cyclic_triple(3, 2)
    assert gl.is_admissible(t) and gl.is_admissible(t).agree
    D = ab.maximal_isotropic_subgroups(KLEIN, NONDEG)[0]
    with pytest.raises(gl.NotAdmissible):
        gl.construct_admissible_s(KLEIN, NONDEG, D, 3)
    G = ab.FinAbGroup((2,))
    t1 = gl.triple_from_profile(G, ab.trivial_pairing(G), ab.whole_group(G), {(0,): 2})
    assert not gl.is_admissible(t1).by_weights
    assert not gl.is_admissible(t1).by_c_theta


def test_trivial_group():
    G = ab.FinAbGroup(())
    for n in (1, 3):
        t = gl.construct_admissible_s(G, ab.trivial_pairing(G), ab.whole_group(G), n)
        assert t.image(()) == CycMatrix.identity(n)
        assert gl.is_admissible(t)


def test_small_sweep_equivalence_and_lemma_checks():
    res = gl.admissibility_sweep(4, 4)
    assert res.profiles > 0 and not res.disagreements
    for t in res.admissible_triples:
        assert not gl.relation_and_centrality_checks(t)


def test_roundtrip_pairing_for_all_small_groups():
    for G in gl.abelian_groups_up_to(8):
        for l in ab.enumerate_antisymmetric_pairings(G):
            D = ab.maximal_isotropic_subgroups(G, l)[0]
            n = D.order * 2 if D.order * 2 <= 8 else D.order
            t = gl.construct_admissible_s(G, l, D, n)
            assert gl.induced_pairing(t.s, G) == l


# --- classes --------------------------------------------------------------------------------------

def test_class_independent_of_representatives():
    t = nondeg_klein_triple(2)
    basis = ab.find_basis(t.iso.quotient)
    other = [x for x in KLEIN.elements() if t.iso.quotient.rep_of(x) == basis[0] and x != basis[0]]
    t2 = gl.construct_admissible_s(KLEIN, NONDEG, t.delta, 2, basis=other)
    assert gl.theta_class(t) == gl.theta_class(t2)
    assert gl.monomial_conjugator_search(t, t2) is not None


def test_distinct_pairings_distinct_classes():
    triv = gl.construct_admissible_s(KLEIN, ab.trivial_pairing(KLEIN), ab.whole_group(KLEIN), 4)
    nd = nondeg_klein_triple(4)
    assert gl.theta_class(triv) != gl.theta_class(nd)


# --- block group ----------------------------------------------------------------------------------

def test_cyclic_block_group():
    r, m = 3, 2
    t = cyclic_triple(r, m)
    bd = gl.block_group_and_tau(t)
    assert len(bd.labels) == r and set(bd.block_dims.values()) == {m}
    gen = (1,)
    perm = bd.tau[gen]
    assert sorted(perm.values()) == sorted(bd.labels)
    assert all(perm[O] != O for O in bd.labels)
    assert ext.verify_cocycle(bd.cocycle)


def test_cyclic_section_by_shift_powers():
    r, m = 4, 1
    t = cyclic_triple(r, m)
    M, S = gl.cyclic_model(r, m)
    section = {}
    P = CycMatrix.identity(r * m, S.N)
    for k in range(r):
        section[(k,)] = P
        P = P @ S
    bd = gl.block_group_and_tau(t, section=section)
    one = CycMatrix.identity(r * m)
    assert all(v == one for v in bd.cocycle.table.values())


def test_trivial_lambda_block_group():
    G = ab.FinAbGroup(())
    t = gl.construct_admissible_s(G, ab.trivial_pairing(G), ab.whole_group(G), 2)
    bd = gl.block_group_and_tau(t)
    assert list(bd.tau.values()) == [{O: O for O in bd.labels}]
    assert all(v.is_identity() for v in bd.phi.values())


@pytest.mark.parametrize("orders,n", [((2,), 2), ((3,), 3), ((2, 2), 2), ((4,), 4), ((2, 4), 2)])
def test_finite_block_models(orders, n):
    G = ab.FinAbGroup(orders)
    for l in ab.enumerate_antisymmetric_pairings(G):
        D = ab.maximal_isotropic_subgroups(G, l)[0]
        if n % D.order:
            continue
        t = gl.construct_admissible_s(G, l, D, n)
        T, data, gens = gl.finite_block_model(t)
        assert ext.check_twisted_product(T, gens)
        assert ext.section_roundtrip(T, gens)
        assert all(gl.in_center_of_g_theta(v, t) for v in data.cocycle.table.values())
        if T.size() <= 64:
            assert ext.check_associativity_bruteforce(T, limit=64)


# --- census ---------------------------------------------------------------------------------------

def admissible(rows):
    return [r for r in rows if r["admissible"]]


def test_census_klein_group():
    rows6 = admissible(gl.enumerate_components_gl(6, KLEIN))
    assert len(rows6) == 1 and rows6[0]["pairing_upper"] == [1] and rows6[0]["rank"] == 3
    rows4 = admissible(gl.enumerate_components_gl(4, KLEIN))
    assert sorted(r["rank"] for r in rows4) == [1, 2]
    assert all(all(r["checks"].values()) for r in rows4)


def test_census_empty_when_order_does_not_divide():
    assert not admissible(gl.enumerate_components_gl(3, ab.FinAbGroup((2,))))


def test_census_dedup():
    G = ab.make_group([2, 2, 2])
    full = gl.enumerate_components_gl(2, G)
    dedup = gl.enumerate_components_gl(2, G, dedup_aut=True)
    assert sum(r["orbit_size"] for r in dedup) == len(full)


def test_witness_json_roundtrip():
    for r in admissible(gl.enumerate_components_gl(4, KLEIN)):
        t = gl.RepTriple.from_json(r["witness"])
        assert gl.check_representative_triple(t)
        assert t.to_json() == r["witness"]


def test_guard():
    with pytest.raises(ab.GuardExceeded):
        gl.enumerate_components_gl(2, ab.make_group([2] * 9))
