import random

import pytest

from prymkit import abelian as ab
from prymkit import gl_fixed as gl
from prymkit import sp_fixed as sp
from prymkit.cyclotomic import CycMatrix, CycNum, I, is_symplectic, standard_J, symplectic_defect

Z2 = ab.FinAbGroup((2,))
KLEIN = ab.make_group([2, 2])
CUBE = ab.make_group([2, 2, 2])


def s_form_quadruple(n, q=(1,)):
    return sp.construct_admissible_s_sp(Z2, ab.trivial_pairing(Z2), ab.whole_group(Z2), q, n)


def eigen_squares(A):
    return {x * x for x in A.diagonal()}


# --- characteristic homomorphism -----------------------------------------------------------------

def test_characteristic_hom_examples():
    D = ab.whole_group(Z2)
    one = CycMatrix.identity(2)
    assert sp.characteristic_hom(Z2, D, {(0,): one, (1,): CycMatrix.diag([I, -I])}) == (1,)
    assert sp.characteristic_hom(Z2, D, {(0,): one, (1,): CycMatrix.diag([1, -1])}) == (0,)
    assert sp.characteristic_hom(Z2, D, {(0,): one, (1,): one}) == (0,)
    with pytest.raises(ValueError):
        sp.characteristic_hom(Z2, D, {(0,): one, (1,): CycMatrix.diag([1, I])})


def test_eigenvalues_follow_q():
    for G in (Z2, KLEIN, CUBE):
        for l in ab.enumerate_antisymmetric_pairings(G):
            D = ab.maximal_isotropic_subgroups(G, l)[0]
            iso = ab.isotropy_data(G, l, D)
            for q in iso.delta_dual.elements():
                n = sp._ker_q_order(iso, q)
                t = sp.construct_admissible_s_sp(G, l, D, q, n)
                for d in D.sorted_elements():
                    want = {CycNum.rational(1)} if t.q_value(d) == 1 else {CycNum.rational(-1)}
                    assert eigen_squares(t.image(d)) == want


# --- representative quadruples -------------------------------------------------------------------

def test_s_form_quadruple():
    for n in (1, 2, 3):
        t = s_form_quadruple(n)
        assert sp.check_representative_quadruple(t)
        assert t.image((1,)) == sp.S_form(n)
        assert sp.characteristic_hom(Z2, t.delta, t.s) == (1,)


def test_printed_k_matrix_is_not_symplectic():
    # K as printed satisfies K^T J K = -J; -iK is symplectic with real eigenvalues
    for p, q in [(1, 0), (1, 1), (2, 1)]:
        K = sp.K_matrix(p, q)
        assert symplectic_defect(K) == -1
        assert is_symplectic(K.scale(-I))
        assert eigen_squares(K) == {CycNum.rational(-1)}
        assert eigen_squares(K.scale(-I)) == {CycNum.rational(1)}


def test_k_matrix_quadruple_clause_report():
    t = s_form_quadruple(2, q=(0,))
    K = sp.K_matrix(1, 1)
    s = {(0,): CycMatrix.identity(4), (1,): K}
    bad = sp.RepQuadruple(Z2, t.pairing, t.delta, t.q, 2, s, t.layout, t.iso)
    rep = sp.check_representative_quadruple(bad)
    assert not rep and 0 in rep.failed
    assert sp.characteristic_hom(Z2, t.delta, s) == (1,)


def test_swap_as_delta_image_fails_diagonal_clause():
    t = s_form_quadruple(2, q=(0,))
    T = sp.T_matrix(2)
    s = {(0,): CycMatrix.identity(4), (1,): T}
    bad = sp.RepQuadruple(Z2, t.pairing, t.delta, t.q, 2, s, t.layout, t.iso)
    rep = sp.check_representative_quadruple(bad)
    assert not rep and 2 in rep.failed


def test_all_images_symplectic_and_roundtrips():
    for G in (Z2, KLEIN, CUBE):
        for l in ab.enumerate_antisymmetric_pairings(G):
            D = ab.maximal_isotropic_subgroups(G, l)[0]
            iso = ab.isotropy_data(G, l, D)
            for q in iso.delta_dual.elements():
                for n in range(1, 5):
                    if n % sp._ker_q_order(iso, q):
                        continue
                    t = sp.construct_admissible_s_sp(G, l, D, q, n)
                    assert all(t.image(x).transpose() @ t.J @ t.image(x) == t.J for x in G.elements())
                    assert gl.induced_pairing(t.s, G) == l
                    assert sp.characteristic_hom(G, D, t.s, iso.delta_dual) == q


def test_not_exponent_two():
    with pytest.raises(sp.NotExponentTwo):
        sp.construct_admissible_s_sp(ab.FinAbGroup((4,)), ab.trivial_pairing(ab.FinAbGroup((4,))),
                                     ab.whole_group(ab.FinAbGroup((4,))), (1,), 2)


# --- normalization -------------------------------------------------------------------------------

def test_j_normalized_to_s_form():
    for n in (1, 2, 3):
        J = standard_J(n)
        raw = {(0,): CycMatrix.identity(2 * n), (1,): J}
        t, g = sp.normalize_sp(Z2, raw)
        assert is_symplectic(g)
        assert t.image((1,)) in (sp.S_form(n), -sp.S_form(n))
        assert sp.verify_conjugation_sp(raw, t, g)


def test_normalized_input_returns_equal_class():
    t = s_form_quadruple(2)
    t2, g = sp.normalize_sp(Z2, t.s, t.delta)
    assert sp.theta_class_sp(t2) == sp.theta_class_sp(t)
    assert sp.verify_conjugation_sp(t.s, t2, g)


@pytest.mark.parametrize("seed", range(3))
def test_random_symplectic_conjugates(seed):
    rng = random.Random(seed)
    l = ab.pairing_from_values(KLEIN, [[0, 1], [1, 0]])
    D = ab.maximal_isotropic_subgroups(KLEIN, l)[0]
    cases = [s_form_quadruple(2), sp.construct_admissible_s_sp(KLEIN, l, D, (0, 0), 2)]
    for t in cases:
        g = sp.random_integer_symplectic(t.n, rng)
        assert is_symplectic(g)
        gi = g.inverse()
        raw = {x: g @ A @ gi for x, A in t.s.items()}
        t2, h = sp.normalize_sp(t.group, raw, t.delta)
        assert sp.check_representative_quadruple(t2)
        assert sp.theta_class_sp(t2) == sp.theta_class_sp(t)
        assert sp.verify_conjugation_sp(raw, t2, h)


# --- M^gamma -------------------------------------------------------------------------------------

def test_trivial_character_m_gamma():
    t = s_form_quadruple(2)
    M = sp.build_M_gamma_sp(t, (0,)).matrix
    assert M.scalar_value() is not None


def test_m_gamma_on_s_form_is_j_like():
    for n in (1, 2):
        t = s_form_quadruple(n)
        M = sp.build_M_gamma_sp(t, (1,)).matrix
        assert is_symplectic(M)
        assert M @ M == -CycMatrix.identity(2 * n)
        assert sp.check_defining_relation_sp(t, (1,), M)
        # J itself has the same defining relation
        assert sp.check_defining_relation_sp(t, (1,), standard_J(n).with_conductor(4))


def test_square_signs_and_anticommutation():
    count = 0
    for G in (Z2, KLEIN, CUBE):
        for l in ab.enumerate_antisymmetric_pairings(G):
            D = ab.maximal_isotropic_subgroups(G, l)[0]
            iso = ab.isotropy_data(G, l, D)
            for q in iso.delta_dual.elements():
                n = sp._ker_q_order(iso, q)
                for t in sp.variants_of(G, l, D, q, n):
                    Dm = sp.half_sign_matrix(t)
                    Id = CycMatrix.identity(2 * n)
                    for gam in G.dual().elements():
                        M = sp.build_M_gamma_sp(t, gam).matrix
                        assert is_symplectic(M)
                        assert M @ M in (Id, -Id)
                        if sp.m_gamma_case(t, gam) == "q_eq_gamma":
                            assert M @ M == -Id
                            assert Dm @ M == -(M @ Dm)
                            count += 1
    assert count > 0


# --- admissibility and construction --------------------------------------------------------------

def test_admissibility_examples():
    for n in (1, 2, 3):
        assert sp.is_admissible_sp(s_form_quadruple(n)).by_c_theta
    with pytest.raises(gl.NotAdmissible):
        s_form_quadruple(1, q=(0,))
    G = ab.FinAbGroup(())
    t = sp.construct_admissible_s_sp(G, ab.trivial_pairing(G), ab.whole_group(G), (), 2)
    assert sp.is_admissible_sp(t) and sp.is_admissible_sp(t).agree


def test_t_model_for_trivial_q():
    t = s_form_quadruple(2, q=(0,))
    A = t.image((1,))
    assert A @ A == CycMatrix.identity(4)
    assert sp.eigenspace_type(A) == "symplectic"
    c = sp.sp_order2_catalog(2)
    assert c.checks["T_squared_identity"] and c.checks["cocycle_T_trivial"]


def test_order_variants_distinct_classes():
    G = KLEIN
    l = ab.pairing_from_values(G, [[0, 1], [1, 0]])
    D = ab.maximal_isotropic_subgroups(G, l)[0]
    t2 = sp.construct_admissible_s_sp(G, l, D, (0, 0), 2, order_choice=2)
    t4 = sp.construct_admissible_s_sp(G, l, D, (0, 0), 2, order_choice=4)
    lam = t2.steps[-1].generator
    assert dict(sp.order_tags(t2))[lam] == 2 and dict(sp.order_tags(t4))[lam] == 4
    assert sp.theta_class_sp(t2) != sp.theta_class_sp(t4)
    with pytest.raises(sp.InvalidOrderChoice):
        q = next(x for x in ab.isotropy_data(G, l, D).delta_dual.elements() if x != (0, 0))
        sp.construct_admissible_s_sp(G, l, D, q, 1, order_choice=2)


def test_variant_count_table():
    assert sp.variant_count("q_gamma") == 1
    assert sp.variant_count("q_in_f") == 2
    assert sp.variant_count("q_generic") == 2
    assert sp.forced_square("q_gamma") == -1 and sp.forced_square("q_in_f") == 1


def test_q_gamma_conjugator_identifies():
    G = KLEIN
    l = ab.pairing_from_values(G, [[0, 1], [1, 0]])
    D = ab.maximal_isotropic_subgroups(G, l)[0]
    iso = ab.isotropy_data(G, l, D)
    q = next(x for x in iso.delta_dual.elements() if x != iso.delta_dual.zero)
    r = sp.order_variant_report(G, l, D, q, 1)
    assert r["case"] == "q_gamma"
    assert r["printed_conjugators_identify"] and r["single_class"]


def test_generic_case_on_cube():
    l = next(p for p in ab.enumerate_antisymmetric_pairings(CUBE) if not p.is_trivial())
    D = ab.maximal_isotropic_subgroups(CUBE, l)[0]
    iso = ab.isotropy_data(CUBE, l, D)
    seen = set()
    for q in iso.delta_dual.elements():
        n = sp._ker_q_order(iso, q)
        r = sp.order_variant_report(CUBE, l, D, q, n)
        seen.add(r["case"])
        if r["case"] == "q_generic":
            assert r["printed_conjugators_identify"]
            assert r["sign_variant_valid"] and r["sign_variant_square"]
            assert not r["sign_variant_same_class"]
            assert r["classes"] == 2
    assert "q_generic" in seen


def test_trivial_lambda_single_class():
    G = ab.FinAbGroup(())
    vs = sp.variants_of(G, ab.trivial_pairing(G), ab.whole_group(G), (), 3)
    assert len(vs) == 1


# --- catalog and census --------------------------------------------------------------------------

def test_order_two_catalog():
    for n in (1, 2, 3):
        c = sp.sp_order2_catalog(n)
        ch = c.checks
        assert ch["J_squared_minus_identity"] and ch["J_equals_Pinv_S_P"] and ch["cocycle_J"]
        assert ch["P_defect"] is not None and ch["P_normalized_symplectic"]
        assert not ch["P_S_Pinv_equals_J"]


def admissible(rows):
    return [r for r in rows if r["admissible"]]


def test_census_sp2():
    rows = sp.enumerate_components_sp(1, Z2)
    assert [(r["q"], r["admissible"]) for r in rows] == [([0], False), ([1], True)]


def test_census_line_bundle_row():
    for m in (1, 2):
        G = ab.make_group([2] * m)
        n = 2 ** m // 2
        rows = admissible(sp.enumerate_components_sp(n, G))
        triv = [r for r in rows if not any(r["pairing_upper"]) and not r["q_trivial"]]
        assert triv and all(r["rank"] == 1 for r in triv)


def test_census_trivial_group():
    rows = sp.enumerate_components_sp(2, ab.FinAbGroup(()))
    assert len(rows) == 1 and rows[0]["admissible"]


def test_census_witnesses_reload():
    for r in admissible(sp.enumerate_components_sp(2, KLEIN)):
        for v in r["variants"]:
            assert all(v["checks"].values())
            t = sp.RepQuadruple.from_json(v["witness"])
            assert sp.check_representative_quadruple(t)
