import itertools
import math
import random
from collections import Counter

import pytest

from prymkit import abelian as ab


def order_census(group):
    return Counter(group.element_order(x) for x in group.elements())


def brute_pairing_count(d):
    """Count alternating bicharacters on Z/d1 x ... by checking every exponent table."""
    k = len(d)
    N = d[-1] if d else 1
    count = 0
    slots = [(i, j) for i in range(k) for j in range(i + 1, k)]
    for vals in itertools.product(range(N), repeat=len(slots)):
        table = [[0] * k for _ in range(k)]
        for (i, j), v in zip(slots, vals):
            table[i][j] = v
            table[j][i] = -v % N
        # well defined: d_i * <e_i, e_j> must vanish in both arguments
        if all((d[i] * table[i][j]) % N == 0 and (d[j] * table[i][j]) % N == 0 for i, j in slots):
            count += 1
    return count


def all_subgroups(group):
    subs = set()
    elems = group.elements()
    for gens in itertools.product(elems, repeat=max(len(group.invariant_factors), 1)):
        subs.add(frozenset(ab.generated_subgroup_elements(group, list(gens))))
    return subs


# --- construction ---------------------------------------------------------------------------------

def test_make_group_examples():
    assert ab.make_group([2, 2]).invariant_factors == (2, 2)
    assert ab.make_group([2, 2]).order == 4
    assert ab.make_group([2, 4]).invariant_factors == (2, 4)
    assert ab.make_group([2, 3]).invariant_factors == (6,)
    assert ab.make_group([]).invariant_factors == ()
    assert ab.make_group([1]).order == 1


def test_crt_merge_matches_census():
    G = ab.make_group([2, 3])
    cyclic6 = ab.FinAbGroup((6,))
    assert order_census(G) == order_census(cyclic6)
    assert ab.invariant_factors_by_census(ab.FinAbGroup((2, 6))) == (2, 6)


@pytest.mark.parametrize("orders", [[4, 6], [2, 2, 3], [9, 3], [8, 2, 4]])
def test_canonical_form_preserves_isomorphism_type(orders):
    G = ab.make_group(orders)
    assert G.order == math.prod(orders)
    for a, b in zip(G.invariant_factors, G.invariant_factors[1:]):
        assert b % a == 0


def test_bad_inputs():
    with pytest.raises(ValueError):
        ab.make_group([0])
    with pytest.raises(ValueError):
        ab.FinAbGroup((4, 2))


# --- pairings -------------------------------------------------------------------------------------

def test_trivial_pairing_is_zero():
    G = ab.make_group([2, 4])
    l = ab.trivial_pairing(G)
    assert all(ab.eval_pairing(l, a, b) == 0 for a in G.elements() for b in G.elements())


def test_nondegenerate_pairing_on_klein_group():
    G = ab.make_group([2, 2])
    l = ab.pairing_from_values(G, [[0, 1], [1, 0]])
    assert ab.eval_pairing(l, (1, 0), (0, 1)) == G.exponent // 2
    # bilinearity by exhaustion
    E = G.elements()
    for a, b, c in itertools.product(E, repeat=3):
        assert ab.eval_pairing(l, G.add(a, b), c) == (ab.eval_pairing(l, a, c) + ab.eval_pairing(l, b, c)) % 2
        assert ab.eval_pairing(l, a, G.add(b, c)) == (ab.eval_pairing(l, a, b) + ab.eval_pairing(l, a, c)) % 2


def test_antisymmetry_random_pairs():
    rng = random.Random(7)
    G = ab.make_group([2, 4])
    N = G.exponent
    for l in ab.enumerate_antisymmetric_pairings(G):
        for _ in range(100):
            a, b = rng.choice(G.elements()), rng.choice(G.elements())
            assert (ab.eval_pairing(l, a, b) + ab.eval_pairing(l, b, a)) % N == 0
            assert ab.eval_pairing(l, a, a) == 0


@pytest.mark.parametrize("d", [(2, 2), (3, 3), (2, 4), (4, 4), (2, 2, 2), (2, 6)])
def test_pairing_count_matches_brute_force(d):
    G = ab.FinAbGroup(d)
    assert len(ab.enumerate_antisymmetric_pairings(G)) == brute_pairing_count(d)


def test_pairing_counts_examples():
    assert len(ab.enumerate_antisymmetric_pairings(ab.make_group([2, 2]))) == 2
    assert len(ab.enumerate_antisymmetric_pairings(ab.make_group([3, 3]))) == 3
    for n in (1, 2, 5, 12):
        assert len(ab.enumerate_antisymmetric_pairings(ab.make_group([n]))) == 1


def test_non_antisymmetric_rejected():
    G = ab.make_group([2, 2])
    with pytest.raises(ab.NotAntisymmetric):
        ab.Pairing(G, ((1, 0), (0, 0)))


def test_pairing_json_roundtrip():
    G = ab.make_group([2, 4])
    for l in ab.enumerate_antisymmetric_pairings(G):
        assert ab.Pairing.from_json(G, l.to_json()) == l


def test_enumeration_guard():
    with pytest.raises(ab.GuardExceeded):
        ab.enumerate_antisymmetric_pairings(ab.make_group([4, 4, 4, 4, 4]))


# --- isotropic subgroups --------------------------------------------------------------------------

def brute_maximal_isotropic(G, l):
    iso = [S for S in all_subgroups(G)
           if all(ab.eval_pairing(l, a, b) == 0 for a in S for b in S)]
    return {S for S in iso if not any(S < T for T in iso)}


@pytest.mark.parametrize("d", [(2, 2), (2, 4), (3, 3), (2, 2, 2), (4, 4)])
def test_maximal_isotropic_match_brute_force(d):
    G = ab.FinAbGroup(d)
    for l in ab.enumerate_antisymmetric_pairings(G):
        found = ab.maximal_isotropic_subgroups(G, l)
        assert {S.elements for S in found} == brute_maximal_isotropic(G, l)
        assert len({S.order for S in found}) == 1


def test_klein_group_isotropics():
    G = ab.make_group([2, 2])
    triv, nondeg = ab.enumerate_antisymmetric_pairings(G)
    assert triv.is_trivial()
    full = ab.maximal_isotropic_subgroups(G, triv)
    assert len(full) == 1 and full[0].order == 4
    lines = ab.maximal_isotropic_subgroups(G, nondeg)
    assert len(lines) == 3 and all(S.order == 2 for S in lines)
    assert len(all_subgroups(G)) == 5


def test_isotropy_data_examples():
    G = ab.make_group([2, 2])
    l = ab.pairing_from_values(G, [[0, 1], [1, 0]])
    D = ab.generated_subgroup(G, [(1, 0)])
    iso = ab.isotropy_data(G, l, D)
    assert iso.quotient.order == 2
    nontrivial_coset = [r for r in iso.quotient.elements() if r != G.zero][0]
    assert iso.f[nontrivial_coset] != iso.delta_dual.zero
    assert iso.ker_l.order == 1
    assert iso.image_l.order == 4

    t = ab.trivial_pairing(G)
    iso_t = ab.isotropy_data(G, t, ab.whole_group(G))
    assert iso_t.quotient.order == 1
    assert iso_t.ker_l.order == 4


def test_f_injective_everywhere():
    for d in [(2, 2), (2, 4), (3, 3), (2, 2, 2), (4, 4), (2, 2, 4)]:
        G = ab.FinAbGroup(d)
        for l in ab.enumerate_antisymmetric_pairings(G):
            for D in ab.maximal_isotropic_subgroups(G, l):
                iso = ab.isotropy_data(G, l, D)
                assert len(set(iso.f.values())) == iso.quotient.order


def test_isotropy_errors():
    G = ab.make_group([2, 2])
    l = ab.pairing_from_values(G, [[0, 1], [1, 0]])
    with pytest.raises(ab.NotIsotropic):
        ab.isotropy_data(G, l, ab.whole_group(G))
    with pytest.raises(ab.NotMaximal):
        ab.isotropy_data(G, l, ab.trivial_subgroup(G))


# --- quotients and automorphisms ------------------------------------------------------------------

def test_quotient_examples():
    G = ab.make_group([2, 2])
    assert ab.quotient_group(G, ab.whole_group(G)).order == 1
    Q = ab.quotient_group(G, ab.generated_subgroup(G, [(1, 0)]))
    assert Q.invariant_factors == (2,)
    H = ab.make_group([2, 4])
    Q2 = ab.quotient_group(H, ab.generated_subgroup(H, [(0, 2)]))
    assert Q2.invariant_factors == (2, 2)
    assert order_census(Q2) == order_census(ab.make_group([2, 2]))


def test_quotient_orders_and_representatives():
    G = ab.make_group([2, 4])
    for S in all_subgroups(G):
        sub = ab.subgroup_from_elements(G, S)
        Q = ab.quotient_group(G, sub)
        assert Q.order * len(S) == G.order
        for r in Q.elements():
            assert r == min(Q.coset(r))


def test_automorphism_orbits_against_full_group():
    for d in [(2, 2), (2, 4), (3, 3), (2, 2, 2)]:
        G = ab.FinAbGroup(d)
        pairings = ab.enumerate_antisymmetric_pairings(G)
        orbits = ab.pairing_orbits(G, pairings)
        brute = {}
        for p in pairings:
            brute[p.matrix] = frozenset(ab.pullback_pairing(p, a).matrix for a in ab.all_automorphisms(G))
        assert {frozenset(q.matrix for q in o) for o in orbits} == set(brute.values())


def test_find_basis():
    Q = ab.quotient_group(ab.make_group([2, 4]), ab.generated_subgroup(ab.make_group([2, 4]), [(1, 2)]))
    basis = ab.find_basis(Q)
    assert sorted(Q.element_order(x) for x in basis) == sorted(Q.invariant_factors)
