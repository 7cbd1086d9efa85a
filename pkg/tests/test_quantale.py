"""Quantale layer: axioms, the two constructions, homs, groups of units."""

import itertools

import pytest

from iqf_lab.errors import (
    InvalidSpec,
    NotAGroup,
    NotBoolean,
    NotIQF,
    NotPreimageMap,
)
from iqf_lab.groupoid import (
    action_groupoid,
    cyclic_group,
    discrete_groupoid,
    disjoint_union,
    enumerate_functors,
    group_groupoid,
    group_isomorphism,
    groupoid_isomorphism,
    identity_functor,
    pair_groupoid,
    promote_lax_to_functor,
)
from iqf_lab.quantale import (
    InvolutiveQuantale,
    QuantaleHom,
    check_group_lemma,
    check_lax_faithfulness,
    check_lax_image,
    check_roundtrips,
    direct_image_hom,
    enumerate_unital_homs,
    functor_of_iqloc_morphism,
    group_units,
    groupoid_of_quantale,
    hom_flags,
    partial_units,
    preimage_hom,
    quantale_of_groupoid,
    validate_hom,
    validate_iqf,
    validate_quantale,
)
from iqf_lab.suplattice import FiniteSupLattice, SupHom


def z(n):
    return group_groupoid(cyclic_group(n))


def pz2():
    return quantale_of_groupoid(z(2))


def o_pair2():
    return quantale_of_groupoid(pair_groupoid(["x", "y"]))


def chain_quantale(k):
    """Chain with meet multiplication, identity involution and unit = top."""
    lat = FiniteSupLattice.chain(k)
    jis = lat.join_irreducibles()
    mult = {(a, b): min(a, b) for a in jis for b in jis}
    return InvolutiveQuantale(lat, mult, {j: j for j in jis}, lat.top)


def two_chain_quantale():
    return quantale_of_groupoid(discrete_groupoid(["x"]))


def parity_functor():
    return promote_lax_to_functor(pair_groupoid(["x", "y"]), z(2),
                                  (0, 0), (0, 1, 1, 0))


# -- construction and validation --------------------------------------------

def test_quantale_of_pair_groupoid_validates():
    q = o_pair2()
    assert q.lattice.n == 16
    assert validate_quantale(q).ok
    assert validate_iqf(q).ok


@pytest.mark.parametrize("gpd", [
    z(1), z(2), z(4),
    pair_groupoid(["x", "y"]),
    discrete_groupoid(["p", "q"]),
    disjoint_union(z(2), discrete_groupoid(["p"])),
])
def test_groupoid_quantales_are_iqfs(gpd):
    q = quantale_of_groupoid(gpd)
    assert validate_quantale(q).ok
    assert validate_iqf(q).ok


def test_products_are_sup_linear():
    q = pz2()
    lat = q.lattice
    for a in lat.elements():
        for b in lat.elements():
            for c in lat.elements():
                j = lat.join_pair(b, c)
                assert q.product(a, j) == lat.join_pair(q.product(a, b),
                                                        q.product(a, c))
                assert q.product(j, a) == lat.join_pair(q.product(b, a),
                                                        q.product(c, a))


def test_involution_on_compound_elements():
    q = o_pair2()
    lat = q.lattice
    fwd = lat.index_of_label(("x>x", "x>y"))
    assert q.involution(fwd) == lat.index_of_label(("x>x", "y>x"))


def test_partial_unit_counts():
    assert len(partial_units(o_pair2())) == 7
    assert len(partial_units(pz2())) == 3


def test_table_shape_errors():
    lat = FiniteSupLattice.chain(3)
    jis = lat.join_irreducibles()
    good_mult = {(a, b): min(a, b) for a in jis for b in jis}
    good_inv = {j: j for j in jis}
    with pytest.raises(InvalidSpec):
        InvolutiveQuantale(lat, {}, good_inv, lat.top)
    with pytest.raises(InvalidSpec):
        InvolutiveQuantale(lat, good_mult, {1: 1}, lat.top)
    with pytest.raises(InvalidSpec):
        InvolutiveQuantale(lat, good_mult, good_inv, 99)


def test_misplaced_unit_fails_both_validators():
    base = pz2()
    q = InvolutiveQuantale(base.lattice, base._ji_mult, base._ji_invol,
                           base.lattice.top, atom_labels=base.atom_labels)
    rep = validate_quantale(q)
    assert not rep.ok
    assert rep.first_failure().law == "unit is two-sided"
    iqf = validate_iqf(q)
    assert not iqf.ok
    assert iqf.first_failure().law == "a1 ∧ e = aa* ∧ e"


def test_mutated_composition_caught_with_witness():
    base = o_pair2()
    mult = dict(base._ji_mult)
    a01 = base.lattice.index_of_label(("x>y",))
    a10 = base.lattice.index_of_label(("y>x",))
    a11 = base.lattice.index_of_label(("y>y",))
    mult[(a01, a10)] = a11   # reroute one composite
    bad = InvolutiveQuantale(base.lattice, mult, base._ji_invol, base.unit,
                             atom_labels=base.atom_labels)
    rep = validate_quantale(bad)
    assert not rep.ok
    bad_law = rep.first_failure()
    assert bad_law.law == "associativity"
    assert bad_law.witness is not None


def test_chain_quantale_is_iqf_but_not_boolean():
    q = chain_quantale(4)
    assert validate_quantale(q).ok
    assert validate_iqf(q).ok
    with pytest.raises(NotBoolean):
        groupoid_of_quantale(q)


def test_broken_axiom3_raises_not_iqf():
    base = pz2()
    mult = dict(base._ji_mult)
    s = base.lattice.index_of_label(("g1",))
    mult[(s, s)] = base.lattice.top   # square of the swap blurs to 1
    bad = InvolutiveQuantale(base.lattice, mult, base._ji_invol, base.unit)
    rep = validate_iqf(bad)
    assert not rep.ok
    assert rep.first_failure().law == "partial units join to 1"
    with pytest.raises(NotIQF):
        groupoid_of_quantale(bad)


# -- the two constructions back and forth -----------------------------------

def test_atoms_of_pz2_form_the_group_again():
    g = groupoid_of_quantale(pz2())
    assert g.n_obj == 1 and g.n_arr == 2
    assert groupoid_isomorphism(g, z(2)) is not None


def test_atoms_of_o_pair2_form_the_pair_groupoid_again():
    g = groupoid_of_quantale(o_pair2())
    assert g.n_obj == 2 and g.n_arr == 4
    assert groupoid_isomorphism(g, pair_groupoid(["x", "y"])) is not None


@pytest.mark.parametrize("gpd", [
    pair_groupoid(["x", "y"]),
    z(2),
    discrete_groupoid(["p", "q"]),
    disjoint_union(z(2), discrete_groupoid(["x"])),
    action_groupoid(cyclic_group(2), ["x", "y"],
                    {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}),
])
def test_roundtrip_from_groupoid(gpd):
    assert check_roundtrips(gpd).ok


@pytest.mark.parametrize("q", [
    pz2(),
    o_pair2(),
    quantale_of_groupoid(discrete_groupoid(["p", "q"])),
    quantale_of_groupoid(disjoint_union(z(2), discrete_groupoid(["x"]))),
])
def test_roundtrip_from_quantale(q):
    assert check_roundtrips(q).ok


def test_roundtrip_rejects_other_subjects():
    with pytest.raises(InvalidSpec):
        check_roundtrips("banana")


# -- hom validation ---------------------------------------------------------

def identity_hom(q):
    return QuantaleHom(q, q, SupHom(q.lattice, q.lattice,
                                    tuple(q.lattice.elements())))


def test_identity_hom_has_every_flag():
    flags = hom_flags(identity_hom(o_pair2()))
    assert flags == {"multiplicative": True, "unital": True,
                     "involutive": True, "finite_meet": True, "lax": True}


def test_parity_preimage_flags():
    flags = hom_flags(preimage_hom(parity_functor()))
    assert flags["multiplicative"] and flags["unital"]
    assert flags["involutive"] and flags["finite_meet"] and flags["lax"]


def test_parity_direct_image_flags():
    # the image map of a groupoid functor is only oplax in general: two
    # non-composable arrows can have composable images, so here
    # h({x>y})h({x>y}) = {e} while h(empty) is empty
    flags = hom_flags(direct_image_hom(parity_functor()))
    assert flags["unital"] and flags["involutive"]
    assert not flags["multiplicative"]
    assert not flags["finite_meet"]


def test_unit_inclusion_preimage_is_lax_but_not_multiplicative():
    fun = promote_lax_to_functor(discrete_groupoid(["p", "q"]),
                                 pair_groupoid(["x", "y"]), (0, 1), (0, 3))
    flags = hom_flags(preimage_hom(fun))
    assert flags["lax"] and flags["involutive"]
    assert not flags["multiplicative"]
    rep = validate_hom(preimage_hom(fun))
    failing = {c.law for c in rep.failures}
    assert "multiplicative" in failing
    assert "lax: submultiplicative" not in failing


# -- hom enumeration --------------------------------------------------------

def brute_unital_homs(q, r):
    """Oracle: every join-irreducible assignment, filtered by the laws
    checked on all element pairs (no reduction tricks)."""
    lat, rlat = q.lattice, r.lattice
    jis = lat.join_irreducibles()
    out = []
    for imgs in itertools.product(list(rlat.elements()), repeat=len(jis)):
        mapping = dict(zip(jis, imgs))
        images = tuple(rlat.join(mapping[j] for j in lat.ji_below(x))
                       for x in lat.elements())
        if any(images[j] != mapping[j] for j in jis):
            continue
        if images[q.unit] != r.unit:
            continue
        if images[lat.bottom] != rlat.bottom:
            continue
        if any(images[lat.join_pair(a, b)]
               != rlat.join_pair(images[a], images[b])
               for a in lat.elements() for b in lat.elements()):
            continue
        if any(r.product(images[a], images[b]) != images[q.product(a, b)]
               for a in lat.elements() for b in lat.elements()):
            continue
        out.append(images)
    return sorted(out)


@pytest.mark.parametrize("q,r,count", [
    (pz2(), pz2(), 2),
    (pz2(), two_chain_quantale(), 1),
    (two_chain_quantale(), two_chain_quantale(), 1),
    (pz2(), o_pair2(), 2),
    (o_pair2(), pz2(), 0),
    (quantale_of_groupoid(discrete_groupoid(["p", "q"])),
     quantale_of_groupoid(discrete_groupoid(["p", "q"])), 4),
    (chain_quantale(4), chain_quantale(4), 10),
    (pz2(), chain_quantale(4), 1),
])
def test_hom_enumeration_matches_brute_force(q, r, count):
    homs = enumerate_unital_homs(q, r)
    assert [h.map.images for h in homs] == brute_unital_homs(q, r)
    assert len(homs) == count
    for hom in homs:
        flags = hom_flags(hom)
        assert flags["multiplicative"] and flags["unital"]
        assert flags["involutive"]   # never used for pruning, always found


def test_homs_between_pair_quantales():
    homs = enumerate_unital_homs(o_pair2(), o_pair2())
    assert len(homs) == 2   # the identity and the swap automorphism
    ids = [h for h in homs if h.map.images == tuple(range(16))]
    assert len(ids) == 1


def test_group_case_hom_count_is_group_hom_count():
    pz3 = quantale_of_groupoid(z(3))
    assert len(enumerate_unital_homs(pz3, pz3)) == 3


# -- functor reconstruction -------------------------------------------------

def test_identity_hom_reconstructs_identity_functor():
    q = o_pair2()
    fun = functor_of_iqloc_morphism(identity_hom(q))
    assert fun.obj_map == (0, 1)
    assert fun.arrow_map == (0, 1, 2, 3)


def test_parity_preimage_reconstructs_parity():
    fun = functor_of_iqloc_morphism(preimage_hom(parity_functor()))
    assert fun.obj_map == (0, 0)
    assert fun.arrow_map == (0, 1, 1, 0)
    assert fun.source.arrows == ("x>x", "x>y", "y>x", "y>y")
    assert fun.target.arrows == ("g0", "g1")


def test_twofold_cover_reconstructed_from_its_preimage():
    cover = promote_lax_to_functor(discrete_groupoid(["p", "q"]),
                                   discrete_groupoid(["o"]), (0, 0), (0, 0))
    fun = functor_of_iqloc_morphism(preimage_hom(cover))
    assert fun.obj_map == (0, 0)
    assert fun.arrow_map == (0, 0)


def test_non_meet_hom_rejected_as_not_preimage():
    two = two_chain_quantale()
    target = pz2()
    # valid unital multiplicative sup-map, but top is not preserved
    hom = QuantaleHom(two, target, SupHom(
        two.lattice, target.lattice, (0, target.unit)))
    flags = hom_flags(hom)
    assert flags["unital"] and flags["multiplicative"]
    assert not flags["finite_meet"]
    with pytest.raises(NotPreimageMap):
        functor_of_iqloc_morphism(hom)


# -- groups of units --------------------------------------------------------

def test_units_of_pz2_form_z2():
    group, members = group_units(pz2())
    assert members == (1, 2)   # {e} and {s}
    assert group_isomorphism(group, cyclic_group(2)) is not None


def test_units_of_two_chain_are_trivial():
    group, members = group_units(two_chain_quantale())
    assert group.n == 1 and members == (1,)


def test_units_of_o_pair2_are_the_global_bisections():
    q = o_pair2()
    group, members = group_units(q)
    assert group.n == 2
    labels = {q.element_label(m) for m in members}
    assert labels == {"{x>x,y>y}", "{x>y,y>x}"}
    assert group_isomorphism(group, cyclic_group(2)) is not None


def test_unclosed_units_raise():
    # u has the right inverse v, but u.u falls outside the invertibles
    lat = FiniteSupLattice.powerset(["e", "u", "v"])
    e, u, v = 1, 2, 4
    mult = {(e, e): e, (e, u): u, (u, e): u, (e, v): v, (v, e): v,
            (u, v): e, (v, u): u, (u, u): 0, (v, v): 0}
    q = InvolutiveQuantale(lat, mult, {e: e, u: v, v: u}, e)
    with pytest.raises(NotAGroup):
        group_units(q)


def test_group_lemma_for_identity_and_collapse():
    g2 = cyclic_group(2)
    assert check_group_lemma(g2, g2, (0, 1)).ok
    rep = check_group_lemma(g2, g2, (0, 0))
    by_law = {c.law: c.ok for c in rep.checks}
    assert not by_law["preimage is a unital multiplicative hom"]
    assert not by_law["map is an isomorphism"]
    assert by_law["preimage hom exactly when isomorphism"]
    assert by_law["direct image is a unital multiplicative hom"]
    assert by_law["as many unital quantale homs as group homs"]


def test_group_lemma_for_subgroup_inclusion():
    rep = check_group_lemma(cyclic_group(2), cyclic_group(4), (0, 2))
    by_law = {c.law: c.ok for c in rep.checks}
    assert not by_law["preimage is a unital multiplicative hom"]
    assert by_law["preimage hom exactly when isomorphism"]
    assert by_law["as many unital quantale homs as group homs"]


def test_group_lemma_rejects_non_homs():
    rep = check_group_lemma(cyclic_group(2), cyclic_group(4), (0, 1))
    assert not rep.ok
    assert rep.first_failure().law == "input is a group homomorphism"


# -- lax images -------------------------------------------------------------

def test_lax_image_of_identity_is_strict():
    rep = check_lax_image(identity_functor(pair_groupoid(["x", "y"])))
    assert rep.ok


def test_lax_image_of_parity_is_strict():
    assert check_lax_image(parity_functor()).ok


def test_lax_image_of_unit_inclusion_is_lax_only():
    fun = promote_lax_to_functor(discrete_groupoid(["p", "q"]),
                                 pair_groupoid(["x", "y"]), (0, 1), (0, 3))
    rep = check_lax_image(fun)
    by_law = {c.law: c.ok for c in rep.checks}
    assert by_law["lax: submultiplicative"]
    assert by_law["lax: involution preserved"]
    assert by_law["lax: unit below the image of the unit"]
    assert by_law["strict exactly when covering"]


def test_lax_image_functoriality_on_a_composite():
    inclusion = promote_lax_to_functor(discrete_groupoid(["p", "q"]),
                                       pair_groupoid(["x", "y"]), (0, 1), (0, 3))
    rep = check_lax_image(inclusion, then=parity_functor())
    assert rep.ok


@pytest.mark.parametrize("src,tgt", [
    (discrete_groupoid(["p", "q"]), pair_groupoid(["x", "y"])),
    (pair_groupoid(["x", "y"]), z(2)),
    (z(4), z(2)),
])
def test_lax_assignment_is_faithful(src, tgt):
    assert check_lax_faithfulness(src, tgt).ok
