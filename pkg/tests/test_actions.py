"""Groupoid actions, induced quantale modules, orbits and tensors."""

import pytest

from iqf_lab.actions import (
    GSet,
    QModule,
    action_inverse_image,
    check_partial_unit_laws,
    diagonal_action,
    invariant_elements,
    left_translation_gset,
    module_of_gset,
    right_translation_gset,
    tensor_over_Q,
    validate_gset,
    validate_qmodule,
)
from iqf_lab.errors import (
    AnchorsIncompatible,
    InvalidSpec,
    NotSetDerived,
    UnknownElement,
)
from iqf_lab.groupoid import (
    cyclic_group,
    discrete_groupoid,
    disjoint_union,
    group_groupoid,
    pair_groupoid,
)
from iqf_lab.quantale import (
    InvolutiveQuantale,
    quantale_of_groupoid,
    validate_quantale,
)
from iqf_lab.suplattice import FiniteSupLattice, lattice_isomorphism


def bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def z2_groupoid():
    return group_groupoid(cyclic_group(2))


def swap_gset():
    """Z2 exchanging two points over the single object."""
    act = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}
    return GSet(z2_groupoid(), ("x", "y"), (0, 0), act)


def trivial_gset():
    """A one-object discrete groupoid fixing two points."""
    gpd = discrete_groupoid(("p",))
    return GSet(gpd, ("x", "y"), (0, 0), {(0, 0): 0, (0, 1): 1})


def chain_quantale(k):
    lat = FiniteSupLattice.chain(k)
    jis = lat.join_irreducibles()
    mult = {(a, b): min(a, b) for a in jis for b in jis}
    return InvolutiveQuantale(lat, mult, {a: a for a in jis}, k - 1)


def orbit_partition(a):
    """Union-find over the moves x ~ g·x, ignoring the groupoid entirely."""
    parent = list(range(a.n_pts))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (_, x), y in a.act.items():
        parent[find(x)] = find(y)
    orbits = {}
    for x in range(a.n_pts):
        orbits.setdefault(find(x), []).append(x)
    return sorted(orbits.values())


# ---------------------------------------------------------------------------
# set-level actions


def test_swap_gset_valid():
    rep = validate_gset(swap_gset())
    assert rep.ok
    assert [c.law for c in rep.checks] == [
        "action defined exactly on anchored pairs",
        "anchor of g·x is d(g)",
        "unit arrows act as identity",
        "g·(h·x) = (gh)·x",
    ]


def test_translation_gsets_valid():
    for gpd in (z2_groupoid(), pair_groupoid(range(2)),
                disjoint_union(pair_groupoid(range(2)),
                               group_groupoid(cyclic_group(3)))):
        left = left_translation_gset(gpd)
        right = right_translation_gset(gpd)
        assert validate_gset(left).ok
        assert validate_gset(right).ok
        assert left.points == gpd.arrows
        assert right.anchor == gpd.cod


def test_right_gset_report_laws():
    rep = validate_gset(right_translation_gset(z2_groupoid()))
    assert [c.law for c in rep.checks] == [
        "action defined exactly on anchored pairs",
        "anchor of x·g is r(g)",
        "unit arrows act as identity",
        "(x·g)·h = x·(gh)",
    ]


def test_gset_constructor_rejects():
    gpd = z2_groupoid()
    with pytest.raises(InvalidSpec):
        GSet(gpd, ("x", "y"), (0, 0), {}, side="middle")
    with pytest.raises(InvalidSpec):
        GSet(gpd, ("x", "x"), (0, 0), {})
    with pytest.raises(InvalidSpec):
        GSet(gpd, ("x", "y"), (0,), {})
    with pytest.raises(UnknownElement):
        GSet(gpd, ("x", "y"), (0, 5), {})
    with pytest.raises(UnknownElement):
        GSet(gpd, ("x",), (0,), {(7, 0): 0})
    with pytest.raises(UnknownElement):
        GSet(gpd, ("x",), (0,), {(0, 0): 9})


def test_validate_gset_definedness():
    base = swap_gset()
    act = dict(base.act)
    del act[(1, 1)]
    rep = validate_gset(GSet(base.groupoid, base.points, base.anchor, act))
    bad = rep.first_failure()
    assert bad.law == "action defined exactly on anchored pairs"
    assert bad.witness == ("g1", "y")


def test_validate_gset_definedness_rejects_unanchored_pair():
    gpd = pair_groupoid(range(2))
    left = left_translation_gset(gpd)
    act = dict(left.act)
    # arrow 0>0 cannot act on an arrow anchored at 1
    act[(0, 2)] = 2
    rep = validate_gset(GSet(gpd, left.points, left.anchor, act))
    assert not rep.ok
    assert rep.first_failure().law == "action defined exactly on anchored pairs"


def test_validate_gset_anchor_transport():
    gpd = pair_groupoid(range(2))
    left = left_translation_gset(gpd)
    act = dict(left.act)
    # send 0>1 . 1>0 to an arrow with the wrong domain
    assert act[(1, 2)] == 0
    act[(1, 2)] = 3
    rep = validate_gset(GSet(gpd, left.points, left.anchor, act))
    assert rep.first_failure().law == "anchor of g·x is d(g)"
    assert rep.first_failure().witness == ("0>1", "1>0")


def test_validate_gset_unit_witness():
    act = {(0, 0): 1, (0, 1): 0, (1, 0): 1, (1, 1): 0}
    rep = validate_gset(GSet(z2_groupoid(), ("x", "y"), (0, 0), act))
    failed = [c.law for c in rep.failures]
    assert "unit arrows act as identity" in failed


def test_validate_gset_associativity_witness():
    # the non-unit arrow acts by a non-invertible collapse
    act = {(0, 0): 0, (0, 1): 1, (1, 0): 0, (1, 1): 0}
    rep = validate_gset(GSet(z2_groupoid(), ("x", "y"), (0, 0), act))
    bad = rep.first_failure()
    assert bad.law == "g·(h·x) = (gh)·x"
    assert bad.witness == ("g1", "g1", "y")


def test_validate_right_gset_associativity():
    gpd = z2_groupoid()
    act = {(0, 0): 0, (0, 1): 1, (1, 0): 0, (1, 1): 0}
    rep = validate_gset(GSet(gpd, ("x", "y"), (0, 0), act, side="right"))
    assert rep.first_failure().law == "(x·g)·h = x·(gh)"


# ---------------------------------------------------------------------------
# modules of actions


def test_swap_module_action():
    m = module_of_gset(swap_gset())
    assert m.lattice.n == 4
    # {g1}·{x} = {y}
    assert m.act(0b10, 0b01) == 0b10
    # whole quantale on a point reaches everything
    assert m.act(0b11, 0b01) == 0b11
    assert m.act(0b10, 0b11) == 0b11
    assert m.act(0b00, 0b11) == 0b00
    assert m.act(0b01, 0b10) == 0b10


def test_translation_module_is_quantale_product():
    for gpd in (z2_groupoid(), pair_groupoid(range(2))):
        q = quantale_of_groupoid(gpd)
        left = module_of_gset(left_translation_gset(gpd))
        right = module_of_gset(right_translation_gset(gpd))
        for a in q.lattice.elements():
            for x in q.lattice.elements():
                assert left.act(a, x) == q.product(a, x)
                assert right.act(a, x) == q.product(x, a)


def test_modules_validate():
    for a in (swap_gset(), trivial_gset(),
              left_translation_gset(pair_groupoid(range(2))),
              right_translation_gset(z2_groupoid())):
        rep = validate_qmodule(module_of_gset(a))
        assert rep.ok, rep.summary()


def test_validate_qmodule_report_laws():
    left = validate_qmodule(module_of_gset(swap_gset()))
    assert [c.law for c in left.checks] == [
        "sup-linearity (structural: join-extension of the join-irreducible "
        "table)",
        "unit of the quantale acts as identity",
        "action respects multiplication",
        "bx = b1 ∧ x for b ≤ e",
    ]
    right = validate_qmodule(module_of_gset(right_translation_gset(z2_groupoid())))
    assert right.checks[-1].law == "xb = 1b ∧ x for b ≤ e"


def test_qmodule_table_coverage():
    q = quantale_of_groupoid(z2_groupoid())
    lat = FiniteSupLattice.powerset(("x",))
    with pytest.raises(InvalidSpec):
        QModule(q, lat, {(1, 1): 1})
    with pytest.raises(InvalidSpec):
        QModule(q, lat, {(1, 1): 1, (2, 1): 1, (1, 2): 0})
    with pytest.raises(InvalidSpec):
        QModule(q, lat, {(1, 1): 9, (2, 1): 1})
    with pytest.raises(InvalidSpec):
        QModule(q, lat, {(1, 1): 1, (2, 1): 1}, side="up")


def test_validate_qmodule_unit_failure():
    q = quantale_of_groupoid(z2_groupoid())
    lat = FiniteSupLattice.powerset(("x",))
    m = QModule(q, lat, {(1, 1): 0, (2, 1): 1})
    rep = validate_qmodule(m)
    bad = rep.first_failure()
    assert bad.law == "unit of the quantale acts as identity"
    assert bad.witness == (("x",),)


def test_validate_qmodule_multiplication_failure():
    # both units of a two-object discrete groupoid acting as the identity
    # on a single point cannot respect the zero product u0·u1
    q = quantale_of_groupoid(discrete_groupoid(("a", "b")))
    lat = FiniteSupLattice.powerset(("x",))
    m = QModule(q, lat, {(1, 1): 1, (2, 1): 1})
    rep = validate_qmodule(m)
    assert rep.first_failure().law == "action respects multiplication"


def test_validate_qmodule_anchor_failure():
    # the middle element of the chain acts idempotently but not by meets
    q = chain_quantale(3)
    assert validate_quantale(q).ok
    lat = FiniteSupLattice.chain(3)
    m = QModule(q, lat, {(1, 1): 0, (1, 2): 2, (2, 1): 1, (2, 2): 2})
    rep = validate_qmodule(m)
    assert [c.law for c in rep.failures] == ["bx = b1 ∧ x for b ≤ e"]
    assert rep.first_failure().witness == ("1", 1)


# ---------------------------------------------------------------------------
# inverse image of the action


def test_inverse_image_z2_translation():
    m = module_of_gset(left_translation_gset(z2_groupoid()))
    assert action_inverse_image(m, 0b00) == frozenset()
    assert action_inverse_image(m, 0b01) == {("g0", "g0"), ("g1", "g1")}
    assert action_inverse_image(m, 0b10) == {("g0", "g1"), ("g1", "g0")}
    assert action_inverse_image(m, 0b11) == {
        ("g0", "g0"), ("g0", "g1"), ("g1", "g0"), ("g1", "g1")}


def test_inverse_image_matches_raw_sets():
    gpd = pair_groupoid(range(2))
    m = module_of_gset(left_translation_gset(gpd))
    for x in m.lattice.elements():
        want = {(gpd.arrow_label(g), gpd.arrow_label(y))
                for g in range(gpd.n_arr) for y in range(gpd.n_arr)
                if gpd.composable(g, y) and gpd.comp[(g, y)] in bits(x)}
        assert action_inverse_image(m, x) == want


def test_inverse_image_right_module():
    gpd = pair_groupoid(range(2))
    m = module_of_gset(right_translation_gset(gpd))
    for x in m.lattice.elements():
        want = {(gpd.arrow_label(y), gpd.arrow_label(g))
                for g in range(gpd.n_arr) for y in range(gpd.n_arr)
                if gpd.composable(y, g) and gpd.comp[(y, g)] in bits(x)}
        assert action_inverse_image(m, x) == want


def test_inverse_image_needs_set_origin():
    q = quantale_of_groupoid(z2_groupoid())
    table = {(a, x): q.product(a, x)
             for a in q.lattice.join_irreducibles()
             for x in q.lattice.join_irreducibles()}
    abstract = QModule(q, q.lattice, table)
    assert validate_qmodule(abstract).ok
    with pytest.raises(NotSetDerived):
        action_inverse_image(abstract, 1)


# ---------------------------------------------------------------------------
# invariants and orbits


def test_invariants_z2_translation():
    lat = invariant_elements(module_of_gset(left_translation_gset(z2_groupoid())))
    assert lat.n == 2
    assert lat.label(lat.top) == ("g0", "g1")


def test_invariants_pair_translation_are_fiber_unions():
    gpd = pair_groupoid(range(2))
    lat = invariant_elements(module_of_gset(left_translation_gset(gpd)))
    assert lat.n == 4
    atoms = {lat.label(x) for x in lat.atoms()}
    # left translation preserves the codomain fiber of an arrow
    assert atoms == {("0>0", "1>0"), ("0>1", "1>1")}


def test_invariants_trivial_action():
    lat = invariant_elements(module_of_gset(trivial_gset()))
    assert lat.n == 4


def test_invariants_swap():
    lat = invariant_elements(module_of_gset(swap_gset()))
    assert lat.n == 2


@pytest.mark.parametrize("build", [
    swap_gset,
    trivial_gset,
    lambda: left_translation_gset(z2_groupoid()),
    lambda: right_translation_gset(pair_groupoid(range(2))),
    lambda: left_translation_gset(
        disjoint_union(pair_groupoid(range(2)), group_groupoid(cyclic_group(2)))),
])
def test_invariants_match_orbit_oracle(build):
    a = build()
    lat = invariant_elements(module_of_gset(a))
    orbits = orbit_partition(a)
    assert lat.n == 1 << len(orbits)
    atoms = {lat.label(x) for x in lat.atoms()}
    assert atoms == {tuple(a.points[i] for i in orbit) for orbit in orbits}


# ---------------------------------------------------------------------------
# diagonal actions and tensors


def test_diagonal_action_z2():
    gpd = z2_groupoid()
    diag = diagonal_action(right_translation_gset(gpd),
                           left_translation_gset(gpd))
    assert diag.lattice.n == 16
    assert validate_qmodule(diag).ok
    # g1·(g0, g0) = (g0·g1, g1·g0) = (g1, g1)
    assert diag.source.points[0] == ("g0", "g0")
    assert diag.act(0b10, 0b0001) == 0b1000


def test_diagonal_action_rejects_mismatch():
    gpd = z2_groupoid()
    with pytest.raises(AnchorsIncompatible):
        diagonal_action(left_translation_gset(gpd), left_translation_gset(gpd))
    with pytest.raises(AnchorsIncompatible):
        diagonal_action(right_translation_gset(gpd),
                        left_translation_gset(pair_groupoid(range(2))))


def test_tensor_z2_self():
    gpd = z2_groupoid()
    q = quantale_of_groupoid(gpd)
    inv_lat, mid_lat, masks = tensor_over_Q(right_translation_gset(gpd),
                                            left_translation_gset(gpd))
    assert masks == (0b0000, 0b0110, 0b1001, 0b1111)
    assert inv_lat.n == mid_lat.n == 4
    assert lattice_isomorphism(inv_lat, q.lattice) is not None


def test_tensor_self_matches_composite_classes():
    # pairs in the same tensor class have equal composites, so the tensor
    # of the two translation actions recovers the arrow quantale
    for gpd in (z2_groupoid(), pair_groupoid(range(2))):
        q = quantale_of_groupoid(gpd)
        inv_lat, mid_lat, masks = tensor_over_Q(right_translation_gset(gpd),
                                                left_translation_gset(gpd))
        pairs = [(x, y) for x in range(gpd.n_arr) for y in range(gpd.n_arr)
                 if gpd.composable(x, y)]
        classes = {}
        for k, (x, y) in enumerate(pairs):
            classes.setdefault(gpd.comp[(x, y)], 0)
            classes[gpd.comp[(x, y)]] |= 1 << k
        assert len(classes) == gpd.n_arr
        assert inv_lat.n == 1 << gpd.n_arr
        assert set(masks) >= set(classes.values())
        assert lattice_isomorphism(inv_lat, q.lattice) is not None
        assert lattice_isomorphism(mid_lat, q.lattice) is not None


def test_tensor_translation_with_swap():
    inv_lat, mid_lat, masks = tensor_over_Q(
        right_translation_gset(z2_groupoid()), swap_gset())
    assert masks == (0b0000, 0b0110, 0b1001, 0b1111)
    assert inv_lat.n == 4


def test_tensor_empty_fibered_product():
    gpd = discrete_groupoid(("a", "b"))
    xr = GSet(gpd, ("p",), (0,), {(0, 0): 0}, side="right")
    yl = GSet(gpd, ("q",), (1,), {(1, 0): 0}, side="left")
    inv_lat, mid_lat, masks = tensor_over_Q(xr, yl)
    assert masks == (0,)
    assert inv_lat.n == mid_lat.n == 1


# ---------------------------------------------------------------------------
# partial unit laws


@pytest.mark.parametrize("build", [
    swap_gset,
    trivial_gset,
    lambda: left_translation_gset(z2_groupoid()),
    lambda: left_translation_gset(pair_groupoid(range(2))),
    lambda: right_translation_gset(pair_groupoid(range(2))),
])
def test_partial_unit_laws_hold(build):
    rep = check_partial_unit_laws(module_of_gset(build()))
    assert rep.ok, rep.summary()
    assert [c.law for c in rep.checks] == [
        "s(x ∧ y) = sx ∧ sy",
        "s(x ∧ s*y) = sx ∧ y",
        "b(x ∧ y) = bx ∧ by for b ≤ e",
        "bx ∧ y = x ∧ by for b ≤ e",
    ]


def test_partial_unit_laws_fail_without_anchor():
    q = chain_quantale(3)
    lat = FiniteSupLattice.chain(3)
    m = QModule(q, lat, {(1, 1): 0, (1, 2): 2, (2, 1): 1, (2, 2): 2})
    rep = check_partial_unit_laws(m)
    failed = [c.law for c in rep.failures]
    assert "s(x ∧ s*y) = sx ∧ y" in failed
    assert "bx ∧ y = x ∧ by for b ≤ e" in failed
