"""Groupoid actions on finite point sets and the quantale modules they induce.

A left action of a groupoid on an anchored set moves a point x sitting
over the object r(g) to a point g·x over d(g); right actions mirror this,
moving x over d(g) to x·g over r(g).  Taking powersets turns an action
into a module over the arrow quantale, with U·S computed pointwise, and
the module remembers its set-level origin so that the inverse image of
the action, orbit computations and tensor products can all be carried out
on canonical finite carriers (composable pairs and fibered products).

Action tables are keyed (arrow, point) on both sides: for a right action
act[(g, x)] stores x·g.
"""

from __future__ import annotations

from typing import Sequence

from .errors import AnchorsIncompatible, InvalidSpec, NotSetDerived, UnknownElement
from .groupoid import FiniteGroupoid
from .quantale import (
    InvolutiveQuantale,
    partial_units as partial_unit_elements,
    quantale_of_groupoid,
)
from .report import ValidationReport
from .suplattice import FiniteSupLattice


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# set-level actions


class GSet:
    """Anchored points with a partial action table over a groupoid."""

    def __init__(self, groupoid: FiniteGroupoid, points: Sequence,
                 anchor: Sequence[int], act: dict[tuple[int, int], int],
                 side: str = "left"):
        if side not in ("left", "right"):
            raise InvalidSpec("side must be 'left' or 'right'")
        self.groupoid = groupoid
        self.points = tuple(points)
        self.n_pts = len(self.points)
        if len(set(self.points)) != self.n_pts:
            raise InvalidSpec("point labels must be distinct")
        self.anchor = tuple(anchor)
        self.side = side
        if len(self.anchor) != self.n_pts:
            raise InvalidSpec("anchor table shape does not match points")
        if any(not 0 <= o < groupoid.n_obj for o in self.anchor):
            raise UnknownElement("anchor value out of range")
        self.act = dict(act)
        for (g, x), y in self.act.items():
            if not (0 <= g < groupoid.n_arr and 0 <= x < self.n_pts):
                raise UnknownElement(f"action key {(g, x)} out of range")
            if not 0 <= y < self.n_pts:
                raise UnknownElement(f"action value {y} out of range")

    def anchored(self, g: int, x: int) -> bool:
        """Whether the action of arrow g on point x should be defined."""
        if self.side == "left":
            return self.groupoid.cod[g] == self.anchor[x]
        return self.groupoid.dom[g] == self.anchor[x]

    def __repr__(self):
        return (f"GSet({self.side}, {self.n_pts} points over "
                f"{self.groupoid.n_obj} objects)")


def validate_gset(a: GSet) -> ValidationReport:
    """The action axioms: definedness, anchor transport, units, associativity."""
    rep = ValidationReport(f"{a.side} groupoid action")
    gpd = a.groupoid
    lab = lambda g, x: (gpd.arrow_label(g), a.points[x])

    w = next((lab(g, x) for g in range(gpd.n_arr) for x in range(a.n_pts)
              if ((g, x) in a.act) != a.anchored(g, x)), None)
    rep.add("action defined exactly on anchored pairs", w is None, w)
    if w is not None:
        return rep

    if a.side == "left":
        w = next((lab(g, x) for (g, x), y in a.act.items()
                  if a.anchor[y] != gpd.dom[g]), None)
        rep.add("anchor of g·x is d(g)", w is None, w)
    else:
        w = next((lab(g, x) for (g, x), y in a.act.items()
                  if a.anchor[y] != gpd.cod[g]), None)
        rep.add("anchor of x·g is r(g)", w is None, w)
    if w is not None:
        return rep

    w = next(((a.points[x],) for x in range(a.n_pts)
              if a.act[(gpd.unit[a.anchor[x]], x)] != x), None)
    rep.add("unit arrows act as identity", w is None, w)

    w = None
    for g in range(gpd.n_arr):
        for h in range(gpd.n_arr):
            if not gpd.composable(g, h):
                continue
            gh = gpd.comp[(g, h)]
            if a.side == "left":
                # g·(h·x) against (gh)·x: h acts first
                for x in range(a.n_pts):
                    if (h, x) in a.act:
                        if a.act[(g, a.act[(h, x)])] != a.act[(gh, x)]:
                            w = (gpd.arrow_label(g), gpd.arrow_label(h),
                                 a.points[x])
                            break
            else:
                # (x·g)·h against x·(gh)
                for x in range(a.n_pts):
                    if (g, x) in a.act:
                        if a.act[(h, a.act[(g, x)])] != a.act[(gh, x)]:
                            w = (gpd.arrow_label(g), gpd.arrow_label(h),
                                 a.points[x])
                            break
            if w:
                break
        if w:
            break
    law = "g·(h·x) = (gh)·x" if a.side == "left" else "(x·g)·h = x·(gh)"
    rep.add(law, w is None, w)
    return rep


def left_translation_gset(gpd: FiniteGroupoid) -> GSet:
    """The groupoid acting on its own arrows by composition on the left."""
    act = {(g, x): gpd.comp[(g, x)] for g in range(gpd.n_arr)
           for x in range(gpd.n_arr) if gpd.composable(g, x)}
    return GSet(gpd, gpd.arrows, gpd.dom, act, side="left")


def right_translation_gset(gpd: FiniteGroupoid) -> GSet:
    act = {(g, x): gpd.comp[(x, g)] for g in range(gpd.n_arr)
           for x in range(gpd.n_arr) if gpd.composable(x, g)}
    return GSet(gpd, gpd.arrows, gpd.cod, act, side="right")


# ---------------------------------------------------------------------------
# quantale modules


class QModule:
    """Sup-lattice with a join-irreducible action table over a quantale.

    act(a, x) computes a·x for left modules and x·a for right ones; the
    table is extended by joins in both arguments, making the action
    sup-linear by construction.
    """

    def __init__(self, quantale: InvolutiveQuantale, lattice: FiniteSupLattice,
                 ji_act: dict[tuple[int, int], int], side: str = "left",
                 source: GSet | None = None):
        if side not in ("left", "right"):
            raise InvalidSpec("side must be 'left' or 'right'")
        self.quantale = quantale
        self.lattice = lattice
        self.side = side
        self.source = source
        want = {(a, x) for a in quantale.lattice.join_irreducibles()
                for x in lattice.join_irreducibles()}
        if set(ji_act) != want:
            raise InvalidSpec("action table must cover exactly the "
                              "join-irreducible pairs")
        rng = range(lattice.n)
        if any(v not in rng for v in ji_act.values()):
            raise InvalidSpec("action value out of range")
        self._ji_act = dict(ji_act)
        self._memo: dict[tuple[int, int], int] = {}

    def act(self, a: int, x: int) -> int:
        key = (a, x)
        got = self._memo.get(key)
        if got is None:
            got = self.lattice.join(
                self._ji_act[(j, k)]
                for j in self.quantale.lattice.ji_below(a)
                for k in self.lattice.ji_below(x))
            self._memo[key] = got
        return got

    def __repr__(self):
        return f"QModule({self.side}, {self.lattice.n} elements)"


def validate_qmodule(m: QModule) -> ValidationReport:
    """Unit, associativity and anchor laws; sup-linearity is structural."""
    rep = ValidationReport(f"{m.side} quantale module")
    rep.add("sup-linearity (structural: join-extension of the "
            "join-irreducible table)", True)
    q, lat = m.quantale, m.lattice
    qjis = q.lattice.join_irreducibles()
    xjis = lat.join_irreducibles()
    lab = lat.label

    w = next(((lab(x),) for x in xjis if m.act(q.unit, x) != x), None)
    rep.add("unit of the quantale acts as identity", w is None, w)

    w = None
    for a in qjis:
        for b in qjis:
            for x in xjis:
                if m.side == "left":
                    lhs = m.act(a, m.act(b, x))
                else:
                    lhs = m.act(b, m.act(a, x))
                if lhs != m.act(q.product(a, b), x):
                    w = (q.element_label(a), q.element_label(b), lab(x))
                    break
            if w:
                break
        if w:
            break
    rep.add("action respects multiplication", w is None, w)

    # meets do not reduce to join-irreducibles, so the anchor law scans all
    # of the module
    e = q.unit
    w = None
    for b in q.lattice.elements():
        if not q.lattice.leq(b, e):
            continue
        btop = m.act(b, lat.top)
        for x in lat.elements():
            if m.act(b, x) != lat.meet_pair(btop, x):
                w = (q.element_label(b), lab(x))
                break
        if w:
            break
    law = "bx = b1 ∧ x for b ≤ e" if m.side == "left" else \
        "xb = 1b ∧ x for b ≤ e"
    rep.add(law, w is None, w)
    return rep


def module_of_gset(a: GSet) -> QModule:
    """Powerset of the points, acted on pointwise by arrow subsets."""
    q = quantale_of_groupoid(a.groupoid)
    lat = FiniteSupLattice.powerset(a.points)
    ji_act = {}
    for g in range(a.groupoid.n_arr):
        for x in range(a.n_pts):
            y = a.act.get((g, x))
            ji_act[(1 << g, 1 << x)] = 0 if y is None else 1 << y
    return QModule(q, lat, ji_act, side=a.side, source=a)


def action_inverse_image(m: QModule, x: int) -> frozenset:
    """The inverse image of the action at x, as a set of labelled pairs.

    Computed twice, once as the largest pair set whose action lands in x
    and once as the join over partial units s of s ⊗ s*x, and the two are
    checked equal; the adjunction inequalities are checked as well.  Only
    modules that remember a set-level origin support this.
    """
    if m.source is None:
        raise NotSetDerived("module does not come from a set-level action")
    a = m.source
    gpd = a.groupoid
    q = m.quantale
    carrier = [(g, y) for g in range(gpd.n_arr) for y in range(a.n_pts)
               if a.anchored(g, y)]

    xset = set(_bits(x))
    adjoint_form = {(g, y) for (g, y) in carrier if a.act[(g, y)] in xset}

    unit_form = set()
    for s in partial_unit_elements(q):
        z = m.act(q.involution(s), x)
        for g in _bits(s):
            for y in _bits(z):
                if a.anchored(g, y):
                    unit_form.add((g, y))
    assert adjoint_form == unit_form, "the two inverse image formulas disagree"

    # counit: acting on the inverse image stays below x
    assert all(a.act[(g, y)] in xset for (g, y) in adjoint_form)
    # unit, checked on pair atoms: each (g, y) lies in the inverse image of
    # its own image
    for (g, y) in carrier:
        w = a.act[(g, y)]
        assert (g, y) in {p for p in carrier if a.act[p] == w}

    if a.side == "left":
        return frozenset((gpd.arrow_label(g), a.points[y])
                         for (g, y) in adjoint_form)
    return frozenset((a.points[y], gpd.arrow_label(g))
                     for (g, y) in adjoint_form)


def invariant_elements(m: QModule) -> FiniteSupLattice:
    """The sub-sup-lattice of elements fixed by the whole quantale.

    The four descriptions of invariance (all of Q shrinks x, all partial
    units shrink x, 1x ≤ x, 1x = x) are evaluated independently per
    element and must agree; equality in the last one uses x = ex ≤ 1x,
    which holds in any unital module.
    """
    q, lat = m.quantale, m.lattice
    one = q.top()
    pu = partial_unit_elements(q)
    members = []
    for x in lat.elements():
        c1 = all(lat.leq(m.act(a, x), x) for a in q.lattice.elements())
        c2 = all(lat.leq(m.act(s, x), x) for s in pu)
        c3 = lat.leq(m.act(one, x), x)
        c4 = m.act(one, x) == x
        assert c1 == c2 == c3 == c4, f"invariance conditions split at {lat.label(x)}"
        if c4:
            members.append(x)

    mset = set(members)
    for x in members:
        for y in members:
            assert lat.join_pair(x, y) in mset, "invariants not join-closed"
            assert lat.meet_pair(x, y) in mset, "invariants not meet-closed"

    return FiniteSupLattice.from_order(
        [lat.label(x) for x in members],
        lambda i, j: lat.leq(members[i], members[j]))


def fibered_pairs(xr: GSet, yl: GSet) -> list[tuple[int, int]]:
    """Point index pairs of the fibered product, right-action points first."""
    return [(i, j) for i in range(xr.n_pts) for j in range(yl.n_pts)
            if xr.anchor[i] == yl.anchor[j]]


def diagonal_action(xr: GSet, yl: GSet) -> QModule:
    """The left action g·(x, y) = (x·g⁻¹, g·y) on the fibered pairs."""
    if xr.side != "right" or yl.side != "left":
        raise AnchorsIncompatible("need a right action and a left action")
    if xr.groupoid != yl.groupoid:
        raise AnchorsIncompatible("actions live over different groupoids")
    gpd = xr.groupoid
    pairs = fibered_pairs(xr, yl)
    index = {p: k for k, p in enumerate(pairs)}
    labels = [(xr.points[i], yl.points[j]) for (i, j) in pairs]
    anchor = [xr.anchor[i] for (i, j) in pairs]
    act = {}
    for g in range(gpd.n_arr):
        gi = gpd.inv[g]
        for k, (i, j) in enumerate(pairs):
            if xr.anchor[i] != gpd.cod[g]:
                continue
            act[(g, k)] = index[(xr.act[(gi, i)], yl.act[(g, j)])]
    diag = GSet(gpd, labels, anchor, act, side="left")
    assert validate_gset(diag).ok
    return module_of_gset(diag)


def tensor_over_Q(xr: GSet, yl: GSet
                  ) -> tuple[FiniteSupLattice, FiniteSupLattice, tuple[int, ...]]:
    """Tensor of a right and a left action over the arrow quantale.

    Computes the invariants of the diagonal action and, separately, the
    pair sets closed under the middle-linearity exchange xs ⊗ y ↔ x ⊗ sy,
    checks that the two families coincide, and returns both lattices plus
    the shared family of pair masks.  Exchange for an arbitrary partial
    unit follows from exchange for single arrows, which relate membership
    of (x·g, y) and (x, g·y) one pair at a time.
    """
    diag = diagonal_action(xr, yl)
    lat = diag.lattice
    one = diag.quantale.top()
    invariant_masks = [x for x in lat.elements() if diag.act(one, x) == x]

    gpd = xr.groupoid
    pairs = fibered_pairs(xr, yl)
    pos = {p: k for k, p in enumerate(pairs)}
    moves = set()
    for g in range(gpd.n_arr):
        for i in range(xr.n_pts):
            if xr.anchor[i] != gpd.dom[g]:
                continue
            for j in range(yl.n_pts):
                if yl.anchor[j] != gpd.cod[g]:
                    continue
                k1 = pos[(xr.act[(g, i)], j)]
                k2 = pos[(i, yl.act[(g, j)])]
                if k1 != k2:
                    moves.add((min(k1, k2), max(k1, k2)))
    closed = [mask for mask in range(1 << len(pairs))
              if all((mask >> k1 & 1) == (mask >> k2 & 1)
                     for (k1, k2) in moves)]
    assert closed == invariant_masks, \
        "middle-linearity closure disagrees with diagonal invariants"

    inv_lat = invariant_elements(diag)
    mid_lat = FiniteSupLattice.from_order(
        [lat.label(mask) for mask in closed],
        lambda i, j: closed[i] | closed[j] == closed[j])
    return inv_lat, mid_lat, tuple(closed)


def check_partial_unit_laws(m: QModule) -> ValidationReport:
    """Meet distribution laws for partial units and for base elements."""
    rep = ValidationReport("partial unit action laws")
    q, lat = m.quantale, m.lattice
    pu = partial_unit_elements(q)
    lab = lat.label

    w = next(((q.element_label(s), lab(x), lab(y))
              for s in pu for x in lat.elements() for y in lat.elements()
              if m.act(s, lat.meet_pair(x, y))
              != lat.meet_pair(m.act(s, x), m.act(s, y))), None)
    rep.add("s(x ∧ y) = sx ∧ sy", w is None, w)

    w = next(((q.element_label(s), lab(x), lab(y))
              for s in pu for x in lat.elements() for y in lat.elements()
              if m.act(s, lat.meet_pair(x, m.act(q.involution(s), y)))
              != lat.meet_pair(m.act(s, x), y)), None)
    rep.add("s(x ∧ s*y) = sx ∧ y", w is None, w)

    base = [b for b in q.lattice.elements() if q.lattice.leq(b, q.unit)]
    w = next(((q.element_label(b), lab(x), lab(y))
              for b in base for x in lat.elements() for y in lat.elements()
              if m.act(b, lat.meet_pair(x, y))
              != lat.meet_pair(m.act(b, x), m.act(b, y))), None)
    rep.add("b(x ∧ y) = bx ∧ by for b ≤ e", w is None, w)

    w = next(((q.element_label(b), lab(x), lab(y))
              for b in base for x in lat.elements() for y in lat.elements()
              if lat.meet_pair(m.act(b, x), y)
              != lat.meet_pair(x, m.act(b, y))), None)
    rep.add("bx ∧ y = x ∧ by for b ≤ e", w is None, w)
    return rep
