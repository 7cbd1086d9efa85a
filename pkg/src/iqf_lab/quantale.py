"""Unital involutive quantales and the passage to and from groupoids.

A quantale here is a finite sup-lattice with a sup-linear associative
multiplication, a two-sided unit e and an involution a ↦ a* reversing
products.  Multiplication and involution are stored on join-irreducibles
and extended by joins on demand; for the quantale of a groupoid the
join-irreducibles are the singleton arrow sets, so the stored data is the
composition table itself.

The inverse quantal frame axioms single out, among these, exactly the
ones of the form "powerset of the arrows of an étale groupoid" (in the
discrete, finite case handled by this package).  ``quantale_of_groupoid``
and ``groupoid_of_quantale`` realize the two directions, and
``check_roundtrips`` certifies that they are mutually inverse on concrete
instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    InvalidSpec,
    NotAGroup,
    NotBoolean,
    NotIQF,
    NotPreimageMap,
    SearchBudgetExceeded,
)
from .groupoid import (
    FiniteGroupoid,
    Group,
    GroupoidFunctor,
    compose_functors,
    enumerate_functors,
    enumerate_group_homs,
    group_groupoid,
    is_covering_functor,
    validate_functor,
    validate_groupoid,
)
from .report import ValidationReport
from .suplattice import FiniteSupLattice, SupHom, validate_frame, validate_sup_hom

HOM_SEARCH_BUDGET = 2_000_000


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class InvolutiveQuantale:
    """Sup-lattice with join-irreducible multiplication and involution tables."""

    def __init__(self, lattice: FiniteSupLattice,
                 ji_mult: dict[tuple[int, int], int],
                 ji_invol: dict[int, int],
                 unit: int,
                 atom_labels: tuple | None = None):
        self.lattice = lattice
        jis = lattice.join_irreducibles()
        self._jis = jis
        want = {(j, k) for j in jis for k in jis}
        if set(ji_mult) != want:
            raise InvalidSpec("multiplication table must cover exactly the "
                              "join-irreducible pairs")
        if set(ji_invol) != set(jis):
            raise InvalidSpec("involution table must cover exactly the "
                              "join-irreducibles")
        rng = range(lattice.n)
        if any(v not in rng for v in ji_mult.values()) or \
                any(v not in rng for v in ji_invol.values()):
            raise InvalidSpec("table value out of range")
        if unit not in rng:
            raise InvalidSpec("unit out of range")
        self._ji_mult = dict(ji_mult)
        self._ji_invol = dict(ji_invol)
        self.unit = unit
        self.atom_labels = atom_labels
        self._prod: dict[tuple[int, int], int] = {}
        self._star: dict[int, int] = {}

    def product(self, a: int, b: int) -> int:
        key = (a, b)
        got = self._prod.get(key)
        if got is None:
            lat = self.lattice
            got = lat.join(self._ji_mult[(j, k)]
                           for j in lat.ji_below(a) for k in lat.ji_below(b))
            self._prod[key] = got
        return got

    def involution(self, a: int) -> int:
        got = self._star.get(a)
        if got is None:
            lat = self.lattice
            got = lat.join(self._ji_invol[j] for j in lat.ji_below(a))
            self._star[a] = got
        return got

    def top(self) -> int:
        return self.lattice.top

    def bottom(self) -> int:
        return self.lattice.bottom

    def element_label(self, i: int) -> str:
        lab = self.lattice.label(i)
        if self.lattice.is_powerset:
            return "{" + ",".join(str(m) for m in lab) + "}"
        return str(lab)

    def atom_name(self, atom: int) -> str:
        if self.atom_labels is not None and self.lattice.is_powerset:
            return str(self.lattice.label(atom)[0])
        return self.element_label(atom)

    def __repr__(self):
        return f"InvolutiveQuantale({self.lattice.n} elements)"


def validate_quantale(q: InvolutiveQuantale) -> ValidationReport:
    """Sup-linearity, associativity, unit and involution laws.

    Multiplication is the join-extension of a table on join-irreducibles,
    which makes it sup-linear in each argument by construction; the
    remaining laws are equations between maps that are sup-linear in every
    free variable, so checking them on join-irreducibles decides them.
    """
    rep = ValidationReport("involutive quantale")
    rep.merge(q.lattice.validate(), prefix="lattice: ")
    if not rep.ok:
        return rep
    rep.add("sup-linearity (structural: join-extension of the "
            "join-irreducible table)", True)
    jis = q._jis
    lab = q.element_label

    w = next(((lab(a), lab(b), lab(c)) for a in jis for b in jis for c in jis
              if q.product(q.product(a, b), c) != q.product(a, q.product(b, c))),
             None)
    rep.add("associativity", w is None, w)

    e = q.unit
    w = next(((lab(j),) for j in jis
              if q.product(e, j) != j or q.product(j, e) != j), None)
    rep.add("unit is two-sided", w is None, w)

    w = next(((lab(j),) for j in jis if q.involution(q.involution(j)) != j), None)
    rep.add("involution is involutive", w is None, w)

    w = next(((lab(a), lab(b)) for a in jis for b in jis
              if q.involution(q.product(a, b))
              != q.product(q.involution(b), q.involution(a))), None)
    rep.add("(ab)* = b*a*", w is None, w)
    return rep


def partial_units(q: InvolutiveQuantale) -> list[int]:
    """Elements s with ss* ≤ e and s*s ≤ e, in element order."""
    lat, e = q.lattice, q.unit
    return [s for s in lat.elements()
            if lat.leq(q.product(s, q.involution(s)), e)
            and lat.leq(q.product(q.involution(s), s), e)]


def validate_iqf(q: InvolutiveQuantale) -> ValidationReport:
    """The inverse quantal frame axioms, plus one known consequence."""
    rep = ValidationReport("inverse quantal frame")
    rep.merge(validate_frame(q.lattice), prefix="frame: ")
    lat, e, one = q.lattice, q.unit, q.lattice.top
    lab = q.element_label

    w = next(((lab(a),) for a in lat.elements()
              if lat.meet_pair(q.product(a, one), e)
              != lat.meet_pair(q.product(a, q.involution(a)), e)), None)
    rep.add("a1 ∧ e = aa* ∧ e", w is None, w)

    w = next(((lab(a),) for a in lat.elements()
              if q.product(lat.meet_pair(q.product(a, one), e), a) != a), None)
    rep.add("(a1 ∧ e)a = a", w is None, w)

    cover = lat.join(partial_units(q))
    rep.add("partial units join to 1", cover == one,
            None if cover == one else (lab(cover),))

    # consequence: elements below the unit multiply as meets
    w = None
    for b in lat.elements():
        if not lat.leq(b, e):
            continue
        for a in lat.elements():
            if q.product(b, a) != lat.meet_pair(q.product(b, one), a) or \
                    q.product(a, b) != lat.meet_pair(q.product(one, b), a):
                w = (lab(b), lab(a))
                break
        if w:
            break
    rep.add("ba = b1 ∧ a and ab = 1b ∧ a for b ≤ e", w is None, w)
    return rep


# ---------------------------------------------------------------------------
# the two constructions


def quantale_of_groupoid(gpd: FiniteGroupoid) -> InvolutiveQuantale:
    """Powerset of the arrows, with pointwise composition, inverse and units."""
    lat = FiniteSupLattice.powerset(gpd.arrows)
    ji_mult = {}
    for g in range(gpd.n_arr):
        for h in range(gpd.n_arr):
            prod = 1 << gpd.comp[(g, h)] if gpd.composable(g, h) else 0
            ji_mult[(1 << g, 1 << h)] = prod
    ji_invol = {1 << g: 1 << gpd.inv[g] for g in range(gpd.n_arr)}
    return InvolutiveQuantale(lat, ji_mult, ji_invol, gpd.unit_mask(),
                              atom_labels=gpd.arrows)


def is_boolean_atomic(lat: FiniteSupLattice) -> bool:
    """True when the lattice is the full powerset of its atoms (up to order)."""
    if lat.is_powerset:
        return True
    ats = lat.atoms()
    if lat.n != 1 << len(ats):
        return False
    return all(lat.join(lat.atoms_below(x)) == x for x in lat.elements())


def groupoid_of_quantale(q: InvolutiveQuantale) -> FiniteGroupoid:
    """Atoms as arrows, atoms under the unit as objects.

    Only applies to Boolean atomic instances; finite non-Boolean frames
    correspond to non-discrete topologies and are out of scope here.  The
    construction is canonical, so the result is cached on the quantale.
    """
    cached = getattr(q, "_groupoid", None)
    if cached is not None:
        return cached
    iqf = validate_iqf(q)
    if not iqf.ok:
        raise NotIQF(f"not an inverse quantal frame: {iqf.first_failure().law}")
    lat = q.lattice
    if not is_boolean_atomic(lat):
        raise NotBoolean("lattice is not the powerset of its atoms")
    atoms = lat.atoms()
    pos = {a: i for i, a in enumerate(atoms)}
    unit_atoms = [a for a in atoms if lat.leq(a, q.unit)]
    obj_pos = {a: i for i, a in enumerate(unit_atoms)}

    dom, cod, inv = [], [], []
    for g in atoms:
        ds = [b for b in unit_atoms if q.product(b, g) == g]
        rs = [c for c in unit_atoms if q.product(g, c) == g]
        if len(ds) != 1 or len(rs) != 1:
            raise NotIQF(f"atom {q.atom_name(g)} lacks unique left/right units")
        dom.append(obj_pos[ds[0]])
        cod.append(obj_pos[rs[0]])
        star = q.involution(g)
        if star not in pos:
            raise NotIQF(f"involution of atom {q.atom_name(g)} is not an atom")
        inv.append(pos[star])

    comp = {}
    bottom = lat.bottom
    for i, g in enumerate(atoms):
        for j, h in enumerate(atoms):
            p = q.product(g, h)
            if p == bottom:
                continue
            if p not in pos:
                raise NotIQF(
                    f"product of atoms {q.atom_name(g)}, {q.atom_name(h)} "
                    "is neither an atom nor 0")
            comp[(i, j)] = pos[p]

    out = FiniteGroupoid([q.atom_name(a) for a in unit_atoms],
                         [q.atom_name(a) for a in atoms],
                         dom, cod,
                         [pos[a] for a in unit_atoms], inv, comp)
    rep = validate_groupoid(out)
    assert rep.ok, f"atoms fail the groupoid laws: {rep.summary()}"
    q._groupoid = out
    return out


def check_roundtrips(subject) -> ValidationReport:
    """Both composites of the two constructions, on a groupoid or a quantale.

    Starting from a groupoid G the comparison uses the canonical functor
    sending an arrow to the corresponding singleton atom (the identity on
    indices by construction); starting from a quantale Q it uses the
    canonical join map from subsets of atoms back to Q.  No isomorphism
    search is involved.
    """
    if isinstance(subject, FiniteGroupoid):
        return _roundtrip_from_groupoid(subject)
    if isinstance(subject, InvolutiveQuantale):
        return _roundtrip_from_quantale(subject)
    raise InvalidSpec("round-trip subject must be a groupoid or a quantale")


def _roundtrip_from_groupoid(gpd: FiniteGroupoid) -> ValidationReport:
    rep = ValidationReport("round trip from a groupoid")
    q = quantale_of_groupoid(gpd)
    rep.merge(validate_iqf(q), prefix="step 1: ")
    back = groupoid_of_quantale(q)

    # atoms of a powerset enumerate in bit order, so arrow k returns as
    # arrow k; the canonical comparison is the identity on arrow indices
    labels_match = back.arrows == gpd.arrows
    rep.add("arrow labels survive the round trip", labels_match,
            None if labels_match else (back.arrows, gpd.arrows))
    iota0 = []
    unit_atoms = sorted(1 << u for u in gpd.unit)
    for x in range(gpd.n_obj):
        iota0.append(unit_atoms.index(1 << gpd.unit[x]))
    iota = GroupoidFunctor(gpd, back, tuple(iota0), tuple(range(gpd.n_arr)))
    rep.merge(validate_functor(iota), prefix="canonical comparison: ")
    rep.add("canonical comparison is bijective",
            len(set(iota.obj_map)) == back.n_obj == gpd.n_obj
            and len(set(iota.arrow_map)) == back.n_arr == gpd.n_arr)
    return rep


def _roundtrip_from_quantale(q: InvolutiveQuantale) -> ValidationReport:
    rep = ValidationReport("round trip from a quantale")
    gpd = groupoid_of_quantale(q)
    q2 = quantale_of_groupoid(gpd)
    lat, lat2 = q.lattice, q2.lattice
    atoms = lat.atoms()

    # canonical map: a set of arrows goes to the join of the matching atoms
    phi = [lat.join(atoms[b] for b in _bits(mask)) for mask in range(lat2.n)]

    rep.add("same number of elements", lat2.n == lat.n)
    rep.add("canonical map is a bijection", len(set(phi)) == lat.n)
    w = next(((q2.element_label(x), q2.element_label(y))
              for x in range(lat2.n) for y in range(lat2.n)
              if lat2.leq(x, y) != lat.leq(phi[x], phi[y])), None)
    rep.add("canonical map is an order isomorphism", w is None, w)
    rep.add("unit corresponds", phi[q2.unit] == q.unit)
    # products and involution are sup-linear, so atom-level agreement
    # extends to all elements along the join-preserving bijection
    w = next(((q2.atom_name(1 << i),) for i in range(len(atoms))
              if phi[q2.involution(1 << i)] != q.involution(atoms[i])), None)
    rep.add("involution corresponds on atoms", w is None, w)
    w = next(((q2.atom_name(1 << i), q2.atom_name(1 << j))
              for i in range(len(atoms)) for j in range(len(atoms))
              if phi[q2.product(1 << i, 1 << j)]
              != q.product(atoms[i], atoms[j])), None)
    rep.add("multiplication corresponds on atoms", w is None, w)
    return rep


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class QuantaleHom:
    source: InvolutiveQuantale
    target: InvolutiveQuantale
    map: SupHom

    def __call__(self, a: int) -> int:
        return self.map(a)


def validate_hom(hom: QuantaleHom) -> ValidationReport:
    """Record which structure the underlying sup-map preserves.

    The multiplicative, involutive and lax conditions are equations or
    inequalities between sup-linear expressions, so they are decided on
    join-irreducible arguments.  The finite-meet condition is scanned over
    all pairs in general; between powerset lattices it reduces to top
    preservation plus pairwise disjointness of the atom images.
    """
    rep = ValidationReport("quantale hom")
    rep.merge(validate_sup_hom(hom.map), prefix="sup-hom: ")
    if not rep.ok:
        return rep
    q, r, h = hom.source, hom.target, hom.map
    jis = q._jis
    lab = q.element_label

    w = next(((lab(j), lab(k)) for j in jis for k in jis
              if r.product(h(j), h(k)) != h(q.product(j, k))), None)
    rep.add("multiplicative", w is None, w)

    rep.add("unital", h(q.unit) == r.unit,
            None if h(q.unit) == r.unit else (r.element_label(h(q.unit)),))

    w = next(((lab(j),) for j in jis
              if h(q.involution(j)) != r.involution(h(j))), None)
    rep.add("involutive", w is None, w)

    ok_top = h(q.top()) == r.top()
    w = None if ok_top else ("1",)
    if ok_top:
        if q.lattice.is_powerset and r.lattice.is_powerset:
            # between powersets both sides of h(a∧b) = h(a)∧h(b) are
            # join-linear in each argument, so the law holds iff distinct
            # atoms have disjoint images
            bot = r.lattice.bottom
            ats = q.lattice.atoms()
            w = next(((lab(j), lab(k)) for j in ats for k in ats
                      if j < k and r.lattice.meet_pair(h(j), h(k)) != bot),
                     None)
        else:
            w = next(((lab(a), lab(b)) for a in q.lattice.elements()
                      for b in q.lattice.elements()
                      if h(q.lattice.meet_pair(a, b))
                      != r.lattice.meet_pair(h(a), h(b))), None)
    rep.add("finite-meet", w is None, w)

    w = next(((lab(j), lab(k)) for j in jis for k in jis
              if not r.lattice.leq(r.product(h(j), h(k)), h(q.product(j, k)))),
             None)
    rep.add("lax: submultiplicative", w is None, w)
    w = next(((lab(j),) for j in jis
              if h(q.involution(j)) != r.involution(h(j))), None)
    rep.add("lax: involution preserved", w is None, w)
    rep.add("lax: unit below the image of the unit",
            r.lattice.leq(r.unit, h(q.unit)))
    return rep


def hom_flags(hom: QuantaleHom) -> dict[str, bool]:
    rep = validate_hom(hom)
    got = {c.law: c.ok for c in rep.checks}
    return {
        "multiplicative": got["multiplicative"],
        "unital": got["unital"],
        "involutive": got["involutive"],
        "finite_meet": got["finite-meet"],
        "lax": got["lax: submultiplicative"] and got["lax: involution preserved"]
               and got["lax: unit below the image of the unit"],
    }


def _hom_from_ji_images(q: InvolutiveQuantale, r: InvolutiveQuantale,
                        ji_images: dict[int, int]) -> QuantaleHom:
    lat = q.lattice
    images = tuple(r.lattice.join(ji_images[j] for j in lat.ji_below(x))
                   for x in lat.elements())
    return QuantaleHom(q, r, SupHom(lat, r.lattice, images))


# -- enumeration ------------------------------------------------------------

def enumerate_unital_homs(q: InvolutiveQuantale, r: InvolutiveQuantale,
                          budget: int | None = None) -> list[QuantaleHom]:
    """All unital multiplicative sup-maps q → r, sorted by image vectors.

    Involution preservation is NOT used to prune the search; instead it is
    asserted on every hom found, exercising the fact that unital
    multiplicative sup-maps between these quantales preserve it for free.
    """
    budget = HOM_SEARCH_BUDGET if budget is None else budget
    try:
        gs = groupoid_of_quantale(q)
        gt = groupoid_of_quantale(r)
    except NotBoolean:
        found = _enumerate_homs_generic(q, r, budget)
    else:
        found = _enumerate_homs_atomic(q, r, gs, gt, budget)
    found.sort(key=lambda hom: hom.map.images)
    for hom in found:
        flags = hom_flags(hom)
        assert flags["involutive"], \
            "found a unital multiplicative hom that breaks involution"
    return found


def _enumerate_homs_atomic(q: InvolutiveQuantale, r: InvolutiveQuantale,
                           gs: FiniteGroupoid, gt: FiniteGroupoid,
                           budget: int) -> list[QuantaleHom]:
    """Boolean-atomic case, via the groupoids on either side.

    A unital hom restricts to a map from objects of gt to objects of gs
    (the image of each source unit atom is a disjoint union of target unit
    atoms, jointly covering the target unit).  The image of a non-unit
    atom from x to y is then forced to be a bijection graph between the
    corresponding object blocks, which keeps the branching small.
    """
    atoms_q = q.lattice.atoms()
    atoms_r = r.lattice.atoms()
    n = gs.n_arr
    bottom_r = r.lattice.bottom
    # target atoms indexed by target arrow
    atom_of_arrow = list(atoms_r)

    between = [[[] for _ in range(gt.n_obj)] for _ in range(gt.n_obj)]
    for m in range(gt.n_arr):
        between[gt.dom[m]][gt.cod[m]].append(m)

    unit_arrow_of_obj = gs.unit
    non_units = [g for g in range(n) if g not in set(gs.unit)]

    out: list[QuantaleHom] = []
    nodes = 0

    for pi in itertools.product(range(gs.n_obj), repeat=gt.n_obj):
        blocks = [[y for y in range(gt.n_obj) if pi[y] == x]
                  for x in range(gs.n_obj)]
        t: list[int | None] = [None] * n
        for x in range(gs.n_obj):
            t[unit_arrow_of_obj[x]] = r.lattice.join(
                atom_of_arrow[gt.unit[y]] for y in blocks[x])

        candidates: dict[int, list[int]] = {}
        feasible = True
        for g in non_units:
            bx, by = blocks[gs.dom[g]], blocks[gs.cod[g]]
            if len(bx) != len(by):
                feasible = False
                break
            cands = []
            for sigma in itertools.permutations(by):
                for choice in itertools.product(
                        *(between[p][s] for p, s in zip(bx, sigma))):
                    cands.append(r.lattice.join(atom_of_arrow[m] for m in choice))
            seen = set()
            cands = [c for c in cands if not (c in seen or seen.add(c))]
            if not cands:
                feasible = False
                break
            candidates[g] = cands
        if not feasible:
            continue

        # assign forced atoms (products or inverses of known ones) early
        known = set(gs.unit)
        order: list[int] = []
        pool = set(non_units)
        while pool:
            forced = next(
                (g for g in sorted(pool)
                 if any(gs.composable(a, b) and gs.comp[(a, b)] == g
                        for a in known for b in known)
                 or any(gs.inv[a] == g for a in known)), None)
            g = forced if forced is not None else \
                min(pool, key=lambda x: (len(candidates[x]), x))
            order.append(g)
            pool.discard(g)
            known.add(g)

        def consistent(just: int) -> bool:
            # a pair (a, b) is re-examined whenever the value of a factor
            # or of the composite has just landed
            assigned = [a for a in range(n) if t[a] is not None]
            for a in assigned:
                for b in assigned:
                    if gs.composable(a, b):
                        c = gs.comp[(a, b)]
                        if t[c] is None or just not in (a, b, c):
                            continue
                        if r.product(t[a], t[b]) != t[c]:
                            return False
                    elif just in (a, b) and r.product(t[a], t[b]) != bottom_r:
                        return False
            return True

        def search(k: int):
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded(
                    f"hom search exceeded {budget} nodes")
            if k == len(order):
                ji_images = {atoms_q[g]: t[g] for g in range(n)}
                out.append(_hom_from_ji_images(q, r, ji_images))
                return
            g = order[k]
            for cand in candidates[g]:
                t[g] = cand
                if consistent(g):
                    search(k + 1)
                t[g] = None

        search(0)
    return out


def _enumerate_homs_generic(q: InvolutiveQuantale, r: InvolutiveQuantale,
                            budget: int) -> list[QuantaleHom]:
    """Backtracking over join-irreducible images, for non-atomic instances."""
    lat, rlat = q.lattice, r.lattice
    jis = list(q._jis)
    e_jis = [j for j in jis if lat.leq(j, q.unit)]
    rest = [j for j in jis if j not in set(e_jis)]
    order = e_jis + rest
    images: dict[int, int] = {}
    out: list[QuantaleHom] = []
    nodes = 0

    def consistent(just: int) -> bool:
        # extension-consistency, partial: lower irreducibles push up
        for j, v in images.items():
            if lat.leq(j, just) and not rlat.leq(v, images[just]):
                return False
            if lat.leq(just, j) and not rlat.leq(images[just], v):
                return False
        # a pair is re-examined when a factor or any irreducible under the
        # product has just been assigned
        for a in images:
            for b in images:
                p = q.product(a, b)
                below = lat.ji_below(p)
                if just not in (a, b) and just not in below:
                    continue
                if all(x in images for x in below):
                    want = rlat.join(images[x] for x in below)
                    if r.product(images[a], images[b]) != want:
                        return False
        return True

    def search(k: int):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(f"hom search exceeded {budget} nodes")
        if k == len(order):
            hom = _hom_from_ji_images(q, r, dict(images))
            # keep only assignments that are restrictions of their extension
            if any(hom.map(j) != images[j] for j in jis):
                return
            flags = hom_flags(hom)
            if flags["unital"] and flags["multiplicative"]:
                out.append(hom)
            return
        j = order[k]
        e_done = k + 1 == len(e_jis)
        for v in rlat.elements():
            if lat.leq(j, q.unit) and not rlat.leq(v, r.unit):
                continue
            images[j] = v
            if consistent(j):
                if e_done and rlat.join(images[x] for x in e_jis) != r.unit:
                    pass
                else:
                    search(k + 1)
            del images[j]

    search(0)
    return out


# -- functors from inverse-image maps ---------------------------------------

def functor_of_iqloc_morphism(hom: QuantaleHom) -> GroupoidFunctor:
    """Rebuild the functor whose arrow-preimage map is the given hom.

    The hom runs from the quantale of the target groupoid to the quantale
    of the source groupoid (inverse-image direction).  A finite-meet,
    join, top and bottom preserving map between powersets is the preimage
    of a unique point map, recovered atom by atom.
    """
    r_side, q_side = hom.source, hom.target
    gq = groupoid_of_quantale(q_side)
    gr = groupoid_of_quantale(r_side)
    atoms_q = q_side.lattice.atoms()
    atoms_r = r_side.lattice.atoms()

    f1 = []
    for g_atom in atoms_q:
        ks = [k for k, k_atom in enumerate(atoms_r)
              if q_side.lattice.leq(g_atom, hom.map(k_atom))]
        if len(ks) != 1:
            raise NotPreimageMap(
                f"atom {q_side.atom_name(g_atom)} lies under "
                f"{len(ks)} atom images, expected exactly 1")
        f1.append(ks[0])

    unit_arrows_r = set(gr.unit)
    f0 = []
    for x in range(gq.n_obj):
        k = f1[gq.unit[x]]
        if k not in unit_arrows_r:
            raise NotPreimageMap(
                f"unit atom at object {gq.objects[x]!r} maps under a "
                "non-unit atom")
        f0.append(gr.dom[k])

    fun = GroupoidFunctor(gq, gr, tuple(f0), tuple(f1))
    rep = validate_functor(fun)
    if not rep.ok or not is_covering_functor(fun):
        raise NotPreimageMap(
            "recovered point map is not a covering functor; the given map "
            "is not the inverse image of one")
    return fun


def preimage_hom(fun: GroupoidFunctor) -> QuantaleHom:
    """Arrow-preimage of a functor, from the target quantale to the source."""
    qs = quantale_of_groupoid(fun.source)
    qt = quantale_of_groupoid(fun.target)
    pre = [0] * fun.target.n_arr
    for g in range(fun.source.n_arr):
        pre[fun.arr(g)] |= 1 << g
    images = tuple(_or_all(pre[k] for k in _bits(mask))
                   for mask in range(qt.lattice.n))
    return QuantaleHom(qt, qs, SupHom(qt.lattice, qs.lattice, images))


def direct_image_hom(fun: GroupoidFunctor) -> QuantaleHom:
    """Arrow-image of a functor, from the source quantale to the target."""
    qs = quantale_of_groupoid(fun.source)
    qt = quantale_of_groupoid(fun.target)
    images = tuple(_or_all(1 << fun.arr(g) for g in _bits(mask))
                   for mask in range(qs.lattice.n))
    return QuantaleHom(qs, qt, SupHom(qs.lattice, qt.lattice, images))


def _or_all(items: Iterable[int]) -> int:
    out = 0
    for x in items:
        out |= x
    return out


# ---------------------------------------------------------------------------
# groups of units and the one-object case


def group_units(q: InvolutiveQuantale) -> tuple[Group, tuple[int, ...]]:
    """Invertible elements with inherited multiplication, as a plain group."""
    e = q.unit
    members = [a for a in q.lattice.elements()
               if any(q.product(a, b) == e for b in q.lattice.elements())]
    index = {a: i for i, a in enumerate(members)}
    table = []
    for a in members:
        row = []
        for b in members:
            p = q.product(a, b)
            if p not in index:
                raise NotAGroup(
                    f"units are not closed: {q.element_label(a)} * "
                    f"{q.element_label(b)} = {q.element_label(p)}")
            row.append(index[p])
        table.append(row)
    try:
        group = Group([q.element_label(a) for a in members], table)
    except InvalidSpec as exc:
        raise NotAGroup(str(exc)) from exc
    rep = group.validate()
    if not rep.ok:
        raise NotAGroup(rep.summary())
    return group, tuple(members)


def check_group_lemma(g: Group, h: Group, f: Sequence[int],
                      include_counting: bool = True) -> ValidationReport:
    """One-object case: preimage is a unital hom exactly for isomorphisms.

    Also covers the covariant direction: the direct image of any group
    homomorphism is a unital multiplicative hom of the powerset quantales,
    and the two hom-sets have the same size.
    """
    rep = ValidationReport("group case")
    f = tuple(f)
    is_hom = all(h.op(f[a], f[b]) == f[g.op(a, b)]
                 for a in range(g.n) for b in range(g.n))
    rep.add("input is a group homomorphism", is_hom)
    if not is_hom:
        return rep

    pg = quantale_of_groupoid(group_groupoid(g))
    ph = quantale_of_groupoid(group_groupoid(h))

    pre = [0] * h.n
    for a in range(g.n):
        pre[f[a]] |= 1 << a
    pre_images = tuple(_or_all(pre[k] for k in _bits(mask))
                       for mask in range(ph.lattice.n))
    pre_hom = QuantaleHom(ph, pg, SupHom(ph.lattice, pg.lattice, pre_images))
    flags = hom_flags(pre_hom)
    pre_ok = flags["multiplicative"] and flags["unital"]
    iso = len(set(f)) == g.n == h.n
    rep.add("preimage is a unital multiplicative hom", pre_ok)
    rep.add("map is an isomorphism", iso)
    rep.add("preimage hom exactly when isomorphism", pre_ok == iso)

    dir_images = tuple(_or_all(1 << f[a] for a in _bits(mask))
                       for mask in range(pg.lattice.n))
    dir_flags = hom_flags(QuantaleHom(pg, ph, SupHom(pg.lattice, ph.lattice,
                                                     dir_images)))
    rep.add("direct image is a unital multiplicative hom",
            dir_flags["multiplicative"] and dir_flags["unital"])

    if include_counting:
        group_count = len(enumerate_group_homs(g, h))
        quantale_count = len(enumerate_unital_homs(pg, ph))
        rep.add("as many unital quantale homs as group homs",
                group_count == quantale_count, (group_count, quantale_count))
    return rep


# ---------------------------------------------------------------------------
# lax image of functors


def check_lax_image(fun: GroupoidFunctor,
                    then: GroupoidFunctor | None = None) -> ValidationReport:
    """Preimage of a functor is lax; strict exactly for coverings.

    With a second, composable functor the contravariant functoriality of
    the assignment is checked on the pair as well.
    """
    rep = ValidationReport("lax image")
    hom = preimage_hom(fun)
    full = validate_hom(hom)
    for check in full.checks:
        if check.law.startswith("lax: "):
            rep.add(check.law, check.ok, check.witness)
    got = {c.law: c.ok for c in full.checks}
    strict = got["multiplicative"] and got["unital"]
    rep.add("strict exactly when covering", strict == is_covering_functor(fun),
            (strict, is_covering_functor(fun)))
    if then is not None:
        composite = preimage_hom(compose_functors(fun, then))
        stepwise = preimage_hom(then).map.then(preimage_hom(fun).map)
        rep.add("preimage of a composite is the reversed composite",
                composite.map.images == stepwise.images)
    return rep


def check_lax_faithfulness(src: FiniteGroupoid,
                           tgt: FiniteGroupoid) -> ValidationReport:
    """Distinct functors have distinct preimage maps."""
    rep = ValidationReport("faithfulness of the preimage assignment")
    funs = enumerate_functors(src, tgt)
    images = [preimage_hom(f).map.images for f in funs]
    rep.add("preimage maps are pairwise distinct",
            len(set(images)) == len(funs), (len(set(images)), len(funs)))
    return rep
