"""Finite groupoids, presented by arrow tables.

Composition convention used everywhere in this package: the pair (g, h) is
composable exactly when r(g) = d(h), and then d(gh) = d(g), r(gh) = r(h).
Units satisfy g.inv(g) = unit(d(g)) and inv(g).g = unit(r(g)).  Arrows can
be pictured as d(g) --g--> r(g) with composition written left to right.

Groups appear both as one-object groupoids and as a plain table type of
their own (unit groups of quantales come back as the latter).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import HypothesisViolated, InvalidSpec, UnknownElement
from .report import ValidationReport


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# plain groups


class Group:
    """A finite group given by its multiplication table."""

    def __init__(self, labels: Sequence, mult: Sequence[Sequence[int]]):
        self.labels = tuple(labels)
        self.n = len(self.labels)
        self.mult = tuple(tuple(row) for row in mult)
        if len(self.mult) != self.n or any(len(r) != self.n for r in self.mult):
            raise InvalidSpec("multiplication table shape does not match elements")
        if any(not 0 <= v < self.n for row in self.mult for v in row):
            raise UnknownElement("multiplication table entry out of range")
        self.unit = self._find_unit()
        self.inv = self._find_inverses()

    def _find_unit(self) -> int:
        for e in range(self.n):
            if all(self.mult[e][g] == g and self.mult[g][e] == g for g in range(self.n)):
                return e
        raise InvalidSpec("table has no two-sided identity")

    def _find_inverses(self) -> tuple[int, ...]:
        inv = []
        for g in range(self.n):
            for h in range(self.n):
                if self.mult[g][h] == self.unit and self.mult[h][g] == self.unit:
                    inv.append(h)
                    break
            else:
                raise InvalidSpec(f"element {self.labels[g]!r} has no inverse")
        return tuple(inv)

    def op(self, g: int, h: int) -> int:
        return self.mult[g][h]

    def validate(self) -> ValidationReport:
        rep = ValidationReport("group")
        witness = next((tuple(self.labels[x] for x in (a, b, c))
                        for a in range(self.n) for b in range(self.n)
                        for c in range(self.n)
                        if self.op(self.op(a, b), c) != self.op(a, self.op(b, c))),
                       None)
        rep.add("associativity", witness is None, witness)
        rep.add("two-sided identity", True)   # construction finds it or raises
        rep.add("two-sided inverses", True)
        return rep

    def __repr__(self):
        return f"Group({self.n} elements)"


def cyclic_group(n: int) -> Group:
    return Group([f"g{k}" for k in range(n)],
                 [[(i + j) % n for j in range(n)] for i in range(n)])


def klein_group() -> Group:
    # Z2 x Z2 with bitwise xor
    return Group(["e", "a", "b", "ab"],
                 [[i ^ j for j in range(4)] for i in range(4)])


def symmetric_group_3() -> Group:
    """S3 as permutations of {0,1,2}; product pq = apply p, then q."""
    perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2)]
    index = {p: i for i, p in enumerate(perms)}
    mult = [[index[tuple(q[p[k]] for k in range(3))] for q in perms] for p in perms]
    return Group(["".join(map(str, p)) for p in perms], mult)


def enumerate_group_homs(g: Group, h: Group) -> list[tuple[int, ...]]:
    """All group homomorphisms as image tuples, by incremental backtracking."""
    out: list[tuple[int, ...]] = []
    images = [-1] * g.n
    images[g.unit] = h.unit
    order = [x for x in range(g.n) if x != g.unit]

    def consistent(just: int) -> bool:
        for a in range(g.n):
            if images[a] < 0:
                continue
            for x, y in ((just, a), (a, just)):
                p = g.op(x, y)
                if images[p] >= 0 and h.op(images[x], images[y]) != images[p]:
                    return False
        return True

    def search(k: int):
        if k == len(order):
            out.append(tuple(images))
            return
        x = order[k]
        for y in range(h.n):
            images[x] = y
            if consistent(x):
                search(k + 1)
            images[x] = -1

    search(0)
    out.sort()
    return out


def group_isomorphism(g: Group, h: Group) -> tuple[int, ...] | None:
    if g.n != h.n:
        return None
    for f in enumerate_group_homs(g, h):
        if len(set(f)) == g.n:
            return f
    return None


# ---------------------------------------------------------------------------
# groupoids


class FiniteGroupoid:
    """Objects, arrows and a partial composition table."""

    def __init__(self, objects: Sequence, arrows: Sequence,
                 dom: Sequence[int], cod: Sequence[int],
                 unit: Sequence[int], inv: Sequence[int],
                 comp: dict[tuple[int, int], int]):
        self.objects = tuple(objects)
        self.arrows = tuple(arrows)
        self.n_obj = len(self.objects)
        self.n_arr = len(self.arrows)
        self.dom = tuple(dom)
        self.cod = tuple(cod)
        self.unit = tuple(unit)
        self.inv = tuple(inv)
        self.comp = dict(comp)
        for name, seq, bound in (("dom", self.dom, self.n_obj),
                                 ("cod", self.cod, self.n_obj),
                                 ("unit", self.unit, self.n_arr),
                                 ("inv", self.inv, self.n_arr)):
            if any(not 0 <= v < bound for v in seq):
                raise UnknownElement(f"{name} table entry out of range")
        if len(self.dom) != self.n_arr or len(self.cod) != self.n_arr \
                or len(self.inv) != self.n_arr or len(self.unit) != self.n_obj:
            raise InvalidSpec("table lengths do not match arrow/object counts")
        for (x, y), z in self.comp.items():
            if not (0 <= x < self.n_arr and 0 <= y < self.n_arr and 0 <= z < self.n_arr):
                raise UnknownElement("composition entry out of range")

    # -- queries ------------------------------------------------------------

    def composable(self, g: int, h: int) -> bool:
        return self.cod[g] == self.dom[h]

    def compose(self, g: int, h: int) -> int:
        try:
            return self.comp[(g, h)]
        except KeyError:
            raise UnknownElement(
                f"arrows {self.arrows[g]!r}, {self.arrows[h]!r} do not compose") from None

    def star(self, x: int) -> list[int]:
        """Arrows leaving x, i.e. with d = x."""
        return [g for g in range(self.n_arr) if self.dom[g] == x]

    def costar(self, x: int) -> list[int]:
        return [g for g in range(self.n_arr) if self.cod[g] == x]

    def unit_mask(self) -> int:
        mask = 0
        for u in self.unit:
            mask |= 1 << u
        return mask

    def arrow_label(self, g: int):
        return self.arrows[g]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGroupoid):
            return NotImplemented
        return (self.objects == other.objects and self.arrows == other.arrows
                and self.dom == other.dom and self.cod == other.cod
                and self.unit == other.unit and self.inv == other.inv
                and self.comp == other.comp)

    def __hash__(self):
        return hash((self.objects, self.arrows, self.dom, self.cod,
                     self.unit, self.inv))

    def __repr__(self):
        return f"FiniteGroupoid({self.n_obj} objects, {self.n_arr} arrows)"


def validate_groupoid(gpd: FiniteGroupoid) -> ValidationReport:
    rep = ValidationReport("groupoid")
    lab = gpd.arrow_label
    obj = lambda x: gpd.objects[x]

    w = next(((obj(x),) for x in range(gpd.n_obj)
              if gpd.dom[gpd.unit[x]] != x or gpd.cod[gpd.unit[x]] != x), None)
    rep.add("unit arrows are endo-arrows at their object", w is None, w)

    w = None
    for g in range(gpd.n_arr):
        for h in range(gpd.n_arr):
            defined = (g, h) in gpd.comp
            if defined != gpd.composable(g, h):
                w = (lab(g), lab(h), "defined" if defined else "missing")
                break
        if w:
            break
    rep.add("composition defined exactly when r(g) = d(h)", w is None, w)
    if w:
        return rep

    w = next(((lab(g), lab(h)) for (g, h), gh in gpd.comp.items()
              if gpd.dom[gh] != gpd.dom[g] or gpd.cod[gh] != gpd.cod[h]), None)
    rep.add("d(gh) = d(g) and r(gh) = r(h)", w is None, w)
    if w:
        # later scans look up composites whose existence this law guarantees
        return rep

    w = None
    for g in range(gpd.n_arr):
        if gpd.comp.get((gpd.unit[gpd.dom[g]], g)) != g or \
                gpd.comp.get((g, gpd.unit[gpd.cod[g]])) != g:
            w = (lab(g),)
            break
    rep.add("units are neutral", w is None, w)

    w = None
    for (g, h), gh in gpd.comp.items():
        for k in range(gpd.n_arr):
            if gpd.composable(h, k):
                if gpd.comp[(gh, k)] != gpd.comp[(g, gpd.comp[(h, k)])]:
                    w = (lab(g), lab(h), lab(k))
                    break
        if w:
            break
    rep.add("associativity", w is None, w)

    w = None
    for g in range(gpd.n_arr):
        gi = gpd.inv[g]
        if gpd.dom[gi] != gpd.cod[g] or gpd.cod[gi] != gpd.dom[g] \
                or gpd.comp.get((g, gi)) != gpd.unit[gpd.dom[g]] \
                or gpd.comp.get((gi, g)) != gpd.unit[gpd.cod[g]] \
                or gpd.inv[gi] != g:
            w = (lab(g),)
            break
    rep.add("g.inv(g) = unit(d(g)), inv(g).g = unit(r(g)), inv involutive",
            w is None, w)
    return rep


# -- standard shapes ---------------------------------------------------------

def group_groupoid(group: Group, object_label: str = "*") -> FiniteGroupoid:
    n = group.n
    comp = {(i, j): group.op(i, j) for i in range(n) for j in range(n)}
    return FiniteGroupoid([object_label], group.labels,
                          [0] * n, [0] * n, [group.unit], group.inv, comp)


def pair_groupoid(points: Iterable) -> FiniteGroupoid:
    pts = tuple(points)
    if not pts:
        raise InvalidSpec("pair groupoid needs at least one point")
    k = len(pts)
    arrows = [f"{a}>{b}" for a in pts for b in pts]
    idx = lambda a, b: a * k + b
    dom = [a for a in range(k) for _ in range(k)]
    cod = [b for _ in range(k) for b in range(k)]
    unit = [idx(a, a) for a in range(k)]
    inv = [idx(b, a) for a in range(k) for b in range(k)]
    comp = {}
    for a in range(k):
        for b in range(k):
            for c in range(k):
                comp[(idx(a, b), idx(b, c))] = idx(a, c)
    return FiniteGroupoid(pts, arrows, dom, cod, unit, inv, comp)


def discrete_groupoid(points: Iterable) -> FiniteGroupoid:
    pts = tuple(points)
    if not pts:
        raise InvalidSpec("discrete groupoid needs at least one point")
    n = len(pts)
    ids = list(range(n))
    comp = {(x, x): x for x in range(n)}
    return FiniteGroupoid(pts, [f"id_{p}" for p in pts], ids, ids, ids, ids, comp)


def action_groupoid(group: Group, points: Iterable,
                    act: dict[tuple[int, int], int]) -> FiniteGroupoid:
    """Arrows (g, x) from x to g.x for a left group action g.(h.x) = (gh).x."""
    pts = tuple(points)
    npt = len(pts)
    for g in range(group.n):
        for x in range(npt):
            if (g, x) not in act or not 0 <= act[(g, x)] < npt:
                raise InvalidSpec("action table is not total on group x points")
    for x in range(npt):
        if act[(group.unit, x)] != x:
            raise InvalidSpec("action does not fix points under the identity")
    for g in range(group.n):
        for h in range(group.n):
            for x in range(npt):
                if act[(g, act[(h, x)])] != act[(group.op(g, h), x)]:
                    raise InvalidSpec("action is not associative")
    arrows = [(g, x) for g in range(group.n) for x in range(npt)]
    index = {a: i for i, a in enumerate(arrows)}
    labels = [f"{group.labels[g]}|{pts[x]}" for g, x in arrows]
    dom = [x for _, x in arrows]
    cod = [act[(g, x)] for g, x in arrows]
    unit = [index[(group.unit, x)] for x in range(npt)]
    inv = [index[(group.inv[g], act[(g, x)])] for g, x in arrows]
    comp = {}
    for a, x in arrows:
        for b in range(group.n):
            # (a, x) ends at a.x, so it meets (b, a.x); first a then b is (ba, x)
            comp[(index[(a, x)], index[(b, act[(a, x)])])] = index[(group.op(b, a), x)]
    return FiniteGroupoid(pts, labels, dom, cod, unit, inv, comp)


def disjoint_union(g1: FiniteGroupoid, g2: FiniteGroupoid) -> FiniteGroupoid:
    objects = [f"0:{o}" for o in g1.objects] + [f"1:{o}" for o in g2.objects]
    arrows = [f"0:{a}" for a in g1.arrows] + [f"1:{a}" for a in g2.arrows]
    so, sa = g1.n_obj, g1.n_arr
    dom = list(g1.dom) + [x + so for x in g2.dom]
    cod = list(g1.cod) + [x + so for x in g2.cod]
    unit = list(g1.unit) + [u + sa for u in g2.unit]
    inv = list(g1.inv) + [v + sa for v in g2.inv]
    comp = dict(g1.comp)
    comp.update({(g + sa, h + sa): gh + sa for (g, h), gh in g2.comp.items()})
    return FiniteGroupoid(objects, arrows, dom, cod, unit, inv, comp)


def build_standard(spec: dict) -> FiniteGroupoid:
    """Build one of the standard shapes from a small description dict."""
    if not isinstance(spec, dict) or "shape" not in spec:
        raise InvalidSpec("build spec must be a dict with a 'shape' key")
    shape = spec["shape"]
    if shape == "group":
        return group_groupoid(Group(spec["elements"], spec["mult"]))
    if shape == "cyclic":
        return group_groupoid(cyclic_group(int(spec["order"])))
    if shape == "klein":
        return group_groupoid(klein_group())
    if shape == "s3":
        return group_groupoid(symmetric_group_3())
    if shape == "pair":
        return pair_groupoid(spec["points"])
    if shape == "discrete":
        return discrete_groupoid(spec["points"])
    if shape == "action":
        group = Group(spec["group"]["elements"], spec["group"]["mult"])
        pts = tuple(spec["points"])
        act = {(g, x): y for g, x, y in spec["act"]}
        return action_groupoid(group, pts, act)
    if shape == "disjoint_union":
        parts = spec["parts"]
        if len(parts) < 2:
            raise InvalidSpec("disjoint_union needs at least two parts")
        out = build_standard(parts[0])
        for part in parts[1:]:
            out = disjoint_union(out, build_standard(part))
        return out
    raise InvalidSpec(f"unknown shape {shape!r}")


# ---------------------------------------------------------------------------
# functors


@dataclass(frozen=True)
class GroupoidFunctor:
    source: FiniteGroupoid
    target: FiniteGroupoid
    obj_map: tuple[int, ...]
    arrow_map: tuple[int, ...]

    def obj(self, x: int) -> int:
        return self.obj_map[x]

    def arr(self, g: int) -> int:
        return self.arrow_map[g]


def identity_functor(gpd: FiniteGroupoid) -> GroupoidFunctor:
    return GroupoidFunctor(gpd, gpd, tuple(range(gpd.n_obj)), tuple(range(gpd.n_arr)))


def compose_functors(f: GroupoidFunctor, g: GroupoidFunctor) -> GroupoidFunctor:
    """First f, then g."""
    assert f.target is g.source or f.target == g.source
    return GroupoidFunctor(f.source, g.target,
                           tuple(g.obj_map[x] for x in f.obj_map),
                           tuple(g.arrow_map[a] for a in f.arrow_map))


def validate_functor(fun: GroupoidFunctor) -> ValidationReport:
    rep = ValidationReport("groupoid functor")
    src, tgt = fun.source, fun.target
    lab = src.arrow_label

    w = next(((lab(g),) for g in range(src.n_arr)
              if tgt.dom[fun.arr(g)] != fun.obj(src.dom[g])), None)
    rep.add("d(F g) = F(d g)", w is None, w)
    w = next(((lab(g),) for g in range(src.n_arr)
              if tgt.cod[fun.arr(g)] != fun.obj(src.cod[g])), None)
    rep.add("r(F g) = F(r g)", w is None, w)
    w = next(((src.objects[x],) for x in range(src.n_obj)
              if fun.arr(src.unit[x]) != tgt.unit[fun.obj(x)]), None)
    rep.add("F(unit x) = unit(F x)", w is None, w)
    w = next(((lab(g),) for g in range(src.n_arr)
              if fun.arr(src.inv[g]) != tgt.inv[fun.arr(g)]), None)
    rep.add("F(inv g) = inv(F g)", w is None, w)
    w = None
    for (g, h), gh in src.comp.items():
        fg, fh = fun.arr(g), fun.arr(h)
        if not tgt.composable(fg, fh) or tgt.comp[(fg, fh)] != fun.arr(gh):
            w = (lab(g), lab(h))
            break
    rep.add("F(gh) = F(g)F(h)", w is None, w)
    return rep


def enumerate_functors(src: FiniteGroupoid, tgt: FiniteGroupoid) -> list[GroupoidFunctor]:
    """All functors src -> tgt, ordered by (object map, arrow map)."""
    out = []
    unit_of = dict(zip(src.unit, range(src.n_obj)))
    non_units = [g for g in range(src.n_arr) if g not in unit_of]
    for obj_map in itertools.product(range(tgt.n_obj), repeat=src.n_obj):
        arrow_map = [-1] * src.n_arr
        for x in range(src.n_obj):
            arrow_map[src.unit[x]] = tgt.unit[obj_map[x]]
        candidates = {}
        feasible = True
        for g in non_units:
            cands = [k for k in range(tgt.n_arr)
                     if tgt.dom[k] == obj_map[src.dom[g]]
                     and tgt.cod[k] == obj_map[src.cod[g]]]
            if not cands:
                feasible = False
                break
            candidates[g] = cands
        if not feasible:
            continue
        order = sorted(non_units, key=lambda g: len(candidates[g]))

        def consistent(just: int) -> bool:
            for (a, b), ab in src.comp.items():
                if just not in (a, b, ab):
                    continue
                fa, fb, fab = arrow_map[a], arrow_map[b], arrow_map[ab]
                if fa < 0 or fb < 0 or fab < 0:
                    continue
                if not tgt.composable(fa, fb) or tgt.comp[(fa, fb)] != fab:
                    return False
            if arrow_map[src.inv[just]] >= 0 and \
                    arrow_map[src.inv[just]] != tgt.inv[arrow_map[just]]:
                return False
            return True

        def search(k: int):
            if k == len(order):
                out.append(GroupoidFunctor(src, tgt, obj_map, tuple(arrow_map)))
                return
            g = order[k]
            for cand in candidates[g]:
                arrow_map[g] = cand
                if consistent(g):
                    search(k + 1)
                arrow_map[g] = -1

        search(0)
    out.sort(key=lambda f: (f.obj_map, f.arrow_map))
    return out


def groupoid_isomorphism(a: FiniteGroupoid, b: FiniteGroupoid) -> GroupoidFunctor | None:
    if a.n_obj != b.n_obj or a.n_arr != b.n_arr:
        return None
    for fun in enumerate_functors(a, b):
        if len(set(fun.obj_map)) == a.n_obj and len(set(fun.arrow_map)) == a.n_arr:
            return fun
    return None


def promote_lax_to_functor(src: FiniteGroupoid, tgt: FiniteGroupoid,
                           obj_map: Sequence[int], arrow_map: Sequence[int]) -> GroupoidFunctor:
    """Promote a lax pair of maps to a strict functor.

    Hypotheses (each raises HypothesisViolated with a witness):
      1. arrow map commutes with inversion
      2. arrow map sends units to units along the object map
      3. d of the image is the image of d
      4. whenever gh is defined and the images compose, F(g)F(h) = F(gh)

    Under these the images of a composable pair always compose (r of an
    image is forced by 1+3) and equality holds, so the pair is a functor;
    this is re-verified exhaustively before returning.
    """
    f0, f1 = tuple(obj_map), tuple(arrow_map)
    lab = src.arrow_label
    for g in range(src.n_arr):
        if f1[src.inv[g]] != tgt.inv[f1[g]]:
            raise HypothesisViolated(f"inversion compatibility fails at {lab(g)!r}")
    for x in range(src.n_obj):
        if f1[src.unit[x]] != tgt.unit[f0[x]]:
            raise HypothesisViolated(f"unit compatibility fails at {src.objects[x]!r}")
    for g in range(src.n_arr):
        if tgt.dom[f1[g]] != f0[src.dom[g]]:
            raise HypothesisViolated(f"source compatibility fails at {lab(g)!r}")
    for (g, h), gh in src.comp.items():
        if tgt.composable(f1[g], f1[h]) and tgt.comp[(f1[g], f1[h])] != f1[gh]:
            raise HypothesisViolated(f"lax multiplicativity fails at ({lab(g)!r}, {lab(h)!r})")
    fun = GroupoidFunctor(src, tgt, f0, f1)
    rep = validate_functor(fun)
    assert rep.ok, f"promotion produced an invalid functor: {rep.summary()}"
    return fun


# -- covering functors -------------------------------------------------------

def _preimage_masks(fun: GroupoidFunctor) -> list[int]:
    pre = [0] * fun.target.n_arr
    for g in range(fun.source.n_arr):
        pre[fun.arr(g)] |= 1 << g
    return pre


def _set_product(gpd: FiniteGroupoid, amask: int, bmask: int) -> int:
    out = 0
    for g in _bits(amask):
        for h in _bits(bmask):
            if gpd.composable(g, h):
                out |= 1 << gpd.comp[(g, h)]
    return out


def is_covering_functor(fun: GroupoidFunctor) -> bool:
    return covering_certificate(fun).ok


def covering_certificate(fun: GroupoidFunctor) -> ValidationReport:
    """Arrow-preimage map as a unital multiplicative test, on atoms.

    The preimage map preserves unions, so checking the unit and all
    products of singletons decides whether it is a homomorphism of unital
    quantales between the arrow powersets.
    """
    rep = ValidationReport("covering functor")
    src, tgt = fun.source, fun.target
    pre = _preimage_masks(fun)
    pre_unit = 0
    for u in tgt.unit:
        pre_unit |= pre[u]
    rep.add("preimage of the unit is the unit", pre_unit == src.unit_mask(),
            None if pre_unit == src.unit_mask() else
            sorted(src.arrow_label(g) for g in _bits(pre_unit)))
    w = None
    for k in range(tgt.n_arr):
        for l in range(tgt.n_arr):
            want = pre[tgt.comp[(k, l)]] if tgt.composable(k, l) else 0
            if _set_product(src, pre[k], pre[l]) != want:
                w = (tgt.arrow_label(k), tgt.arrow_label(l))
                break
        if w:
            break
    rep.add("preimage is multiplicative on singletons", w is None, w)
    return rep


def star_bijective(fun: GroupoidFunctor) -> bool:
    """Conjectured equivalent of the covering property: bijective on stars."""
    src, tgt = fun.source, fun.target
    for x in range(src.n_obj):
        images = [fun.arr(g) for g in src.star(x)]
        if len(set(images)) != len(images):
            return False
        if sorted(images) != sorted(tgt.star(fun.obj(x))):
            return False
    return True
