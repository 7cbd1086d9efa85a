"""Finite sup-lattices: complete lattices presented by tables.

Elements are indices into a canonical element list.  Two storage modes:

* powerset  -- the element with index ``i`` *is* the subset of the carrier
  whose bits are set in ``i``; order is submask testing and join/meet are
  bitwise or/and.  This is the representation every groupoid-derived
  structure lives in.
* explicit  -- an arbitrary finite order given by its full <= relation,
  stored as up-set/down-set bitmasks with lazily cached binary joins and
  meets.  Bounded by ``LATTICE_BOUND`` elements.

Every element of a finite complete lattice is the join of the
join-irreducibles below it, so maps are enumerated and stored on
join-irreducible generators throughout the package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import CarrierTooLarge, BudgetExceeded, SearchBudgetExceeded, UnknownElement
from .report import ValidationReport

CARRIER_BOUND = 16
LATTICE_BOUND = 256
SUP_HOM_BUDGET = 2_000_000


def _bits(mask: int):
    """Iterate set-bit positions of mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FiniteSupLattice:
    """A finite complete lattice; see module docstring for the two modes."""

    def __init__(self, labels: Sequence | None, up: list[int] | None,
                 carrier: tuple | None = None):
        self.carrier = carrier
        if carrier is not None:
            if len(carrier) > CARRIER_BOUND:
                raise CarrierTooLarge(
                    f"carrier has {len(carrier)} members, bound is {CARRIER_BOUND}")
            if len(set(carrier)) != len(carrier):
                raise UnknownElement("carrier members must be distinct")
            self.n = 1 << len(carrier)
            self._labels = None
            self._up = None
        else:
            assert labels is not None and up is not None
            if len(labels) > LATTICE_BOUND:
                raise BudgetExceeded(
                    f"lattice has {len(labels)} elements, bound is {LATTICE_BOUND}")
            self.n = len(labels)
            self._labels = tuple(labels)
            self._up = up
            self._down = [0] * self.n
            for i in range(self.n):
                for j in _bits(up[i]):
                    self._down[j] |= 1 << i
            self._join_cache: dict[tuple[int, int], int] = {}
            self._meet_cache: dict[tuple[int, int], int] = {}
        self._ji: tuple[int, ...] | None = None
        self._bottom: int | None = None
        self._top: int | None = None

    # -- construction -------------------------------------------------------

    @classmethod
    def powerset(cls, carrier: Iterable) -> "FiniteSupLattice":
        return cls(None, None, carrier=tuple(carrier))

    @classmethod
    def from_order(cls, labels: Sequence, leq: Callable[[int, int], bool]) -> "FiniteSupLattice":
        n = len(labels)
        if n > LATTICE_BOUND:
            raise BudgetExceeded(f"lattice has {n} elements, bound is {LATTICE_BOUND}")
        up = [0] * n
        for i in range(n):
            for j in range(n):
                if leq(i, j):
                    up[i] |= 1 << j
        return cls(labels, up)

    @classmethod
    def from_leq_pairs(cls, labels: Sequence, pairs: Iterable[tuple[int, int]]) -> "FiniteSupLattice":
        """Build from the full <= relation given as index pairs (i, j) with i <= j."""
        n = len(labels)
        if n > LATTICE_BOUND:
            raise BudgetExceeded(f"lattice has {n} elements, bound is {LATTICE_BOUND}")
        up = [0] * n
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise UnknownElement(f"leq pair ({i},{j}) out of range")
            up[i] |= 1 << j
        return cls(labels, up)

    @classmethod
    def chain(cls, k: int) -> "FiniteSupLattice":
        return cls.from_order(list(range(k)), lambda i, j: i <= j)

    # -- basic queries -------------------------------------------------------

    @property
    def is_powerset(self) -> bool:
        return self.carrier is not None

    def elements(self) -> range:
        return range(self.n)

    def label(self, i: int):
        if self.is_powerset:
            return tuple(self.carrier[b] for b in _bits(i))
        return self._labels[i]

    def index_of_label(self, label) -> int:
        if self.is_powerset:
            want = set(label)
            mask = 0
            pos = {c: b for b, c in enumerate(self.carrier)}
            for c in want:
                if c not in pos:
                    raise UnknownElement(f"{c!r} is not a carrier member")
                mask |= 1 << pos[c]
            return mask
        try:
            return self._labels.index(label)
        except ValueError:
            raise UnknownElement(f"{label!r} is not an element") from None

    def leq(self, i: int, j: int) -> bool:
        if self.is_powerset:
            return i | j == j
        return bool(self._up[i] >> j & 1)

    def up_mask(self, i: int) -> int:
        if self.is_powerset:
            raise NotImplementedError("up-set masks are not materialized for powersets")
        return self._up[i]

    def down_mask(self, i: int) -> int:
        if self.is_powerset:
            raise NotImplementedError("down-set masks are not materialized for powersets")
        return self._down[i]

    @property
    def bottom(self) -> int:
        if self.is_powerset:
            return 0
        if self._bottom is None:
            full = (1 << self.n) - 1
            for i in range(self.n):
                if self._up[i] == full:
                    self._bottom = i
                    break
            else:
                raise UnknownElement("order has no bottom element")
        return self._bottom

    @property
    def top(self) -> int:
        if self.is_powerset:
            return self.n - 1
        if self._top is None:
            full = (1 << self.n) - 1
            for i in range(self.n):
                if self._down[i] == full:
                    self._top = i
                    break
            else:
                raise UnknownElement("order has no top element")
        return self._top

    # -- joins and meets -----------------------------------------------------

    def join_pair(self, i: int, j: int) -> int:
        if self.is_powerset:
            return i | j
        if i == j:
            return i
        key = (i, j) if i < j else (j, i)
        got = self._join_cache.get(key)
        if got is None:
            got = self._least(self._up[i] & self._up[j])
            self._join_cache[key] = got
        return got

    def meet_pair(self, i: int, j: int) -> int:
        if self.is_powerset:
            return i & j
        if i == j:
            return i
        key = (i, j) if i < j else (j, i)
        got = self._meet_cache.get(key)
        if got is None:
            got = self._greatest(self._down[i] & self._down[j])
            self._meet_cache[key] = got
        return got

    def _least(self, candidates: int) -> int:
        for c in _bits(candidates):
            if self._up[c] & candidates == candidates:
                return c
        raise UnknownElement("pair has no least upper bound")

    def _greatest(self, candidates: int) -> int:
        for c in _bits(candidates):
            if self._down[c] & candidates == candidates:
                return c
        raise UnknownElement("pair has no greatest lower bound")

    def join(self, items: Iterable[int]) -> int:
        if self.is_powerset:
            out = 0
            for i in items:
                out |= i
            return out
        out = self.bottom
        for i in items:
            out = self.join_pair(out, i)
        return out

    def meet(self, items: Iterable[int]) -> int:
        if self.is_powerset:
            out = self.n - 1
            for i in items:
                out &= i
            return out
        out = self.top
        for i in items:
            out = self.meet_pair(out, i)
        return out

    # -- generators ----------------------------------------------------------

    def atoms(self) -> tuple[int, ...]:
        if self.is_powerset:
            return tuple(1 << b for b in range(len(self.carrier)))
        bot = self.bottom
        out = []
        for i in range(self.n):
            if i == bot:
                continue
            # an atom covers bottom: nothing strictly between
            if all(j == bot or j == i for j in _bits(self._down[i])):
                out.append(i)
        return tuple(out)

    def join_irreducibles(self) -> tuple[int, ...]:
        """Elements that are not the join of the elements strictly below them."""
        if self._ji is not None:
            return self._ji
        if self.is_powerset:
            self._ji = self.atoms()
            return self._ji
        bot = self.bottom
        out = []
        for i in range(self.n):
            if i == bot:
                continue
            below = [j for j in _bits(self._down[i]) if j != i]
            if self.join(below) != i:
                out.append(i)
        self._ji = tuple(out)
        return self._ji

    def ji_below(self, x: int) -> tuple[int, ...]:
        return tuple(j for j in self.join_irreducibles() if self.leq(j, x))

    def atoms_below(self, x: int) -> tuple[int, ...]:
        return tuple(a for a in self.atoms() if self.leq(a, x))

    # -- structure checks ----------------------------------------------------

    def validate(self) -> ValidationReport:
        rep = ValidationReport("sup-lattice")
        if self.is_powerset:
            rep.add("order is a powerset (structurally a complete lattice)", True)
            return rep
        full = (1 << self.n) - 1
        ok = all(self._up[i] >> i & 1 for i in range(self.n))
        rep.add("reflexive", ok,
                None if ok else self.label(next(i for i in range(self.n)
                                                if not self._up[i] >> i & 1)))
        anti = None
        for i in range(self.n):
            for j in _bits(self._up[i]):
                if i != j and self._up[j] >> i & 1:
                    anti = (self.label(i), self.label(j))
                    break
            if anti:
                break
        rep.add("antisymmetric", anti is None, anti)
        trans = None
        for i in range(self.n):
            for j in _bits(self._up[i]):
                if self._up[j] & ~self._up[i]:
                    k = next(_bits(self._up[j] & ~self._up[i]))
                    trans = (self.label(i), self.label(j), self.label(k))
                    break
            if trans:
                break
        rep.add("transitive", trans is None, trans)
        if not rep.ok:
            return rep
        witness = None
        for i in range(self.n):
            for j in range(i + 1, self.n):
                try:
                    self.join_pair(i, j)
                    self.meet_pair(i, j)
                except UnknownElement:
                    witness = (self.label(i), self.label(j))
                    break
            if witness:
                break
        rep.add("all pairs have a least upper and greatest lower bound",
                witness is None, witness)
        has_bounds = True
        try:
            self.bottom, self.top
        except UnknownElement:
            has_bounds = False
        rep.add("bottom and top exist", has_bounds)
        return rep

    def __eq__(self, other) -> bool:
        # identity of element lists, not isomorphism
        if not isinstance(other, FiniteSupLattice):
            return NotImplemented
        if self.is_powerset != other.is_powerset:
            return False
        if self.is_powerset:
            return self.carrier == other.carrier
        return self._labels == other._labels and self._up == other._up

    def __hash__(self):
        if self.is_powerset:
            return hash(("powerset", self.carrier))
        return hash(("explicit", self._labels, tuple(self._up)))

    def __repr__(self):
        if self.is_powerset:
            return f"FiniteSupLattice(powerset of {list(self.carrier)!r})"
        return f"FiniteSupLattice({self.n} elements)"


def make_powerset_lattice(carrier: Iterable) -> FiniteSupLattice:
    """Powerset of a finite carrier, subsets as bitmasks in carrier order."""
    return FiniteSupLattice.powerset(carrier)


def validate_frame(lat: FiniteSupLattice) -> ValidationReport:
    """Complete lattice + binary distributivity (enough, finitely, for a frame).

    For explicit orders distributivity is checked through join-primeness of
    the join-irreducibles, which for a finite lattice is equivalent and
    yields a genuine distributivity counterexample on failure.
    """
    rep = lat.validate()
    if not rep.ok:
        rep.add("binary distributivity", False, "order is not a lattice")
        return rep
    if lat.is_powerset:
        rep.add("binary distributivity (structural: bitmask meet/join)", True)
        return rep
    witness = None
    for j in lat.join_irreducibles():
        for y in range(lat.n):
            if witness:
                break
            for z in range(lat.n):
                if lat.leq(j, lat.join_pair(y, z)) and not lat.leq(j, y) and not lat.leq(j, z):
                    witness = (lat.label(j), lat.label(y), lat.label(z))
                    break
        if witness:
            break
    rep.add("binary distributivity", witness is None, witness)
    return rep


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class SupHom:
    """A map between lattices stored as the full image tuple."""

    source: FiniteSupLattice
    target: FiniteSupLattice
    images: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.images[i]

    def then(self, other: "SupHom") -> "SupHom":
        assert self.target == other.source
        return SupHom(self.source, other.target,
                      tuple(other.images[v] for v in self.images))

    def is_monotone(self) -> bool:
        src, tgt = self.source, self.target
        return all(tgt.leq(self.images[i], self.images[j])
                   for i in src.elements() for j in src.elements() if src.leq(i, j))


def sup_hom_from_ji(source: FiniteSupLattice, target: FiniteSupLattice,
                    ji_images: dict[int, int]) -> SupHom:
    """Extend an assignment on join-irreducibles by joins."""
    images = []
    for x in source.elements():
        images.append(target.join(ji_images[j] for j in source.ji_below(x)))
    return SupHom(source, target, tuple(images))


def validate_sup_hom(h: SupHom) -> ValidationReport:
    rep = ValidationReport("sup-hom")
    src, tgt = h.source, h.target
    rep.add("preserves bottom", h(src.bottom) == tgt.bottom,
            tgt.label(h(src.bottom)))
    witness = None
    # on a powerset source the atoms below x ∨ y split as those below x
    # plus those below y, so join preservation is equivalent to h being
    # the join-extension of its atom restriction; scan pairs only to
    # name a failing pair, or on sources where that reduction is invalid
    fast_ok = src.is_powerset and all(
        h(x) == tgt.join(h(j) for j in src.ji_below(x)) for x in src.elements())
    if not fast_ok:
        for x in src.elements():
            for y in src.elements():
                if h(src.join_pair(x, y)) != tgt.join_pair(h(x), h(y)):
                    witness = (src.label(x), src.label(y))
                    break
            if witness:
                break
    rep.add("preserves binary joins", witness is None, witness)
    return rep


def compute_left_adjoint(h: SupHom) -> SupHom | None:
    """Left adjoint of a monotone map, or None when no adjunction exists.

    g(x) = meet of { y : x <= h(y) }; the Galois property
    g(x) <= y  iff  x <= h(y) is then checked on all pairs.
    """
    if not h.is_monotone():
        raise ValueError("compute_left_adjoint needs a monotone map")
    src, tgt = h.source, h.target  # h : src -> tgt as given; g goes tgt -> src
    images = []
    for x in tgt.elements():
        images.append(src.meet(y for y in src.elements() if tgt.leq(x, h(y))))
    g = SupHom(tgt, src, tuple(images))
    for x in tgt.elements():
        for y in src.elements():
            if src.leq(g(x), y) != tgt.leq(x, h(y)):
                return None
    return g


def enumerate_sup_homs(source: FiniteSupLattice, target: FiniteSupLattice,
                       budget: int = SUP_HOM_BUDGET) -> list[SupHom]:
    """All join-preserving maps, via assignments on join-irreducibles.

    Each assignment is extended by joins and kept only when the extension
    preserves binary joins (which is not automatic for non-distributive
    sources).  Results are deterministically ordered by image tuple.
    """
    jis = source.join_irreducibles()
    count = target.n ** len(jis)
    if count > budget:
        raise SearchBudgetExceeded(
            f"{count} candidate assignments exceed budget {budget}")
    ji_below = {x: source.ji_below(x) for x in source.elements()}
    out = []
    for assign in itertools.product(target.elements(), repeat=len(jis)):
        at = dict(zip(jis, assign))
        images = tuple(target.join(at[j] for j in ji_below[x])
                       for x in source.elements())
        # keep one representative per map: the assignment that is the
        # restriction of its own extension (irreducibles below j inflate
        # the extension past t_j otherwise, duplicating homs on chains)
        if any(images[j] != at[j] for j in jis):
            continue
        h = SupHom(source, target, images)
        ok = True
        for x in source.elements():
            for y in source.elements():
                if images[source.join_pair(x, y)] != target.join_pair(images[x], images[y]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(h)
    out.sort(key=lambda h: h.images)
    return out


def lattice_isomorphism(a: FiniteSupLattice, b: FiniteSupLattice) -> SupHom | None:
    """Search for an order isomorphism, matching join-irreducibles first.

    Pruning uses the (|down-set|, |up-set|) profile of each irreducible,
    which is invariant under isomorphism.
    """
    if a.n != b.n:
        return None
    ja, jb = a.join_irreducibles(), b.join_irreducibles()
    if len(ja) != len(jb):
        return None

    def profile(lat, x):
        down = sum(1 for y in lat.elements() if lat.leq(y, x))
        up = sum(1 for y in lat.elements() if lat.leq(x, y))
        return (down, up)

    pa = {x: profile(a, x) for x in ja}
    pb = {x: profile(b, x) for x in jb}
    if sorted(pa.values()) != sorted(pb.values()):
        return None
    candidates = {x: [y for y in jb if pb[y] == pa[x]] for x in ja}
    order = sorted(ja, key=lambda x: len(candidates[x]))

    def extend(assign: dict[int, int]) -> SupHom | None:
        h = sup_hom_from_ji(a, b, assign)
        if len(set(h.images)) != a.n:
            return None
        for x in a.elements():
            for y in a.elements():
                if a.leq(x, y) != b.leq(h(x), h(y)):
                    return None
        return h

    def search(k: int, assign: dict[int, int], used: set[int]) -> SupHom | None:
        if k == len(order):
            return extend(assign)
        x = order[k]
        for y in candidates[x]:
            if y in used:
                continue
            ok = all(a.leq(x, x2) == b.leq(y, assign[x2]) and
                     a.leq(x2, x) == b.leq(assign[x2], y)
                     for x2 in assign)
            if not ok:
                continue
            assign[x] = y
            used.add(y)
            got = search(k + 1, assign, used)
            if got is not None:
                return got
            del assign[x]
            used.discard(y)
        return None

    return search(0, {}, set())
