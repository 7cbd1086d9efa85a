"""Finite inverse semigroups and the compatible-ideal completion.

An inverse semigroup gives every element s a unique generalized inverse
s* with s·s*·s = s and s*·s·s* = s*; uniqueness of inverses is equivalent
to the idempotents commuting with one another.  The partial units of an
involutive quantale, the elements with ss* and s*s below the unit, always
form one, and its idempotents are exactly the elements below the unit.

The completion L(S) runs the other way.  Call a downward closed subset of
S an ideal when it contains every join that S already provides for one of
its compatible subsets (s and t are compatible when st* and s*t are both
idempotent).  Ordered by inclusion the ideals form an involutive quantale
with I·J generated by the pairwise products and the closure of the
idempotents as unit, and an inverse quantal frame is recovered up to
isomorphism from its partial units this way: I maps to the join of its
members, q maps back to the partial units below q.
"""

from __future__ import annotations

from typing import Sequence

from .errors import BudgetExceeded, InvalidSpec, NotClosed, UnknownElement
from .quantale import (
    InvolutiveQuantale,
    partial_units as partial_unit_elements,
    validate_quantale,
)
from .report import ValidationReport
from .suplattice import LATTICE_BOUND, FiniteSupLattice

COMPLETION_BOUND = 12


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FiniteInverseSemigroup:
    """A finite semigroup carrying an explicit generalized-inverse table."""

    def __init__(self, labels: Sequence, mult: Sequence[Sequence[int]],
                 inv: Sequence[int]):
        self.labels = tuple(labels)
        self.n = len(self.labels)
        if len(set(self.labels)) != self.n:
            raise InvalidSpec("element labels must be distinct")
        self.mult = tuple(tuple(row) for row in mult)
        self.inv = tuple(inv)
        if len(self.mult) != self.n or any(len(r) != self.n for r in self.mult):
            raise InvalidSpec("multiplication table shape does not match elements")
        if any(not 0 <= v < self.n for row in self.mult for v in row):
            raise UnknownElement("multiplication table entry out of range")
        if len(self.inv) != self.n:
            raise InvalidSpec("inverse table shape does not match elements")
        if any(not 0 <= v < self.n for v in self.inv):
            raise UnknownElement("inverse table entry out of range")

    def op(self, s: int, t: int) -> int:
        return self.mult[s][t]

    def is_idempotent(self, s: int) -> bool:
        return self.mult[s][s] == s

    def idempotents(self) -> tuple[int, ...]:
        return tuple(s for s in range(self.n) if self.mult[s][s] == s)

    def __repr__(self):
        return f"FiniteInverseSemigroup({self.n} elements)"


def validate_inverse_semigroup(s: FiniteInverseSemigroup) -> ValidationReport:
    """Associativity, the regularity equations, and commuting idempotents.

    Commuting idempotents stand in for uniqueness of inverses: given the
    regularity equations the two are equivalent, and a commuting failure
    is the cheaper witness to show.
    """
    rep = ValidationReport("inverse semigroup")
    lab = s.labels
    rng = range(s.n)

    w = next(((lab[a], lab[b], lab[c]) for a in rng for b in rng for c in rng
              if s.op(s.op(a, b), c) != s.op(a, s.op(b, c))), None)
    rep.add("associativity", w is None, w)

    w = next(((lab[x],) for x in rng
              if s.op(s.op(x, s.inv[x]), x) != x
              or s.op(s.op(s.inv[x], x), s.inv[x]) != s.inv[x]), None)
    rep.add("ss*s = s and s*ss* = s*", w is None, w)

    idem = s.idempotents()
    w = next(((lab[e], lab[f]) for e in idem for f in idem
              if s.op(e, f) != s.op(f, e)), None)
    rep.add("idempotents commute pairwise", w is None, w)
    return rep


def natural_order_and_compatibility(
        s: FiniteInverseSemigroup) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Return (below, compat) as bitmask rows over the elements.

    Bit t of below[u] says t ≤ u in the natural order, meaning t = u·t*·t.
    Bit t of compat[u] says u ~ t, meaning u·t* and u*·t are idempotent.
    """
    below = []
    compat = []
    for u in range(s.n):
        bmask = 0
        cmask = 0
        for t in range(s.n):
            if s.op(s.op(u, s.inv[t]), t) == t:
                bmask |= 1 << t
            if s.is_idempotent(s.op(u, s.inv[t])) \
                    and s.is_idempotent(s.op(s.inv[u], t)):
                cmask |= 1 << t
        below.append(bmask)
        compat.append(cmask)
    return tuple(below), tuple(compat)


def partial_units(q: InvolutiveQuantale) -> FiniteInverseSemigroup:
    """The inverse semigroup of elements of q with ss* ≤ e and s*s ≤ e.

    Elements keep their order in q and are labelled by q.element_label.
    NotClosed signals a defective q: in a valid involutive quantale,
    products and involutes of partial units are partial units again.
    """
    members = partial_unit_elements(q)
    pos = {m: k for k, m in enumerate(members)}
    labels = tuple(q.element_label(m) for m in members)
    mult = []
    for a in members:
        row = []
        for b in members:
            p = q.product(a, b)
            k = pos.get(p)
            if k is None:
                raise NotClosed(
                    f"product {q.element_label(a)}{q.element_label(b)} = "
                    f"{q.element_label(p)} is not a partial unit")
            row.append(k)
        mult.append(row)
    inv = []
    for a in members:
        k = pos.get(q.involution(a))
        if k is None:
            raise NotClosed(
                f"involute of {q.element_label(a)} is not a partial unit")
        inv.append(k)
    return FiniteInverseSemigroup(labels, mult, inv)


def compatible_ideal_completion(
        s: FiniteInverseSemigroup,
        bound: int = COMPLETION_BOUND,
) -> tuple[InvolutiveQuantale, tuple[int, ...]]:
    """Build L(S) and the embedding of S into it.

    Returns (L, embed) where embed[k] is the index in L of the closure of
    the principal downset of element k.  Ideals are found by enumerating
    the antichains of the natural order as downset generators and closing
    each downset.  The empty subset counts as compatible, so when S has a
    least element every ideal contains it and the closure of the empty
    downset is the bottom of L.

    A subset with a common upper bound is automatically compatible, which
    reduces closure to a single test per missing element j: j is forced
    into I exactly when the members of I below j have join j in S.
    """
    if s.n > bound:
        raise BudgetExceeded(f"{s.n} elements exceed the completion bound {bound}")
    below, _ = natural_order_and_compatibility(s)
    n = s.n
    full = (1 << n) - 1
    ge = tuple(sum(1 << u for u in range(n) if below[u] >> t & 1)
               for t in range(n))

    def joinof(mask: int) -> int | None:
        ubs = full
        for t in _bits(mask):
            ubs &= ge[t]
        for u in _bits(ubs):
            if ubs & ~ge[u] == 0:
                return u
        return None

    def close(mask: int) -> int:
        changed = True
        while changed:
            changed = False
            for j in range(n):
                if mask >> j & 1:
                    continue
                if joinof(below[j] & mask) == j:
                    mask |= below[j]
                    changed = True
        return mask

    cmp_mask = tuple(below[k] | ge[k] for k in range(n))
    found: set[int] = set()

    def grow(start: int, chosen: int, down: int) -> None:
        found.add(close(down))
        for k in range(start, n):
            if cmp_mask[k] & chosen:
                continue
            grow(k + 1, chosen | 1 << k, down | below[k])

    grow(0, 0, 0)
    ideals = sorted(found)
    if len(ideals) > LATTICE_BOUND:
        raise BudgetExceeded(
            f"{len(ideals)} ideals exceed the lattice bound {LATTICE_BOUND}")
    pos = {m: i for i, m in enumerate(ideals)}
    labels = [tuple(s.labels[k] for k in _bits(m)) for m in ideals]
    lat = FiniteSupLattice.from_order(
        labels, lambda i, j: ideals[i] | ideals[j] == ideals[j])

    def star_mask(mask: int) -> int:
        out = 0
        for k in _bits(mask):
            out |= 1 << s.inv[k]
        return out

    jis = lat.join_irreducibles()
    ji_mult = {}
    for a in jis:
        for b in jis:
            prod = 0
            for x in _bits(ideals[a]):
                row = s.mult[x]
                for y in _bits(ideals[b]):
                    prod |= below[row[y]]
            ji_mult[(a, b)] = pos[close(prod)]
    ji_invol = {a: pos[close(star_mask(ideals[a]))] for a in jis}
    unit = pos[close(sum(1 << e for e in s.idempotents()))]
    quantale = InvolutiveQuantale(lat, ji_mult, ji_invol, unit)
    embed = tuple(pos[close(below[k])] for k in range(n))
    return quantale, embed


def check_completion_iso(q: InvolutiveQuantale) -> ValidationReport:
    """Compare q with the completion of its own partial units.

    The comparison map sends an ideal to the join of its members; the
    report also covers the closure of the partial units under compatible
    joins taken in q.
    """
    rep = ValidationReport("completion round trip")
    s = partial_units(q)
    members = partial_unit_elements(q)
    lq, embed = compatible_ideal_completion(s)
    lat, llat = q.lattice, lq.lattice
    rep.merge(validate_quantale(lq), prefix="completion: ")
    if not rep.ok:
        return rep

    # membership of ideal i is recoverable from the embedding: k lies in i
    # exactly when embed[k] ≤ i
    member_sets = []
    phi = []
    for i in llat.elements():
        ks = [k for k in range(s.n) if llat.leq(embed[k], i)]
        member_sets.append(ks)
        phi.append(lat.join(members[k] for k in ks))

    bij = llat.n == lat.n and len(set(phi)) == llat.n
    rep.add("I ↦ ⋁I is a bijection", bij,
            None if bij else (llat.n, lat.n, len(set(phi))))
    if not bij:
        return rep

    w = next(((i, j) for i in llat.elements() for j in llat.elements()
              if llat.leq(i, j) != lat.leq(phi[i], phi[j])), None)
    rep.add("order is preserved and reflected", w is None, w)

    ok = phi[lq.unit] == q.unit
    rep.add("unit corresponds", ok,
            None if ok else (q.element_label(phi[lq.unit]),))

    w = next(((q.element_label(phi[i]),) for i in llat.elements()
              if phi[lq.involution(i)] != q.involution(phi[i])), None)
    rep.add("involution corresponds", w is None, w)

    w = next(((q.element_label(phi[i]), q.element_label(phi[j]))
              for i in llat.elements() for j in llat.elements()
              if phi[lq.product(i, j)] != q.product(phi[i], phi[j])), None)
    rep.add("multiplication corresponds", w is None, w)

    back = {v: i for i, v in enumerate(phi)}
    w = None
    for x in lat.elements():
        want = [k for k in range(s.n) if lat.leq(members[k], x)]
        if member_sets[back[x]] != want:
            w = (q.element_label(x),)
            break
    rep.add("q ↦ {s ∈ Q_I : s ≤ q} inverts it", w is None, w)

    _, compat = natural_order_and_compatibility(s)
    member_set = set(members)
    w = None
    for mask in range(1 << s.n):
        group = list(_bits(mask))
        if any(compat[a] >> b & 1 == 0 for a in group for b in group):
            continue
        if lat.join(members[k] for k in group) not in member_set:
            w = tuple(s.labels[k] for k in group)
            break
    rep.add("compatible subsets of Q_I join inside Q_I", w is None, w)
    return rep
