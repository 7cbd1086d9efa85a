"""Deterministic instance grids for the verification harness.

The base grid holds every standard groupoid shape up to 8 arrows: the
groups of order at most 6, discrete and pair groupoids, a few action
groupoids, and disjoint unions of the smaller entries.  The derived
generators carve out the subsets the individual suites quantify over
(small quantales for hom enumeration, bounded partial-unit semigroups for
completions, bounded fibered products for tensors) and build the groupoid
actions used by the orbit and tensor suites.

Everything is a plain list of (name, value) pairs in a fixed order; no
randomness anywhere, so two runs see byte-identical instance streams.
"""

from __future__ import annotations

from .actions import GSet, fibered_pairs, left_translation_gset, right_translation_gset
from .groupoid import (
    FiniteGroupoid,
    action_groupoid,
    cyclic_group,
    discrete_groupoid,
    disjoint_union,
    group_groupoid,
    klein_group,
    pair_groupoid,
    symmetric_group_3,
)
from .invsemi import COMPLETION_BOUND
from .quantale import InvolutiveQuantale, partial_units, quantale_of_groupoid

GRID_MAX_ARROWS = 8


def _swap2():
    return {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}


def _trivial(n_group: int, n_pts: int):
    return {(g, x): x for g in range(n_group) for x in range(n_pts)}


def grid_groupoids() -> list[tuple[str, FiniteGroupoid]]:
    """The base grid: named groupoids with at most GRID_MAX_ARROWS arrows."""
    z2 = cyclic_group(2)
    out: list[tuple[str, FiniteGroupoid]] = []
    for n in range(1, 7):
        out.append((f"Z{n}", group_groupoid(cyclic_group(n))))
    out.append(("V4", group_groupoid(klein_group())))
    out.append(("S3", group_groupoid(symmetric_group_3())))
    for k in (1, 2, 3):
        out.append((f"disc{k}",
                    discrete_groupoid(tuple(f"p{i}" for i in range(k)))))
    out.append(("pair1", pair_groupoid(range(1))))
    out.append(("pair2", pair_groupoid(range(2))))
    out.append(("Z2_swap2", action_groupoid(z2, ("p", "q"), _swap2())))
    out.append(("Z2_triv2", action_groupoid(z2, ("p", "q"), _trivial(2, 2))))
    swap3 = {(0, 0): 0, (0, 1): 1, (0, 2): 2, (1, 0): 1, (1, 1): 0, (1, 2): 2}
    out.append(("Z2_swap3", action_groupoid(z2, ("p", "q", "r"), swap3)))
    out.append(("Z3_triv2",
                action_groupoid(cyclic_group(3), ("p", "q"), _trivial(3, 2))))
    # V4 = <a, b>; a swaps the two points, b fixes them
    v4_mixed = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0,
                (2, 0): 0, (2, 1): 1, (3, 0): 1, (3, 1): 0}
    out.append(("V4_mixed2", action_groupoid(klein_group(), ("p", "q"), v4_mixed)))

    named = dict(out)
    unions = [
        ("Z2+Z2", "Z2", "Z2"), ("Z2+disc1", "Z2", "disc1"),
        ("Z2+disc2", "Z2", "disc2"), ("Z3+Z3", "Z3", "Z3"),
        ("Z3+disc1", "Z3", "disc1"), ("pair2+Z2", "pair2", "Z2"),
        ("pair2+pair2", "pair2", "pair2"), ("pair2+disc2", "pair2", "disc2"),
        ("S3+disc1", "S3", "disc1"), ("Z4+V4", "Z4", "V4"),
        ("disc1+disc1", "disc1", "disc1"), ("disc2+disc2", "disc2", "disc2"),
        ("Z5+disc1", "Z5", "disc1"), ("V4+disc2", "V4", "disc2"),
    ]
    for name, a, b in unions:
        out.append((name, disjoint_union(named[a], named[b])))
    out.append(("Z2+Z2+Z2",
                disjoint_union(disjoint_union(named["Z2"], named["Z2"]), named["Z2"])))
    assert all(g.n_arr <= GRID_MAX_ARROWS for _, g in out)
    return out


def grid_quantales() -> list[tuple[str, InvolutiveQuantale]]:
    return [(name, quantale_of_groupoid(g)) for name, g in grid_groupoids()]


def completion_quantales() -> list[tuple[str, InvolutiveQuantale]]:
    """Grid quantales whose partial-unit semigroup fits the completion bound."""
    return [(name, q) for name, q in grid_quantales()
            if len(partial_units(q)) <= COMPLETION_BOUND]


def small_quantales(max_atoms: int = 4) -> list[tuple[str, InvolutiveQuantale]]:
    """Grid quantales with few enough atoms for all-pairs hom enumeration."""
    return [(name, q) for name, q in grid_quantales()
            if len(q.lattice.join_irreducibles()) <= max_atoms]


def equivalence_groupoids(max_arrows: int = 6) -> list[tuple[str, FiniteGroupoid]]:
    """Grid groupoids small enough for all-pairs morphism enumeration."""
    return [(name, g) for name, g in grid_groupoids() if g.n_arr <= max_arrows]


def grid_gsets() -> list[tuple[str, GSet]]:
    """Groupoid actions for the orbit and partial-unit suites."""
    named = dict(grid_groupoids())
    z2g = named["Z2"]
    z3g = named["Z3"]
    out: list[tuple[str, GSet]] = []
    for name in ("Z2", "Z3", "disc2", "pair2", "Z2_swap2", "Z2+disc2"):
        out.append((f"{name}.left", left_translation_gset(named[name])))
        out.append((f"{name}.right", right_translation_gset(named[name])))

    out.append(("Z2.swap_pts",
                GSet(z2g, ("x", "y"), (0, 0),
                     {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}, side="left")))
    out.append(("Z2.fixed_pts",
                GSet(z2g, ("x", "y"), (0, 0),
                     {(g, x): x for g in range(2) for x in range(2)}, side="left")))
    out.append(("Z2.swap_plus_fixed",
                GSet(z2g, ("x", "y", "z"), (0, 0, 0),
                     {(0, 0): 0, (0, 1): 1, (0, 2): 2,
                      (1, 0): 1, (1, 1): 0, (1, 2): 2}, side="left")))
    out.append(("Z3.cycle3",
                GSet(z3g, ("x", "y", "z"), (0, 0, 0),
                     {(g, x): (x + g) % 3 for g in range(3) for x in range(3)},
                     side="left")))
    out.append(("Z3.cycle3_right",
                GSet(z3g, ("x", "y", "z"), (0, 0, 0),
                     {(g, x): (x + g) % 3 for g in range(3) for x in range(3)},
                     side="right")))
    out.append(("pair2.points",
                GSet(named["pair2"], ("a", "b"), (0, 1),
                     {(0, 0): 0, (1, 0): 1, (2, 1): 0, (3, 1): 1}, side="right")))
    return out


def tensor_pairs(max_fibered: int = 12) -> list[tuple[str, GSet, GSet]]:
    """(right, left) action pairs over one groupoid, bounded fibered product."""
    out: list[tuple[str, GSet, GSet]] = []
    for name, g in grid_groupoids():
        xr = right_translation_gset(g)
        yl = left_translation_gset(g)
        if len(fibered_pairs(xr, yl)) <= max_fibered:
            out.append((f"{name}.translations", xr, yl))
    gsets = dict(grid_gsets())
    for rname, lname in (("Z3.cycle3_right", "Z3.cycle3"),
                         ("pair2.points", "pair2.left")):
        xr, yl = gsets[rname], gsets[lname]
        if len(fibered_pairs(xr, yl)) <= max_fibered:
            out.append((f"{rname}*{lname}", xr, yl))
    return out
