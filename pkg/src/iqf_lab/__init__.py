"""Finite etale groupoids, inverse quantal frames, and maps between them.

The subpackages are layered bottom-up: suplattice (complete lattices and
sup-homs), groupoid (finite groupoids and functors), quantale (involutive
quantales, the powerset quantale of a groupoid, and the reverse
construction), invsemi (inverse semigroups and the compatible-ideal
completion), actions (groupoid actions and quantale modules), bimodules
(bisets, bimodules, and algebraic morphisms), serialize (JSON forms), and
cli (the iqf-lab command).  Import from the submodule that owns the name;
nothing is re-exported here.
"""

from __future__ import annotations

__version__ = "0.1.0"
