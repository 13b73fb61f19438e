"""The thin twin building attached to a Coxeter system.

Both halves are copies of W itself; distance and codistance are word
arithmetic: delta(x, y) = codelta(x, y) = x^{-1} y.  Infinite W is handled
by a length cap: chambers are enumerated on the ball of radius ``cap``
around the identity and axiom checks certify the interior ball of radius
``cap - 1`` (every panel of an interior chamber lies inside the ball).
"""

from __future__ import annotations

from twinbuild.buildings import Chamber, TwinBuildingModel
from twinbuild.coxeter import CoxeterElement, CoxeterSystem


class ThinTwinBuilding(TwinBuildingModel):
    """Thin model: chambers are group elements tagged with a sign."""

    def __init__(self, system: CoxeterSystem, cap: int = 6):
        self.system = system
        self.cap = cap
        self._elements = tuple(system.elements_upto(cap))
        self._interior = tuple(w for w in self._elements if w.length <= cap - 1)
        super().__init__()

    # -- model protocol -----------------------------------------------------

    def chambers(self, sign: int):
        return tuple(Chamber(sign, w) for w in self._elements)

    def interior_chambers(self, sign: int):
        return tuple(Chamber(sign, w) for w in self._interior)

    def panel_complete(self, c: Chamber) -> bool:
        # panels of a boundary chamber may stick out of the enumerated ball
        return c.key.length <= self.cap - 1

    def dist(self, x: Chamber, y: Chamber) -> CoxeterElement:
        return self.delta(x.sign, x.key, y.key)

    def codist(self, x: Chamber, y: Chamber) -> CoxeterElement:
        return self.codelta(x.key, y.key)

    def describe(self) -> str:
        return f"thin({self.system.cartan}, cap={self.cap})"

    # -- word-level operations ------------------------------------------------

    def delta(self, sign: int, x: CoxeterElement, y: CoxeterElement) -> CoxeterElement:
        """Weyl distance x^{-1} y within one half."""
        return self.system.multiply(self.system.inverse(x), y)

    def codelta(self, x: CoxeterElement, y: CoxeterElement) -> CoxeterElement:
        """Codistance x^{-1} y across the two halves; x and y are opposite
        exactly when they carry the same word."""
        return self.system.multiply(self.system.inverse(x), y)
