"""Exact Coxeter systems realized by generalized Cartan matrices.

Every system here is crystallographic: bond labels are restricted to
{2, 3, 4, 6, infinity}, so the group acts on the root lattice with integer
coordinates and all length/descent questions reduce to exact sign tests on
root vectors.  Elements are kept in ShortLex normal form (lexicographically
least reduced word for the fixed generator order 0 < 1 < ... < rank-1).

Generator indices are 0-based throughout the Python API; the JSON layer in
:mod:`twinbuild.reporting` shifts to 1-based on the wire.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

# Bond label used for an infinite m_ij (the usual "0 means infinity"
# convention, which keeps the matrix integral).
INFINITE_BOND = 0

_GCM_PRODUCT_TO_BOND = {0: 2, 1: 3, 2: 4, 3: 6}

_EXCEPTIONAL_ORDERS = {
    (1, 2, 2): 51840,       # E6
    (1, 2, 3): 2903040,     # E7
    (1, 2, 4): 696729600,   # E8
}


class IndexOutOfRange(Exception):
    """A generator index outside ``range(rank)`` was supplied."""


def bond_from_gcm_entries(a_ij: int, a_ji: int) -> int:
    """Bond label m_ij from a pair of off-diagonal Cartan entries."""
    product = a_ij * a_ji
    return _GCM_PRODUCT_TO_BOND.get(product, INFINITE_BOND)


@dataclass(frozen=True)
class CoxeterMatrix:
    """Symmetric bond matrix with m_ii = 1 and off-diagonal labels in
    {2, 3, 4, 6, INFINITE_BOND}."""

    m: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.m)
        for row in self.m:
            if len(row) != n:
                raise ValueError("Coxeter matrix must be square")
        for i in range(n):
            if self.m[i][i] != 1:
                raise ValueError("diagonal of a Coxeter matrix is 1")
            for j in range(n):
                if self.m[i][j] != self.m[j][i]:
                    raise ValueError("Coxeter matrix must be symmetric")
                if i != j and self.m[i][j] not in (2, 3, 4, 6, INFINITE_BOND):
                    raise ValueError(
                        f"bond label {self.m[i][j]} outside the crystallographic set"
                    )

    @property
    def rank(self) -> int:
        return len(self.m)

    def bond(self, i: int, j: int) -> int:
        return self.m[i][j]


@dataclass(frozen=True)
class CoxeterElement:
    """Group element stored as its ShortLex-minimal reduced word."""

    word: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.word)

    def is_identity(self) -> bool:
        return not self.word

    def __repr__(self) -> str:  # 1-based to match the wire format
        if not self.word:
            return "e"
        return "s" + ".s".join(str(i + 1) for i in self.word)


IDENTITY = CoxeterElement(())


@dataclass(frozen=True)
class ParabolicInfo:
    """Finiteness data for a standard parabolic subgroup W_J."""

    finite: bool
    order: Optional[int] = None
    longest: Optional[CoxeterElement] = None


class CoxeterSystem:
    """Coxeter system attached to a generalized Cartan matrix.

    The Cartan matrix fixes the reflection representation on the root
    lattice; two Cartan matrices with the same bond matrix define the same
    group, and every group-level result here is independent of that choice.
    """

    def __init__(self, cartan: Sequence[Sequence[int]]):
        a = tuple(tuple(int(x) for x in row) for row in cartan)
        n = len(a)
        for row in a:
            if len(row) != n:
                raise ValueError("Cartan matrix must be square")
        for i in range(n):
            if a[i][i] != 2:
                raise ValueError("Cartan diagonal entries must equal 2")
            for j in range(n):
                if i != j:
                    if a[i][j] > 0:
                        raise ValueError("off-diagonal Cartan entries must be <= 0")
                    if (a[i][j] == 0) != (a[j][i] == 0):
                        raise ValueError("Cartan zero pattern must be symmetric")
        self.cartan = a
        self.rank = n
        self.matrix = CoxeterMatrix(
            tuple(
                tuple(
                    1 if i == j else bond_from_gcm_entries(a[i][j], a[j][i])
                    for j in range(n)
                )
                for i in range(n)
            )
        )
        self._simple_roots = tuple(
            tuple(1 if k == i else 0 for k in range(n)) for i in range(n)
        )

    # -- root lattice action ------------------------------------------------

    def simple_root(self, i: int) -> tuple[int, ...]:
        return self._simple_roots[i]

    def reflect(self, i: int, v: Sequence[int]) -> tuple[int, ...]:
        """Apply the simple reflection s_i to a root-lattice vector."""
        pairing = sum(self.cartan[i][j] * v[j] for j in range(self.rank))
        return tuple(
            v[k] - pairing if k == i else v[k] for k in range(self.rank)
        )

    def act(self, word: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        """Image of v under the product of the word's reflections
        (rightmost letter acts first)."""
        u = tuple(v)
        for t in reversed(word):
            u = self.reflect(t, u)
        return u

    @staticmethod
    def _is_positive(v: Sequence[int]) -> bool:
        return any(c > 0 for c in v)

    # -- reduced words and normal forms --------------------------------------

    def _check_index(self, s: int) -> None:
        if not 0 <= s < self.rank:
            raise IndexOutOfRange(f"generator index {s} not in range({self.rank})")

    def _append_right(self, word: tuple[int, ...], s: int) -> tuple[int, ...]:
        """Reduced word for w*s, given a reduced word for w."""
        u = self.simple_root(s)
        path = [u]
        for t in reversed(word):
            u = self.reflect(t, u)
            path.append(u)
        if self._is_positive(u):
            return word + (s,)
        # strong exchange: drop the letter where the tracked root turns negative
        for j in range(len(path) - 1):
            if self._is_positive(path[j]) and not self._is_positive(path[j + 1]):
                c = len(word) - j  # 1-based position of the letter to delete
                return word[:c - 1] + word[c:]
        raise AssertionError("sign change not found on a reduced word")

    def _reduce(self, word: Iterable[int]) -> tuple[int, ...]:
        out: tuple[int, ...] = ()
        for s in word:
            self._check_index(s)
            out = self._append_right(out, s)
        return out

    def _is_left_descent(self, word: tuple[int, ...], s: int) -> bool:
        # l(s*w) < l(w)  iff  w^{-1}(alpha_s) < 0; w^{-1} applies the
        # letters of the word front to back.
        u = self.simple_root(s)
        for t in word:
            u = self.reflect(t, u)
        return not self._is_positive(u)

    def _left_delete(self, word: tuple[int, ...], s: int) -> tuple[int, ...]:
        """Reduced word for s*w when s is a left descent of w."""
        u = self.simple_root(s)
        for c, t in enumerate(word):
            if u == self.simple_root(t):
                return word[:c] + word[c + 1:]
            u = self.reflect(t, u)
        raise AssertionError("left descent produced no deletion point")

    def _shortlex(self, reduced: tuple[int, ...]) -> tuple[int, ...]:
        out: list[int] = []
        cur = reduced
        while cur:
            for s in range(self.rank):
                if self._is_left_descent(cur, s):
                    out.append(s)
                    cur = self._left_delete(cur, s)
                    break
            else:
                raise AssertionError("nonempty word without left descent")
        return tuple(out)

    # -- public operations ----------------------------------------------------

    def identity(self) -> CoxeterElement:
        return IDENTITY

    def generator(self, s: int) -> CoxeterElement:
        self._check_index(s)
        return CoxeterElement((s,))

    def normal_form(self, word: Iterable[int]) -> CoxeterElement:
        """ShortLex-minimal reduced word of the element the word spells."""
        return CoxeterElement(self._shortlex(self._reduce(word)))

    def element(self, word: Iterable[int]) -> CoxeterElement:
        return self.normal_form(word)

    def multiply(self, x: CoxeterElement, y: CoxeterElement) -> CoxeterElement:
        return CoxeterElement(self._shortlex(self._reduce(x.word + y.word)))

    def inverse(self, x: CoxeterElement) -> CoxeterElement:
        return CoxeterElement(self._shortlex(self._reduce(tuple(reversed(x.word)))))

    def times_gen(self, x: CoxeterElement, s: int, side: str = "right") -> CoxeterElement:
        self._check_index(s)
        if side == "right":
            return CoxeterElement(self._shortlex(self._append_right(x.word, s)))
        return self.multiply(self.generator(s), x)

    def descents(self, w: CoxeterElement, side: str = "right") -> frozenset[int]:
        """Generators s with l(ws) < l(w) (right) or l(sw) < l(w) (left)."""
        if side == "right":
            return frozenset(
                s for s in range(self.rank)
                if not self._is_positive(self.act(w.word, self.simple_root(s)))
            )
        if side == "left":
            return frozenset(
                s for s in range(self.rank) if self._is_left_descent(w.word, s)
            )
        raise ValueError("side must be 'left' or 'right'")

    def bruhat_leq(self, v: CoxeterElement, w: CoxeterElement) -> bool:
        """Bruhat order test via the standard descent recursion."""
        vw, ww = v.word, w.word
        while True:
            if not vw:
                return True
            if len(vw) > len(ww):
                return False
            s = ww[-1]  # last letter of a reduced word is a right descent
            ww = self._shortlex(ww[:-1])
            if not self._is_positive(self.act(vw, self.simple_root(s))):
                vw = self._shortlex(self._append_right(vw, s))

    def enumerate_upto(
        self, cap: int, J: Optional[Iterable[int]] = None
    ) -> list[list[CoxeterElement]]:
        """All elements of W_J with length <= cap, grouped by length.

        Layer k lists the Poincare-series coefficient many elements of
        length k, each in normal form, sorted by word.
        """
        gens = sorted(set(range(self.rank) if J is None else J))
        for s in gens:
            self._check_index(s)
        if cap < 0:
            raise ValueError("cap must be >= 0")
        layers = [[IDENTITY]]
        for _ in range(cap):
            new = set()
            for w in layers[-1]:
                for s in gens:
                    nxt = self._append_right(w.word, s)
                    if len(nxt) > len(w.word):
                        new.add(CoxeterElement(self._shortlex(nxt)))
            if not new:
                break
            layers.append(sorted(new, key=lambda e: e.word))
        return layers

    def elements_upto(
        self, cap: int, J: Optional[Iterable[int]] = None
    ) -> list[CoxeterElement]:
        return [w for layer in self.enumerate_upto(cap, J) for w in layer]

    def reduced_words(self, w: CoxeterElement) -> frozenset[tuple[int, ...]]:
        """All reduced expressions of w."""
        memo: dict[tuple[int, ...], frozenset[tuple[int, ...]]] = {}

        def rec(word: tuple[int, ...]) -> frozenset[tuple[int, ...]]:
            if not word:
                return frozenset({()})
            if word in memo:
                return memo[word]
            acc = set()
            for s in range(self.rank):
                if not self._is_positive(self.act(word, self.simple_root(s))):
                    shorter = self._shortlex(self._append_right(word, s))
                    for r in rec(shorter):
                        acc.add(r + (s,))
            memo[word] = frozenset(acc)
            return memo[word]

        return rec(w.word)

    # -- parabolic analysis ---------------------------------------------------

    def parabolic_info(self, J: Optional[Iterable[int]] = None) -> ParabolicInfo:
        """Finiteness of W_J by finite-type diagram recognition, with the
        order and longest element when finite."""
        gens = sorted(set(range(self.rank) if J is None else J))
        for s in gens:
            self._check_index(s)
        if not gens:
            return ParabolicInfo(True, 1, IDENTITY)
        order = 1
        for comp in self._components(gens):
            comp_order = self._component_order(comp)
            if comp_order is None:
                return ParabolicInfo(False)
            order *= comp_order
        longest = self._longest_element(gens, order)
        return ParabolicInfo(True, order, longest)

    def _components(self, gens: list[int]) -> list[list[int]]:
        remaining = set(gens)
        comps = []
        while remaining:
            seed = min(remaining)
            comp = {seed}
            stack = [seed]
            while stack:
                i = stack.pop()
                for j in gens:
                    if j not in comp and self.matrix.bond(i, j) != 2:
                        comp.add(j)
                        stack.append(j)
            remaining -= comp
            comps.append(sorted(comp))
        return comps

    def _component_order(self, comp: list[int]) -> Optional[int]:
        import math

        n = len(comp)
        if n == 1:
            return 2
        edges = [
            (i, j)
            for k, i in enumerate(comp)
            for j in comp[k + 1:]
            if self.matrix.bond(i, j) != 2
        ]
        if len(edges) != n - 1:
            return None  # a cycle: affine or worse
        labels = [self.matrix.bond(i, j) for i, j in edges]
        if INFINITE_BOND in labels:
            return None
        heavy = [lab for lab in labels if lab > 3]
        deg = {i: 0 for i in comp}
        for i, j in edges:
            deg[i] += 1
            deg[j] += 1
        degseq = sorted(deg.values())
        is_path = degseq[-1] <= 2

        if len(heavy) >= 2:
            return None
        if heavy == [6]:
            return 12 if n == 2 else None
        if heavy == [4]:
            if not is_path:
                return None
            path = self._path_order(comp, edges)
            pos = next(
                k for k in range(n - 1)
                if self.matrix.bond(path[k], path[k + 1]) == 4
            )
            if pos in (0, n - 2):
                return (2 ** n) * math.factorial(n)  # B_n
            if n == 4 and pos == 1:
                return 1152  # F_4
            return None
        # simply laced
        if is_path:
            return math.factorial(n + 1)  # A_n
        branch = [i for i in comp if deg[i] == 3]
        if len(branch) != 1 or degseq[-1] > 3:
            return None
        arms = sorted(self._arm_lengths(branch[0], comp, edges))
        if len(arms) == 3 and arms[0] == 1 and arms[1] == 1:
            return (2 ** (n - 1)) * math.factorial(n)  # D_n
        return _EXCEPTIONAL_ORDERS.get(tuple(arms))

    @staticmethod
    def _path_order(comp: list[int], edges: list[tuple[int, int]]) -> list[int]:
        adj = {i: [] for i in comp}
        for i, j in edges:
            adj[i].append(j)
            adj[j].append(i)
        start = next(i for i in comp if len(adj[i]) == 1)
        path = [start]
        prev = None
        while len(path) < len(comp):
            nxt = next(j for j in adj[path[-1]] if j != prev)
            prev = path[-1]
            path.append(nxt)
        return path

    @staticmethod
    def _arm_lengths(center: int, comp: list[int], edges) -> list[int]:
        adj = {i: [] for i in comp}
        for i, j in edges:
            adj[i].append(j)
            adj[j].append(i)
        arms = []
        for first in adj[center]:
            length = 1
            prev, cur = center, first
            while True:
                nxt = [k for k in adj[cur] if k != prev]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                length += 1
            arms.append(length)
        return arms

    def _longest_element(self, gens: list[int], order: int) -> CoxeterElement:
        w: tuple[int, ...] = ()
        for _ in range(order):
            for s in gens:
                nxt = self._append_right(w, s)
                if len(nxt) > len(w):
                    w = nxt
                    break
            else:
                return CoxeterElement(self._shortlex(w))
        raise AssertionError("longest-element ascent did not terminate")

    # -- misc -----------------------------------------------------------------

    def is_reduced(self, word: Sequence[int]) -> bool:
        return len(self._reduce(tuple(word))) == len(tuple(word))

    def length(self, word: Iterable[int]) -> int:
        return len(self._reduce(tuple(word)))

    def all_bonds(self) -> Iterator[tuple[int, int, int]]:
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                yield i, j, self.matrix.bond(i, j)

    def __repr__(self) -> str:
        return f"CoxeterSystem(rank={self.rank}, cartan={self.cartan})"


# Convenience Cartan matrices for the systems used throughout the tests
# and the command line.

def cartan_a(n: int) -> tuple[tuple[int, ...], ...]:
    """Type A_n Cartan matrix (symmetric group S_{n+1})."""
    return tuple(
        tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n))
        for i in range(n)
    )


CARTAN_A2 = cartan_a(2)
CARTAN_B2 = ((2, -1), (-2, 2))
CARTAN_G2 = ((2, -1), (-3, 2))
CARTAN_AFFINE_A1 = ((2, -2), (-2, 2))
