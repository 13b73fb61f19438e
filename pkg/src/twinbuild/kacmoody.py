"""Kac-Moody root data with exact arithmetic.

Generalized Cartan matrices, real-root tables with depth and a
Bruhat-compatible enumeration, and a height-truncated Kac-Moody Lie
algebra: the positive and negative parts are graded components of the free
Lie algebra modulo the degree-wise span of the Serre elements
(ad e_i)^{1-a_ij}(e_j), computed by exact linear algebra over the
rationals on left-normed bracket monomials embedded into the tensor
algebra.  Cross brackets come from the defining relations
[e_i, f_j] = delta_ij h_i by Jacobi recursion.

Operators (divided-power unipotents, torus actions) act on certified
carriers only; leaving the height window is an error, never a silent
truncation, because truncated exponentials would break the one-parameter
group law.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from twinbuild.buildings import CheckResult
from twinbuild.coxeter import CoxeterMatrix, CoxeterSystem, bond_from_gcm_entries


class InvalidGCM(Exception):
    """Not a generalized Cartan matrix."""


class WindowTooLarge(Exception):
    """The requested height window exceeds the configured resource cap."""


class NotInvariant(Exception):
    """The carrier is not certified closed for the requested operator."""


class WindowExceeded(Exception):
    """A computation escaped the height window; rebuild with a larger one."""


class NotRankTwoFinite(Exception):
    """Rank-2 adjoint checks need a finite-type rank-2 Cartan matrix."""


MAX_HEIGHT_WINDOW = 12
MAX_RANK = 4


@dataclass(frozen=True)
class GCM:
    """Generalized Cartan matrix: 2 on the diagonal, non-positive integers
    off it, with a symmetric zero pattern."""

    a: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.a)
        for row in self.a:
            if len(row) != n:
                raise InvalidGCM("matrix must be square")
        for i in range(n):
            if self.a[i][i] != 2:
                raise InvalidGCM("diagonal entries must equal 2")
            for j in range(n):
                if i != j:
                    if self.a[i][j] > 0:
                        raise InvalidGCM("off-diagonal entries must be <= 0")
                    if (self.a[i][j] == 0) != (self.a[j][i] == 0):
                        raise InvalidGCM("zero pattern must be symmetric")

    @property
    def rank(self) -> int:
        return len(self.a)

    def entry(self, i: int, j: int) -> int:
        return self.a[i][j]

    def coxeter_system(self) -> CoxeterSystem:
        return CoxeterSystem(self.a)


def gcm(rows: Iterable[Iterable[int]]) -> GCM:
    return GCM(tuple(tuple(int(x) for x in row) for row in rows))


def coxeter_matrix(g: GCM) -> CoxeterMatrix:
    """Bond matrix of the Weyl group: the product a_ij a_ji maps through
    0,1,2,3 -> 2,3,4,6 and anything >= 4 to the infinite bond."""
    n = g.rank
    return CoxeterMatrix(
        tuple(
            tuple(
                1 if i == j else bond_from_gcm_entries(g.a[i][j], g.a[j][i])
                for j in range(n)
            )
            for i in range(n)
        )
    )


# ---------------------------------------------------------------------------
# real roots


RootVec = tuple[int, ...]


def height(v: RootVec) -> int:
    return sum(v)


def pairing(g: GCM, i: int, v: RootVec) -> int:
    """Evaluation of the i-th simple coroot on a root-lattice vector."""
    return sum(g.a[i][j] * v[j] for j in range(g.rank))


def reflect(g: GCM, i: int, v: RootVec) -> RootVec:
    c = pairing(g, i, v)
    return tuple(v[k] - c if k == i else v[k] for k in range(g.rank))


@dataclass(frozen=True)
class RootEntry:
    vector: RootVec
    depth: int
    # word w (0-based generators) and simple index j with  vector = w(alpha_j)
    witness_word: tuple[int, ...]
    witness_simple: int

    def reflection_word(self) -> tuple[int, ...]:
        """Word of the reflection through this root: w s_j w^{-1}."""
        return self.witness_word + (self.witness_simple,) + tuple(
            reversed(self.witness_word)
        )


@dataclass
class RealRootTable:
    """Positive real roots of height <= the cap, with depths and witnesses;
    complete within the window (closure fixed point)."""

    gcm: GCM
    height_cap: int
    entries: dict[RootVec, RootEntry]

    def vectors(self) -> list[RootVec]:
        return sorted(self.entries)

    def max_height(self) -> int:
        return max(height(v) for v in self.entries)

    def __contains__(self, v: RootVec) -> bool:
        return v in self.entries


def positive_real_roots(g: GCM, height_cap: int) -> RealRootTable:
    """Orbit of the simple roots under the simple reflections, intersected
    with the positive vectors of height <= cap.

    Depth is the breadth-first distance to a simple root plus one; minimal
    reflection paths can be chosen height-monotone, so restricting the
    search to the window is exact.
    """
    if height_cap < 1:
        raise ValueError("height cap must be >= 1")
    entries: dict[RootVec, RootEntry] = {}
    frontier: list[RootVec] = []
    for i in range(g.rank):
        v = tuple(1 if k == i else 0 for k in range(g.rank))
        entries[v] = RootEntry(v, 1, (), i)
        frontier.append(v)
    while frontier:
        nxt = []
        for v in frontier:
            base = entries[v]
            for i in range(g.rank):
                w = reflect(g, i, v)
                if w in entries or any(c < 0 for c in w) or height(w) > height_cap:
                    continue
                entries[w] = RootEntry(
                    w, base.depth + 1, (i,) + base.witness_word,
                    base.witness_simple,
                )
                nxt.append(w)
        frontier = nxt
    return RealRootTable(g, height_cap, entries)


def root_enumeration(table: RealRootTable) -> list[RootVec]:
    """Total order on the positive real roots: depth-monotone (hence
    compatible with both the Bruhat order and the Bruhat length of the
    associated reflections, comparable reflections having distinct
    lengths), ties broken by height then coordinates."""
    return sorted(
        table.entries,
        key=lambda v: (table.entries[v].depth, height(v), v),
    )


def is_finite_type(g: GCM) -> bool:
    return g.coxeter_system().parabolic_info().finite


# ---------------------------------------------------------------------------
# free Lie algebra machinery (tensor-algebra embedding)

Word = tuple[int, ...]
Tensor = dict[Word, Fraction]


def _tensor_bracket(u: Tensor, v: Tensor) -> Tensor:
    out: dict[Word, Fraction] = {}
    for wu, cu in u.items():
        for wv, cv in v.items():
            c = cu * cv
            k = wu + wv
            out[k] = out.get(k, Fraction(0)) + c
            k = wv + wu
            out[k] = out.get(k, Fraction(0)) - c
    return {k: c for k, c in out.items() if c}


def _ad_generator(i: int, v: Tensor) -> Tensor:
    out: dict[Word, Fraction] = {}
    for w, c in v.items():
        k = (i,) + w
        out[k] = out.get(k, Fraction(0)) + c
        k = w + (i,)
        out[k] = out.get(k, Fraction(0)) - c
    return {k: c for k, c in out.items() if c}


def _monomial_expansion(seq: Word) -> Tensor:
    """Left-normed bracket [[...[x_{s0}, x_{s1}], ...], x_{sk}]."""
    cur: Tensor = {(seq[0],): Fraction(1)}
    for s in seq[1:]:
        cur = _tensor_bracket(cur, {(s,): Fraction(1)})
    return cur


def _content(seq: Word, rank: int) -> RootVec:
    return tuple(seq.count(i) for i in range(rank))


class GradedPiece:
    """One multidegree of the Serre quotient: a reduction apparatus mapping
    tensor-algebra vectors to coordinates over the accepted basis
    monomials."""

    def __init__(self, degree: RootVec, serre_rows: list[Tensor],
                 monomial_seqs: list[Word]):
        self.degree = degree
        # rows: (pivot word, tensor vector, expression over basis indices)
        self._rows: list[tuple[Word, Tensor, dict[int, Fraction]]] = []
        self.basis_seqs: list[Word] = []
        for vec in serre_rows:
            self._insert(vec, {})
        for seq in monomial_seqs:
            vec = _monomial_expansion(seq)
            idx = len(self.basis_seqs)
            added = self._insert(vec, {idx: Fraction(1)})
            if added:
                self.basis_seqs.append(seq)

    @property
    def dim(self) -> int:
        return len(self.basis_seqs)

    def _eliminate(self, vec: Tensor, rep: dict[int, Fraction]):
        vec = dict(vec)
        rep = dict(rep)
        for pivot, rvec, rrep in self._rows:
            c = vec.get(pivot)
            if not c:
                continue
            for w, x in rvec.items():
                nv = vec.get(w, Fraction(0)) - c * x
                if nv:
                    vec[w] = nv
                else:
                    vec.pop(w, None)
            for k, x in rrep.items():
                nv = rep.get(k, Fraction(0)) - c * x
                if nv:
                    rep[k] = nv
                else:
                    rep.pop(k, None)
        return vec, rep

    def _insert(self, vec: Tensor, rep: dict[int, Fraction]) -> bool:
        vec, rep = self._eliminate(vec, rep)
        if not vec:
            return False
        pivot = min(vec)
        lead = vec[pivot]
        vec = {w: c / lead for w, c in vec.items()}
        rep = {k: c / lead for k, c in rep.items()}
        self._rows.append((pivot, vec, rep))
        return True

    def reduce(self, vec: Tensor) -> dict[int, Fraction]:
        """Coordinates of a Lie element of this degree over the basis."""
        residual, rep = self._eliminate(vec, {})
        if residual:
            raise AssertionError(
                f"vector of degree {self.degree} escaped the spanning set"
            )
        return {k: -c for k, c in rep.items()}


def _serre_vectors(g: GCM, degree: RootVec) -> list[Tensor]:
    """Degree-wise spanning set of the Serre ideal: all generator-ad chains
    applied to the relators (ad x_i)^{1-a_ij}(x_j)."""
    rank = g.rank
    out = []
    for i in range(rank):
        for j in range(rank):
            if i == j:
                continue
            m = 1 - g.a[i][j]
            base = [0] * rank
            base[i] += m
            base[j] += 1
            rem = tuple(degree[k] - base[k] for k in range(rank))
            if any(c < 0 for c in rem):
                continue
            relator: Tensor = {(j,): Fraction(1)}
            for _ in range(m):
                relator = _ad_generator(i, relator)
            letters = [k for k in range(rank) for _ in range(rem[k])]
            for seq in set(itertools.permutations(letters)):
                vec = relator
                for s in reversed(seq):
                    vec = _ad_generator(s, vec)
                out.append(vec)
    return out


def _monomial_sequences(degree: RootVec) -> list[Word]:
    letters = [k for k in range(len(degree)) for _ in range(degree[k])]
    return sorted(set(itertools.permutations(letters)))


# ---------------------------------------------------------------------------
# the truncated algebra

BasisKey = tuple  # ('h', i) | ('e', degree, k) | ('f', degree, k)
Element = dict  # BasisKey -> Fraction


def _add_into(acc: Element, x: Element, scale: Fraction = Fraction(1)) -> None:
    for k, c in x.items():
        nv = acc.get(k, Fraction(0)) + scale * c
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)


def _scaled(x: Element, scale: Fraction) -> Element:
    if not scale:
        return {}
    return {k: c * scale for k, c in x.items()}


class TruncatedKMAlgebra:
    """Kac-Moody Lie algebra truncated to |height| <= window, with exact
    rational structure constants.

    For finite-type matrices with a window covering the whole root system
    the truncation is complete and every bracket is defined; otherwise
    brackets that would leave the window raise :class:`WindowExceeded`.
    """

    def __init__(self, g: GCM, window: int):
        if window < 1:
            raise ValueError("window must be >= 1")
        if window > MAX_HEIGHT_WINDOW or g.rank > MAX_RANK:
            raise WindowTooLarge(
                f"window {window} / rank {g.rank} beyond the configured cap"
            )
        self.gcm = g
        self.system = g.coxeter_system()
        self.finite_type = is_finite_type(g)
        self.roots = positive_real_roots(g, window)
        if self.finite_type:
            full = positive_real_roots(g, 30)
            self.complete = window >= full.max_height()
        else:
            self.complete = False
        self.window = window
        self.pieces: dict[RootVec, GradedPiece] = {}
        for ht in range(1, window + 1):
            for degree in _degrees_of_height(g.rank, ht):
                self.pieces[degree] = GradedPiece(
                    degree, _serre_vectors(g, degree), _monomial_sequences(degree)
                )
        self._expansions: dict[Word, Tensor] = {}
        self._mixed_memo: dict[tuple[Word, Word], Element] = {}

    # -- basis ------------------------------------------------------------------

    def basis_keys(self) -> list[BasisKey]:
        keys: list[BasisKey] = [("h", i) for i in range(self.gcm.rank)]
        for degree in sorted(self.pieces):
            piece = self.pieces[degree]
            keys.extend(("e", degree, k) for k in range(piece.dim))
        for degree in sorted(self.pieces):
            piece = self.pieces[degree]
            keys.extend(("f", degree, k) for k in range(piece.dim))
        return keys

    def unit(self, key: BasisKey) -> Element:
        return {key: Fraction(1)}

    def e(self, i: int) -> Element:
        return self.unit(("e", _simple(self.gcm.rank, i), 0))

    def f(self, i: int) -> Element:
        return self.unit(("f", _simple(self.gcm.rank, i), 0))

    def h(self, i: int) -> Element:
        return self.unit(("h", i))

    def dim_at(self, degree: RootVec) -> int:
        if degree in self.pieces:
            return self.pieces[degree].dim
        return 0

    def positive_dims(self) -> dict[int, int]:
        """Dimension of the positive part per height."""
        out: dict[int, int] = {}
        for degree, piece in self.pieces.items():
            out[height(degree)] = out.get(height(degree), 0) + piece.dim
        return out

    def total_dimension(self) -> int:
        if not self.complete:
            raise WindowExceeded("total dimension needs a complete window")
        npos = sum(p.dim for p in self.pieces.values())
        return 2 * npos + self.gcm.rank

    def weight_of(self, key: BasisKey) -> RootVec:
        if key[0] == "h":
            return tuple(0 for _ in range(self.gcm.rank))
        if key[0] == "e":
            return key[1]
        return tuple(-c for c in key[1])

    # -- brackets ---------------------------------------------------------------

    def bracket(self, x: Element, y: Element) -> Element:
        out: Element = {}
        for kx, cx in x.items():
            for ky, cy in y.items():
                _add_into(out, self._bracket_keys(kx, ky), cx * cy)
        return out

    def _bracket_keys(self, kx: BasisKey, ky: BasisKey) -> Element:
        tx, ty = kx[0], ky[0]
        if tx == "h" and ty == "h":
            return {}
        if tx == "h":
            sign = 1 if ty == "e" else -1
            c = sign * pairing(self.gcm, kx[1], ky[1])
            return _scaled(self.unit(ky), Fraction(c))
        if ty == "h":
            return _scaled(self._bracket_keys(ky, kx), Fraction(-1))
        if tx == ty:  # both 'e' or both 'f': same structure constants
            return self._same_side(kx, ky)
        if tx == "e":
            return self._mixed(
                self.pieces[kx[1]].basis_seqs[kx[2]],
                self.pieces[ky[1]].basis_seqs[ky[2]],
            )
        # ('f', 'e'): antisymmetry
        flipped = self._mixed(
            self.pieces[ky[1]].basis_seqs[ky[2]],
            self.pieces[kx[1]].basis_seqs[kx[2]],
        )
        return _scaled(flipped, Fraction(-1))

    def _same_side(self, kx: BasisKey, ky: BasisKey) -> Element:
        side = kx[0]
        target = tuple(a + b for a, b in zip(kx[1], ky[1]))
        piece = self._piece_for(target)
        if piece is None:
            return {}
        u = self._expansion(self.pieces[kx[1]].basis_seqs[kx[2]])
        v = self._expansion(self.pieces[ky[1]].basis_seqs[ky[2]])
        coords = piece.reduce(_tensor_bracket(u, v))
        return {(side, target, k): c for k, c in coords.items() if c}

    def _piece_for(self, degree: RootVec) -> Optional[GradedPiece]:
        """Graded piece for a positive degree, None when it is known to be
        zero; raises when the window cannot decide."""
        if degree in self.pieces:
            return self.pieces[degree]
        if self.complete:
            return None
        raise WindowExceeded(
            f"bracket of height {height(degree)} leaves the window "
            f"{self.window}; rebuild the algebra with a larger window"
        )

    def _expansion(self, seq: Word) -> Tensor:
        if seq not in self._expansions:
            self._expansions[seq] = _monomial_expansion(seq)
        return self._expansions[seq]

    def _express_prefix(self, seq: Word) -> Element:
        """A left-normed e-monomial prefix as a combination of basis keys."""
        degree = _content(seq, self.gcm.rank)
        piece = self._piece_for(degree)
        if piece is None:
            return {}
        coords = piece.reduce(self._expansion(seq))
        return {("e", degree, k): c for k, c in coords.items() if c}

    def _express_prefix_f(self, seq: Word) -> Element:
        degree = _content(seq, self.gcm.rank)
        piece = self._piece_for(degree)
        if piece is None:
            return {}
        coords = piece.reduce(self._expansion(seq))
        return {("f", degree, k): c for k, c in coords.items() if c}

    def _mixed(self, seq_e: Word, seq_f: Word) -> Element:
        """[e-monomial, f-monomial] by Jacobi recursion down to the
        defining relation [e_i, f_j] = delta_ij h_i."""
        key = (seq_e, seq_f)
        if key in self._mixed_memo:
            return self._mixed_memo[key]
        if len(seq_e) == 1 and len(seq_f) == 1:
            i, j = seq_e[0], seq_f[0]
            out = dict(self.h(i)) if i == j else {}
        elif len(seq_e) == 1:
            # [e_i, [m', f_b]] = [[e_i, m'], f_b] + [m', [e_i, f_b]]
            i = seq_e[0]
            mprime, b = seq_f[:-1], seq_f[-1]
            inner = self._mixed((i,), mprime)  # [e_i, m'] with m' read in f's
            term1 = self.bracket(inner, self.f(b))
            term2: Element = {}
            if i == b:
                # [m', h_i] = + <deg m', alpha_i^vee> m'
                mp = self._express_prefix_f(mprime)
                c = pairing(self.gcm, i, _content(mprime, self.gcm.rank))
                term2 = _scaled(mp, Fraction(c))
            out = dict(term1)
            _add_into(out, term2)
        else:
            # [[m', e_a], mF] = [m', [e_a, mF]] - [e_a, [m', mF]]
            mprime, a = seq_e[:-1], seq_e[-1]
            inner = self._mixed((a,), seq_f)
            mp = self._express_prefix(mprime)
            term1 = self.bracket(mp, inner)
            inner2 = self._mixed(mprime, seq_f)
            term2 = self.bracket(self.e(a), inner2)
            out = dict(term1)
            _add_into(out, _scaled(term2, Fraction(-1)))
        self._mixed_memo[key] = out
        return out

    # -- involution and checks ------------------------------------------------

    def chevalley_involution(self, x: Element) -> Element:
        """e_i -> -f_i, f_i -> -e_i, h -> -h extended as an automorphism:
        a monomial of height m flips side with sign (-1)^m."""
        out: Element = {}
        for key, c in x.items():
            if key[0] == "h":
                _add_into(out, {key: -c})
            else:
                side = "f" if key[0] == "e" else "e"
                sign = Fraction(-1) ** height(key[1])
                _add_into(out, {(side, key[1], key[2]): sign * c})
        return out

    def check_jacobi(self, limit: Optional[int] = None, seed: int = 0) -> CheckResult:
        """Jacobi identity on basis triples: exhaustive when the count is
        within the limit, otherwise a seeded sample of that size."""
        keys = self.basis_keys()
        triples = list(itertools.combinations(keys, 3))
        scope = "exhaustive"
        if limit is not None and len(triples) > limit:
            import random

            rng = random.Random(seed)
            triples = rng.sample(triples, limit)
            scope = f"sampled {limit} (seed {seed})"
        checked = 0
        for ka, kb, kc in triples:
            a, b, c = self.unit(ka), self.unit(kb), self.unit(kc)
            try:
                total: Element = {}
                _add_into(total, self.bracket(a, self.bracket(b, c)))
                _add_into(total, self.bracket(b, self.bracket(c, a)))
                _add_into(total, self.bracket(c, self.bracket(a, b)))
            except WindowExceeded:
                continue
            checked += 1
            if total:
                return CheckResult(
                    "jacobi", False, scope, checked,
                    {"triple": [str(ka), str(kb), str(kc)]},
                )
        return CheckResult("jacobi", True, scope, checked)

    def check_involution(self) -> CheckResult:
        """The flip is an automorphism on every computable basis pair."""
        keys = self.basis_keys()
        checked = 0
        for ka in keys:
            for kb in keys:
                try:
                    lhs = self.chevalley_involution(
                        self.bracket(self.unit(ka), self.unit(kb))
                    )
                    rhs = self.bracket(
                        self.chevalley_involution(self.unit(ka)),
                        self.chevalley_involution(self.unit(kb)),
                    )
                except WindowExceeded:
                    continue
                checked += 1
                diff = dict(lhs)
                _add_into(diff, rhs, Fraction(-1))
                if diff:
                    return CheckResult("chevalley-involution", False,
                                       "basis pairs", checked,
                                       {"pair": [str(ka), str(kb)]})
        return CheckResult("chevalley-involution", True, "basis pairs", checked)

    def as_dict(self) -> dict:
        """JSON-friendly dump: graded dimensions and structure constants."""
        dims = {"+".join(map(str, d)): p.dim for d, p in sorted(self.pieces.items())}
        constants = []
        keys = self.basis_keys()
        for ka in keys:
            for kb in keys:
                try:
                    out = self.bracket(self.unit(ka), self.unit(kb))
                except WindowExceeded:
                    continue
                for kc, c in sorted(out.items(), key=lambda t: str(t[0])):
                    constants.append([str(ka), str(kb), str(kc), str(c)])
        return {
            "cartan": [list(r) for r in self.gcm.a],
            "window": self.window,
            "complete": self.complete,
            "positive_dims": dims,
            "brackets": constants,
        }


def _simple(rank: int, i: int) -> RootVec:
    return tuple(1 if k == i else 0 for k in range(rank))


def _degrees_of_height(rank: int, ht: int) -> list[RootVec]:
    out = []
    for combo in itertools.combinations_with_replacement(range(rank), ht):
        vec = [0] * rank
        for c in combo:
            vec[c] += 1
        out.append(tuple(vec))
    return sorted(set(out))


def build_algebra(g: GCM, window: int) -> TruncatedKMAlgebra:
    return TruncatedKMAlgebra(g, window)
