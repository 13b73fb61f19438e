"""Divided-power adjoint operators on certified carriers.

A carrier is a finite-dimensional subspace of the truncated algebra
together with proof obligations discharged on demand: for each requested
generator the divided powers (ad x)^k / k! must act nilpotently and stay
inside the subspace.  Unipotent one-parameter operators are the finite
exponential sums; torus elements act diagonally through a character
lattice (simply connected or adjoint flavour).

The integral form is computed, not assumed: starting from the Chevalley
generators, the lattice in each graded piece is closed under all divided
powers until stable (Hermite normal forms keep the bases canonical), and
integrality of operator matrices in that basis is a checked property used
to realize root groups over prime fields on the full adjoint module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from twinbuild import primefield as pf
from twinbuild.buildings import CheckResult
from twinbuild.kacmoody import (
    GCM,
    BasisKey,
    Element,
    NotInvariant,
    NotRankTwoFinite,
    RootVec,
    TruncatedKMAlgebra,
    WindowExceeded,
    _add_into,
    _scaled,
    build_algebra,
    height,
    positive_real_roots,
    reflect,
)


def _key_order(key: BasisKey):
    kind = {"h": 0, "e": 1, "f": 2}[key[0]]
    if kind == 0:
        return (0, (0,), key[1], 0)
    return (kind, (height(key[1]),), key[1], key[2])


class Carrier:
    """Ordered-basis subspace of the algebra; divided powers are computed
    (and thereby certified) per generator on demand."""

    def __init__(self, algebra: TruncatedKMAlgebra, basis: Sequence[Element],
                 label: str = "carrier"):
        self.algebra = algebra
        self.label = label
        # echelon rows: (pivot key, normalized vector, expression over basis)
        self._rows: list[tuple[BasisKey, Element, dict[int, Fraction]]] = []
        self.basis: list[Element] = []
        for vec in basis:
            self._insert(vec)
        self._divided: dict[tuple, list] = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _eliminate(self, vec: Element, rep: dict[int, Fraction]):
        vec = dict(vec)
        rep = dict(rep)
        for pivot, rvec, rrep in self._rows:
            c = vec.get(pivot)
            if not c:
                continue
            _add_into(vec, rvec, -c)
            for k, x in rrep.items():
                nv = rep.get(k, Fraction(0)) - c * x
                if nv:
                    rep[k] = nv
                else:
                    rep.pop(k, None)
        return vec, rep

    def _insert(self, vec: Element) -> bool:
        idx = len(self.basis)
        residual, rep = self._eliminate(vec, {idx: Fraction(1)})
        if not residual:
            return False
        self.basis.append(dict(vec))
        pivot = min(residual, key=_key_order)
        lead = residual[pivot]
        self._rows.append(
            (
                pivot,
                {k: c / lead for k, c in residual.items()},
                {k: c / lead for k, c in rep.items()},
            )
        )
        return True

    def contains(self, vec: Element) -> bool:
        residual, _ = self._eliminate(vec, {})
        return not residual

    def to_coords(self, vec: Element) -> tuple[Fraction, ...]:
        residual, rep = self._eliminate(vec, {})
        if residual:
            raise NotInvariant(f"vector escapes the {self.label}")
        out = [Fraction(0)] * self.dim
        for k, c in rep.items():
            out[k] = -c
        return tuple(out)

    def from_coords(self, coords: Sequence) -> Element:
        out: Element = {}
        for c, b in zip(coords, self.basis):
            if c:
                _add_into(out, b, Fraction(c))
        return out

    # -- certified divided powers ---------------------------------------------

    def ad_matrix(self, x: Element) -> tuple[tuple[Fraction, ...], ...]:
        """Matrix of ad x on the carrier; raises NotInvariant when an image
        escapes the subspace or the height window."""
        cols = []
        for b in self.basis:
            try:
                image = self.algebra.bracket(x, b)
            except WindowExceeded as exc:
                raise NotInvariant(
                    f"ad leaves the height window on the {self.label}: {exc}"
                ) from exc
            cols.append(self.to_coords(image))
        n = self.dim
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    def divided_powers(self, x: Element, tag=None) -> list:
        """[I, ad x, (ad x)^2/2!, ...] down to (not including) zero."""
        if tag is not None and tag in self._divided:
            return self._divided[tag]
        m = self.ad_matrix(x)
        powers = [_mat_identity(self.dim), m]
        bound = 2 * self.algebra.window + 6
        k = 2
        while any(any(row) for row in powers[-1]):
            nxt = _mat_mul_frac(powers[-1], m)
            nxt = tuple(tuple(c / k for c in row) for row in nxt)
            powers.append(nxt)
            k += 1
            if k > bound:
                raise NotInvariant(
                    f"ad does not act nilpotently on the {self.label}"
                )
        powers.pop()
        if tag is not None:
            self._divided[tag] = powers
        return powers


def _mat_identity(n: int):
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def _mat_mul_frac(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def full_carrier(alg: TruncatedKMAlgebra) -> Carrier:
    """The whole truncated algebra as a carrier; operators certify only
    when the truncation is complete (finite type, window covering all
    roots)."""
    return Carrier(alg, [alg.unit(k) for k in alg.basis_keys()], "full algebra")


def invariant_subspace(alg: TruncatedKMAlgebra, v: Element,
                       generators: Sequence[int]) -> Carrier:
    """Closure of span{v} under the divided powers of ad e_i and ad f_i
    for the listed simple indices, computed to a fixed point.

    Raises WindowExceeded, with sizing advice, when the closure cannot be
    represented inside the algebra's height window.
    """
    label = f"divided-power closure over generators {sorted(set(generators))}"
    carrier = Carrier(alg, [v], label)
    queue = [v]
    while queue:
        x = queue.pop()
        for i in sorted(set(generators)):
            for gen in (alg.e(i), alg.f(i)):
                y = dict(x)
                k = 1
                while True:
                    try:
                        y = alg.bracket(gen, y)
                    except WindowExceeded as exc:
                        raise WindowExceeded(
                            f"{exc} (invariant subspace needs a larger window)"
                        ) from exc
                    if not y:
                        break
                    y = _scaled(y, Fraction(1, k))
                    if carrier._insert(y):
                        queue.append(y)
                    k += 1
    return carrier


class AdOperator:
    """Exact operator on a fixed carrier basis: rational entries, or
    integers mod p when a modulus is set.  Equality ignores provenance."""

    def __init__(self, matrix, modulus: Optional[int], provenance: str):
        self.matrix = tuple(tuple(row) for row in matrix)
        self.modulus = modulus
        self.provenance = provenance

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def compose(self, other: "AdOperator") -> "AdOperator":
        if self.modulus != other.modulus:
            raise ValueError("operators live over different scalars")
        n = self.dim
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                val = sum(self.matrix[i][k] * other.matrix[k][j] for k in range(n))
                row.append(val % self.modulus if self.modulus else val)
            rows.append(tuple(row))
        return AdOperator(rows, self.modulus,
                          f"({self.provenance})({other.provenance})")

    def inverse(self) -> "AdOperator":
        if self.modulus:
            inv = pf.mat_inv(self.matrix, self.modulus)
            return AdOperator(inv, self.modulus, f"({self.provenance})^-1")
        n = self.dim
        aug = [
            [Fraction(x) for x in self.matrix[i]]
            + [Fraction(1 if j == i else 0) for j in range(n)]
            for i in range(n)
        ]
        for col in range(n):
            piv = next(r for r in range(col, n) if aug[r][col])
            aug[col], aug[piv] = aug[piv], aug[col]
            lead = aug[col][col]
            aug[col] = [x / lead for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
        return AdOperator(
            [tuple(row[n:]) for row in aug], None, f"({self.provenance})^-1"
        )

    def apply(self, coords: Sequence) -> tuple:
        n = self.dim
        out = []
        for i in range(n):
            val = sum(self.matrix[i][k] * coords[k] for k in range(n))
            out.append(val % self.modulus if self.modulus else val)
        return tuple(out)

    def is_identity(self) -> bool:
        one = 1 if self.modulus else Fraction(1)
        return all(
            self.matrix[i][j] == (one if i == j else 0)
            for i in range(self.dim) for j in range(self.dim)
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AdOperator)
            and self.modulus == other.modulus
            and self.matrix == other.matrix
        )

    def __hash__(self):
        return hash((self.matrix, self.modulus))

    def __repr__(self):
        return f"AdOperator({self.provenance})"

    def as_dict(self) -> dict:
        entries = [
            [x if self.modulus else str(x) for x in row] for row in self.matrix
        ]
        return {
            "matrix": entries,
            "modulus": self.modulus,
            "provenance": self.provenance,
        }


def _exponential(powers, r, modulus: Optional[int], provenance: str) -> AdOperator:
    n = len(powers[0])
    if modulus is None:
        r = Fraction(r)
        rows = [[Fraction(0)] * n for _ in range(n)]
        rk = Fraction(1)
        for mat in powers:
            for a in range(n):
                for b in range(n):
                    if mat[a][b]:
                        rows[a][b] += rk * mat[a][b]
            rk *= r
        return AdOperator(rows, None, provenance)
    r = int(r) % modulus
    rows = [[0] * n for _ in range(n)]
    rk = 1
    for mat in powers:
        for a in range(n):
            for b in range(n):
                entry = mat[a][b]
                if entry.denominator != 1:
                    raise NotInvariant(
                        "divided powers are not integral on this carrier basis"
                    )
                rows[a][b] = (rows[a][b] + rk * entry.numerator) % modulus
        rk = (rk * r) % modulus
    return AdOperator(rows, modulus, provenance)


def ad_unipotent(alg: TruncatedKMAlgebra, i: int, sign: int, r,
                 carrier: Carrier, modulus: Optional[int] = None) -> AdOperator:
    """exp(ad e_i tensor r) (f_i for negative sign) on a certified carrier.

    Over a prime field the divided-power matrices are computed exactly
    over the rationals, checked integral in the carrier basis, and then
    reduced; fractional entries raise NotInvariant.
    """
    gen = alg.e(i) if sign > 0 else alg.f(i)
    powers = carrier.divided_powers(gen, tag=("gen", i, sign))
    name = f"exp(ad {'e' if sign > 0 else 'f'}_{i} * {r})"
    if modulus:
        name += f" mod {modulus}"
    return _exponential(powers, r, modulus, name)


# ---------------------------------------------------------------------------
# torus actions


@dataclass(frozen=True)
class TorusDatum:
    """Character lattice with marked c_i and h_i: the simply connected
    flavour bases the cocharacter side on the h_i, the adjoint flavour
    bases the character side on the c_i."""

    gcm: GCM
    flavour: str = "sc"

    def __post_init__(self):
        if self.flavour not in ("sc", "ad"):
            raise ValueError("flavour must be 'sc' or 'ad'")

    def root_image(self, degree: RootVec) -> tuple[int, ...]:
        """Image of a root-lattice vector in the character lattice: the
        j-th simple root maps to c_j."""
        n = self.gcm.rank
        if self.flavour == "ad":
            return tuple(degree)  # c_j is the j-th standard basis vector
        # simply connected: evaluating against the h_i basis gives the
        # Cartan column (a_1j, ..., a_nj)
        return tuple(
            sum(self.gcm.a[i][j] * degree[j] for j in range(n)) for i in range(n)
        )


def torus_ad(alg: TruncatedKMAlgebra, values: Sequence, carrier: Carrier,
             datum: Optional[TorusDatum] = None,
             modulus: Optional[int] = None) -> AdOperator:
    """Diagonal operator of the character taking the given unit values on
    the lattice basis: fixes the Cartan part, scales each weight vector by
    the character evaluated on the image of its weight."""
    datum = datum or TorusDatum(alg.gcm)

    def factor(key: BasisKey):
        if key[0] == "h":
            return 1 if modulus else Fraction(1)
        image = datum.root_image(key[1])
        exps = image if key[0] == "e" else tuple(-a for a in image)
        if modulus:
            out = 1
            for t, a in zip(values, exps):
                out = (out * pow(int(t) % modulus, a, modulus)) % modulus
            return out
        out = Fraction(1)
        for t, a in zip(values, exps):
            out *= Fraction(t) ** a
        return out

    cols = []
    for b in carrier.basis:
        scaled: Element = {}
        for key, c in b.items():
            _add_into(scaled, {key: c * factor(key)})
        cols.append(carrier.to_coords(scaled))
    n = carrier.dim
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            val = cols[j][i]
            if modulus:
                if val.denominator != 1:
                    raise NotInvariant("torus action is not integral here")
                val = val.numerator % modulus
            row.append(val)
        rows.append(tuple(row))
    name = f"torus{tuple(values)}[{datum.flavour}]"
    return AdOperator(rows, modulus, name)


# ---------------------------------------------------------------------------
# integral form


def _hnf_rows(rows: list[list[int]]) -> list[tuple[int, ...]]:
    """Row Hermite normal form (canonical lattice basis)."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    ncols = len(rows[0])
    r = 0
    for col in range(ncols):
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][col]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r], rows[i0] = rows[i0], rows[r]
            stable = True
            for i in range(r + 1, len(rows)):
                if rows[i][col]:
                    q = rows[i][col] // rows[r][col]
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                    if rows[i][col]:
                        stable = False
            if stable:
                break
        if [i for i in range(r, len(rows)) if rows[i][col]]:
            if rows[r][col] < 0:
                rows[r] = [-a for a in rows[r]]
            for i in range(r):
                q = rows[i][col] // rows[r][col]
                if q:
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
            r += 1
    return [tuple(row) for row in rows[:r] if any(row)]


def _lattice_canonical(vectors: list[tuple[Fraction, ...]]):
    """Canonical Fraction-row basis of the lattice the vectors generate."""
    if not vectors:
        return []
    import math

    den = 1
    for v in vectors:
        for c in v:
            den = den * c.denominator // math.gcd(den, c.denominator)
    rows = [[int(c * den) for c in v] for v in vectors]
    return [tuple(Fraction(x, den) for x in row) for row in _hnf_rows(rows)]


PieceKey = tuple  # ('h',) | ('e', degree) | ('f', degree)


class IntegralForm:
    """Lattice basis of the truncated algebra closed under all divided
    powers of the Chevalley generator adjoints."""

    def __init__(self, alg: TruncatedKMAlgebra, max_sweeps: int = 40):
        self.algebra = alg
        rank = alg.gcm.rank
        lattices: dict[PieceKey, list[tuple[Fraction, ...]]] = {}
        lattices[("h",)] = _lattice_canonical(
            [_unit_coords(rank, i) for i in range(rank)]
        )
        for degree, piece in alg.pieces.items():
            if piece.dim == 0:
                continue
            gens_e: list[tuple[Fraction, ...]] = []
            gens_f: list[tuple[Fraction, ...]] = []
            if height(degree) == 1:
                gens_e.append(_unit_coords(piece.dim, 0))
                gens_f.append(_unit_coords(piece.dim, 0))
            lattices[("e", degree)] = _lattice_canonical(gens_e)
            lattices[("f", degree)] = _lattice_canonical(gens_f)
        self._lattices = lattices
        for sweep in range(max_sweeps):
            if not self._sweep():
                break
        else:
            raise NotInvariant("integral form failed to stabilize")
        self.carrier = Carrier(alg, self._ordered_basis(), "integral form")

    def _piece_dim(self, key: PieceKey) -> int:
        if key == ("h",):
            return self.algebra.gcm.rank
        return self.algebra.pieces[key[1]].dim

    def _to_element(self, key: PieceKey, coords) -> Element:
        out: Element = {}
        if key == ("h",):
            for i, c in enumerate(coords):
                if c:
                    out[("h", i)] = Fraction(c)
            return out
        side, degree = key
        for k, c in enumerate(coords):
            if c:
                out[(side, degree, k)] = Fraction(c)
        return out

    def _project(self, x: Element) -> tuple[PieceKey, tuple[Fraction, ...]]:
        kinds = {k[0] for k in x}
        if kinds == {"h"}:
            key: PieceKey = ("h",)
            coords = [Fraction(0)] * self.algebra.gcm.rank
            for k, c in x.items():
                coords[k[1]] = c
            return key, tuple(coords)
        (side,) = kinds
        degrees = {k[1] for k in x}
        (degree,) = degrees
        key = (side, degree)
        coords = [Fraction(0)] * self._piece_dim(key)
        for k, c in x.items():
            coords[k[2]] = c
        return key, tuple(coords)

    def _sweep(self) -> bool:
        alg = self.algebra
        changed = False
        additions: dict[PieceKey, list[tuple[Fraction, ...]]] = {}
        for key, basis in self._lattices.items():
            for coords in basis:
                x = self._to_element(key, coords)
                for i in range(alg.gcm.rank):
                    for gen in (alg.e(i), alg.f(i)):
                        y = dict(x)
                        k = 1
                        while True:
                            try:
                                y = alg.bracket(gen, y)
                            except WindowExceeded:
                                y = {}
                            if not y:
                                break
                            y = _scaled(y, Fraction(1, k))
                            tkey, tcoords = self._project(y)
                            additions.setdefault(tkey, []).append(tcoords)
                            k += 1
        for key, extra in additions.items():
            old = self._lattices.get(key, [])
            new = _lattice_canonical(list(old) + extra)
            if new != old:
                self._lattices[key] = new
                changed = True
        return changed

    def _ordered_basis(self) -> list[Element]:
        out: list[Element] = []
        for coords in self._lattices[("h",)]:
            out.append(self._to_element(("h",), coords))
        for side in ("e", "f"):
            for degree in sorted(self.algebra.pieces):
                key = (side, degree)
                for coords in self._lattices.get(key, []):
                    out.append(self._to_element(key, coords))
        return out

    def lattice_basis(self, key: PieceKey) -> list[Element]:
        return [self._to_element(key, c) for c in self._lattices.get(key, [])]

    def root_vector(self, degree: RootVec, sign: int) -> Element:
        """Primitive lattice generator of a one-dimensional real root
        space."""
        key: PieceKey = ("e" if sign > 0 else "f", degree)
        basis = self._lattices.get(key, [])
        if len(basis) != 1:
            raise NotInvariant(f"root space {key} is not one-dimensional")
        return self._to_element(key, basis[0])

    def integral_coords(self, x: Element) -> Optional[tuple[int, ...]]:
        """Integer coordinates of a homogeneous element over its piece's
        lattice basis, or None if it is not a lattice point."""
        key, coords = self._project(x)
        basis = self._lattices.get(key, [])
        residual = list(coords)
        out = []
        for row in basis:
            lead = next(k for k, c in enumerate(row) if c)
            c = residual[lead] / row[lead]
            out.append(c)
            for k in range(len(residual)):
                residual[k] -= c * row[k]
        if any(residual) or any(c.denominator != 1 for c in out):
            return None
        return tuple(int(c) for c in out)

    def check_divided_power_integrality(self) -> CheckResult:
        """Every in-window value of a divided-power chain
        (ad e_i)^k/k! v over the lattice basis is again a lattice point
        (chains stop at the window boundary, or at zero for complete
        truncations)."""
        alg = self.algebra
        checked = 0
        for key, rows in sorted(self._lattices.items()):
            for coords in rows:
                v = self._to_element(key, coords)
                for i in range(alg.gcm.rank):
                    for sign in (1, -1):
                        gen = alg.e(i) if sign > 0 else alg.f(i)
                        y = dict(v)
                        k = 1
                        while True:
                            try:
                                y = alg.bracket(gen, y)
                            except WindowExceeded:
                                break
                            if not y:
                                break
                            y = _scaled(y, Fraction(1, k))
                            checked += 1
                            if self.integral_coords(y) is None:
                                return CheckResult(
                                    "divided-power-integrality", False,
                                    "integral lattice", checked,
                                    {"piece": str(key), "generator": i,
                                     "sign": sign, "power": k},
                                )
                            k += 1
        return CheckResult("divided-power-integrality", True,
                           "integral lattice", checked)


def _unit_coords(n: int, i: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1 if k == i else 0) for k in range(n))


def integral_form(alg: TruncatedKMAlgebra) -> IntegralForm:
    return IntegralForm(alg)


def exp_ad_apply(alg: TruncatedKMAlgebra, x: Element, v: Element) -> Element:
    """exp(ad x) applied to one element (x must act nilpotently)."""
    out = dict(v)
    term = dict(v)
    k = 1
    while True:
        term = _scaled(alg.bracket(x, term), Fraction(1, k))
        if not term:
            return out
        _add_into(out, term)
        k += 1
        if k > 4 * alg.window + 8:
            raise NotInvariant("exp argument does not act nilpotently")


def reflection_transport(alg: TruncatedKMAlgebra, i: int, v: Element) -> Element:
    """The Weyl reflection realized on the algebra:
    exp(ad e_i) exp(ad -f_i) exp(ad e_i)."""
    out = exp_ad_apply(alg, alg.e(i), v)
    out = exp_ad_apply(alg, _scaled(alg.f(i), Fraction(-1)), out)
    return exp_ad_apply(alg, alg.e(i), out)


# ---------------------------------------------------------------------------
# rank-2 adjoint RGD checks


def _signed_roots(g: GCM, table) -> list[RootVec]:
    out = []
    for v in table.vectors():
        out.append(v)
        out.append(tuple(-c for c in v))
    return out


def _positive_combination(va, vb, target) -> bool:
    """Whether target = a*va + b*vb with rational a, b > 0."""
    n = len(va)
    for k1 in range(n):
        for k2 in range(k1 + 1, n):
            det = va[k1] * vb[k2] - va[k2] * vb[k1]
            if det == 0:
                continue
            a = Fraction(target[k1] * vb[k2] - target[k2] * vb[k1], det)
            b = Fraction(va[k1] * target[k2] - va[k2] * target[k1], det)
            return (
                a > 0 and b > 0
                and all(a * va[k] + b * vb[k] == target[k] for k in range(n))
            )
    # va, vb proportional: target must be a positive multiple of va
    ratios = {Fraction(t, a) for t, a in zip(target, va) if a}
    return len(ratios) == 1 and next(iter(ratios)) > 0


class Rank2AdjointRealization:
    """All root groups of a finite rank-2 system as unipotent matrices over
    F_p acting on the full adjoint module in its integral basis."""

    def __init__(self, g: GCM, p: int):
        if g.rank != 2:
            raise NotRankTwoFinite("need a rank-2 Cartan matrix")
        product = g.a[0][1] * g.a[1][0]
        if product not in (1, 2, 3):
            raise NotRankTwoFinite(
                f"off-diagonal product {product} is not of finite type"
            )
        self.gcm = g
        self.field = pf.PrimeField(p)
        self.p = p
        table = positive_real_roots(g, 12)
        self.algebra = build_algebra(g, table.max_height())
        assert self.algebra.complete
        self.form = integral_form(self.algebra)
        self.carrier = self.form.carrier
        self.positive = table.vectors()
        self.roots = _signed_roots(g, table)
        self._powers: dict[RootVec, list] = {}

    def _root_element(self, root: RootVec) -> Element:
        sign = 1 if height(root) > 0 else -1
        degree = root if sign > 0 else tuple(-c for c in root)
        return self.form.root_vector(degree, sign)

    def op(self, root: RootVec, t: int) -> AdOperator:
        if root not in self._powers:
            x = self._root_element(root)
            self._powers[root] = self.carrier.divided_powers(x, ("root", root))
        return _exponential(
            self._powers[root], t, self.p, f"x_{root}({t % self.p})"
        )

    def root_group(self, root: RootVec) -> list:
        return [self.op(root, t).matrix for t in range(self.p)]

    def mu(self, s: int, t: int) -> AdOperator:
        neg = tuple(-c for c in _simple_vec(self.gcm.rank, s))
        a = self.op(neg, -self.field.inv(t))
        return a.compose(self.op(_simple_vec(self.gcm.rank, s), t)).compose(a)

    def reflect_vec(self, s: int, v: RootVec) -> RootVec:
        return reflect(self.gcm, s, v)

    def torus_ops(self) -> list[AdOperator]:
        units = range(1, self.p)
        return [
            torus_ad(self.algebra, (t1, t2), self.carrier, modulus=self.p)
            for t1 in units for t2 in units
        ]


def _simple_vec(rank: int, i: int) -> RootVec:
    return tuple(1 if k == i else 0 for k in range(rank))


def rank2_rgd_check(g: GCM, p: int) -> list[CheckResult]:
    """Adjoint rank-2 verification over F_p: commutation into open
    intervals for every prenilpotent pair, reflection conjugation through
    mu, separation of U_+ from the negative root groups, torus
    normalization, and injectivity mod centre on the rank-one subgroups."""
    real = Rank2AdjointRealization(g, p)
    results = [real.form.check_divided_power_integrality()]
    results.append(_r2_nontrivial(real))
    results.append(_r2_commutators(real))
    results.append(_r2_reflections(real))
    results.append(_r2_separation(real))
    results.append(_r2_torus(real))
    results.append(_r2_rank_one_injectivity(real))
    return results


def _r2_nontrivial(real) -> CheckResult:
    checked = 0
    for root in real.roots:
        checked += 1
        if real.op(root, 1).is_identity():
            return CheckResult("adjoint-root-groups-nontrivial", False,
                               "all roots", checked, {"root": list(root)})
    return CheckResult("adjoint-root-groups-nontrivial", True,
                       "all roots", checked)


def _r2_commutators(real) -> CheckResult:
    checked = 0
    p = real.p
    for alpha, beta in itertools.combinations(real.roots, 2):
        if all(a + b == 0 for a, b in zip(alpha, beta)):
            continue  # opposite pair is not prenilpotent
        interval = [
            gamma for gamma in real.roots
            if gamma not in (alpha, beta)
            and _positive_combination(alpha, beta, gamma)
        ]
        gens = [real.op(gamma, t).matrix for gamma in interval
                for t in range(1, p)]
        closure = pf.mulclose(gens or [real.op(alpha, 0).matrix], p)
        for r in range(1, p):
            for u in range(1, p):
                checked += 1
                xa, xb = real.op(alpha, r), real.op(beta, u)
                comm = xa.compose(xb).compose(xa.inverse()).compose(xb.inverse())
                if comm.matrix not in closure:
                    return CheckResult(
                        "adjoint-commutators", False, "prenilpotent pairs",
                        checked,
                        {"alpha": list(alpha), "beta": list(beta),
                         "r": r, "u": u},
                    )
    return CheckResult("adjoint-commutators", True, "prenilpotent pairs", checked)


def _r2_reflections(real) -> CheckResult:
    checked = 0
    for s in range(2):
        for t in range(1, real.p):
            m = real.mu(s, t)
            minv = m.inverse()
            for root in real.roots:
                checked += 1
                conj = {
                    m.compose(AdOperator(x, real.p, "x")).compose(minv).matrix
                    for x in real.root_group(root)
                }
                target = set(real.root_group(real.reflect_vec(s, root)))
                if conj != target:
                    return CheckResult(
                        "adjoint-reflection-conjugation", False, "all (s,u)",
                        checked, {"s": s, "t": t, "root": list(root)},
                    )
    return CheckResult("adjoint-reflection-conjugation", True, "all (s,u)", checked)


def _r2_separation(real) -> CheckResult:
    p = real.p
    gens = [real.op(v, t).matrix for v in real.positive for t in range(1, p)]
    u_plus = pf.mulclose(gens, p)
    expected = p ** len(real.positive)
    if len(u_plus) != expected:
        return CheckResult("adjoint-unipotent-order", False, "U_+", len(u_plus),
                           {"order": len(u_plus), "expected": expected})
    checked = len(u_plus)
    for s in range(2):
        neg = tuple(-c for c in _simple_vec(2, s))
        if real.op(neg, 1).matrix in u_plus:
            return CheckResult("adjoint-unipotent-order", False, "U_+",
                               checked, {"negative_root_inside": s})
    return CheckResult("adjoint-unipotent-order", True, "U_+", checked)


def _r2_torus(real) -> CheckResult:
    checked = 0
    for top in real.torus_ops():
        tinv = top.inverse()
        for root in real.roots:
            group = set(real.root_group(root))
            for t in range(1, real.p):
                checked += 1
                conj = top.compose(real.op(root, t)).compose(tinv)
                if conj.matrix not in group:
                    return CheckResult("adjoint-torus-normalizes", False,
                                       "all characters", checked,
                                       {"root": list(root)})
    return CheckResult("adjoint-torus-normalizes", True, "all characters", checked)


def _r2_rank_one_injectivity(real) -> CheckResult:
    """The rank-one subgroups inject modulo the centre: the matrix group
    generated by U_{alpha} and U_{-alpha} has the order of (P)SL_2(F_p)."""
    p = real.p
    sl2 = p * (p * p - 1)
    allowed = {sl2, sl2 // 2 if p > 2 else sl2}
    checked = 0
    for v in real.positive:
        neg = tuple(-c for c in v)
        gens = [real.op(v, t).matrix for t in range(1, p)]
        gens += [real.op(neg, t).matrix for t in range(1, p)]
        order = len(pf.mulclose(gens, p))
        checked += order
        if order not in allowed:
            return CheckResult(
                "adjoint-rank-one-injectivity", False, "all positive roots",
                checked, {"root": list(v), "order": order},
            )
    return CheckResult("adjoint-rank-one-injectivity", True,
                       "all positive roots", checked)
