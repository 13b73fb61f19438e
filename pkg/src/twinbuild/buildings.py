"""Twin buildings over finite (or length-capped) chamber sets.

A model exposes two chamber enumerations, a Weyl-valued distance on each
half and a codistance across halves; everything else here (axiom checking,
projections, co-projections, twin apartments, retractions, Schubert
censuses, gallery spaces, punctured-panel multiplication, Birkhoff-style
stratification) is computed generically from that capability and verified
exhaustively rather than assumed.

Verification checks return :class:`CheckResult`; structural errors in the
supplied model (non-unique projections, bases that are not opposite, ...)
raise the dedicated exceptions below.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from twinbuild.coxeter import CoxeterElement, CoxeterSystem


class NotABuilding(Exception):
    """The model violates a uniqueness property every building satisfies."""


class NotSpherical(Exception):
    """Co-projection requested onto a residue of non-spherical type."""


class NotOpposite(Exception):
    """A chamber pair required to be opposite is not."""


class NotInApartment(Exception):
    """The retraction centre does not lie in the given twin apartment."""


class RegionTooSmall(Exception):
    """The enumerated region has no certified interior."""


class BadGeometry(Exception):
    """Preconditions of the punctured-panel multiplication fail."""


@dataclass(frozen=True)
class Chamber:
    """Chamber of one half of a twin building: a sign and a model-specific
    hashable key."""

    sign: int
    key: object

    def __repr__(self) -> str:
        tag = "+" if self.sign > 0 else "-"
        return f"<{tag}|{self.key}>"


@dataclass(frozen=True)
class Residue:
    """J-residue R_J(c): all chambers at distance inside W_J from the
    representative."""

    sign: int
    types: frozenset[int]
    chambers: tuple[Chamber, ...]
    rep: Chamber


@dataclass(frozen=True)
class TwinApartment:
    """Verified twin apartment spanned by an opposite chamber pair."""

    c: Chamber
    d: Chamber
    plus: tuple[Chamber, ...]
    minus: tuple[Chamber, ...]

    def half(self, sign: int) -> tuple[Chamber, ...]:
        return self.plus if sign > 0 else self.minus

    def __contains__(self, x: Chamber) -> bool:
        return x in self.half(x.sign)


@dataclass
class CheckResult:
    """Outcome of one exhaustive verification pass."""

    name: str
    passed: bool
    certified: str
    checked: int
    witness: Optional[dict] = None
    skipped: bool = False

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": "skipped" if self.skipped else ("pass" if self.passed else "fail"),
            "certified": self.certified,
            "checked": self.checked,
            "witness": self.witness,
        }


def wire_word(w: CoxeterElement) -> list[int]:
    """Witness serialization of an element: 1-based generator indices."""
    return [s + 1 for s in w.word]


class TwinBuildingModel:
    """Base capability; subclasses provide chambers()/dist()/codist() and a
    Coxeter system, and may override interior_chambers for capped models."""

    system: CoxeterSystem

    def __init__(self):
        self._panel_cache: dict[tuple[int, int, Chamber], tuple[Chamber, ...]] = {}

    # -- protocol to implement ------------------------------------------------

    def chambers(self, sign: int) -> Sequence[Chamber]:
        raise NotImplementedError

    def dist(self, x: Chamber, y: Chamber) -> CoxeterElement:
        raise NotImplementedError

    def codist(self, x: Chamber, y: Chamber) -> CoxeterElement:
        raise NotImplementedError

    def describe(self) -> str:
        return type(self).__name__

    # -- optional overrides ---------------------------------------------------

    def interior_chambers(self, sign: int) -> Sequence[Chamber]:
        """Chambers whose panels are entirely inside the enumerated region."""
        return self.chambers(sign)

    def chamber_label(self, c: Chamber) -> str:
        tag = "+" if c.sign > 0 else "-"
        return f"{tag}:{c.key}"

    # -- generic machinery ----------------------------------------------------

    def wdist(self, x: Chamber, y: Chamber) -> CoxeterElement:
        return self.dist(x, y) if x.sign == y.sign else self.codist(x, y)

    def panel(self, c: Chamber, s: int) -> tuple[Chamber, ...]:
        """s-panel of c within the enumerated region."""
        key = (c.sign, s, c)
        if key not in self._panel_cache:
            members = tuple(
                d for d in self.chambers(c.sign)
                if self.dist(c, d).word in ((), (s,))
            )
            for d in members:
                self._panel_cache[(c.sign, s, d)] = members
        return self._panel_cache[key]

    def panel_complete(self, c: Chamber) -> bool:
        """Whether panels around c are fully enumerated (capped models may
        truncate panels at the boundary)."""
        return True

    def residue(self, c: Chamber, J: Iterable[int]) -> Residue:
        types = frozenset(J)
        members = tuple(
            d for d in self.chambers(c.sign)
            if set(self.dist(c, d).word) <= types
        )
        return Residue(c.sign, types, members, c)

    def is_thick(self) -> bool:
        return all(
            len(self.panel(c, s)) >= 3
            for sign in (1, -1)
            for c in self.interior_chambers(sign)
            for s in range(self.system.rank)
        )

    def is_thin(self) -> bool:
        return all(
            len(self.panel(c, s)) == 2
            for sign in (1, -1)
            for c in self.interior_chambers(sign)
            for s in range(self.system.rank)
        )

    def opposites(self, c: Chamber) -> tuple[Chamber, ...]:
        return tuple(
            d for d in self.chambers(-c.sign) if self.codist(c, d).is_identity()
        )


# ---------------------------------------------------------------------------
# projections


def proj(model: TwinBuildingModel, residue: Residue, c: Chamber) -> Chamber:
    """Gate of the residue: the unique member at minimal distance from c."""
    if c.sign != residue.sign:
        raise ValueError("projection needs c in the residue's half")
    best = min(model.dist(c, d).length for d in residue.chambers)
    winners = [d for d in residue.chambers if model.dist(c, d).length == best]
    if len(winners) != 1:
        raise NotABuilding(
            f"distance minimizer on residue not unique ({len(winners)} found)"
        )
    return winners[0]


def coproj(model: TwinBuildingModel, residue: Residue, c: Chamber) -> Chamber:
    """Co-projection: the unique member whose codistance from c is
    Bruhat-maximal.  The residue must be of spherical type."""
    if c.sign == residue.sign:
        raise ValueError("co-projection needs c in the opposite half")
    if not model.system.parabolic_info(residue.types).finite:
        raise NotSpherical(f"residue type {sorted(residue.types)} is not spherical")
    values = {d: model.codist(c, d) for d in residue.chambers}
    winners = [
        d for d, v in values.items()
        if all(model.system.bruhat_leq(u, v) for u in values.values())
    ]
    if len(winners) != 1:
        raise NotABuilding(
            f"codistance maximizer on residue not unique ({len(winners)} found)"
        )
    return winners[0]


def coproj_panel(model: TwinBuildingModel, c_panel: Chamber, s: int,
                 c: Chamber) -> Chamber:
    return coproj(model, panel_residue(model, c_panel, s), c)


def panel_residue(model: TwinBuildingModel, c: Chamber, s: int) -> Residue:
    return Residue(c.sign, frozenset({s}), model.panel(c, s), c)


# ---------------------------------------------------------------------------
# twin apartments and retractions


def twin_apartment(model: TwinBuildingModel, c: Chamber, d: Chamber) -> TwinApartment:
    """The twin apartment spanned by an opposite pair, computed as the
    locus where distance from one base equals codistance from the other,
    then certified isometric to the thin model."""
    if c.sign == d.sign:
        raise ValueError("twin apartment needs chambers of opposite signs")
    if not model.codist(c, d).is_identity():
        raise NotOpposite("base chambers are not opposite")
    c_half = tuple(
        x for x in model.chambers(c.sign)
        if model.dist(c, x) == model.codist(d, x)
    )
    d_half = tuple(
        y for y in model.chambers(d.sign)
        if model.dist(d, y) == model.codist(c, y)
    )
    plus, minus = (c_half, d_half) if c.sign > 0 else (d_half, c_half)
    apartment = TwinApartment(c, d, plus, minus)
    _verify_apartment(model, apartment, c, d)
    return apartment


def _verify_apartment(model, apartment, c, d):
    sys = model.system
    c_half, d_half = apartment.half(c.sign), apartment.half(d.sign)
    phi = {x: model.dist(c, x) for x in c_half}
    psi = {y: model.codist(c, y) for y in d_half}
    for x in c_half:
        opp = [y for y in d_half if model.codist(x, y).is_identity()]
        if len(opp) != 1:
            raise NotABuilding("apartment chamber without a unique opposite")
    for y in d_half:
        opp = [x for x in c_half if model.codist(y, x).is_identity()]
        if len(opp) != 1:
            raise NotABuilding("apartment chamber without a unique opposite")
    for x1, x2 in itertools.combinations(c_half, 2):
        expected = sys.multiply(sys.inverse(phi[x1]), phi[x2])
        if model.dist(x1, x2) != expected:
            raise NotABuilding("apartment half not isometric to the Coxeter model")
    for x in c_half:
        for y in d_half:
            expected = sys.multiply(sys.inverse(phi[x]), psi[y])
            if model.codist(x, y) != expected:
                raise NotABuilding("apartment codistance not of thin type")


def retraction(model: TwinBuildingModel, c: Chamber,
               apartment: TwinApartment, x: Chamber) -> Chamber:
    """Retraction onto the apartment centred at c: the unique apartment
    chamber at the same (co)distance from c as x."""
    if c not in apartment:
        raise NotInApartment("retraction centre outside the apartment")
    w = model.wdist(c, x)
    side = apartment.half(x.sign)
    winners = [sigma for sigma in side if model.wdist(c, sigma) == w]
    if len(winners) != 1:
        raise NotABuilding("retraction target not unique in the apartment")
    return winners[0]


def check_retraction_monotone(model: TwinBuildingModel, c: Chamber,
                              apartment: TwinApartment) -> CheckResult:
    """Monotonicity of the retraction in the Bruhat order: same-half
    distances can only go down, cross-half codistances can only go up
    (retracting can only make a pair less transverse)."""
    sysm = model.system
    checked = 0
    both = tuple(model.chambers(1)) + tuple(model.chambers(-1))
    images = {x: retraction(model, c, apartment, x) for x in both}
    for x in both:
        for y in both:
            checked += 1
            before, after = model.wdist(x, y), model.wdist(images[x], images[y])
            ok = (
                sysm.bruhat_leq(after, before)
                if x.sign == y.sign
                else sysm.bruhat_leq(before, after)
            )
            if not ok:
                return CheckResult(
                    "retraction-monotone", False, _certify_str(model), checked,
                    {"x": model.chamber_label(x), "y": model.chamber_label(y),
                     "before": wire_word(before), "after": wire_word(after)},
                )
    return CheckResult("retraction-monotone", True, _certify_str(model), checked)


# ---------------------------------------------------------------------------
# Schubert census


@dataclass
class Census:
    """Cell and co-cell decomposition around a base chamber, with an
    optional formal dimension attached to each radius."""

    base: Chamber
    cells: dict[CoxeterElement, tuple[Chamber, ...]]
    cocells: dict[CoxeterElement, tuple[Chamber, ...]]
    dims: Optional[dict[int, int]] = None

    def cell_sizes(self) -> dict[CoxeterElement, int]:
        return {w: len(v) for w, v in self.cells.items()}

    def cocell_sizes(self) -> dict[CoxeterElement, int]:
        return {w: len(v) for w, v in self.cocells.items()}

    def dim_of(self, w: CoxeterElement) -> Optional[int]:
        if self.dims is None:
            return None
        return sum(self.dims[s] for s in w.word)

    def total(self) -> int:
        return sum(len(v) for v in self.cells.values())


def schubert_census(model: TwinBuildingModel, c: Chamber,
                    cap: Optional[int] = None,
                    dims: Optional[dict[int, int]] = None) -> Census:
    """Sizes (and members) of the cells E_w(c) and co-cells E*_w(c), for
    l(w) <= cap when a cap is given."""
    cells: dict[CoxeterElement, list[Chamber]] = {}
    cocells: dict[CoxeterElement, list[Chamber]] = {}
    for d in model.chambers(c.sign):
        w = model.dist(c, d)
        if cap is None or w.length <= cap:
            cells.setdefault(w, []).append(d)
    for d in model.chambers(-c.sign):
        w = model.codist(c, d)
        if cap is None or w.length <= cap:
            cocells.setdefault(w, []).append(d)
    return Census(
        c,
        {w: tuple(v) for w, v in cells.items()},
        {w: tuple(v) for w, v in cocells.items()},
        dims,
    )


# ---------------------------------------------------------------------------
# gallery spaces


@dataclass
class GallerySpace:
    """All galleries of a fixed type word from a base chamber, with the
    endpoint map and (for reduced types) its cell structure."""

    type_word: tuple[int, ...]
    base: Chamber
    galleries: tuple[tuple[Chamber, ...], ...]
    reduced: bool
    target: Optional[CoxeterElement]
    endpoints_cover_ball: Optional[bool]
    open_cell_bijection: Optional[bool]

    @property
    def count(self) -> int:
        return len(self.galleries)

    def endpoints(self) -> tuple[Chamber, ...]:
        return tuple(g[-1] for g in self.galleries)

    def non_stammering(self) -> tuple[tuple[Chamber, ...], ...]:
        return tuple(
            g for g in self.galleries
            if all(g[i] != g[i + 1] for i in range(len(g) - 1))
        )


def gallery_space(model: TwinBuildingModel, type_word: Sequence[int],
                  c0: Chamber) -> GallerySpace:
    """Enumerate Gall(type; c0) step by step through the panels.

    For a reduced type word spelling w, additionally verifies that the
    endpoint map covers the ball E_{<=w}(c0) and restricts to a bijection
    between non-stammering galleries and the open cell E_w(c0).
    """
    word = tuple(type_word)
    galleries: list[tuple[Chamber, ...]] = [(c0,)]
    for s in word:
        nxt = []
        for g in galleries:
            if not model.panel_complete(g[-1]):
                raise RegionTooSmall(
                    "gallery enumeration reached the enumeration boundary"
                )
            for d in model.panel(g[-1], s):
                nxt.append(g + (d,))
        galleries = nxt
    reduced = model.system.is_reduced(word)
    target = cover = bijection = None
    if reduced:
        target = model.system.normal_form(word)
        ball = {
            d for d in model.chambers(c0.sign)
            if model.system.bruhat_leq(model.dist(c0, d), target)
        }
        cover = {g[-1] for g in galleries} == ball
        open_cell = [d for d in ball if model.dist(c0, d) == target]
        ns_end = [g[-1] for g in galleries
                  if all(g[i] != g[i + 1] for i in range(len(g) - 1))]
        bijection = sorted(map(model.chamber_label, ns_end)) == sorted(
            map(model.chamber_label, open_cell)
        )
    return GallerySpace(word, c0, tuple(galleries), reduced, target, cover, bijection)


# ---------------------------------------------------------------------------
# punctured-panel multiplication


@dataclass
class PanelMulTable:
    """Multiplication P_r(c_+)^x times P_s(c_-)^x -> P_r(c_+)^x built from a
    four-fold co-projection chain, together with its verified identities."""

    c_plus: Chamber
    c_minus: Chamber
    r: int
    s: int
    zero_plus: Chamber
    zero_minus: Chamber
    one_minus: Chamber
    x_elements: tuple[Chamber, ...]
    y_elements: tuple[Chamber, ...]
    table: dict[tuple[Chamber, Chamber], Chamber]
    identities_hold: bool
    bijective_in_x: bool

    def apply(self, x: Chamber, y: Chamber) -> Chamber:
        return self.table[(x, y)]


def panel_mul(model: TwinBuildingModel, c_plus: Chamber, c_minus: Chamber,
              r: int, s: int, one_minus: Chamber) -> PanelMulTable:
    """Punctured-panel multiplication for adjacent types r, s (bond >= 3).

    zero elements are the co-projections of the opposite base onto the two
    panels; the unit is the supplied chamber ``one_minus``.  The product
    x * y chains four co-projections through the panels of type r around
    1_-, around the co-projection d_+ of c_- onto P_s(c_+), around y, and
    back onto P_r(c_+).
    """
    sysm = model.system
    if r == s or sysm.matrix.bond(r, s) < 3:
        raise BadGeometry(f"types {r},{s} need bond >= 3")
    if c_plus.sign == c_minus.sign:
        raise BadGeometry("base chambers must lie in opposite halves")
    if not model.codist(c_plus, c_minus).is_identity():
        raise BadGeometry("base chambers must be opposite")

    zero_plus = coproj_panel(model, c_plus, r, c_minus)
    zero_minus = coproj_panel(model, c_minus, s, c_plus)
    d_plus = coproj_panel(model, c_plus, s, c_minus)

    punct_r = tuple(x for x in model.panel(c_plus, r) if x != c_plus)
    punct_s = tuple(y for y in model.panel(c_minus, s) if y != c_minus)
    if one_minus not in punct_s or one_minus == zero_minus:
        raise BadGeometry("unit must lie in the punctured panel minus the zero")

    table: dict[tuple[Chamber, Chamber], Chamber] = {}
    for x in punct_r:
        for y in punct_s:
            g1 = coproj_panel(model, one_minus, r, x)
            g2 = coproj_panel(model, d_plus, r, g1)
            g3 = coproj_panel(model, y, r, g2)
            table[(x, y)] = coproj_panel(model, c_plus, r, g3)

    identities = all(table[(x, zero_minus)] == zero_plus for x in punct_r) and all(
        table[(x, one_minus)] == x for x in punct_r
    )
    bijective = all(
        len({table[(x, y)] for x in punct_r}) == len(punct_r)
        and all(table[(x, y)] in punct_r for x in punct_r)
        for y in punct_s
        if y != zero_minus
    )
    return PanelMulTable(
        c_plus, c_minus, r, s, zero_plus, zero_minus, one_minus,
        punct_r, punct_s, table, identities, bijective,
    )


# ---------------------------------------------------------------------------
# stratification by codistance


@dataclass
class Stratification:
    """Codistance strata relative to a base chamber, the panel codistance
    profile, and the length-increasing reachability order on strata."""

    base: Chamber
    strata: dict[CoxeterElement, tuple[Chamber, ...]]
    profile_ok: bool
    profile_witness: Optional[dict]
    edges: tuple[tuple[CoxeterElement, CoxeterElement], ...]
    filters_match: bool
    filter_witness: Optional[dict]

    def sizes(self) -> dict[CoxeterElement, int]:
        return {w: len(v) for w, v in self.strata.items()}

    def reachable_from(self, w: CoxeterElement) -> frozenset[CoxeterElement]:
        out = {w}
        frontier = [w]
        succ: dict[CoxeterElement, list[CoxeterElement]] = {}
        for a, b in self.edges:
            succ.setdefault(a, []).append(b)
        while frontier:
            cur = frontier.pop()
            for nxt in succ.get(cur, ()):
                if nxt not in out:
                    out.add(nxt)
                    frontier.append(nxt)
        return frozenset(out)


def stratification(model: TwinBuildingModel, d: Chamber) -> Stratification:
    """Stratify the half opposite d by codistance from d.

    Verifies the panel profile (each panel meets exactly one chamber at the
    longer codistance, all others at the shorter one) and that one-panel
    length-increasing steps, on either side, generate exactly the Bruhat
    filter above each realized stratum.
    """
    sysm = model.system
    half = -d.sign
    strata: dict[CoxeterElement, list[Chamber]] = {}
    for c in model.chambers(half):
        strata.setdefault(model.codist(d, c), []).append(c)

    profile_ok, profile_witness, checked_panels = _panel_profiles(model, d, half)

    realized = set(strata)
    edges: set[tuple[CoxeterElement, CoxeterElement]] = set()
    # right steps: move inside a panel of the stratified half
    for w, members in strata.items():
        for c in members:
            for s in range(sysm.rank):
                for x in model.panel(c, s):
                    v = model.codist(d, x)
                    if v.length > w.length and v == sysm.times_gen(w, s, "right"):
                        edges.add((w, v))
    # left steps: move the base chamber inside its own panels
    for s in range(sysm.rank):
        for dprime in model.panel(d, s):
            if dprime == d:
                continue
            for w, members in strata.items():
                target = sysm.times_gen(w, s, "left")
                if target.length <= w.length:
                    continue
                if any(model.codist(dprime, c) == target for c in members):
                    if target in realized:
                        edges.add((w, target))

    filters_match = True
    filter_witness = None
    for w in realized:
        reach = _closure(w, edges)
        bruhat = {v for v in realized if sysm.bruhat_leq(w, v)}
        if reach != bruhat:
            filters_match = False
            filter_witness = {
                "stratum": wire_word(w),
                "reachable": sorted(wire_word(v) for v in reach),
                "bruhat_filter": sorted(wire_word(v) for v in bruhat),
            }
            break

    return Stratification(
        d,
        {w: tuple(v) for w, v in strata.items()},
        profile_ok,
        profile_witness,
        tuple(sorted(edges, key=lambda e: (e[0].word, e[1].word))),
        filters_match,
        filter_witness,
    )


def _closure(w, edges):
    out = {w}
    frontier = [w]
    while frontier:
        cur = frontier.pop()
        for a, b in edges:
            if a == cur and b not in out:
                out.add(b)
                frontier.append(b)
    return frozenset(out)


def _panel_profiles(model, d, half):
    sysm = model.system
    seen_panels = set()
    checked = 0
    for c in model.interior_chambers(half):
        for s in range(sysm.rank):
            members = model.panel(c, s)
            if members in seen_panels:
                continue
            seen_panels.add(members)
            checked += 1
            values = [model.codist(d, x) for x in members]
            shorter = min(values, key=lambda v: v.length)
            longer = sysm.times_gen(shorter, s, "right")
            n_long = sum(1 for v in values if v == longer)
            n_short = sum(1 for v in values if v == shorter)
            ok = (
                longer.length > shorter.length
                and n_long == 1
                and n_short == len(values) - 1
            )
            if not ok:
                witness = {
                    "panel_type": s,
                    "panel": [model.chamber_label(x) for x in members],
                    "codistances": [wire_word(v) for v in values],
                }
                return False, witness, checked
    return True, None, checked


# ---------------------------------------------------------------------------
# axiom verification


def check_axioms(model: TwinBuildingModel) -> CheckResult:
    """Exhaustively verify the building axioms on each half and the twin
    axioms across halves, for all interior chambers.

    Returns a passing result or the first violating tuple.
    """
    sysm = model.system
    checked = 0
    interior = {sign: tuple(model.interior_chambers(sign)) for sign in (1, -1)}
    if not interior[1] or not interior[-1]:
        raise RegionTooSmall("no interior chambers to certify")

    def fail(axiom, **data):
        data["axiom"] = axiom
        return CheckResult("axioms", False, _certify_str(model), checked, data)

    for sign in (1, -1):
        allc = model.chambers(sign)
        for x in interior[sign]:
            for y in allc:
                checked += 1
                w = model.dist(x, y)
                if w.is_identity() != (x == y):
                    return fail("Bu1", x=model.chamber_label(x),
                                y=model.chamber_label(y), w=wire_word(w))
        for x in interior[sign]:
            for y in interior[sign]:
                w = model.dist(x, y)
                for s in range(sysm.rank):
                    ws = sysm.times_gen(w, s, "right")
                    hit = False
                    for z in model.panel(y, s):
                        if z == y:
                            continue
                        checked += 1
                        wxz = model.dist(x, z)
                        if wxz not in (w, ws):
                            return fail("Bu2", x=model.chamber_label(x),
                                        y=model.chamber_label(y),
                                        z=model.chamber_label(z),
                                        w=wire_word(w), got=wire_word(wxz))
                        if ws.length > w.length and wxz != ws:
                            return fail("Bu2", x=model.chamber_label(x),
                                        y=model.chamber_label(y),
                                        z=model.chamber_label(z),
                                        w=wire_word(w), got=wire_word(wxz))
                        if wxz == ws:
                            hit = True
                    if not hit:
                        return fail("Bu3", x=model.chamber_label(x),
                                    y=model.chamber_label(y), s=s,
                                    w=wire_word(w))

    for sign in (1, -1):
        for x in interior[sign]:
            for y in interior[-sign]:
                checked += 1
                w = model.codist(x, y)
                if model.codist(y, x) != sysm.inverse(w):
                    return fail("Tw1", x=model.chamber_label(x),
                                y=model.chamber_label(y), w=wire_word(w),
                                back=wire_word(model.codist(y, x)))
                for s in range(sysm.rank):
                    ws = sysm.times_gen(w, s, "right")
                    hit = False
                    for z in model.panel(y, s):
                        if z == y:
                            continue
                        checked += 1
                        wxz = model.codist(x, z)
                        if ws.length < w.length and wxz != ws:
                            return fail("Tw2", x=model.chamber_label(x),
                                        y=model.chamber_label(y),
                                        z=model.chamber_label(z),
                                        w=wire_word(w), got=wire_word(wxz))
                        if wxz == ws:
                            hit = True
                    if not hit:
                        return fail("Tw3", x=model.chamber_label(x),
                                    y=model.chamber_label(y), s=s,
                                    w=wire_word(w))

    return CheckResult("axioms", True, _certify_str(model), checked)


def _certify_str(model) -> str:
    ni = {s: len(tuple(model.interior_chambers(s))) for s in (1, -1)}
    na = {s: len(tuple(model.chambers(s))) for s in (1, -1)}
    if ni == na:
        return f"all chambers ({na[1]}+{na[-1]})"
    return f"interior {ni[1]}+{ni[-1]} of {na[1]}+{na[-1]} enumerated"


# ---------------------------------------------------------------------------
# combinatorial lemma checks


def check_coprojection_agreement(model: TwinBuildingModel) -> CheckResult:
    """Chambers adjacent along an s-panel have equal co-projections onto
    every t-panel (t != s) of any common opposite."""
    sysm = model.system
    checked = 0
    for sign in (1, -1):
        for c1 in model.interior_chambers(sign):
            for s in range(sysm.rank):
                for c2 in model.panel(c1, s):
                    if c2 == c1:
                        continue
                    common = [
                        dd for dd in model.opposites(c1)
                        if model.codist(c2, dd).is_identity()
                    ]
                    for dd in common:
                        for t in range(sysm.rank):
                            if t == s:
                                continue
                            checked += 1
                            a1 = coproj_panel(model, dd, t, c1)
                            a2 = coproj_panel(model, dd, t, c2)
                            if a1 != a2:
                                return CheckResult(
                                    "coprojection-agreement", False,
                                    _certify_str(model), checked,
                                    {
                                        "c1": model.chamber_label(c1),
                                        "c2": model.chamber_label(c2),
                                        "d": model.chamber_label(dd),
                                        "s": s, "t": t,
                                    },
                                )
    return CheckResult("coprojection-agreement", True, _certify_str(model), checked)


def check_common_opposites(model: TwinBuildingModel) -> CheckResult:
    """In a thick model every same-half pair admits a common opposite."""
    if not model.is_thick():
        return CheckResult("common-opposites", True,
                           "skipped: model is not thick", 0, skipped=True)
    checked = 0
    for sign in (1, -1):
        cs = model.chambers(sign)
        for c1 in cs:
            opp1 = set(model.opposites(c1))
            for c2 in cs:
                checked += 1
                if not any(model.codist(c2, dd).is_identity() for dd in opp1):
                    return CheckResult(
                        "common-opposites", False, _certify_str(model), checked,
                        {"c1": model.chamber_label(c1),
                         "c2": model.chamber_label(c2)},
                    )
    return CheckResult("common-opposites", True, _certify_str(model), checked)


def check_codistance_subword_bound(model: TwinBuildingModel) -> CheckResult:
    """Moving the far endpoint by a gallery of type v changes codistance by
    a Bruhat-below-v factor: codist(c, e) = w * v' with v' <= v."""
    sysm = model.system
    checked = 0
    cache: dict[tuple, bool] = {}
    for sign in (1, -1):
        for c in model.interior_chambers(sign):
            for d in model.interior_chambers(-sign):
                w = model.codist(c, d)
                w_inv = sysm.inverse(w)
                for e in model.interior_chambers(-sign):
                    checked += 1
                    v = model.dist(d, e)
                    vprime = sysm.multiply(w_inv, model.codist(c, e))
                    key = (vprime.word, v.word)
                    if key not in cache:
                        cache[key] = sysm.bruhat_leq(vprime, v)
                    if not cache[key]:
                        return CheckResult(
                            "codistance-subword-bound", False,
                            _certify_str(model), checked,
                            {"c": model.chamber_label(c),
                             "d": model.chamber_label(d),
                             "e": model.chamber_label(e),
                             "w": wire_word(w), "v": wire_word(v),
                             "vprime": wire_word(vprime)},
                        )
    return CheckResult("codistance-subword-bound", True, _certify_str(model), checked)


def check_opposition_witness(model: TwinBuildingModel) -> CheckResult:
    """For every opposite pair and reduced w = s_1...s_k != e, construct a
    chamber d opposite c_+ whose codistance from the whole co-cell
    E*_w(c_-) is uniformly s_k, walking punctured panels as in the
    inductive construction."""
    if not model.is_thick():
        return CheckResult("opposition-witness", True,
                           "skipped: model is not thick", 0, skipped=True)
    sysm = model.system
    checked = 0
    elements = [w for layer in sysm.enumerate_upto(
        sysm.parabolic_info().longest.length if sysm.parabolic_info().finite else 4)
        for w in layer if not w.is_identity()]
    for c_plus in model.chambers(1):
        for c_minus in model.opposites(c_plus):
            for w in elements:
                for expr in sysm.reduced_words(w):
                    checked += 1
                    base = c_minus
                    ok = True
                    for s in expr[:-1]:
                        gate = coproj_panel(model, base, s, c_plus)
                        options = [
                            z for z in model.panel(base, s)
                            if z not in (base, gate)
                        ]
                        if not options:
                            ok = False
                            break
                        base = options[0]
                    if not ok:
                        return CheckResult(
                            "opposition-witness", False, _certify_str(model),
                            checked, {"w": wire_word(w), "reason": "panel too thin"},
                        )
                    dd = base
                    cocell = [
                        x for x in model.chambers(1)
                        if model.codist(c_minus, x) == w
                    ]
                    sk = sysm.generator(expr[-1])
                    good = model.codist(c_plus, dd).is_identity() and all(
                        model.codist(x, dd) == sk for x in cocell
                    )
                    if not good:
                        return CheckResult(
                            "opposition-witness", False, _certify_str(model),
                            checked,
                            {"w": wire_word(w),
                             "c_plus": model.chamber_label(c_plus),
                             "c_minus": model.chamber_label(c_minus),
                             "d": model.chamber_label(dd)},
                        )
    return CheckResult("opposition-witness", True, _certify_str(model), checked)


def check_panel_mul_all(model: TwinBuildingModel) -> CheckResult:
    """Punctured-panel multiplication over every admissible configuration:
    every opposite base pair, every adjacent type pair, every admissible
    unit; the zero/unit identities and bijectivity in the first argument
    must hold each time."""
    sysm = model.system
    adjacent = [
        (r, s)
        for r in range(sysm.rank) for s in range(sysm.rank)
        if r != s and sysm.matrix.bond(r, s) >= 3
    ]
    if not adjacent:
        return CheckResult("panel-multiplication", True,
                           "skipped: no adjacent type pair", 0, skipped=True)
    if not model.is_thick():
        return CheckResult("panel-multiplication", True,
                           "skipped: model is not thick", 0, skipped=True)
    checked = 0
    for c_plus in model.chambers(1):
        for c_minus in model.opposites(c_plus):
            for r, s in adjacent:
                zero_minus = coproj_panel(model, c_minus, s, c_plus)
                for one_minus in model.panel(c_minus, s):
                    if one_minus in (c_minus, zero_minus):
                        continue
                    table = panel_mul(model, c_plus, c_minus, r, s, one_minus)
                    checked += 1
                    if not (table.identities_hold and table.bijective_in_x):
                        return CheckResult(
                            "panel-multiplication", False,
                            "all admissible configurations", checked,
                            {"c_plus": model.chamber_label(c_plus),
                             "c_minus": model.chamber_label(c_minus),
                             "r": r, "s": s,
                             "one_minus": model.chamber_label(one_minus)},
                        )
    return CheckResult("panel-multiplication", True,
                       "all admissible configurations", checked)


def check_stratification_all(model: TwinBuildingModel) -> CheckResult:
    """Panel codistance profiles and reachability-equals-Bruhat-filter for
    every base chamber in both halves."""
    checked = 0
    for sign in (1, -1):
        for d in model.interior_chambers(sign):
            strat = stratification(model, d)
            checked += 1
            if not strat.profile_ok:
                return CheckResult(
                    "stratification", False, _certify_str(model), checked,
                    {"base": model.chamber_label(d),
                     "profile": strat.profile_witness},
                )
            if not strat.filters_match:
                return CheckResult(
                    "stratification", False, _certify_str(model), checked,
                    {"base": model.chamber_label(d),
                     "filter": strat.filter_witness},
                )
    return CheckResult("stratification", True, _certify_str(model), checked)


# ---------------------------------------------------------------------------
# formal dimension functions


@dataclass
class DimensionReport:
    """Whether w -> sum of d(s_i) over a reduced word is well defined up to
    the cap, with the predicted criterion and an offending relation if not."""

    dims: dict[int, int]
    cap: int
    well_defined: bool
    predicted: bool
    offender: Optional[dict]

    @property
    def consistent(self) -> bool:
        return self.well_defined == self.predicted


def check_dimension_function(system: CoxeterSystem, dims: dict[int, int],
                             cap: int) -> DimensionReport:
    """Test reduced-expression independence of the additive dimension
    function and compare with the odd-bond-component criterion (the value
    must be constant on connected components of the bond-3 subgraph)."""
    offender = None
    well_defined = True
    for layer in system.enumerate_upto(cap):
        for w in layer:
            sums = {}
            for expr in system.reduced_words(w):
                sums.setdefault(sum(dims[s] for s in expr), expr)
            if len(sums) > 1:
                items = sorted(sums.items())
                offender = {
                    "element": wire_word(w),
                    "expressions": [[s + 1 for s in items[0][1]],
                                    [s + 1 for s in items[-1][1]]],
                    "values": [items[0][0], items[-1][0]],
                }
                well_defined = False
                break
        if offender:
            break

    # constant-on-odd-components criterion
    parent = list(range(system.rank))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j, bond in system.all_bonds():
        if bond == 3:
            parent[find(i)] = find(j)
    groups: dict[int, set[int]] = {}
    for s in range(system.rank):
        groups.setdefault(find(s), set()).add(dims[s])
    predicted = all(len(vals) == 1 for vals in groups.values())

    return DimensionReport(dims, cap, well_defined, predicted, offender)


# ---------------------------------------------------------------------------
# explicit-table models and JSON round trips


class TableTwinBuilding(TwinBuildingModel):
    """Model backed by explicit distance/codistance dictionaries; used for
    imports and for constructing deliberate violations."""

    def __init__(self, system: CoxeterSystem,
                 plus: Sequence[str], minus: Sequence[str],
                 dist_tables: dict[int, dict[tuple[str, str], CoxeterElement]],
                 codist_table: dict[tuple[str, str], CoxeterElement],
                 interior: Optional[dict[int, Sequence[str]]] = None):
        self.system = system
        self._chambers = {
            1: tuple(Chamber(1, k) for k in plus),
            -1: tuple(Chamber(-1, k) for k in minus),
        }
        self._dist = dist_tables
        self._codist = codist_table
        self._interior_keys = interior
        super().__init__()

    def chambers(self, sign: int):
        return self._chambers[sign]

    def interior_chambers(self, sign: int):
        if self._interior_keys is None:
            return self._chambers[sign]
        allowed = set(self._interior_keys[sign])
        return tuple(c for c in self._chambers[sign] if c.key in allowed)

    def dist(self, x: Chamber, y: Chamber) -> CoxeterElement:
        return self._dist[x.sign][(x.key, y.key)]

    def codist(self, x: Chamber, y: Chamber) -> CoxeterElement:
        return self._codist[(x.key, y.key)]

    def chamber_label(self, c: Chamber) -> str:
        return str(c.key)

    def describe(self) -> str:
        return "table"


def export_model(model: TwinBuildingModel) -> dict:
    """Serialize a model: chamber ids, panel-adjacency distance data per
    half, and the full codistance table.

    Distances are stored sparsely (only panel-adjacent pairs); the importer
    rebuilds the full distance function by a gate-respecting breadth-first
    sweep.  Codistance rows cannot be recovered from adjacency alone, so
    they are stored in full.
    """
    sysm = model.system
    doc = {
        "type": {"rank": sysm.rank, "cartan": [list(r) for r in sysm.cartan]},
        "plus": [model.chamber_label(c) for c in model.chambers(1)],
        "minus": [model.chamber_label(c) for c in model.chambers(-1)],
        "adjacency": {},
        "costar": {},
        "interior": {
            "plus": [model.chamber_label(c) for c in model.interior_chambers(1)],
            "minus": [model.chamber_label(c) for c in model.interior_chambers(-1)],
        },
    }
    for sign, tag in ((1, "plus"), (-1, "minus")):
        adj = []
        cs = model.chambers(sign)
        for i, x in enumerate(cs):
            for y in cs[i + 1:]:
                w = model.dist(x, y)
                if w.length == 1:
                    adj.append([model.chamber_label(x), model.chamber_label(y),
                                w.word[0] + 1])
        doc["adjacency"][tag] = adj
    # both directions are stored verbatim so that violations of the
    # inversion symmetry remain expressible after a round trip
    for x in model.chambers(1):
        for y in model.chambers(-1):
            lx, ly = model.chamber_label(x), model.chamber_label(y)
            doc["costar"][f"{lx}|{ly}"] = [s + 1 for s in model.codist(x, y).word]
            doc["costar"][f"{ly}|{lx}"] = [s + 1 for s in model.codist(y, x).word]
    return doc


def import_model(doc: dict) -> TableTwinBuilding:
    """Rebuild a table model from :func:`export_model` output."""
    sysm = CoxeterSystem(doc["type"]["cartan"])
    plus, minus = list(doc["plus"]), list(doc["minus"])
    dist_tables: dict[int, dict] = {}
    for sign, tag, ids in ((1, "plus", plus), (-1, "minus", minus)):
        panels: dict[int, dict[str, set[str]]] = {
            s: {i: {i} for i in ids} for s in range(sysm.rank)
        }
        for x, y, s1 in doc["adjacency"][tag]:
            s = s1 - 1
            merged = panels[s][x] | panels[s][y]
            for z in merged:
                panels[s][z] = merged
        dist_tables[sign] = _rebuild_distances(sysm, ids, panels)
    codist = {}
    for key, word in doc["costar"].items():
        x, y = key.split("|", 1)
        codist[(x, y)] = sysm.normal_form([s - 1 for s in word])
    interior = None
    if "interior" in doc:
        interior = {1: doc["interior"]["plus"], -1: doc["interior"]["minus"]}
    return TableTwinBuilding(sysm, plus, minus, dist_tables, codist, interior)


def _rebuild_distances(sysm: CoxeterSystem, ids: list[str],
                       panels: dict[int, dict[str, set[str]]]) -> dict:
    """Recover the Weyl distance from panel adjacency.

    Gate property: within a panel, the chamber at minimal distance from the
    base is unique, and all other chambers sit at that value times the
    panel type.  A breadth-first sweep ordered by length therefore assigns
    every chamber a unique value.
    """
    table: dict[tuple[str, str], CoxeterElement] = {}
    for base in ids:
        assigned = {base: sysm.identity()}
        frontier = [base]
        while frontier:
            nxt = []
            for x in sorted(frontier):
                w = assigned[x]
                for s in range(sysm.rank):
                    group = panels[s][x]
                    known = [z for z in group if z in assigned]
                    gate = min(known, key=lambda z: assigned[z].length)
                    value = sysm.times_gen(assigned[gate], s, "right")
                    if value.length < assigned[gate].length:
                        continue  # x is not past the gate; others were set
                    for z in group:
                        if z not in assigned:
                            assigned[z] = value
                            nxt.append(z)
            frontier = nxt
        if len(assigned) != len(ids):
            raise NotABuilding("panel adjacency does not connect the half")
        for y, w in assigned.items():
            table[(base, y)] = w
    return table
