"""Generic twin-building machinery on thin and matrix models."""

import pytest

from twinbuild.buildings import (
    BadGeometry,
    Chamber,
    NotInApartment,
    NotOpposite,
    NotSpherical,
    check_axioms,
    check_codistance_subword_bound,
    check_common_opposites,
    check_coprojection_agreement,
    check_dimension_function,
    check_opposition_witness,
    check_retraction_monotone,
    coproj,
    coproj_panel,
    export_model,
    gallery_space,
    import_model,
    panel_mul,
    panel_residue,
    proj,
    retraction,
    schubert_census,
    stratification,
    twin_apartment,
)
from twinbuild.coxeter import (
    CARTAN_A2,
    CARTAN_AFFINE_A1,
    CARTAN_B2,
    CARTAN_G2,
    CoxeterSystem,
)
from twinbuild.slgroups import SpecialLinearTwin
from twinbuild.thin import ThinTwinBuilding


@pytest.fixture(scope="module")
def thin_a2():
    return ThinTwinBuilding(CoxeterSystem(CARTAN_A2), cap=3)


@pytest.fixture(scope="module")
def sl2_2():
    return SpecialLinearTwin(2, 2).building()


@pytest.fixture(scope="module")
def sl2_3():
    return SpecialLinearTwin(2, 3).building()


@pytest.fixture(scope="module")
def sl3_2():
    return SpecialLinearTwin(3, 2).building()


def thin_chamber(model, sign, word):
    return Chamber(sign, model.system.normal_form(word))


# ---------------------------------------------------------------------------
# projections


def test_proj_inside_residue(thin_a2):
    c = thin_chamber(thin_a2, 1, [0, 1])
    residue = panel_residue(thin_a2, c, 0)
    assert proj(thin_a2, residue, c) == c


def test_proj_thin_example(thin_a2):
    # gate of the {s1 s2 s1, s1 s2} panel seen from the identity chamber
    c = thin_chamber(thin_a2, 1, [])
    target = thin_chamber(thin_a2, 1, [0, 1])
    residue = panel_residue(thin_a2, target, 0)
    keys = {x.key.word for x in residue.chambers}
    assert keys == {(0, 1), (0, 1, 0)}
    assert proj(thin_a2, residue, c) == target


def test_proj_matches_bruteforce_sl3(sl3_2):
    for s in range(2):
        for c in sl3_2.chambers(1):
            for d in sl3_2.chambers(1):
                residue = panel_residue(sl3_2, d, s)
                gate = proj(sl3_2, residue, c)
                best = min(sl3_2.dist(c, x).length for x in residue.chambers)
                assert sl3_2.dist(c, gate).length == best


def test_coproj_rank_zero(thin_a2):
    c = thin_chamber(thin_a2, 1, [])
    d = thin_chamber(thin_a2, -1, [0, 1])
    from twinbuild.buildings import Residue

    singleton = Residue(-1, frozenset(), (d,), d)
    assert coproj(thin_a2, singleton, c) == d


def test_coproj_thin_example(thin_a2):
    c = thin_chamber(thin_a2, 1, [])
    base = thin_chamber(thin_a2, -1, [])
    assert coproj_panel(thin_a2, base, 0, c).key.word == (0,)


def test_coproj_not_spherical():
    model = ThinTwinBuilding(CoxeterSystem(CARTAN_AFFINE_A1), cap=4)
    c = Chamber(1, model.system.identity())
    base = Chamber(-1, model.system.identity())
    residue = model.residue(base, [0, 1])
    with pytest.raises(NotSpherical):
        coproj(model, residue, c)


# ---------------------------------------------------------------------------
# twin apartments and retractions


def test_thin_building_is_its_own_apartment(thin_a2):
    c = thin_chamber(thin_a2, 1, [])
    d = thin_chamber(thin_a2, -1, [])
    ap = twin_apartment(thin_a2, c, d)
    assert set(ap.plus) == set(thin_a2.chambers(1))
    assert set(ap.minus) == set(thin_a2.chambers(-1))


def test_apartment_not_opposite(thin_a2):
    c = thin_chamber(thin_a2, 1, [])
    d = thin_chamber(thin_a2, -1, [0])
    with pytest.raises(NotOpposite):
        twin_apartment(thin_a2, c, d)


def test_apartment_sizes_sl2_2(sl2_2):
    for c in sl2_2.chambers(1):
        for d in sl2_2.opposites(c):
            ap = twin_apartment(sl2_2, c, d)
            assert len(ap.plus) == 2 and len(ap.minus) == 2


def test_apartment_sizes_sl3_2(sl3_2):
    c = sl3_2.chambers(1)[0]
    d = sl3_2.opposites(c)[0]
    ap = twin_apartment(sl3_2, c, d)
    assert len(ap.plus) == 6 and len(ap.minus) == 6  # |W| = |S_3|


def test_retraction_fixes_apartment(sl2_3):
    c = sl2_3.chambers(1)[0]
    d = sl2_3.opposites(c)[0]
    ap = twin_apartment(sl2_3, c, d)
    for x in ap.plus + ap.minus:
        assert retraction(sl2_3, c, ap, x) == x


def test_retraction_thin_is_identity(thin_a2):
    c = thin_chamber(thin_a2, 1, [])
    d = thin_chamber(thin_a2, -1, [])
    ap = twin_apartment(thin_a2, c, d)
    for x in thin_a2.chambers(1) + thin_a2.chambers(-1):
        assert retraction(thin_a2, c, ap, x) == x


def test_retraction_collapses_panel_sl2_3(sl2_3):
    c = sl2_3.chambers(1)[0]
    d = sl2_3.opposites(c)[0]
    ap = twin_apartment(sl2_3, c, d)
    panel = sl2_3.panel(c, 0)
    sigma = [x for x in panel if x in ap and x != c]
    assert len(sigma) == 1
    outside = [x for x in panel if x not in ap]
    assert len(outside) == 2  # q + 1 = 4 chambers, two outside the apartment
    for x in outside:
        assert retraction(sl2_3, c, ap, x) == sigma[0]


def test_retraction_monotone(sl2_3, sl3_2):
    for bld in (sl2_3, sl3_2):
        c = bld.chambers(1)[0]
        d = bld.opposites(c)[0]
        ap = twin_apartment(bld, c, d)
        result = check_retraction_monotone(bld, c, ap)
        assert result.passed, result.witness


def test_retraction_preserves_distance_from_centre(sl2_3):
    c = sl2_3.chambers(1)[0]
    d = sl2_3.opposites(c)[0]
    ap = twin_apartment(sl2_3, c, d)
    for x in sl2_3.chambers(1) + sl2_3.chambers(-1):
        rx = retraction(sl2_3, c, ap, x)
        assert sl2_3.wdist(c, rx) == sl2_3.wdist(c, x)


def test_retraction_centre_must_lie_inside(sl2_3):
    c = sl2_3.chambers(1)[0]
    d = sl2_3.opposites(c)[0]
    ap = twin_apartment(sl2_3, c, d)
    outside = next(x for x in sl2_3.chambers(1) if x not in ap)
    with pytest.raises(NotInApartment):
        retraction(sl2_3, outside, ap, c)


# ---------------------------------------------------------------------------
# census


def test_census_thin(thin_a2):
    c = thin_chamber(thin_a2, 1, [])
    census = schubert_census(thin_a2, c)
    assert all(size == 1 for size in census.cell_sizes().values())
    assert census.total() == 6


def test_census_sl3_2(sl3_2):
    c = sl3_2.chambers(1)[0]
    census = schubert_census(sl3_2, c)
    sizes = census.cell_sizes()
    by_length = {}
    for w, size in sizes.items():
        by_length.setdefault(w.length, []).append(size)
        assert size == 2 ** w.length  # q^{l(w)}
    assert sorted(by_length[1]) == [2, 2]
    assert census.total() == 21
    # co-cell at the identity counts the opposite chambers
    e = sl3_2.system.identity()
    assert len(census.cocells[e]) == len(sl3_2.opposites(c)) == 8


def test_census_sl2_5():
    bld = SpecialLinearTwin(2, 5).building()
    census = schubert_census(bld, bld.chambers(1)[0])
    assert sorted(census.cell_sizes().values()) == [1, 5]
    assert census.total() == 6


def test_census_with_dims(sl2_2):
    census = schubert_census(sl2_2, sl2_2.chambers(1)[0], dims={0: 2})
    w = sl2_2.system.generator(0)
    assert census.dim_of(w) == 2


# ---------------------------------------------------------------------------
# galleries


def test_gallery_empty_type(thin_a2):
    c = thin_chamber(thin_a2, 1, [])
    space = gallery_space(thin_a2, (), c)
    assert space.count == 1 and space.galleries == ((c,),)


def test_gallery_thin_counts():
    model = ThinTwinBuilding(CoxeterSystem(CARTAN_A2), cap=4)
    c = Chamber(1, model.system.identity())
    space = gallery_space(model, (0, 1, 0), c)
    assert space.count == 8  # 2^k
    assert space.endpoints_cover_ball and space.open_cell_bijection


def test_gallery_sl2_2(sl2_2):
    c = sl2_2.chambers(1)[0]
    space = gallery_space(sl2_2, (0,), c)
    assert space.count == 3
    assert space.open_cell_bijection and space.endpoints_cover_ball


def test_gallery_fibration_recursion(sl3_2):
    c = sl3_2.chambers(1)[0]
    for word in [(0,), (0, 1), (0, 1, 0)]:
        space = gallery_space(sl3_2, word, c)
        assert space.count == 3 ** len(word)  # (q+1) per step


def test_gallery_non_stammering_counts(sl3_2):
    c = sl3_2.chambers(1)[0]
    space = gallery_space(sl3_2, (0, 1, 0), c)
    w0 = sl3_2.system.normal_form((0, 1, 0))
    open_cell = [d for d in sl3_2.chambers(1) if sl3_2.dist(c, d) == w0]
    assert len(space.non_stammering()) == len(open_cell) == 8


def test_gallery_unreduced_type(sl2_2):
    c = sl2_2.chambers(1)[0]
    space = gallery_space(sl2_2, (0, 0), c)
    assert not space.reduced
    assert space.count == 9


def test_gallery_respects_the_enumeration_boundary():
    from twinbuild.buildings import RegionTooSmall

    model = ThinTwinBuilding(CoxeterSystem(CARTAN_AFFINE_A1), cap=3)
    c0 = Chamber(1, model.system.identity())
    assert gallery_space(model, (0, 1, 0), c0).count == 8
    with pytest.raises(RegionTooSmall):
        gallery_space(model, (0, 1, 0, 1), c0)


# ---------------------------------------------------------------------------
# punctured-panel multiplication


def _panel_mul_setup(bld):
    c_plus = bld.chambers(1)[0]
    c_minus = bld.opposites(c_plus)[0]
    zero_minus = coproj_panel(bld, c_minus, 1, c_plus)
    one_minus = next(
        y for y in bld.panel(c_minus, 1) if y not in (c_minus, zero_minus)
    )
    return c_plus, c_minus, one_minus


def test_panel_mul_identities():
    bld = SpecialLinearTwin(3, 3).building()
    c_plus, c_minus, one_minus = _panel_mul_setup(bld)
    table = panel_mul(bld, c_plus, c_minus, 0, 1, one_minus)
    assert table.identities_hold
    assert table.bijective_in_x
    # columns are permutations of the 3-element punctured panel
    for y in table.y_elements:
        if y == table.zero_minus:
            continue
        col = [table.apply(x, y) for x in table.x_elements]
        assert sorted(col, key=repr) == sorted(table.x_elements, key=repr)


def test_panel_mul_bad_geometry(sl3_2):
    c_plus, c_minus, one_minus = _panel_mul_setup(sl3_2)
    with pytest.raises(BadGeometry):
        panel_mul(sl3_2, c_plus, c_minus, 0, 0, one_minus)
    with pytest.raises(BadGeometry):
        panel_mul(sl3_2, c_plus, c_minus, 0, 1, c_minus)
    not_opposite = next(
        d for d in sl3_2.chambers(-1)
        if not sl3_2.codist(c_plus, d).is_identity()
    )
    with pytest.raises(BadGeometry):
        panel_mul(sl3_2, c_plus, not_opposite, 0, 1, one_minus)


def test_panel_mul_all_configurations_sl3_2(sl3_2):
    checked = 0
    for c_plus in sl3_2.chambers(1)[:5]:
        for c_minus in sl3_2.opposites(c_plus):
            for r, s in ((0, 1), (1, 0)):
                zero_minus = coproj_panel(sl3_2, c_minus, s, c_plus)
                for one_minus in sl3_2.panel(c_minus, s):
                    if one_minus in (c_minus, zero_minus):
                        continue
                    table = panel_mul(sl3_2, c_plus, c_minus, r, s, one_minus)
                    assert table.identities_hold and table.bijective_in_x
                    checked += 1
    assert checked > 0


# ---------------------------------------------------------------------------
# stratification


def test_stratification_thin(thin_a2):
    d = thin_chamber(thin_a2, -1, [])
    strat = stratification(thin_a2, d)
    assert strat.profile_ok, strat.profile_witness
    assert strat.filters_match, strat.filter_witness
    assert all(size == 1 for size in strat.sizes().values())


def test_stratification_sl2_2(sl2_2):
    d = sl2_2.chambers(-1)[0]
    strat = stratification(sl2_2, d)
    assert strat.profile_ok
    e = sl2_2.system.identity()
    s = sl2_2.system.generator(0)
    assert strat.sizes() == {e: 2, s: 1}
    # panel through an opposite chamber: one chamber at s, two at identity
    opposite = strat.strata[e][0]
    values = sorted(
        sl2_2.codist(d, x).length for x in sl2_2.panel(opposite, 0)
    )
    assert values == [0, 0, 1]


def test_stratification_filters_sl3_2(sl3_2):
    for d in sl3_2.chambers(-1)[:3]:
        strat = stratification(sl3_2, d)
        assert strat.profile_ok, strat.profile_witness
        assert strat.filters_match, strat.filter_witness
        assert len(strat.strata) == 6  # every Weyl element realized


def test_stratification_sizes_sl2_5():
    bld = SpecialLinearTwin(2, 5).building()
    d = bld.chambers(-1)[0]
    strat = stratification(bld, d)
    e = bld.system.identity()
    assert strat.sizes()[e] == 5  # q chambers stay opposite
    assert strat.profile_ok and strat.filters_match


# ---------------------------------------------------------------------------
# dimension functions


def test_dimension_constant_always_works():
    sysm = CoxeterSystem(CARTAN_A2)
    report = check_dimension_function(sysm, {0: 3, 1: 3}, cap=6)
    assert report.well_defined and report.predicted and report.consistent


def test_dimension_a2_unbalanced_fails():
    sysm = CoxeterSystem(CARTAN_A2)
    report = check_dimension_function(sysm, {0: 1, 1: 2}, cap=6)
    assert not report.well_defined and not report.predicted
    assert report.offender["element"] == [1, 2, 1]
    assert sorted(report.offender["expressions"]) == [[1, 2, 1], [2, 1, 2]]


def test_dimension_b2_unbalanced_works():
    sysm = CoxeterSystem(CARTAN_B2)
    report = check_dimension_function(sysm, {0: 1, 1: 2}, cap=8)
    assert report.well_defined and report.predicted


def test_dimension_g2_and_affine():
    for cartan in (CARTAN_G2, CARTAN_AFFINE_A1):
        sysm = CoxeterSystem(cartan)
        report = check_dimension_function(sysm, {0: 1, 1: 4}, cap=8)
        assert report.well_defined and report.predicted and report.consistent


# ---------------------------------------------------------------------------
# lemma checks


def test_lemma_suite_sl2_3(sl2_3):
    for checker in (
        check_coprojection_agreement,
        check_common_opposites,
        check_codistance_subword_bound,
        check_opposition_witness,
    ):
        result = checker(sl2_3)
        assert result.passed, (result.name, result.witness)
        assert not result.skipped


def test_lemma_suite_thin_skips_thick_only(thin_a2):
    assert check_common_opposites(thin_a2).skipped
    assert check_opposition_witness(thin_a2).skipped
    result = check_coprojection_agreement(thin_a2)
    assert result.passed and not result.skipped
    result = check_codistance_subword_bound(thin_a2)
    assert result.passed and not result.skipped


# ---------------------------------------------------------------------------
# table models, export and import


def test_census_from_minus_half(sl2_3):
    census = schubert_census(sl2_3, sl2_3.chambers(-1)[0])
    assert census.total() == 4
    assert sorted(census.cell_sizes().values()) == [1, 3]


def test_apartment_of_capped_affine_is_the_ball():
    model = ThinTwinBuilding(CoxeterSystem(CARTAN_AFFINE_A1), cap=4)
    c = Chamber(1, model.system.identity())
    d = Chamber(-1, model.system.identity())
    ap = twin_apartment(model, c, d)
    assert set(ap.plus) == set(model.chambers(1))
    assert set(ap.minus) == set(model.chambers(-1))


def test_roundtrip_capped_affine():
    model = ThinTwinBuilding(CoxeterSystem(CARTAN_AFFINE_A1), cap=4)
    rebuilt = import_model(export_model(model))
    result = check_axioms(rebuilt)
    assert result.passed, result.witness
    assert len(rebuilt.interior_chambers(1)) == len(model.interior_chambers(1))


def test_roundtrip_thin(thin_a2):
    doc = export_model(thin_a2)
    model = import_model(doc)
    assert check_axioms(model).passed
    assert len(model.chambers(1)) == len(thin_a2.chambers(1))
    census_a = schubert_census(thin_a2, thin_a2.chambers(1)[0])
    census_b = schubert_census(model, model.chambers(1)[0])
    assert census_a.cell_sizes() == census_b.cell_sizes()


def test_roundtrip_sl2_2(sl2_2):
    doc = export_model(sl2_2)
    model = import_model(doc)
    assert check_axioms(model).passed


def test_region_too_small():
    from twinbuild.buildings import RegionTooSmall

    model = ThinTwinBuilding(CoxeterSystem(CARTAN_A2), cap=0)
    with pytest.raises(RegionTooSmall):
        check_axioms(model)


def test_projection_tie_is_not_a_building(thin_a2):
    from twinbuild.buildings import NotABuilding, Residue

    # a fabricated "residue" whose two chambers sit at equal distance from
    # the external chamber: the gate is not unique
    c = thin_chamber(thin_a2, 1, [])
    bogus = Residue(
        1, frozenset({0}),
        (thin_chamber(thin_a2, 1, [0]), thin_chamber(thin_a2, 1, [1])),
        thin_chamber(thin_a2, 1, [0]),
    )
    with pytest.raises(NotABuilding):
        proj(thin_a2, bogus, c)


def test_coprojection_tie_is_not_a_building(thin_a2):
    from twinbuild.buildings import NotABuilding, Residue

    c = thin_chamber(thin_a2, 1, [])
    bogus = Residue(
        -1, frozenset({0}),
        (thin_chamber(thin_a2, -1, [0]), thin_chamber(thin_a2, -1, [1])),
        thin_chamber(thin_a2, -1, [0]),
    )
    # codistances s1 and s2 are Bruhat-incomparable: no dominant maximum
    with pytest.raises(NotABuilding):
        coproj(thin_a2, bogus, c)


def test_corrupted_codistance_fails_tw1(thin_a2):
    doc = export_model(thin_a2)
    keys = [k for k, v in doc["costar"].items() if v == []]
    k0 = keys[0]
    other = next(k for k, v in doc["costar"].items() if v == [1])
    doc["costar"][k0], doc["costar"][other] = (
        doc["costar"][other],
        doc["costar"][k0],
    )
    model = import_model(doc)
    result = check_axioms(model)
    assert not result.passed
    assert result.witness["axiom"] in ("Tw1", "Tw2", "Tw3")
