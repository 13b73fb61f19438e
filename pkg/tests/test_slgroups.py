"""SL_n twin BN-pair: decompositions, chambers, formulas, Lang map, RGD."""

import itertools

import pytest

from twinbuild import primefield as pf
from twinbuild.buildings import (
    Chamber,
    check_axioms,
    coproj,
    coproj_panel,
    panel_residue,
    proj,
)
from twinbuild.slgroups import (
    LengthCondition,
    NotInBigCell,
    NotSwapping,
    SpecialLinearTwin,
    WrongCell,
    birkhoff_perm,
    birkhoff_perm_by_ranks,
    bruhat_minus_perm,
    bruhat_perm,
    bruhat_perm_by_ranks,
    check_bounded_products,
    check_ordered_unipotent_products,
    perm_to_word,
    rgd_axiom_check,
    word_to_perm,
)


@pytest.fixture(scope="module")
def sl2_3():
    return SpecialLinearTwin(2, 3)


@pytest.fixture(scope="module")
def sl3_2():
    return SpecialLinearTwin(3, 2)


@pytest.fixture(scope="module")
def bld3_2(sl3_2):
    return sl3_2.building()


# ---------------------------------------------------------------------------
# prime field sanity


def test_field_ops():
    f = pf.PrimeField(7)
    for a in f.units():
        assert (a * f.inv(a)) % 7 == 1
    with pytest.raises(ValueError):
        pf.PrimeField(9)


def test_matrix_ops():
    p = 5
    a = pf.mat([[1, 2], [3, 4]], p)
    assert pf.det(a, p) == (1 * 4 - 2 * 3) % p
    inv = pf.mat_inv(a, p)
    assert pf.mat_mul(a, inv, p) == pf.identity(2)
    assert pf.rank([[1, 2], [2, 4]], p) == 1


def test_group_orders():
    assert len(pf.special_linear_group(2, 2)) == 6
    assert len(pf.special_linear_group(2, 3)) == 24
    assert len(pf.special_linear_group(2, 5)) == 120
    assert len(pf.special_linear_group(3, 2)) == 168


# ---------------------------------------------------------------------------
# permutations


def test_monomial_subgroup_structure(sl2_3, sl3_2):
    # T = B_+ cap N = B_- cap N, and N/T is the symmetric group
    import math

    for sl in (sl2_3, sl3_2):
        monomial = [
            g for g in sl.group()
            if all(sum(1 for x in row if x) == 1 for row in g)
        ]
        torus = set(sl.torus())
        assert {g for g in monomial if pf.is_upper(g)} == torus
        assert {g for g in monomial if pf.is_lower(g)} == torus
        assert len(monomial) == len(torus) * math.factorial(sl.n)


def test_perm_word_roundtrip():
    for perm in itertools.permutations(range(4)):
        word = perm_to_word(perm)
        assert word_to_perm(word, 4) == perm
        inversions = sum(
            1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j]
        )
        assert len(word) == inversions


# ---------------------------------------------------------------------------
# decompositions


def test_bruhat_identity(sl2_3):
    wit = sl2_3.bruhat_decompose(pf.identity(2))
    assert wit.w.is_identity()


def test_bruhat_monomial_reps(sl3_2):
    for w in sl3_2.system.elements_upto(3):
        wit = sl3_2.bruhat_decompose(sl3_2.w_hat(w))
        assert wit.w == w


def test_elimination_matches_rank_criterion():
    for n, p in ((2, 3), (3, 2)):
        for g in pf.special_linear_group(n, p):
            assert bruhat_perm(g, p) == bruhat_perm_by_ranks(g, p)
            assert birkhoff_perm(g, p) == birkhoff_perm_by_ranks(g, p)


def test_bruhat_reconstruction_exhaustive(sl2_3):
    for g in sl2_3.group():
        wit = sl2_3.bruhat_decompose(g)
        assert pf.is_upper(wit.u1) and pf.is_upper(wit.u2)


def test_bruhat_cell_sizes(sl2_3):
    # |B w B| = q^{l(w)} |B| and the cells partition the group
    from collections import Counter

    counts = Counter(sl2_3.bruhat_decompose(g).w for g in sl2_3.group())
    b = len(sl2_3.borel(1))
    q = sl2_3.p
    assert counts[sl2_3.system.identity()] == b
    assert counts[sl2_3.system.generator(0)] == q * b
    assert sum(counts.values()) == 24


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (2, 5), (3, 2), (3, 3)])
def test_cell_size_law(n, p):
    # |B w B| = q^{l(w)} |B| for every w, and the opposition co-cell of any
    # chamber has q^{l(w0)} chambers
    from collections import Counter

    sl = SpecialLinearTwin(n, p)
    counts = Counter(
        sl.perm_element(bruhat_perm(g, p)) for g in sl.group()
    )
    b = len(sl.borel(1))
    for w, size in counts.items():
        assert size == (p ** w.length) * b
    bld = sl.building()
    w0 = sl.system.parabolic_info().longest
    for c in bld.chambers(1)[:3]:
        assert len(bld.opposites(c)) == p ** w0.length


def test_birkhoff_examples(sl3_2):
    assert sl3_2.birkhoff_decompose(pf.identity(3)).w.is_identity()
    strictly_lower = pf.mat([[1, 0, 0], [1, 1, 0], [0, 1, 1]], 2)
    assert sl3_2.birkhoff_decompose(strictly_lower).w.is_identity()
    anti = pf.mat([[0, 0, 1], [0, -1, 0], [1, 0, 0]], 2)
    w0 = sl3_2.system.parabolic_info().longest
    assert sl3_2.birkhoff_decompose(anti).w == w0


def test_birkhoff_witness_shapes(sl2_3):
    for g in sl2_3.group():
        wit = sl2_3.birkhoff_decompose(g)
        assert pf.is_lower(wit.lower) and pf.is_upper(wit.upper)


def test_bruhat_minus_consistency(sl2_3):
    # B_- w B_- cells also partition the group, with the same cell sizes
    from collections import Counter

    counts = Counter(
        sl2_3.perm_element(bruhat_minus_perm(g, sl2_3.p)) for g in sl2_3.group()
    )
    assert counts[sl2_3.system.identity()] == len(sl2_3.borel(-1))
    assert sum(counts.values()) == 24


# ---------------------------------------------------------------------------
# big cell and the normalization maps


def test_ult_factor_unitriangular(sl2_3):
    x = pf.mat([[1, 2], [0, 1]], 3)
    u, t, l = sl2_3.ult_factor(x)
    assert (u, t, l) == (x, pf.identity(2), pf.identity(2))
    y = pf.mat([[1, 0], [2, 1]], 3)
    u, t, l = sl2_3.ult_factor(y)
    assert (u, t, l) == (pf.identity(2), pf.identity(2), y)


def test_ult_factor_not_in_big_cell(sl2_3):
    with pytest.raises(NotInBigCell):
        sl2_3.ult_factor(pf.mat([[0, 1], [-1, 0]], 3))


def test_ult_factor_bijection(sl2_3):
    # x = u_+ t u_- is a bijection U_+ x T x U_- -> B_+ B_-
    cell = [g for g in sl2_3.group() if sl2_3.in_big_cell(g)]
    seen = set()
    for x in cell:
        u, t, l = sl2_3.ult_factor(x)
        assert pf.is_upper_unitriangular(u)
        assert pf.is_diagonal(t)
        assert pf.is_lower_unitriangular(l)
        seen.add((u, t, l))
    assert len(seen) == len(cell)
    expected = len(sl2_3.unipotent(1)) * len(sl2_3.torus()) * len(sl2_3.unipotent(-1))
    assert len(cell) == expected


def test_rho_identity_is_pi(sl2_3):
    e = sl2_3.system.identity()
    for x in sl2_3.group():
        if sl2_3.in_big_cell(x):
            assert sl2_3.rho_w(e, x) == sl2_3.pi_map(x)


def test_rho_at_representative(sl3_2):
    for w in sl3_2.system.elements_upto(3):
        assert sl3_2.rho_w(w, sl3_2.w_hat(w)) == pf.identity(3)


def test_rho_wrong_cell(sl2_3):
    s = sl2_3.system.generator(0)
    with pytest.raises(WrongCell):
        sl2_3.rho_w(s, pf.identity(2))


def test_rho_membership_exhaustive(sl2_3, sl3_2):
    # x in B_+ w_hat rho_w(x) for every group element in its cell
    for sl in (sl2_3, sl3_2):
        for x in sl.group():
            # the B_+ w B_- cell of x
            w = sl.system.inverse(
                sl.perm_element(birkhoff_perm(pf.mat_inv(x, sl.p), sl.p))
            )
            rho = sl.rho_w(w, x)
            recon = pf.mat_mul(sl.w_hat(w), rho, sl.p)
            quotient = pf.mat_mul(x, pf.mat_inv(recon, sl.p), sl.p)
            assert pf.is_upper(quotient)


# ---------------------------------------------------------------------------
# chambers and the building model


def test_canonical_forms_classify_cosets(sl2_3):
    # same canonical form iff same coset of B_+
    for g in sl2_3.group():
        for b in sl2_3.borel(1):
            gb = pf.mat_mul(g, b, sl2_3.p)
            assert sl2_3.canon_plus(gb) == sl2_3.canon_plus(g)
    reps = {sl2_3.canon_plus(g) for g in sl2_3.group()}
    assert len(reps) == 24 // len(sl2_3.borel(1))


def test_sl_rep_in_coset(sl3_2):
    bld = sl3_2.building()
    for c in bld.chambers(1):
        rep = sl3_2.sl_rep(c)
        assert pf.det(rep, sl3_2.p) == 1
        assert sl3_2.canon_plus(rep) == c.key


def test_chamber_counts(bld3_2):
    assert len(bld3_2.chambers(1)) == 21
    assert len(bld3_2.chambers(-1)) == 21


def test_standard_borels_opposite(sl2_3):
    bld = sl2_3.building()
    cp = sl2_3.chamber(1, pf.identity(2))
    cm = sl2_3.chamber(-1, pf.identity(2))
    assert bld.codist(cp, cm).is_identity()
    assert bld.dist(cp, cp).is_identity()


def test_chamber_distance_matches_tables(sl2_3):
    bld = sl2_3.building()
    both = bld.chambers(1) + bld.chambers(-1)
    for c in both:
        for d in both:
            assert sl2_3.chamber_distance(c, d) == bld.wdist(c, d)


def test_codistance_method_matches_building_tables(sl2_3):
    # the formula-path codistance and the precomputed tables are two
    # independent code paths
    bld = sl2_3.building()
    for c_plus in bld.chambers(1):
        for c_minus in bld.chambers(-1):
            assert sl2_3.codistance(c_plus, c_minus) == bld.codist(c_plus, c_minus)
            assert sl2_3.codistance_mp(c_minus, c_plus) == bld.codist(c_minus, c_plus)


def test_roundtrip_export_sl3_2(sl3_2):
    from twinbuild.buildings import check_axioms as axioms
    from twinbuild.buildings import export_model, import_model

    rebuilt = import_model(export_model(sl3_2.building()))
    assert axioms(rebuilt).passed


def test_codistance_table_sl2_2():
    sl = SpecialLinearTwin(2, 2)
    bld = sl.building()
    for c in bld.chambers(1):
        opposite = [d for d in bld.chambers(-1) if bld.codist(c, d).is_identity()]
        assert len(opposite) == 2  # q opposite chambers per chamber


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (2, 5), (3, 2)])
def test_axioms_pass(n, p):
    result = check_axioms(SpecialLinearTwin(n, p).building())
    assert result.passed, result.witness


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (2, 5), (3, 2), (3, 3)])
def test_lemma_suite_all_models(n, p):
    from twinbuild.buildings import (
        check_codistance_subword_bound,
        check_common_opposites,
        check_coprojection_agreement,
        check_opposition_witness,
    )

    bld = SpecialLinearTwin(n, p).building()
    for checker in (
        check_coprojection_agreement,
        check_common_opposites,
        check_codistance_subword_bound,
        check_opposition_witness,
    ):
        result = checker(bld)
        assert result.passed and not result.skipped, (n, p, result.witness)


def test_building_proj_agrees_with_bruteforce(bld3_2):
    # generic gate computation vs direct minimization on every panel
    for c in bld3_2.chambers(1):
        for s in range(2):
            for d in bld3_2.chambers(1):
                residue = panel_residue(bld3_2, d, s)
                gate = proj(bld3_2, residue, c)
                best = min(bld3_2.dist(c, x).length for x in residue.chambers)
                winners = [
                    x for x in residue.chambers
                    if bld3_2.dist(c, x).length == best
                ]
                assert winners == [gate]


def test_coproj_formula_matches_bruteforce(bld3_2, sl3_2):
    count = 0
    for c_plus in bld3_2.chambers(1):
        for c_minus in bld3_2.chambers(-1):
            w = bld3_2.codist(c_plus, c_minus)
            for s in range(2):
                ws = sl3_2.system.times_gen(w, s, "right")
                if ws.length < w.length:
                    with pytest.raises(LengthCondition):
                        sl3_2.coproj_formula(c_plus, c_minus, s)
                    continue
                got = sl3_2.coproj_formula(c_plus, c_minus, s)
                expect = coproj_panel(bld3_2, c_minus, s, c_plus)
                assert got == expect
                count += 1
    assert count > 0


def test_coproj_formula_representative_independence(sl2_3):
    # the output coset must not depend on the chosen coset representatives
    bld = sl2_3.building()
    g0 = pf.identity(2)
    c_plus = sl2_3.chamber(1, g0)
    for h0 in sl2_3.group():
        c_minus = sl2_3.chamber(-1, h0)
        w = bld.codist(c_plus, c_minus)
        ws = sl2_3.system.times_gen(w, 0, "right")
        if ws.length < w.length:
            continue
        base = sl2_3.coproj_formula(c_plus, c_minus, 0)
        for b_plus in sl2_3.borel(1)[:4]:
            for b_minus in sl2_3.borel(-1)[:4]:
                alt = sl2_3.coproj_formula_reps(
                    pf.mat_mul(g0, b_plus, sl2_3.p),
                    pf.mat_mul(h0, b_minus, sl2_3.p),
                    0,
                )
                assert alt == base


def test_coproj_formula_torus_twisted_representatives():
    # replacing s_hat by s_hat * t (hence w_hat by a torus-twisted
    # monomial) leaves the output coset unchanged
    class Twisted(SpecialLinearTwin):
        def s_hat(self, i):
            twist = pf.mat([[2, 0], [0, 3]], 5)  # non-central torus element
            return pf.mat_mul(SpecialLinearTwin.s_hat(self, i), twist, 5)

    plain = SpecialLinearTwin(2, 5)
    twisted = Twisted(2, 5)
    bld = plain.building()
    for c_plus in bld.chambers(1):
        for c_minus in bld.chambers(-1):
            w = bld.codist(c_plus, c_minus)
            if plain.system.times_gen(w, 0, "right").length < w.length:
                continue
            a = plain.coproj_formula(c_plus, c_minus, 0)
            b = twisted.coproj_formula(
                twisted.chamber(1, plain.sl_rep(c_plus)),
                twisted.chamber(-1, plain.sl_rep(c_minus)),
                0,
            )
            assert a.key == b.key


# ---------------------------------------------------------------------------
# Lang map


def test_borel_orbits_are_codistance_strata(sl2_3):
    # the B_- orbits on the plus half coincide with the codistance strata
    # around the standard minus chamber
    bld = sl2_3.building()
    base = sl2_3.chamber(-1, pf.identity(2))
    orbits = {}
    for c in bld.chambers(1):
        orbit = frozenset(
            sl2_3.chamber(1, pf.mat_mul(b, sl2_3.sl_rep(c), sl2_3.p))
            for b in sl2_3.borel(-1)
        )
        orbits[c] = orbit
    from twinbuild.buildings import stratification

    strat = stratification(bld, base)
    strata_sets = {frozenset(v) for v in strat.strata.values()}
    assert set(orbits.values()) == strata_sets


def test_flip_swaps_borels(sl2_3):
    report = sl2_3.flip_lang()
    assert report.elements_checked == 24


def test_flip_not_swapping(sl2_3):
    with pytest.raises(NotSwapping):
        sl2_3.flip_lang(theta=lambda g: g)


def test_flip_strata_sl2_2():
    # tau(g) = g^T g over all 6 elements; strata counted on the 3 chambers
    sl = SpecialLinearTwin(2, 2)
    report = sl.flip_lang()
    e = sl.system.identity()
    s = sl.system.generator(0)
    assert report.strata_sizes == {e: 2, s: 1}
    assert report.cod == frozenset({e, s})


# ---------------------------------------------------------------------------
# RGD and BN axioms


def test_rgd_suite_sl3_2(sl3_2):
    for result in rgd_axiom_check(sl3_2, bounded_k=3):
        assert result.passed, (result.name, result.witness)


def test_rgd_failure_detected(sl2_3):
    # deleting the negative root group breaks the generation axiom
    gens = [sl2_3.x_root((0, 1), t) for t in range(1, 3)]
    closure = pf.mulclose(gens, sl2_3.p)
    assert len(closure) < len(sl2_3.group())


def test_mu_conjugation_permutes_root_groups(sl2_3):
    m = sl2_3.mu(0, 1)
    minv = pf.mat_inv(m, sl2_3.p)
    plus = set(sl2_3.root_group((0, 1)))
    minus = set(sl2_3.root_group((1, 0)))
    conj = {pf.mat_mul(m, pf.mat_mul(x, minv, sl2_3.p), sl2_3.p) for x in plus}
    assert conj == minus


def test_ordered_products(sl3_2):
    result = check_ordered_unipotent_products(sl3_2)
    assert result.passed, result.witness


def test_bounded_products_sl3_2(sl3_2):
    result = check_bounded_products(sl3_2, kmax=3)
    assert result.passed, result.witness
