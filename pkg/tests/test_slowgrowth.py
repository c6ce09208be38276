"""Slow-growth spaces, anchored sums, specializations, classification."""

from __future__ import annotations

from fractions import Fraction

import pytest

from wjforms.forms import combine_basis, weight0_basis, weight0_generator, JacobiForm
from wjforms.polarity import enumerate_polar_terms, jacobi_dim, min_polar_order
from wjforms.qseries import BeyondTruncation
from wjforms.slowgrowth import (
    CycloSeries,
    GrowthClass,
    PolarAnchor,
    anchor_sum,
    best_slow_dim_lower_bound,
    classify_growth,
    conjectured_slow_dimension,
    cyclotomic_polynomial,
    form_is_alpha_slow,
    grid_points,
    has_unit_anchor_form,
    irregularity_margin,
    reduce_mod_cyclotomic,
    required_order,
    sector_generating_series,
    slow_dim_lower_bound,
    slow_space_dimension,
    slow_space_vectors,
    specializations_regular,
    torsion_specialization,
    transfer_identity_holds,
)


def slow_phi6(order):
    v = slow_space_vectors(6, 1)[0]
    combo = combine_basis(6, order, v)
    return JacobiForm(0, 6, combo.series.div_scalar_exact(combo.coeff(0, 1)), order)


def test_margin_reference_points():
    assert irregularity_margin(1, 1, 0, 1) == 0
    assert irregularity_margin(6, 1, 0, 1) == 0
    assert irregularity_margin(6, 2, 0, 5) == 1


def test_dimension_spot_values():
    assert slow_space_dimension(1, 1) == 1
    assert slow_space_dimension(17, 3) == 0
    assert slow_space_dimension(24, 4) == 4


def test_nullspace_vectors_satisfy_their_constraints():
    for m, b in [(4, 2), (6, 1), (9, 3), (12, 2)]:
        order = min_polar_order(m)
        for v in slow_space_vectors(m, b):
            f = combine_basis(m, order, v)
            for t in enumerate_polar_terms(m):
                if f.coeff(t.n, t.l):
                    assert t.polarity <= b * b
                    assert irregularity_margin(m, b, t.n, t.l) <= 0


def test_unit_anchor():
    assert has_unit_anchor_form(1, 0, 1)
    assert has_unit_anchor_form(24, 0, 4)


def test_lower_bound_examples():
    assert slow_dim_lower_bound(6, 1) == 1
    assert slow_dim_lower_bound(1, 1) == 1
    assert best_slow_dim_lower_bound(41) <= 0


def test_anchor_sum_examples():
    phi = slow_phi6(12)
    cf = phi.to_coefficient_function()
    assert anchor_sum(cf, PolarAnchor(6, 0, 1), 0, 0) == 2
    assert anchor_sum(cf, PolarAnchor(6, 0, 1), 1, 1) == 0
    assert anchor_sum(cf, PolarAnchor(6, 1, 5), 1, -2) == -2


def test_anchor_sum_respects_truncation():
    phi = slow_phi6(6)
    cf = phi.to_coefficient_function()
    with pytest.raises(BeyondTruncation):
        anchor_sum(cf, PolarAnchor(6, 0, 1), 4, 12)


def test_anchor_sum_against_brute_force():
    """Oracle: scan a generous window and use raw series coefficients."""
    phi = slow_phi6(40)
    cf = phi.to_coefficient_function()
    for (a, b, n, l) in [(0, 1, 2, 3), (0, 1, 0, -5), (1, 5, 1, -2), (1, 5, 0, 3)]:
        direct = 0
        for r in range(-200, 201):
            nn = n * r + a * r * r
            ll = l - b * r
            if nn < 0 or ll * ll - 24 * nn > 36:
                continue
            direct += phi.coeff(nn, ll)
        assert anchor_sum(cf, PolarAnchor(6, a, b), n, l) == direct


def test_required_order_is_sufficient_and_tight():
    anchor = PolarAnchor(6, 1, 5)
    pts = [(1, -2), (2, 3)]
    need = required_order(anchor, pts)
    phi = slow_phi6(need)
    cf = phi.to_coefficient_function()
    for (n, l) in pts:
        anchor_sum(cf, anchor, n, l)  # should not raise


def test_classification_slow_and_fast():
    g1 = weight0_generator(1, required_order(PolarAnchor(1, 0, 1), grid_points(3, 2)))
    sample = classify_growth(g1.to_coefficient_function(), PolarAnchor(1, 0, 1))
    assert sample.classification is GrowthClass.SLOW
    assert all(v == 12 for (n, l, v) in sample.grid if v)
    need = required_order(PolarAnchor(2, 0, 2), grid_points(3, 4))
    g1 = weight0_generator(1, need)
    sq = JacobiForm(0, 2, (g1.series * g1.series).truncate(need), need)
    fast = classify_growth(sq.to_coefficient_function(), PolarAnchor(2, 0, 2))
    assert fast.classification is GrowthClass.FAST


def test_slow_support_lines():
    phi = slow_phi6(need := required_order(PolarAnchor(6, 0, 1), grid_points(3, 12)))
    sample = classify_growth(phi.to_coefficient_function(), PolarAnchor(6, 0, 1))
    assert sample.classification is GrowthClass.SLOW
    assert len(sample.lines) <= 2
    line_set = set(sample.lines)
    for (n, l, v) in sample.grid:
        if v and (n, l) != (0, 0):
            assert any(e * n + f * l == 0 for (e, f) in line_set)


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == [-1, 1]
    assert cyclotomic_polynomial(2) == [1, 1]
    assert cyclotomic_polynomial(4) == [1, 0, 1]
    assert cyclotomic_polynomial(6) == [1, -1, 1]
    assert reduce_mod_cyclotomic([1, 1], 2) == [0]  # 1 + x dies at x = -1


def test_specialization_constants():
    g1 = weight0_generator(1, 12)
    chi = torsion_specialization(g1, 1, 0, 0)
    assert chi.terms == {0: (12,)}
    phi = slow_phi6(12)
    chi6 = torsion_specialization(phi, 1, 0, 0)
    assert chi6.terms == {0: (2,)}
    assert chi6.regular_at_zero()


def test_margin_test_implies_regularity():
    # the solid direction: no positive-margin polar term => every torus
    # specialization is regular at q = 0 (equivalently, irregularity always
    # names a positive-margin culprit)
    for m in range(1, 9):
        for _, f in weight0_basis(m, max(min_polar_order(m) + 4, 12)):
            for b in (1, 2):
                if form_is_alpha_slow(f, b):
                    assert specializations_regular(f, b), (m, b)


def test_margin_converse_fails_by_exact_cancellation():
    # The converse is loose: at index 5 the monomial with exponents (2,0,1)
    # carries positive-margin terms q^0 y^3 and q^1 y^5 whose contributions
    # to every specialization cancel exactly (1 - 2 + 1 = 0), so all its
    # specializations are regular and its sums about y^2 stay bounded.
    f = dict(weight0_basis(5, 12))[(2, 0, 1)]
    assert not form_is_alpha_slow(f, 2)
    assert specializations_regular(f, 2)


def test_sector_series_constant_for_slow_forms():
    g1 = weight0_generator(1, 14)
    F = sector_generating_series(g1, 1, 0, 0)
    assert [F.coeff_at(k) for k in range(10)] == [12] + [0] * 9
    phi = slow_phi6(14)
    F6 = sector_generating_series(phi, 1, 0, 0)
    assert [F6.coeff_at(k) for k in range(10)] == [2] + [0] * 9


def test_sector_series_b2():
    # index-4 slow form about y^2; the sector average must clear to integers
    vecs = slow_space_vectors(4, 2)
    assert len(vecs) == 2
    f = combine_basis(4, 16, vecs[0])
    F = sector_generating_series(f, 2, 0, 0)
    assert all(isinstance(c, int) for c in F.terms.values())


def test_transfer_single_point():
    phi = slow_phi6(need := required_order(PolarAnchor(6, 1, 5), [(0, 0)]))
    cf = phi.to_coefficient_function()
    from wjforms.forms import ResiduePermutation, permute_residues

    sigma = ResiduePermutation.from_cycles(6, [(1, 5), (2, 10), (4, 8), (7, 11)])
    hat = permute_residues(cf, sigma)
    assert anchor_sum(cf, PolarAnchor(6, 1, 5), 0, 0) == anchor_sum(
        hat, PolarAnchor(6, 0, 1), 0, 0
    )


def test_growth_sample_values_are_the_defining_sums():
    phi = slow_phi6(required_order(PolarAnchor(6, 0, 1), grid_points(2, 6)))
    sample = classify_growth(phi.to_coefficient_function(), PolarAnchor(6, 0, 1), 2, 6)
    for (n, l, v) in sample.grid:
        direct = 0
        for r in range(-150, 151):
            nn, ll = n * r, l - r
            if nn >= 0 and ll * ll - 24 * nn <= 36:
                direct += phi.coeff(nn, ll)
        assert v == direct


def test_conjectured_dimension_small():
    dim, samples = conjectured_slow_dimension(5, 1, 5, l_max=10)
    assert dim == 1
    assert samples[0].classification is GrowthClass.SLOW
