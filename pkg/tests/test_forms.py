"""Building blocks: eta, thetas, generators, basis, coefficient tables."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from wjforms.forms import (
    CoefficientFunction,
    InvariantViolation,
    JacobiForm,
    ResiduePermutation,
    basis_exponents,
    combine_basis,
    eta,
    jacobi_theta,
    permute_residues,
    theta1,
    theta_block,
    weight0_basis,
    weight0_generator,
    weight_minus2_index1,
)
from wjforms.qseries import BeyondTruncation, BiSeries


def pentagonal_eta_coeffs(count):
    """Independent oracle: eta's q^(k+1/24) coefficients via the pentagonal
    number theorem."""
    out = [0] * count
    j = 0
    while j * (3 * j - 1) // 2 < count:
        for jj in (j, -j) if j else (0,):
            k = jj * (3 * jj - 1) // 2
            if 0 <= k < count:
                out[k] = (-1) ** jj
        j += 1
    return out


def test_eta_matches_pentagonal_oracle():
    e = eta(40)
    got = [e.coeff_at(Fraction(k) + Fraction(1, 24)) for k in range(40)]
    assert got == pentagonal_eta_coeffs(40)


def test_eta_power_24_is_integral():
    e24 = eta(5) ** 24
    assert all(qn % 24 == 0 for qn, _ in e24.terms)


def test_theta1_leading_terms():
    t = theta1(1, 3)
    assert t.y_slice(Fraction(1, 8)) == {Fraction(-1, 2): -1, Fraction(1, 2): 1}


def test_theta1_scaled_quotient_leading():
    q = theta1(4, 8).div_exact(theta1(2, 8))
    assert q.y_slice(0) == {Fraction(-1): 1, Fraction(1): 1}


def test_theta1_odd_in_y():
    t = theta1(3, 6)
    assert t.map_y_negate().terms == {k: -v for k, v in t.terms.items()}


def test_jacobi_theta_z0_values():
    _, t3 = jacobi_theta(3, 5)
    assert t3.coeff_at(0) == 1
    assert t3.coeff_at(Fraction(1, 2)) == 2
    assert t3.coeff_at(2) == 2
    _, t4 = jacobi_theta(4, 5)
    assert t4.coeff_at(Fraction(1, 2)) == -2
    tz2, t02 = jacobi_theta(2, 5)
    assert t02.coeff_at(Fraction(1, 8)) == 2
    assert tz2.coeff_at(Fraction(1, 8), Fraction(1, 2)) == 1


GENERATOR_Q0 = {1: {-1: 1, 0: 10, 1: 1}, 2: {-1: 1, 0: 4, 1: 1}, 3: {-1: 1, 0: 2, 1: 1}}


@pytest.mark.parametrize("k", [1, 2, 3])
def test_generator_constant_terms(k):
    g = weight0_generator(k, 4)
    assert {int(y): c for y, c in g.series.y_slice(0).items()} == GENERATOR_Q0[k]
    g.validate()


def test_weight_minus2_form():
    w = weight_minus2_index1(6)
    assert {int(y): c for y, c in w.series.y_slice(0).items()} == {-1: 1, 0: -2, 1: 1}
    assert w.coeff(0, 1) == 1
    assert all(w.coeff(n, l) == w.coeff(n, -l) for n in range(3) for l in range(5))


def test_basis_enumeration():
    assert basis_exponents(3) == [(3, 0, 0), (1, 1, 0), (0, 0, 1)]
    assert len(basis_exponents(1)) == 1
    # lattice-point oracle
    count = sum(
        1
        for a in range(7)
        for b in range(4)
        for c in range(3)
        if a + 2 * b + 3 * c == 6
    )
    assert len(basis_exponents(6)) == count == 7


def test_basis_invariants_small():
    for m in range(1, 7):
        for _, f in weight0_basis(m, 8):
            f.validate()


def test_generator_product_equals_basis_monomial():
    g1 = weight0_generator(1, 8)
    g2 = weight0_generator(2, 8)
    mono = dict(weight0_basis(3, 8))[(1, 1, 0)]
    assert (g1.series * g2.series).truncate(8) == mono.series


def test_coeff_reduction():
    g = weight0_generator(1, 6)
    assert g.coeff(1, 3) == 0  # polarity 5 > 1
    assert g.coeff(2, 3) == g.coeff(0, 1) == 1
    assert g.coeff(0, -1) == 1
    with pytest.raises(BeyondTruncation):
        g.coeff(10, 1)


def test_coefficient_function_roundtrip():
    g = weight0_generator(1, 8)
    cf = g.to_coefficient_function()
    assert cf.value(1, 1) == 1
    for (n, l), c in g.series.terms.items():
        assert cf.value(l % 2, l * l - 4 * n) == c
    with pytest.raises(BeyondTruncation):
        cf.value(0, cf.known_min - 4)


def test_corrupted_series_rejected():
    g = weight0_generator(1, 6)
    broken = dict(g.series.terms)
    broken[(2, 3)] = broken.get((2, 3), 0) + 1  # breaks the class function
    bad = JacobiForm(0, 1, BiSeries(broken, 6, 1, 1), 6)
    with pytest.raises(InvariantViolation):
        bad.validate()
    with pytest.raises(InvariantViolation):
        bad.to_coefficient_function()


def test_theta_decomposition_leading():
    g = weight0_generator(1, 8)
    comps = g.theta_components()
    assert comps[1].q_min() == Fraction(-1, 4)
    assert comps[1].coeff_at(Fraction(-1, 4)) == 1
    # symmetry h_mu = h_{2m - mu}
    assert comps[1].terms == comps[1 % 2].terms


def test_theta_decomposition_reconstructs():
    rng = random.Random(11)
    pool = [(m, abc) for m in range(1, 7) for abc, _ in weight0_basis(m, 8)]
    for m, abc in rng.sample(pool, 20):
        f = dict(weight0_basis(m, 8))[abc]
        rec = None
        for mu, h in enumerate(f.theta_components()):
            if not h.terms:
                continue
            piece = h * theta_block(m, mu, Fraction(8))
            rec = piece if rec is None else rec + piece
        got = {k: v for k, v in rec.terms_canonical().items() if k[0] < 6}
        want = {k: v for k, v in f.series.terms_canonical().items() if k[0] < 6}
        assert got == want, (m, abc)


def test_theta_components_symmetry():
    for m in (2, 5):
        for _, f in weight0_basis(m, 8):
            comps = f.theta_components()
            for mu in range(1, 2 * m):
                assert comps[mu].terms == comps[2 * m - mu].terms


def test_residue_permutation_basics():
    sigma = ResiduePermutation.from_cycles(6, [(1, 5), (2, 10), (4, 8), (7, 11)])
    assert sigma(1) == 5 and sigma(5) == 1 and sigma(0) == 0
    assert sigma.inverse().images == sigma.images  # involution
    assert all(sigma(mu) == (5 * mu) % 12 for mu in range(12))
    with pytest.raises(ValueError):
        ResiduePermutation(2, (0, 0, 1, 2))


def phi6(order):
    series = theta1(4, order + 2).div_exact(theta1(2, order + 2))
    return JacobiForm(0, 6, series.truncate(order).normalize_integral(), order)


def test_identity_permutation_fixes_table():
    f = phi6(10)
    cf = f.to_coefficient_function()
    assert permute_residues(f, ResiduePermutation.identity(6)).same_table(cf)


def test_level3_involution_negates_phi6():
    f = phi6(12)
    sigma = ResiduePermutation.from_cycles(6, [(1, 5), (2, 10), (4, 8), (7, 11)])
    hat = permute_residues(f, sigma)
    assert hat.same_table(f.to_coefficient_function().negated())
    # applying the involution twice restores the table
    assert permute_residues(hat, sigma).same_table(f.to_coefficient_function())


def test_combine_basis():
    f = combine_basis(2, 6, [1, 0])
    g1 = weight0_generator(1, 6)
    assert f.series == (g1.series * g1.series).truncate(6)
    with pytest.raises(ValueError):
        combine_basis(2, 6, [1])
