"""Polar term counting and the polarity statistics."""

from __future__ import annotations

import pytest

from wjforms.polarity import (
    FormulaMismatch,
    PolarTerm,
    count_polar_above,
    enumerate_polar_terms,
    jacobi_dim,
    min_max_polarity,
    min_polar_order,
    polarity_lower_bound,
    polarity_upper_bound,
)


def brute_polar_terms(m):
    return {
        (n, l)
        for l in range(1, m + 1)
        for n in range(0, l * l)
        if l * l - 4 * m * n > 0
    }


def test_enumeration_examples():
    assert enumerate_polar_terms(1) == [PolarTerm(0, 1, 1)]
    assert len(enumerate_polar_terms(6)) == 8
    assert enumerate_polar_terms(6)[0].polarity == 36  # (0, m) leads


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8, 13, 21])
def test_enumeration_matches_brute_force(m):
    got = {(t.n, t.l) for t in enumerate_polar_terms(m)}
    assert got == brute_polar_terms(m)
    pols = [t.polarity for t in enumerate_polar_terms(m)]
    assert pols == sorted(pols, reverse=True)


def test_dimension_examples():
    assert jacobi_dim(0) == 1
    assert jacobi_dim(1) == 1
    assert jacobi_dim(6) == 7


def test_count_examples():
    assert count_polar_above(6, 1) == 6
    assert count_polar_above(6, 0) == 8
    assert count_polar_above(1, 1) == 0


@pytest.mark.parametrize("m", range(1, 61, 7))
def test_count_dual_route_and_monotone(m):
    prev = None
    for p in range(0, m * m + 1, max(1, m // 3)):
        c = count_polar_above(m, p)  # raises FormulaMismatch on disagreement
        if prev is not None:
            assert c <= prev
        prev = c
    assert count_polar_above(m, m * m) == 0


def test_upper_bound_examples():
    assert polarity_upper_bound(1) == 1
    assert polarity_upper_bound(6) == 1
    assert polarity_upper_bound(54) == 25


def test_lower_bound_examples():
    assert polarity_lower_bound(6) == 1
    assert polarity_lower_bound(54) == 9
    assert polarity_lower_bound(1) == 1


def test_min_max_polarity_small():
    assert min_max_polarity(1) == 1
    assert min_max_polarity(6) == 1


def test_min_max_polarity_order_guard():
    with pytest.raises(ValueError):
        min_max_polarity(8, order=1)
    assert min_polar_order(8) == 2


@pytest.mark.parametrize("m", range(1, 21))
def test_bound_sandwich(m):
    p = min_max_polarity(m)
    assert polarity_lower_bound(m) <= p <= polarity_upper_bound(m)
    assert p == polarity_upper_bound(m)  # no exceptions this low
