"""Polar terms of weight-0 forms and the three polarity statistics.

A term q^n y^l of an index-m form has polarity l^2 - 4mn.  With coefficients
depending only on the residue of l mod 2m and the polarity, the polar terms
are canonically indexed by 1 <= l <= m, n >= 0.  Ordering a basis's polar
coefficients by descending polarity and eliminating, the polarity of the
column where the rank reaches the full space dimension is the smallest
maximal polarity any nonzero form can achieve.  A counting bound compares
the number of strictly-more-polar terms against the dimension and is cheap
enough to scan to index 1000.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from wjforms.exactla import ExactMatrix, rank_profile
from wjforms.forms import weight0_basis


class FormulaMismatch(Exception):
    """Closed-form polar count disagreed with direct enumeration."""


@dataclass(frozen=True)
class PolarTerm:
    n: int
    l: int
    polarity: int


def enumerate_polar_terms(m: int) -> list[PolarTerm]:
    """All (n, l) with 1 <= l <= m and l^2 > 4mn, most polar first."""
    if m < 1:
        raise ValueError("index must be positive")
    out = []
    for l in range(1, m + 1):
        for n in range(0, (l * l - 1) // (4 * m) + 1):
            out.append(PolarTerm(n, l, l * l - 4 * m * n))
    out.sort(key=lambda t: (-t.polarity, -t.l))
    return out


def jacobi_dim(m: int) -> int:
    """Dimension of the weight-0 index-m space: monomials with a+2b+3c = m."""
    if m < 0:
        raise ValueError("index must be nonnegative")
    count = 0
    for c in range(m // 3 + 1):
        count += (m - 3 * c) // 2 + 1
    return count


def _ceil_sqrt(x: int) -> int:
    if x <= 0:
        return 0
    s = isqrt(x)
    return s if s * s == x else s + 1


def _count_formula(m: int, threshold: int) -> int:
    total = 0
    for l in range(max(1, _ceil_sqrt(threshold)), m + 1):
        d = l * l - threshold
        if d > 0:
            total += -(-d // (4 * m))
    return total


def count_polar_above(m: int, threshold: int) -> int:
    """Number of polar terms with polarity strictly greater than threshold.

    Computed both by direct enumeration and by the ceiling-sum formula; a
    disagreement means a convention bug, so it is a hard error.
    """
    direct = sum(1 for t in enumerate_polar_terms(m) if t.polarity > threshold)
    formula = _count_formula(m, threshold)
    if direct != formula:
        raise FormulaMismatch(
            f"m={m} threshold={threshold}: enumeration {direct} vs formula {formula}"
        )
    return direct


def polarity_lower_bound(m: int) -> int:
    """ceil(m/6): polar terms down to this polarity determine the form."""
    if m < 1:
        raise ValueError("index must be positive")
    return -(-m // 6)


def polarity_upper_bound(m: int) -> int:
    """Smallest threshold whose strictly-more-polar terms number below the
    space dimension, so killing them all still leaves a nonzero form."""
    if m < 1:
        raise ValueError("index must be positive")
    j = jacobi_dim(m)
    lo, hi = 1, m * m
    # count is non-increasing in the threshold; find the first value where
    # it drops below j
    if _count_formula(m, lo) < j:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _count_formula(m, mid) < j:
            hi = mid
        else:
            lo = mid
    return hi


def min_polar_order(m: int) -> int:
    """Smallest expansion order exposing every polar coefficient."""
    return (m * m - 1) // (4 * m) + 1


def min_max_polarity(m: int, order: int | None = None, cache_dir: str | None = None) -> int:
    """Smallest maximal polarity over nonzero weight-0 index-m forms.

    One fraction-free elimination pass over the basis-by-polar-term matrix,
    columns sorted by descending polarity: the pivot that completes the rank
    sits in the polarity group where forms first fail to exist below it.
    """
    if order is None:
        order = min_polar_order(m)
    if order < min_polar_order(m):
        raise ValueError(f"order {order} does not expose all polar terms of index {m}")
    basis = weight0_basis(m, order, cache_dir)
    terms = enumerate_polar_terms(m)
    j = len(basis)
    matrix = ExactMatrix(
        [[f.coeff(t.n, t.l) for t in terms] for _, f in basis]
    )
    pivots = rank_profile(matrix)
    if len(pivots) < j:
        raise InvariantError(
            f"polar coefficients of index {m} only reach rank {len(pivots)} < {j}"
        )
    return terms[pivots[j - 1]].polarity


class InvariantError(Exception):
    """The polar coefficient matrix failed to determine the space."""
