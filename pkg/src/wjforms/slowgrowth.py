"""Growth of anchored coefficient sums around a polar term q^a y^b.

For a polar anchor the sum f(n, l) = sum_r c(n r + a r^2, l - b r) is finite
because coefficients vanish above polarity m^2.  Whether these sums stay
bounded is decided, for a = 0, by an exact rational criterion: a polar term
q^n y^l forces a singular torus-point specialization exactly when its
irregularity margin is positive.  The space of forms with no such term and
no polarity above b^2 is cut out by integer linear conditions on the basis
coefficients, so its dimension and the reachability of a unit anchor
coefficient reduce to exact nullspace computations.

For a > 0 there is no criterion; growth is sampled on a grid and labelled
Slow / Fast / Inconclusive with fixed thresholds, and dimensions obtained
this way are conjectural by construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from wjforms.exactla import ExactMatrix, functional_on_nullspace, nullspace
from wjforms.forms import (
    CoefficientFunction,
    JacobiForm,
    ResiduePermutation,
    combine_basis,
    permute_residues,
    weight0_basis,
)
from wjforms.polarity import enumerate_polar_terms, jacobi_dim, min_polar_order
from wjforms.qseries import BeyondTruncation, BiSeries


class NonIntegralDivision(Exception):
    """A sector series failed to clear to integers; the form is not slow."""


class MismatchWithDirectSum(Exception):
    """Generating-series route disagreed with direct anchored sums."""


FAST_CUTOFF = 1000  # |f| beyond this is treated as exponential growth
# Bounded sums take finitely many values, one per torus sector, so the
# distinct-magnitude allowance grows with the anchor power (at least 2).
SLOW_MAGNITUDES_BASE = 2


@dataclass(frozen=True)
class PolarAnchor:
    """A polar term q^a y^b of an index-m form."""

    index_m: int
    a: int
    b: int

    def __post_init__(self):
        if self.b < 1 or self.a < 0:
            raise ValueError("need b >= 1 and a >= 0")
        if self.polarity <= 0:
            raise ValueError(
                f"q^{self.a} y^{self.b} is not polar for index {self.index_m}"
            )

    @property
    def polarity(self) -> int:
        return self.b * self.b - 4 * self.index_m * self.a


def irregularity_margin(m: int, b: int, n: int, l: int) -> Fraction:
    """Largest q-exponent deficit the term q^n y^l forces on the b torus
    specializations; positive means some specialization is singular at q=0."""
    disc = Fraction(l * l - 4 * m * n, 4 * m)
    best = None
    for j in range(b):
        v = disc - m * (Fraction(j, b) - Fraction(l, 2 * m)) ** 2
        if best is None or v > best:
            best = v
    return best


# -- the exact a = 0 theory --------------------------------------------------


def _slow_constraint_terms(m: int, b: int):
    """Polar terms a slow form about y^b must kill: polarity above b^2 or a
    positive irregularity margin."""
    out = []
    for t in enumerate_polar_terms(m):
        if t.polarity > b * b or irregularity_margin(m, b, t.n, t.l) > 0:
            out.append(t)
    return out


def _coefficient_rows(basis, terms) -> ExactMatrix:
    """Constraint matrix rows = polar terms, columns = basis elements.

    An empty constraint set still needs the column count, hence a zero row.
    """
    if not terms:
        return ExactMatrix([[0] * len(basis)])
    return ExactMatrix([[f.coeff(t.n, t.l) for _, f in basis] for t in terms])


def _constraint_matrix(m: int, b: int, order: int, cache_dir=None) -> ExactMatrix:
    basis = weight0_basis(m, order, cache_dir)
    return _coefficient_rows(basis, _slow_constraint_terms(m, b))


def slow_space_vectors(
    m: int, b: int, order: int | None = None, cache_dir=None
) -> list[list[int]]:
    """Basis-combination vectors spanning the forms slow about q^0 y^b."""
    if order is None:
        order = min_polar_order(m)
    return nullspace(_constraint_matrix(m, b, order, cache_dir))


def slow_space_dimension(m: int, b: int, order: int | None = None, cache_dir=None) -> int:
    return len(slow_space_vectors(m, b, order, cache_dir))


def slow_space_forms(
    m: int, b: int, order: int | None = None, cache_dir=None
) -> list[JacobiForm]:
    if order is None:
        order = min_polar_order(m)
    return [
        combine_basis(m, order, v, cache_dir)
        for v in slow_space_vectors(m, b, order, cache_dir)
    ]


def has_unit_anchor_form(
    m: int, a: int, b: int, order: int | None = None, cache_dir=None
) -> bool:
    """Whether some slow form about q^a y^b has c(a, b) nonzero, i.e. can be
    scaled to anchor coefficient 1."""
    if order is None:
        order = max(min_polar_order(m), a + 1)
    basis = weight0_basis(m, order, cache_dir)
    if a == 0:
        matrix = _constraint_matrix(m, b, order, cache_dir)
    else:
        cap = PolarAnchor(m, a, b).polarity
        terms = [t for t in enumerate_polar_terms(m) if t.polarity > cap]
        matrix = _coefficient_rows(basis, terms)
    functional = [f.coeff(a, b) for _, f in basis]
    return functional_on_nullspace(matrix, functional)


def slow_dim_lower_bound(m: int, b: int) -> int:
    """Space dimension minus the number of constraint terms (may be <= 0)."""
    return jacobi_dim(m) - len(_slow_constraint_terms(m, b))


def best_slow_dim_lower_bound(m: int) -> int:
    """The lower bound at its best y^b anchor, b up to sqrt(m)."""
    return max(slow_dim_lower_bound(m, b) for b in range(1, isqrt(m) + 1))


def form_is_alpha_slow(phi: JacobiForm, b: int) -> bool:
    """No polar term of the form has a positive irregularity margin.

    This is the exact boundedness test for the sums about q^0 y^b; it does
    not ask for the polarity cap b^2, so it matches regularity of all torus
    specializations.
    """
    m = phi.index_m
    for t in enumerate_polar_terms(m):
        if phi.coeff(t.n, t.l) != 0 and irregularity_margin(m, b, t.n, t.l) > 0:
            return False
    return True


# -- anchored coefficient sums -----------------------------------------------


def _window(anchor: PolarAnchor, n: int, l: int, cap: int) -> range:
    """Integer r with summand polarity at most cap (an interval since the
    anchor is polar)."""
    m = anchor.index_m
    qa = anchor.polarity
    qb = 2 * anchor.b * l + 4 * m * n
    qc = l * l - cap
    disc = qb * qb - 4 * qa * qc
    if disc < 0:
        return range(0)
    s = isqrt(disc)
    lo = (qb - s) // (2 * qa) - 1
    hi = (qb + s) // (2 * qa) + 2
    return range(lo, hi + 1)


def _summand_polarity(anchor: PolarAnchor, n: int, l: int, r: int) -> int:
    m = anchor.index_m
    nn = n * r + anchor.a * r * r
    ll = l - anchor.b * r
    return ll * ll - 4 * m * nn


def anchor_sum(src: CoefficientFunction, anchor: PolarAnchor, n: int, l: int) -> int:
    """f(n, l) = sum_r c(n r + a r^2, l - b r), an exact finite sum."""
    if src.index_m != anchor.index_m:
        raise ValueError("anchor and coefficient table have different index")
    cap = src.polarity_cap
    total = 0
    for r in _window(anchor, n, l, cap):
        pol = _summand_polarity(anchor, n, l, r)
        if pol <= cap:
            total += src.value(l - anchor.b * r, pol)
    return total


def required_order(anchor: PolarAnchor, points) -> int:
    """Expansion order that makes every summand class known on the grid."""
    m = anchor.index_m
    cap = m * m
    need = min_polar_order(m)
    for (n, l) in points:
        for r in _window(anchor, n, l, cap):
            pol = _summand_polarity(anchor, n, l, r)
            if pol <= cap:
                this = (m * m - pol + 4 * m - 1) // (4 * m) + 1
                if this > need:
                    need = this
    return need


def grid_points(n_max: int, l_max: int, n_min: int = 0):
    return [(n, l) for n in range(n_min, n_max + 1) for l in range(-l_max, l_max + 1)]


# -- growth classification ----------------------------------------------------


class GrowthClass(enum.Enum):
    SLOW = "slow"
    FAST = "fast"
    INCONCLUSIVE = "inconclusive"


@dataclass
class GrowthSample:
    anchor: PolarAnchor
    grid: list[tuple[int, int, int]]  # (n, l, value)
    classification: GrowthClass
    lines: tuple[tuple[int, int], ...]


def _origin_line(n: int, l: int) -> tuple[int, int]:
    e, f = l, -n
    g = gcd(e, f)
    if g:
        e, f = e // g, f // g
    if e < 0 or (e == 0 and f < 0):
        e, f = -e, -f
    return e, f


def _classify_values(anchor: PolarAnchor, values: dict[tuple[int, int], int]) -> GrowthSample:
    grid = [(n, l, v) for (n, l), v in sorted(values.items())]
    nonzero = {(n, l): v for (n, l), v in values.items() if v and (n, l) != (0, 0)}
    lines = tuple(sorted({_origin_line(n, l) for (n, l) in nonzero}))
    magnitudes = sorted({abs(v) for v in values.values() if v})

    slice_max: dict[int, int] = {}
    for (n, l), v in values.items():
        slice_max[n] = max(slice_max.get(n, 0), abs(v))
    ns = sorted(slice_max)
    rising = any(
        n + 1 in slice_max
        and n + 2 in slice_max
        and slice_max[n] < slice_max[n + 1] < slice_max[n + 2]
        for n in ns
    )
    big = magnitudes and magnitudes[-1] > FAST_CUTOFF

    allowed = max(SLOW_MAGNITUDES_BASE, anchor.b * anchor.b)
    if big and rising:
        cls = GrowthClass.FAST
    elif not big and len(lines) <= 2 and len(magnitudes) <= allowed:
        cls = GrowthClass.SLOW
    else:
        cls = GrowthClass.INCONCLUSIVE
    return GrowthSample(anchor, grid, cls, lines)


def classify_growth(
    src: CoefficientFunction,
    anchor: PolarAnchor,
    n_max: int = 3,
    l_max: int | None = None,
) -> GrowthSample:
    """Sample the anchored sums on a grid and label the growth."""
    if l_max is None:
        l_max = 2 * anchor.index_m
    values = {
        (n, l): anchor_sum(src, anchor, n, l)
        for (n, l) in grid_points(n_max, l_max)
    }
    return _classify_values(anchor, values)


# -- torus-point specializations and sector series ----------------------------


_cyclo_cache: dict[int, list[int]] = {}


def cyclotomic_polynomial(b: int) -> list[int]:
    """Coefficients of the b-th cyclotomic polynomial, low degree first."""
    if b in _cyclo_cache:
        return _cyclo_cache[b]
    poly = [-1] + [0] * (b - 1) + [1]  # x^b - 1
    for d in range(1, b):
        if b % d == 0:
            poly = _poly_divexact_desc(poly, cyclotomic_polynomial(d))
    _cyclo_cache[b] = poly
    return poly


def _poly_divexact_desc(num: list[int], den: list[int]) -> list[int]:
    out = [0] * (len(num) - len(den) + 1)
    rem = list(num)
    for i in range(len(out) - 1, -1, -1):
        c = rem[i + len(den) - 1]
        assert c % den[-1] == 0
        q = c // den[-1]
        out[i] = q
        for j, dj in enumerate(den):
            rem[i + j] -= q * dj
    assert not any(rem)
    return out


def reduce_mod_cyclotomic(vec, b: int) -> list[int]:
    phi = cyclotomic_polynomial(b)
    deg = len(phi) - 1
    rem = list(vec)
    for i in range(len(rem) - 1, deg - 1, -1):
        c = rem[i]
        if c:
            for j in range(len(phi)):
                rem[i - deg + j] -= c * phi[j]
    return rem[:deg]


@dataclass
class CycloSeries:
    """q-series whose coefficients live in Z[x]/(x^b - 1), x a formal b-th
    root of unity; exponents are multiples of 1/q_den."""

    b: int
    q_den: int
    terms: dict[int, tuple[int, ...]]
    q_trunc: Fraction

    def exponents(self) -> list[Fraction]:
        return sorted(Fraction(k, self.q_den) for k in self.terms)

    def coefficient(self, q_exp) -> tuple[int, ...]:
        qe = Fraction(q_exp)
        if qe >= self.q_trunc:
            raise BeyondTruncation(f"q^{qe} past truncation {self.q_trunc}")
        qs = qe * self.q_den
        if qs.denominator != 1:
            return (0,) * self.b
        return self.terms.get(qs.numerator, (0,) * self.b)

    def regular_at_zero(self) -> bool:
        """No genuinely nonzero coefficient at negative exponents.

        Vectors are reduced modulo the b-th cyclotomic polynomial first: an
        element of the quotient ring can be a nonzero vector yet vanish at a
        primitive root of unity.
        """
        for k, vec in self.terms.items():
            if k < 0 and any(reduce_mod_cyclotomic(vec, self.b)):
                return False
        return True


def _ceil_sqrt(x: int) -> int:
    if x <= 0:
        return 0
    s = isqrt(x)
    return s if s * s == x else s + 1


def _specialization_trunc(m: int, order: int, b: int, shift: int) -> Fraction:
    """Safe bound below which the specialized series is fully known."""
    base = Fraction(m * shift * shift, b * b)
    best = None
    for n in range(order, order + 3 * m + 2):
        e = n + base - Fraction(shift * _ceil_sqrt(m * m + 4 * m * n), b)
        if best is None or e < best:
            best = e
    return best


def torsion_specialization(
    phi: JacobiForm, b: int, shift: int, twist: int, order: int | None = None
) -> CycloSeries:
    """q^(m shift^2 / b^2) phi(tau, (shift tau + twist)/b) as a CycloSeries."""
    if not (0 <= shift < b and 0 <= twist < b):
        raise ValueError("shift and twist must lie in [0, b)")
    m = phi.index_m
    if order is None:
        order = phi.order
    trunc = _specialization_trunc(m, order, b, shift)
    limit = trunc * b * b
    acc: dict[int, list[int]] = {}
    for (n, l), c in phi.series.terms.items():
        if n >= order:
            continue
        qn = n * b * b + l * shift * b + m * shift * shift
        if qn >= limit:
            continue
        vec = acc.setdefault(qn, [0] * b)
        vec[(twist * l) % b] += c
    terms = {k: tuple(v) for k, v in acc.items() if any(v)}
    return CycloSeries(b, b * b, terms, trunc)


def specializations_regular(phi: JacobiForm, b: int) -> bool:
    """Regularity at q = 0 of all b^2 torus-point specializations."""
    return all(
        torsion_specialization(phi, b, shift, twist).regular_at_zero()
        for shift in range(b)
        for twist in range(b)
    )


def sector_generating_series(
    phi: JacobiForm, b: int, shift: int, k: int, order: int | None = None
) -> BiSeries:
    """Generating series of the anchored sums about q^0 y^b in one sector.

    Averages the torus specializations against the k-th power of the formal
    root of unity, reduces each coefficient modulo the cyclotomic polynomial
    (it must come out constant), divides by b exactly, and cross-checks the
    result against directly evaluated anchored sums on the overlap.
    """
    m = phi.index_m
    if not 0 <= shift < b:
        raise ValueError("shift must lie in [0, b)")
    if order is None:
        order = phi.order
    trunc = _specialization_trunc(m, order, b, shift)
    limit = trunc * b * b
    # sum_j x^(j t) spreads c over residues divisible by gcd(t, b)
    acc: dict[int, list[int]] = {}
    for (n, l), c in phi.series.terms.items():
        if n >= order:
            continue
        qn = n * b * b + l * shift * b + m * shift * shift
        if qn >= limit:
            continue
        g = gcd(l - k, b)
        vec = acc.setdefault(qn, [0] * b)
        for i in range(0, b, g):
            vec[i] += c * g
    out: dict[tuple[int, int], int] = {}
    for qn, vec in acc.items():
        red = reduce_mod_cyclotomic(vec, b)
        if any(red[1:]):
            raise NonIntegralDivision(
                f"sector coefficient at q^{Fraction(qn, b * b)} is not rational"
            )
        c, rem = divmod(red[0], b)
        if rem:
            raise NonIntegralDivision(
                f"sector coefficient {red[0]} at q^{Fraction(qn, b * b)} "
                f"is not divisible by {b}"
            )
        if c:
            out[(qn, 0)] = c
    series = BiSeries(out, trunc, q_den=b * b, y_den=1)
    _crosscheck_sector(series, phi, b, shift, k)
    return series


def _crosscheck_sector(series: BiSeries, phi: JacobiForm, b: int, shift: int, k: int):
    cf = phi.to_coefficient_function()
    anchor = PolarAnchor(phi.index_m, 0, b)
    m = phi.index_m
    for t in range(0, 16):
        n = shift + b * t
        l_num = k - 2 * t * m
        exp = Fraction(m * n * n, b * b) + Fraction(n * l_num, b)
        if exp >= series.q_trunc:
            continue
        try:
            direct = anchor_sum(cf, anchor, n, l_num)
        except BeyondTruncation:
            continue
        if series.coeff_at(exp) != direct:
            raise MismatchWithDirectSum(
                f"sector series coefficient at q^{exp} is {series.coeff_at(exp)}, "
                f"direct sum at (n={n}, l={l_num}) gives {direct}"
            )


# -- transfer of anchored sums under residue permutation ---------------------


def transfer_identity_holds(phi: JacobiForm, radius: int = 3) -> bool:
    """Anchored sums around a deep polar term equal those of a residue-swapped
    companion around a shallow one, under an integral change of grid
    variables.  Supported for index 6 and index 8 forms."""
    m = phi.index_m
    cf = phi.to_coefficient_function()
    if m == 6:
        sigma = ResiduePermutation.from_cycles(6, [(1, 5), (2, 10), (4, 8), (7, 11)])
        hat = permute_residues(cf, sigma)
        deep = PolarAnchor(6, 1, 5)
        shallow = PolarAnchor(6, 0, 1)
        for n in range(-radius, radius + 1):
            for l in range(-radius, radius + 1):
                lhs = anchor_sum(cf, deep, n, l)
                rhs = anchor_sum(hat, shallow, 2 * n + l, -9 * n - 5 * l)
                if lhs != rhs:
                    return False
        return True
    if m == 8:
        # The index-8 permutation multiplies only the even residue classes
        # by 3, so the summand reindexing (s = r + 2n + 3l/2) is integral,
        # and the identity holds, only for even l.
        sigma = ResiduePermutation.from_cycles(8, [(2, 6), (4, 12), (10, 14)])
        hat = permute_residues(cf, sigma)
        deep = PolarAnchor(8, 1, 6)
        shallow = PolarAnchor(8, 0, 2)
        for n in range(-radius, radius + 1):
            for l in range(-radius, radius + 1):
                if l % 2:
                    continue
                lhs = anchor_sum(cf, deep, 2 * n, 2 * l)
                rhs = anchor_sum(hat, shallow, 4 * n + 2 * l, -12 * n - 7 * l)
                if lhs != rhs:
                    return False
        return True
    raise ValueError("transfer identities are defined for index 6 and 8")


# -- conjectural dimensions for a > 0 -----------------------------------------


def polarity_capped_vectors(
    m: int, cap: int, order: int, cache_dir=None
) -> list[list[int]]:
    """Combinations of the basis with no term of polarity above cap."""
    basis = weight0_basis(m, order, cache_dir)
    terms = [t for t in enumerate_polar_terms(m) if t.polarity > cap]
    return nullspace(_coefficient_rows(basis, terms))


def conjectured_slow_dimension(
    m: int,
    a: int,
    b: int,
    n_max: int = 3,
    l_max: int | None = None,
    order: int | None = None,
    cache_dir=None,
) -> tuple[int, list[GrowthSample]]:
    """Numerical dimension of the space slow about q^a y^b.

    Starts from the polarity-capped subspace, evaluates the anchored sums of
    its basis on the grid, and repeatedly imposes vanishing at the worst
    exploding grid point until everything in sight is bounded.  The returned
    samples are the growth grids of the final basis; the dimension is
    conjecture-grade, exactly like the sampling it is based on.
    """
    anchor = PolarAnchor(m, a, b)
    if l_max is None:
        l_max = 2 * m
    points = grid_points(n_max, l_max)
    if order is None:
        order = max(required_order(anchor, points), min_polar_order(m))
    vectors = polarity_capped_vectors(m, anchor.polarity, order, cache_dir)
    if not vectors:
        return 0, []
    grids = []
    for v in vectors:
        cf = combine_basis(m, order, v, cache_dir).to_coefficient_function()
        grids.append([anchor_sum(cf, anchor, n, l) for (n, l) in points])
    d = len(vectors)
    coords = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    constraints: list[list[int]] = []
    for _ in range(d + 1):
        current = [
            [sum(c[i] * grids[i][p] for i in range(d)) for p in range(len(points))]
            for c in coords
        ]
        worst_p, worst = None, FAST_CUTOFF
        for row in current:
            for p, v in enumerate(row):
                if abs(v) > worst:
                    worst_p, worst = p, abs(v)
        if worst_p is None:
            break
        constraints.append([row[worst_p] for row in current])
        base = nullspace(ExactMatrix(constraints)) if constraints else []
        # constraints are expressed against the current coordinates; rebuild
        constraints = []
        new_coords = []
        for nv in base:
            new_coords.append(
                [sum(nv[c] * coords[c][i] for c in range(len(coords))) for i in range(d)]
            )
        coords = new_coords
        if not coords:
            break
    samples = []
    for c in coords:
        values = {
            points[p]: sum(c[i] * grids[i][p] for i in range(d))
            for p in range(len(points))
        }
        samples.append(_classify_values(anchor, values))
    return len(coords), samples
