"""Quotients of scaled theta functions as explicit weight-0 forms.

A spec lists numerator and denominator scaling factors for an equal number
of theta factors; the quotient has weight 0, index half the difference of
squared multipliers, and most polar y-power half the difference of their
sums.  Holomorphy is a counting condition at torsion divisors (each d >= 2
must divide at least as many numerators as denominators, with
multiplicity), cross-checked against exact series division on small specs.
Whether the quotient's anchored sums about y^b stay bounded is a closed
rational inequality per scaling factor, summed over the quotient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from wjforms.exactla import ExactMatrix, rank
from wjforms.forms import JacobiForm, theta1
from wjforms.qseries import BiSeries, InexactDivision


class NonIntegralSpec(Exception):
    """Index or anchor power of the quotient is not an integer."""


class NonHolomorphicQuotient(Exception):
    """Series division hit a pole; the spec is not a weak Jacobi form."""


@dataclass(frozen=True)
class ThetaQuotientSpec:
    """Multisets of numerator and denominator multipliers, stored sorted."""

    nums: tuple[int, ...]
    dens: tuple[int, ...]

    def __post_init__(self):
        if len(self.nums) != len(self.dens):
            raise ValueError("need equally many numerator and denominator factors")
        if not self.nums:
            raise ValueError("empty quotient")
        if any(x < 1 for x in self.nums + self.dens):
            raise ValueError("multipliers must be positive")
        object.__setattr__(self, "nums", tuple(sorted(self.nums)))
        object.__setattr__(self, "dens", tuple(sorted(self.dens)))

    def index_and_anchor_power(self) -> tuple[int, int]:
        """(index, b): half the differences of squared and plain sums."""
        two_index = sum(x * x for x in self.nums) - sum(x * x for x in self.dens)
        two_b = sum(self.nums) - sum(self.dens)
        if two_index % 2 or two_index <= 0:
            raise NonIntegralSpec(f"index {Fraction(two_index, 2)} is not a positive integer")
        if two_b % 2 or two_b <= 0:
            raise NonIntegralSpec(f"anchor power {Fraction(two_b, 2)} is not a positive integer")
        return two_index // 2, two_b // 2

    def reduced(self) -> "ThetaQuotientSpec":
        """Cancel common multipliers pairwise."""
        nums = list(self.nums)
        dens = []
        for d in self.dens:
            if d in nums:
                nums.remove(d)
            else:
                dens.append(d)
        if not dens:
            raise NonIntegralSpec("quotient reduces to a constant")
        return ThetaQuotientSpec(tuple(nums), tuple(dens))

    def label(self) -> str:
        return "[" + " ".join(map(str, self.nums)) + "]/[" + " ".join(map(str, self.dens)) + "]"


def is_holomorphic(spec: ThetaQuotientSpec) -> bool:
    """Zero-order counting at torsion divisors: every d >= 2 must divide at
    least as many numerator multipliers as denominator multipliers."""
    for d in range(2, max(spec.dens) + 1):
        den_count = sum(1 for x in spec.dens if x % d == 0)
        if den_count and sum(1 for x in spec.nums if x % d == 0) < den_count:
            return False
    return True


def _valuation_shift(t: int, r: int, b: int) -> Fraction:
    """Lowest q-power contribution of one scaled theta factor, specialized
    along z -> (r tau + s)/b and normalized by q^(t^2 r^2 / 2 b^2)."""
    x = Fraction(t * r, b)
    fl = x.numerator // x.denominator
    return (
        Fraction(t * t * r * r, 2 * b * b)
        - x / 2
        + Fraction(fl * (fl + 1), 2)
        - x * fl
    )


def slow_growth_margin(spec: ThetaQuotientSpec, r: int) -> Fraction:
    """Exact q-valuation margin of the specialized quotient at shift r;
    nonnegative for all r in 1..b-1 means bounded anchored sums about y^b."""
    _, b = spec.index_and_anchor_power()
    if not 1 <= r <= b - 1:
        raise ValueError(f"r must lie in 1..{b - 1}")
    total = Fraction(0)
    for t in spec.nums:
        total += _valuation_shift(t, r, b)
    for t in spec.dens:
        total -= _valuation_shift(t, r, b)
    return total


def satisfies_slow_condition(spec: ThetaQuotientSpec) -> bool:
    _, b = spec.index_and_anchor_power()
    return all(slow_growth_margin(spec, r) >= 0 for r in range(1, b))


def rescaled_single_spec(beta: int, k: int) -> ThetaQuotientSpec:
    """The one-factor family [(k+1) beta]/[beta]; needs k or beta even."""
    return ThetaQuotientSpec(((k + 1) * beta,), (beta,))


def kazama_suzuki_spec(k: int) -> ThetaQuotientSpec:
    """The two-factor family [k+1, k+2]/[1, 2], slow about y^k."""
    return ThetaQuotientSpec((k + 1, k + 2), (1, 2))


def build_series(spec: ThetaQuotientSpec, order: int) -> BiSeries:
    """Expand the quotient by exact long division; raises on poles."""
    work = order + 2
    num = BiSeries.one(work)
    for t in spec.nums:
        num = num * theta1(t, work)
    den = BiSeries.one(work)
    for t in spec.dens:
        den = den * theta1(t, work)
    try:
        return num.div_exact(den).truncate(order)
    except InexactDivision as exc:
        raise NonHolomorphicQuotient(f"{spec.label()}: {exc}") from exc


def to_jacobi_form(spec: ThetaQuotientSpec, order: int) -> JacobiForm:
    m, _ = spec.index_and_anchor_power()
    return JacobiForm(0, m, build_series(spec, order).normalize_integral(), order)


def _num_multisets(count: int, min_val: int, budget_sq: int):
    """Ascending multisets of the given size with sum of squares <= budget."""
    if count == 0:
        yield ()
        return
    v = min_val
    while count * v * v <= budget_sq:
        for rest in _num_multisets(count - 1, v, budget_sq - v * v):
            yield (v,) + rest
        v += 1


def _den_multisets(count: int, min_val: int, sum_target: int, sq_target: int):
    if count == 0:
        if sum_target == 0 and sq_target == 0:
            yield ()
        return
    v = min_val
    while count * v <= sum_target and count * v * v <= sq_target:
        if sum_target - v >= 0 and sq_target - v * v >= 0:
            for rest in _den_multisets(count - 1, v, sum_target - v, sq_target - v * v):
                yield (v,) + rest
        v += 1


def enumerate_slow_quotients(m: int, b: int, n_max: int = 5) -> list[ThetaQuotientSpec]:
    """All reduced holomorphic specs with the given index and anchor power,
    up to n_max factors, satisfying the slow-growth condition.

    In a reduced holomorphic spec every denominator divides some strictly
    larger numerator, which bounds sum(dens^2) by N + (zeta(2)-1) sum(nums^2)
    and hence bounds every multiplier; the search below that bound is
    complete for reduced specs.
    """
    budget = ((2 * m + n_max) * 2817) // 1000 + 1
    found = []
    for count in range(1, n_max + 1):
        for nums in _num_multisets(count, 1, budget):
            sq = sum(x * x for x in nums)
            s = sum(nums)
            if sq - 2 * m < count or s - 2 * b < count:
                continue
            for dens in _den_multisets(count, 1, s - 2 * b, sq - 2 * m):
                spec = ThetaQuotientSpec(nums, dens)
                if set(spec.nums) & set(spec.dens):
                    continue  # not reduced; its reduction is enumerated separately
                if not is_holomorphic(spec):
                    continue
                if satisfies_slow_condition(spec):
                    found.append(spec)
    found.sort(key=lambda s: (len(s.nums), s.nums, s.dens))
    return found


def span_dimension(specs: list[ThetaQuotientSpec], order: int) -> int:
    """Rank of the coefficient matrix of the expanded quotients on the
    common exponent grid below the given order."""
    if not specs:
        return 0
    series = [build_series(s, order).normalize_integral() for s in specs]
    keys = sorted({k for s in series for k in s.terms})
    matrix = ExactMatrix([[s.terms.get(k, 0) for k in keys] for s in series])
    return rank(matrix)
