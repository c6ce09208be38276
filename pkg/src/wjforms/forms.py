"""Standard building blocks: eta, theta series, and the weight-0 generators.

The ring of weight-0 weak Jacobi forms is freely generated by three forms of
index 1, 2, 3.  They are assembled here from theta quotients, a twisted
double theta sum divided by eta^4, and a square of lacunary sums divided by
eta; these closed expressions need only a handful of series multiplications,
which is what makes index ~50 bases affordable.  Conventions for the
two-variable thetas are fixed by requiring the index-1 generator to have
constant term y^-1 + 10 + y.

A :class:`JacobiForm` wraps an integral-exponent series with its weight,
index and truncation order and gives coefficient access through the
(residue mod 2m, discriminant) reduction.  A :class:`CoefficientFunction`
is the reduced table itself; it is what survives permuting residue classes,
which generally leaves the category of Jacobi forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from wjforms.qseries import BeyondTruncation, BiSeries, linear_combination


class InvariantViolation(Exception):
    """A structural property of a Jacobi form failed on stored data."""


_SLACK = 2  # internal expansion margin so assembled forms stay exact to `order`

_series_cache: dict[tuple, BiSeries] = {}
_power_cache: dict[tuple[int, int, int], BiSeries] = {}
_basis_cache: dict[tuple[int, int], list] = {}


def _chi_neg4(a: int) -> int:
    # quadratic character of conductor 4
    return (0, 1, 0, -1)[a % 4]


def _chi_12(n: int) -> int:
    # quadratic character of conductor 12 (the eta character)
    return {1: 1, 11: 1, 5: -1, 7: -1}.get(n % 12, 0)


def euler_product(order: int) -> BiSeries:
    """prod_{n>=1} (1 - q^n) to q-exponent < order."""
    key = ("euler", order)
    if key not in _series_cache:
        acc = BiSeries.one(order)
        for n in range(1, order):
            acc = acc * BiSeries({(24 * n, 0): -1, (0, 0): 1}, order)
        _series_cache[key] = acc
    return _series_cache[key]


def eta(order: int) -> BiSeries:
    """Dedekind eta as the Euler product times q^(1/24)."""
    key = ("eta", order)
    if key not in _series_cache:
        shift = BiSeries.monomial(1, Fraction(1, 24), 0, order + Fraction(1, 24))
        _series_cache[key] = (euler_product(order) * shift).truncate(order)
    return _series_cache[key]


def theta1(alpha: int, order: int) -> BiSeries:
    """theta_1(tau, alpha*z) from the triple product, exact below q^order.

    Odd in y -> 1/y; the leading q-power is 1/8 and carries y^(-alpha/2)
    times (1 - y^alpha).
    """
    if alpha < 1 or order < 1:
        raise ValueError("alpha and order must be positive")
    key = ("theta1", alpha, order)
    if key in _series_cache:
        return _series_cache[key]
    a2 = 2 * alpha  # y-exponent in y_den = 2 units
    acc = BiSeries({(0, 0): 1, (0, a2): -1}, order)  # the n = 1 factor (1 - y^alpha)
    for n in range(1, order):
        f = BiSeries(
            {
                (0, 0): 1,
                (24 * n, 0): -1,
            },
            order,
        )
        g = BiSeries({(0, 0): 1, (24 * n, a2): -1}, order)
        h = BiSeries({(0, 0): 1, (24 * n, -a2): -1}, order)
        acc = acc * (f * g * h)
    pref = BiSeries.monomial(-1, Fraction(1, 8), Fraction(-alpha, 2), order + Fraction(1, 8))
    out = (acc * pref).truncate(order)
    _series_cache[key] = out
    return out


def jacobi_theta(kind: int, order: int) -> tuple[BiSeries, BiSeries]:
    """Two-variable theta of kind 2, 3 or 4 and its z = 0 specialization.

    theta_2 = sum q^((n+1/2)^2/2) y^(n+1/2), theta_3 = sum q^(n^2/2) y^n,
    theta_4 = theta_3 with alternating signs.
    """
    if kind not in (2, 3, 4):
        raise ValueError("kind must be 2, 3 or 4")
    key = ("jtheta", kind, order)
    if key in _series_cache:
        return _series_cache[key], _series_cache[key + ("z0",)]
    two_var: dict[tuple[int, int], int] = {}
    z0: dict[tuple[int, int], int] = {}
    n_max = isqrt(2 * order) + 2
    for n in range(-n_max, n_max + 1):
        if kind == 2:
            qn = 3 * (2 * n + 1) ** 2  # (n+1/2)^2/2 in 24ths
            yn = 2 * n + 1
            c = 1
        else:
            qn = 12 * n * n
            yn = 2 * n
            c = -1 if (kind == 4 and n % 2) else 1
        if qn >= 24 * order:
            continue
        two_var[(qn, yn)] = two_var.get((qn, yn), 0) + c
        z0[(qn, 0)] = z0.get((qn, 0), 0) + c
    tv = BiSeries(two_var, order)
    s0 = BiSeries({k: v for k, v in z0.items() if v}, order)
    _series_cache[key] = tv
    _series_cache[key + ("z0",)] = s0
    return tv, s0


@dataclass(frozen=True)
class ResiduePermutation:
    """A bijection of Z/2mZ acting on theta-decomposition components."""

    index_m: int
    images: tuple[int, ...]

    def __post_init__(self):
        n = 2 * self.index_m
        if sorted(self.images) != list(range(n)):
            raise ValueError("images must be a permutation of 0..2m-1")

    @classmethod
    def identity(cls, index_m: int) -> "ResiduePermutation":
        return cls(index_m, tuple(range(2 * index_m)))

    @classmethod
    def from_cycles(cls, index_m: int, cycles) -> "ResiduePermutation":
        images = list(range(2 * index_m))
        for cycle in cycles:
            for i, a in enumerate(cycle):
                images[a % (2 * index_m)] = cycle[(i + 1) % len(cycle)] % (2 * index_m)
        return cls(index_m, tuple(images))

    def __call__(self, mu: int) -> int:
        return self.images[mu % (2 * self.index_m)]

    def inverse(self) -> "ResiduePermutation":
        inv = [0] * len(self.images)
        for i, img in enumerate(self.images):
            inv[img] = i
        return ResiduePermutation(self.index_m, tuple(inv))


class CoefficientFunction:
    """Coefficients keyed by residue class mod 2m and discriminant l^2-4mn.

    Entries are complete for every discriminant D >= ``known_min``; absent
    keys in that range are genuine zeros, and anything above
    ``polarity_cap`` (m^2 for tables built from weak forms) is forced to
    vanish.  Reads below the known range raise, naming the order needed.
    """

    __slots__ = ("index_m", "table", "known_min", "polarity_cap")

    def __init__(self, index_m: int, table: dict, known_min: int, polarity_cap: int):
        self.index_m = index_m
        self.table = table
        self.known_min = known_min
        self.polarity_cap = polarity_cap

    def value(self, mu: int, disc: int) -> int:
        if disc > self.polarity_cap:
            return 0
        got = self.table.get((mu % (2 * self.index_m), disc))
        if got is not None:
            return got
        if disc < self.known_min:
            # absent below the guaranteed-complete range: zero or unknown
            m = self.index_m
            need = (m * m - disc + 4 * m - 1) // (4 * m) + 1
            raise BeyondTruncation(
                f"discriminant {disc} below known range {self.known_min}; "
                f"expand the source to order {need}"
            )
        return 0

    def negated(self) -> "CoefficientFunction":
        return CoefficientFunction(
            self.index_m,
            {k: -v for k, v in self.table.items()},
            self.known_min,
            self.polarity_cap,
        )

    def same_table(self, other: "CoefficientFunction") -> bool:
        """Equality over the discriminant range both tables guarantee."""
        if self.index_m != other.index_m:
            return False
        cut = max(self.known_min, other.known_min)
        mine = {k: v for k, v in self.table.items() if k[1] >= cut}
        theirs = {k: v for k, v in other.table.items() if k[1] >= cut}
        return mine == theirs

    def __repr__(self) -> str:
        return (
            f"CoefficientFunction(m={self.index_m}, {len(self.table)} entries, "
            f"D>={self.known_min})"
        )


class JacobiForm:
    """A weak Jacobi form given by its expansion below q^order."""

    __slots__ = ("weight", "index_m", "series", "order")

    def __init__(self, weight: int, index_m: int, series: BiSeries, order: int):
        if index_m < 1:
            raise ValueError("index must be positive")
        if series.q_den != 1 or series.y_den != 1:
            series = series.normalize_integral()
        if series.q_trunc < order:
            raise BeyondTruncation(
                f"series known below q^{series.q_trunc}, cannot claim order {order}"
            )
        self.weight = weight
        self.index_m = index_m
        self.series = series.truncate(order)
        self.order = order

    def __repr__(self) -> str:
        return f"JacobiForm(weight={self.weight}, m={self.index_m}, order={self.order})"

    def reduce(self, n: int, l: int) -> tuple[int, int]:
        """Canonical representative with l in [-m, m], ties at +-m to +m."""
        m = self.index_m
        k = (l + m) // (2 * m)
        l0 = l - 2 * m * k
        if l0 == -m:
            l0 = m
            k -= 1
        n0 = n - k * l0 - m * k * k
        return n0, l0

    def coeff(self, n: int, l: int) -> int:
        m = self.index_m
        n0, l0 = self.reduce(n, l)
        if n0 < 0:
            return 0
        if self.weight == 0 and l0 * l0 - 4 * m * n0 > m * m:
            return 0
        if n0 >= self.order:
            raise BeyondTruncation(
                f"c({n},{l}) reduces to n={n0}, beyond order {self.order}"
            )
        return self.series.terms.get((n0, l0), 0)

    def validate(self) -> None:
        """Check symmetry, class consistency, and the polarity cap."""
        m = self.index_m
        terms = self.series.terms
        classes: dict[tuple[int, int], int] = {}
        for (n, l), c in terms.items():
            if n < 0:
                raise InvariantViolation(f"negative q-power q^{n}")
            if terms.get((n, -l), 0) != c:
                raise InvariantViolation(f"c({n},{l}) != c({n},{-l})")
            disc = l * l - 4 * m * n
            if self.weight == 0 and disc > m * m:
                raise InvariantViolation(
                    f"term q^{n} y^{l} has discriminant {disc} > m^2 = {m * m}"
                )
            key = (l % (2 * m), disc)
            if classes.setdefault(key, c) != c:
                raise InvariantViolation(
                    f"class {key} carries both {classes[key]} and {c}"
                )
        # classes must also agree with zero at unstored members in range
        for (mu, disc), c in classes.items():
            l0 = mu if mu <= m else mu - 2 * m
            n0 = (l0 * l0 - disc) // (4 * m)
            if 0 <= n0 < self.order and terms.get((n0, l0), 0) != c:
                raise InvariantViolation(
                    f"class ({mu},{disc}) value {c} missing at representative ({n0},{l0})"
                )

    def to_coefficient_function(self) -> CoefficientFunction:
        m = self.index_m
        table: dict[tuple[int, int], int] = {}
        for (n, l), c in self.series.terms.items():
            key = (l % (2 * m), l * l - 4 * m * n)
            if table.setdefault(key, c) != c:
                raise InvariantViolation(
                    f"conflicting values {table[key]} and {c} for class {key}"
                )
        known_min = m * m - 4 * m * (self.order - 1)
        return CoefficientFunction(m, table, known_min, m * m)

    def theta_components(self) -> list[BiSeries]:
        """The 2m component series h_mu with phi = sum h_mu theta_{m,mu}.

        Component mu is complete down to discriminant mu_red^2 - 4m(order-1),
        where mu_red is the reduced residue, hence the per-component bound.
        """
        m = self.index_m
        cf = self.to_coefficient_function()
        comps = []
        for mu in range(2 * m):
            mu_red = min(mu, 2 * m - mu)
            known = mu_red * mu_red - 4 * m * (self.order - 1)
            terms = {
                (-disc, 0): v for (r, disc), v in cf.table.items() if r == mu
            }
            comps.append(
                BiSeries(terms, Fraction(-known + 1, 4 * m), q_den=4 * m, y_den=1)
            )
        return comps


def theta_block(index_m: int, mu: int, q_trunc: Fraction) -> BiSeries:
    """theta_{m,mu}(tau,z) = sum over r = mu mod 2m of q^(r^2/4m) y^r."""
    m = index_m
    r_max = isqrt(int(4 * m * q_trunc)) + 2 * m
    terms = {}
    for r in range(-r_max, r_max + 1):
        if (r - mu) % (2 * m) == 0 and Fraction(r * r, 4 * m) < q_trunc:
            terms[(r * r, r)] = 1
    return BiSeries(terms, q_trunc, q_den=4 * m, y_den=1)


def permute_residues(source, perm: ResiduePermutation) -> CoefficientFunction:
    """Relabel theta-decomposition components: entry (mu, D) -> c(perm(mu), D).

    The result is a coefficient table that need not come from any Jacobi
    form, but anchored coefficient sums still make sense for it.
    """
    cf = source if isinstance(source, CoefficientFunction) else source.to_coefficient_function()
    if perm.index_m != cf.index_m:
        raise ValueError("permutation and form have different index")
    inv = perm.inverse()
    table = {(inv(mu), disc): v for (mu, disc), v in cf.table.items()}
    return CoefficientFunction(cf.index_m, table, cf.known_min, cf.polarity_cap)


# -- the generators ---------------------------------------------------------


def weight0_generator(k: int, order: int) -> JacobiForm:
    """The index-k generator (k = 1, 2, 3) of the weight-0 ring."""
    if k not in (1, 2, 3):
        raise ValueError("generator index must be 1, 2 or 3")
    work = order + _SLACK
    if k == 1:
        acc = None
        for kind in (2, 3, 4):
            tz, t0 = jacobi_theta(kind, work)
            ratio = (tz * 2).div_exact(t0)
            sq = ratio * ratio
            acc = sq if acc is None else acc + sq
        series = acc
    elif k == 2:
        e = eta(work + 1)
        eta4_inv = (e**4).invert()
        terms: dict[tuple[int, int], int] = {}
        a_max = isqrt(8 * work) + 2
        b_max = isqrt(24 * work) + 2
        for a in range(-a_max, a_max + 1):
            ca = _chi_neg4(a)
            if not ca:
                continue
            for b in range(-b_max, b_max + 1):
                cb = _chi_12(b)
                if not cb:
                    continue
                qn = 3 * a * a + b * b  # exponent (3a^2+b^2)/24 in 24ths
                if qn >= 24 * work:
                    continue
                key = (qn, a + b)  # y-exponent (a+b)/2 in halves
                v = terms.get(key, 0) + (3 * a - b) * ca * cb
                if v:
                    terms[key] = v
                elif key in terms:
                    del terms[key]
        twisted = BiSeries(terms, work)
        series = (twisted * eta4_inv).div_scalar_exact(2)
    else:
        inv_euler = euler_product(work).invert()
        terms = {}
        l_max = isqrt(work // 6) + 2
        for l in range(-l_max, l_max + 1):
            for qn, yn, sign in (
                (6 * l * l + l, 12 * l + 1, 1),
                (6 * l * l - l, 12 * l - 1, 1),
                (6 * l * l + 5 * l + 1, 12 * l + 5, -1),
                (6 * l * l - 5 * l + 1, 12 * l - 5, -1),
            ):
                if 0 <= qn < work:
                    key = (24 * qn, yn)
                    v = terms.get(key, 0) + sign
                    if v:
                        terms[key] = v
                    elif key in terms:
                        del terms[key]
        bracket = BiSeries(terms, work)
        root = inv_euler * bracket
        series = root * root
    return JacobiForm(0, k, series.truncate(order).normalize_integral(), order)


def weight_minus2_index1(order: int) -> JacobiForm:
    """The unique weight -2, index 1 form with constant term y - 2 + 1/y."""
    work = order + _SLACK
    t1 = theta1(1, work)
    series = (t1 * t1).div_exact(eta(work + 1) ** 6)
    return JacobiForm(-2, 1, series.truncate(order).normalize_integral(), order)


# -- the basis of the weight-0 space ---------------------------------------


def basis_exponents(m: int) -> list[tuple[int, int, int]]:
    """All (a, b, c) with a + 2b + 3c = m, in (c, b) lexicographic order."""
    out = []
    for c in range(m // 3 + 1):
        for b in range((m - 3 * c) // 2 + 1):
            out.append((m - 2 * b - 3 * c, b, c))
    return out


def _generator_power(k: int, e: int, order: int) -> BiSeries:
    key = (k, e, order)
    got = _power_cache.get(key)
    if got is not None:
        return got
    if e == 0:
        out = BiSeries.one(order, q_den=1, y_den=1)
    elif e == 1:
        out = weight0_generator(k, order).series
    else:
        out = (_generator_power(k, e - 1, order) * _generator_power(k, 1, order)).truncate(order)
    _power_cache[key] = out
    return out


def weight0_basis(
    m: int, order: int, cache_dir: str | None = None
) -> list[tuple[tuple[int, int, int], JacobiForm]]:
    """Monomials in the three generators spanning the index-m space.

    Generator powers are cached so each monomial costs at most two series
    multiplications.  With a cache directory, expansions are read from and
    written to disk in the versioned text format.
    """
    if m < 1:
        raise ValueError("index must be positive")
    key = (m, order)
    if key in _basis_cache:
        return _basis_cache[key]
    if cache_dir is not None:
        from wjforms import cache as _cache

        loaded = _cache.load_basis(cache_dir, m, order)
        if loaded is not None:
            _basis_cache[key] = loaded
            return loaded
    out = []
    for (a, b, c) in basis_exponents(m):
        factors = [
            _generator_power(k, e, order)
            for k, e in ((1, a), (2, b), (3, c))
            if e > 0
        ]
        series = BiSeries.one(order, q_den=1, y_den=1)
        for f in factors:
            series = (series * f).truncate(order)
        out.append(((a, b, c), JacobiForm(0, m, series, order)))
    _basis_cache[key] = out
    if cache_dir is not None:
        from wjforms import cache as _cache

        _cache.save_basis(cache_dir, m, order, out)
    return out


def combine_basis(
    m: int, order: int, coeffs: list[int], cache_dir: str | None = None
) -> JacobiForm:
    """Integer linear combination of the index-m basis monomials."""
    basis = weight0_basis(m, order, cache_dir)
    if len(coeffs) != len(basis):
        raise ValueError(f"expected {len(basis)} coefficients, got {len(coeffs)}")
    series = linear_combination(coeffs, [f.series for _, f in basis])
    return JacobiForm(0, m, series, order)
