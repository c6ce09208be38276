"""Truncated bivariate series with exact integer coefficients.

A :class:`BiSeries` is a finite collection of terms ``c * q^(qn/q_den) *
y^(yn/y_den)`` plus a truncation bound ``q_trunc``: coefficients of
q-exponents at or above the bound are *unknown*, never silently zero.
Exponents are stored as scaled integers (q scaled by 24 and y by 2 by
default) so eta/theta prefactors like q^(1/24) or y^(1/2) stay exact, and
coefficients are Python ints, so nothing ever rounds.

Multiplication packs each q-slice into a single big integer (one fixed-width
slot per y-exponent) and lets CPython's bignum multiply do the convolution;
a naive dict product is kept both as the small-input path and as an oracle
for tests.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping

try:  # GMP multiplication is several times faster on multi-KB integers
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    def _mpz(x):
        return x


class QSeriesError(Exception):
    """Base class for series arithmetic errors."""


class BeyondTruncation(QSeriesError):
    """A coefficient past the known truncation bound was requested."""


class NonUnitLeading(QSeriesError):
    """Inversion needs a leading q-coefficient of the form +-y^k."""


class NonIntegralExponent(QSeriesError):
    """An exponent did not clear its denominator."""


class InexactDivision(QSeriesError):
    """A quotient failed to stay in the integer Laurent coefficient ring."""


# Below this many coefficient pairs, plain dict convolution beats packing.
_NAIVE_MUL_CUTOFF = 3000

Exponent = int | Fraction


def _strict_floor(x: Fraction) -> int:
    """Largest integer strictly below x."""
    return (x.numerator - 1) // x.denominator


def _as_scaled(exp: Exponent, den: int, what: str) -> int:
    e = Fraction(exp) * den
    if e.denominator != 1:
        raise NonIntegralExponent(f"{what} exponent {exp} is not a multiple of 1/{den}")
    return e.numerator


def _pack_signed(coeffs: list[int], slot: int) -> int:
    """Pack signed ints into one big integer, ``slot`` bytes per entry."""
    n = len(coeffs)
    pos = bytearray(n * slot)
    neg = None
    for i, c in enumerate(coeffs):
        if c > 0:
            pos[i * slot : i * slot + (c.bit_length() + 7) // 8] = c.to_bytes(
                (c.bit_length() + 7) // 8, "little"
            )
        elif c < 0:
            if neg is None:
                neg = bytearray(n * slot)
            c = -c
            neg[i * slot : i * slot + (c.bit_length() + 7) // 8] = c.to_bytes(
                (c.bit_length() + 7) // 8, "little"
            )
    val = int.from_bytes(bytes(pos), "little")
    if neg is not None:
        val -= int.from_bytes(bytes(neg), "little")
    return val


def _unpack_signed(val: int, nslots: int, slot: int) -> list[int]:
    """Inverse of :func:`_pack_signed`, assuming |digit| < 2^(8*slot-1)."""
    bias = 1 << (8 * slot - 1)
    # Adding bias to every slot makes all digits positive without carries.
    key = int.from_bytes((b"\x00" * (slot - 1) + b"\x80") * nslots, "little")
    buf = (val + key).to_bytes(nslots * slot, "little")
    out = []
    for i in range(nslots):
        out.append(int.from_bytes(buf[i * slot : (i + 1) * slot], "little") - bias)
    return out


def _group_rows(terms: Mapping[tuple[int, int], int]) -> list[tuple[int, int, list[int]]]:
    """Group a term map into dense per-q rows ``(q_num, y_min, coeffs)``."""
    by_q: dict[int, dict[int, int]] = {}
    for (qn, yn), c in terms.items():
        by_q.setdefault(qn, {})[yn] = c
    rows = []
    for qn in sorted(by_q):
        ys = by_q[qn]
        y_min = min(ys)
        y_max = max(ys)
        coeffs = [0] * (y_max - y_min + 1)
        for yn, c in ys.items():
            coeffs[yn - y_min] = c
        rows.append((qn, y_min, coeffs))
    return rows


def _max_coeff_bits(rows: list[tuple[int, int, list[int]]]) -> int:
    bits = 1
    for _, _, cs in rows:
        for c in cs:
            if c:
                b = c.bit_length()
                if b > bits:
                    bits = b
    return bits


def _mul_packed(
    rows_a: list[tuple[int, int, list[int]]],
    rows_b: list[tuple[int, int, list[int]]],
    q_max: int,
) -> dict[tuple[int, int], int]:
    slot_bits = (
        _max_coeff_bits(rows_a)
        + _max_coeff_bits(rows_b)
        + min(max(len(r[2]) for r in rows_a), max(len(r[2]) for r in rows_b)).bit_length()
        + min(len(rows_a), len(rows_b)).bit_length()
        + 2
    )
    slot = (slot_bits + 7) // 8
    packed_a = [_mpz(_pack_signed(cs, slot)) for _, _, cs in rows_a]
    packed_b = [_mpz(_pack_signed(cs, slot)) for _, _, cs in rows_b]

    # One accumulator per output q-power; all pair products for a given
    # output are summed in packed form and unpacked once.
    span: dict[int, tuple[int, int]] = {}
    for qa, ya, ca in rows_a:
        la = len(ca)
        for qb, yb, cb in rows_b:
            qo = qa + qb
            if qo > q_max:
                break
            yo = ya + yb
            hi = yo + la + len(cb) - 2
            cur = span.get(qo)
            if cur is None:
                span[qo] = (yo, hi)
            else:
                span[qo] = (min(cur[0], yo), max(cur[1], hi))
    zero = _mpz(0)
    acc: dict[int, int] = {qo: zero for qo in span}
    B = 8 * slot
    for ia, (qa, ya, _) in enumerate(rows_a):
        pa = packed_a[ia]
        for ib, (qb, yb, _) in enumerate(rows_b):
            qo = qa + qb
            if qo > q_max:
                break
            shift = (ya + yb - span[qo][0]) * B
            acc[qo] += (pa * packed_b[ib]) << shift

    out: dict[tuple[int, int], int] = {}
    for qo, val in acc.items():
        if not val:
            continue
        y_lo, y_hi = span[qo]
        for i, c in enumerate(_unpack_signed(int(val), y_hi - y_lo + 1, slot)):
            if c:
                out[(qo, y_lo + i)] = c
    return out


def _mul_naive(
    ta: Mapping[tuple[int, int], int],
    tb: Mapping[tuple[int, int], int],
    q_max: int,
) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = {}
    for (qa, ya), ca in ta.items():
        for (qb, yb), cb in tb.items():
            qo = qa + qb
            if qo > q_max:
                continue
            key = (qo, ya + yb)
            v = out.get(key, 0) + ca * cb
            if v:
                out[key] = v
            elif key in out:
                del out[key]
    return out


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return out


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division in Z[y] from the low end; raises if inexact."""
    if not den or den[0] == 0:
        raise InexactDivision("denominator has no leading coefficient")
    qlen = len(num) - len(den) + 1
    if qlen < 0:
        if any(num):
            raise InexactDivision("quotient would need negative degree")
        return []
    rem = list(num)
    d0 = den[0]
    quot = [0] * qlen
    for i in range(qlen):
        c = rem[i]
        if c == 0:
            continue
        u, r = divmod(c, d0)
        if r:
            raise InexactDivision(f"coefficient {c} not divisible by {d0}")
        quot[i] = u
        for j, dj in enumerate(den):
            if dj:
                rem[i + j] -= u * dj
    if any(rem[qlen:]):
        raise InexactDivision("nonzero remainder")
    return quot


class BiSeries:
    """Immutable truncated series in q and y over the integers.

    ``terms`` maps ``(q_num, y_num)`` to the coefficient of
    ``q^(q_num/q_den) * y^(y_num/y_den)``.  All stored q-exponents lie
    strictly below ``q_trunc``; reads at or past the bound raise
    :class:`BeyondTruncation`.
    """

    __slots__ = ("q_den", "y_den", "terms", "q_trunc", "_q_limit")

    def __init__(
        self,
        terms: Mapping[tuple[int, int], int],
        q_trunc: Exponent,
        q_den: int = 24,
        y_den: int = 2,
    ):
        if q_den <= 0 or y_den <= 0:
            raise ValueError("exponent denominators must be positive")
        self.q_den = q_den
        self.y_den = y_den
        self.q_trunc = Fraction(q_trunc)
        self._q_limit = _strict_floor(self.q_trunc * q_den)
        clean = {}
        for (qn, yn), c in terms.items():
            if not c:
                continue
            if qn > self._q_limit:
                raise ValueError(
                    f"term q^{Fraction(qn, q_den)} stored past truncation {self.q_trunc}"
                )
            clean[(qn, yn)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, terms, q_trunc, q_den, y_den) -> "BiSeries":
        s = object.__new__(cls)
        s.q_den = q_den
        s.y_den = y_den
        s.q_trunc = q_trunc
        s._q_limit = _strict_floor(q_trunc * q_den)
        s.terms = terms
        return s

    @classmethod
    def zero(cls, q_trunc: Exponent, q_den: int = 24, y_den: int = 2) -> "BiSeries":
        return cls({}, q_trunc, q_den, y_den)

    @classmethod
    def one(cls, q_trunc: Exponent, q_den: int = 24, y_den: int = 2) -> "BiSeries":
        return cls.monomial(1, 0, 0, q_trunc, q_den, y_den)

    @classmethod
    def monomial(
        cls,
        coeff: int,
        q_exp: Exponent,
        y_exp: Exponent,
        q_trunc: Exponent,
        q_den: int = 24,
        y_den: int = 2,
    ) -> "BiSeries":
        qn = _as_scaled(q_exp, q_den, "q")
        yn = _as_scaled(y_exp, y_den, "y")
        return cls({(qn, yn): coeff} if coeff else {}, q_trunc, q_den, y_den)

    # -- inspection ------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def q_min(self) -> Fraction | None:
        """Lowest q-exponent present, or None for the zero series."""
        if not self.terms:
            return None
        return Fraction(min(qn for qn, _ in self.terms), self.q_den)

    def coeff_at(self, q_exp: Exponent, y_exp: Exponent = 0) -> int:
        qe = Fraction(q_exp)
        if qe >= self.q_trunc:
            raise BeyondTruncation(f"q^{qe} is past truncation {self.q_trunc}")
        qs = qe * self.q_den
        ys = Fraction(y_exp) * self.y_den
        if qs.denominator != 1 or ys.denominator != 1:
            return 0
        return self.terms.get((qs.numerator, ys.numerator), 0)

    def terms_canonical(self) -> dict[tuple[Fraction, Fraction], int]:
        """The observable term map, with exponents as exact rationals."""
        return {
            (Fraction(qn, self.q_den), Fraction(yn, self.y_den)): c
            for (qn, yn), c in self.terms.items()
        }

    def y_slice(self, q_exp: Exponent) -> dict[Fraction, int]:
        """Laurent coefficients in y of a single q-power."""
        qe = Fraction(q_exp)
        if qe >= self.q_trunc:
            raise BeyondTruncation(f"q^{qe} is past truncation {self.q_trunc}")
        qs = qe * self.q_den
        if qs.denominator != 1:
            return {}
        qn = qs.numerator
        return {
            Fraction(yn, self.y_den): c for (q, yn), c in self.terms.items() if q == qn
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BiSeries):
            return NotImplemented
        if self.q_trunc != other.q_trunc:
            return False
        a, b = _aligned(self, other)
        return a.terms == b.terms

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        head = sorted(self.terms_canonical().items())[:4]
        parts = [f"{c}*q^{qe}*y^{ye}" for (qe, ye), c in head]
        more = "" if len(self.terms) <= 4 else f" +{len(self.terms) - 4} terms"
        return f"BiSeries({' + '.join(parts) or '0'}{more}; O(q^{self.q_trunc}))"

    # -- structural ------------------------------------------------------

    def rescaled(self, q_den: int, y_den: int) -> "BiSeries":
        if q_den % self.q_den or y_den % self.y_den:
            raise ValueError("can only rescale to multiples of current denominators")
        fq = q_den // self.q_den
        fy = y_den // self.y_den
        if fq == 1 and fy == 1:
            return self
        terms = {(qn * fq, yn * fy): c for (qn, yn), c in self.terms.items()}
        return BiSeries._raw(terms, self.q_trunc, q_den, y_den)

    def truncate(self, q_trunc: Exponent) -> "BiSeries":
        t = Fraction(q_trunc)
        if t > self.q_trunc:
            raise BeyondTruncation(f"cannot extend truncation {self.q_trunc} to {t}")
        limit = _strict_floor(t * self.q_den)
        terms = {k: c for k, c in self.terms.items() if k[0] <= limit}
        return BiSeries._raw(terms, t, self.q_den, self.y_den)

    def normalize_integral(self) -> "BiSeries":
        """Clear denominators; every stored exponent must be integral."""
        terms = {}
        for (qn, yn), c in self.terms.items():
            if qn % self.q_den:
                raise NonIntegralExponent(
                    f"q-exponent {Fraction(qn, self.q_den)} is not an integer"
                )
            if yn % self.y_den:
                raise NonIntegralExponent(
                    f"y-exponent {Fraction(yn, self.y_den)} is not an integer"
                )
            terms[(qn // self.q_den, yn // self.y_den)] = c
        return BiSeries._raw(terms, self.q_trunc, 1, 1)

    def map_y_negate(self) -> "BiSeries":
        """Substitute y -> 1/y."""
        terms = {(qn, -yn): c for (qn, yn), c in self.terms.items()}
        return BiSeries._raw(terms, self.q_trunc, self.q_den, self.y_den)

    # -- arithmetic ------------------------------------------------------

    def __neg__(self) -> "BiSeries":
        return BiSeries._raw(
            {k: -c for k, c in self.terms.items()}, self.q_trunc, self.q_den, self.y_den
        )

    def __add__(self, other: "BiSeries") -> "BiSeries":
        a, b = _aligned(self, other)
        t = min(a.q_trunc, b.q_trunc)
        limit = _strict_floor(t * a.q_den)
        terms = {k: c for k, c in a.terms.items() if k[0] <= limit}
        for k, c in b.terms.items():
            if k[0] > limit:
                continue
            v = terms.get(k, 0) + c
            if v:
                terms[k] = v
            elif k in terms:
                del terms[k]
        return BiSeries._raw(terms, t, a.q_den, a.y_den)

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        return self + (-other)

    def __mul__(self, other: "BiSeries | int") -> "BiSeries":
        if isinstance(other, int):
            if other == 0:
                return BiSeries._raw({}, self.q_trunc, self.q_den, self.y_den)
            return BiSeries._raw(
                {k: c * other for k, c in self.terms.items()},
                self.q_trunc,
                self.q_den,
                self.y_den,
            )
        a, b = _aligned(self, other)
        va = a.q_min()
        vb = b.q_min()
        t = min(
            a.q_trunc + (vb if vb is not None else b.q_trunc),
            b.q_trunc + (va if va is not None else a.q_trunc),
        )
        limit = _strict_floor(t * a.q_den)
        if not a.terms or not b.terms:
            return BiSeries._raw({}, t, a.q_den, a.y_den)
        if len(a.terms) * len(b.terms) <= _NAIVE_MUL_CUTOFF:
            terms = _mul_naive(a.terms, b.terms, limit)
        else:
            terms = _mul_packed(_group_rows(a.terms), _group_rows(b.terms), limit)
        return BiSeries._raw(terms, t, a.q_den, a.y_den)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BiSeries":
        if k < 0:
            return self.invert() ** (-k)
        v = self.q_min()
        if k == 0:
            t = self.q_trunc - (v if v is not None else 0)
            return BiSeries.one(t, self.q_den, self.y_den)
        result = None
        base = self
        while True:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if not k:
                return result
            base = base * base

    def div_scalar_exact(self, d: int) -> "BiSeries":
        terms = {}
        for k, c in self.terms.items():
            u, r = divmod(c, d)
            if r:
                raise InexactDivision(f"coefficient {c} not divisible by {d}")
            terms[k] = u
        return BiSeries._raw(terms, self.q_trunc, self.q_den, self.y_den)

    def invert(self) -> "BiSeries":
        """Reciprocal series; requires a +-y^k leading q-coefficient."""
        v = self.q_min()
        if v is None:
            raise NonUnitLeading("cannot invert the zero series")
        lead = [(yn, c) for (qn, yn), c in self.terms.items() if Fraction(qn, self.q_den) == v]
        if len(lead) != 1 or lead[0][1] not in (1, -1):
            raise NonUnitLeading(
                "leading q-coefficient must be a single term with coefficient +-1"
            )
        num = BiSeries.one(self.q_trunc - v, self.q_den, self.y_den)
        return num.div_exact(self)

    def div_exact(self, den: "BiSeries") -> "BiSeries":
        """Long division in q with exact Laurent division at every step.

        Raises :class:`InexactDivision` when some q-coefficient of the
        quotient fails to clear to an integer Laurent polynomial, which is
        how non-holomorphic quotients announce themselves.
        """
        a, d = _aligned(self, den)
        vd = d.q_min()
        if vd is None:
            raise InexactDivision("division by the zero series")
        va = a.q_min()
        if va is None:
            return BiSeries._raw({}, a.q_trunc - vd, a.q_den, a.y_den)
        t = min(a.q_trunc - vd, d.q_trunc + va - 2 * vd)
        den_rows = _group_rows(d.terms)
        vd_num = den_rows[0][0]
        d0_ymin, d0 = den_rows[0][1], den_rows[0][2]

        limit = _strict_floor(t * a.q_den)
        # residual rows, indexed by the numerator q-exponent
        resid: dict[int, dict[int, int]] = {}
        for (qn, yn), c in a.terms.items():
            resid.setdefault(qn, {})[yn] = c
        out: dict[tuple[int, int], int] = {}
        quot_rows: list[tuple[int, int, list[int]]] = []
        va_num = min(resid) if resid else 0
        for qq in range(va_num - vd_num, limit + 1):
            row = resid.pop(qq + vd_num, None)
            if not row:
                continue
            y_lo = min(row)
            y_hi = max(row)
            num_poly = [0] * (y_hi - y_lo + 1)
            for yn, c in row.items():
                num_poly[yn - y_lo] = c
            u = _poly_divexact(num_poly, d0)
            u_ymin = y_lo - d0_ymin
            while u and u[0] == 0:
                u = u[1:]
                u_ymin += 1
            while u and u[-1] == 0:
                u = u[:-1]
            if not u:
                continue
            quot_rows.append((qq, u_ymin, u))
            for yi, c in enumerate(u):
                if c:
                    out[(qq, u_ymin + yi)] = c
            # subtract u * (den minus its leading row) from the residual
            for qd, yd, cd in den_rows[1:]:
                q_t = qq + qd
                if q_t - vd_num > limit:
                    break
                prod = _poly_mul(u, cd)
                tgt = resid.setdefault(q_t, {})
                base = u_ymin + yd
                for yi, c in enumerate(prod):
                    if c:
                        v = tgt.get(base + yi, 0) - c
                        if v:
                            tgt[base + yi] = v
                        elif base + yi in tgt:
                            del tgt[base + yi]
        return BiSeries._raw(out, t, a.q_den, a.y_den)


def _aligned(a: BiSeries, b: BiSeries) -> tuple[BiSeries, BiSeries]:
    qd = lcm(a.q_den, b.q_den)
    yd = lcm(a.y_den, b.y_den)
    return a.rescaled(qd, yd), b.rescaled(qd, yd)


def linear_combination(
    coeffs: Iterable[int], series: Iterable[BiSeries]
) -> BiSeries:
    """Exact integer combination; truncation is the minimum of the inputs."""
    acc = None
    for c, s in zip(coeffs, series, strict=True):
        term = s * c
        acc = term if acc is None else acc + term
    if acc is None:
        raise ValueError("empty combination")
    return acc
