"""Exact scalar arithmetic in the real fields QQ(2cos(pi/m)).

Every exact quantity in the library is a rational combination of powers of
c = 2cos(pi/m) for a single m fixed by the reflection group: arithmetic is
done modulo the minimal polynomial of c, and the real embedding sends c to
the largest real root of that polynomial.  Rationals are arbitrary
precision; sign decisions refine an exact rational bracket of c by
bisection until the interval of the evaluated element excludes zero.

KPoly is a dense univariate polynomial over such a field.  It carries the
formal deformation parameter k through the Dunkl calculus and doubles as
the q-variable for length generating functions.
"""

from __future__ import annotations

from fractions import Fraction as _Fraction
from functools import lru_cache

import numpy as np

try:
    from gmpy2 import mpq as rat
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as rat

from .errors import FieldMismatchError, PrecisionExhaustedError

R0 = rat(0)
R1 = rat(1)

#: hard bound on bisection depth for sign decisions
MAX_SIGN_BITS = 4096

_RAT_OK = (int, type(R0), _Fraction)


def as_rational(x):
    """Coerce an int / Fraction / mpq to the internal rational type."""
    if type(x) is type(R0):
        return x
    if isinstance(x, int):
        return rat(x)
    if isinstance(x, _RAT_OK):
        return rat(x.numerator, x.denominator)
    raise TypeError(f"not a rational value: {x!r}")


def rat_str(q) -> str:
    return str(q)


# ---------------------------------------------------------------------------
# integer polynomial helpers (ascending coefficient lists)
# ---------------------------------------------------------------------------


def _ip_trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _ip_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ip_trim(out)


def _ip_divexact(num, den):
    """Exact division of integer polynomials, den monic."""
    assert den and den[-1] == 1
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, y in enumerate(den):
                num[i + j] -= c * y
    if any(num):
        raise ArithmeticError("inexact integer polynomial division")
    return _ip_trim(q)


def _dickson(m):
    """D_m with D_0 = 2, D_1 = x, D_n = x D_{n-1} - D_{n-2}; D_m(2cos t) = 2cos(mt)."""
    prev, cur = [2], [0, 1]
    for _ in range(m - 1):
        nxt = [0] + cur
        for j, y in enumerate(prev):
            nxt[j] -= y
        prev, cur = cur, _ip_trim(nxt)
    return cur if m else prev


def _qp_monic_gcd(a, b):
    """Monic gcd of two rational-coefficient polynomials (ascending lists)."""
    a = [as_rational(x) for x in a]
    b = [as_rational(x) for x in b]
    while b and any(b):
        while b and not b[-1]:
            b.pop()
        if not b:
            break
        lead = b[-1]
        while len(a) >= len(b) and any(a):
            while a and not a[-1]:
                a.pop()
            if len(a) < len(b):
                break
            f = a[-1] / lead
            off = len(a) - len(b)
            for j, y in enumerate(b):
                a[off + j] -= f * y
            while a and not a[-1]:
                a.pop()
        a, b = b, a
    while a and not a[-1]:
        a.pop()
    if not a:
        return []
    lead = a[-1]
    return [x / lead for x in a]


@lru_cache(maxsize=None)
def minimal_poly_2cos(m: int) -> tuple:
    """Monic integer minimal polynomial of 2cos(pi/m), ascending coefficients.

    2cos(pi/m) is a root of D_m(x) + 2, whose roots are 2cos((2j+1)pi/m).
    Stripping the factor (x+2) for odd m and the squared minimal polynomials
    of 2cos(pi/m') for proper divisors m' of m with 2m' not dividing m leaves
    exactly the square of the wanted polynomial; its square root is recovered
    as gcd(f, f').
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    f = _dickson(m)
    if not f:
        f = [0]
    f = list(f) + [0] * max(0, m + 1 - len(f))
    f[0] += 2
    f = _ip_trim(f)
    if m % 2:
        f = _ip_divexact(f, [2, 1])
    for mp in range(2, m):
        if m % mp == 0 and m % (2 * mp) != 0:
            g = list(minimal_poly_2cos(mp))
            f = _ip_divexact(f, _ip_mul(g, g))
    # f == h^2 with h squarefree, so h = gcd(f, f')
    deriv = [i * c for i, c in enumerate(f)][1:]
    h = _qp_monic_gcd(f, deriv)
    out = []
    for x in h:
        if x.denominator != 1:
            raise ArithmeticError("non-integral minimal polynomial candidate")
        out.append(int(x))
    if _ip_mul(out, out) != list(f):
        raise ArithmeticError("square-root extraction failed")
    return tuple(out)


# ---------------------------------------------------------------------------
# field specification
# ---------------------------------------------------------------------------


class FieldSpec:
    """QQ[x]/(p(x)) with the generator embedded as the largest real root of p."""

    __slots__ = ("name", "min_poly", "degree", "_pow", "_lo", "_hi",
                 "_zero", "_one")

    def __init__(self, min_poly, name="c"):
        mp_ = tuple(int(a) for a in min_poly)
        if len(mp_) < 2 or mp_[-1] != 1:
            raise ValueError("minimal polynomial must be monic of degree >= 1")
        self.min_poly = mp_
        self.degree = len(mp_) - 1
        self.name = name
        d = self.degree
        # reduction rows: coordinates of c^d, ..., c^(2d-2)
        rows = []
        cur = [rat(-a) for a in mp_[:-1]]
        rows.append(tuple(cur))
        for _ in range(d - 2):
            lead = cur[-1]
            cur = [R0] + cur[:-1]
            if lead:
                base = rows[0]
                cur = [cur[j] + lead * base[j] for j in range(d)]
            rows.append(tuple(cur))
        self._pow = tuple(rows)
        self._zero = (R0,) * d
        self._one = (R1,) + (R0,) * (d - 1)
        self._init_bracket()

    # -- real embedding -----------------------------------------------------

    def _peval(self, x):
        acc = R0
        for a in reversed(self.min_poly):
            acc = acc * x + a
        return acc

    def _init_bracket(self):
        if self.degree == 1:
            self._lo = self._hi = rat(-self.min_poly[0])
            return
        roots = np.roots(list(reversed(self.min_poly)))
        reals = sorted(float(z.real) for z in roots if abs(z.imag) < 1e-9)
        x0 = reals[-1]
        gap = (x0 - reals[-2]) if len(reals) >= 2 else 1.0
        h = max(gap / 4.0, 1e-12)
        for _ in range(60):
            lo, hi = rat(x0 - h), rat(x0 + h)
            if self._peval(lo) < 0 < self._peval(hi):
                self._lo, self._hi = lo, hi
                return
            h /= 2.0
        raise ValueError("could not bracket the largest real root")

    def refine_to(self, bits):
        """Shrink the generator bracket to width <= 2^-bits (exact bisection)."""
        if self.degree == 1:
            return
        target = rat(1, 1 << bits)
        lo, hi = self._lo, self._hi
        while hi - lo > target:
            mid = (lo + hi) / 2
            s = self._peval(mid)
            if s > 0:
                hi = mid
            elif s < 0:
                lo = mid
            else:  # pragma: no cover - irreducible p has no rational root
                lo = hi = mid
                break
        self._lo, self._hi = lo, hi

    def generator_interval(self, bits):
        self.refine_to(bits)
        return self._lo, self._hi

    # -- raw coordinate-tuple arithmetic -------------------------------------

    def raw_zero(self):
        return self._zero

    def raw_one(self):
        return self._one

    def raw_from_rational(self, q):
        q = as_rational(q)
        if self.degree == 1:
            return (q,)
        return (q,) + (R0,) * (self.degree - 1)

    def raw_add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def raw_sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def raw_neg(self, a):
        return tuple(-x for x in a)

    def raw_scale(self, a, q):
        return tuple(x * q for x in a)

    def raw_mul(self, a, b):
        d = self.degree
        if d == 1:
            return (a[0] * b[0],)
        prod = [R0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        pow_ = self._pow
        for i in range(2 * d - 2, d - 1, -1):
            c = prod[i]
            if c:
                row = pow_[i - d]
                for j in range(d):
                    prod[j] += c * row[j]
        return tuple(prod[:d])

    def raw_inv(self, a):
        if not any(a):
            raise ZeroDivisionError("field inverse of zero")
        if self.degree == 1:
            return (R1 / a[0],)
        # extended Euclid: s*a + t*p = g with g a nonzero constant
        p = [rat(x) for x in self.min_poly]
        r0, r1 = p, list(a)
        s0, s1 = [R0], [R1]
        while True:
            while r1 and not r1[-1]:
                r1.pop()
            if len(r1) == 1:
                break
            if not r1:
                raise ZeroDivisionError("zero divisor in field inverse")
            lead = r1[-1]
            q = [R0] * (len(r0) - len(r1) + 1)
            rem = list(r0)
            for i in range(len(q) - 1, -1, -1):
                c = rem[i + len(r1) - 1] / lead
                q[i] = c
                if c:
                    for j, y in enumerate(r1):
                        rem[i + j] -= c * y
            while rem and not rem[-1]:
                rem.pop()
            # s_next = s0 - q*s1
            qs1 = [R0] * (len(q) + len(s1) - 1)
            for i, x in enumerate(q):
                if x:
                    for j, y in enumerate(s1):
                        qs1[i + j] += x * y
            snext = [R0] * max(len(s0), len(qs1))
            for i, x in enumerate(s0):
                snext[i] += x
            for i, x in enumerate(qs1):
                snext[i] -= x
            r0, r1 = r1, rem
            s0, s1 = s1, snext
        g = r1[0]
        inv = [x / g for x in s1]
        inv = inv[:self.degree] + [R0] * max(0, self.degree - len(inv))
        # reduce modulo p in case deg(s) >= degree (cannot happen, but be safe)
        return tuple(inv[:self.degree])

    def raw_div(self, a, b):
        return self.raw_mul(a, self.raw_inv(b))

    def raw_is_zero(self, a):
        return not any(a)

    # -- interval evaluation and signs ---------------------------------------

    def raw_interval(self, a, bits):
        """Exact rational interval enclosing sum(a_i c^i) at generator width 2^-bits."""
        if self.degree == 1:
            return a[0], a[0]
        lo, hi = self.generator_interval(bits)
        alo = ahi = a[-1]
        for coeff in reversed(a[:-1]):
            p1, p2, p3, p4 = alo * lo, alo * hi, ahi * lo, ahi * hi
            alo = min(p1, p2, p3, p4) + coeff
            ahi = max(p1, p2, p3, p4) + coeff
        return alo, ahi

    def raw_sign(self, a):
        if not any(a):
            return 0
        if self.degree == 1:
            return 1 if a[0] > 0 else -1
        bits = 64
        while bits <= MAX_SIGN_BITS:
            lo, hi = self.raw_interval(a, bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits <<= 1
        raise PrecisionExhaustedError(
            f"sign undecided at {MAX_SIGN_BITS} bits for {a!r}")

    def raw_embed(self, a, precision_bits):
        """Interval of width <= 2^-precision_bits * max(1, |value|)."""
        if self.degree == 1 or not any(a):
            v = a[0] if a else R0
            return v, v
        bits = max(64, precision_bits)
        while True:
            lo, hi = self.raw_interval(a, bits)
            mid = (lo + hi) / 2
            bound = max(R1, abs(mid)) / (1 << precision_bits)
            if hi - lo <= bound:
                return lo, hi
            if bits > precision_bits + MAX_SIGN_BITS:  # pragma: no cover
                raise PrecisionExhaustedError("embedding refinement diverged")
            bits <<= 1

    def raw_float(self, a):
        lo, hi = self.raw_embed(a, 60)
        return float((lo + hi) / 2)

    # -- misc ----------------------------------------------------------------

    def element(self, *coords):
        co = [as_rational(x) for x in coords]
        co += [R0] * (self.degree - len(co))
        if len(co) != self.degree:
            raise ValueError("too many coordinates")
        return FieldElement(self, tuple(co))

    def zero(self):
        return FieldElement(self, self._zero)

    def one(self):
        return FieldElement(self, self._one)

    def gen(self):
        """The generator c as a field element."""
        if self.degree == 1:
            return FieldElement(self, (rat(-self.min_poly[0]),))
        co = [R0] * self.degree
        co[1] = R1
        return FieldElement(self, tuple(co))

    def from_rational(self, q):
        return FieldElement(self, self.raw_from_rational(q))

    def __repr__(self):
        return f"FieldSpec(min_poly={self.min_poly}, name={self.name!r})"


def _compatible(s1, s2):
    return s1 is s2 or s1.min_poly == s2.min_poly


@lru_cache(maxsize=None)
def cos_field(m: int) -> FieldSpec:
    """The field QQ(2cos(pi/m)) with its designated real embedding."""
    return FieldSpec(minimal_poly_2cos(m))


# ---------------------------------------------------------------------------
# field elements
# ---------------------------------------------------------------------------


class FieldElement:
    """Immutable element of a FieldSpec, stored in reduced coordinates."""

    __slots__ = ("spec", "co")

    def __init__(self, spec, co):
        self.spec = spec
        self.co = co

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if not _compatible(self.spec, other.spec):
                raise FieldMismatchError(
                    f"mixed fields {self.spec.min_poly} vs {other.spec.min_poly}")
            return other.co
        if isinstance(other, _RAT_OK):
            return self.spec.raw_from_rational(other)
        return None

    def __add__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        return FieldElement(self.spec, self.spec.raw_add(self.co, oc))

    __radd__ = __add__

    def __sub__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        return FieldElement(self.spec, self.spec.raw_sub(self.co, oc))

    def __rsub__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        return FieldElement(self.spec, self.spec.raw_sub(oc, self.co))

    def __mul__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        return FieldElement(self.spec, self.spec.raw_mul(self.co, oc))

    __rmul__ = __mul__

    def __truediv__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        return FieldElement(self.spec, self.spec.raw_div(self.co, oc))

    def __rtruediv__(self, other):
        oc = self._coerce(other)
        if oc is None:
            return NotImplemented
        return FieldElement(self.spec, self.spec.raw_div(oc, self.co))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.raw_neg(self.co))

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = self.spec.raw_one()
        base = self.co
        while n:
            if n & 1:
                out = self.spec.raw_mul(out, base)
            base = self.spec.raw_mul(base, base)
            n >>= 1
        return FieldElement(self.spec, out)

    def __eq__(self, other):
        oc = self._coerce(other) if not isinstance(other, FieldElement) else None
        if isinstance(other, FieldElement):
            if not _compatible(self.spec, other.spec):
                return False
            return self.co == other.co
        if oc is None:
            return NotImplemented
        return self.co == oc

    def __hash__(self):
        return hash((self.spec.min_poly, self.co))

    def __bool__(self):
        return any(self.co)

    def sign(self):
        return self.spec.raw_sign(self.co)

    def real_interval(self, precision_bits=53):
        """Exact rational enclosure of the embedded value."""
        if precision_bits < 1:
            raise ValueError("precision_bits must be positive")
        return self.spec.raw_embed(self.co, precision_bits)

    def __float__(self):
        return self.spec.raw_float(self.co)

    def is_rational(self):
        return all(not x for x in self.co[1:])

    def rational(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.co[0]

    def __str__(self):
        if self.spec.degree == 1 or self.is_rational():
            return rat_str(self.co[0])
        name = self.spec.name
        parts = []
        for i in range(self.spec.degree - 1, -1, -1):
            q = self.co[i]
            if not q:
                continue
            if i == 0:
                mono = ""
            elif i == 1:
                mono = name
            else:
                mono = f"{name}^{i}"
            if not mono:
                s = rat_str(q)
            elif q == 1:
                s = mono
            elif q == -1:
                s = f"-{mono}"
            else:
                s = f"{rat_str(q)}*{mono}"
            parts.append(s)
        out = parts[0]
        for s in parts[1:]:
            out += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
        return out

    def __repr__(self):
        return f"<{self}>"


def real_embed(a: FieldElement, precision_bits: int):
    """Enclosing interval of a under the designated embedding."""
    return a.real_interval(precision_bits)


# ---------------------------------------------------------------------------
# univariate polynomials over a field
# ---------------------------------------------------------------------------


def _norm_raw_coeffs(spec, co):
    co = list(co)
    while co and spec.raw_is_zero(co[-1]):
        co.pop()
    return tuple(co)


class KPoly:
    """Dense univariate polynomial over a FieldSpec (formal parameter k or q)."""

    __slots__ = ("spec", "co")

    def __init__(self, spec, raw_coeffs):
        self.spec = spec
        self.co = _norm_raw_coeffs(spec, raw_coeffs)

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, spec):
        return cls(spec, ())

    @classmethod
    def one(cls, spec):
        return cls(spec, (spec.raw_one(),))

    @classmethod
    def const(cls, spec, value):
        if isinstance(value, FieldElement):
            if not _compatible(spec, value.spec):
                raise FieldMismatchError("constant from a different field")
            return cls(spec, (value.co,))
        return cls(spec, (spec.raw_from_rational(value),))

    @classmethod
    def gen(cls, spec):
        return cls(spec, (spec.raw_zero(), spec.raw_one()))

    @classmethod
    def from_coeffs(cls, spec, values):
        """Ascending coefficients given as rationals or FieldElements."""
        raw = []
        for v in values:
            if isinstance(v, FieldElement):
                raw.append(v.co)
            else:
                raw.append(spec.raw_from_rational(v))
        return cls(spec, raw)

    # -- structure -----------------------------------------------------------

    @property
    def degree(self):
        return len(self.co) - 1

    def is_zero(self):
        return not self.co

    def coeff(self, i):
        if 0 <= i < len(self.co):
            return FieldElement(self.spec, self.co[i])
        return FieldElement(self.spec, self.spec.raw_zero())

    def leading(self):
        if not self.co:
            return FieldElement(self.spec, self.spec.raw_zero())
        return FieldElement(self.spec, self.co[-1])

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, KPoly):
            if not _compatible(self.spec, other.spec):
                raise FieldMismatchError("mixed fields in polynomial arithmetic")
            return other
        if isinstance(other, FieldElement) or isinstance(other, _RAT_OK):
            return KPoly.const(self.spec, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.co), len(o.co))
        sp = self.spec
        out = []
        for i in range(n):
            a = self.co[i] if i < len(self.co) else sp.raw_zero()
            b = o.co[i] if i < len(o.co) else sp.raw_zero()
            out.append(sp.raw_add(a, b))
        return KPoly(sp, out)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        sp = self.spec
        return KPoly(sp, [sp.raw_neg(a) for a in self.co])

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        sp = self.spec
        if not self.co or not o.co:
            return KPoly.zero(sp)
        out = [sp.raw_zero()] * (len(self.co) + len(o.co) - 1)
        for i, a in enumerate(self.co):
            if sp.raw_is_zero(a):
                continue
            for j, b in enumerate(o.co):
                if sp.raw_is_zero(b):
                    continue
                out[i + j] = sp.raw_add(out[i + j], sp.raw_mul(a, b))
        return KPoly(sp, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = KPoly.one(self.spec)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, n):
        """Multiply by the n-th power of the variable."""
        if not self.co:
            return self
        return KPoly(self.spec, (self.spec.raw_zero(),) * n + self.co)

    def __call__(self, x):
        sp = self.spec
        if isinstance(x, FieldElement):
            if not _compatible(sp, x.spec):
                raise FieldMismatchError("evaluation point from a different field")
            xr = x.co
        else:
            xr = sp.raw_from_rational(x)
        acc = sp.raw_zero()
        for a in reversed(self.co):
            acc = sp.raw_add(sp.raw_mul(acc, xr), a)
        return FieldElement(sp, acc)

    def divmod(self, other):
        o = self._coerce(other)
        if o is None or not isinstance(o, KPoly):
            raise TypeError("divmod by non-polynomial")
        sp = self.spec
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.co)
        dq = len(self.co) - len(o.co)
        if dq < 0:
            return KPoly.zero(sp), self
        inv_lead = sp.raw_inv(o.co[-1])
        q = [sp.raw_zero()] * (dq + 1)
        for i in range(dq, -1, -1):
            c = sp.raw_mul(rem[i + len(o.co) - 1], inv_lead)
            q[i] = c
            if not sp.raw_is_zero(c):
                for j, y in enumerate(o.co):
                    rem[i + j] = sp.raw_sub(rem[i + j], sp.raw_mul(c, y))
        return KPoly(sp, q), KPoly(sp, rem[:len(o.co) - 1])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self):
        if self.is_zero():
            return self
        sp = self.spec
        inv = sp.raw_inv(self.co[-1])
        return KPoly(sp, [sp.raw_mul(a, inv) for a in self.co])

    def __eq__(self, other):
        if isinstance(other, KPoly):
            return _compatible(self.spec, other.spec) and self.co == other.co
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.co == o.co

    def __hash__(self):
        return hash((self.spec.min_poly, self.co))

    def is_rational_coeffs(self):
        return all(not any(a[1:]) for a in self.co)

    def to_string(self, var="k"):
        if not self.co:
            return "0"
        parts = []
        for i in range(len(self.co) - 1, -1, -1):
            a = self.co[i]
            if self.spec.raw_is_zero(a):
                continue
            fe = FieldElement(self.spec, a)
            if i == 0:
                mono = ""
            elif i == 1:
                mono = var
            else:
                mono = f"{var}^{i}"
            cs = str(fe)
            plain = fe.is_rational()
            if not mono:
                s = cs if plain else f"({cs})"
            elif plain and a[0] == 1:
                s = mono
            elif plain and a[0] == -1:
                s = f"-{mono}"
            elif plain:
                s = f"{cs}{mono}"
            else:
                s = f"({cs})*{mono}"
            parts.append(s)
        out = parts[0]
        for s in parts[1:]:
            out += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
        return out

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"<KPoly {self.to_string()}>"


def kpoly_gcd(a: KPoly, b: KPoly) -> KPoly:
    """Monic gcd over the coefficient field."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()
