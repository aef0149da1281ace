"""Exact scalar arithmetic for the three supported coefficient domains.

A scalar lives in one of:

  * the rationals,
  * a real number field  Q[x]/(p)  with a designated real root of p, or
  * the field of rational functions in one positive real parameter.

All values are kept in canonical form (reduced fractions with positive
denominators, number-field elements reduced modulo the minimal polynomial,
rational functions as coprime fractions with monic denominators), so scalar
equality is equality of canonical encodings.

Scalars are read and written in a small expression grammar:

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' integer)?
    base   := rational | symbol | '(' expr ')'

where ``symbol`` is the generator/parameter name declared by the domain.
"""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional

__all__ = [
    "DomainMismatchError",
    "IndeterminateSignError",
    "NumberFieldDomain",
    "RationalDomain",
    "RationalFunctionDomain",
    "Scalar",
    "ScalarDomain",
    "ScalarSyntaxError",
    "parse_scalar",
]

_F0 = Fraction(0)
_F1 = Fraction(1)


class ScalarSyntaxError(ValueError):
    """Raised on malformed scalar text; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DomainMismatchError(TypeError):
    """Raised when an operation mixes scalars from different domains."""


class IndeterminateSignError(ArithmeticError):
    """Raised when a parameter-field sign cannot be decided symbolically."""


# ---------------------------------------------------------------------------
# polynomial helpers over Fraction coefficient tuples (low degree first)
# ---------------------------------------------------------------------------

def _ptrim(coeffs):
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _ptrim(out)


def _pneg(a):
    return tuple(-c for c in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [_F0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return _ptrim(out)


def _pdivmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [_F0] * max(0, len(a) - len(b) + 1)
    lead = b[-1]
    while len(_ptrim(a)) >= len(b):
        a = list(_ptrim(a))
        shift = len(a) - len(b)
        factor = a[-1] / lead
        q[shift] = factor
        for i, c in enumerate(b):
            a[shift + i] -= factor * c
    return _ptrim(q), _ptrim(a)


def _pmonic(a):
    if not a:
        return a
    lead = a[-1]
    if lead == 1:
        return a
    return tuple(c / lead for c in a)


def _pgcd(a, b):
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return _pmonic(a)


def _peval(coeffs, x):
    acc = _F0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _peval_interval(coeffs, lo, hi):
    """Horner evaluation with exact interval arithmetic; returns (lo, hi)."""
    if not coeffs:
        return _F0, _F0
    rlo = rhi = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        prods = (rlo * lo, rlo * hi, rhi * lo, rhi * hi)
        rlo = min(prods) + c
        rhi = max(prods) + c
    return rlo, rhi


def _as_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (str, Decimal)):
        return Fraction(str(value))
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def _fraction_to_decimal(value, precision):
    with localcontext() as ctx:
        ctx.prec = precision + 5
        return Decimal(value.numerator) / Decimal(value.denominator)


def _rational_text(q):
    return str(q)


def _poly_text(coeffs, symbol):
    """Render a coefficient tuple as grammar text, highest power first."""
    if not coeffs:
        return "0"
    pieces = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if not c:
            continue
        if k == 0:
            body = _rational_text(abs(c))
        else:
            base = symbol if k == 1 else f"{symbol}^{k}"
            body = base if abs(c) == 1 else f"{_rational_text(abs(c))}*{base}"
        if not pieces:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append((" - " if c < 0 else " + ") + body)
    return "".join(pieces)


def _poly_term_count(coeffs):
    return sum(1 for c in coeffs if c)


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------

class ScalarDomain:
    """Base class for the three coefficient domains."""

    kind = "abstract"
    generator_symbol: Optional[str] = None

    # -- construction ------------------------------------------------------

    def scalar(self, value) -> "Scalar":
        """Coerce an int, Fraction, decimal string, or grammar text."""
        if isinstance(value, Scalar):
            if value.domain != self:
                raise DomainMismatchError(
                    f"scalar from {value.domain.describe()} used in {self.describe()}")
            return value
        if isinstance(value, str):
            return parse_scalar(value, self)
        return Scalar(self, self._from_fraction(_as_fraction(value)))

    def zero(self) -> "Scalar":
        return self.scalar(0)

    def one(self) -> "Scalar":
        return self.scalar(1)

    def generator(self) -> "Scalar":
        raise ValueError(f"{self.describe()} has no generator symbol")

    def describe(self) -> str:
        raise NotImplementedError

    # -- payload operations, implemented per domain -------------------------

    def _from_fraction(self, q):
        raise NotImplementedError

    def _add(self, a, b):
        raise NotImplementedError

    def _neg(self, a):
        raise NotImplementedError

    def _mul(self, a, b):
        raise NotImplementedError

    def _inv(self, a):
        raise NotImplementedError

    def _is_zero(self, a):
        raise NotImplementedError

    def _text(self, a):
        raise NotImplementedError

    def _as_rational(self, a):
        """Return the payload as a Fraction if it is rational, else None."""
        raise NotImplementedError

    def _sign(self, a, parameter_sample=None):
        raise NotImplementedError

    def _eval(self, a, precision, parameter_sample=None):
        raise NotImplementedError


class RationalDomain(ScalarDomain):
    """The field of rational numbers."""

    kind = "rational"

    def describe(self):
        return "rational numbers"

    def __eq__(self, other):
        return isinstance(other, RationalDomain)

    def __hash__(self):
        return hash(("rational",))

    def __repr__(self):
        return "RationalDomain()"

    def _from_fraction(self, q):
        return q

    def _add(self, a, b):
        return a + b

    def _neg(self, a):
        return -a

    def _mul(self, a, b):
        return a * b

    def _inv(self, a):
        if not a:
            raise ZeroDivisionError("inversion of zero scalar")
        return 1 / a

    def _is_zero(self, a):
        return not a

    def _text(self, a):
        return _rational_text(a)

    def _as_rational(self, a):
        return a

    def _sign(self, a, parameter_sample=None):
        return (a > 0) - (a < 0)

    def _eval(self, a, precision, parameter_sample=None):
        return _fraction_to_decimal(a, precision)


class NumberFieldDomain(ScalarDomain):
    """Q[x]/(p) embedded at a designated real root of the monic poly p.

    ``min_poly`` lists coefficients from the constant term up and must be
    monic of degree >= 2.  ``embedding_approx`` is a decimal close enough to
    the intended root to isolate it; the root is then refined by exact
    interval bisection on demand.  Elements are coefficient tuples of fixed
    length deg(p), reduced modulo p.
    """

    kind = "number_field"

    def __init__(self, min_poly, generator_symbol, embedding_approx):
        coeffs = tuple(_as_fraction(c) for c in min_poly)
        coeffs = _ptrim(coeffs)
        if len(coeffs) < 3:
            raise ValueError("min_poly must have degree >= 2")
        if coeffs[-1] != 1:
            raise ValueError("min_poly must be monic")
        self.min_poly = coeffs
        self.degree = len(coeffs) - 1
        self.generator_symbol = generator_symbol
        self.embedding_approx = _as_fraction(embedding_approx)
        # reduction rows for x^deg .. x^(2 deg - 2)
        rows = []
        current = tuple(-c for c in coeffs[:-1])  # x^deg mod p
        rows.append(current)
        for _ in range(self.degree - 2):
            shifted = (_F0,) + current
            reduce_c = shifted[self.degree] if len(shifted) > self.degree else _F0
            nxt = list(shifted[: self.degree])
            if reduce_c:
                for i, r in enumerate(rows[0]):
                    nxt[i] += reduce_c * r
            current = tuple(nxt)
            rows.append(current)
        self._reduction = rows
        self._root_lo, self._root_hi = self._isolate_root()

    def _isolate_root(self):
        p = self.min_poly
        approx = self.embedding_approx
        if not _peval(p, approx):
            # the approximation is itself an exact rational root
            return approx, approx
        for exponent in range(12, -1, -1):
            radius = Fraction(1, 10 ** exponent)
            lo, hi = approx - radius, approx + radius
            flo, fhi = _peval(p, lo), _peval(p, hi)
            if not flo:
                return lo, lo
            if not fhi:
                return hi, hi
            if (flo < 0) != (fhi < 0):
                # refine until the residual at the midpoint certifies the root win
                for _ in range(40):
                    lo, hi = self._bisect_once(lo, hi)
                mid = (lo + hi) / 2
                if abs(_peval(p, mid)) >= Fraction(1, 10 ** 8):
                    raise ValueError(
                        "embedding_approx does not refine to a root of min_poly")
                return lo, hi
        raise ValueError("embedding_approx does not isolate a real root of min_poly")

    def _bisect_once(self, lo, hi):
        p = self.min_poly
        mid = (lo + hi) / 2
        fmid = _peval(p, mid)
        if not fmid:
            return mid, mid
        if (fmid < 0) == (_peval(p, lo) < 0):
            return mid, hi
        return lo, mid

    def root_interval(self, width):
        """Shrink and return the cached isolating interval to the given width."""
        lo, hi = self._root_lo, self._root_hi
        while hi - lo > width:
            lo, hi = self._bisect_once(lo, hi)
        self._root_lo, self._root_hi = lo, hi
        return lo, hi

    def describe(self):
        return (f"number field Q({self.generator_symbol}), "
                f"min_poly {_poly_text(self.min_poly, 'x')}")

    def __eq__(self, other):
        return (isinstance(other, NumberFieldDomain)
                and self.min_poly == other.min_poly
                and self.generator_symbol == other.generator_symbol
                and self.embedding_approx == other.embedding_approx)

    def __hash__(self):
        return hash((self.min_poly, self.generator_symbol, self.embedding_approx))

    def __repr__(self):
        return (f"NumberFieldDomain({list(self.min_poly)}, "
                f"{self.generator_symbol!r}, {float(self.embedding_approx)})")

    def generator(self):
        payload = tuple(_F1 if i == 1 else _F0 for i in range(self.degree))
        return Scalar(self, payload)

    def _from_fraction(self, q):
        return (q,) + (_F0,) * (self.degree - 1)

    def _add(self, a, b):
        if not any(a):
            return b
        if not any(b):
            return a
        return tuple(x + y for x, y in zip(a, b))

    def _neg(self, a):
        return tuple(-x for x in a)

    def _mul(self, a, b):
        # rational factors skip the convolution entirely
        if not any(a[1:]):
            c = a[0]
            if not c:
                return a
            if c == 1:
                return b
            return tuple(x * c for x in b)
        if not any(b[1:]):
            c = b[0]
            if not c:
                return b
            if c == 1:
                return a
            return tuple(x * c for x in a)
        deg = self.degree
        acc = [_F0] * (2 * deg - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        acc[i + j] += ai * bj
        for k in range(2 * deg - 2, deg - 1, -1):
            c = acc[k]
            if c:
                for i, r in enumerate(self._reduction[k - deg]):
                    if r:
                        acc[i] += c * r
        return tuple(acc[:deg])

    def _inv(self, a):
        if self._is_zero(a):
            raise ZeroDivisionError("inversion of zero scalar")
        # extended Euclid in Q[x] against the minimal polynomial
        r0, r1 = self.min_poly, _ptrim(a)
        s0, s1 = (), (_F1,)
        while r1:
            q, r = _pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _padd(s0, _pneg(_pmul(q, s1)))
        if len(r0) != 1:
            raise ZeroDivisionError(
                "zero divisor encountered; min_poly is reducible")
        scale = 1 / r0[0]
        inv = tuple(c * scale for c in s0)
        return tuple(inv[i] if i < len(inv) else _F0 for i in range(self.degree))

    def _is_zero(self, a):
        return not any(a)

    def _text(self, a):
        return _poly_text(_ptrim(a), self.generator_symbol)

    def _as_rational(self, a):
        if any(a[1:]):
            return None
        return a[0]

    def _sign(self, a, parameter_sample=None):
        if self._is_zero(a):
            return 0
        coeffs = _ptrim(a)
        if len(coeffs) == 1:
            return 1 if coeffs[0] > 0 else -1
        lo, hi = self.root_interval(Fraction(1, 10 ** 12))
        for _ in range(300):
            vlo, vhi = _peval_interval(coeffs, lo, hi)
            if vlo > 0:
                return 1
            if vhi < 0:
                return -1
            if lo == hi:
                break
            lo, hi = self._bisect_once(lo, hi)
            self._root_lo, self._root_hi = lo, hi
        raise ArithmeticError(
            "cannot separate value from zero; is min_poly irreducible?")

    def _eval(self, a, precision, parameter_sample=None):
        rational = self._as_rational(a)
        if rational is not None:
            return _fraction_to_decimal(rational, precision)
        coeffs = _ptrim(a)
        goal = Fraction(1, 10 ** precision)
        lo, hi = self.root_interval(Fraction(1, 10 ** (precision + 2)))
        for _ in range(20000):
            vlo, vhi = _peval_interval(coeffs, lo, hi)
            mag = max(abs(vlo), abs(vhi))
            if mag and (vhi - vlo) <= mag * goal:
                return _fraction_to_decimal((vlo + vhi) / 2, precision)
            if lo == hi:
                return _fraction_to_decimal(vlo, precision)
            lo, hi = self._bisect_once(lo, hi)
            self._root_lo, self._root_hi = lo, hi
        raise ArithmeticError("interval evaluation failed to converge")


class RationalFunctionDomain(ScalarDomain):
    """Rational functions in one parameter, assumed to be a positive real.

    Elements are coprime fractions of rational-coefficient polynomials with
    monic denominators.  Signs are decided symbolically only when numerator
    and denominator each have single-signed coefficients; otherwise callers
    must supply a sample value for the parameter.
    """

    kind = "rational_function"

    def __init__(self, generator_symbol, parameter_positivity=True,
                 default_sample=None):
        self.generator_symbol = generator_symbol
        self.parameter_positivity = bool(parameter_positivity)
        self.default_sample = None if default_sample is None else _as_fraction(default_sample)
        if self.parameter_positivity and self.default_sample is not None:
            if self.default_sample <= 0:
                raise ValueError("default_sample must be positive")

    def describe(self):
        positivity = " > 0" if self.parameter_positivity else ""
        return f"rational functions in {self.generator_symbol}{positivity}"

    def __eq__(self, other):
        return (isinstance(other, RationalFunctionDomain)
                and self.generator_symbol == other.generator_symbol
                and self.parameter_positivity == other.parameter_positivity)

    def __hash__(self):
        return hash((self.generator_symbol, self.parameter_positivity))

    def __repr__(self):
        return (f"RationalFunctionDomain({self.generator_symbol!r}, "
                f"positive={self.parameter_positivity})")

    def generator(self):
        return Scalar(self, ((_F0, _F1), (_F1,)))

    def _normalize(self, num, den):
        num, den = _ptrim(num), _ptrim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return ((), (_F1,))
        g = _pgcd(num, den)
        if len(g) > 1:
            num = _pdivmod(num, g)[0]
            den = _pdivmod(den, g)[0]
        lead = den[-1]
        if lead != 1:
            num = tuple(c / lead for c in num)
            den = tuple(c / lead for c in den)
        return (num, den)

    def _from_fraction(self, q):
        if not q:
            return ((), (_F1,))
        return ((q,), (_F1,))

    def _add(self, a, b):
        (n1, d1), (n2, d2) = a, b
        return self._normalize(_padd(_pmul(n1, d2), _pmul(n2, d1)), _pmul(d1, d2))

    def _neg(self, a):
        return (_pneg(a[0]), a[1])

    def _mul(self, a, b):
        (n1, d1), (n2, d2) = a, b
        return self._normalize(_pmul(n1, n2), _pmul(d1, d2))

    def _inv(self, a):
        num, den = a
        if not num:
            raise ZeroDivisionError("inversion of zero scalar")
        return self._normalize(den, num)

    def _is_zero(self, a):
        return not a[0]

    def _text(self, a):
        num, den = a
        if den == (_F1,):
            return _poly_text(num, self.generator_symbol)
        num_txt = _poly_text(num, self.generator_symbol)
        if _poly_term_count(num) > 1:
            num_txt = f"({num_txt})"
        den_txt = _poly_text(den, self.generator_symbol)
        if _poly_term_count(den) > 1:
            den_txt = f"({den_txt})"
        return f"{num_txt}/{den_txt}"

    def _as_rational(self, a):
        num, den = a
        if den != (_F1,) or len(num) > 1:
            return None
        return num[0] if num else _F0

    def _single_signed(self, coeffs):
        """+1 / -1 when all coefficients share a sign, else None."""
        if all(c >= 0 for c in coeffs):
            return 1
        if all(c <= 0 for c in coeffs):
            return -1
        return None

    def _sample_value(self, a, sample):
        num, den = a
        dval = _peval(den, sample)
        if not dval:
            raise ZeroDivisionError(
                f"denominator vanishes at sample {sample}")
        return _peval(num, sample) / dval

    def _sign(self, a, parameter_sample=None):
        if self._is_zero(a):
            return 0
        if parameter_sample is not None:
            value = self._sample_value(a, _as_fraction(parameter_sample))
            return (value > 0) - (value < 0)
        if not self.parameter_positivity:
            raise IndeterminateSignError(
                "sign undecidable without the positivity assumption or a sample")
        num, den = a
        num_sign = self._single_signed(num)
        den_sign = self._single_signed(den)
        if num_sign is None or den_sign is None:
            raise IndeterminateSignError(
                f"sign of {self._text(a)} depends on the value of "
                f"{self.generator_symbol}; supply a parameter sample")
        return num_sign * den_sign

    def _eval(self, a, precision, parameter_sample=None):
        sample = parameter_sample if parameter_sample is not None else self.default_sample
        if sample is None:
            raise ValueError(
                "numeric evaluation over a parameter field needs a sample value")
        return _fraction_to_decimal(self._sample_value(a, _as_fraction(sample)), precision)

    def substitute(self, scalar: "Scalar", value) -> "Scalar":
        """Exact specialization of the parameter; lands in the rationals."""
        if scalar.domain != self:
            raise DomainMismatchError("scalar does not belong to this domain")
        return RationalDomain().scalar(self._sample_value(scalar.payload, _as_fraction(value)))


# ---------------------------------------------------------------------------
# scalar values
# ---------------------------------------------------------------------------

class Scalar:
    """An immutable element of a ScalarDomain, always in canonical form."""

    __slots__ = ("domain", "payload")

    def __init__(self, domain, payload):
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "payload", payload)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.domain != self.domain:
                raise DomainMismatchError(
                    f"cannot mix {self.domain.describe()} with {other.domain.describe()}")
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(self.domain, self.domain._from_fraction(_as_fraction(other)))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.domain, self.domain._add(self.payload, other.payload))

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.domain, self.domain._neg(self.payload))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.domain, self.domain._add(self.payload,
                                                    self.domain._neg(other.payload)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.domain, self.domain._mul(self.payload, other.payload))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.domain.one()
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        return Scalar(self.domain, self.domain._inv(self.payload))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.domain == other.domain and self.payload == other.payload

    def __hash__(self):
        return hash((self.domain, self.payload))

    def __bool__(self):
        return not self.domain._is_zero(self.payload)

    def is_zero(self):
        return self.domain._is_zero(self.payload)

    def as_rational(self):
        """The value as a Fraction when it is rational, else None."""
        return self.domain._as_rational(self.payload)

    def is_integer(self):
        q = self.as_rational()
        return q is not None and q.denominator == 1

    def sign(self, parameter_sample=None):
        """Exact sign in {-1, 0, 1}."""
        return self.domain._sign(self.payload, parameter_sample)

    def eval_numeric(self, precision=15, parameter_sample=None) -> Decimal:
        """Decimal approximation with relative error below 10**-precision."""
        return self.domain._eval(self.payload, precision, parameter_sample)

    def text(self):
        """Canonical grammar text; parsing it back reproduces the scalar."""
        return self.domain._text(self.payload)

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"Scalar({self.text()!r})"


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_OPERATORS = set("+-*/^()")


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        if ch in _OPERATORS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        raise ScalarSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens, domain):
        self.tokens = tokens
        self.pos = 0
        self.domain = domain

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect_op(self, op):
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            raise ScalarSyntaxError(f"expected {op!r}", pos)
        return self.take()

    def parse_expr(self):
        kind, value, _ = self.peek()
        negate = False
        if kind == "op" and value in "+-":
            self.take()
            negate = value == "-"
        result = self.parse_term()
        if negate:
            result = -result
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.take()
                rhs = self.parse_term()
                result = result + rhs if value == "+" else result - rhs
            else:
                return result

    def parse_term(self):
        result = self.parse_factor()
        while True:
            kind, value, pos = self.peek()
            if kind == "op" and value in "*/":
                self.take()
                rhs = self.parse_factor()
                if value == "/":
                    if rhs.is_zero():
                        raise ScalarSyntaxError("division by a zero scalar", pos)
                    result = result / rhs
                else:
                    result = result * rhs
            else:
                return result

    def parse_factor(self):
        base = self.parse_base()
        kind, value, pos = self.peek()
        if kind == "op" and value == "^":
            self.take()
            sign = 1
            kind, value, pos = self.peek()
            if kind == "op" and value == "-":
                self.take()
                sign = -1
                kind, value, pos = self.peek()
            if kind != "num":
                raise ScalarSyntaxError("expected an integer exponent", pos)
            self.take()
            exponent = sign * int(value)
            if exponent < 0 and base.is_zero():
                raise ScalarSyntaxError("division by a zero scalar", pos)
            return base ** exponent
        return base

    def parse_base(self):
        kind, value, pos = self.take()
        if kind == "num":
            return self.domain.scalar(int(value))
        if kind == "name":
            if value != self.domain.generator_symbol:
                raise ScalarSyntaxError(
                    f"symbol {value!r} does not belong to {self.domain.describe()}", pos)
            return self.domain.generator()
        if kind == "op" and value == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise ScalarSyntaxError(
            "expected a number, symbol, or parenthesized expression", pos)


def parse_scalar(text: str, domain: ScalarDomain) -> Scalar:
    """Parse grammar text into a canonical Scalar of the given domain."""
    parser = _Parser(_tokenize(text), domain)
    result = parser.parse_expr()
    kind, value, pos = parser.peek()
    if kind != "end":
        raise ScalarSyntaxError(f"unexpected trailing input {value!r}", pos)
    return result
