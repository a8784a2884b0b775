"""Exact coefficient fields, univariate polynomials and rational functions.

Two coefficient domains are supported: the rationals (elements are
``fractions.Fraction``) and prime fields GF(p) (elements are ints in
``[0, p)``).  A polynomial is an immutable ascending tuple of coefficients
with no trailing zeros; the zero polynomial is the empty tuple and its
degree is a distinguished minus-infinity marker.  Rational functions are
reduced fractions of polynomials with a monic denominator.

All arithmetic is exact.  GF(p) products and divisions switch to numpy
int64 kernels above a size cutoff, which is what makes long divisibility
sequences affordable; correctness never depends on the fast path.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import ZeroInput, ParseError

NEG_INFINITY = float("-inf")

# below this many coefficients the plain Python product is faster
_NUMPY_MUL_CUTOFF = 48


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Rationals:
    """The field Q; elements are Fraction instances."""

    char = 0

    def coerce(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        raise TypeError(f"cannot coerce {value!r} into Q")

    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def inv(a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in Q")
        return 1 / Fraction(a)

    @staticmethod
    def element_str(a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class PrimeField:
    """The field GF(p) for a prime p; elements are ints in [0, p)."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.char = p
        self.zero = 0
        self.one = 1 % p

    def coerce(self, value):
        if isinstance(value, int):
            return value % self.p
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return value.numerator * pow(den, -1, self.p) % self.p
        raise TypeError(f"cannot coerce {value!r} into GF({self.p})")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of 0 in GF({self.p})")
        return pow(a, -1, self.p)

    @staticmethod
    def element_str(a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


QQ = Rationals()


def field_from_spec(spec: str):
    """Build a field from a config string: "Q" or "GF(p)"."""
    spec = spec.strip()
    if spec in ("Q", "QQ", "Rationals"):
        return QQ
    if spec.startswith("GF(") and spec.endswith(")"):
        try:
            p = int(spec[3:-1])
        except ValueError:
            raise ParseError(f"bad field spec {spec!r}") from None
        return PrimeField(p)
    raise ParseError(f"bad field spec {spec!r}")


class Poly:
    """Univariate polynomial over Q or GF(p), ascending coefficient tuple."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs, normalize=True):
        if normalize:
            coeffs = list(coeffs)
            while coeffs and coeffs[-1] == field.zero:
                coeffs.pop()
            coeffs = tuple(coeffs)
        self.field = field
        self.coeffs = coeffs

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, field):
        return cls(field, (), normalize=False)

    @classmethod
    def const(cls, field, value):
        value = field.coerce(value)
        if value == field.zero:
            return cls.zero(field)
        return cls(field, (value,), normalize=False)

    @classmethod
    def variable(cls, field):
        return cls(field, (field.zero, field.one), normalize=False)

    @classmethod
    def from_ints(cls, field, ints):
        return cls(field, [field.coerce(c) for c in ints])

    # -- basic queries ---------------------------------------------------

    @property
    def degree(self):
        """Degree; minus infinity for the zero polynomial."""
        if not self.coeffs:
            return NEG_INFINITY
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def leading(self):
        if not self.coeffs:
            raise ZeroInput("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def coeff(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        f = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = f.add(out[i], c)
        return Poly(f, out)

    def __sub__(self, other):
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        out = [f.sub(self.coeff(i), other.coeff(i)) for i in range(n)]
        return Poly(f, out)

    def __neg__(self):
        f = self.field
        return Poly(f, tuple(f.neg(c) for c in self.coeffs), normalize=False)

    def __mul__(self, other):
        f = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(f)
        if isinstance(f, PrimeField) and len(a) + len(b) >= _NUMPY_MUL_CUTOFF:
            prod = np.convolve(
                np.array(a, dtype=np.int64), np.array(b, dtype=np.int64)
            )
            return Poly(f, [int(c) for c in prod % f.p])
        out = [f.zero] * (len(a) + len(b) - 1)
        for i, ci in enumerate(a):
            if ci == f.zero:
                continue
            for j, cj in enumerate(b):
                out[i + j] = f.add(out[i + j], f.mul(ci, cj))
        return Poly(f, out)

    def scale(self, scalar):
        f = self.field
        scalar = f.coerce(scalar)
        if scalar == f.zero:
            return Poly.zero(f)
        return Poly(f, tuple(f.mul(c, scalar) for c in self.coeffs), normalize=False)

    def shift(self, k: int):
        """Multiply by t**k."""
        if not self.coeffs:
            return self
        return Poly(self.field, (self.field.zero,) * k + self.coeffs, normalize=False)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Poly.const(self.field, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __divmod__(self, other):
        f = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.degree < other.degree:
            return Poly.zero(f), self
        if isinstance(f, PrimeField) and len(self.coeffs) >= _NUMPY_MUL_CUTOFF:
            return self._divmod_numpy(other)
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        inv_lead = f.inv(other.leading())
        quot = [f.zero] * (len(rem) - db)
        for i in range(len(rem) - db - 1, -1, -1):
            q = f.mul(rem[i + db], inv_lead)
            if q == f.zero:
                continue
            quot[i] = q
            for j, c in enumerate(other.coeffs):
                rem[i + j] = f.sub(rem[i + j], f.mul(q, c))
        return Poly(f, quot), Poly(f, rem[:db])

    def _divmod_numpy(self, other):
        f = self.field
        p = f.p
        rem = np.array(self.coeffs, dtype=np.int64)
        b = np.array(other.coeffs, dtype=np.int64)
        db = len(b) - 1
        inv_lead = pow(int(b[-1]), -1, p)
        quot = np.zeros(len(rem) - db, dtype=np.int64)
        for i in range(len(rem) - db - 1, -1, -1):
            q = rem[i + db] * inv_lead % p
            if q == 0:
                continue
            quot[i] = q
            rem[i : i + db + 1] = (rem[i : i + db + 1] - q * b) % p
        return Poly(f, [int(c) for c in quot]), Poly(f, [int(c) for c in rem[:db]])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divides(self, other) -> bool:
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()

    def monic(self):
        if self.is_zero() or self.leading() == self.field.one:
            return self
        return self.scale(self.field.inv(self.leading()))

    def gcd(self, other):
        """Monic greatest common divisor."""
        f = self.field
        if isinstance(f, PrimeField) and (
            len(self.coeffs) >= _NUMPY_MUL_CUTOFF or len(other.coeffs) >= _NUMPY_MUL_CUTOFF
        ):
            return self._gcd_numpy(other)
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
            if isinstance(f, Rationals) and not b.is_zero():
                b = b.monic()  # keeps Fraction growth under control
        return a.monic() if not a.is_zero() else a

    def _gcd_numpy(self, other):
        """Euclid staying inside int64 arrays; big GF(p) polynomials only."""
        f = self.field
        p = f.p
        a = np.array(self.coeffs, dtype=np.int64)
        b = np.array(other.coeffs, dtype=np.int64)
        if a.size < b.size:
            a, b = b, a
        if not a.size:
            return self
        while b.size:
            inv = pow(int(b[-1]), -1, p)
            db = b.size - 1
            for i in range(a.size - 1 - db, -1, -1):
                q = int(a[i + db]) * inv % p
                if q:
                    a[i : i + db + 1] = (a[i : i + db + 1] - q * b) % p
            nz = np.nonzero(a[:db])[0]
            a, b = b, (a[: nz[-1] + 1] if nz.size else a[:0])
        inv = pow(int(a[-1]), -1, p)
        if inv != 1:
            a = a * inv % p
        return Poly(f, [int(c) for c in a], normalize=False)

    def derivative(self):
        f = self.field
        out = [f.mul(f.coerce(i), c) for i, c in enumerate(self.coeffs)][1:]
        return Poly(f, out)

    def evaluate(self, x):
        f = self.field
        x = f.coerce(x)
        acc = f.zero
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def reversed(self):
        """t**deg * self(1/t); used for the chart swap at infinity."""
        return Poly(self.field, tuple(reversed(self.coeffs)))

    # -- squarefree machinery ---------------------------------------------

    def pth_root(self):
        """Inverse of Frobenius on GF(p)[t]; requires all exponents % p == 0."""
        p = self.field.char
        if p == 0:
            raise ValueError("pth_root only makes sense in characteristic p")
        root = []
        for i, c in enumerate(self.coeffs):
            if i % p == 0:
                root.append(c)  # c**(1/p) == c over the prime field
            elif c != self.field.zero:
                raise ValueError("polynomial is not a p-th power")
        return Poly(self.field, root)

    def squarefree_decomposition(self):
        """Map multiplicity -> squarefree part, pairwise coprime; handles char p."""
        f = self.field
        if self.is_constant():
            return {}
        poly = self.monic()
        deriv = poly.derivative()
        if deriv.is_zero():
            inner = poly.pth_root().squarefree_decomposition()
            return {m * f.char: part for m, part in inner.items()}
        result = {}
        c = poly.gcd(deriv)
        w = poly // c
        i = 1
        while not w.is_constant():
            y = w.gcd(c)
            z = w // y
            if not z.is_constant():
                result[i] = z.monic()
            w = y
            c = c // y
            i += 1
        if not c.is_constant():
            inner = c.pth_root().squarefree_decomposition()
            for m, part in inner.items():
                result[m * f.char] = part
        return result

    def radical(self):
        """Product of the distinct irreducible factors, monic."""
        parts = self.squarefree_decomposition()
        out = Poly.const(self.field, 1)
        for part in parts.values():
            out = out * part
        return out

    # -- printing ----------------------------------------------------------

    def __str__(self):
        if not self.coeffs:
            return "0"
        f = self.field
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == f.zero:
                continue
            cs = f.element_str(c)
            if i == 0:
                terms.append(cs)
            elif cs == "1":
                terms.append("t" if i == 1 else f"t^{i}")
            else:
                terms.append(f"{cs}*t" if i == 1 else f"{cs}*t^{i}")
        out = terms[0]
        for term in terms[1:]:
            if term.startswith("-"):
                out += " - " + term[1:]
            else:
                out += " + " + term
        return out

    def __repr__(self):
        return f"Poly({self.field!r}, {self})"


class RatFunc:
    """Reduced rational function num/den with monic denominator."""

    __slots__ = ("field", "num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduce=True):
        field = num.field
        if den is None:
            den = Poly.const(field, 1)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            if num.is_zero():
                den = Poly.const(field, 1)
            else:
                g = num.gcd(den)
                if not g.is_constant():
                    num, den = num // g, den // g
                lead = den.leading()
                if lead != field.one:
                    inv = field.inv(lead)
                    num, den = num.scale(inv), den.scale(inv)
        self.field = field
        self.num = num
        self.den = den

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_poly(cls, poly: Poly):
        return cls(poly, None, reduce=False)

    @classmethod
    def const(cls, field, value):
        return cls(Poly.const(field, value), None, reduce=False)

    @classmethod
    def variable(cls, field):
        return cls(Poly.variable(field), None, reduce=False)

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, int):
            other = RatFunc.const(self.field, other)
        return (
            isinstance(other, RatFunc)
            and self.field == other.field
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    # -- field operations ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return RatFunc.const(self.field, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.num, self.den
        c, d = other.num, other.den
        if b.is_constant() and d.is_constant():
            num = a.scale(d.coeff(0)) + c.scale(b.coeff(0))
            den = b * d
            inv = self.field.inv(den.coeff(0))
            return RatFunc(num.scale(inv), None, reduce=False)
        # classical reduced addition: the only common factor hides in g
        g = b.gcd(d)
        if g.is_constant():
            num = a * d + c * b
            if num.is_zero():
                return RatFunc.const(self.field, 0)
            return RatFunc(num, b * d, reduce=False)
        b1, d1 = b // g, d // g
        num = a * d1 + c * b1
        if num.is_zero():
            return RatFunc.const(self.field, 0)
        h = num.gcd(g)
        if h.is_constant():
            return RatFunc(num, b1 * d, reduce=False)
        return RatFunc(num // h, b1 * (d // h), reduce=False)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        # cross-reduce so the final gcd work stays small
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        a = self.num // g1 if not g1.is_constant() else self.num
        d = other.den // g1 if not g1.is_constant() else other.den
        c = other.num // g2 if not g2.is_constant() else other.num
        b = self.den // g2 if not g2.is_constant() else self.den
        num, den = a * c, b * d
        if den.is_constant():
            return RatFunc(num.scale(self.field.inv(den.coeff(0))), None, reduce=False)
        lead = den.leading()
        if lead != self.field.one:
            inv = self.field.inv(lead)
            num, den = num.scale(inv), den.scale(inv)
        return RatFunc(num, den, reduce=False)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        lead = self.num.leading()
        if lead == self.field.one:
            return RatFunc(self.den, self.num, reduce=False)
        inv = self.field.inv(lead)
        return RatFunc(self.den.scale(inv), self.num.scale(inv), reduce=False)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num**n, self.den**n, reduce=False)

    # -- structure -------------------------------------------------------------

    def substitute_reciprocal(self):
        """Image under t -> 1/s, as a rational function of s.

        This is the chart swap that turns the place at infinity into the
        finite place (s).
        """
        a, b = self.num, self.den
        if a.is_zero():
            return self
        shift = len(b.coeffs) - len(a.coeffs)
        num, den = a.reversed(), b.reversed()
        if shift >= 0:
            num = num.shift(shift)
        else:
            den = den.shift(-shift)
        return RatFunc(num, den)

    def evaluate(self, x):
        d = self.den.evaluate(x)
        if d == self.field.zero:
            raise ZeroDivisionError("pole at evaluation point")
        return self.field.mul(self.num.evaluate(x), self.field.inv(d))

    def __str__(self):
        if self.den.is_constant():
            return str(self.num)
        num = str(self.num)
        if len(self.num.coeffs) > 1:
            num = f"({num})"
        return f"{num}/({self.den})"

    def __repr__(self):
        return f"RatFunc({self})"


# ---------------------------------------------------------------------------
# expression parser: integers, a/b, t, + - * / ^, parentheses
# ---------------------------------------------------------------------------


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        self._scan()
        self.index = 0

    def _scan(self):
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.tokens.append(("int", int(text[i:j]), i))
                i = j
            elif ch in "+-*/^()":
                self.tokens.append((ch, ch, i))
                i += 1
            elif ch == "t":
                self.tokens.append(("var", "t", i))
                i += 1
            else:
                raise ParseError(f"unexpected character {ch!r}", column=i + 1)
        self.tokens.append(("end", None, len(text)))

    def peek(self):
        return self.tokens[self.index]

    def next(self):
        tok = self.tokens[self.index]
        self.index += 1
        return tok


class _ExprParser:
    """Recursive-descent parser producing a RatFunc; ^ binds tightest."""

    def __init__(self, field, text):
        self.field = field
        self.toks = _Tokenizer(text)

    def parse(self) -> RatFunc:
        value = self._expr()
        kind, _, pos = self.toks.peek()
        if kind != "end":
            raise ParseError("trailing input in expression", column=pos + 1)
        return value

    def _expr(self):
        kind, _, _ = self.toks.peek()
        negate = False
        while kind in ("+", "-"):
            self.toks.next()
            if kind == "-":
                negate = not negate
            kind, _, _ = self.toks.peek()
        value = self._term()
        if negate:
            value = -value
        while True:
            kind, _, _ = self.toks.peek()
            if kind == "+":
                self.toks.next()
                value = value + self._term()
            elif kind == "-":
                self.toks.next()
                value = value - self._term()
            else:
                return value

    def _term(self):
        value = self._factor()
        while True:
            kind, _, _ = self.toks.peek()
            if kind == "*":
                self.toks.next()
                value = value * self._factor()
            elif kind == "/":
                self.toks.next()
                divisor = self._factor()
                if divisor.is_zero():
                    raise ParseError("division by zero in expression")
                value = value / divisor
            else:
                return value

    def _factor(self):
        kind, _, pos = self.toks.peek()
        if kind == "-":
            self.toks.next()
            return -self._factor()
        base = self._atom()
        kind, _, pos = self.toks.peek()
        if kind == "^":
            self.toks.next()
            kind, val, pos = self.toks.next()
            sign = 1
            if kind == "-":
                sign = -1
                kind, val, pos = self.toks.next()
            if kind != "int":
                raise ParseError("exponent must be an integer", column=pos + 1)
            return base ** (sign * val)
        return base

    def _atom(self):
        kind, val, pos = self.toks.next()
        if kind == "int":
            return RatFunc.const(self.field, val)
        if kind == "var":
            return RatFunc.variable(self.field)
        if kind == "(":
            value = self._expr()
            kind, _, pos = self.toks.next()
            if kind != ")":
                raise ParseError("missing closing parenthesis", column=pos + 1)
            return value
        raise ParseError(f"unexpected token {val!r}", column=pos + 1)


def parse_ratfunc(field, text: str) -> RatFunc:
    """Parse an expression like "t^3 - 1/2*t + 7" over the given field."""
    return _ExprParser(field, text).parse()


def parse_poly(field, text: str) -> Poly:
    value = parse_ratfunc(field, text)
    if not value.den.is_constant():
        raise ParseError("expected a polynomial, got a rational function")
    return value.num
