"""Ground fields of characteristic other than two.

Rationals are backed by ``gmpy2.mpq``; prime fields use the small
:class:`Mod` element type below.  Both support the ordinary arithmetic
operators, so the linear algebra layer is written once against them.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2


class FieldError(ValueError):
    pass


class Field:
    name = "?"
    characteristic = 0

    def __call__(self, x):
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def __eq__(self, other):
        return isinstance(other, Field) and str(self) == str(other)

    def __hash__(self):
        return hash(str(self))

    def __str__(self):
        return self.name

    __repr__ = __str__


class RationalField(Field):
    name = "Q"
    characteristic = 0

    def __call__(self, x):
        if isinstance(x, str):
            return gmpy2.mpq(x.strip())
        if isinstance(x, Fraction):
            return gmpy2.mpq(x.numerator, x.denominator)
        if isinstance(x, Mod):
            raise FieldError("cannot coerce %r into Q" % (x,))
        return gmpy2.mpq(x)


class Mod:
    """Residue class modulo an odd prime."""

    __slots__ = ("v", "p")

    def __init__(self, v, p):
        self.v = v % p
        self.p = p

    def _lift(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise FieldError("mixed characteristics %d and %d" % (self.p, other.p))
            return other.v
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(o - self.v, self.p)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Mod(-self.v, self.p)

    def __pos__(self):
        return self

    def inverse(self):
        if self.v == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return Mod(pow(self.v, self.p - 2, self.p), self.p)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * Mod(o, self.p).inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(o, self.p) * self.inverse()

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return False
        return (self.v - o) % self.p == 0

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __str__(self):
        return str(self.v)

    def __repr__(self):
        return "Mod(%d, %d)" % (self.v, self.p)


def _is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class PrimeField(Field):
    def __init__(self, p):
        if not _is_prime(p):
            raise FieldError("%d is not prime" % p)
        if p == 2:
            raise FieldError("characteristic 2 is not supported")
        self.characteristic = p
        self.name = "Fp:%d" % p

    def __call__(self, x):
        p = self.characteristic
        if isinstance(x, Mod):
            if x.p != p:
                raise FieldError("mixed characteristics %d and %d" % (x.p, p))
            return x
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, Fraction) or hasattr(x, "denominator"):
            num, den = int(x.numerator), int(x.denominator)
            if den % p == 0:
                raise ZeroDivisionError("denominator divisible by %d" % p)
            return Mod(num, p) / Mod(den, p)
        return Mod(int(x), p)


QQ = RationalField()


def parse_field(spec):
    """``"Q"`` or ``"Fp:<p>"`` (also accepts ``"F<p>"``)."""
    if isinstance(spec, Field):
        return spec
    s = str(spec).strip()
    if s in ("Q", "QQ"):
        return QQ
    if s.startswith("Fp:"):
        return PrimeField(int(s[3:]))
    if s.startswith("F") and s[1:].isdigit():
        return PrimeField(int(s[1:]))
    raise FieldError("unknown field %r" % spec)
