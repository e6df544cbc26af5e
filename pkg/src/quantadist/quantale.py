"""The three supported quantales, with exact arithmetic throughout.

A quantale here is a complete lattice together with a commutative,
join-continuous monoid operation (the tensor).  Three instances are
supported:

* ``boolean``    -- {False, True} ordered False < True, tensor = and.
* ``unit-oplus`` -- rationals in [0, 1] under the *reversed* numeric
  order, tensor = truncated addition.
* ``ext-plus``   -- rationals in [0, oo] (with an explicit infinity
  marker) under the reversed numeric order, tensor = extended addition.

Because the real-valued quantales reverse the order, the lattice meet is
the numeric maximum and the lattice join is the numeric minimum; the top
element is numeric 0 and the bottom is numeric 1 (resp. infinity).  All
arithmetic uses ``fractions.Fraction``; no floats appear anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional


class QuantaleError(TypeError):
    """Raised for values that do not belong to the quantale at hand."""


class _Infinity:
    """Singleton marker for the top point of [0, oo]."""

    __slots__ = ()
    _instance: Optional["_Infinity"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

#: A quantale value is a bool, a Fraction, or the INF marker.
Value = object


def is_inf(v) -> bool:
    return v is INF or isinstance(v, _Infinity)


def as_fraction(v) -> Fraction:
    if isinstance(v, bool):
        raise QuantaleError("boolean value where a rational was expected")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise QuantaleError(f"not an exact rational: {v!r}")


def numeric_le(a, b) -> bool:
    """Numeric <= on [0, oo] values (INF handled explicitly)."""
    if is_inf(a):
        return is_inf(b)
    if is_inf(b):
        return True
    return a <= b


class Quantale:
    """Common interface of the three quantale instances."""

    ident: str = ""

    # -- lattice constants -------------------------------------------------
    @property
    def top(self):
        raise NotImplementedError

    @property
    def bottom(self):
        raise NotImplementedError

    @property
    def unit(self):
        """The tensor unit k."""
        raise NotImplementedError

    # -- structure ---------------------------------------------------------
    def validate(self, v):
        """Return the canonical form of ``v`` or raise QuantaleError."""
        raise NotImplementedError

    def leq(self, a, b) -> bool:
        """The quantale order (reversed numeric order for the real ones)."""
        raise NotImplementedError

    def tensor(self, a, b):
        raise NotImplementedError

    def residuate(self, a, b):
        """The internal hom: the largest u (in the order) with u (x) a <= b."""
        raise NotImplementedError

    def join(self, values: Iterable):
        """Least upper bound; the empty join is bottom."""
        result = self.bottom
        for v in values:
            result = self.join2(result, v)
        return result

    def meet(self, values: Iterable):
        """Greatest lower bound; the empty meet is top."""
        result = self.top
        for v in values:
            result = self.meet2(result, v)
        return result

    def join2(self, a, b):
        raise NotImplementedError

    def meet2(self, a, b):
        raise NotImplementedError

    # -- serialization -----------------------------------------------------
    def value_to_json(self, v):
        raise NotImplementedError

    def value_from_json(self, j):
        raise NotImplementedError

    def __repr__(self):
        return f"<quantale {self.ident}>"


class BooleanQuantale(Quantale):
    ident = "boolean"

    @property
    def top(self):
        return True

    @property
    def bottom(self):
        return False

    @property
    def unit(self):
        return True

    def validate(self, v):
        if not isinstance(v, bool):
            raise QuantaleError(f"not a boolean quantale value: {v!r}")
        return v

    def leq(self, a, b):
        return (not self.validate(a)) or self.validate(b)

    def tensor(self, a, b):
        return self.validate(a) and self.validate(b)

    def residuate(self, a, b):
        return (not self.validate(a)) or self.validate(b)

    def join2(self, a, b):
        return self.validate(a) or self.validate(b)

    def meet2(self, a, b):
        return self.validate(a) and self.validate(b)

    def value_to_json(self, v):
        return self.validate(v)

    def value_from_json(self, j):
        if not isinstance(j, bool):
            raise QuantaleError(f"expected JSON boolean, got {j!r}")
        return j


class _ReversedNumericQuantale(Quantale):
    """Shared machinery for the two real-valued quantales.

    The order is reversed, so leq(a, b) means a >= b numerically, the
    meet is the numeric max and the join the numeric min.
    """

    def leq(self, a, b):
        a = self.validate(a)
        b = self.validate(b)
        return numeric_le(b, a)

    def join2(self, a, b):
        a = self.validate(a)
        b = self.validate(b)
        return a if numeric_le(a, b) else b

    def meet2(self, a, b):
        a = self.validate(a)
        b = self.validate(b)
        return b if numeric_le(a, b) else a

    def value_to_json(self, v):
        v = self.validate(v)
        if is_inf(v):
            return "inf"
        return str(v)

    def value_from_json(self, j):
        if isinstance(j, bool):
            raise QuantaleError(f"expected rational string, got boolean {j!r}")
        if j == "inf":
            return self.validate(INF)
        if isinstance(j, str):
            return self.validate(Fraction(j))
        if isinstance(j, int):
            return self.validate(Fraction(j))
        raise QuantaleError(f"expected rational string, got {j!r}")


class UnitIntervalQuantale(_ReversedNumericQuantale):
    ident = "unit-oplus"

    @property
    def top(self):
        return Fraction(0)

    @property
    def bottom(self):
        return Fraction(1)

    @property
    def unit(self):
        return Fraction(0)

    def validate(self, v):
        f = as_fraction(v)
        if not (0 <= f <= 1):
            raise QuantaleError(f"unit-oplus value out of [0,1]: {f}")
        return f

    def tensor(self, a, b):
        s = self.validate(a) + self.validate(b)
        return s if s <= 1 else Fraction(1)

    def residuate(self, a, b):
        d = self.validate(b) - self.validate(a)
        return d if d > 0 else Fraction(0)


class ExtendedRealsQuantale(_ReversedNumericQuantale):
    ident = "ext-plus"

    @property
    def top(self):
        return Fraction(0)

    @property
    def bottom(self):
        return INF

    @property
    def unit(self):
        return Fraction(0)

    def validate(self, v):
        if is_inf(v):
            return INF
        f = as_fraction(v)
        if f < 0:
            raise QuantaleError(f"ext-plus value is negative: {f}")
        return f

    def tensor(self, a, b):
        a = self.validate(a)
        b = self.validate(b)
        if is_inf(a) or is_inf(b):
            return INF
        return a + b

    def residuate(self, a, b):
        # Largest u in the reversed order (numerically smallest) with
        # u + a >= b; truncated extended subtraction.
        a = self.validate(a)
        b = self.validate(b)
        if is_inf(a):
            return Fraction(0)
        if is_inf(b):
            return INF
        d = b - a
        return d if d > 0 else Fraction(0)


BOOLEAN = BooleanQuantale()
UNIT_OPLUS = UnitIntervalQuantale()
EXT_PLUS = ExtendedRealsQuantale()

_BY_IDENT = {q.ident: q for q in (BOOLEAN, UNIT_OPLUS, EXT_PLUS)}


def get_quantale(ident: str) -> Quantale:
    try:
        return _BY_IDENT[ident]
    except KeyError:
        raise QuantaleError(
            f"unknown quantale {ident!r}; expected one of {sorted(_BY_IDENT)}"
        ) from None


# Operation-style entry points mirroring the module contract.

def tensor(q: Quantale, a, b):
    return q.tensor(a, b)


def residuation(q: Quantale, a, b):
    """d_V(a, b): the internal distance of the quantale."""
    return q.residuate(a, b)


def lattice(q: Quantale, op: str, values: Iterable):
    if op == "join":
        return q.join(values)
    if op == "meet":
        return q.meet(values)
    raise ValueError(f"lattice op must be 'join' or 'meet', got {op!r}")
