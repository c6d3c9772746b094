"""Exact scalar arithmetic over the rationals and prime fields.

Field objects do the arithmetic on *raw* values (``Fraction`` for the
rationals, ``int`` in ``[0, p)`` for F_p) so that the polynomial and linear
algebra layers stay cheap.  :class:`FieldElem` wraps a raw value together with
its field for the public, checked API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable

from .errors import DivisionByZero, ExhaustedField, MixedFields, NotPrime

# Default modulus for the characteristic-zero surrogate (fast modular mode).
MERSENNE_31 = 2**31 - 1
SURROGATE_PRIMES = (MERSENNE_31, 2**31 - 19)
BACKUP_PRIMES = (2**31 - 61, 2**31 - 69)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic primality test.

    Trial division below 2**32, Miller-Rabin with the first 13 prime bases
    above (deterministic far beyond 2**64).
    """
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    if n < 2**32:
        r = math.isqrt(n)
        f = 43
        while f <= r:
            if n % f == 0:
                return False
            f += 2
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """Common interface of :class:`Rationals` and :class:`PrimeField`."""

    char: int

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def elem(self, x: Any) -> "FieldElem":
        return FieldElem(self, self.coerce(x))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == 0

    def power(self, a, e: int):
        if e < 0:
            return self.power(self.inv(a), -e)
        r = self.one
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def dot(self, u: Iterable, v: Iterable):
        acc = self.zero
        for a, b in zip(u, v):
            acc = self.add(acc, self.mul(a, b))
        return acc


@dataclass(frozen=True)
class Rationals(Field):
    """The field Q.  ``box`` bounds numerators/denominators of random elements."""

    box: int = field(default=10, compare=False)
    char = 0
    size = None

    def coerce(self, x) -> Fraction:
        if isinstance(x, FieldElem):
            if x.field != self:
                raise MixedFields(f"cannot coerce {x.field} element into Q")
            return x.value
        if isinstance(x, str):
            return Fraction(x.strip())
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0")
        return 1 / a

    def div(self, a, b):
        if b == 0:
            raise DivisionByZero("division by 0")
        return a / b

    def random_element(self, rng, avoid=(), integral: bool = False, box: int | None = None):
        box = self.box if box is None else box
        avoid = {self.coerce(a) for a in avoid}
        for _ in range(10_000):
            num = rng.randint(-box, box)
            den = 1 if integral else rng.randint(1, box)
            v = Fraction(num, den)
            if v not in avoid:
                return v
        raise ExhaustedField(f"could not avoid {len(avoid)} values in box {box}")

    def format(self, a) -> str:
        return str(a)

    def to_json(self):
        return "Q"

    def __str__(self):
        return "Q"


@dataclass(frozen=True)
class PrimeField(Field):
    """The prime field F_p."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise NotPrime(f"{self.p!r} is not prime")

    @property
    def char(self) -> int:
        return self.p

    @property
    def size(self) -> int:
        return self.p

    def coerce(self, x) -> int:
        if isinstance(x, FieldElem):
            if x.field != self:
                raise MixedFields(f"cannot coerce {x.field} element into F_{self.p}")
            return x.value
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DivisionByZero(f"denominator {x.denominator} vanishes mod {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DivisionByZero(f"inverse of 0 in F_{self.p}")
        return pow(a, -1, self.p)

    def power(self, a, e: int):
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def random_element(self, rng, avoid=(), integral: bool = False, box: int | None = None):
        avoid = {self.coerce(a) for a in avoid}
        if len(avoid) >= self.p:
            raise ExhaustedField(f"avoid set covers F_{self.p}")
        if len(avoid) > self.p // 2:
            choices = [r for r in range(self.p) if r not in avoid]
            return choices[rng.randrange(len(choices))]
        while True:
            v = rng.randrange(self.p)
            if v not in avoid:
                return v

    def format(self, a) -> str:
        return str(a)

    def to_json(self):
        return {"p": self.p}

    def __str__(self):
        return f"F_{self.p}"


FieldSpec = Field


def field_from_json(obj) -> Field:
    """Parse ``"Q"`` or ``{"p": 7}``."""
    if obj == "Q":
        return Rationals()
    if isinstance(obj, dict) and set(obj) == {"p"} and isinstance(obj["p"], int):
        return PrimeField(obj["p"])
    raise ValueError(f"bad field spec {obj!r}; expected \"Q\" or {{\"p\": prime}}")


@dataclass(frozen=True)
class FieldElem:
    """A field element tied to its field; arithmetic across fields raises."""

    field: Field
    value: Any

    def _check(self, other) -> Any:
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise MixedFields(f"{self.field} vs {other.field}")
            return other.value
        if isinstance(other, (int, Fraction)):
            return self.field.coerce(other)
        return NotImplemented

    def __add__(self, other):
        b = self._check(other)
        return b if b is NotImplemented else FieldElem(self.field, self.field.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._check(other)
        return b if b is NotImplemented else FieldElem(self.field, self.field.sub(self.value, b))

    def __rsub__(self, other):
        b = self._check(other)
        return b if b is NotImplemented else FieldElem(self.field, self.field.sub(b, self.value))

    def __mul__(self, other):
        b = self._check(other)
        return b if b is NotImplemented else FieldElem(self.field, self.field.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._check(other)
        return b if b is NotImplemented else FieldElem(self.field, self.field.div(self.value, b))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.value))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.value))

    def is_zero(self) -> bool:
        return self.field.is_zero(self.value)

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == self.field.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"{self.value} in {self.field}"


_OPS = {"add": "__add__", "sub": "__sub__", "mul": "__mul__", "div": "__truediv__"}


def field_ops(a: FieldElem, b: FieldElem, op: str) -> FieldElem:
    if a.field != b.field:
        raise MixedFields(f"{a.field} vs {b.field}")
    try:
        return getattr(a, _OPS[op])(b)
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None


def field_inverse(a: FieldElem) -> FieldElem:
    return a.inverse()


def random_element(spec: Field, rng, avoid=(), box: int | None = None) -> FieldElem:
    return FieldElem(spec, spec.random_element(rng, avoid=avoid, box=box))


@lru_cache(maxsize=64)
def prime_field(p: int) -> PrimeField:
    """Cached PrimeField(p) (primality is checked once per p)."""
    return PrimeField(p)
