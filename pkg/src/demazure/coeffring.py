"""Exact coefficient rings.

A ring descriptor (``Integers``, ``IntegersMod``, ``IntegersInv``, ``Poly``)
owns the arithmetic on *raw* values.  Raw values are plain Python objects
that support ``+``, ``-`` and ``*`` natively (``int``, ``Fraction`` or
:class:`Polynomial`), so the power-series kernels can accumulate with native
operators and call :meth:`Ring.normalize` once per coefficient.

:class:`RingElem` wraps a raw value together with its ring for the public,
operator-overloaded surface.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable

from .errors import DescriptorMismatch, NotDivisible, ParseError


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


class Ring:
    """Common interface; subclasses are frozen dataclasses."""

    integer_like = False

    # -- construction -------------------------------------------------
    @property
    def zero(self):
        return self.normalize(0)

    @property
    def one(self):
        return self.normalize(1)

    def from_int(self, n: int):
        return self.normalize(n)

    def __call__(self, value: Any = 0) -> "RingElem":
        return RingElem(self, self.coerce(value))

    def coerce(self, value: Any):
        if isinstance(value, RingElem):
            if value.ring != self:
                raise DescriptorMismatch(f"element of {value.ring} used in {self}")
            return value.value
        if isinstance(value, str):
            return self.parse(value)
        return self.normalize(value)

    # -- arithmetic on raw values ----------------------------------------
    def normalize(self, a):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == 0

    def add(self, a, b):
        return self.normalize(a + b)

    def sub(self, a, b):
        return self.normalize(a - b)

    def mul(self, a, b):
        return self.normalize(a * b)

    def neg(self, a):
        return self.normalize(-a)

    def exact_div(self, a, b):
        raise NotImplementedError

    def is_regular(self, a) -> bool:
        raise NotImplementedError

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inverse(self, a):
        return self.exact_div(self.one, a)

    def order_key(self, a):
        return a

    # -- text ------------------------------------------------------------
    def to_str(self, a) -> str:
        return str(a)

    def to_json_value(self, a):
        return self.to_str(a)

    def parse(self, text: str):
        raise NotImplementedError

    def from_json_value(self, value):
        if isinstance(value, int):
            return self.normalize(value)
        if isinstance(value, list):
            return self.parse(" + ".join(value) if value else "0")
        return self.parse(str(value))

    def integer_lift(self, a) -> int | None:
        """An integer representing ``a`` when the ring is integer-like."""
        return None


@dataclass(frozen=True)
class Integers(Ring):
    integer_like = True

    def normalize(self, a):
        if isinstance(a, Fraction):
            if a.denominator != 1:
                raise NotDivisible(f"{a} is not an integer")
            return int(a.numerator)
        return int(a)

    def exact_div(self, a, b):
        if b == 0 or a % b:
            raise NotDivisible(f"{a} is not divisible by {b} in Z", witness=[a, b])
        return a // b

    def is_regular(self, a) -> bool:
        return a != 0

    def is_unit(self, a) -> bool:
        return a in (1, -1)

    def parse(self, text: str):
        return self.normalize(_parse_rational(text))

    def integer_lift(self, a):
        return a

    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class IntegersMod(Ring):
    m: int
    integer_like = True

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise ValueError(f"modulus must be an integer >= 2, got {self.m!r}")

    def normalize(self, a):
        if isinstance(a, Fraction):
            num = a.numerator % self.m
            den = a.denominator % self.m
            if math.gcd(den, self.m) != 1:
                raise NotDivisible(f"denominator of {a} is not invertible mod {self.m}")
            return num * pow(den, -1, self.m) % self.m
        return int(a) % self.m

    def exact_div(self, a, b):
        # smallest residue q with q*b == a
        m = self.m
        a, b = a % m, b % m
        g = math.gcd(b, m)
        if b == 0 or a % g:
            raise NotDivisible(f"{a} is not divisible by {b} in Z/{m}", witness=[a, b])
        mg = m // g
        if mg == 1:
            return 0
        return (a // g) * pow(b // g, -1, mg) % mg

    def is_regular(self, a) -> bool:
        return math.gcd(a % self.m, self.m) == 1

    is_unit = is_regular

    def parse(self, text: str):
        return self.normalize(_parse_rational(text))

    def integer_lift(self, a):
        return a

    def __str__(self):
        return f"Z/{self.m}"


@dataclass(frozen=True)
class IntegersInv(Ring):
    """Z with finitely many primes inverted; values are reduced fractions."""

    primes: tuple[int, ...]
    integer_like = True

    def __post_init__(self):
        ps = tuple(sorted(set(int(p) for p in self.primes)))
        if not ps or not all(_is_prime(p) for p in ps):
            raise ValueError(f"inverted primes must be a nonempty set of primes, got {self.primes!r}")
        object.__setattr__(self, "primes", ps)

    def _allowed(self, n: int) -> bool:
        n = abs(n)
        if n == 0:
            return False
        for p in self.primes:
            while n % p == 0:
                n //= p
        return n == 1

    def normalize(self, a):
        a = Fraction(a)
        if not self._allowed(a.denominator):
            raise NotDivisible(f"{a} has a denominator outside {self}")
        return a

    def is_zero(self, a) -> bool:
        return a == 0

    def exact_div(self, a, b):
        if b == 0:
            raise NotDivisible("division by zero", witness=[str(a), str(b)])
        q = Fraction(a) / Fraction(b)
        if not self._allowed(q.denominator):
            raise NotDivisible(f"{a}/{b} is not in {self}", witness=[str(a), str(b)])
        return q

    def is_regular(self, a) -> bool:
        return a != 0

    def is_unit(self, a) -> bool:
        return a != 0 and self._allowed(Fraction(a).numerator)

    def order_key(self, a):
        return (a.numerator, a.denominator)

    def to_str(self, a) -> str:
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def parse(self, text: str):
        return self.normalize(_parse_rational(text))

    def integer_lift(self, a):
        return a

    def __str__(self):
        return "Z[" + ",".join(f"1/{p}" for p in self.primes) + "]"


@dataclass(frozen=True)
class Poly(Ring):
    """Polynomials over a non-polynomial base ring in named variables."""

    base: Ring
    vars: tuple[str, ...]

    def __post_init__(self):
        if isinstance(self.base, Poly):
            raise ValueError("polynomial rings nest at most one level")
        names = tuple(self.vars)
        if not names or len(set(names)) != len(names):
            raise ValueError(f"polynomial variable names must be distinct and nonempty: {names!r}")
        for name in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name) or name == "Z":
                raise ValueError(f"bad variable name {name!r}")
        object.__setattr__(self, "vars", names)

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def constant(self, c) -> "Polynomial":
        c = self.base.normalize(c)
        if self.base.is_zero(c):
            return Polynomial(self, {})
        return Polynomial(self, {(0,) * self.nvars: c})

    def gen(self, name: str) -> "Polynomial":
        i = self.vars.index(name)
        mono = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Polynomial(self, {mono: self.base.one})

    def normalize(self, a):
        if isinstance(a, Polynomial):
            if a.ring != self:
                raise DescriptorMismatch(f"polynomial over {a.ring} used in {self}")
            return a
        return self.constant(a)

    def is_zero(self, a) -> bool:
        return not a.terms

    def _leading(self, a):
        mono = max(a.terms)
        return mono, a.terms[mono]

    def exact_div(self, a, b):
        a, b = self.normalize(a), self.normalize(b)
        if not b.terms:
            raise NotDivisible("division by zero polynomial", witness=[self.to_str(a), "0"])
        lm_b, lc_b = self._leading(b)
        r = a
        quotient: dict = {}
        while r.terms:
            lm_r, lc_r = self._leading(r)
            if any(x < y for x, y in zip(lm_r, lm_b)):
                raise NotDivisible(f"{self.to_str(a)} is not divisible by {self.to_str(b)}",
                                   witness=[self.to_str(a), self.to_str(b)])
            try:
                c = self.base.exact_div(lc_r, lc_b)
            except NotDivisible:
                raise NotDivisible(f"{self.to_str(a)} is not divisible by {self.to_str(b)}",
                                   witness=[self.to_str(a), self.to_str(b)]) from None
            mono = tuple(x - y for x, y in zip(lm_r, lm_b))
            quotient[mono] = c
            r = r - Polynomial(self, {mono: c}) * b
        return Polynomial(self, quotient)

    def content(self, a) -> int:
        g = 0
        for c in a.terms.values():
            lift = self.base.integer_lift(c)
            g = math.gcd(g, int(lift) if not isinstance(lift, Fraction) else lift.numerator)
        return g

    def is_regular(self, a) -> bool:
        a = self.normalize(a)
        if not a.terms:
            return False
        if isinstance(self.base, IntegersMod):
            # McCoy: a zero divisor is killed by a nonzero constant
            return math.gcd(self.content(a), self.base.m) == 1
        return True

    def is_unit(self, a) -> bool:
        a = self.normalize(a)
        if len(a.terms) != 1:
            return False
        mono, c = next(iter(a.terms.items()))
        return not any(mono) and self.base.is_unit(c)

    def order_key(self, a):
        return tuple(sorted((m, self.base.order_key(c)) for m, c in a.terms.items()))

    def _mono_str(self, mono) -> str:
        parts = []
        for name, e in zip(self.vars, mono):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def term_strings(self, a) -> list[str]:
        out = []
        for mono in sorted(a.terms, key=lambda m: (sum(m), tuple(-x for x in m))):
            c = self.base.to_str(a.terms[mono])
            ms = self._mono_str(mono)
            out.append(f"{c}*{ms}" if ms else c)
        return out

    def to_str(self, a) -> str:
        terms = self.term_strings(self.normalize(a))
        return " + ".join(terms) if terms else "0"

    def to_json_value(self, a):
        return self.term_strings(self.normalize(a))

    def parse(self, text: str):
        return _parse_polynomial(self, text)

    def integer_lift(self, a):
        a = self.normalize(a)
        if not a.terms:
            return 0
        if len(a.terms) == 1:
            mono, c = next(iter(a.terms.items()))
            if not any(mono):
                return self.base.integer_lift(c)
        return None

    def __str__(self):
        return f"{self.base}[{','.join(self.vars)}]"


class Polynomial:
    """Immutable polynomial value of a :class:`Poly` ring."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Poly, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    def _lift(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        base = self.ring.base
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = base.normalize(out.get(m, 0) + c)
            if base.is_zero(v):
                out.pop(m, None)
            else:
                out[m] = v
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        base = self.ring.base
        return Polynomial(self.ring, {m: base.normalize(-c) for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        base = self.ring.base
        acc: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                acc[m] = acc.get(m, 0) + c1 * c2
        out = {}
        for m, v in acc.items():
            v = base.normalize(v)
            if not base.is_zero(v):
                out[m] = v
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._lift(other) if not isinstance(other, Polynomial) else other
        if other is None:
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Polynomial({self.ring.to_str(self)!r})"


@dataclass(frozen=True)
class RingElem:
    ring: Ring
    value: Any

    def _check(self, other) -> Any:
        if isinstance(other, RingElem):
            if other.ring != self.ring:
                raise DescriptorMismatch(f"cannot combine {self.ring} with {other.ring}")
            return other.value
        return self.ring.coerce(other)

    def __add__(self, other):
        return RingElem(self.ring, self.ring.add(self.value, self._check(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return RingElem(self.ring, self.ring.sub(self.value, self._check(other)))

    def __rsub__(self, other):
        return RingElem(self.ring, self.ring.sub(self._check(other), self.value))

    def __mul__(self, other):
        return RingElem(self.ring, self.ring.mul(self.value, self._check(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElem(self.ring, self.ring.neg(self.value))

    def exact_div(self, other) -> "RingElem":
        return RingElem(self.ring, self.ring.exact_div(self.value, self._check(other)))

    def is_regular(self) -> bool:
        return self.ring.is_regular(self.value)

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.value)

    def __eq__(self, other):
        if isinstance(other, RingElem):
            return self.ring == other.ring and self.value == other.value
        try:
            return self.value == self.ring.coerce(other)
        except Exception:
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.value))

    def __str__(self):
        return self.ring.to_str(self.value)

    def to_json(self) -> dict:
        return {"ring": str(self.ring), "value": self.ring.to_json_value(self.value)}

    @classmethod
    def from_json(cls, data: dict) -> "RingElem":
        ring = parse_ring(data["ring"])
        return cls(ring, ring.from_json_value(data["value"]))


# -- parsing -----------------------------------------------------------------

_RING_RE = re.compile(r"^\s*Z(?:/(?P<mod>\d+)|\[(?P<inv>\s*1/\d+(?:\s*,\s*1/\d+)*\s*)\])?(?:\[(?P<vars>[^\]]*)\])?\s*$")


def parse_ring(spec: "str | dict | Ring") -> Ring:
    """Parse ``Z``, ``Z/4``, ``Z[1/2]``, ``Z[a,b]``, ``Z/4[t]``, ``Z[1/2][a]``."""
    if isinstance(spec, Ring):
        return spec
    if isinstance(spec, dict):
        spec = spec.get("ring", spec.get("descriptor"))
    if not isinstance(spec, str):
        raise ParseError(f"cannot parse ring descriptor {spec!r}")
    mt = _RING_RE.match(spec)
    if not mt:
        raise ParseError(f"cannot parse ring descriptor {spec!r}")
    try:
        if mt.group("mod"):
            base: Ring = IntegersMod(int(mt.group("mod")))
        elif mt.group("inv"):
            primes = [int(tok.split("/")[1]) for tok in mt.group("inv").split(",")]
            base = IntegersInv(tuple(primes))
        else:
            base = Integers()
        if mt.group("vars") is not None:
            names = tuple(v.strip() for v in mt.group("vars").split(","))
            return Poly(base, names)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    return base


_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        mt = _TOKEN_RE.match(text, pos)
        if not mt or mt.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} at column {pos + 1}", column=pos + 1)
        kind = mt.lastgroup
        tokens.append((kind, mt.group(kind), mt.start(kind) + 1))
        pos = mt.end()
    return tokens


def _parse_rational(text: str) -> Fraction:
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        raise ParseError(f"cannot parse number {text!r}") from None


def _parse_polynomial(ring: Poly, text: str) -> Polynomial:
    """Sum of signed products of numbers, fractions and ``var^k`` factors."""
    tokens = _tokenize(text)
    total = ring.constant(0)
    i = 0
    if not tokens:
        raise ParseError("empty polynomial", column=1)
    while i < len(tokens):
        sign = 1
        while i < len(tokens) and tokens[i][1] in "+-" and tokens[i][0] == "op":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        term = ring.constant(sign)
        expect_factor = True
        while i < len(tokens):
            kind, val, col = tokens[i]
            if expect_factor:
                if kind == "num":
                    num = int(val)
                    if i + 2 < len(tokens) + 1 and i + 1 < len(tokens) and tokens[i + 1][1] == "/":
                        if i + 2 >= len(tokens) or tokens[i + 2][0] != "num":
                            raise ParseError(f"expected denominator at column {tokens[i + 1][2]}", column=tokens[i + 1][2])
                        factor = ring.constant(Fraction(num, int(tokens[i + 2][1])))
                        i += 3
                    else:
                        factor = ring.constant(num)
                        i += 1
                elif kind == "name":
                    if val not in ring.vars:
                        raise ParseError(f"unknown variable {val!r} at column {col}", column=col)
                    power = 1
                    i += 1
                    if i < len(tokens) and tokens[i][1] == "^":
                        if i + 1 >= len(tokens) or tokens[i + 1][0] != "num":
                            raise ParseError(f"expected exponent at column {tokens[i][2]}", column=tokens[i][2])
                        power = int(tokens[i + 1][1])
                        i += 2
                    factor = ring.constant(1)
                    g = ring.gen(val)
                    for _ in range(power):
                        factor = factor * g
                else:
                    raise ParseError(f"unexpected {val!r} at column {col}", column=col)
                term = term * factor
                expect_factor = False
            else:
                if kind == "op" and val == "*":
                    expect_factor = True
                    i += 1
                elif kind == "op" and val in "+-":
                    break
                else:
                    raise ParseError(f"unexpected {val!r} at column {col}", column=col)
        if expect_factor:
            raise ParseError("expression ends with an operator", column=len(text) + 1)
        total = total + term
    return total


def ring_elements(ring: Ring, values: Iterable[Any]) -> list:
    return [ring.coerce(v) for v in values]
