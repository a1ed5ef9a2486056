"""Truncated multivariate power series with tracked precision.

A :class:`TruncSeries` knows every coefficient of total degree ``<= prec``
and nothing beyond.  Binary operations keep the smaller precision; every
division by a degree-one element gives up one degree.  Coefficients are raw
values of a :mod:`demazure.coeffring` ring.

All divisions are verified by multiplying back, and each verification is
counted in :data:`DIVISION_LEDGER`.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .coeffring import Ring, parse_ring
from .errors import (DescriptorMismatch, NonUnitConstantTerm, NonzeroConstantTerm, NotDivisible,
                     NotUnimodular, NotUnimodularLinearPart, PrecisionExhausted)
from .intlinalg import complete_unimodular_row, inverse_unimodular

Exp = tuple[int, ...]


@dataclass
class DivisionLedger:
    """Counts divisions and how many were confirmed by multiplying back."""

    performed: int = 0
    verified: int = 0
    by_kind: dict = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def record(self, kind: str, ok: bool) -> None:
        with self._lock:
            self.performed += 1
            self.verified += bool(ok)
            done, good = self.by_kind.get(kind, (0, 0))
            self.by_kind[kind] = (done + 1, good + bool(ok))

    def reset(self) -> None:
        with self._lock:
            self.performed = self.verified = 0
            self.by_kind = {}

    def snapshot(self) -> dict:
        return {"performed": self.performed, "verified": self.verified,
                "by_kind": {k: list(v) for k, v in sorted(self.by_kind.items())}}


DIVISION_LEDGER = DivisionLedger()


def _mul_terms(ring: Ring, a: dict, b: dict, prec: int) -> dict:
    """Product of two term maps keeping total degree <= prec."""
    if not a or not b:
        return {}
    la = sorted(((sum(e), e, c) for e, c in a.items()), key=lambda t: t[0])
    lb = sorted(((sum(e), e, c) for e, c in b.items()), key=lambda t: t[0])
    acc: dict = {}
    get = acc.get
    for da, ea, ca in la:
        room = prec - da
        if room < lb[0][0]:
            break
        for db, eb, cb in lb:
            if db > room:
                break
            key = tuple([x + y for x, y in zip(ea, eb)])
            acc[key] = get(key, 0) + ca * cb
    return _clean(ring, acc)


def _clean(ring: Ring, acc: dict) -> dict:
    norm = ring.normalize
    out = {}
    for k, v in acc.items():
        v = norm(v)
        if v:
            out[k] = v
    return out


class TruncSeries:
    __slots__ = ("ring", "nvars", "prec", "terms")

    def __init__(self, ring: Ring, nvars: int, prec: int, terms: dict | None = None, *, clean: bool = True):
        if prec < 0:
            raise PrecisionExhausted(f"precision dropped to {prec}", prec=prec)
        self.ring = ring
        self.nvars = nvars
        self.prec = prec
        if terms is None:
            terms = {}
        elif clean:
            norm = ring.normalize
            out = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
                if sum(e) <= prec:
                    c = norm(c)
                    if c:
                        out[e] = c
            terms = out
        self.terms = terms

    # -- constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, ring: Ring, nvars: int, prec: int) -> "TruncSeries":
        return cls(ring, nvars, prec, {}, clean=False)

    @classmethod
    def constant(cls, ring: Ring, nvars: int, prec: int, c=1) -> "TruncSeries":
        return cls(ring, nvars, prec, {(0,) * nvars: c})

    @classmethod
    def var(cls, ring: Ring, nvars: int, prec: int, i: int) -> "TruncSeries":
        return cls.monomial(ring, nvars, prec, tuple(1 if j == i else 0 for j in range(nvars)))

    @classmethod
    def monomial(cls, ring: Ring, nvars: int, prec: int, exp: Sequence[int], c=1) -> "TruncSeries":
        return cls(ring, nvars, prec, {tuple(exp): c})

    def _like(self, terms: dict, prec: int | None = None) -> "TruncSeries":
        return TruncSeries(self.ring, self.nvars, self.prec if prec is None else prec, terms, clean=False)

    # -- inspection -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, self.ring.zero)

    def valuation(self) -> int | None:
        """Lowest degree carrying a nonzero coefficient; ``None`` for zero."""
        return min(map(sum, self.terms), default=None)

    def homogeneous(self, d: int) -> dict:
        return {e: c for e, c in self.terms.items() if sum(e) == d}

    def linear_part(self) -> list:
        out = []
        for i in range(self.nvars):
            e = tuple(1 if j == i else 0 for j in range(self.nvars))
            out.append(self.terms.get(e, self.ring.zero))
        return out

    def truncate(self, prec: int) -> "TruncSeries":
        if prec > self.prec:
            raise PrecisionExhausted(f"cannot raise precision {self.prec} to {prec}", prec=self.prec)
        if prec == self.prec:
            return self
        return self._like({e: c for e, c in self.terms.items() if sum(e) <= prec}, prec)

    def _check(self, other: "TruncSeries") -> None:
        if other.ring != self.ring or other.nvars != self.nvars:
            raise DescriptorMismatch(f"series over {other.ring}/{other.nvars} vs {self.ring}/{self.nvars}")

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            return self + TruncSeries.constant(self.ring, self.nvars, self.prec, other)
        self._check(other)
        p = min(self.prec, other.prec)
        a, b = (self, other) if len(self.terms) >= len(other.terms) else (other, self)
        out = {e: c for e, c in a.terms.items() if sum(e) <= p} if a.prec > p else dict(a.terms)
        norm = self.ring.normalize
        for e, c in b.terms.items():
            if e in out:
                v = norm(out[e] + c)
                if v:
                    out[e] = v
                else:
                    del out[e]
            elif b.prec <= p or sum(e) <= p:
                out[e] = c
        return self._like(out, p)

    __radd__ = __add__

    def __neg__(self):
        norm = self.ring.normalize
        return self._like({e: norm(-c) for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            return self + (-TruncSeries.constant(self.ring, self.nvars, self.prec, other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        self._check(other)
        p = min(self.prec, other.prec)
        return self._like(_mul_terms(self.ring, self.terms, other.terms, p), p)

    __rmul__ = __mul__

    def sharp_prec(self, other: "TruncSeries") -> int:
        """Degree to which ``self * other`` is determined: ``min(p_f + v_g, p_g + v_f)``."""
        vf, vg = self.valuation(), other.valuation()
        cands = []
        if vg is not None:
            cands.append(self.prec + vg)
        if vf is not None:
            cands.append(other.prec + vf)
        if not cands:
            return self.prec + other.prec + 1
        return min(cands)

    def mul_sharp(self, other: "TruncSeries", cap: int | None = None) -> "TruncSeries":
        """Product carrying every degree the factors determine, optionally capped."""
        self._check(other)
        p = self.sharp_prec(other)
        if cap is not None:
            p = min(p, cap)
        return self._like(_mul_terms(self.ring, self.terms, other.terms, p), p)

    def mul_to(self, other: "TruncSeries", prec: int) -> "TruncSeries":
        """Product truncated at ``prec``, treating both factors as exact."""
        self._check(other)
        return self._like(_mul_terms(self.ring, self.terms, other.terms, prec), prec)

    def scale(self, c) -> "TruncSeries":
        c = self.ring.normalize(c)
        if not c:
            return self._like({})
        norm = self.ring.normalize
        out = {}
        for e, v in self.terms.items():
            v = norm(v * c)
            if v:
                out[e] = v
        return self._like(out)

    def __pow__(self, n: int) -> "TruncSeries":
        result = TruncSeries.constant(self.ring, self.nvars, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.ring == other.ring and self.nvars == other.nvars
                and self.prec == other.prec and self.terms == other.terms)

    def __hash__(self):
        return hash((self.prec, frozenset(self.terms.items())))

    def agrees_with(self, other: "TruncSeries", prec: int | None = None) -> bool:
        """Coefficient equality up to the common (or given) precision."""
        self._check(other)
        p = min(self.prec, other.prec) if prec is None else prec
        a = {e: c for e, c in self.terms.items() if sum(e) <= p}
        b = {e: c for e, c in other.terms.items() if sum(e) <= p}
        return a == b

    # -- substitution -----------------------------------------------------------
    def substitute(self, images: Sequence["TruncSeries"], cache: dict | None = None) -> "TruncSeries":
        """Replace ``x_i`` by ``images[i]``; images need zero constant term."""
        if len(images) != self.nvars:
            raise ValueError(f"expected {self.nvars} images, got {len(images)}")
        if not images:
            return self
        first = images[0]
        for g in images:
            if g.ring != self.ring or g.nvars != first.nvars:
                raise DescriptorMismatch("substitution images disagree on ring or arity")
            if g.constant_term():
                raise NonzeroConstantTerm("substitution image has a nonzero constant term")
        p = min([self.prec] + [g.prec for g in images])
        if cache is None:
            cache = {}
        one_exp = (0,) * first.nvars

        def image(e: Exp) -> dict:
            hit = cache.get(e)
            if hit is not None:
                return hit
            if not any(e):
                out = {one_exp: self.ring.one}
            else:
                i = next(j for j, x in enumerate(e) if x)
                prev = e[:i] + (e[i] - 1,) + e[i + 1:]
                out = _mul_terms(self.ring, image(prev), images[i].terms, p)
            cache[e] = out
            return out

        acc: dict = {}
        get = acc.get
        for e, c in self.terms.items():
            if sum(e) > p:
                continue
            for k, v in image(e).items():
                acc[k] = get(k, 0) + c * v
        return TruncSeries(self.ring, first.nvars, p, _clean(self.ring, acc), clean=False)

    def change_vars(self, A: Sequence[Sequence[int]]) -> "TruncSeries":
        """Substitute ``x_i -> sum_j A[i][j] x_j``; precision is unchanged."""
        n = self.nvars
        if len(A) != n or any(len(r) != n for r in A):
            raise ValueError("change of variables needs a square matrix of size nvars")
        images = []
        for row in A:
            terms = {tuple(1 if k == j else 0 for k in range(n)): a for j, a in enumerate(row) if a}
            images.append(TruncSeries(self.ring, n, self.prec, terms))
        return self.substitute(images)

    # -- division -------------------------------------------------------------
    def divide_by_coordinate(self, i: int) -> "TruncSeries":
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                raise NotDivisible(f"monomial {list(e)} does not contain x{i + 1}", witness=list(e))
            out[e[:i] + (e[i] - 1,) + e[i + 1:]] = c
        q = self._like(out, self.prec - 1)
        # multiply back: shifting exponents is injective, so this is a recount
        back = {e[:i] + (e[i] + 1,) + e[i + 1:]: c for e, c in q.terms.items()}
        DIVISION_LEDGER.record("coordinate", back == self.terms)
        return q

    def exact_div_linear(self, g: "TruncSeries") -> "TruncSeries":
        """Quotient ``q`` with ``q*g = self`` up to the common precision, which drops by one."""
        self._check(g)
        return LinearDivisor(g).divide(self)

    def invert_unit(self) -> "TruncSeries":
        ring = self.ring
        c0 = self.constant_term()
        if not ring.is_unit(c0):
            raise NonUnitConstantTerm(f"constant term {ring.to_str(c0)} is not a unit")
        inv0 = ring.inverse(c0)
        fh = [dict() for _ in range(self.prec + 1)]
        for e, v in self.terms.items():
            fh[sum(e)][e] = v
        gh = [{(0,) * self.nvars: inv0}]
        for d in range(1, self.prec + 1):
            acc: dict = {}
            for k in range(d):
                for e, v in _mul_terms(ring, gh[k], fh[d - k], self.prec).items():
                    acc[e] = acc.get(e, 0) + v
            gh.append(_clean(ring, {e: -v * inv0 for e, v in acc.items()}))
        out = {}
        for part in gh:
            out.update(part)
        return self._like(out)

    # -- text -----------------------------------------------------------------
    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), tuple(-x for x in t[0])))

    def to_json(self) -> dict:
        return {"prec": self.prec,
                "terms": [{"exp": list(e), "coef": self.ring.to_json_value(c)} for e, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, data: dict, ring: Ring | str, nvars: int | None = None) -> "TruncSeries":
        ring = parse_ring(ring)
        terms = {tuple(t["exp"]): ring.from_json_value(t["coef"]) for t in data["terms"]}
        if nvars is None:
            nvars = len(next(iter(terms))) if terms else 0
        return cls(ring, nvars, data["prec"], terms)

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            cs = self.ring.to_str(c)
            if " " in cs:
                cs = f"({cs})"
            parts.append(cs if not mono else (mono if cs == "1" else f"{cs}*{mono}"))
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O({self.prec + 1})"

    def __repr__(self):
        return f"TruncSeries({self.to_str()})"


class LinearDivisor:
    """Reusable division by a series ``g`` whose linear part is ``c`` times a unimodular row.

    A unimodular ``M`` with first row ``k`` moves the linear part onto the first
    coordinate; the quotient is then solved degree by degree.  Images of
    monomials under the two linear substitutions are homogeneous, so they are
    cached across calls regardless of precision.
    """

    def __init__(self, g: TruncSeries):
        ring = g.ring
        self.g = g
        self.ring = ring
        self.nvars = g.nvars
        if g.constant_term():
            raise NonzeroConstantTerm("divisor has a nonzero constant term")
        row = []
        for c in g.linear_part():
            lift = ring.integer_lift(c)
            if lift is None or getattr(lift, "denominator", 1) != 1:
                raise NotUnimodularLinearPart("linear part of the divisor is not integral",
                                              linear_part=[ring.to_str(x) for x in g.linear_part()])
            row.append(int(lift))
        if not any(row):
            raise NotDivisible("divisor has zero linear part")
        c = 0
        for x in row:
            c = math.gcd(c, x)
        k = [x // c for x in row]
        self.c = c
        self.c_ring = ring.normalize(c)
        if not ring.is_regular(self.c_ring):
            raise NotUnimodularLinearPart(f"linear part is {c} times a unimodular row and {c} is not regular",
                                          factor=c, row=k)
        self.plain = k == [1] + [0] * (self.nvars - 1)
        if self.plain:
            self.M = self.Minv = None
        else:
            try:
                self.M = complete_unimodular_row(k)
            except NotUnimodular:
                raise NotUnimodularLinearPart("linear row cannot be completed", row=k) from None
            self.Minv = inverse_unimodular(self.M)
        self._fwd: dict = {}
        self._back: dict = {}
        gt = self._transform(g.terms, self.Minv, self._fwd)
        self.gh: dict[int, dict] = {}
        for e, v in gt.items():
            self.gh.setdefault(sum(e), {})[e] = v

    def _image(self, A, cache: dict, e: Exp) -> dict:
        hit = cache.get(e)
        if hit is not None:
            return hit
        if not any(e):
            out = {e: self.ring.one}
        else:
            i = next(j for j, x in enumerate(e) if x)
            prev = e[:i] + (e[i] - 1,) + e[i + 1:]
            lin = {tuple(int(t == j) for t in range(self.nvars)): a for j, a in enumerate(A[i]) if a}
            out = _mul_terms(self.ring, self._image(A, cache, prev), lin, sum(e))
        cache[e] = out
        return out

    def _transform(self, terms: dict, A, cache: dict) -> dict:
        if A is None:
            return dict(terms)
        acc: dict = {}
        get = acc.get
        for e, c in terms.items():
            for k, v in self._image(A, cache, e).items():
                acc[k] = get(k, 0) + c * v
        return _clean(self.ring, acc)

    def divide(self, f: TruncSeries) -> TruncSeries:
        ring = self.ring
        p = min(f.prec, self.g.prec)
        if p - 1 < 0:
            raise PrecisionExhausted("no precision left for division", prec=p - 1)
        fterms = {e: v for e, v in f.terms.items() if sum(e) <= p}
        ft = self._transform(fterms, self.Minv, self._fwd)
        fh: dict[int, dict] = {}
        for e, v in ft.items():
            fh.setdefault(sum(e), {})[e] = v
        if fh.get(0):
            raise NotDivisible("dividend has a nonzero constant term", degree=0)
        q: list[dict] = []
        norm = ring.normalize
        c, c_ring = self.c, self.c_ring
        for m in range(1, p + 1):
            rhs = dict(fh.get(m, {}))
            for kdeg in range(0, m - 1):
                gpart = self.gh.get(m - kdeg)
                if not gpart or not q[kdeg]:
                    continue
                for e, v in _mul_terms(ring, q[kdeg], gpart, p).items():
                    rhs[e] = rhs.get(e, 0) - v
            qm = {}
            for e, v in rhs.items():
                v = norm(v)
                if not v:
                    continue
                if e[0] == 0:
                    raise NotDivisible(f"not divisible in degree {m}", degree=m, witness=list(e))
                if c != 1:
                    try:
                        v = ring.exact_div(v, c_ring)
                    except NotDivisible:
                        raise NotDivisible(f"coefficient not divisible by {c} in degree {m}", degree=m) from None
                qm[(e[0] - 1,) + e[1:]] = v
            q.append(qm)
        qt: dict = {}
        for part in q:
            qt.update(part)
        qt = self._transform(qt, self.M, self._back)
        quotient = TruncSeries(ring, self.nvars, p - 1, qt, clean=False)
        ok = quotient.mul_to(self.g, p).agrees_with(f, p)
        DIVISION_LEDGER.record("linear", ok)
        if not ok:
            raise NotDivisible("multiply-back check failed")
        return quotient


def series_from_terms(ring: Ring, nvars: int, prec: int, terms: Iterable[tuple[Sequence[int], object]]) -> TruncSeries:
    acc: dict = {}
    for e, c in terms:
        e = tuple(e)
        acc[e] = acc.get(e, 0) + c
    return TruncSeries(ring, nvars, prec, acc)
