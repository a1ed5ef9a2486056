"""The twisted formal group algebra Q_W and its tensor square.

``QElem`` is a fraction ``num / prod x_beta^{c_beta}`` over positive roots
``beta``; denominators stay symbolic until :func:`TwistedAlgebra.certify_in_s`
clears them by exact division.  ``QWElem`` is ``sum_w q_w delta_w`` with
coefficients on the left and product ``(q d_v)(q' d_w) = q v(q') d_{vw}``.
"""

from __future__ import annotations

from typing import Sequence

from .errors import NotDivisible, NotInS, NotUnimodularLinearPart, RootNotRegular
from .formalgroupalgebra import FGAContext
from .powerseries import LinearDivisor, TruncSeries


class QElem:
    __slots__ = ("ctx", "num", "den")

    def __init__(self, ctx: FGAContext, num: TruncSeries, den: tuple[int, ...] | None = None):
        self.ctx = ctx
        self.num = num
        self.den = den if den is not None else (0,) * ctx.datum.npos

    @property
    def prec(self) -> int:
        return self.num.prec

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def den_size(self) -> int:
        return sum(self.den)

    def _lift(self, other) -> "QElem":
        if isinstance(other, QElem):
            return other
        if isinstance(other, TruncSeries):
            return QElem(self.ctx, other)
        return QElem(self.ctx, self.ctx.const(other))

    def __add__(self, other):
        other = self._lift(other)
        if not any(self.den) and not any(other.den):
            return QElem(self.ctx, self.num + other.num, self.den)
        if other.is_zero() and other.den == self.den:
            return QElem(self.ctx, self.num.truncate(min(self.prec, other.prec)), self.den)
        lcm = tuple(max(a, b) for a, b in zip(self.den, other.den))
        a = self.num if lcm == self.den else self._mul(self.num, self.ctx.x_product([l - d for l, d in zip(lcm, self.den)]))
        b = other.num if lcm == other.den else self._mul(other.num, self.ctx.x_product([l - d for l, d in zip(lcm, other.den)]))
        return QElem(self.ctx, a + b, lcm)

    def _mul(self, f: TruncSeries, g: TruncSeries) -> TruncSeries:
        return f.mul_sharp(g, self.ctx.prec)

    __radd__ = __add__

    def __neg__(self):
        return QElem(self.ctx, -self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QElem):
            return QElem(self.ctx, self._mul(self.num, other.num), tuple(a + b for a, b in zip(self.den, other.den)))
        if isinstance(other, TruncSeries):
            return QElem(self.ctx, self._mul(self.num, other), self.den)
        return QElem(self.ctx, self.num * other, self.den)

    __rmul__ = __mul__

    def times_roots(self, counts: Sequence[int], sign: int = 1) -> "QElem":
        """Multiply by ``sign * prod x_beta^{c_beta}``, cancelling against the denominator first."""
        den = list(self.den)
        rest = [0] * len(den)
        for k, c in enumerate(counts):
            cancel = min(c, den[k])
            den[k] -= cancel
            rest[k] = c - cancel
        num = self.num if not any(rest) else self._mul(self.num, self.ctx.x_product(rest))
        if sign < 0:
            num = -num
        return QElem(self.ctx, num, tuple(den))

    def weyl(self, w: int) -> "QElem":
        """``w(q)``: act on the numerator and move denominator roots, rewriting negative ones."""
        if w == 0:
            return self
        ctx = self.ctx
        W = ctx.W
        npos = ctx.datum.npos
        num = ctx.weyl_act(w, self.num)
        den = [0] * npos
        for k, c in enumerate(self.den):
            if not c:
                continue
            img = W.root_action(w, k)
            if img < npos:
                den[img] += c
            else:
                # 1/x_{-g} = nu_inv(x_g) / x_g
                g = img - npos
                den[g] += c
                for _ in range(c):
                    num = self._mul(num, ctx.nu_inv(g))
        return QElem(ctx, num, tuple(den))

    def cross_equal(self, other, prec: int | None = None) -> bool:
        """Equality by cross-multiplication to the common precision."""
        other = self._lift(other)
        a = self._mul(self.num, self.ctx.x_product(other.den))
        b = self._mul(other.num, self.ctx.x_product(self.den))
        return a.agrees_with(b, prec)

    def to_json(self) -> dict:
        return {"num": self.num.to_json(),
                "den": [{"root": k, "mult": c} for k, c in enumerate(self.den) if c]}

    def __repr__(self):
        den = "*".join(f"x[{k}]^{c}" if c > 1 else f"x[{k}]" for k, c in enumerate(self.den) if c)
        return f"QElem(({self.num.to_str()}){' / ' + den if den else ''})"


class QWElem:
    """``sum_w q_w delta_w``.

    Coefficients that vanish to their precision are kept so that the precision
    of a zero survives; :meth:`support` lists the nonzero ones.
    """

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FGAContext, coeffs: dict[int, QElem] | None = None):
        self.ctx = ctx
        self.coeffs = dict(coeffs or {})

    def support(self) -> list[int]:
        return sorted(w for w, q in self.coeffs.items() if not q.is_zero())

    def coeff(self, w: int) -> QElem:
        q = self.coeffs.get(w)
        return q if q is not None else QElem(self.ctx, self.ctx.zero())

    def __add__(self, other: "QWElem") -> "QWElem":
        out = dict(self.coeffs)
        for w, q in other.coeffs.items():
            out[w] = out[w] + q if w in out else q
        return QWElem(self.ctx, out)

    def __neg__(self):
        return QWElem(self.ctx, {w: -q for w, q in self.coeffs.items()})

    def __sub__(self, other: "QWElem") -> "QWElem":
        return self + (-other)

    def scale_left(self, q) -> "QWElem":
        """``q * a`` for ``q`` in Q (or S, or an integer)."""
        if not isinstance(q, QElem):
            q = QElem(self.ctx, q if isinstance(q, TruncSeries) else self.ctx.const(q))
        return QWElem(self.ctx, {w: q * c for w, c in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, QWElem):
            # integers and series multiply on the left-coefficient side
            return self.scale_left(other) if not isinstance(other, QElem) else self * QWElem(self.ctx, {0: other})
        W = self.ctx.W
        out: dict[int, QElem] = {}
        for v, q in self.coeffs.items():
            for w, q2 in other.coeffs.items():
                term = q * q2.weyl(v)
                key = W.mul(v, w)
                out[key] = out[key] + term if key in out else term
        return QWElem(self.ctx, out)

    def __rmul__(self, other):
        return self.scale_left(other)

    def right_mul_demazure(self, k: int) -> "QWElem":
        """``a * X_alpha`` for root index ``k``: only denominators move."""
        ctx = self.ctx
        W = ctx.W
        s = W.reflection_element(k)
        npos = ctx.datum.npos
        g = k if k < npos else k - npos
        c = QElem(ctx, ctx.one() if k < npos else ctx.nu_inv(g), tuple(int(j == g) for j in range(npos)))
        out: dict[int, QElem] = {}
        for w, q in self.coeffs.items():
            term = q * c.weyl(w)
            out[w] = out[w] + term if w in out else term
            key = W.mul(w, s)
            out[key] = out[key] - term if key in out else -term
        return QWElem(ctx, out)

    def anti_involution(self) -> "QWElem":
        W = self.ctx.W
        return QWElem(self.ctx, {W.inverse(w): q.weyl(W.inverse(w)) for w, q in self.coeffs.items()})

    def act_on(self, s: TruncSeries) -> QElem:
        """The action ``(q d_w) . s = q w(s)`` on S, as an element of Q."""
        out = QElem(self.ctx, self.ctx.zero(s.prec))
        for w, q in self.coeffs.items():
            out = out + q * self.ctx.weyl_act(w, s)
        return out

    def is_zero(self) -> bool:
        return all(q.is_zero() for q in self.coeffs.values())

    def min_prec(self) -> int:
        return min((q.prec for q in self.coeffs.values()), default=self.ctx.prec)

    def equals(self, other: "QWElem") -> bool:
        diff = self - other
        return diff.is_zero()

    def to_json(self) -> dict:
        W = self.ctx.W
        return {"terms": [dict(w=list(W.word(w)), **self.coeffs[w].to_json()) for w in self.support()]}


class QWTensor:
    """``sum q_{v,w} delta_v (x) delta_w`` in Q_W (x)_Q Q_W."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FGAContext, coeffs: dict[tuple[int, int], QElem] | None = None):
        self.ctx = ctx
        self.coeffs = dict(coeffs or {})

    def __add__(self, other: "QWTensor") -> "QWTensor":
        out = dict(self.coeffs)
        for k, q in other.coeffs.items():
            out[k] = out[k] + q if k in out else q
        return QWTensor(self.ctx, out)

    def __neg__(self):
        return QWTensor(self.ctx, {k: -q for k, q in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def odot(self, other: "QWTensor") -> "QWTensor":
        """``(q d_v (x) d_w) . (q' d_v' (x) d_w') = q v(q') d_{vv'} (x) d_{ww'}``."""
        W = self.ctx.W
        out: dict[tuple[int, int], QElem] = {}
        for (v, w), q in self.coeffs.items():
            for (v2, w2), q2 in other.coeffs.items():
                term = q * q2.weyl(v)
                key = (W.mul(v, v2), W.mul(w, w2))
                out[key] = out[key] + term if key in out else term
        return QWTensor(self.ctx, out)

    def is_zero(self) -> bool:
        return all(q.is_zero() for q in self.coeffs.values())


class TwistedAlgebra:
    """Q_W over a context, with cached Demazure words and basis changes."""

    def __init__(self, ctx: FGAContext, words: dict[int, tuple[int, ...]] | None = None):
        self.ctx = ctx
        self.W = ctx.W
        for k in range(ctx.datum.npos):
            if ctx.x_root(k).is_zero():
                raise RootNotRegular(f"x of root {k} is zero over {ctx.ring}; the localization is trivial",
                                     root=k, simple_coords=list(ctx.datum.roots[k].simple_coords))
        self.words = {w: tuple(self.W.word(w)) for w in range(len(self.W))}
        if words:
            for w, word in words.items():
                if self.W.word_to_element(word) != w or not self.W.is_reduced(word):
                    raise ValueError(f"word {word} is not a reduced word of element {w}")
                self.words[w] = tuple(word)
        self._xword: dict[tuple[int, ...], QWElem] = {(): self.delta(0)}
        self._divisors: dict[int, LinearDivisor] = {}
        self._delta_x: dict[int, dict[int, TruncSeries]] = {}

    # -- elements ----------------------------------------------------------------------------
    def q(self, num: TruncSeries | int, den: Sequence[int] | None = None) -> QElem:
        if not isinstance(num, TruncSeries):
            num = self.ctx.const(num)
        return QElem(self.ctx, num, tuple(den) if den is not None else None)

    def delta(self, w: int, q=None) -> QWElem:
        q = q if isinstance(q, QElem) else self.q(1 if q is None else q)
        return QWElem(self.ctx, {w: q})

    def scalar(self, s) -> QWElem:
        return self.delta(0, s if isinstance(s, QElem) else self.q(s))

    def demazure_elem(self, k: int) -> QWElem:
        """``X_a = x_a^{-1}(1 - delta_{s_a})`` for root index ``k``."""
        ctx = self.ctx
        npos = ctx.datum.npos
        s = self.W.reflection_element(k)
        if k < npos:
            c = self.q(1, [int(j == k) for j in range(npos)])
        else:
            g = k - npos
            c = QElem(ctx, ctx.nu_inv(g), tuple(int(j == g) for j in range(npos)))
        return QWElem(ctx, {0: c, s: -c})

    def x_simple(self, i: int) -> QWElem:
        return self.demazure_elem(self.ctx.datum.simple_index(i))

    def x_word(self, word: Sequence[int]) -> QWElem:
        """``X_{i_1} ... X_{i_l}``, built by right multiplication and memoized by prefix."""
        word = tuple(word)
        hit = self._xword.get(word)
        if hit is None:
            prefix = self.x_word(word[:-1])
            hit = prefix.right_mul_demazure(self.ctx.datum.simple_index(word[-1]))
            self._xword[word] = hit
        return hit

    def basis_element(self, w: int) -> QWElem:
        return self.x_word(self.words[w])

    def diagonal_inverse_counts(self, v: int) -> list[int]:
        inv = self.W.inversion_set(v)
        return [int(k in inv) for k in range(self.ctx.datum.npos)]

    # -- certification ------------------------------------------------------------------------
    def divisor(self, k: int) -> LinearDivisor:
        hit = self._divisors.get(k)
        if hit is None:
            hit = self._divisors[k] = LinearDivisor(self.ctx.x_root(k))
        return hit

    def reduce(self, q: QElem) -> QElem:
        """Cancel every denominator factor that divides the numerator exactly."""
        num = q.num
        den = list(q.den)
        for k, c in enumerate(den):
            while den[k]:
                try:
                    num = self.divisor(k).divide(num)
                except (NotDivisible, NotUnimodularLinearPart):
                    break
                den[k] -= 1
        return QElem(self.ctx, num, tuple(den))

    def certify_in_s(self, q: QElem) -> TruncSeries:
        """The series equal to ``q``, or :class:`NotInS` naming the root that would not cancel."""
        num = q.num
        for k, c in enumerate(q.den):
            for _ in range(c):
                if num.is_zero():
                    num = num.truncate(num.prec - 1)
                    continue
                try:
                    num = self.divisor(k).divide(num)
                except NotUnimodularLinearPart as exc:
                    raise NotInS(f"cannot divide by x of root {k}: {exc}", root=k) from None
                except NotDivisible as exc:
                    raise NotInS(f"coefficient is not in S: division by x of root {k} fails",
                                 root=k, degree=exc.details.get("degree")) from None
        return num

    # -- basis changes ---------------------------------------------------------------------------
    def rebase_to_x(self, a: QWElem) -> dict[int, QElem]:
        """Coefficients ``c_w`` with ``a = sum_w c_w X_{I_w}`` by descending-length elimination."""
        W = self.W
        r = dict(a.coeffs)
        out: dict[int, QElem] = {}
        for v in sorted(range(len(W)), key=lambda k: (-W.length(k), -k)):
            rv = r.pop(v, None)
            if rv is None:
                continue
            if rv.is_zero():
                # keep the precision to which this coefficient is known to vanish
                out[v] = rv
                continue
            l = W.length(v)
            c = rv.times_roots(self.diagonal_inverse_counts(v), -1 if l % 2 else 1)
            if any(c.den):
                c = self.reduce(c)
            out[v] = c
            for w, coef in self.basis_element(v).coeffs.items():
                if w == v:
                    continue
                term = c * coef
                r[w] = r[w] - term if w in r else -term
        return out

    def rebase_certified(self, a: QWElem) -> dict[int, TruncSeries]:
        return {w: self.certify_in_s(q) for w, q in self.rebase_to_x(a).items()}

    def delta_in_x(self, v: int) -> dict[int, TruncSeries]:
        """``delta_v = sum_u b_{u,v} X_{I_u}`` with certified ``b``."""
        hit = self._delta_x.get(v)
        if hit is None:
            hit = self._delta_x[v] = {u: s for u, s in self.rebase_certified(self.delta(v)).items()
                                      if not s.is_zero()}
        return hit

    def rebase_via_delta(self, a: QWElem) -> dict[int, QElem]:
        """Same coefficients as :meth:`rebase_to_x`, through the certified ``delta -> X`` matrix."""
        out: dict[int, QElem] = {}
        for v, q in a.coeffs.items():
            for u, b in self.delta_in_x(v).items():
                term = q * b
                out[u] = out[u] + term if u in out else term
        return out

    def expand(self, coeffs: dict[int, QElem | TruncSeries]) -> QWElem:
        """``sum_w c_w X_{I_w}`` back in the delta basis."""
        out = QWElem(self.ctx)
        for w, c in coeffs.items():
            if not isinstance(c, QElem):
                c = QElem(self.ctx, c)
            out = out + self.basis_element(w).scale_left(c)
        return out

    # -- tensors -----------------------------------------------------------------------------------
    def coproduct_qw(self, a: QWElem) -> QWTensor:
        return QWTensor(self.ctx, {(w, w): q for w, q in a.coeffs.items()})

    def tensor_delta(self, v: int, w: int, q=None) -> QWTensor:
        q = q if isinstance(q, QElem) else self.q(1 if q is None else q)
        return QWTensor(self.ctx, {(v, w): q})

    def rebase_tensor(self, t: QWTensor) -> dict[tuple[int, int], QElem]:
        """Coefficients on ``X_{I_u} (x) X_{I_u'}``; left coefficients pass through the tensor sign."""
        out: dict[tuple[int, int], QElem] = {}
        for (v, w), q in t.coeffs.items():
            bv = self.delta_in_x(v)
            bw = self.delta_in_x(w)
            for u, b1 in bv.items():
                qb = q * b1
                for u2, b2 in bw.items():
                    term = qb * b2
                    key = (u, u2)
                    out[key] = out[key] + term if key in out else term
        return out

    def expand_tensor(self, coeffs: dict[tuple[int, int], QElem | TruncSeries]) -> QWTensor:
        """``sum c X_u (x) X_u'`` in the delta (x) delta basis."""
        out: dict[tuple[int, int], QElem] = {}
        for (u, u2), c in coeffs.items():
            if not isinstance(c, QElem):
                c = QElem(self.ctx, c)
            left, right = self.basis_element(u), self.basis_element(u2)
            for v, a in left.coeffs.items():
                ca = c * a
                for w, b in right.coeffs.items():
                    term = ca * b
                    key = (v, w)
                    out[key] = out[key] + term if key in out else term
        return QWTensor(self.ctx, out)
