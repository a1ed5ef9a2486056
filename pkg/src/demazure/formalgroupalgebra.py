"""The formal group algebra S of a root datum, in lattice coordinates.

After fixing the lattice basis ``lambda_1..lambda_n`` the algebra S is the
power series ring in ``x_i = x_{lambda_i}`` and
``x_{sum m_i lambda_i} = (m_1 .F x_1) +F ... +F (m_n .F x_n)``.

The Demazure operators are computed without dividing: on a generator

    Delta_a(x_lam) = psi_m(x_a) * G(x_{s_a lam}, x_{m a}),   m = a^vee(lam),

and on products by the twisted Leibniz rule, memoized per monomial.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .coeffring import Integers, IntegersMod, Poly, Ring, parse_ring
from .errors import DivisionCrossCheckFailed, NotARoot
from .fgl import FormalGroupLaw, build_law
from .powerseries import TruncSeries, _mul_terms
from .rootdata import RootDatum, WeylGroup, build, enumerate_weyl

# which composed B-operator a position of a product-formula word uses
NEITHER, ONE, BOTH = "n", "o", "b"


class FGAContext:
    """Datum + law + working precision, with the caches the algebra layers share."""

    def __init__(self, datum: RootDatum, law: FormalGroupLaw, prec: int, weyl: WeylGroup | None = None):
        if law.prec < prec + 2:
            raise ValueError(f"law precision {law.prec} must be at least working precision + 2 = {prec + 2}")
        self.datum = datum
        self.law = law
        self.ring: Ring = law.ring
        self.prec = prec
        self.n = datum.rank
        self.W = weyl or enumerate_weyl(datum)
        self._x: dict[tuple[int, ...], TruncSeries] = {}
        self._mono_images: dict[int, dict] = {}
        self._coord_images: dict[int, list[dict]] = {}
        self._dem_memo: dict[int, dict] = {}
        self._dem_gens: dict[int, list[dict]] = {}
        self._nu_inv: dict[int, TruncSeries] = {}
        self._kappa: dict[int, TruncSeries] = {}
        self._p_memo: dict = {}
        self._xprod: dict = {}
        self._uni_subst: dict = {}

    # -- elements ----------------------------------------------------------------------------
    def zero(self, prec: int | None = None) -> TruncSeries:
        return TruncSeries.zero(self.ring, self.n, self.prec if prec is None else prec)

    def one(self, prec: int | None = None) -> TruncSeries:
        return TruncSeries.constant(self.ring, self.n, self.prec if prec is None else prec)

    def const(self, c, prec: int | None = None) -> TruncSeries:
        return TruncSeries.constant(self.ring, self.n, self.prec if prec is None else prec, self.ring.coerce(c))

    def monomial(self, exp: Sequence[int], c=1) -> TruncSeries:
        return TruncSeries.monomial(self.ring, self.n, self.prec, exp, c)

    def coord(self, i: int) -> TruncSeries:
        """The coordinate ``x_{lambda_i}`` (0-based)."""
        return TruncSeries.var(self.ring, self.n, self.prec, i)

    def _compose(self, series: TruncSeries, arg: TruncSeries) -> TruncSeries:
        """Plug ``arg`` into a one-variable law series."""
        return series.substitute([arg])

    def x_of(self, lam: Sequence[int]) -> TruncSeries:
        lam = tuple(int(c) for c in lam)
        if len(lam) != self.n:
            raise ValueError(f"lattice vector needs {self.n} coordinates")
        hit = self._x.get(lam)
        if hit is not None:
            return hit
        acc = self.zero()
        for i, m in enumerate(lam):
            if m == 0:
                continue
            term = self._compose(self.law.multiple(m), self.coord(i))
            acc = term if acc.is_zero() else self.law.F.substitute([acc, term])
        self._x[lam] = acc
        return acc

    def x_root(self, k: int) -> TruncSeries:
        return self.x_of(self.datum.roots[k].lattice)

    def x_simple(self, i: int) -> TruncSeries:
        return self.x_root(self.datum.simple_index(i))

    def root_index(self, alpha: int | Sequence[int]) -> int:
        """Root index from an index or a lattice vector."""
        if isinstance(alpha, int):
            if not 0 <= alpha < len(self.datum.roots):
                raise NotARoot(f"no root with index {alpha}")
            return alpha
        return self.datum.root_index(alpha)

    def x_product(self, counts: Sequence[int]) -> TruncSeries:
        """Product of ``x_beta^{c_beta}`` over positive roots."""
        key = tuple(counts)
        hit = self._xprod.get(key)
        if hit is None:
            hit = self.one()
            for k, c in enumerate(key):
                for _ in range(c):
                    hit = hit * self.x_root(k)
            self._xprod[key] = hit
        return hit

    def nu_inv(self, k: int) -> TruncSeries:
        """``x_beta / x_{-beta}`` as a series (a unit with constant term -1)."""
        hit = self._nu_inv.get(k)
        if hit is None:
            hit = self._nu_inv[k] = self._compose(self.law.nu_inv, self.x_root(k)).truncate(self.prec)
        return hit

    def kappa(self, alpha) -> TruncSeries:
        k = self.root_index(alpha)
        hit = self._kappa.get(k)
        if hit is None:
            hit = self._kappa[k] = self._compose(self.law.kappa, self.x_root(k)).truncate(self.prec)
        return hit

    # -- Weyl action --------------------------------------------------------------------------
    def _images(self, w: int) -> list[dict]:
        hit = self._coord_images.get(w)
        if hit is None:
            M = self.W.matrix(w)
            hit = []
            for i in range(self.n):
                col = [M[r][i] for r in range(self.n)]
                hit.append(self.x_of(col).terms)
            self._coord_images[w] = hit
        return hit

    def _mono_image(self, w: int, e: tuple[int, ...]) -> dict:
        cache = self._mono_images.setdefault(w, {})
        hit = cache.get(e)
        if hit is not None:
            return hit
        if not any(e):
            out = {e: self.ring.one}
        else:
            i = next(j for j, x in enumerate(e) if x)
            prev = e[:i] + (e[i] - 1,) + e[i + 1:]
            out = _mul_terms(self.ring, self._mono_image(w, prev), self._images(w)[i], self.prec)
        cache[e] = out
        return out

    def _linear_combination(self, u: TruncSeries, image) -> TruncSeries:
        p = min(u.prec, self.prec)
        acc: dict = {}
        get = acc.get
        for e, c in u.terms.items():
            if sum(e) > p:
                continue
            for k, v in image(e).items():
                if sum(k) <= p:
                    acc[k] = get(k, 0) + c * v
        return TruncSeries(self.ring, self.n, p, acc)

    def weyl_act(self, w: int, u: TruncSeries) -> TruncSeries:
        if w == 0:
            return u
        return self._linear_combination(u, lambda e: self._mono_image(w, e))

    def reflect(self, alpha, u: TruncSeries) -> TruncSeries:
        return self.weyl_act(self.W.reflection_element(self.root_index(alpha)), u)

    # -- Demazure operators ----------------------------------------------------------------------
    def _dem_generators(self, k: int) -> list[dict]:
        hit = self._dem_gens.get(k)
        if hit is None:
            rt = self.datum.roots[k]
            xa = self.x_root(k)
            hit = []
            for i in range(self.n):
                lam = tuple(int(j == i) for j in range(self.n))
                m = rt.pair(lam)
                mu = tuple(l - m * a for l, a in zip(lam, rt.lattice))
                x_ma = self.x_of(tuple(m * a for a in rt.lattice))
                value = self._compose(self.law.psi(m), xa) * self.law.G.substitute([self.x_of(mu), x_ma])
                hit.append(value.truncate(self.prec).terms)
            self._dem_gens[k] = hit
        return hit

    def _dem_mono(self, k: int, e: tuple[int, ...]) -> dict:
        memo = self._dem_memo.setdefault(k, {})
        hit = memo.get(e)
        if hit is not None:
            return hit
        if not any(e):
            out: dict = {}
        else:
            i = next(j for j, x in enumerate(e) if x)
            prev = e[:i] + (e[i] - 1,) + e[i + 1:]
            s = self.W.reflection_element(k)
            ring, p = self.ring, self.prec
            # Delta(x_i v) = Delta(x_i) v + s(x_i) Delta(v)
            first = _mul_terms(ring, self._dem_generators(k)[i], {prev: ring.one}, p)
            second = _mul_terms(ring, self._images(s)[i], self._dem_mono(k, prev), p)
            out = dict(first)
            for key, v in second.items():
                out[key] = out.get(key, 0) + v
            out = {key: v for key, v in ((key, ring.normalize(v)) for key, v in out.items()) if v}
        memo[e] = out
        return out

    def demazure(self, alpha, u: TruncSeries, cross_check: bool = False) -> TruncSeries:
        """``(u - s_a u)/x_a``; the result has precision ``u.prec - 1``."""
        k = self.root_index(alpha)
        p = min(u.prec, self.prec)
        out = self._linear_combination(u.truncate(p), lambda e: self._dem_mono(k, e)).truncate(p - 1) \
            if p >= 1 else TruncSeries.zero(self.ring, self.n, p - 1)
        if cross_check:
            diff = u - self.reflect(k, u)
            other = diff.exact_div_linear(self.x_root(k))
            if not other.agrees_with(out):
                raise DivisionCrossCheckFailed(f"division-free and dividing Demazure operators disagree for root {k}",
                                               root=k)
        return out

    def demazure_simple(self, i: int, u: TruncSeries) -> TruncSeries:
        return self.demazure(self.datum.simple_index(i), u)

    def demazure_seq(self, word: Sequence[int], u: TruncSeries) -> TruncSeries:
        """``Delta_{i_1} o ... o Delta_{i_l}`` (simple labels, rightmost applied first)."""
        for i in reversed(tuple(word)):
            u = self.demazure_simple(i, u)
        return u

    def simple_reflect(self, i: int, u: TruncSeries) -> TruncSeries:
        return self.weyl_act(self.W.simple(i), u)

    def b_op(self, i: int, j: int, u: TruncSeries) -> TruncSeries:
        if j == -1:
            return self.demazure_simple(i, u)
        if j == 0:
            return self.simple_reflect(i, u)
        if j == 1:
            return -(self.x_simple(i) * u)
        raise ValueError(f"B-operator index must be -1, 0 or 1, got {j}")

    # -- product formula -----------------------------------------------------------------------
    def position_types(self, l: int, E1, E2) -> tuple[str, ...]:
        E1, E2 = set(E1), set(E2)
        out = []
        for j in range(l):
            a, b = j in E1, j in E2
            out.append(BOTH if a and b else ONE if a or b else NEITHER)
        return tuple(out)

    def p_by_types(self, word: Sequence[int], types: Sequence[str]) -> TruncSeries:
        word, types = tuple(word), tuple(types)
        key = (word, types)
        hit = self._p_memo.get(key)
        if hit is not None:
            return hit
        if not word:
            out = self.one()
        else:
            inner = self.p_by_types(word[1:], types[1:])
            i, t = word[0], types[0]
            if inner.is_zero() and t != BOTH:
                out = inner.truncate(inner.prec - 1) if t == NEITHER else inner
            elif t == NEITHER:
                out = self.demazure_simple(i, inner)
            elif t == ONE:
                out = self.simple_reflect(i, inner)
            else:
                out = -(self.x_simple(i) * self.simple_reflect(i, inner))
        self._p_memo[key] = out
        return out

    def p_coeff(self, word: Sequence[int], E1, E2) -> TruncSeries:
        """``p^I_{E1,E2}`` with 0-based positions in ``E1``, ``E2``."""
        return self.p_by_types(word, self.position_types(len(word), E1, E2))

    # -- regularity advisories ------------------------------------------------------------------
    def regularity_report(self) -> list[dict]:
        """For each positive root, the content of the linear part of x_a and whether it is regular."""
        return regularity_report(self.datum, self.ring)

    # -- random inputs -----------------------------------------------------------------------------
    def random_series(self, rng: random.Random, max_degree: int | None = None, nterms: int = 4,
                      min_degree: int = 0) -> TruncSeries:
        """A seeded combination of a few monomials with small coefficients."""
        top = self.prec if max_degree is None else max_degree
        terms: dict = {}
        for _ in range(nterms):
            d = rng.randint(min_degree, top)
            e = [0] * self.n
            for _ in range(d):
                e[rng.randrange(self.n)] += 1
            c = rng.choice([-3, -2, -1, 1, 2, 3])
            terms[tuple(e)] = terms.get(tuple(e), 0) + c
        s = TruncSeries(self.ring, self.n, self.prec, terms)
        if isinstance(self.ring, Poly) and rng.random() < 0.5:
            s = s * self.ring.gen(self.ring.vars[0])
        return s

    def series_from_expression(self, text: str) -> TruncSeries:
        from .expr import evaluate_expression

        names = {f"x{i + 1}": self.coord(i) for i in range(self.n)}
        for name in getattr(self.ring, "vars", ()):
            names[name] = self.const(self.ring.parse(name))
        return evaluate_expression(text, names, self.const, calls={"x": self.x_of})

    def describe(self) -> dict:
        return {"type": self.datum.type_name(), "lattice": self.datum.lattice_kind, "ring": str(self.ring),
                "fgl": self.law.name, "working_prec": self.prec}


@dataclass
class AlgebraConfig:
    """Everything needed to set up a context; ``prec`` is the requested output precision."""

    type: str = "A2"
    lattice: object = "adj"
    ring: str = "Z"
    fgl: object = "additive"
    prec: int = 6
    slack: int | None = None
    group_cap: int = 1200
    adaptive: bool = True

    def working_prec(self, datum: RootDatum | None = None, weyl: WeylGroup | None = None) -> int:
        if self.slack is not None:
            return self.prec + self.slack
        longest = weyl.lengths[weyl.longest] if weyl is not None else 0
        return self.prec + longest


def regularity_report(datum, ring: Ring) -> list[dict]:
    """Content of each positive root in lattice coordinates, and whether it is regular in ``ring``."""
    out = []
    for rt in datum.positive_roots:
        c = 0
        for a in rt.lattice:
            c = math.gcd(c, a)
        out.append({"root": rt.index, "content": c, "regular": ring.is_regular(ring.normalize(c))})
    return out


def make_context(cfg: AlgebraConfig | None = None, **kwargs) -> FGAContext:
    if cfg is None:
        cfg = AlgebraConfig(**kwargs)
    datum = build(cfg.type, cfg.lattice)
    W = enumerate_weyl(datum, cfg.group_cap)
    P = cfg.working_prec(datum, W)
    ring = parse_ring(cfg.ring)
    law = build_law(cfg.fgl, ring, P + 2)
    return FGAContext(datum, law, P, W)
