"""The formal affine Demazure algebra on the basis ``X_{I_w}``.

Elements of D_F are stored by their certified coefficients in S.  Rebasing a
product of Demazure elements runs through the twisted algebra and then clears
every denominator by exact division; when truncation leaves fewer certified
degrees than requested the computation is repeated at a higher internal
precision (see :meth:`DemazureAlgebra.certified`).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Callable, Sequence

from .errors import NotInS, PrecisionExhausted
from .formalgroupalgebra import AlgebraConfig, FGAContext, make_context
from .powerseries import TruncSeries
from .twistedalgebra import QWElem, TwistedAlgebra

# m_ij of the braid relation from a_ij * a_ji
BRAID_ORDER = {0: 2, 1: 3, 2: 4, 3: 6}


def braid_words(i: int, j: int, m: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    left = tuple(i if k % 2 == 0 else j for k in range(m))
    right = tuple(j if k % 2 == 0 else i for k in range(m))
    return left, right


def _min_prec(values) -> int | None:
    precs = [s.prec for s in values]
    return min(precs) if precs else None


@dataclass
class DFElem:
    """``sum_w c_w X_{I_w}`` with coefficients in S."""

    coeffs: dict[int, TruncSeries]
    words: dict[int, tuple[int, ...]] = field(repr=False)
    certified: int | None = None

    def __post_init__(self):
        low = _min_prec(self.coeffs.values())
        if low is not None:
            self.certified = low if self.certified is None else min(low, self.certified)
        self.coeffs = {w: c for w, c in self.coeffs.items() if not c.is_zero()}

    @property
    def prec(self) -> int | None:
        return self.certified

    def coeff(self, w: int, like: TruncSeries | None = None) -> TruncSeries:
        c = self.coeffs.get(w)
        if c is not None:
            return c
        ref = like if like is not None else next(iter(self.coeffs.values()))
        return TruncSeries.zero(ref.ring, ref.nvars, ref.prec)

    def __add__(self, other: "DFElem") -> "DFElem":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out[w] + c if w in out else c
        return DFElem(out, self.words)

    def __sub__(self, other: "DFElem") -> "DFElem":
        return self + other.scale(-1)

    def scale(self, s) -> "DFElem":
        return DFElem({w: c * s for w, c in self.coeffs.items()}, self.words)

    def truncate(self, prec: int) -> "DFElem":
        return DFElem({w: c.truncate(min(prec, c.prec)) for w, c in self.coeffs.items()}, self.words)

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def to_json(self, W) -> dict:
        return {"terms": [{"w": list(self.words[w]), "coeff": self.coeffs[w].to_json()} for w in self.support()],
                "certified_prec": self.prec}


@dataclass
class CoproductTable:
    """``Delta(X_{I_w}) = sum sigma[(u, v, w)] X_{I_u} (x) X_{I_v}``."""

    sigma: dict[tuple[int, int, int], TruncSeries]
    words: dict[int, tuple[int, ...]]
    size: int
    prec: int

    def entry(self, u: int, v: int, w: int) -> TruncSeries | None:
        return self.sigma.get((u, v, w))

    def column(self, w: int) -> dict[tuple[int, int], TruncSeries]:
        return {(u, v): s for (u, v, x), s in self.sigma.items() if x == w}

    def certified_prec(self) -> int:
        return min((s.prec for s in self.sigma.values()), default=self.prec)

    def _value(self, key) -> TruncSeries | None:
        return self.sigma.get(key)

    def check_symmetry(self) -> list[tuple[int, int, int]]:
        bad = []
        for (u, v, w), s in self.sigma.items():
            t = self.sigma.get((v, u, w))
            if t is None or not s.agrees_with(t):
                bad.append((u, v, w))
        return bad

    def check_counit(self) -> list[tuple[int, int, int]]:
        """``sigma^{e,v}_w = [v = w]``, the row of the counit ``eps(X_{I_w}) = [w = e]``."""
        bad = []
        for w in range(self.size):
            for v in range(self.size):
                s = self.sigma.get((0, v, w))
                if v == w:
                    if s is None or not (s - 1).is_zero():
                        bad.append((0, v, w))
                elif s is not None and not s.is_zero():
                    bad.append((0, v, w))
        return bad

    def check_coassociativity(self, triples=None) -> list[tuple[int, int, int, int]]:
        """``sum_v sigma^{v,c}_w sigma^{a,b}_v = sum_v sigma^{a,v}_w sigma^{b,c}_v`` for all ``a, b, c, w``."""
        by_w: dict[int, list] = {}
        for (u, v, w), s in self.sigma.items():
            by_w.setdefault(w, []).append((u, v, s))
        bad = []
        n = self.size
        for w in range(n):
            left: dict = {}
            right: dict = {}
            for v, c, s in by_w.get(w, ()):
                for a, b, t in by_w.get(v, ()):
                    key = (a, b, c)
                    left[key] = left[key] + s * t if key in left else s * t
            for a, v, s in by_w.get(w, ()):
                for b, c, t in by_w.get(v, ()):
                    key = (a, b, c)
                    right[key] = right[key] + s * t if key in right else s * t
            keys = set(left) | set(right)
            if triples is not None:
                keys &= set(triples)
            for key in sorted(keys):
                a_val, b_val = left.get(key), right.get(key)
                if a_val is None:
                    ok = b_val.is_zero()
                elif b_val is None:
                    ok = a_val.is_zero()
                else:
                    ok = a_val.agrees_with(b_val)
                if not ok:
                    bad.append(key + (w,))
        return bad

    def to_json(self, W=None) -> dict:
        label = (lambda w: list(self.words[w]))
        return {"words": {str(w): list(self.words[w]) for w in range(self.size)},
                "certified_prec": self.certified_prec(),
                "sigma": [{"u": label(u), "v": label(v), "w": label(w), "value": s.to_json()}
                          for (u, v, w), s in sorted(self.sigma.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1]))]}


class DemazureAlgebra:
    """D_F for one configuration, with a chosen word for every Weyl element."""

    max_refinements = 4

    def __init__(self, cfg: AlgebraConfig, words: dict[int, Sequence[int]] | None = None,
                 ctx: FGAContext | None = None):
        self.cfg = cfg
        self.ctx = ctx if ctx is not None else make_context(cfg)
        self.A = TwistedAlgebra(self.ctx, words)
        self.W = self.ctx.W
        self.words = self.A.words
        self.target = cfg.prec
        self._finer: DemazureAlgebra | None = None
        self._rebased: dict[tuple[int, ...], DFElem] = {}
        self._coproducts: dict[tuple[int, ...], dict[tuple[int, int], TruncSeries]] = {}

    @classmethod
    def from_config(cls, words=None, **kwargs) -> "DemazureAlgebra":
        return cls(AlgebraConfig(**kwargs), words)

    @property
    def working_prec(self) -> int:
        return self.ctx.prec

    def describe(self) -> dict:
        return dict(self.ctx.describe(), prec=self.target,
                    words={str(w): list(self.words[w]) for w in range(len(self.W))})

    # -- precision management ----------------------------------------------------------------
    def refined(self, extra: int) -> "DemazureAlgebra":
        """The same algebra computed with ``extra`` more internal degrees (memoized)."""
        have = self._finer
        if have is not None and have.working_prec >= self.working_prec + extra:
            return have
        slack = self.working_prec + extra - self.cfg.prec
        finer = DemazureAlgebra(replace(self.cfg, slack=slack), self.words)
        self._finer = finer
        return finer

    def certified(self, compute: Callable[["DemazureAlgebra"], dict], target: int | None = None) -> dict:
        """Run ``compute`` (which returns a map to series) until every value is certified to ``target``.

        Each retry adds the observed deficit to the internal precision (or ``l(w_0)``
        degrees when the precision ran out altogether).  Values are
        returned truncated to ``target``; if the retries run out the best values are
        returned with whatever precision they carry.
        """
        target = self.target if target is None else target
        alg = self
        step = max(2, self.W.length(self.W.longest))
        tries = self.max_refinements if self.cfg.adaptive else 0
        for attempt in range(tries + 1):
            try:
                out = compute(alg)
            except PrecisionExhausted:
                if attempt == tries:
                    raise
                alg = alg.refined(alg.working_prec - self.working_prec + step)
                continue
            low = _min_prec(_series_in(out))
            if low is None or low >= target:
                return _truncate_all(out, target)
            if attempt < tries:
                alg = alg.refined(alg.working_prec - self.working_prec + target - low)
        return out

    # -- rebasing ------------------------------------------------------------------------------
    def _rebase_here(self, word: tuple[int, ...]) -> dict[int, TruncSeries]:
        coeffs = self.A.rebase_certified(self.A.x_word(word))
        return coeffs

    def rebase_word(self, word: Sequence[int]) -> DFElem:
        """``X_I`` on the basis, certified in S, with the triangularity assertions."""
        word = tuple(word)
        hit = self._rebased.get(word)
        if hit is not None:
            return hit
        full = self.certified(lambda alg: alg._rebase_here(word))
        coeffs = {w: c for w, c in full.items() if not c.is_zero()}
        W = self.W
        if W.is_reduced(word):
            w = W.word_to_element(word)
            for v in coeffs:
                assert W.bruhat_leq(v, w), f"X_{word} has a coefficient outside the Bruhat interval of its element"
            lead = coeffs.get(w)
            assert lead is not None and (lead - 1).is_zero(), f"X_{word} does not have unit leading coefficient"
        else:
            for v in coeffs:
                assert W.length(v) < len(word), f"non-reduced X_{word} reaches length {W.length(v)}"
        hit = DFElem(full, self.words)
        self._rebased[word] = hit
        return hit

    def basis(self, w: int) -> DFElem:
        return DFElem({w: self.ctx.one().truncate(self.target)}, self.words)

    def expand(self, d: DFElem) -> QWElem:
        """``d`` as an element of Q_W."""
        return self.A.expand(d.coeffs)

    def from_qw(self, a: QWElem) -> DFElem:
        """Rebase an element of Q_W lying in D_F (raises :class:`NotInS` otherwise)."""
        return DFElem(_truncate_all(self.A.rebase_certified(a), self.target), self.words)

    # -- relations -------------------------------------------------------------------------------
    def braid_order(self, i: int, j: int) -> int:
        C = self.ctx.datum.cartan
        return BRAID_ORDER[C[i - 1][j - 1] * C[j - 1][i - 1]]

    def eta_coeffs(self, i: int, j: int) -> DFElem:
        """``eta_w`` with ``X_i X_j X_i ... - X_j X_i X_j ... = sum eta_w X_{I_w}`` (``m_ij`` factors each)."""
        if i == j:
            raise ValueError("the braid deviation needs two distinct simple roots")
        left, right = braid_words(i, j, self.braid_order(i, j))

        def compute(alg):
            diff = alg.A.x_word(left) - alg.A.x_word(right)
            return alg.A.rebase_certified(diff)

        eta = DFElem(self.certified(compute), self.words)
        top = self.W.word_to_element(left)
        for w in eta.coeffs:
            if not (self.W.bruhat_leq(w, top) and w != top):
                raise AssertionError(f"braid deviation has a term at {self.W.word(w)}, not below the longest element")
        return eta

    def eta_residual(self, i: int, j: int, eta: DFElem | None = None) -> QWElem:
        """``sum eta_w X_{I_w} - (X_I - X_I')`` in Q_W; zero when the relation holds."""
        eta = self.eta_coeffs(i, j) if eta is None else eta
        left, right = braid_words(i, j, self.braid_order(i, j))
        diff = self.A.x_word(left) - self.A.x_word(right)
        return self.A.expand(eta.coeffs) - diff

    def pass_coefficient(self, word: Sequence[int], q: TruncSeries) -> dict[frozenset, TruncSeries]:
        """``phi_{I,E}(q)`` with ``X_I q = sum_E phi_{I,E}(q) X_{I|E}``; ``E`` holds 0-based positions.

        Moving ``q`` left through ``X_i`` gives ``Delta_i(q) + s_i(q) X_i``: a position kept in ``E``
        applies ``s_i``, a dropped one applies ``Delta_i``.
        """
        word = tuple(word)
        ctx = self.ctx
        state: dict[frozenset, TruncSeries] = {frozenset(): q}
        for pos in range(len(word) - 1, -1, -1):
            i = word[pos]
            nxt: dict[frozenset, TruncSeries] = {}
            for E, val in state.items():
                kept = ctx.simple_reflect(i, val)
                dropped = ctx.demazure_simple(i, val)
                if not kept.is_zero():
                    nxt[E | {pos}] = kept
                if not dropped.is_zero():
                    nxt[E] = dropped
            state = nxt
        return state

    def pass_coefficient_residual(self, word: Sequence[int], q: TruncSeries) -> QWElem:
        word = tuple(word)
        A = self.A
        lhs = A.x_word(word) * A.scalar(q)
        rhs = QWElem(self.ctx)
        for E, phi in self.pass_coefficient(word, q).items():
            sub = tuple(word[k] for k in sorted(E))
            rhs = rhs + A.x_word(sub).scale_left(phi)
        return lhs - rhs

    def relation_71(self, i: int, q: TruncSeries) -> QWElem:
        """``X_i q - Delta_i(q) - s_i(q) X_i``."""
        A, ctx = self.A, self.ctx
        lhs = A.x_simple(i) * A.scalar(q)
        rhs = A.scalar(ctx.demazure_simple(i, q)) + A.x_simple(i).scale_left(ctx.simple_reflect(i, q))
        return lhs - rhs

    def relation_72(self, i: int) -> QWElem:
        """``X_i^2 - kappa_i X_i``."""
        X = self.A.x_simple(i)
        k = self.ctx.kappa(self.ctx.datum.simple_root(i).lattice)
        return X * X - X.scale_left(k)

    # -- coproduct --------------------------------------------------------------------------------
    def _coproduct_here(self, word: tuple[int, ...]) -> dict[tuple[int, int], TruncSeries]:
        ctx = self.ctx
        l = len(word)
        rebased: dict[tuple[int, ...], dict[int, TruncSeries]] = {}

        def sub(E):
            key = tuple(word[k] for k in E)
            hit = rebased.get(key)
            if hit is None:
                hit = rebased[key] = self._rebase_here(key)
            return hit

        out: dict[tuple[int, int], TruncSeries] = {}
        subsets = [tuple(k for k in range(l) if mask >> k & 1) for mask in range(1 << l)]
        for E1, E2 in product(subsets, subsets):
            if not set(E1) & set(E2) and len(set(E1) | set(E2)) < l:
                continue
            p = ctx.p_coeff(word, E1, E2)
            if p.is_zero():
                continue
            for u, a in sub(E1).items():
                pa = p * a
                for v, b in sub(E2).items():
                    term = pa * b
                    out[(u, v)] = out[(u, v)] + term if (u, v) in out else term
        return out

    def coproduct_word(self, word: Sequence[int]) -> dict[tuple[int, int], TruncSeries]:
        """``Delta(X_I)`` on ``X_{I_u} (x) X_{I_v}`` by the product-formula coefficients."""
        word = tuple(word)
        hit = self._coproducts.get(word)
        if hit is None:
            full = self.certified(lambda alg: alg._coproduct_here(word))
            hit = self._coproducts[word] = {k: s for k, s in full.items() if not s.is_zero()}
        return hit

    def coproduct(self, w: int) -> dict[tuple[int, int], TruncSeries]:
        """``Delta(X_{I_w})`` for the basis word of ``w``."""
        return self.coproduct_word(self.words[w])

    def coproduct_via_tensor(self, w: int) -> dict[tuple[int, int], TruncSeries]:
        """The same coefficients from ``delta_v -> delta_v (x) delta_v`` and tensor rebasing."""

        def compute(alg):
            A = alg.A
            t = A.coproduct_qw(A.basis_element(w))
            coeffs = A.rebase_tensor(t)
            return {key: A.certify_in_s(q) for key, q in coeffs.items()}

        return {k: s for k, s in self.certified(compute).items() if not s.is_zero()}

    def coproduct_table(self, elements: Sequence[int] | None = None) -> CoproductTable:
        elements = range(len(self.W)) if elements is None else elements
        sigma = {}
        for w in elements:
            for (u, v), s in self.coproduct(w).items():
                sigma[(u, v, w)] = s
        return CoproductTable(sigma, dict(self.words), len(self.W), self.target)

    # -- counit and action ----------------------------------------------------------------------
    def counit(self, d: DFElem) -> TruncSeries:
        """``eps(d)``: only the ``X_e`` coefficient survives."""
        return d.coeff(0, like=self.ctx.zero().truncate(self.target))

    def act_on(self, d: DFElem, s: TruncSeries) -> TruncSeries:
        """``sum_w c_w Delta_{I_w}(s)``."""
        ctx = self.ctx
        out = None
        for w, c in sorted(d.coeffs.items()):
            term = c * ctx.demazure_seq(self.words[w], s)
            out = term if out is None else out + term
        return out if out is not None else ctx.zero(s.prec)

    def act_word(self, word: Sequence[int], s: TruncSeries) -> TruncSeries:
        return self.ctx.demazure_seq(word, s)

    def augmented_coproduct_check(self, i: int, table: CoproductTable | None = None) -> tuple[bool, dict]:
        """After applying the augmentation to every coefficient, ``Delta(X_i)`` must read
        ``X_i (x) 1 + 1 (x) X_i``."""
        w = self.W.simple(i)
        column = table.column(w) if table is not None else self.coproduct(w)
        expected = {(w, 0): 1, (0, w): 1}
        ring = self.ctx.ring
        for key in set(column) | set(expected):
            s = column.get(key)
            value = s.constant_term() if s is not None else ring.zero
            want = ring.normalize(expected.get(key, 0))
            if ring.normalize(value) != want:
                return False, {"u": list(self.words[key[0]]), "v": list(self.words[key[1]]),
                               "found": ring.to_str(ring.normalize(value)), "expected": ring.to_str(want)}
        return True, {}

    # -- relation suite ----------------------------------------------------------------------------
    def relation_suite(self, seed: int = 0, samples: int = 20) -> dict:
        """Check the three defining relations; returns a report with one entry per check."""
        ctx = self.ctx
        rng = random.Random(seed)
        n = ctx.datum.rank
        report = {"config": self.describe(), "seed": seed, "checks": []}

        def record(name, ok, **extra):
            report["checks"].append(dict(name=name, ok=bool(ok), **extra))

        for k in range(samples):
            i = 1 + k % n
            q = ctx.random_series(rng, max_degree=min(ctx.prec, self.target + 2))
            res = self.relation_71(i, q)
            record("leibniz", res.is_zero(), i=i, sample=k, min_prec=res.min_prec() if not res.is_zero() else None)
        for i in range(1, n + 1):
            record("square", self.relation_72(i).is_zero(), i=i)
            sq = self.rebase_word((i, i))
            kappa = ctx.kappa(ctx.datum.simple_root(i).lattice)
            s_i = self.W.simple(i)
            ok = set(sq.coeffs) <= {s_i} and sq.coeff(s_i, like=kappa).agrees_with(kappa)
            record("square_rebased", ok, i=i)
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                try:
                    eta = self.eta_coeffs(i, j)
                except NotInS as exc:
                    record("braid", False, i=i, j=j, error=exc.to_json())
                    continue
                res = self.eta_residual(i, j, eta)
                record("braid", res.is_zero(), i=i, j=j, eta_support=[list(self.words[w]) for w in eta.support()],
                       eta_prec=eta.prec)
        report["all_ok"] = all(c["ok"] for c in report["checks"])
        return report


def _series_in(out: dict):
    for v in out.values():
        if isinstance(v, TruncSeries):
            yield v
        elif isinstance(v, dict):
            yield from _series_in(v)


def _truncate_all(out: dict, prec: int) -> dict:
    res = {}
    for k, v in out.items():
        if isinstance(v, TruncSeries):
            res[k] = v.truncate(min(prec, v.prec))
        elif isinstance(v, dict):
            res[k] = _truncate_all(v, prec)
        else:
            res[k] = v
    return res
