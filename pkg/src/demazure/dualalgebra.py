"""The dual of D_F, evaluation functionals, and the integer solvers behind them.

A functional on D_F is stored by its values on the basis ``X_{I_w}``; the
product dualizes the coproduct table.  ``ev(s)`` is ``d -> d(s)``, with
coordinates ``Delta_{I_w}(s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Sequence

from .coeffring import IntegersMod
from .demazurealgebra import CoproductTable, DemazureAlgebra
from .errors import CertificateFailure, ConfigError, NoSolution
from .intlinalg import solve_linear
from .powerseries import TruncSeries


@dataclass
class DualElem:
    """``sum_w c_w X*_{I_w}``; zero coordinates are dropped."""

    coords: dict[int, TruncSeries]

    def __post_init__(self):
        self.coords = {w: c for w, c in self.coords.items() if not c.is_zero()}

    def coord(self, w: int) -> TruncSeries | None:
        return self.coords.get(w)

    def __add__(self, other: "DualElem") -> "DualElem":
        out = dict(self.coords)
        for w, c in other.coords.items():
            out[w] = out[w] + c if w in out else c
        return DualElem(out)

    def scale(self, s) -> "DualElem":
        return DualElem({w: c * s for w, c in self.coords.items()})

    def agrees_with(self, other: "DualElem") -> bool:
        for w in set(self.coords) | set(other.coords):
            a, b = self.coords.get(w), other.coords.get(w)
            if a is None:
                if not b.is_zero():
                    return False
            elif b is None:
                if not a.is_zero():
                    return False
            elif not a.agrees_with(b):
                return False
        return True

    @property
    def prec(self) -> int | None:
        return min((c.prec for c in self.coords.values()), default=None)

    def to_json(self, words) -> dict:
        return {"coords": [{"w": list(words[w]), "value": self.coords[w].to_json()} for w in sorted(self.coords)]}


def dual_mul(a: DualElem, b: DualElem, table: CoproductTable) -> DualElem:
    """``(ab)(X_w) = sum_{u,v} sigma^{u,v}_w a(X_u) b(X_v)``."""
    out: dict[int, TruncSeries] = {}
    for (u, v, w), s in table.sigma.items():
        x, y = a.coords.get(u), b.coords.get(v)
        if x is None or y is None:
            continue
        term = s * x * y
        out[w] = out[w] + term if w in out else term
    return DualElem(out)


def _monomials(n: int, degree: int) -> list[tuple[int, ...]]:
    out = []
    for combo in combinations_with_replacement(range(n), degree):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b) if a and b else 0


class DualAlgebra:
    """D_F* over a Demazure algebra, with the torsion and surjectivity solvers."""

    def __init__(self, D: DemazureAlgebra):
        self.D = D
        self.ctx = D.ctx
        self.W = D.W
        self.words = D.words
        self._table: CoproductTable | None = None

    @property
    def table(self) -> CoproductTable:
        if self._table is None:
            self._table = self.D.coproduct_table()
        return self._table

    # -- elements -----------------------------------------------------------------------------
    def unit(self) -> DualElem:
        return DualElem({0: self.ctx.one().truncate(self.D.target)})

    def basis(self, w: int) -> DualElem:
        return DualElem({w: self.ctx.one().truncate(self.D.target)})

    def mul(self, a: DualElem, b: DualElem) -> DualElem:
        return dual_mul(a, b, self.table)

    def ev(self, s: TruncSeries) -> DualElem:
        """Coordinates ``Delta_{I_w}(s)``, each truncated to the requested precision when it has it."""
        target = self.D.target
        out = {}
        for w in range(len(self.W)):
            v = self.ctx.demazure_seq(self.words[w], s)
            out[w] = v.truncate(min(v.prec, target))
        return DualElem(out)

    def evaluate(self, f: DualElem, d) -> TruncSeries:
        """``f(d)`` for ``d`` in D_F given by its basis coefficients."""
        out = self.ctx.zero().truncate(self.D.target)
        for w, c in d.coeffs.items():
            x = f.coords.get(w)
            if x is not None:
                out = out + c * x
        return out

    def multiplication_table(self) -> dict[tuple[int, int], DualElem]:
        n = len(self.W)
        return {(u, v): self.mul(self.basis(u), self.basis(v)) for u in range(n) for v in range(u, n)}

    # -- integer linear algebra on augmented Demazure values --------------------------------------
    def _integer_ring(self):
        ring = self.ctx.ring
        if not getattr(ring, "integer_like", False):
            raise ConfigError(f"the integer solvers need Z or Z/m coefficients, not {ring}")
        return ring, (ring.m if isinstance(ring, IntegersMod) else None)

    def _context_for(self, degree: int):
        """A context whose working precision is at least ``degree``."""
        D = self.D
        if D.working_prec >= degree:
            return D.ctx
        return D.refined(degree - D.working_prec).ctx

    def _eps_demazure(self, ctx, word: Sequence[int], u: TruncSeries) -> int:
        v = ctx.demazure_seq(word, u)
        return ctx.ring.integer_lift(v.constant_term())

    def torsion_gcd(self) -> dict:
        """gcd of ``eps Delta_{I_0}(m)`` over monomials ``m`` of degree ``N = l(w_0)``, with a witness ``u_0``."""
        ring, modulus = self._integer_ring()
        W = self.W
        N = W.length(W.longest)
        ctx = self._context_for(N)
        I0 = self.words[W.longest]
        monos = _monomials(ctx.n, N)
        values = [self._eps_demazure(ctx, I0, ctx.monomial(e)) for e in monos]
        g = 0
        for v in values:
            g = math.gcd(g, v)
        if modulus is not None:
            g = math.gcd(g, modulus)
        report = {"N": N, "word": list(I0), "monomials": [list(e) for e in monos], "values": values,
                  "gcd": g, "torsion_primes_expected": list(self.ctx.datum.torsion_primes())}
        if g == 0:
            report.update(u0=None, vanishing=None)
            return report
        x = solve_linear([values], [g], modulus)
        u0 = TruncSeries(ring, ctx.n, ctx.prec, {e: c for e, c in zip(monos, x) if c})
        report["u0"] = u0.to_json()
        report["u0_coeffs"] = x
        # eps Delta_I(u0) for the other canonical words and the other reduced words of w_0
        checks = []
        for w in range(len(W)):
            want = g if w == W.longest else 0
            got = self._eps_demazure(ctx, self.words[w], u0)
            checks.append({"word": list(self.words[w]), "value": got, "ok": _same(got, want, modulus)})
        for word in W.reduced_words(W.longest):
            if tuple(word) == tuple(I0):
                continue
            got = self._eps_demazure(ctx, word, u0)
            checks.append({"word": list(word), "value": got, "ok": _same(got, g, modulus)})
        report["vanishing"] = checks
        report["vanishing_ok"] = all(c["ok"] for c in checks)
        return report

    def _charmap_system(self, ctx, N: int):
        monos = [e for d in range(N + 1) for e in _monomials(ctx.n, d)]
        W = self.W
        A = [[self._eps_demazure(ctx, self.words[w], ctx.monomial(e)) for e in monos] for w in range(len(W))]
        b = [int(w == W.longest) for w in range(len(W))]
        return monos, A, b

    def charmap_surjectivity(self) -> dict:
        """Look for ``u'_0`` with ``eps Delta_{I_w}(u'_0) = [w = w_0]`` among polynomials of degree at most N."""
        ring, modulus = self._integer_ring()
        W = self.W
        N = W.length(W.longest)
        ctx = self._context_for(2 * N)
        monos, A, b = self._charmap_system(ctx, N)
        report = {"N": N, "unknowns": len(monos), "equations": len(A), "working_prec": ctx.prec}
        try:
            x = solve_linear(A, b, modulus)
        except NoSolution as exc:
            report.update(surjective=False, obstruction=exc.details.get("obstruction"),
                          invariants=exc.details.get("invariants"))
            return report
        u = TruncSeries(ring, ctx.n, ctx.prec, {e: c for e, c in zip(monos, x) if c})
        report.update(surjective=True, u0_prime=u.to_json())
        cert = self.certificate_matrix(u, ctx)
        report["certificate"] = cert
        report["unitriangular"] = _is_unitriangular(cert["matrix"], modulus)
        self._u0_prime = (u, ctx)
        return report

    def certificate_matrix(self, u: TruncSeries, ctx=None) -> dict:
        """Rows ``v = w_0 w^{-1}`` and columns ``w``, both in canonical order:
        entries ``eps Delta_{I_v} Delta_{I_w}(u)``."""
        ctx = ctx or self._context_for(2 * self.W.length(self.W.longest))
        W = self.W
        order = list(range(len(W)))
        rows = [W.mul(W.longest, W.inverse(w)) for w in order]
        M = []
        for v in rows:
            M.append([self._eps_demazure(ctx, self.words[v] + self.words[w], u) for w in order])
        return {"rows": [list(self.words[v]) for v in rows], "columns": [list(self.words[w]) for w in order],
                "matrix": M}

    def borel_presentation_check(self, table: CoproductTable | None = None) -> dict:
        """Certificate that ``{ev(Delta_{I_v}(u'_0))}`` is a basis of the dual.

        Needs a successful :meth:`charmap_surjectivity`.  The coordinate matrix
        ``(Delta_{I_w} Delta_{I_v}(u'_0))`` is invertible over S when its augmentation
        is; the ev images are also checked to multiply through ``table``.
        """
        surj = self.charmap_surjectivity()
        if not surj["surjective"]:
            return {"precondition": False, "passed": False,
                    "reason": f"characteristic map not surjective: obstruction {surj['obstruction']}",
                    "obstruction": surj["obstruction"]}
        _, modulus = self._integer_ring()
        u, ctx = self._u0_prime
        W = self.W
        cert = surj["certificate"]
        if not surj["unitriangular"]:
            raise CertificateFailure("augmented coordinate matrix is not unitriangular", matrix=cert["matrix"])
        # the ev images: coordinates of ev(Delta_{I_v}(u)) at X_{I_w} are Delta_{I_w} Delta_{I_v}(u)
        images = {}
        for v in range(len(W)):
            s = ctx.demazure_seq(self.words[v], u)
            images[v] = s
        table = table if table is not None else self.table
        mult_ok = True
        first = [v for v in range(len(W)) if W.length(v) <= 1]
        for a in first:
            for b in first:
                lhs = dual_mul(self.ev(images[a]), self.ev(images[b]), table)
                rhs = self.ev(images[a] * images[b])
                if not lhs.agrees_with(rhs):
                    mult_ok = False
        if not mult_ok:
            raise CertificateFailure("ev images do not multiply through the coproduct table")
        return {"precondition": True, "passed": True, "certificate": cert, "ev_multiplicative": mult_ok,
                "modulus": modulus}


def _same(a: int, b: int, modulus: int | None) -> bool:
    return (a - b) % modulus == 0 if modulus else a == b


def _is_unitriangular(M: list[list[int]], modulus: int | None) -> bool:
    """Unitriangular after ordering rows and columns by length, as the certificate is built."""
    n = len(M)
    for i in range(n):
        if not _same(M[i][i], 1, modulus):
            return False
        for j in range(i):
            if not _same(M[i][j], 0, modulus):
                return False
    return True
