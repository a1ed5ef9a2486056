"""Formal group laws as validated truncated bivariate series.

Besides ``F(u, v)`` a law carries the derived one-variable series used by the
Demazure machinery: the formal inverse, the multiples ``m.x``, the quotients
``psi_m = (m.x)/x`` and ``G(u, v) = (F(u, v) - u)/v``, and the series
``k(t) = 1/t + 1/inv(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coeffring import Integers, Ring, parse_ring
from .errors import AxiomViolation, ConfigError
from .powerseries import TruncSeries


def _uni(ring: Ring, prec: int, coeffs: dict[int, object]) -> TruncSeries:
    return TruncSeries(ring, 1, prec, {(d,): c for d, c in coeffs.items()})


@dataclass
class FormalGroupLaw:
    F: TruncSeries
    name: str = "custom"
    mult_bound: int = 8
    _multiples: dict = field(default_factory=dict, repr=False)
    _psi: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.F.nvars != 2:
            raise ConfigError("a formal group law is a series in two variables")
        self.ring = self.F.ring
        self.prec = self.F.prec
        self._verify()
        self.inverse = self._solve_inverse()
        self.G = self.F.__sub__(self._u()).divide_by_coordinate(1)
        x = self._x()
        # nu = inv(t)/t = -1 + O(t); its inverse absorbs 1/x_{-a} = nu_inv(x_a)/x_a
        self.nu = self.inverse.divide_by_coordinate(0)
        self.nu_inv = self.nu.invert_unit()
        s = self.inverse + x
        self.kappa = s.divide_by_coordinate(0).divide_by_coordinate(0) * self.nu_inv
        for m in range(-self.mult_bound, self.mult_bound + 1):
            self.psi(m)

    # -- axioms -------------------------------------------------------------------
    def _u(self) -> TruncSeries:
        return TruncSeries.var(self.ring, 2, self.prec, 0)

    def _x(self) -> TruncSeries:
        return TruncSeries.var(self.ring, 1, self.prec, 0)

    def _verify(self) -> None:
        terms = self.F.terms
        for (i, j), c in terms.items():
            if j == 0 and (i, j) != (1, 0):
                raise AxiomViolation(f"F(u,0) != u in degree {i}", axiom="unit", degree=i)
            if i == 0 and (i, j) != (0, 1):
                raise AxiomViolation(f"F(0,v) != v in degree {j}", axiom="unit", degree=j)
        if terms.get((1, 0)) != self.ring.one or terms.get((0, 1)) != self.ring.one:
            raise AxiomViolation("F(u,0) != u in degree 1", axiom="unit", degree=1)
        for (i, j), c in terms.items():
            if terms.get((j, i)) != c:
                raise AxiomViolation(f"F(u,v) != F(v,u) in degree {i + j}", axiom="commutativity", degree=i + j)
        ring, p = self.ring, self.prec
        u, v, w = (TruncSeries.var(ring, 3, p, k) for k in range(3))
        left = self.F.substitute([self.F.substitute([u, v]), w])
        right = self.F.substitute([u, self.F.substitute([v, w])])
        diff = left - right
        if not diff.is_zero():
            d = diff.valuation()
            raise AxiomViolation(f"F(F(u,v),w) != F(u,F(v,w)) in degree {d}", axiom="associativity", degree=d)

    def _solve_inverse(self) -> TruncSeries:
        ring, p = self.ring, self.prec
        x = self._x()
        coeffs = {1: ring.normalize(-1)}
        for d in range(2, p + 1):
            r = self.F.substitute([x, _uni(ring, p, coeffs)])
            c = r.terms.get((d,))
            if c:
                coeffs[d] = ring.normalize(-c)
        inv = _uni(ring, p, coeffs)
        assert self.F.substitute([x, inv]).is_zero()
        return inv

    # -- derived series ---------------------------------------------------------
    def add(self, a: TruncSeries, b: TruncSeries) -> TruncSeries:
        return self.F.substitute([a, b])

    def multiple(self, m: int) -> TruncSeries:
        """``m .F x`` as a one-variable series at the law's precision."""
        hit = self._multiples.get(m)
        if hit is not None:
            return hit
        x = self._x()
        if m == 0:
            out = TruncSeries.zero(self.ring, 1, self.prec)
        elif m == 1:
            out = x
        elif m > 0:
            out = self.F.substitute([self.multiple(m - 1), x])
        else:
            out = self.inverse.substitute([self.multiple(-m)])
        self._multiples[m] = out
        return out

    def psi(self, m: int) -> TruncSeries:
        """``(m .F x) / x``; precision drops by one."""
        hit = self._psi.get(m)
        if hit is None:
            hit = self._psi[m] = self.multiple(m).divide_by_coordinate(0)
        return hit

    def quotient_G(self) -> TruncSeries:
        return self.G

    def kappa_series(self) -> TruncSeries:
        return self.kappa

    def a11(self):
        return self.F.terms.get((1, 1), self.ring.zero)

    def describe(self) -> dict:
        return {"name": self.name, "ring": str(self.ring), "prec": self.prec, "F": self.F.to_json()}


def build_additive(ring: Ring | None = None, prec: int = 10) -> FormalGroupLaw:
    ring = ring or Integers()
    F = TruncSeries(ring, 2, prec, {(1, 0): 1, (0, 1): 1})
    return FormalGroupLaw(F, name="additive")


def build_multiplicative(ring: Ring | None = None, beta=1, prec: int = 10) -> FormalGroupLaw:
    ring = ring or Integers()
    b = ring.coerce(beta)
    F = TruncSeries(ring, 2, prec, {(1, 0): 1, (0, 1): 1, (1, 1): ring.neg(b)})
    return FormalGroupLaw(F, name=f"multiplicative:beta={ring.to_str(b)}")


def build_hyperbolic(ring: Ring | None = None, mu1=0, mu2=1, prec: int = 10) -> FormalGroupLaw:
    """``(u + v - mu1 uv) / (1 + mu2 uv)``; braid relations fail for it once ``mu2 != 0``."""
    ring = ring or Integers()
    m1, m2 = ring.coerce(mu1), ring.coerce(mu2)
    num = TruncSeries(ring, 2, prec, {(1, 0): 1, (0, 1): 1, (1, 1): ring.neg(m1)})
    den = TruncSeries(ring, 2, prec, {(0, 0): 1, (1, 1): m2})
    return FormalGroupLaw(num * den.invert_unit(),
                          name=f"hyperbolic:mu1={ring.to_str(m1)},mu2={ring.to_str(m2)}")


def build_custom(F: TruncSeries, name: str = "custom") -> FormalGroupLaw:
    return FormalGroupLaw(F, name=name)


def parse_law_series(text: str, ring: Ring, prec: int) -> TruncSeries:
    """Parse an expression in ``u``, ``v`` and the ring's variables."""
    from .expr import evaluate_expression

    u = TruncSeries.var(ring, 2, prec, 0)
    v = TruncSeries.var(ring, 2, prec, 1)
    names = {"u": u, "v": v}
    for name in getattr(ring, "vars", ()):
        names[name] = TruncSeries.constant(ring, 2, prec, ring.parse(name))
    out = evaluate_expression(text, names, lambda n: TruncSeries.constant(ring, 2, prec, n))
    if not isinstance(out, TruncSeries):
        out = TruncSeries.constant(ring, 2, prec, out)
    return out


def build_law(spec, ring: Ring | str | None = None, prec: int = 10) -> FormalGroupLaw:
    """Build a law from ``"additive"``, ``"multiplicative:beta=b"``, ``"hyperbolic:mu1=a,mu2=b"``,
    ``"custom:<expr>"``
    or the dictionary forms ``{"multiplicative": {"beta": b}}`` / ``{"custom": series-json}``."""
    ring = parse_ring(ring) if ring is not None else Integers()
    if isinstance(spec, str):
        kind, _, rest = spec.partition(":")
        kind = kind.strip()
        if kind == "additive":
            return build_additive(ring, prec)
        if kind == "multiplicative":
            beta = "1"
            for part in filter(None, rest.split(",")):
                key, _, val = part.partition("=")
                if key.strip() != "beta":
                    raise ConfigError(f"unknown multiplicative law parameter {key!r}")
                beta = val.strip()
            return build_multiplicative(ring, beta, prec)
        if kind == "hyperbolic":
            params = {"mu1": "0", "mu2": "1"}
            for part in filter(None, rest.split(",")):
                key, _, val = part.partition("=")
                if key.strip() not in params:
                    raise ConfigError(f"unknown hyperbolic law parameter {key!r}")
                params[key.strip()] = val.strip()
            return build_hyperbolic(ring, params["mu1"], params["mu2"], prec)
        if kind == "custom":
            return build_custom(parse_law_series(rest, ring, prec), name=f"custom:{rest.strip()}")
        raise ConfigError(f"unknown formal group law {spec!r}")
    if isinstance(spec, dict):
        if "multiplicative" in spec:
            beta = spec["multiplicative"].get("beta", 1)
            return build_multiplicative(ring, str(beta), prec)
        if "custom" in spec:
            body = spec["custom"]
            if isinstance(body, str):
                return build_custom(parse_law_series(body, ring, prec), name=f"custom:{body}")
            F = TruncSeries.from_json(body, ring, 2)
            if F.prec < prec:
                raise ConfigError(f"custom law given to degree {F.prec}, need {prec}")
            return build_custom(F.truncate(prec))
        if "hyperbolic" in spec:
            body = spec["hyperbolic"]
            return build_hyperbolic(ring, str(body.get("mu1", 0)), str(body.get("mu2", 1)), prec)
        if "additive" in spec:
            return build_additive(ring, prec)
    raise ConfigError(f"cannot build a formal group law from {spec!r}")
