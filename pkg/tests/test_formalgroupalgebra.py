import itertools
import random

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from demazure.errors import NotDivisible, PrecisionExhausted
from demazure.formalgroupalgebra import AlgebraConfig, make_context
from demazure.powerseries import TruncSeries

from oracles import additive_demazure


def ctx_for(type_="A2", lattice="sc", ring="Z", fgl="additive", prec=6, slack=0):
    return make_context(AlgebraConfig(type=type_, lattice=lattice, ring=ring, fgl=fgl, prec=prec, slack=slack))


def to_sympy(s: TruncSeries, xs):
    out = 0
    for e, c in s.terms.items():
        term = sp.Integer(int(s.ring.to_str(c)))
        for k, p in enumerate(e):
            term *= xs[k] ** p
        out += term
    return sp.expand(out)


def from_sympy(expr, ctx):
    poly = sp.Poly(sp.expand(expr), *sp.symbols(f"x1:{ctx.n + 1}"))
    return TruncSeries(ctx.ring, ctx.n, ctx.prec, {m: int(c) for m, c in zip(poly.monoms(), poly.coeffs())})


def test_x_of_vanishes_mod_three():
    ctx = ctx_for("A2", "sc", "Z/3")
    d = ctx.datum
    lam = tuple(a + 2 * b for a, b in zip(d.simple_roots[0], d.simple_roots[1]))
    assert lam == (0, 3)
    assert ctx.x_of(lam).is_zero()


def test_x_of_long_root_c1_mod_two():
    ctx = ctx_for("C1", "sc", "Z/2", "multiplicative:beta=1")
    x = ctx.coord(0)
    assert ctx.x_of((2,)) == x * x
    assert ctx.x_of((0,)).is_zero()
    report = ctx.regularity_report()
    assert report == [{"root": 0, "content": 2, "regular": False}]


def test_x_of_is_a_homomorphism():
    ctx = ctx_for("B2", "adj", "Z", "multiplicative:beta=1")
    F = ctx.law.F
    for lam, mu in [((1, 0), (0, 1)), ((1, -1), (2, 1)), ((-1, 0), (1, 0))]:
        tot = tuple(a + b for a, b in zip(lam, mu))
        assert ctx.x_of(tot) == F.substitute([ctx.x_of(lam), ctx.x_of(mu)])


def test_weyl_action_examples():
    ctx = ctx_for("A2", "adj")
    u = ctx.random_series(random.Random(1))
    assert ctx.weyl_act(0, u) == u
    a1 = ctx.x_simple(1)
    assert ctx.simple_reflect(1, a1) == -a1


@pytest.mark.parametrize("fgl", ["additive", "multiplicative:beta=1", "hyperbolic:mu1=1,mu2=1"])
def test_weyl_action_is_an_automorphism(fgl):
    ctx = ctx_for("B2", "adj", fgl=fgl)
    rng = random.Random(5)
    W = ctx.W
    for _ in range(5):
        u, v = ctx.random_series(rng), ctx.random_series(rng)
        w = rng.randrange(len(W))
        assert ctx.weyl_act(w, u * v) == ctx.weyl_act(w, u) * ctx.weyl_act(w, v)
        w2 = rng.randrange(len(W))
        assert ctx.weyl_act(W.mul(w, w2), u) == ctx.weyl_act(w, ctx.weyl_act(w2, u))


def test_demazure_basic_values():
    ctx = ctx_for("A2", "sc")
    one = ctx.one()
    assert ctx.demazure_simple(1, ctx.coord(0)) == one.truncate(ctx.prec - 1)
    assert ctx.demazure_simple(1, one).is_zero()
    assert ctx.demazure_simple(1, ctx.coord(1)).is_zero()
    assert ctx.demazure_simple(1, ctx.x_simple(1)) == ctx.const(2).truncate(ctx.prec - 1)
    assert ctx.demazure_simple(1, ctx.coord(0)).prec == ctx.prec - 1


def test_b_operators():
    ctx = ctx_for("A2", "sc")
    assert ctx.b_op(1, 1, ctx.one()) == -ctx.x_simple(1)
    assert ctx.b_op(1, 0, ctx.one()) == ctx.one()
    assert ctx.b_op(2, -1, ctx.x_simple(2)) == ctx.const(2).truncate(ctx.prec - 1)
    with pytest.raises(ValueError):
        ctx.b_op(1, 2, ctx.one())


@pytest.mark.parametrize("type_", ["A2", "B2", "G2"])
def test_additive_demazure_matches_sympy(type_):
    ctx = ctx_for(type_, "sc", prec=5)
    d = ctx.datum
    xs = sp.symbols(f"x1:{ctx.n + 1}")
    rng = random.Random(11)
    for i in range(1, ctx.n + 1):
        rt = d.roots[d.simple_index(i)]
        root_linear = sum(c * xs[k] for k, c in enumerate(rt.lattice))
        reflection = [xs[k] - rt.coroot[k] * root_linear for k in range(ctx.n)]
        for _ in range(4):
            u = ctx.random_series(rng, max_degree=4)
            want = additive_demazure(to_sympy(u, xs), xs, reflection, root_linear)
            got = ctx.demazure_simple(i, u)
            assert to_sympy(got, xs) == sp.expand(want)


@pytest.mark.parametrize("fgl,ring", [("additive", "Z"), ("multiplicative:beta=1", "Z"),
                                      ("hyperbolic:mu1=1,mu2=1", "Z"), ("custom:u+v+a*u*v", "Z[a]"),
                                      ("multiplicative:beta=1", "Z/2")])
def test_leibniz_and_division_cross_check(fgl, ring):
    lattice = "sc"
    ctx = ctx_for("B2", lattice, ring, fgl)
    rng = random.Random(3)
    for _ in range(6):
        u, v = ctx.random_series(rng), ctx.random_series(rng)
        for i in (1, 2):
            lhs = ctx.demazure_simple(i, u * v)
            rhs = ctx.demazure_simple(i, u) * v + ctx.simple_reflect(i, u) * ctx.demazure_simple(i, v)
            assert lhs.agrees_with(rhs)
            k = ctx.datum.simple_index(i)
            try:
                checked = ctx.demazure(k, u, cross_check=True)
            except NotDivisible:
                # only the non-regular long root over Z/2 may refuse the division path
                assert ring == "Z/2" and not ctx.regularity_report()[k]["regular"]
                continue
            assert checked.agrees_with(ctx.demazure(k, u))


@pytest.mark.parametrize("fgl", ["multiplicative:beta=1", "hyperbolic:mu1=1,mu2=1", "additive"])
def test_demazure_square_is_kappa_times_demazure(fgl):
    ctx = ctx_for("A2", "adj", fgl=fgl)
    rng = random.Random(7)
    for _ in range(5):
        u = ctx.random_series(rng)
        for i in (1, 2):
            k = ctx.datum.simple_index(i)
            twice = ctx.demazure_simple(i, ctx.demazure_simple(i, u))
            assert twice.agrees_with(ctx.kappa(k) * ctx.demazure_simple(i, u))


def test_kappa_values():
    assert ctx_for("A2", "adj").kappa(0).is_zero()
    ctx = ctx_for("A2", "adj", fgl="multiplicative:beta=3")
    assert ctx.kappa(2) == ctx.const(3).truncate(ctx.kappa(2).prec)


def test_demazure_seq_precision():
    ctx = ctx_for("A2", "adj", prec=3)
    u = ctx.coord(0)
    assert ctx.demazure_seq((), u) == u
    assert ctx.demazure_seq((1, 2, 1), u).prec == 0
    with pytest.raises(PrecisionExhausted):
        ctx.demazure_seq((1, 2, 1, 2), u)


def test_word_dependence():
    rng = random.Random(2)
    add = ctx_for("B2", "adj", prec=7)
    hyp = ctx_for("B2", "adj", fgl="hyperbolic:mu1=1,mu2=1", prec=7)
    differs = False
    for _ in range(4):
        u = add.random_series(rng, min_degree=4)
        assert add.demazure_seq((1, 2, 1, 2), u) == add.demazure_seq((2, 1, 2, 1), u)
        if not hyp.demazure_seq((1, 2, 1, 2), u).agrees_with(hyp.demazure_seq((2, 1, 2, 1), u)):
            differs = True
    assert differs


def test_p_coeff_rank_one_cases():
    ctx = ctx_for("A2", "adj")
    w = (1,)
    assert ctx.p_coeff(w, [], []).is_zero()
    assert ctx.p_coeff(w, [0], []) == ctx.one()
    assert ctx.p_coeff(w, [], [0]) == ctx.one()
    assert ctx.p_coeff(w, [0], [0]) == -ctx.x_simple(1)


def test_p_coeff_vanishes_for_disjoint_noncovering():
    ctx = ctx_for("B2", "adj", fgl="multiplicative:beta=1")
    word = (1, 2, 1)
    for E1 in itertools.chain.from_iterable(itertools.combinations(range(3), k) for k in range(4)):
        for E2 in itertools.chain.from_iterable(itertools.combinations(range(3), k) for k in range(4)):
            p = ctx.p_coeff(word, E1, E2)
            if not set(E1) & set(E2) and set(E1) | set(E2) != {0, 1, 2}:
                assert p.is_zero()
            val = p.valuation()
            if val is not None:
                assert val >= len(E1) + len(E2) - 3


def test_p_coeff_full_sets_length_two():
    ctx = ctx_for("A2", "adj")
    p = ctx.p_coeff((1, 2), [0, 1], [0, 1])
    assert p == ctx.x_of((1, 0)) * ctx.x_of((1, 1))
    assert p.valuation() == 2


def test_product_formula():
    ctx = ctx_for("A2", "adj", fgl="hyperbolic:mu1=1,mu2=1", prec=8)
    rng = random.Random(9)
    subsets = lambda l: [c for k in range(l + 1) for c in itertools.combinations(range(l), k)]
    for word in [(1,), (2, 1), (1, 2, 1), (1, 2, 2)]:
        l = len(word)
        u, v = ctx.random_series(rng), ctx.random_series(rng)
        lhs = ctx.demazure_seq(word, u * v)
        rhs = None
        for E1 in subsets(l):
            for E2 in subsets(l):
                p = ctx.p_coeff(word, E1, E2)
                if p.is_zero():
                    continue
                t = p * ctx.demazure_seq([word[k] for k in E1], u) * ctx.demazure_seq([word[k] for k in E2], v)
                rhs = t if rhs is None else rhs + t
        assert lhs.agrees_with(rhs, ctx.prec - l)


def test_expression_parsing():
    ctx = ctx_for("A2", "adj")
    s = ctx.series_from_expression("x1*x2 + 2*x(1,1)")
    assert s == ctx.coord(0) * ctx.coord(1) + ctx.x_of((1, 1)).scale(2)


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_leibniz_property(seed):
    ctx = _G2
    rng = random.Random(seed)
    u, v = ctx.random_series(rng), ctx.random_series(rng)
    i = rng.choice([1, 2])
    lhs = ctx.demazure_simple(i, u * v)
    rhs = ctx.demazure_simple(i, u) * v + ctx.simple_reflect(i, u) * ctx.demazure_simple(i, v)
    assert lhs.agrees_with(rhs)


_G2 = ctx_for("G2", "adj", fgl="multiplicative:beta=1", prec=5)
